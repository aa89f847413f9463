#include "idrag/agent.hpp"

#include "idrag/errors.hpp"
#include "idrag/prompts.hpp"

namespace idrag {

Condition condition_from_string(const std::string& s) {
    if (s == "baseline") return Condition::Baseline;
    if (s == "full_retrieval") return Condition::FullRetrieval;
    if (s == "id_rag") return Condition::IdRag;
    throw ParseError("unknown condition: '" + s + "'");
}

std::string to_string(Condition c) {
    switch (c) {
        case Condition::Baseline: return "baseline";
        case Condition::FullRetrieval: return "full_retrieval";
        case Condition::IdRag: return "id_rag";
    }
    return "baseline";
}

static std::string synthesize_component(const AgentState& state, const WorkingMemory& wm,
                                        Gateway& gateway, const std::string& tmpl_name) {
    std::string prompt = fill_template(load_prompt(tmpl_name),
                                       {{"agent_name", state.name},
                                        {"memories", wm.retrieved_memories}});
    return gateway.complete(ChatRequest::user(Purpose::ComponentGeneration, prompt));
}

WorkingMemory fill_identity_section(AgentState& state, const WorkingMemory& wm,
                                    Gateway& gateway, int timestep,
                                    const AgentStepConfig& cfg) {
    WorkingMemory out = wm;
    switch (state.condition) {
        case Condition::Baseline: {
            std::string occupation =
                synthesize_component(state, wm, gateway, "baseline_occupation.txt");
            std::string core = synthesize_component(state, wm, gateway, "baseline_core.txt");
            std::string somatic =
                synthesize_component(state, wm, gateway, "baseline_somatic.txt");
            out.identity_characteristics = "Current daily occupation: " + occupation +
                                           "\nCore characteristics: " + core +
                                           "\nFeeling about recent progress in life: " + somatic;
            break;
        }
        case Condition::FullRetrieval: {
            if (!state.chronicle) {
                throw MissingChronicle("agent '" + state.name +
                                       "' is full_retrieval but has no chronicle");
            }
            out.identity_characteristics = state.chronicle_prose
                                               ? *state.chronicle_prose
                                               : render_chronicle_text(*state.chronicle);
            out.somatic_state = synthesize_component(state, wm, gateway, "baseline_somatic.txt");
            break;
        }
        case Condition::IdRag: {
            if (!state.chronicle) {
                throw MissingChronicle("agent '" + state.name +
                                       "' is id_rag but has no chronicle");
            }
            auto result = retrieve_identity(*state.chronicle, state.name, wm, cfg.retrieval,
                                            gateway, cfg.trace, timestep);
            out = augment(out, result.formatted_text);
            out.somatic_state = synthesize_component(state, wm, gateway, "baseline_somatic.txt");
            break;
        }
    }
    return out;
}

ActionAttempt decision_step(AgentState& state, const std::string& observation,
                            SimTime now, int timestep, Gateway& gateway,
                            const AgentStepConfig& cfg) {
    auto fail = [&](const std::string& step, const std::string& what) -> StepFailure {
        return StepFailure("agent '" + state.name + "' timestep " + std::to_string(timestep) +
                           " failed at " + step + ": " + what);
    };

    std::vector<MemoryEntry> retrieved;
    try {
        retrieved = salience_topk(state.memory, observation, cfg.salience_k, now, gateway);
    } catch (const Error& e) {
        throw fail("episodic_retrieval", e.what());
    }

    WorkingMemory wm = compose_working_memory(observation, retrieved, "", "", state.last_plan);

    WorkingMemory augmented;
    try {
        augmented = fill_identity_section(state, wm, gateway, timestep, cfg);
    } catch (const MissingChronicle&) {
        throw;
    } catch (const Error& e) {
        throw fail("identity_fill", e.what());
    }

    std::string action;
    try {
        std::string prompt = fill_template(load_prompt("action.txt"),
                                           {{"agent_name", state.name},
                                            {"goal", state.goal},
                                            {"working_memory", augmented.render()}});
        action = gateway.complete(ChatRequest::user(Purpose::Action, prompt));
    } catch (const Error& e) {
        throw fail("action_generation", e.what());
    }

    try {
        append(state.memory, observation, now, 0.5, gateway);
        append(state.memory, state.name + " attempted: " + action, now, 0.5, gateway);
    } catch (const Error& e) {
        throw fail("memory_record", e.what());
    }

    return {state.name, timestep, action, augmented};
}

void identity_update_hook(AgentState& state, const std::string& observation,
                          const std::string& action, const UpdateHook& hook) {
    if (!hook || !state.chronicle) return;
    Chronicle before = *state.chronicle;
    Chronicle after = hook(before, observation, action);
    try {
        validate(after);
    } catch (const ValidationError& e) {
        throw InvariantViolation(std::string("update hook produced invalid chronicle: ") +
                                 e.what());
    }
    if (after.version <= before.version) {
        throw InvariantViolation("update hook must bump the chronicle version");
    }
    state.chronicle = std::move(after);
}

} // namespace idrag
