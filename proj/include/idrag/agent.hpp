#pragma once

#include <functional>
#include <optional>
#include <string>

#include "idrag/chronicle.hpp"
#include "idrag/gateway.hpp"
#include "idrag/memory.hpp"
#include "idrag/retrieval.hpp"

namespace idrag {

enum class Condition { Baseline, FullRetrieval, IdRag };

Condition condition_from_string(const std::string& s);
std::string to_string(Condition c);

struct AgentState {
    std::string name;
    Condition condition = Condition::Baseline;
    std::optional<Chronicle> chronicle; // required unless Baseline
    // Alternative Condition-2 identity text (appendix prose); when set it is
    // used instead of the triplet rendering.
    std::optional<std::string> chronicle_prose;
    MemoryStream memory;
    std::string goal;
    std::string last_plan;
};

struct ActionAttempt {
    std::string actor;
    int timestep = 0;
    std::string text;
    WorkingMemory wm_snapshot;
};

struct AgentStepConfig {
    std::size_t salience_k = 25;
    RetrievalConfig retrieval;
    std::ostream* trace = nullptr;
};

// Condition dispatch for the identity section: Baseline synthesizes from
// retrieved memories, FullRetrieval inserts the whole Chronicle rendering,
// IdRag runs the query-builder + retrieval path. FullRetrieval and IdRag
// also regenerate the transient somatic line from memory.
WorkingMemory fill_identity_section(AgentState& state, const WorkingMemory& wm,
                                    Gateway& gateway, int timestep,
                                    const AgentStepConfig& cfg = {});

// One pass of the decision loop: observe, salience retrieval, composition,
// identity fill, action generation; observation and action are both recorded
// to the memory stream.
ActionAttempt decision_step(AgentState& state, const std::string& observation,
                            SimTime now, int timestep, Gateway& gateway,
                            const AgentStepConfig& cfg = {});

using UpdateHook =
    std::function<Chronicle(const Chronicle&, const std::string& observation,
                            const std::string& action)>;

// Step-8 hook. The default (null hook) leaves the Chronicle untouched; a
// plug-in must return a valid graph with a bumped version.
void identity_update_hook(AgentState& state, const std::string& observation,
                          const std::string& action, const UpdateHook& hook = nullptr);

} // namespace idrag
