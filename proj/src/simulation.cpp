#include "idrag/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idrag/errors.hpp"
#include "idrag/prompts.hpp"

namespace idrag {

using nlohmann::json;

static std::string resolve_fixture_path(const std::string& path) {
    if (path.empty() || std::filesystem::exists(path)) return path;
    std::string candidate = fixture_dir() + "/" + path;
    if (std::filesystem::exists(candidate)) return candidate;
    return path;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    Scenario s;
    try {
        s.name = j.at("name").get<std::string>();
        s.shared_context = j.value("shared_context", "");
        const auto& clock = j.at("clock");
        s.clock_start = parse_sim_time(clock.at("start").get<std::string>());
        s.step_hours = clock.value("step_hours", 1);
        s.steps = clock.value("steps", 7);
        if (j.contains("polls")) {
            s.poll_open_hour = j["polls"].value("open_hour", 11);
            s.poll_close_hour = j["polls"].value("close_hour", 15);
        }
        if (j.contains("events")) {
            for (const auto& je : j["events"]) {
                s.events.push_back({parse_sim_time(je.at("time").get<std::string>()),
                                    je.at("description").get<std::string>()});
            }
        }
        if (j.contains("retrieval")) {
            s.retrieval.triplet_budget = j["retrieval"].value("k", 8);
            s.retrieval.expansion_radius = j["retrieval"].value("r", 0);
            s.retrieval.mode =
                retrieval_mode_from_string(j["retrieval"].value("mode", "symbolic"));
        }
        s.max_turns = j.value("max_turns", 8);
        for (const auto& ja : j.at("agents")) {
            AgentConfig a;
            a.name = ja.at("name").get<std::string>();
            a.condition = condition_from_string(ja.value("condition", "baseline"));
            a.chronicle_path = ja.value("chronicle", "");
            a.goal = ja.value("goal", "");
            a.seed_memories_path = ja.value("memories", "");
            a.identity_text = ja.value("identity_text", "triplets");
            a.prose_path = ja.value("prose", "");
            s.agents.push_back(std::move(a));
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (s.steps < 1) throw ValidationError(path + ": steps must be >= 1");
    SimTime end = s.clock_start + static_cast<SimTime>(s.steps) * s.step_hours * 3600;
    for (const auto& e : s.events) {
        if (e.time < s.clock_start || e.time > end) {
            throw ValidationError(path + ": event at " + format_sim_time(e.time) +
                                  " is outside the clock range");
        }
    }
    return s;
}

static bool polls_open(const Scenario& scenario, SimTime t) {
    int h = hour_of_day(t);
    return h >= scenario.poll_open_hour && h < scenario.poll_close_hour;
}

static Effect parse_effect(const std::string& narration) {
    std::istringstream lines(narration);
    std::string line;
    Effect effect;
    while (std::getline(lines, line)) {
        auto pos = line.find("EFFECT:");
        if (pos == std::string::npos) continue;
        std::string body = line.substr(pos + 7);
        // trim
        auto b = body.find_first_not_of(" \t");
        auto e = body.find_last_not_of(" \t\r");
        if (b == std::string::npos) continue;
        body = body.substr(b, e - b + 1);
        if (body.rfind("vote:", 0) == 0) {
            effect.kind = Effect::Kind::Vote;
            effect.arg = body.substr(5);
        } else if (body.rfind("talk:", 0) == 0) {
            effect.kind = Effect::Kind::Talk;
            effect.arg = body.substr(5);
        } else {
            effect.kind = Effect::Kind::None;
            effect.arg.clear();
        }
    }
    return effect;
}

ResolvedAction resolve_action(GameMasterState& gm, const Scenario& scenario,
                              const ActionAttempt& attempt, Gateway& gateway) {
    std::ostringstream state;
    state << "Time: " << format_sim_time(gm.clock) << ". Polls are "
          << (polls_open(scenario, gm.clock) ? "open" : "closed") << ". Vote tally:";
    if (gm.vote_tally.empty()) {
        state << " none yet.";
    } else {
        for (const auto& [cand, n] : gm.vote_tally) state << " " << cand << "=" << n;
        state << ".";
    }
    std::string prompt = fill_template(load_prompt("gm_resolve.txt"),
                                       {{"shared_context", scenario.shared_context},
                                        {"state_summary", state.str()},
                                        {"actor", attempt.actor},
                                        {"action", attempt.text}});
    std::string narration = gateway.complete(ChatRequest::user(Purpose::Action, prompt));

    ResolvedAction out;
    out.narration = narration;
    out.effect = parse_effect(narration);
    if (out.effect.kind == Effect::Kind::Vote && !out.effect.arg.empty() &&
        polls_open(scenario, gm.clock)) {
        gm.vote_tally[out.effect.arg] += 1;
        out.vote_counted = true;
    }
    gm.event_log.push_back({gm.clock, narration, out.vote_counted});
    return out;
}

ConversationTranscript run_conversation(GameMasterState& gm, AgentState& initiator,
                                        AgentState& respondent, Gateway& gateway,
                                        int max_turns, SimTime now,
                                        double repetition_threshold) {
    ConversationTranscript transcript;
    if (max_turns <= 0) return transcript;

    auto transcript_text = [&] {
        std::string out;
        for (const auto& u : transcript.utterances) {
            out += u.speaker + ": " + u.text + "\n";
        }
        return out;
    };

    auto is_farewell = [](const std::string& text) {
        std::string low = text;
        std::transform(low.begin(), low.end(), low.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return low.find("goodbye") != std::string::npos ||
               low.find("farewell") != std::string::npos;
    };

    auto repeats = [&](const std::string& speaker, const std::string& text) {
        EmbeddingVector v = gateway.embed(text);
        int checked = 0;
        for (auto it = transcript.utterances.rbegin();
             it != transcript.utterances.rend() && checked < 2; ++it) {
            if (it->speaker != speaker) continue;
            ++checked;
            if (cosine_similarity(v, gateway.embed(it->text)) >= repetition_threshold) {
                return true;
            }
        }
        return false;
    };

    bool done = false;
    for (int turn = 1; turn <= max_turns && !done; ++turn) {
        for (AgentState* speaker : {&initiator, &respondent}) {
            AgentState* partner = speaker == &initiator ? &respondent : &initiator;
            std::string prompt = fill_template(load_prompt("conversation.txt"),
                                               {{"agent_name", speaker->name},
                                                {"partner_name", partner->name},
                                                {"transcript", transcript_text()}});
            std::string text = gateway.complete(ChatRequest::user(Purpose::Action, prompt));
            bool farewell = is_farewell(text);
            bool repetition = !farewell && repeats(speaker->name, text);
            transcript.utterances.push_back({turn, speaker->name, text});
            if (farewell) {
                transcript.reason = "farewell";
                done = true;
                break;
            }
            if (repetition) {
                transcript.reason = "repetition";
                done = true;
                break;
            }
        }
    }
    if (transcript.reason.empty()) transcript.reason = "max_turns";

    gm.conversation_depth[initiator.name + "|" + respondent.name] +=
        static_cast<int>(transcript.utterances.size());

    std::string summary = "Conversation between " + initiator.name + " and " +
                          respondent.name + ":\n" + transcript_text();
    append(initiator.memory, summary, now, 0.5, gateway);
    append(respondent.memory, summary, now, 0.5, gateway);
    return transcript;
}

MemoryStream seed_formative_memories(const AgentConfig& agent, const Scenario& scenario,
                                     Gateway& gateway, MemorySeedMode mode) {
    MemoryStream stream;
    stream.owner = agent.name;
    std::string path = resolve_fixture_path(agent.seed_memories_path);

    if (mode == MemorySeedMode::Fixture) {
        std::ifstream in(path);
        if (!in) {
            throw MissingFixture("memory seed fixture not found for '" + agent.name +
                                 "': " + agent.seed_memories_path);
        }
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        for (const auto& je : j) {
            append(stream, je.at("text").get<std::string>(),
                   parse_sim_time(je.at("timestamp").get<std::string>()),
                   je.value("importance", 0.5), gateway);
        }
        return stream;
    }

    // generate mode: synthesize timestamped narratives and persist them as a
    // new fixture so later runs can hold them constant.
    std::string chronicle_text;
    if (!agent.chronicle_path.empty()) {
        chronicle_text = render_chronicle_text(load_chronicle(resolve_fixture_path(agent.chronicle_path)));
    }
    std::string prompt = fill_template(load_prompt("formative_memories.txt"),
                                       {{"agent_name", agent.name},
                                        {"chronicle_text", chronicle_text},
                                        {"shared_context", scenario.shared_context}});
    std::string reply = gateway.complete(ChatRequest::user(Purpose::ComponentGeneration, prompt));

    struct Parsed {
        SimTime t;
        std::string text;
    };
    std::vector<Parsed> parsed;
    std::istringstream lines(reply);
    std::string line;
    while (std::getline(lines, line)) {
        auto open = line.find('[');
        auto close = line.find(']');
        if (open == std::string::npos || close == std::string::npos || close <= open) continue;
        std::string stamp = line.substr(open + 1, close - open - 1);
        std::string text = line.substr(close + 1);
        auto b = text.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        text = text.substr(b);
        try {
            parsed.push_back({parse_sim_time(stamp), text});
        } catch (const ParseError&) {
            continue;
        }
    }
    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const Parsed& a, const Parsed& b) { return a.t < b.t; });
    json out = json::array();
    for (const auto& p : parsed) {
        append(stream, p.text, p.t, 0.5, gateway);
        out.push_back({{"timestamp", format_sim_time(p.t)}, {"text", p.text}, {"importance", 0.5}});
    }
    std::ofstream dump(path.empty() ? agent.name + ".memories.json" : path);
    if (dump) dump << out.dump(2) << "\n";
    return stream;
}

EpisodeRecord run_episode(const Scenario& scenario, Gateway& gateway,
                          std::int64_t run_seed, const EpisodeOptions& opts) {
    EpisodeRecord record;
    record.scenario = scenario.name;
    record.run_id = "run-" + std::to_string(run_seed);

    auto t0 = std::chrono::steady_clock::now();

    std::vector<AgentState> agents;
    try {
        for (const auto& cfg : scenario.agents) {
            AgentState a;
            a.name = cfg.name;
            a.condition = cfg.condition;
            a.goal = cfg.goal;
            if (!cfg.chronicle_path.empty()) {
                a.chronicle = load_chronicle(resolve_fixture_path(cfg.chronicle_path));
            }
            if (cfg.identity_text == "prose" && !cfg.prose_path.empty()) {
                std::ifstream in(resolve_fixture_path(cfg.prose_path));
                if (!in) throw MissingFixture("prose chronicle not found: " + cfg.prose_path);
                std::stringstream buf;
                buf << in.rdbuf();
                a.chronicle_prose = buf.str();
            }
            if ((a.condition == Condition::FullRetrieval || a.condition == Condition::IdRag) &&
                !a.chronicle) {
                throw MissingChronicle("agent '" + a.name + "' requires a chronicle path");
            }
            a.memory = seed_formative_memories(cfg, scenario, gateway, opts.seed_mode);
            record.conditions[a.name] = to_string(a.condition);
            record.chronicle_paths[a.name] = cfg.chronicle_path;
            agents.push_back(std::move(a));
        }

        GameMasterState gm;
        AgentStepConfig step_cfg = opts.step;
        step_cfg.retrieval = scenario.retrieval;

        std::string broadcast;
        for (int step = 0; step < scenario.steps; ++step) {
            TimestepRecord ts;
            ts.index = step;
            ts.time = scenario.clock_start +
                      static_cast<SimTime>(step) * scenario.step_hours * 3600;
            gm.clock = ts.time;

            std::string base = "The time is " + format_sim_time(ts.time) + ".";
            if (step == 0 && !scenario.shared_context.empty()) {
                base += " " + scenario.shared_context;
            }
            for (const auto& e : scenario.events) {
                if (e.time == ts.time) base += " " + e.description;
            }
            int hour = hour_of_day(ts.time);
            if (hour == scenario.poll_open_hour) {
                base += " The polls are now open; citizens may cast their vote for mayor.";
            }
            if (hour == scenario.poll_close_hour) {
                base += " The polls are now closed.";
            }
            if (!broadcast.empty()) base += " " + broadcast;

            std::vector<std::string> narrations;
            for (auto& agent : agents) {
                std::string observation = base;
                ts.observations[agent.name] = observation;
                ActionAttempt attempt =
                    decision_step(agent, observation, ts.time, step, gateway, step_cfg);
                ResolvedAction resolved = resolve_action(gm, scenario, attempt, gateway);
                narrations.push_back(resolved.narration);
                ts.actions.push_back(std::move(attempt));
                ts.narrations.push_back(resolved.narration);
                if (resolved.effect.kind == Effect::Kind::Talk) {
                    auto partner = std::find_if(agents.begin(), agents.end(),
                                                [&](const AgentState& a) {
                                                    return a.name == resolved.effect.arg;
                                                });
                    if (partner != agents.end() && partner->name != agent.name) {
                        ts.conversations.push_back(run_conversation(
                            gm, agent, *partner, gateway, opts.max_turns, ts.time));
                    }
                }
            }
            broadcast.clear();
            for (const auto& n : narrations) {
                if (!broadcast.empty()) broadcast += " ";
                broadcast += n;
            }
            record.timesteps.push_back(std::move(ts));
        }
        record.vote_tally = gm.vote_tally;
        record.converged = true;
    } catch (const Error& e) {
        record.converged = false;
        record.diagnostic = e.what();
    }

    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

static json wm_to_json(const WorkingMemory& wm) {
    return {{"observation", wm.observation},
            {"retrieved_memories", wm.retrieved_memories},
            {"identity_characteristics", wm.identity_characteristics},
            {"somatic_state", wm.somatic_state},
            {"plan", wm.plan}};
}

std::string episode_to_json(const EpisodeRecord& record) {
    json j;
    j["scenario"] = record.scenario;
    j["run_id"] = record.run_id;
    j["conditions"] = record.conditions;
    j["chronicle_paths"] = record.chronicle_paths;
    j["converged"] = record.converged;
    j["diagnostic"] = record.diagnostic;
    j["vote_tally"] = record.vote_tally;
    j["timesteps"] = json::array();
    for (const auto& ts : record.timesteps) {
        json jt;
        jt["index"] = ts.index;
        jt["time"] = format_sim_time(ts.time);
        jt["observations"] = ts.observations;
        jt["narrations"] = ts.narrations;
        jt["actions"] = json::array();
        for (const auto& a : ts.actions) {
            jt["actions"].push_back({{"actor", a.actor},
                                     {"timestep", a.timestep},
                                     {"text", a.text},
                                     {"working_memory", wm_to_json(a.wm_snapshot)}});
        }
        jt["conversations"] = json::array();
        for (const auto& c : ts.conversations) {
            json jc;
            jc["reason"] = c.reason;
            jc["utterances"] = json::array();
            for (const auto& u : c.utterances) {
                jc["utterances"].push_back(
                    {{"turn", u.turn}, {"speaker", u.speaker}, {"text", u.text}});
            }
            jt["conversations"].push_back(std::move(jc));
        }
        j["timesteps"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

void save_episode(const EpisodeRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write episode record: " + path);
    out << episode_to_json(record);
}

} // namespace idrag
