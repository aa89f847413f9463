#pragma once

#include <map>
#include <string>
#include <vector>

#include "idrag/agent.hpp"
#include "idrag/gateway.hpp"
#include "idrag/time.hpp"

namespace idrag {

struct AgentConfig {
    std::string name;
    Condition condition = Condition::Baseline;
    std::string chronicle_path; // empty for plain Baseline citizens
    std::string goal;
    std::string seed_memories_path;
    // "triplets" (default) renders the graph; "prose" uses the plain-text
    // chronicle fixture for the FullRetrieval identity section.
    std::string identity_text = "triplets";
    std::string prose_path;
};

struct ScenarioEvent {
    SimTime time = 0;
    std::string description;
};

struct Scenario {
    std::string name;
    std::string shared_context;
    SimTime clock_start = 0;
    int step_hours = 1;
    int steps = 7;
    int poll_open_hour = 11;
    int poll_close_hour = 15;
    std::vector<ScenarioEvent> events;
    std::vector<AgentConfig> agents;
    RetrievalConfig retrieval;
    int max_turns = 8;
};

Scenario load_scenario(const std::string& path);

struct EventRecord {
    SimTime time = 0;
    std::string text;
    bool grounded_vote = false;
};

struct GameMasterState {
    SimTime clock = 0;
    std::vector<EventRecord> event_log;
    std::map<std::string, int> vote_tally;
    std::map<std::string, int> conversation_depth;
};

struct Effect {
    enum class Kind { None, Vote, Talk } kind = Kind::None;
    std::string arg;
};

struct ResolvedAction {
    std::string narration;
    Effect effect;
    bool vote_counted = false;
};

// GM interpretation of one action attempt: narrates the outcome and applies
// grounded effects (votes count only while polls are open). An unparseable
// effect line changes no state; the narration is still logged.
ResolvedAction resolve_action(GameMasterState& gm, const Scenario& scenario,
                              const ActionAttempt& attempt, Gateway& gateway);

struct Utterance {
    int turn = 0; // 1-based conversation round
    std::string speaker;
    std::string text;
};

struct ConversationTranscript {
    std::vector<Utterance> utterances;
    std::string reason; // farewell | repetition | max_turns | empty
};

// Alternating exchange between two agents, one round per turn. Ends on a
// farewell, on a near-verbatim repeat by the same speaker (similarity >=
// 0.95 against their last two utterances), or at max_turns. The transcript
// is appended to both memories.
ConversationTranscript run_conversation(GameMasterState& gm, AgentState& initiator,
                                        AgentState& respondent, Gateway& gateway,
                                        int max_turns, SimTime now,
                                        double repetition_threshold = 0.95);

enum class MemorySeedMode { Fixture, Generate };

// Fixture mode loads the fixed per-agent memory file; generate mode has the
// model synthesize timestamped narratives from the chronicle text and shared
// context, persisting them as a new fixture.
MemoryStream seed_formative_memories(const AgentConfig& agent, const Scenario& scenario,
                                     Gateway& gateway, MemorySeedMode mode);

struct TimestepRecord {
    int index = 0;
    SimTime time = 0;
    std::map<std::string, std::string> observations;
    std::vector<ActionAttempt> actions;
    std::vector<std::string> narrations;
    std::vector<ConversationTranscript> conversations;
};

struct EpisodeRecord {
    std::string scenario;
    std::string run_id;
    std::map<std::string, std::string> conditions; // agent -> condition
    std::map<std::string, std::string> chronicle_paths;
    bool converged = false;
    std::string diagnostic;
    std::vector<TimestepRecord> timesteps;
    std::map<std::string, int> vote_tally;
    double wall_clock_seconds = 0.0; // written to the timing file, never the transcript
};

struct EpisodeOptions {
    AgentStepConfig step;
    MemorySeedMode seed_mode = MemorySeedMode::Fixture;
    int max_turns = 8;
};

EpisodeRecord run_episode(const Scenario& scenario, Gateway& gateway,
                          std::int64_t run_seed, const EpisodeOptions& opts = {});

// Transcript serialization; wall_clock_seconds is deliberately excluded so
// byte-level determinism checks stay viable.
std::string episode_to_json(const EpisodeRecord& record);
void save_episode(const EpisodeRecord& record, const std::string& path);

} // namespace idrag
