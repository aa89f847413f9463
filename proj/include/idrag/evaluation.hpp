#pragma once

#include <string>
#include <vector>

#include "idrag/agent.hpp"
#include "idrag/chronicle.hpp"
#include "idrag/gateway.hpp"
#include "idrag/retrieval.hpp"

namespace idrag {

struct QuizItem {
    std::string question;
    std::string ground_truth;
};

using Quiz = std::vector<QuizItem>;

// Quiz fixture: 20 shared questions plus per-agent ground truths.
Quiz load_quiz(const std::string& path, const std::string& agent_name);

struct RecallReport {
    std::string agent;
    int timestep = 0;
    std::vector<double> similarities; // one per question
    double score = 0.0;               // arithmetic mean
    bool partial = false;
};

// What the quiz sees: the agent's current identity section; IdRag agents
// additionally query their graph per question and the retrieval text is
// concatenated after the section.
struct RecallSubject {
    std::string name;
    std::string identity_section;
    Condition condition = Condition::Baseline;
    const Chronicle* chronicle = nullptr;
    RetrievalConfig retrieval;
};

RecallReport identity_recall_score(const RecallSubject& subject, const Quiz& quiz,
                                   Gateway& gateway, int timestep);

struct AlignmentRecord {
    std::string agent;
    int timestep = 0;
    std::string action;
    std::string rationale;
    int score = 0; // 1..10
};

// Two-prompt judge: rationale first, then the 1-10 score; an unparseable
// score is re-asked once at temperature 0 before JudgeParseError.
AlignmentRecord action_alignment_score(const std::string& chronicle_text,
                                       const ActionAttempt& action, Gateway& gateway);

struct MetricRow {
    std::string agent;
    int timestep = 0;
    double recall_score = 0.0;
    double alignment_mean = 0.0;
};

struct RunMetrics {
    std::string run_id;
    std::string condition;
    std::string model_name;
    double wall_clock_seconds = 0.0;
    std::vector<MetricRow> rows;
};

// Tab-separated table: one detail row per (agent, timestep) plus one summary
// row per run. Wall-clock values can be withheld so the table stays
// byte-comparable across runs.
void export_metrics(const std::vector<RunMetrics>& records, const std::string& path,
                    bool include_wall_clock = true);

} // namespace idrag
