#include "idrag/evaluation.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "idrag/errors.hpp"
#include "idrag/memory.hpp"
#include "idrag/prompts.hpp"

namespace idrag {

using nlohmann::json;

Quiz load_quiz(const std::string& path, const std::string& agent_name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open quiz fixture: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    Quiz quiz;
    try {
        const auto& questions = j.at("questions");
        const auto& truths = j.at("ground_truths").at(agent_name);
        if (questions.size() != truths.size()) {
            throw SchemaError(path + ": question/ground-truth count mismatch for " + agent_name);
        }
        for (std::size_t i = 0; i < questions.size(); ++i) {
            quiz.push_back({questions[i].get<std::string>(), truths[i].get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (quiz.size() != 20) {
        throw SchemaError(path + ": quiz for " + agent_name + " has " +
                          std::to_string(quiz.size()) + " items, expected 20");
    }
    return quiz;
}

RecallReport identity_recall_score(const RecallSubject& subject, const Quiz& quiz,
                                   Gateway& gateway, int timestep) {
    RecallReport report;
    report.agent = subject.name;
    report.timestep = timestep;

    std::string quiz_template = load_prompt("recall_quiz.txt");
    for (const auto& item : quiz) {
        try {
            std::string identity_state = subject.identity_section;
            if (subject.condition == Condition::IdRag && subject.chronicle) {
                WorkingMemory probe;
                probe.observation = item.question;
                auto retrieved = retrieve_identity(*subject.chronicle, subject.name, probe,
                                                   subject.retrieval, gateway);
                if (!retrieved.formatted_text.empty()) {
                    if (!identity_state.empty()) identity_state += "\n";
                    identity_state += retrieved.formatted_text;
                }
            }
            std::string prompt = fill_template(quiz_template,
                                               {{"self_agent_name", subject.name},
                                                {"current_identity_state_str", identity_state},
                                                {"question", item.question}});
            std::string answer = gateway.complete(ChatRequest::user(Purpose::Quiz, prompt));
            double sim = cosine_similarity(gateway.embed(answer), gateway.embed(item.ground_truth));
            report.similarities.push_back(sim);
        } catch (const GatewayError&) {
            report.partial = true;
        }
    }
    double sum = 0.0;
    for (double s : report.similarities) sum += s;
    report.score = report.similarities.empty() ? 0.0 : sum / report.similarities.size();
    return report;
}

// First run of digits not adjacent to a letter; -1 when none qualifies.
static int first_standalone_integer(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        bool left_letter = i > 0 && std::isalpha(static_cast<unsigned char>(text[i - 1]));
        bool right_letter = j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]));
        if (!left_letter && !right_letter) {
            try {
                return std::stoi(text.substr(i, j - i));
            } catch (...) {
                return -1;
            }
        }
        i = j;
    }
    return -1;
}

AlignmentRecord action_alignment_score(const std::string& chronicle_text,
                                       const ActionAttempt& action, Gateway& gateway) {
    std::string rationale_prompt = fill_template(load_prompt("judge_rationale.txt"),
                                                 {{"agent_name", action.actor},
                                                  {"player_chronicle", chronicle_text},
                                                  {"action_attempt", action.text}});
    std::string rationale =
        gateway.complete(ChatRequest::user(Purpose::JudgeRationale, rationale_prompt));

    std::string score_prompt = fill_template(load_prompt("judge_score.txt"),
                                             {{"agent_name", action.actor},
                                              {"player_chronicle", chronicle_text},
                                              {"action_attempt", action.text},
                                              {"rationale", rationale}});
    auto ask = [&](double temperature) {
        ChatRequest req = ChatRequest::user(Purpose::JudgeScore, score_prompt);
        req.params.temperature = temperature;
        return gateway.complete(req);
    };
    int score = first_standalone_integer(ask(0.0));
    if (score < 1 || score > 10) {
        score = first_standalone_integer(ask(0.0));
        if (score < 1 || score > 10) {
            throw JudgeParseError("judge reply carries no integer in [1,10] for action by " +
                                  action.actor);
        }
    }
    return {action.actor, action.timestep, action.text, rationale, score};
}

void export_metrics(const std::vector<RunMetrics>& records, const std::string& path,
                    bool include_wall_clock) {
    if (records.empty()) throw ValidationError("export_metrics: no records");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write metrics table: " + path);
    out << "run_id\tcondition\tmodel_name\tagent\ttimestep\trecall_score\talignment_mean"
        << "\twall_clock_seconds\n";
    out << std::setprecision(9);
    for (const auto& run : records) {
        double recall_sum = 0.0;
        double align_sum = 0.0;
        for (const auto& row : run.rows) {
            out << run.run_id << "\t" << run.condition << "\t" << run.model_name << "\t"
                << row.agent << "\t" << row.timestep << "\t" << row.recall_score << "\t"
                << row.alignment_mean << "\t\n";
            recall_sum += row.recall_score;
            align_sum += row.alignment_mean;
        }
        std::size_t n = run.rows.empty() ? 1 : run.rows.size();
        out << run.run_id << "\t" << run.condition << "\t" << run.model_name
            << "\tsummary\t-1\t" << (recall_sum / n) << "\t" << (align_sum / n) << "\t";
        if (include_wall_clock) out << run.wall_clock_seconds;
        out << "\n";
    }
}

} // namespace idrag
