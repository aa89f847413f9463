#include "idrag/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "idrag/errors.hpp"
#include "idrag/evaluation.hpp"
#include "idrag/prompts.hpp"
#include "idrag/simulation.hpp"

namespace idrag {

namespace fs = std::filesystem;
using nlohmann::json;

static std::string resolve_fixture_path(const std::string& path) {
    if (path.empty() || fs::exists(path)) return path;
    std::string candidate = fixture_dir() + "/" + path;
    if (fs::exists(candidate)) return candidate;
    return path;
}

static std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(buf.str());
    return hex.str();
}

static json reports_to_json(const std::vector<RecallReport>& recalls,
                            const std::vector<AlignmentRecord>& alignments) {
    json j;
    j["recall"] = json::array();
    for (const auto& r : recalls) {
        j["recall"].push_back({{"agent", r.agent},
                               {"timestep", r.timestep},
                               {"similarities", r.similarities},
                               {"score", r.score},
                               {"partial", r.partial}});
    }
    j["alignment"] = json::array();
    for (const auto& a : alignments) {
        j["alignment"].push_back({{"agent", a.agent},
                                  {"timestep", a.timestep},
                                  {"action", a.action},
                                  {"rationale", a.rationale},
                                  {"score", a.score}});
    }
    return j;
}

int cmd_run(const RunPlan& plan, std::ostream& out, std::ostream& err) {
    try {
        if (plan.conditions.empty()) throw ValidationError("plan has no conditions");

        Scenario base = load_scenario(resolve_fixture_path(plan.scenario_path));
        base.retrieval.triplet_budget = plan.retrieval_k;
        base.retrieval.expansion_radius = plan.expansion_r;
        base.max_turns = plan.max_turns;

        fs::create_directories(plan.out_dir);

        std::vector<RunMetrics> all_metrics;
        std::vector<std::pair<std::string, double>> timings;
        std::vector<std::string> artifacts;
        bool all_converged = true;
        std::int64_t seed = plan.seed;

        for (Condition condition : plan.conditions) {
            for (int run = 0; run < plan.runs_per_condition; ++run, ++seed) {
                Scenario scenario = base;
                for (auto& agent : scenario.agents) {
                    if (!agent.chronicle_path.empty()) agent.condition = condition;
                }

                std::unique_ptr<Gateway> gateway;
                if (plan.live) {
                    gateway = std::make_unique<HttpGateway>(HttpGatewayConfig::from_env());
                } else {
                    auto mock = std::make_unique<MockGateway>();
                    if (!plan.mock_script_path.empty()) mock->load_script(plan.mock_script_path);
                    gateway = std::move(mock);
                }

                EpisodeOptions opts;
                opts.max_turns = scenario.max_turns;
                opts.seed_mode = plan.generate_memories ? MemorySeedMode::Generate
                                                        : MemorySeedMode::Fixture;
                EpisodeRecord record = run_episode(scenario, *gateway, seed, opts);

                std::string run_id =
                    to_string(condition) + "-run" + std::to_string(run);
                record.run_id = run_id;
                std::string episode_path = plan.out_dir + "/" + run_id + ".episode.json";
                save_episode(record, episode_path);
                artifacts.push_back(episode_path);

                if (!record.converged) {
                    all_converged = false;
                    err << "run " << run_id << " did not converge: " << record.diagnostic
                        << "\n";
                }

                // Recall and alignment for the condition-varying agents.
                std::vector<RecallReport> recalls;
                std::vector<AlignmentRecord> alignments;
                RunMetrics metrics;
                metrics.run_id = run_id;
                metrics.condition = to_string(condition);
                metrics.model_name = plan.model_name;
                metrics.wall_clock_seconds = record.wall_clock_seconds;

                for (const auto& agent_cfg : scenario.agents) {
                    if (agent_cfg.chronicle_path.empty()) continue;
                    Chronicle chronicle =
                        load_chronicle(resolve_fixture_path(agent_cfg.chronicle_path));
                    std::string chronicle_text = render_chronicle_text(chronicle);
                    Quiz quiz = load_quiz(resolve_fixture_path("quiz.json"), agent_cfg.name);
                    for (const auto& ts : record.timesteps) {
                        auto it = std::find_if(ts.actions.begin(), ts.actions.end(),
                                               [&](const ActionAttempt& a) {
                                                   return a.actor == agent_cfg.name;
                                               });
                        if (it == ts.actions.end()) continue;
                        RecallSubject subject;
                        subject.name = agent_cfg.name;
                        subject.identity_section =
                            it->wm_snapshot.identity_characteristics;
                        subject.condition = condition;
                        subject.chronicle = &chronicle;
                        subject.retrieval = scenario.retrieval;
                        RecallReport recall =
                            identity_recall_score(subject, quiz, *gateway, ts.index);
                        AlignmentRecord alignment =
                            action_alignment_score(chronicle_text, *it, *gateway);
                        metrics.rows.push_back({agent_cfg.name, ts.index, recall.score,
                                                static_cast<double>(alignment.score)});
                        recalls.push_back(std::move(recall));
                        alignments.push_back(std::move(alignment));
                    }
                }

                std::string reports_path = plan.out_dir + "/" + run_id + ".reports.json";
                std::ofstream reports(reports_path);
                reports << reports_to_json(recalls, alignments).dump(2) << "\n";
                reports.close();
                artifacts.push_back(reports_path);

                timings.emplace_back(run_id, record.wall_clock_seconds);
                all_metrics.push_back(std::move(metrics));
                out << run_id << ": " << (record.converged ? "converged" : "ABORTED")
                    << "\n";
            }
        }

        std::string metrics_path = plan.out_dir + "/metrics.tsv";
        export_metrics(all_metrics, metrics_path, /*include_wall_clock=*/false);
        artifacts.push_back(metrics_path);

        std::string timing_path = plan.out_dir + "/timing.tsv";
        {
            std::ofstream timing(timing_path);
            timing << "run_id\twall_clock_seconds\n" << std::setprecision(6);
            for (const auto& [id, secs] : timings) timing << id << "\t" << secs << "\n";
        }
        artifacts.push_back(timing_path);

        json manifest;
        for (const auto& path : artifacts) {
            manifest[fs::path(path).filename().string()] = file_hash(path);
        }
        std::ofstream mf(plan.out_dir + "/manifest.json");
        mf << manifest.dump(2) << "\n";

        return all_converged ? 0 : 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_inspect(const std::string& chronicle_path, std::ostream& out, std::ostream& err) {
    try {
        Chronicle c = load_chronicle(resolve_fixture_path(chronicle_path));
        out << "owner: " << c.owner << "\n";
        out << "nodes: " << c.nodes.size() << ", edges: " << c.edges.size() << "\n";
        std::map<std::string, int> relations;
        for (const auto& e : c.edges) relations[e.relation]++;
        out << "relations:\n";
        for (const auto& [rel, n] : relations) out << "  " << rel << ": " << n << "\n";
        out << "triplets:\n";
        for (const auto& t : as_triplets(c)) out << "  " << render_triplet(t) << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

namespace {

struct Stats {
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    int n = 0;

    void add(double v) {
        sum += v;
        min = std::min(min, v);
        max = std::max(max, v);
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
};

} // namespace

int cmd_plotdata(const std::string& metrics_path, const std::string& out_dir,
                 const std::string& timing_path, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(metrics_path);
        if (!in) throw IoError("cannot open metrics table: " + metrics_path);
        std::string header;
        if (!std::getline(in, header)) throw SchemaError(metrics_path + ": empty table");
        std::vector<std::string> columns;
        {
            std::istringstream hs(header);
            std::string col;
            while (std::getline(hs, col, '\t')) columns.push_back(col);
        }
        auto col_index = [&](const std::string& name) {
            auto it = std::find(columns.begin(), columns.end(), name);
            if (it == columns.end()) {
                throw SchemaError(metrics_path + ": missing column '" + name + "'");
            }
            return static_cast<std::size_t>(it - columns.begin());
        };
        std::size_t ci_run = col_index("run_id");
        std::size_t ci_cond = col_index("condition");
        std::size_t ci_agent = col_index("agent");
        std::size_t ci_step = col_index("timestep");
        std::size_t ci_recall = col_index("recall_score");
        std::size_t ci_align = col_index("alignment_mean");
        std::size_t ci_wall = col_index("wall_clock_seconds");

        std::map<std::string, double> run_timing;
        if (!timing_path.empty()) {
            std::ifstream tin(timing_path);
            if (!tin) throw IoError("cannot open timing file: " + timing_path);
            std::string line;
            std::getline(tin, line); // header
            while (std::getline(tin, line)) {
                std::istringstream ls(line);
                std::string id, secs;
                if (std::getline(ls, id, '\t') && std::getline(ls, secs, '\t')) {
                    run_timing[id] = std::stod(secs);
                }
            }
        }

        std::map<std::pair<std::string, std::string>, std::map<int, Stats>> recall;
        std::map<std::pair<std::string, std::string>, std::map<int, Stats>> alignment;
        std::map<std::string, Stats> convergence;

        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::istringstream ls(line);
            std::string f;
            while (std::getline(ls, f, '\t')) fields.push_back(f);
            fields.resize(columns.size());
            const std::string& agent = fields[ci_agent];
            const std::string& cond = fields[ci_cond];
            if (agent == "summary") {
                double secs = 0.0;
                if (!fields[ci_wall].empty()) {
                    secs = std::stod(fields[ci_wall]);
                } else if (run_timing.count(fields[ci_run])) {
                    secs = run_timing[fields[ci_run]];
                }
                convergence[cond].add(secs);
                continue;
            }
            int step = std::stoi(fields[ci_step]);
            recall[{cond, agent}][step].add(std::stod(fields[ci_recall]));
            alignment[{cond, agent}][step].add(std::stod(fields[ci_align]));
        }

        fs::create_directories(out_dir);
        auto write_series = [&](const std::string& name, const auto& data) {
            std::string path = out_dir + "/" + name;
            std::ofstream f(path);
            if (!f) throw IoError("cannot write " + path);
            f << "condition\tagent\ttimestep\tmean\tmin\tmax\n" << std::setprecision(9);
            for (const auto& [key, steps] : data) {
                for (const auto& [step, stats] : steps) {
                    f << key.first << "\t" << key.second << "\t" << step << "\t"
                      << stats.mean() << "\t" << stats.min << "\t" << stats.max << "\n";
                }
            }
            out << "wrote " << path << "\n";
        };
        write_series("recall_vs_timestep.tsv", recall);
        write_series("alignment_vs_timestep.tsv", alignment);

        std::string conv_path = out_dir + "/convergence.tsv";
        std::ofstream cf(conv_path);
        if (!cf) throw IoError("cannot write " + conv_path);
        cf << "condition\tmean_seconds\tmin_seconds\tmax_seconds\n" << std::setprecision(9);
        for (const auto& [cond, stats] : convergence) {
            cf << cond << "\t" << stats.mean() << "\t" << stats.min << "\t" << stats.max
               << "\n";
        }
        out << "wrote " << conv_path << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace idrag
