#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idrag/cli.hpp"
#include "idrag/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Identity-grounded agent simulation harness"};
    app.require_subcommand(1);

    idrag::RunPlan plan;
    std::vector<std::string> condition_names;
    auto* run = app.add_subcommand("run", "Run episodes and evaluate them");
    run->add_option("--scenario", plan.scenario_path, "Scenario config file")->required();
    run->add_option("--condition", condition_names,
                    "Condition for Alice/Bob: baseline, full_retrieval, id_rag (repeatable)");
    run->add_option("--runs", plan.runs_per_condition, "Runs per condition");
    run->add_option("--seed", plan.seed, "Base run seed");
    run->add_option("--mock-script", plan.mock_script_path, "Mock backend script file");
    run->add_flag("--live", plan.live, "Use the live endpoint from the environment");
    run->add_option("--out-dir", plan.out_dir, "Artifact directory");
    run->add_option("--model-name", plan.model_name, "Model label for the metrics table");
    run->add_option("--retrieval-k", plan.retrieval_k, "Triplet budget");
    run->add_option("--expansion-r", plan.expansion_r, "Neighborhood expansion radius");
    run->add_option("--max-turns", plan.max_turns, "Conversation turn cap");
    run->add_flag("--generate-memories", plan.generate_memories,
                  "Synthesize formative memories instead of loading the fixture");

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "Report on a chronicle file");
    inspect->add_option("path", inspect_path, "Chronicle file")->required();

    std::string metrics_path;
    std::string plot_out = "plots";
    std::string timing_path;
    auto* plotdata = app.add_subcommand("plotdata", "Emit plot-ready series files");
    plotdata->add_option("metrics", metrics_path, "Metrics table")->required();
    plotdata->add_option("--out-dir", plot_out, "Output directory");
    plotdata->add_option("--timing", timing_path, "Timing file for convergence data");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (condition_names.empty()) condition_names = {"baseline", "full_retrieval", "id_rag"};
        try {
            for (const auto& name : condition_names) {
                plan.conditions.push_back(idrag::condition_from_string(name));
            }
        } catch (const idrag::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        if (plan.live && !plan.mock_script_path.empty()) {
            std::cerr << "error: choose either --live or --mock-script, not both\n";
            return 2;
        }
        return idrag::cmd_run(plan, std::cout, std::cerr);
    }
    if (inspect->parsed()) {
        return idrag::cmd_inspect(inspect_path, std::cout, std::cerr);
    }
    return idrag::cmd_plotdata(metrics_path, plot_out, timing_path, std::cout, std::cerr);
}
