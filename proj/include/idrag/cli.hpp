#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "idrag/agent.hpp"

namespace idrag {

struct RunPlan {
    std::string scenario_path;
    std::vector<Condition> conditions;
    int runs_per_condition = 4;
    std::int64_t seed = 0;
    std::string mock_script_path; // mock backend unless empty and live is set
    bool live = false;
    std::string out_dir = "out";
    std::string model_name = "mock";
    int retrieval_k = 8;
    int expansion_r = 0;
    int max_turns = 8;
    bool generate_memories = false;
};

// Executes the plan, writes episode transcripts, per-run reports, the
// metrics table, the timing file, and a manifest. Exit 0 iff every episode
// converged.
int cmd_run(const RunPlan& plan, std::ostream& out, std::ostream& err);

int cmd_inspect(const std::string& chronicle_path, std::ostream& out, std::ostream& err);

int cmd_plotdata(const std::string& metrics_path, const std::string& out_dir,
                 const std::string& timing_path, std::ostream& out, std::ostream& err);

} // namespace idrag
