#pragma once

#include <ostream>
#include <string>

namespace grounder {

struct RunArgs {
    std::string config_path;
    std::string instruction;
    std::string image;
    int width = 0;
    int height = 0;
    std::string mode;       // empty = config mode
    std::string script;     // scripted episode when set
    std::string trace_out;  // empty = config trace_path
};

struct BenchArgs {
    std::string config_path;
    std::string dataset;
    std::string source = "custom";
    std::string mode;  // empty = config mode
    std::string out_dir = "out";
    std::string script;  // simulate only
};

struct AblateArgs {
    std::string config_path;
    std::string dataset;
    std::string source = "custom";
    std::string out_dir = "out";
    std::string script;
};

struct ReportArgs {
    std::string results_path;
    std::string out_dir = "out";
};

// Each command returns a process exit status and reports failures as a
// one-line diagnostic on err.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

}  // namespace grounder
