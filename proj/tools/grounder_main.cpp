#include <iostream>

#include <CLI11.hpp>

#include "grounder/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"grounder: multi-model GUI grounding agent and benchmark harness"};
    app.require_subcommand(1);

    grounder::RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run a single grounding episode");
    run->add_option("--config", run_args.config_path, "Config JSON")->required();
    run->add_option("--instruction", run_args.instruction, "Task instruction")->required();
    run->add_option("--image", run_args.image, "Screenshot path");
    run->add_option("--width", run_args.width, "Screenshot width (pixels)");
    run->add_option("--height", run_args.height, "Screenshot height (pixels)");
    run->add_option("--mode", run_args.mode, "single[:<id>] | joint | full");
    run->add_option("--script", run_args.script, "Scripted gateway JSON (offline run)");
    run->add_option("--trace", run_args.trace_out, "Trace output path");

    grounder::BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Evaluate a dataset against live endpoints");
    bench->add_option("--config", bench_args.config_path, "Config JSON")->required();
    bench->add_option("--dataset", bench_args.dataset, "Dataset JSONL")->required();
    bench->add_option("--source", bench_args.source, "screenspot | uii2e | custom");
    bench->add_option("--mode", bench_args.mode, "single[:<id>] | joint | full");
    bench->add_option("--out", bench_args.out_dir, "Output directory");

    grounder::BenchArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Evaluate a dataset against a script file");
    simulate->add_option("--config", sim_args.config_path, "Config JSON")->required();
    simulate->add_option("--dataset", sim_args.dataset, "Dataset JSONL")->required();
    simulate->add_option("--script", sim_args.script, "Scripted gateway JSON")->required();
    simulate->add_option("--source", sim_args.source, "screenspot | uii2e | custom");
    simulate->add_option("--mode", sim_args.mode, "single[:<id>] | joint | full");
    simulate->add_option("--out", sim_args.out_dir, "Output directory");

    grounder::AblateArgs ablate_args;
    auto* ablate = app.add_subcommand("ablate", "Compare single, joint, and full modes");
    ablate->add_option("--config", ablate_args.config_path, "Config JSON")->required();
    ablate->add_option("--dataset", ablate_args.dataset, "Dataset JSONL")->required();
    ablate->add_option("--source", ablate_args.source, "screenspot | uii2e | custom");
    ablate->add_option("--script", ablate_args.script, "Scripted gateway JSON (offline)");
    ablate->add_option("--out", ablate_args.out_dir, "Output directory");

    grounder::ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Re-emit reports from results.jsonl");
    report->add_option("--results", report_args.results_path, "results.jsonl path")->required();
    report->add_option("--out", report_args.out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return grounder::cmd_run(run_args, std::cout, std::cerr);
    if (bench->parsed()) return grounder::cmd_bench(bench_args, std::cout, std::cerr);
    if (simulate->parsed()) return grounder::cmd_simulate(sim_args, std::cout, std::cerr);
    if (ablate->parsed()) return grounder::cmd_ablate(ablate_args, std::cout, std::cerr);
    if (report->parsed()) return grounder::cmd_report(report_args, std::cout, std::cerr);
    return 1;
}
