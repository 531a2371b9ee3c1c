#include "grounder/cli.hpp"

#include <atomic>
#include <filesystem>

#include "grounder/errors.hpp"
#include "grounder/evaluate.hpp"
#include "grounder/http_gateway.hpp"
#include "grounder/util.hpp"

namespace grounder {

namespace fs = std::filesystem;

namespace {

// Scripted runs use a logical clock so trace contents do not depend on
// wall time.
TraceWriter::Clock logical_clock() {
    auto counter = std::make_shared<std::atomic<std::int64_t>>(0);
    return [counter]() { return counter->fetch_add(1); };
}

std::unique_ptr<GatewayProvider> make_provider(const std::string& script_path) {
    if (script_path.empty()) {
        return std::make_unique<SharedGatewayProvider>(std::make_shared<HttpGateway>());
    }
    return std::make_unique<ScriptLibraryProvider>(ScriptLibrary::from_file(script_path));
}

std::shared_ptr<TraceWriter> make_trace(const std::string& path, bool scripted) {
    return TraceWriter::to_file(path, scripted ? logical_clock() : TraceWriter::Clock{});
}

int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err, bool scripted) {
    try {
        RunConfig cfg = load_config(args.config_path);
        Mode mode = args.mode.empty() ? cfg.mode : Mode::parse(args.mode);
        auto records = load_dataset(args.dataset, dataset_source_from_string(args.source));

        fs::create_directories(args.out_dir);
        auto trace = make_trace((fs::path(args.out_dir) / "trace.jsonl").string(), scripted);
        auto provider = make_provider(scripted ? args.script : "");

        auto [results, report] = evaluate(records, mode, cfg, *provider, trace, &out);

        write_results_jsonl((fs::path(args.out_dir) / "results.jsonl").string(), results);
        write_file((fs::path(args.out_dir) / "report.md").string(),
                   emit_report(report, ReportFormat::Markdown));
        write_file((fs::path(args.out_dir) / "report.csv").string(),
                   emit_report(report, ReportFormat::Csv));
        out << "overall " << format_rate(report.overall) << "% (" << report.overall.hits << "/"
            << report.overall.total << ") -> " << args.out_dir << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(args.config_path);
        Mode mode = cfg.resolve_mode(args.mode.empty() ? cfg.mode : Mode::parse(args.mode));

        TaskSpec task;
        task.instruction = args.instruction;
        task.screenshot.image_ref = args.image;
        task.screenshot.format = image_format_from_path(args.image);
        if (args.width > 0 && args.height > 0) {
            task.screenshot.width = args.width;
            task.screenshot.height = args.height;
        } else if (auto dims = read_image_dims(args.image)) {
            task.screenshot.width = dims->first;
            task.screenshot.height = dims->second;
        } else {
            err << "error: screenshot dimensions unknown; pass --width/--height or a readable "
                   "image\n";
            return 1;
        }
        task.validate();

        const bool scripted = !args.script.empty();
        std::string trace_path = args.trace_out.empty() ? cfg.trace_path : args.trace_out;
        auto trace = make_trace(trace_path, scripted);
        auto provider = make_provider(args.script);
        auto gw = provider->for_episode("run");

        EpisodeRunner runner(cfg.orchestrator_config(), TemplateSet::load(cfg.template_dir), *gw,
                             trace);
        EpisodeOutcome outcome = runner.run(task, mode, "run");
        out << "CLICK" << format_point(outcome.final_action.point)
            << " rounds=" << outcome.rounds_used << "\n";
        out << "trace: " << trace_path << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    return run_bench(args, out, err, false);
}

int cmd_simulate(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    if (args.script.empty()) {
        err << "error: simulate requires --script\n";
        return 1;
    }
    return run_bench(args, out, err, true);
}

int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(args.config_path);
        auto records = load_dataset(args.dataset, dataset_source_from_string(args.source));
        fs::create_directories(args.out_dir);
        const bool scripted = !args.script.empty();

        std::vector<Mode> modes = {cfg.resolve_mode(Mode::single("")), Mode::joint(),
                                   Mode::full()};
        std::vector<Report> reports;
        for (const Mode& mode : modes) {
            auto trace = make_trace(
                (fs::path(args.out_dir) / ("trace_" + mode.label() + ".jsonl")).string(),
                scripted);
            auto provider = make_provider(args.script);
            auto [results, report] = evaluate(records, mode, cfg, *provider, trace, &out);
            write_results_jsonl(
                (fs::path(args.out_dir) / ("results_" + mode.label() + ".jsonl")).string(),
                results);
            out << mode.label() << " overall " << format_rate(report.overall) << "%\n";
            reports.push_back(std::move(report));
        }

        std::string table = emit_mode_comparison(reports);
        write_file((fs::path(args.out_dir) / "ablation.md").string(), table);
        out << "\n" << table;
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
    try {
        auto results = read_results_jsonl(args.results_path);
        if (results.empty()) throw EmptyDataset("no results in " + args.results_path);
        Report report = build_report(results, results.front().mode.label());
        fs::create_directories(args.out_dir);
        write_file((fs::path(args.out_dir) / "report.md").string(),
                   emit_report(report, ReportFormat::Markdown));
        write_file((fs::path(args.out_dir) / "report.csv").string(),
                   emit_report(report, ReportFormat::Csv));
        out << "overall " << format_rate(report.overall) << "% (" << report.overall.hits << "/"
            << report.overall.total << ") -> " << args.out_dir << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace grounder
