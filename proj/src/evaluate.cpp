#include "grounder/evaluate.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "grounder/errors.hpp"

namespace grounder {

std::shared_ptr<Gateway> ScriptLibraryProvider::for_episode(const std::string& episode_id) {
    auto gw = std::make_shared<ScriptedGateway>(lib_.script_for(episode_id));
    std::lock_guard<std::mutex> lock(mu_);
    issued_.push_back(gw);
    return gw;
}

std::size_t ScriptLibraryProvider::calls(const std::string& endpoint_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t total = 0;
    for (const auto& gw : issued_) total += gw->calls(endpoint_id);
    return total;
}

namespace {

EvalResult score_episode(const DatasetRecord& record, const Mode& mode,
                         const EpisodeResult& episode) {
    EvalResult r;
    r.record_id = record.record_id;
    r.mode = mode;
    r.platform = record.task.platform;
    r.element_type = record.task.element_type;
    r.latency_ms = episode.reply_latency_ms;
    const BBox& gt = *record.task.gt_box;

    for (const auto& obs : episode.round0) {
        if (!obs.errored() && obs.candidate) {
            r.specialist_hits[obs.specialist_id] = hit_test(*obs.candidate, gt);
        }
    }
    if (episode.ok()) {
        r.predicted = episode.outcome->final_action.point;
        r.hit = hit_test(*r.predicted, gt);
        r.rounds_used = episode.outcome->rounds_used;
    } else {
        r.failure = episode.failure;
    }
    return r;
}

}  // namespace

std::pair<std::vector<EvalResult>, Report> evaluate(const std::vector<DatasetRecord>& records,
                                                    const Mode& mode, const RunConfig& cfg,
                                                    GatewayProvider& provider,
                                                    std::shared_ptr<TraceWriter> trace,
                                                    std::ostream* progress) {
    if (records.empty()) throw ConfigError("evaluate requires at least one record");
    const Mode resolved = cfg.resolve_mode(mode);
    const OrchestratorConfig ocfg = cfg.orchestrator_config();
    const TemplateSet templates = TemplateSet::load(cfg.template_dir);

    std::vector<EvalResult> results(records.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mu;

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            const DatasetRecord& record = records[i];
            auto gw = provider.for_episode(record.record_id);
            EpisodeRunner runner(ocfg, templates, *gw, trace);
            EpisodeResult episode;
            try {
                episode = runner.try_run(record.task, resolved, record.record_id);
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                // Per-record failures (script holes included) score as
                // misses rather than aborting the run.
                episode.failure = "episode_failed";
                episode.failure_detail = e.what();
            }
            results[i] = score_episode(record, resolved, episode);
            if (progress != nullptr) {
                std::lock_guard<std::mutex> lock(progress_mu);
                *progress << record.record_id << " "
                          << (results[i].hit ? "hit" : "miss")
                          << " rounds=" << results[i].rounds_used;
                if (!results[i].failure.empty()) *progress << " (" << results[i].failure << ")";
                *progress << "\n";
            }
        }
    };

    std::size_t n_workers =
        std::min<std::size_t>(records.size(), static_cast<std::size_t>(cfg.parallelism));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        std::exception_ptr fatal;
        std::mutex fatal_mu;
        for (std::size_t i = 0; i < n_workers; ++i) {
            threads.emplace_back([&]() {
                try {
                    worker();
                } catch (...) {
                    std::lock_guard<std::mutex> lock(fatal_mu);
                    if (!fatal) fatal = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        if (fatal) std::rethrow_exception(fatal);
    }

    Report report = build_report(results, resolved.label());
    return {std::move(results), std::move(report)};
}

}  // namespace grounder
