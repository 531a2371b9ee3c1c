#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "grounder/config.hpp"
#include "grounder/dataset.hpp"
#include "grounder/report.hpp"
#include "grounder/scripted_gateway.hpp"

namespace grounder {

// Supplies the gateway an episode talks to. Live runs share one gateway;
// scripted runs hand each episode a fresh ScriptedGateway so per-endpoint
// call indices stay episode-local under record parallelism.
class GatewayProvider {
public:
    virtual ~GatewayProvider() = default;
    virtual std::shared_ptr<Gateway> for_episode(const std::string& episode_id) = 0;
};

class SharedGatewayProvider : public GatewayProvider {
public:
    explicit SharedGatewayProvider(std::shared_ptr<Gateway> gw) : gw_(std::move(gw)) {}
    std::shared_ptr<Gateway> for_episode(const std::string&) override { return gw_; }

private:
    std::shared_ptr<Gateway> gw_;
};

class ScriptLibraryProvider : public GatewayProvider {
public:
    explicit ScriptLibraryProvider(ScriptLibrary lib) : lib_(std::move(lib)) {}
    std::shared_ptr<Gateway> for_episode(const std::string& episode_id) override;

    // Aggregate call counts across every gateway handed out; used to audit
    // mode contracts.
    std::size_t calls(const std::string& endpoint_id) const;

private:
    ScriptLibrary lib_;
    mutable std::mutex mu_;
    std::vector<std::shared_ptr<ScriptedGateway>> issued_;
};

/// Runs one episode per record with bounded parallelism and scores the
/// outcomes. Failed episodes count as misses and never abort the run; the
/// report's strata are computed exactly from integer counts. Deterministic
/// (bit-for-bit results and report) for a fixed script library.
std::pair<std::vector<EvalResult>, Report> evaluate(const std::vector<DatasetRecord>& records,
                                                    const Mode& mode, const RunConfig& cfg,
                                                    GatewayProvider& provider,
                                                    std::shared_ptr<TraceWriter> trace,
                                                    std::ostream* progress = nullptr);

}  // namespace grounder
