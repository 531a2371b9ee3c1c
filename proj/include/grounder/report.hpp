#pragma once

#include <map>
#include <string>
#include <vector>

#include "grounder/results.hpp"

namespace grounder {

struct StratumRate {
    int hits = 0;
    int total = 0;
    bool operator==(const StratumRate&) const = default;
};

// Decision-correct rates for episodes where exactly k specialists produced
// a correct round-0 candidate.
struct ConditionRow {
    StratumRate overall;
    std::map<Platform, StratumRate> by_platform;
    std::map<ElementType, StratumRate> by_element;
};

struct Report {
    std::string mode_label;
    StratumRate overall;
    std::map<Platform, StratumRate> by_platform;
    std::map<ElementType, StratumRate> by_element;
    std::map<int, ConditionRow> by_condition;
};

/// Success-rate strata plus the condition analysis, computed exactly from
/// integer counts. Strata partition the record set, so platform (and
/// element-type) sums always reproduce the overall counts.
Report build_report(const std::vector<EvalResult>& results, const std::string& mode_label);

/// Partitions results by k = number of specialists whose round-0 candidate
/// hit, and reports the final decision-correct rate per k, overall and per
/// platform / element type.
std::map<int, ConditionRow> condition_analysis(const std::vector<EvalResult>& results);

enum class ReportFormat { Markdown, Csv };

/// Renders the report: platform columns (Web, Desktop, Mobile), element
/// type columns (Button, Icon, Dropdown, Input, Toggle), then Overall.
/// Rates print to one decimal place, half-up; an empty stratum renders as
/// an em-dash with count 0. The CSV carries the same cells flattened.
std::string emit_report(const Report& report, ReportFormat format);

/// Comparison table across modes over one dataset.
std::string emit_mode_comparison(const std::vector<Report>& reports);

/// "78.4" style percentage with half-up rounding; "—" for an empty stratum.
std::string format_rate(const StratumRate& s);

}  // namespace grounder
