#include "grounder/report.hpp"

#include <array>

#include "grounder/errors.hpp"

namespace grounder {

namespace {

constexpr std::array<Platform, 3> kPlatformColumns = {Platform::Web, Platform::Desktop,
                                                      Platform::Mobile};
constexpr std::array<ElementType, 5> kElementColumns = {ElementType::Button, ElementType::Icon,
                                                        ElementType::Dropdown, ElementType::Input,
                                                        ElementType::Toggle};

ElementType element_stratum(const EvalResult& r) {
    return r.element_type.value_or(ElementType::Other);
}

int condition_k(const EvalResult& r) {
    int k = 0;
    for (const auto& [_, hit] : r.specialist_hits) {
        if (hit) ++k;
    }
    return k;
}

StratumRate stratum(const std::map<Platform, StratumRate>& m, Platform p) {
    auto it = m.find(p);
    return it == m.end() ? StratumRate{} : it->second;
}

StratumRate stratum(const std::map<ElementType, StratumRate>& m, ElementType e) {
    auto it = m.find(e);
    return it == m.end() ? StratumRate{} : it->second;
}

template <typename Row>
std::vector<StratumRate> row_cells(const Row& row) {
    std::vector<StratumRate> cells;
    for (Platform p : kPlatformColumns) cells.push_back(stratum(row.by_platform, p));
    for (ElementType e : kElementColumns) cells.push_back(stratum(row.by_element, e));
    cells.push_back(row.overall);
    return cells;
}

std::string md_row(const std::string& label, const std::vector<std::string>& cells) {
    std::string out = "| " + label + " |";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    return out;
}

std::string csv_row(const std::string& table, const std::string& label,
                    const std::vector<std::string>& cells) {
    std::string out = table + "," + label;
    for (const auto& c : cells) out += "," + c;
    out += "\n";
    return out;
}

std::vector<std::string> rate_cells(const std::vector<StratumRate>& cells) {
    std::vector<std::string> out;
    for (const auto& c : cells) out.push_back(format_rate(c));
    return out;
}

std::vector<std::string> count_cells(const std::vector<StratumRate>& cells) {
    std::vector<std::string> out;
    for (const auto& c : cells) out.push_back(std::to_string(c.total));
    return out;
}

const char* kHeader =
    "| | Web | Desktop | Mobile | Button | Icon | Dropdown | Input | Toggle | Overall |\n"
    "|---|---|---|---|---|---|---|---|---|---|\n";

const char* kConditionHeader =
    "| Condition | Web | Desktop | Mobile | Button | Icon | Dropdown | Input | Toggle | "
    "Overall |\n"
    "|---|---|---|---|---|---|---|---|---|---|\n";

const char* kCsvHeader = "table,row,web,desktop,mobile,button,icon,dropdown,input,toggle,overall\n";

}  // namespace

std::string format_rate(const StratumRate& s) {
    if (s.total == 0) return "—";
    // Tenths of a percent with half-up rounding, in exact integer math.
    long long a = static_cast<long long>(s.hits) * 1000;
    long long b = s.total;
    long long tenths = (2 * a + b) / (2 * b);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::map<int, ConditionRow> condition_analysis(const std::vector<EvalResult>& results) {
    std::map<int, ConditionRow> by_condition;
    for (const auto& r : results) {
        ConditionRow& row = by_condition[condition_k(r)];
        row.overall.total++;
        row.by_platform[r.platform].total++;
        row.by_element[element_stratum(r)].total++;
        if (r.hit) {
            row.overall.hits++;
            row.by_platform[r.platform].hits++;
            row.by_element[element_stratum(r)].hits++;
        }
    }
    return by_condition;
}

Report build_report(const std::vector<EvalResult>& results, const std::string& mode_label) {
    Report report;
    report.mode_label = mode_label;
    for (const auto& r : results) {
        report.overall.total++;
        report.by_platform[r.platform].total++;
        report.by_element[element_stratum(r)].total++;
        if (r.hit) {
            report.overall.hits++;
            report.by_platform[r.platform].hits++;
            report.by_element[element_stratum(r)].hits++;
        }
    }
    report.by_condition = condition_analysis(results);
    return report;
}

std::string emit_report(const Report& report, ReportFormat format) {
    auto success = row_cells(report);

    if (format == ReportFormat::Markdown) {
        std::string out = "# Grounding report\n\nMode: " + report.mode_label + "\n\n";
        out += "## Success rate (%)\n\n";
        out += kHeader;
        out += md_row("rate", rate_cells(success));
        out += md_row("n", count_cells(success));
        out += "\n## Decision correct rate by correct-specialist count (%)\n\n";
        out += kConditionHeader;
        for (const auto& [k, row] : report.by_condition) {
            auto cells = row_cells(row);
            out += md_row(std::to_string(k) + " correct", rate_cells(cells));
            out += md_row("n (" + std::to_string(k) + " correct)", count_cells(cells));
        }
        return out;
    }

    std::string out = kCsvHeader;
    out += csv_row("success", "rate", rate_cells(success));
    out += csv_row("success", "n", count_cells(success));
    for (const auto& [k, row] : report.by_condition) {
        auto cells = row_cells(row);
        out += csv_row("condition", std::to_string(k) + " correct", rate_cells(cells));
        out += csv_row("condition", "n (" + std::to_string(k) + " correct)", count_cells(cells));
    }
    return out;
}

std::string emit_mode_comparison(const std::vector<Report>& reports) {
    std::string out = "# Mode comparison\n\n";
    out += "| Mode | Web | Desktop | Mobile | Button | Icon | Dropdown | Input | Toggle | "
           "Overall |\n|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        out += md_row(r.mode_label, rate_cells(row_cells(r)));
    }
    if (!reports.empty()) {
        out += md_row("n", count_cells(row_cells(reports.front())));
    }
    return out;
}

}  // namespace grounder
