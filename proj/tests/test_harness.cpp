#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "grounder/dataset.hpp"
#include "grounder/errors.hpp"
#include "grounder/evaluate.hpp"
#include "grounder/util.hpp"
#include "test_support.hpp"

using namespace grounder;
using nlohmann::json;

namespace {

json canonical_line(const std::string& id, const BBox& box,
                    const std::string& platform = "web",
                    const std::string& element = "button") {
    return json{{"id", id},
                {"instruction", "click the " + id + " element"},
                {"image", id + ".png"},
                {"bbox", {box.x1, box.y1, box.x2, box.y2}},
                {"platform", platform},
                {"element_type", element},
                {"width", 1000},
                {"height", 1000}};
}

std::string write_dataset(const std::string& dir, const std::vector<json>& lines) {
    std::string path = dir + "/data.jsonl";
    std::string text;
    for (const auto& l : lines) text += l.dump() + "\n";
    write_file(path, text);
    return path;
}

// Script for one episode: three specialists reply fixed points, the general
// analyzes then clicks `decision`.
json episode_script(Point a, Point b, Point c, Point decision) {
    return json{
        {"alpha", {format_point(a)}},
        {"bravo", {format_point(b)}},
        {"charlie", {format_point(c)}},
        {"general",
         {"compared the reports", "DECISION: CLICK(" + std::to_string(decision.x) + ", " +
                                      std::to_string(decision.y) + ")"}}};
}

EvalResult synthetic_result(bool hit, Platform platform, ElementType element, int k_correct,
                            int k_total = 3) {
    EvalResult r;
    r.record_id = "r";
    r.mode = Mode::joint();
    r.predicted = Point{1, 1};
    r.hit = hit;
    r.rounds_used = 1;
    r.platform = platform;
    r.element_type = element;
    for (int i = 0; i < k_total; ++i) {
        r.specialist_hits["s" + std::to_string(i)] = i < k_correct;
    }
    return r;
}

}  // namespace

TEST_CASE("canonical dataset loads with mapped fields") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    auto path = write_dataset(dir, {canonical_line("a", BBox{10, 10, 50, 50}, "web", "button"),
                                    canonical_line("b", BBox{0, 0, 100, 40}, "desktop", "icon"),
                                    canonical_line("c", BBox{5, 5, 9, 9}, "mobile", "toggle")});
    auto records = load_dataset(path, DatasetSource::Custom);
    REQUIRE(records.size() == 3);
    CHECK(records[0].record_id == "a");
    CHECK(records[0].task.platform == Platform::Web);
    CHECK(records[0].task.element_type == ElementType::Button);
    CHECK(records[0].task.gt_box == BBox{10, 10, 50, 50});
    CHECK(records[0].task.screenshot.width == 1000);
    CHECK(records[1].task.platform == Platform::Desktop);
    CHECK(records[2].task.element_type == ElementType::Toggle);
    // Image paths resolve relative to the dataset file.
    CHECK(records[0].task.screenshot.image_ref.find(dir) != std::string::npos);
}

TEST_CASE("invalid boxes are rejected with their line numbers") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    json bad = canonical_line("b", BBox{0, 0, 100, 40});
    bad["bbox"] = {100, 0, 100, 40};  // x2 <= x1
    auto path = write_dataset(dir, {canonical_line("a", BBox{10, 10, 50, 50}), bad});
    try {
        load_dataset(path, DatasetSource::Custom);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("missing files and empty datasets raise typed errors") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/data.jsonl", DatasetSource::Custom),
                    FileNotFound);
    std::string dir = testsupport::fresh_dir("tmp_harness");
    write_file(dir + "/empty.jsonl", "\n\n");
    CHECK_THROWS_AS(load_dataset(dir + "/empty.jsonl", DatasetSource::Custom), EmptyDataset);
}

TEST_CASE("duplicate record ids are rejected") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    auto path = write_dataset(dir, {canonical_line("a", BBox{10, 10, 50, 50}),
                                    canonical_line("a", BBox{0, 0, 30, 30})});
    CHECK_THROWS_AS(load_dataset(path, DatasetSource::Custom), SchemaError);
}

TEST_CASE("normalized boxes scale by the image dimensions") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    json line = {{"id", "n1"},
                 {"instruction", "tap the chip"},
                 {"image", "n1.png"},
                 {"bbox", {0.25, 0.25, 0.5, 0.5}},
                 {"platform", "mobile"},
                 {"element_type", "icon"},
                 {"img_size", {400, 200}}};
    auto path = write_dataset(dir, {line});
    auto records = load_dataset(path, DatasetSource::UII2E);
    REQUIRE(records.size() == 1);
    const BBox& box = *records[0].task.gt_box;
    CHECK(box == BBox{100, 50, 200, 100});
    CHECK(hit_test(bbox_center(box), box));
}

TEST_CASE("screenspot boxes arrive as x,y,w,h") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    json line = {{"img_filename", "shot.png"},
                 {"instruction", "close the dialog"},
                 {"bbox", {10, 20, 30, 40}},
                 {"data_type", "icon"},
                 {"data_source", "macos"},
                 {"img_size", {800, 600}}};
    auto path = write_dataset(dir, {line});
    auto records = load_dataset(path, DatasetSource::ScreenSpot);
    REQUIRE(records.size() == 1);
    CHECK(*records[0].task.gt_box == BBox{10, 20, 40, 60});
    CHECK(records[0].task.element_type == ElementType::Icon);
    CHECK(records[0].task.platform == Platform::Desktop);
    CHECK(records[0].record_id == "screenspot-1");
}

TEST_CASE("image header supplies dimensions when the record omits them") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    testsupport::write_stub_png(dir + "/shot.png", 640, 480);
    json line = {{"id", "p1"},
                 {"instruction", "press play"},
                 {"image", "shot.png"},
                 {"bbox", {10, 10, 20, 20}},
                 {"platform", "web"},
                 {"element_type", "button"}};
    auto path = write_dataset(dir, {line});
    auto records = load_dataset(path, DatasetSource::Custom);
    CHECK(records[0].task.screenshot.width == 640);
    CHECK(records[0].task.screenshot.height == 480);
}

TEST_CASE("evaluate scores scripted episodes and reports exact ratios") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    auto path = write_dataset(dir, {canonical_line("r0", BBox{0, 0, 100, 100}, "web", "button"),
                                    canonical_line("r1", BBox{200, 200, 300, 300}, "web", "icon"),
                                    canonical_line("r2", BBox{400, 400, 500, 500}, "mobile",
                                                   "button")});
    auto records = load_dataset(path, DatasetSource::Custom);

    json script;
    script["episodes"]["r0"] = episode_script(Point{50, 50}, Point{51, 50}, Point{900, 900},
                                              Point{50, 50});   // hit; alpha+bravo correct
    script["episodes"]["r1"] = episode_script(Point{250, 250}, Point{900, 900}, Point{901, 901},
                                              Point{900, 900});  // miss; alpha correct
    script["episodes"]["r2"] = episode_script(Point{450, 450}, Point{449, 450}, Point{448, 451},
                                              Point{450, 450});  // hit; all correct
    ScriptLibraryProvider provider(ScriptLibrary::from_json(script));

    RunConfig cfg = testsupport::three_specialist_run_config();
    auto [results, report] =
        evaluate(records, Mode::joint(), cfg, provider, TraceWriter::null());

    REQUIRE(results.size() == 3);
    CHECK(results[0].record_id == "r0");
    CHECK(results[0].hit);
    CHECK_FALSE(results[1].hit);
    CHECK(results[2].hit);
    CHECK(report.overall == StratumRate{2, 3});
    CHECK(format_rate(report.overall) == "66.7");

    CHECK(results[0].specialist_hits ==
          std::map<std::string, bool>{{"alpha", true}, {"bravo", true}, {"charlie", false}});
    CHECK(results[1].specialist_hits ==
          std::map<std::string, bool>{{"alpha", true}, {"bravo", false}, {"charlie", false}});

    // Platform and element strata sum to the overall counts.
    int hits = 0;
    int total = 0;
    for (const auto& [_, s] : report.by_platform) {
        hits += s.hits;
        total += s.total;
    }
    CHECK(hits == report.overall.hits);
    CHECK(total == report.overall.total);
    hits = total = 0;
    for (const auto& [_, s] : report.by_element) {
        hits += s.hits;
        total += s.total;
    }
    CHECK(hits == report.overall.hits);
    CHECK(total == report.overall.total);
}

TEST_CASE("per-record failures score as misses without aborting the run") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    auto path = write_dataset(dir, {canonical_line("ok", BBox{0, 0, 100, 100}),
                                    canonical_line("broken", BBox{0, 0, 100, 100})});
    auto records = load_dataset(path, DatasetSource::Custom);

    json script;
    script["episodes"]["ok"] =
        episode_script(Point{50, 50}, Point{50, 50}, Point{50, 50}, Point{50, 50});
    // "broken" has no section: the scripted gateway fails loudly and the
    // record scores as a miss.
    ScriptLibraryProvider provider(ScriptLibrary::from_json(script));
    RunConfig cfg = testsupport::three_specialist_run_config();
    auto [results, report] = evaluate(records, Mode::joint(), cfg, provider, TraceWriter::null());
    CHECK(results[0].hit);
    CHECK_FALSE(results[1].hit);
    CHECK_FALSE(results[1].predicted.has_value());
    CHECK(results[1].failure == "episode_failed");
    CHECK(report.overall == StratumRate{1, 2});
}

TEST_CASE("all-center predictions give a perfect report") {
    std::string dir = testsupport::fresh_dir("tmp_harness");
    std::vector<json> lines;
    json script;
    for (int i = 0; i < 6; ++i) {
        BBox box{40 * i, 100, 40 * i + 30, 160};
        lines.push_back(canonical_line("r" + std::to_string(i), box));
        Point center = bbox_center(box);
        script["episodes"]["r" + std::to_string(i)] =
            episode_script(center, center, center, center);
    }
    auto records = load_dataset(write_dataset(dir, lines), DatasetSource::Custom);
    ScriptLibraryProvider provider(ScriptLibrary::from_json(script));
    RunConfig cfg = testsupport::three_specialist_run_config();
    auto [results, report] = evaluate(records, Mode::joint(), cfg, provider, TraceWriter::null());
    CHECK(report.overall == StratumRate{6, 6});
    CHECK(format_rate(report.overall) == "100.0");
}

TEST_CASE("condition analysis stratifies by correct-specialist count") {
    std::vector<EvalResult> results;
    // k=2: the decision is always correct.
    for (int i = 0; i < 5; ++i) {
        results.push_back(synthetic_result(true, Platform::Web, ElementType::Button, 2));
    }
    // k=1: picks are correct exactly 1/3 of the time (enumeration below).
    for (int i = 0; i < 9; ++i) {
        results.push_back(
            synthetic_result(i % 3 == 0, Platform::Mobile, ElementType::Icon, 1));
    }
    // k=0: never correct.
    results.push_back(synthetic_result(false, Platform::Desktop, ElementType::Input, 0));

    auto strata = condition_analysis(results);
    REQUIRE(strata.size() == 3);
    CHECK(strata[2].overall == StratumRate{5, 5});
    CHECK(strata[1].overall == StratumRate{3, 9});
    CHECK(format_rate(strata[1].overall) == "33.3");
    CHECK(strata[0].overall == StratumRate{0, 1});
    CHECK(strata[1].by_platform[Platform::Mobile] == StratumRate{3, 9});
}

TEST_CASE("report formatting pins the layout") {
    std::vector<EvalResult> results;
    for (int i = 0; i < 1000; ++i) {
        results.push_back(synthetic_result(i < 784, Platform::Web, ElementType::Button, 1));
    }
    Report report = build_report(results, "full");
    CHECK(format_rate(report.overall) == "78.4");

    std::string md = emit_report(report, ReportFormat::Markdown);
    CHECK(md.find("| Web | Desktop | Mobile | Button | Icon | Dropdown | Input | Toggle | "
                  "Overall |") != std::string::npos);
    CHECK(md.find("78.4") != std::string::npos);
    // Empty strata render as an em-dash with count 0.
    CHECK(md.find("—") != std::string::npos);

    std::string csv = emit_report(report, ReportFormat::Csv);
    auto lines = split_lines(csv);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] ==
          "table,row,web,desktop,mobile,button,icon,dropdown,input,toggle,overall");
    // Re-ingesting the CSV yields the same overall rate cell.
    auto cells = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        out.push_back(cur);
        return out;
    };
    auto rate_row = cells(lines[1]);
    CHECK(rate_row.back() == "78.4");
    auto n_row = cells(lines[2]);
    CHECK(n_row.back() == "1000");
}

TEST_CASE("reports are invariant under record order permutation") {
    std::vector<EvalResult> results;
    std::mt19937 rng(31);
    for (int i = 0; i < 200; ++i) {
        results.push_back(synthetic_result(
            i % 3 != 0, static_cast<Platform>(i % 4),
            static_cast<ElementType>(i % 7), i % 4));
    }
    Report before = build_report(results, "full");
    std::string md_before = emit_report(before, ReportFormat::Markdown);
    std::shuffle(results.begin(), results.end(), rng);
    Report after = build_report(results, "full");
    CHECK(emit_report(after, ReportFormat::Markdown) == md_before);
    CHECK(emit_report(after, ReportFormat::Csv) == emit_report(before, ReportFormat::Csv));
}
