#include "grounder/parse.hpp"

#include <cmath>
#include <regex>

#include "grounder/util.hpp"

namespace grounder {

namespace {

const char* kNum = R"([-+]?\d+(?:\.\d+)?)";

const std::regex& box_re() {
    static const std::regex re("\\(\\s*(" + std::string(kNum) + ")\\s*,\\s*(" + kNum +
                               ")\\s*\\)\\s*,\\s*\\(\\s*(" + kNum + ")\\s*,\\s*(" + kNum +
                               ")\\s*\\)");
    return re;
}

const std::regex& paren_tuple_re() {
    static const std::regex re("\\(\\s*(" + std::string(kNum) + ")\\s*,\\s*(" + kNum + ")\\s*\\)");
    return re;
}

const std::regex& bracket_tuple_re() {
    static const std::regex re("\\[\\s*(" + std::string(kNum) + ")\\s*,\\s*(" + kNum + ")\\s*\\]");
    return re;
}

const std::regex& kv_x_re() {
    static const std::regex re("\"x\"\\s*:\\s*(" + std::string(kNum) + ")");
    return re;
}

const std::regex& kv_y_re() {
    static const std::regex re("\"y\"\\s*:\\s*(" + std::string(kNum) + ")");
    return re;
}

int round_px(double v) { return static_cast<int>(std::llround(v)); }

// Box expression: center in the source frame (floor rule), then converted.
std::optional<Point> match_box(const std::string& text) {
    auto begin = std::sregex_iterator(text.begin(), text.end(), box_re());
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        double x1 = std::stod((*it)[1]);
        double y1 = std::stod((*it)[2]);
        double x2 = std::stod((*it)[3]);
        double y2 = std::stod((*it)[4]);
        if (x1 < 0 || y1 < 0 || x1 >= x2 || y1 >= y2) continue;  // not a geometric box
        return Point{static_cast<int>(std::floor((x1 + x2) / 2.0)),
                     static_cast<int>(std::floor((y1 + y2) / 2.0))};
    }
    return std::nullopt;
}

std::optional<Point> match_tuple(const std::string& text) {
    std::smatch paren;
    std::smatch bracket;
    bool has_paren = std::regex_search(text, paren, paren_tuple_re());
    bool has_bracket = std::regex_search(text, bracket, bracket_tuple_re());
    if (!has_paren && !has_bracket) return std::nullopt;
    const std::smatch* m = &paren;
    if (!has_paren || (has_bracket && bracket.position(0) < paren.position(0))) m = &bracket;
    return Point{round_px(std::stod((*m)[1])), round_px(std::stod((*m)[2]))};
}

std::optional<Point> match_key_value(const std::string& text) {
    std::smatch mx;
    if (!std::regex_search(text, mx, kv_x_re())) return std::nullopt;
    std::string rest = mx.suffix().str();
    std::smatch my;
    if (!std::regex_search(rest, my, kv_y_re())) return std::nullopt;
    return Point{round_px(std::stod(mx[1])), round_px(std::stod(my[1]))};
}

}  // namespace

Point parse_point(const std::string& text, const CoordConvention& conv,
                  const ScreenshotMeta& meta) {
    std::optional<Point> raw = match_box(text);
    if (!raw) raw = match_tuple(text);
    if (!raw) raw = match_key_value(text);
    if (!raw) throw NoCoordinateFound("no coordinate expression in reply");
    return clamp_to_screen(to_pixels(*raw, conv, meta), meta);
}

std::optional<Point> try_parse_point(const std::string& text, const CoordConvention& conv,
                                     const ScreenshotMeta& meta) {
    try {
        return parse_point(text, conv, meta);
    } catch (const NoCoordinateFound&) {
        return std::nullopt;
    } catch (const OutOfRange&) {
        return std::nullopt;
    }
}

std::string elide_coordinates(const std::string& text) {
    std::string out = std::regex_replace(text, box_re(), "");
    out = std::regex_replace(out, paren_tuple_re(), "");
    out = std::regex_replace(out, bracket_tuple_re(), "");
    out = std::regex_replace(out, kv_x_re(), "");
    out = std::regex_replace(out, kv_y_re(), "");
    return collapse_whitespace(out);
}

}  // namespace grounder
