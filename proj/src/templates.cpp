#include "grounder/templates.hpp"

#include <filesystem>

#include "grounder/errors.hpp"
#include "grounder/util.hpp"

namespace grounder {

namespace {

const std::map<std::string, std::string>& default_texts() {
    static const std::map<std::string, std::string> texts = {
        {"observer_system",
         "You are a GUI grounding specialist. Look at the screenshot and locate the element "
         "the instruction refers to. State the target element and its coordinates: reply with "
         "one short sentence describing the element, then the click point as {coord_frame}."},
        {"observer_user", "Instruction: {instruction}"},
        {"observer_hint",
         "Further instruction: {hint}\n"
         "Re-examine the screenshot with this in mind and reply again with the target element "
         "and its coordinates."},
        {"observer_requery",
         "Re-examine the screenshot and reply again with the target element and its "
         "coordinates."},
        {"observer_nudge",
         "Your previous reply did not include coordinates. Reply with the click point as "
         "{coord_frame}."},
        {"reasoner_system",
         "You coordinate a group of GUI grounding specialists. Integrate their reports, reason "
         "about agreements and conflicts, and choose the click point that completes the task."},
        {"analysis_request",
         "Task: {instruction}\n\n"
         "Specialist reports (round {round}):\n{reports}\n\n"
         "Analyze where the reports agree or conflict and which specialists look most reliable "
         "for this task."},
        {"decision_request",
         "Decide now. Reply with exactly one of:\n"
         "DECISION: CLICK(x, y)\n"
         "REFLECT:\n"
         "<specialist_id>: <instruction>\n"
         "Coordinates are absolute pixels. Use REFLECT only if the information is insufficient, "
         "with one line per specialist that should look again. Known specialists: "
         "{specialist_ids}."},
        {"decision_retry",
         "Your reply could not be parsed: {error}\n"
         "Reply again using exactly DECISION: CLICK(x, y) or REFLECT: followed by "
         "<specialist_id>: <instruction> lines."},
        {"best_guess_request",
         "No further reflection is possible. Based on everything above, reply with exactly "
         "DECISION: CLICK(x, y) and nothing else."},
    };
    return texts;
}

}  // namespace

TemplateSet TemplateSet::defaults() {
    TemplateSet t;
    t.texts_ = default_texts();
    return t;
}

TemplateSet TemplateSet::load(const std::string& dir) {
    TemplateSet t = defaults();
    if (dir.empty()) return t;
    std::filesystem::path root(dir);
    if (!std::filesystem::is_directory(root)) {
        throw ConfigError("template_dir is not a directory: " + dir);
    }
    for (auto& [name, _] : default_texts()) {
        auto file = root / (name + ".txt");
        if (auto text = read_file(file.string())) t.texts_[name] = *text;
    }
    return t;
}

std::string TemplateSet::render(const std::string& name,
                                const std::map<std::string, std::string>& vars) const {
    std::string out = raw(name);
    for (const auto& [key, value] : vars) {
        const std::string needle = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

const std::string& TemplateSet::raw(const std::string& name) const {
    auto it = texts_.find(name);
    if (it == texts_.end()) throw Error("unknown template: " + name);
    return it->second;
}

}  // namespace grounder
