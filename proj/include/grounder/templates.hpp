#pragma once

#include <map>
#include <string>

namespace grounder {

// Prompt templates, loadable from a plain-text directory so wording can be
// tuned without rebuilds. Placeholders use {name} syntax.
class TemplateSet {
public:
    static TemplateSet defaults();

    // Defaults with any <name>.txt files found under dir layered on top.
    static TemplateSet load(const std::string& dir);

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& vars) const;

    const std::string& raw(const std::string& name) const;

private:
    std::map<std::string, std::string> texts_;
};

}  // namespace grounder
