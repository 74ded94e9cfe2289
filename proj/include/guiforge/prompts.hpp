#pragma once

#include <map>
#include <string>
#include <string_view>

#include "guiforge/action.hpp"

namespace guiforge {

struct EnvironmentDefinition;
struct ScreenState;

namespace prompts {

/// Static template texts (exact bytes pinned by the golden-file tests).
const std::string& association_mobile_template();
const std::string& association_web_template();
const std::string& trm_template();
const std::string& planning_training_mobile_template();
const std::string& planning_training_web_template();
const std::string& action_training_mobile_template();
const std::string& action_training_web_template();
const std::string& executor_mobile_template();
const std::string& task_driven_template();
const std::string& self_instruct_template();

/// Replaces {key} for every map entry. Values for required keys must be
/// non-empty; a missing or empty one raises Error(missing_template_variable).
std::string render(std::string_view template_text,
                   const std::map<std::string, std::string>& variables);

/// "CLICK" / "TYPE, input value: \"...\"" / "SCROLL, direction: ..." for the
/// mobile association prompt; canonical bracket syntax for web.
std::string format_current_action(const Action& action);

}  // namespace prompts
}  // namespace guiforge
