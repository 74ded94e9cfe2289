#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "guiforge/a11y.hpp"
#include "guiforge/action.hpp"

namespace guiforge {

/// Effect of a matched transition.
struct TransitionEffect {
    enum class Kind { goto_screen, set_field, no_op };
    Kind kind = Kind::no_op;
    std::string arg;  // target screen for goto, node id for set_field

    bool operator==(const TransitionEffect&) const = default;
};

/// One row of the transition table. A trigger matches on (action kind,
/// target node); target "-" in the document means "no target".
struct TransitionRule {
    std::string screen_id;
    ActionKind kind = ActionKind::click;
    std::string target;  // empty = targetless trigger
    TransitionEffect effect;

    bool operator==(const TransitionRule&) const = default;
};

/// Declarative description of a simulated GUI app: screens with
/// accessibility trees, a deterministic transition table, prompt metadata.
struct EnvironmentDefinition {
    std::string env_id;
    Platform platform = Platform::mobile;
    std::vector<ScreenState> screens;  // templates
    std::string initial_screen;
    std::vector<TransitionRule> transitions;
    std::string app_name;       // mobile
    std::string website_name;   // web
    std::string website_intro;  // web
    std::string task_examples;  // examples bank for association prompts

    const ScreenState* screen(std::string_view screen_id) const;
    const TransitionRule* match(std::string_view screen_id, ActionKind kind,
                                std::string_view target) const;
    /// Display name regardless of platform (app_name or website_name).
    const std::string& surface_name() const {
        return platform == Platform::mobile ? app_name : website_name;
    }
};

/// Parses and validates an environment-definition document (grammar in
/// docs/environment-format.md). Throws Error(parse_error) on malformed input
/// and Error(validation_error) on dangling references or duplicate triggers.
EnvironmentDefinition load_environment(std::string_view source,
                                       std::string_view source_name = "<string>");
EnvironmentDefinition load_environment_file(const std::string& path);

/// A live instance; exclusively owned by one logical task at a time.
class Environment {
  public:
    explicit Environment(const EnvironmentDefinition& def);

    const EnvironmentDefinition& definition() const { return *def_; }
    const ScreenState& current() const { return current_; }
    int step_count() const { return step_count_; }

    /// Applies the action and returns the post state. Unmatched valid actions
    /// are no-ops; the step is still counted.
    ScreenState step(const Action& action);

  private:
    const EnvironmentDefinition* def_;  // definitions are immutable and shared
    ScreenState current_;
    int step_count_ = 0;
};

/// Fresh instance positioned on the initial screen with template field values.
Environment reset(const EnvironmentDefinition& def);

/// Pure observation of the current state.
const ScreenState& observe(const Environment& env);

/// Free-function form of Environment::step.
ScreenState step(Environment& env, const Action& action);

}  // namespace guiforge
