#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace guiforge {

enum class Platform { mobile, web };

Platform platform_from_string(std::string_view s);
const char* to_string(Platform p);

enum class ActionKind {
    // mobile
    click,
    long_press,
    type,
    scroll,
    navigate_home,
    navigate_back,
    open_app,
    wait,
    terminate,
    keyboard_enter,
    // web (click, type, scroll shared)
    hover,
    press,
    new_tab,
    tab_focus,
    close_tab,
    goto_url,
    go_back,
    go_forward,
    stop,
};

const char* to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view s);

/// A typed GUI action from the mobile or web action space.
struct Action {
    Platform platform = Platform::mobile;
    ActionKind kind = ActionKind::click;
    std::string target;     // node id
    std::string text;       // type content / open_app name / stop answer
    std::string direction;  // scroll: up|down|left|right
    std::string key_comb;   // press (web)
    std::string url;        // goto (web)
    int tab_index = -1;     // tab_focus (web)
    bool press_enter = true;                              // web type flag
    std::optional<std::pair<double, double>> coordinates;  // mobile, screen fractions

    bool operator==(const Action&) const = default;
};

bool kind_in_platform(ActionKind kind, Platform platform);

/// Throws Error(invalid_kind) when the kind is outside the platform space or a
/// kind-specific required field is missing (e.g. type without text).
void validate_action(const Action& action);

/// Stable single-line form used for dedup keys, history lines and stores.
/// Mobile: sorted-key JSON dictionary. Web: bracket syntax.
std::string canonical_action(const Action& action);

/// Parses the canonical form back (either platform).
Action parse_canonical_action(std::string_view text, Platform platform);

/// Mobile action dictionary, e.g. {"action_type": "type", "target": "f", "text": "x"}.
Action parse_mobile_action_json(const nlohmann::json& j);

/// Web bracket syntax, e.g. `type [164] [restaurants near CMU] [1]`.
Action parse_web_action(std::string_view text);

}  // namespace guiforge
