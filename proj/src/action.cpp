#include "guiforge/action.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

#include "guiforge/error.hpp"

namespace guiforge {

using nlohmann::json;

Platform platform_from_string(std::string_view s) {
    if (s == "mobile") return Platform::mobile;
    if (s == "web") return Platform::web;
    throw Error(Errc::parse_error, "unknown platform \"" + std::string(s) + "\"");
}

const char* to_string(Platform p) {
    return p == Platform::mobile ? "mobile" : "web";
}

const char* to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::click: return "click";
        case ActionKind::long_press: return "long_press";
        case ActionKind::type: return "type";
        case ActionKind::scroll: return "scroll";
        case ActionKind::navigate_home: return "navigate_home";
        case ActionKind::navigate_back: return "navigate_back";
        case ActionKind::open_app: return "open_app";
        case ActionKind::wait: return "wait";
        case ActionKind::terminate: return "terminate";
        case ActionKind::keyboard_enter: return "keyboard_enter";
        case ActionKind::hover: return "hover";
        case ActionKind::press: return "press";
        case ActionKind::new_tab: return "new_tab";
        case ActionKind::tab_focus: return "tab_focus";
        case ActionKind::close_tab: return "close_tab";
        case ActionKind::goto_url: return "goto";
        case ActionKind::go_back: return "go_back";
        case ActionKind::go_forward: return "go_forward";
        case ActionKind::stop: return "stop";
    }
    return "?";
}

ActionKind action_kind_from_string(std::string_view s) {
    static const std::array<ActionKind, 19> all = {
        ActionKind::click,      ActionKind::long_press,  ActionKind::type,
        ActionKind::scroll,     ActionKind::navigate_home, ActionKind::navigate_back,
        ActionKind::open_app,   ActionKind::wait,        ActionKind::terminate,
        ActionKind::keyboard_enter, ActionKind::hover,   ActionKind::press,
        ActionKind::new_tab,    ActionKind::tab_focus,   ActionKind::close_tab,
        ActionKind::goto_url,   ActionKind::go_back,     ActionKind::go_forward,
        ActionKind::stop};
    for (ActionKind k : all)
        if (s == to_string(k)) return k;
    throw Error(Errc::unknown_kind, "unknown action kind \"" + std::string(s) + "\"");
}

bool kind_in_platform(ActionKind kind, Platform platform) {
    switch (kind) {
        case ActionKind::click:
        case ActionKind::type:
        case ActionKind::scroll:
            return true;
        case ActionKind::long_press:
        case ActionKind::navigate_home:
        case ActionKind::navigate_back:
        case ActionKind::open_app:
        case ActionKind::wait:
        case ActionKind::terminate:
        case ActionKind::keyboard_enter:
            return platform == Platform::mobile;
        case ActionKind::hover:
        case ActionKind::press:
        case ActionKind::new_tab:
        case ActionKind::tab_focus:
        case ActionKind::close_tab:
        case ActionKind::goto_url:
        case ActionKind::go_back:
        case ActionKind::go_forward:
        case ActionKind::stop:
            return platform == Platform::web;
    }
    return false;
}

void validate_action(const Action& action) {
    if (!kind_in_platform(action.kind, action.platform))
        throw Error(Errc::invalid_kind, std::string(to_string(action.kind)) + " is not in the " +
                                            to_string(action.platform) + " action space");
    auto require = [&](bool cond, const char* what) {
        if (!cond)
            throw Error(Errc::invalid_kind, std::string(to_string(action.kind)) +
                                                " action requires " + what);
    };
    switch (action.kind) {
        case ActionKind::type:
            require(!action.text.empty(), "text");
            break;
        case ActionKind::scroll:
            require(action.direction == "up" || action.direction == "down" ||
                        (action.platform == Platform::mobile &&
                         (action.direction == "left" || action.direction == "right")),
                    "a direction");
            break;
        case ActionKind::open_app:
            require(!action.text.empty(), "an app name");
            break;
        case ActionKind::press:
            require(!action.key_comb.empty(), "a key combination");
            break;
        case ActionKind::goto_url:
            require(!action.url.empty(), "a url");
            break;
        case ActionKind::tab_focus:
            require(action.tab_index >= 0, "a tab index");
            break;
        case ActionKind::click:
        case ActionKind::long_press:
        case ActionKind::hover:
            require(!action.target.empty() || action.coordinates.has_value(),
                    "a target or coordinates");
            break;
        default:
            break;
    }
    if (action.coordinates) {
        auto [x, y] = *action.coordinates;
        require(action.platform == Platform::mobile, "coordinates only on mobile");
        require(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0, "coordinates in [0,1]");
    }
}

namespace {

std::string mobile_canonical(const Action& a) {
    json j;  // std::map-backed => sorted keys
    j["action_type"] = to_string(a.kind);
    if (!a.target.empty()) j["target"] = a.target;
    if (a.kind == ActionKind::type) j["text"] = a.text;
    if (a.kind == ActionKind::open_app) j["app_name"] = a.text;
    if (a.kind == ActionKind::scroll) j["direction"] = a.direction;
    if (a.coordinates) {
        j["x"] = a.coordinates->first;
        j["y"] = a.coordinates->second;
    }
    return j.dump();
}

std::string web_canonical(const Action& a) {
    switch (a.kind) {
        case ActionKind::click:
        case ActionKind::hover:
            return std::string(to_string(a.kind)) + " [" + a.target + "]";
        case ActionKind::type:
            return "type [" + a.target + "] [" + a.text + "] [press_enter_after=" +
                   (a.press_enter ? "1" : "0") + "]";
        case ActionKind::press:
            return "press [" + a.key_comb + "]";
        case ActionKind::scroll:
            return "scroll [" + a.direction + "]";
        case ActionKind::tab_focus:
            return "tab_focus [" + std::to_string(a.tab_index) + "]";
        case ActionKind::goto_url:
            return "goto [" + a.url + "]";
        case ActionKind::stop:
            return "stop [" + a.text + "]";
        default:
            return to_string(a.kind);  // new_tab, close_tab, go_back, go_forward
    }
}

std::string trim_copy(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Splits "kind [a] [b] [c]" into kind + bracket args. Brackets may contain
// anything except an unmatched ']' followed by ' [' (WebArena tokens never do).
std::vector<std::string> bracket_args(std::string_view rest) {
    std::vector<std::string> args;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = rest.find('[', pos);
        if (open == std::string_view::npos) break;
        // last arg may itself contain ']': take up to the matching ']' that
        // precedes the next " [" or end of string
        std::size_t next_open = rest.find(" [", open + 1);
        std::size_t close = (next_open == std::string_view::npos)
                                ? rest.rfind(']')
                                : rest.rfind(']', next_open);
        if (close == std::string_view::npos || close <= open)
            throw Error(Errc::unparseable_action, "unbalanced brackets in action");
        args.emplace_back(rest.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    return args;
}

}  // namespace

std::string canonical_action(const Action& action) {
    return action.platform == Platform::mobile ? mobile_canonical(action) : web_canonical(action);
}

Action parse_mobile_action_json(const json& j) {
    if (!j.is_object() || !j.contains("action_type"))
        throw Error(Errc::unparseable_action, "mobile action must be a dictionary with action_type");
    Action a;
    a.platform = Platform::mobile;
    a.kind = action_kind_from_string(j.at("action_type").get<std::string>());
    if (j.contains("target")) a.target = j.at("target").get<std::string>();
    if (j.contains("text")) a.text = j.at("text").get<std::string>();
    if (j.contains("app_name")) a.text = j.at("app_name").get<std::string>();
    if (j.contains("direction")) a.direction = j.at("direction").get<std::string>();
    if (j.contains("x") && j.contains("y"))
        a.coordinates = {j.at("x").get<double>(), j.at("y").get<double>()};
    validate_action(a);
    return a;
}

Action parse_web_action(std::string_view text) {
    std::string line = trim_copy(text);
    if (line.empty()) throw Error(Errc::unparseable_action, "empty action text");
    std::size_t sp = line.find_first_of(" \t");
    std::string head = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : line.substr(sp);

    Action a;
    a.platform = Platform::web;
    a.kind = action_kind_from_string(head);
    auto args = bracket_args(rest);
    auto need = [&](std::size_t n) {
        if (args.size() < n)
            throw Error(Errc::unparseable_action,
                        head + " expects " + std::to_string(n) + " bracket argument(s)");
    };
    switch (a.kind) {
        case ActionKind::click:
        case ActionKind::hover:
            need(1);
            a.target = args[0];
            break;
        case ActionKind::type: {
            need(2);
            a.target = args[0];
            a.text = args[1];
            if (args.size() >= 3) {
                std::string flag = args[2];
                if (flag.rfind("press_enter_after=", 0) == 0) flag = flag.substr(18);
                a.press_enter = flag != "0";
            }
            break;
        }
        case ActionKind::press:
            need(1);
            a.key_comb = args[0];
            break;
        case ActionKind::scroll: {
            need(1);
            std::string d = args[0];
            if (d.rfind("direction=", 0) == 0) d = d.substr(10);
            a.direction = d;
            break;
        }
        case ActionKind::tab_focus:
            need(1);
            try {
                a.tab_index = std::stoi(args[0]);
            } catch (const std::exception&) {
                throw Error(Errc::unparseable_action, "tab_focus index is not a number");
            }
            break;
        case ActionKind::goto_url:
            need(1);
            a.url = args[0];
            break;
        case ActionKind::stop:
            a.text = args.empty() ? "" : args[0];
            break;
        case ActionKind::new_tab:
        case ActionKind::close_tab:
        case ActionKind::go_back:
        case ActionKind::go_forward:
            break;
        default:
            throw Error(Errc::invalid_kind,
                        head + " is not in the web action space");
    }
    validate_action(a);
    return a;
}

Action parse_canonical_action(std::string_view text, Platform platform) {
    if (platform == Platform::web) return parse_web_action(text);
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw Error(Errc::unparseable_action, "mobile canonical action is not valid JSON");
    return parse_mobile_action_json(j);
}

}  // namespace guiforge
