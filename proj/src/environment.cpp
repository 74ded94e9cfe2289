#include "guiforge/environment.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "guiforge/error.hpp"

namespace guiforge {

const ScreenState* EnvironmentDefinition::screen(std::string_view screen_id) const {
    for (const auto& s : screens)
        if (s.screen_id == screen_id) return &s;
    return nullptr;
}

const TransitionRule* EnvironmentDefinition::match(std::string_view screen_id, ActionKind kind,
                                                   std::string_view target) const {
    for (const auto& t : transitions)
        if (t.screen_id == screen_id && t.kind == kind && t.target == target) return &t;
    return nullptr;
}

namespace {

struct Line {
    int number = 0;
    int indent = 0;
    std::string text;  // stripped of indentation
};

[[noreturn]] void fail(std::string_view source_name, int line, const std::string& msg) {
    throw Error(Errc::parse_error,
                std::string(source_name) + ":" + std::to_string(line) + ": " + msg);
}

// Tokenizes one node line: bare words plus key=value where value may be a
// quoted string with \" and \\ escapes.
std::vector<std::string> tokenize(std::string_view source_name, int lineno,
                                  const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        std::string tok;
        bool in_quotes = false;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (in_quotes) {
                if (c == '\\' && i + 1 < s.size()) {
                    tok.push_back(s[++i]);
                } else if (c == '"') {
                    in_quotes = false;
                } else {
                    tok.push_back(c);
                }
            } else if (c == '"') {
                in_quotes = true;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                break;
            } else {
                tok.push_back(c);
            }
        }
        if (in_quotes) fail(source_name, lineno, "unterminated quoted string");
        out.push_back(std::move(tok));
    }
    return out;
}

A11yNode parse_node_line(std::string_view source_name, const Line& line) {
    auto toks = tokenize(source_name, line.number, line.text);
    if (toks.size() < 2 || toks[0] != "node")
        fail(source_name, line.number, "expected: node <id> [attrs...]");
    A11yNode node;
    node.node_id = toks[1];
    for (std::size_t i = 2; i < toks.size(); ++i) {
        const std::string& t = toks[i];
        auto eq = t.find('=');
        std::string key = eq == std::string::npos ? t : t.substr(0, eq);
        std::string val = eq == std::string::npos ? "" : t.substr(eq + 1);
        if (key == "role") {
            node.role = val;
        } else if (key == "label") {
            node.label = val;
        } else if (key == "value") {
            node.value = val;
        } else if (key == "bounds") {
            double v[4];
            std::stringstream ss(val);
            std::string part;
            for (int k = 0; k < 4; ++k) {
                if (!std::getline(ss, part, ',')) fail(source_name, line.number, "bounds needs x0,y0,x1,y1");
                try {
                    v[k] = std::stod(part);
                } catch (const std::exception&) {
                    fail(source_name, line.number, "bad bounds coordinate \"" + part + "\"");
                }
            }
            node.bounds = Rect{v[0], v[1], v[2], v[3]};
        } else if (key == "interactive") {
            node.interactive = true;
        } else if (key == "editable") {
            node.editable = true;
            node.interactive = true;  // grammar: editable implies interactive
        } else {
            fail(source_name, line.number, "unknown node attribute \"" + key + "\"");
        }
    }
    if (node.role.empty()) fail(source_name, line.number, "node \"" + node.node_id + "\" needs role=");
    return node;
}

TransitionRule parse_transition_line(std::string_view source_name, const Line& line) {
    // on <screen> <kind> <target|-> -> goto <screen> | set_field <node> | no_op
    auto toks = tokenize(source_name, line.number, line.text);
    if (toks.size() < 5 || toks[0] != "on" || toks[4] != "->")
        fail(source_name, line.number,
             "expected: on <screen> <kind> <target|-> -> <effect> [arg]");
    TransitionRule rule;
    rule.screen_id = toks[1];
    try {
        rule.kind = action_kind_from_string(toks[2]);
    } catch (const Error&) {
        fail(source_name, line.number, "unknown action kind \"" + toks[2] + "\"");
    }
    rule.target = toks[3] == "-" ? "" : toks[3];
    const std::string& effect = toks.size() > 5 ? toks[5] : "";
    if (effect == "goto") {
        if (toks.size() < 7) fail(source_name, line.number, "goto needs a screen id");
        rule.effect = {TransitionEffect::Kind::goto_screen, toks[6]};
    } else if (effect == "set_field") {
        if (toks.size() < 7) fail(source_name, line.number, "set_field needs a node id");
        rule.effect = {TransitionEffect::Kind::set_field, toks[6]};
    } else if (effect == "no_op") {
        rule.effect = {TransitionEffect::Kind::no_op, ""};
    } else {
        fail(source_name, line.number, "unknown effect \"" + effect + "\"");
    }
    return rule;
}

void validate_definition(const EnvironmentDefinition& def) {
    if (def.env_id.empty()) throw Error(Errc::validation_error, "missing env header");
    if (def.screens.empty()) throw Error(Errc::validation_error, "definition has no screens");
    std::set<std::string> ids;
    for (const auto& s : def.screens) {
        if (!ids.insert(s.screen_id).second)
            throw Error(Errc::validation_error, "duplicate screen id \"" + s.screen_id + "\"");
        validate_tree(s);
    }
    if (def.initial_screen.empty())
        throw Error(Errc::validation_error, "missing initial screen");
    if (def.screen(def.initial_screen) == nullptr)
        throw Error(Errc::validation_error,
                    "initial screen \"" + def.initial_screen + "\" does not exist");
    std::set<std::tuple<std::string, ActionKind, std::string>> triggers;
    for (const auto& t : def.transitions) {
        const ScreenState* from = def.screen(t.screen_id);
        if (from == nullptr)
            throw Error(Errc::validation_error,
                        "transition references unknown screen \"" + t.screen_id + "\"");
        if (!t.target.empty() && find_node(*from, t.target) == nullptr)
            throw Error(Errc::validation_error, "transition on \"" + t.screen_id +
                                                    "\" references unknown node \"" + t.target + "\"");
        if (!triggers.insert({t.screen_id, t.kind, t.target}).second)
            throw Error(Errc::validation_error,
                        "duplicate trigger (" + t.screen_id + ", " + to_string(t.kind) + ", " +
                            (t.target.empty() ? "-" : t.target) + ")");
        switch (t.effect.kind) {
            case TransitionEffect::Kind::goto_screen:
                if (def.screen(t.effect.arg) == nullptr)
                    throw Error(Errc::validation_error,
                                "transition targets unknown screen \"" + t.effect.arg + "\"");
                break;
            case TransitionEffect::Kind::set_field:
                if (find_node(*from, t.effect.arg) == nullptr)
                    throw Error(Errc::validation_error,
                                "set_field targets unknown node \"" + t.effect.arg + "\"");
                break;
            case TransitionEffect::Kind::no_op:
                break;
        }
        if (!kind_in_platform(t.kind, def.platform))
            throw Error(Errc::validation_error, "trigger kind " + std::string(to_string(t.kind)) +
                                                    " is outside the " + to_string(def.platform) +
                                                    " action space");
    }
}

// Seeds field_values from editable nodes' template values.
void seed_field_values(ScreenState& s, const A11yNode& node) {
    if (node.editable) s.field_values[node.node_id] = node.value;
    for (const auto& c : node.children) seed_field_values(s, c);
}

}  // namespace

EnvironmentDefinition load_environment(std::string_view source, std::string_view source_name) {
    std::vector<Line> lines;
    {
        int n = 0;
        std::size_t pos = 0;
        while (pos <= source.size()) {
            std::size_t eol = source.find('\n', pos);
            std::string_view raw = source.substr(
                pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
            ++n;
            pos = eol == std::string_view::npos ? source.size() + 1 : eol + 1;
            std::size_t indent = 0;
            while (indent < raw.size() && raw[indent] == ' ') ++indent;
            std::string_view body = raw.substr(indent);
            if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
            if (body.empty() || body[0] == '#') continue;
            lines.push_back({n, static_cast<int>(indent / 2), std::string(body)});
        }
    }

    EnvironmentDefinition def;
    ScreenState* current_screen = nullptr;
    std::vector<A11yNode*> node_stack;  // stack of open nodes per indent level

    auto property = [&](const Line& line, const std::string& key) -> std::string {
        return line.text.substr(key.size() + 1);  // after "key:" prefix
    };

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const Line& line = lines[li];
        if (line.indent == 0) {
            current_screen = nullptr;
            node_stack.clear();
        }
        if (line.text.rfind("env ", 0) == 0) {
            auto toks = tokenize(source_name, line.number, line.text);
            if (toks.size() != 3) fail(source_name, line.number, "expected: env <id> <platform>");
            def.env_id = toks[1];
            try {
                def.platform = platform_from_string(toks[2]);
            } catch (const Error&) {
                fail(source_name, line.number, "platform must be mobile or web");
            }
        } else if (line.text.rfind("app_name:", 0) == 0) {
            def.app_name = property(line, "app_name:");
        } else if (line.text.rfind("website_name:", 0) == 0) {
            def.website_name = property(line, "website_name:");
        } else if (line.text.rfind("website_intro:", 0) == 0) {
            def.website_intro = property(line, "website_intro:");
        } else if (line.text.rfind("task_examples:", 0) == 0) {
            def.task_examples = property(line, "task_examples:");
        } else if (line.text.rfind("screen ", 0) == 0) {
            auto toks = tokenize(source_name, line.number, line.text);
            if (toks.size() != 2) fail(source_name, line.number, "expected: screen <id>");
            def.screens.push_back(ScreenState{toks[1], A11yNode{}, {}});
            current_screen = &def.screens.back();
            node_stack.clear();
        } else if (line.text.rfind("node ", 0) == 0 || line.text.rfind("node\t", 0) == 0) {
            if (current_screen == nullptr)
                fail(source_name, line.number, "node outside a screen block");
            A11yNode node = parse_node_line(source_name, line);
            int depth = line.indent;  // 1 = root of the screen
            if (depth < 1) fail(source_name, line.number, "screen nodes must be indented");
            if (depth == 1) {
                if (!current_screen->a11y_root.node_id.empty())
                    fail(source_name, line.number, "screen has more than one root node");
                current_screen->a11y_root = std::move(node);
                node_stack = {&current_screen->a11y_root};
            } else {
                if (static_cast<int>(node_stack.size()) < depth - 1)
                    fail(source_name, line.number, "node indented too deep");
                node_stack.resize(static_cast<std::size_t>(depth - 1));
                A11yNode* parent = node_stack.back();
                parent->children.push_back(std::move(node));
                node_stack.push_back(&parent->children.back());
            }
        } else if (line.text.rfind("initial ", 0) == 0) {
            auto toks = tokenize(source_name, line.number, line.text);
            if (toks.size() != 2) fail(source_name, line.number, "expected: initial <screen>");
            def.initial_screen = toks[1];
        } else if (line.text.rfind("on ", 0) == 0) {
            def.transitions.push_back(parse_transition_line(source_name, line));
        } else {
            fail(source_name, line.number, "unrecognized directive \"" + line.text + "\"");
        }
    }
    for (auto& s : def.screens) {
        if (s.a11y_root.node_id.empty())
            throw Error(Errc::validation_error, "screen \"" + s.screen_id + "\" has no nodes");
        seed_field_values(s, s.a11y_root);
    }
    validate_definition(def);
    return def;
}

EnvironmentDefinition load_environment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open environment file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_environment(ss.str(), path);
}

Environment::Environment(const EnvironmentDefinition& def) : def_(&def) {
    current_ = *def.screen(def.initial_screen);
}

ScreenState Environment::step(const Action& action) {
    validate_action(action);
    if (action.platform != def_->platform || !kind_in_platform(action.kind, def_->platform))
        throw Error(Errc::invalid_kind, std::string(to_string(action.kind)) +
                                            " is not valid on a " + to_string(def_->platform) +
                                            " environment");
    std::string target = action.target;
    if (target.empty() && action.coordinates) {
        if (const A11yNode* hit =
                node_at(current_, action.coordinates->first, action.coordinates->second))
            target = hit->node_id;
    }
    const A11yNode* node = nullptr;
    if (!target.empty()) {
        node = find_node(current_, target);
        if (node == nullptr)
            throw Error(Errc::invalid_target,
                        "node \"" + target + "\" not on screen " + current_.screen_id);
    }
    if (action.kind == ActionKind::type && node != nullptr && !node->editable)
        throw Error(Errc::non_editable_type, "node \"" + target + "\" is not editable");

    // Implicit effect: typing always lands in the field, transition or not.
    if (action.kind == ActionKind::type && node != nullptr)
        current_.field_values[target] = action.text;

    if (const TransitionRule* rule = def_->match(current_.screen_id, action.kind, target)) {
        switch (rule->effect.kind) {
            case TransitionEffect::Kind::goto_screen:
                current_ = *def_->screen(rule->effect.arg);
                break;
            case TransitionEffect::Kind::set_field:
                current_.field_values[rule->effect.arg] = action.text;
                break;
            case TransitionEffect::Kind::no_op:
                break;
        }
    }
    ++step_count_;
    return current_;
}

Environment reset(const EnvironmentDefinition& def) {
    return Environment(def);
}

const ScreenState& observe(const Environment& env) {
    return env.current();
}

ScreenState step(Environment& env, const Action& action) {
    return env.step(action);
}

}  // namespace guiforge
