#include "guiforge/a11y.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"

namespace guiforge {

using nlohmann::json;

std::string screenshot_token(const ScreenState& state) {
    std::string material = "screen\n" + state.screen_id + "\n";
    for (const auto& [k, v] : state.field_values) material += k + "=" + v + "\n";
    return "<screenshot:" + state.screen_id + "#" + short_digest(material) + ">";
}

nlohmann::json node_to_json(const A11yNode& node) {
    json j;
    j["bounds"] = {node.bounds.x0, node.bounds.y0, node.bounds.x1, node.bounds.y1};
    j["children"] = json::array();
    for (const auto& c : node.children) j["children"].push_back(node_to_json(c));
    j["editable"] = node.editable;
    j["interactive"] = node.interactive;
    j["label"] = node.label;
    j["node_id"] = node.node_id;
    j["role"] = node.role;
    j["value"] = node.value;
    return j;
}

A11yNode node_from_json(const json& j) {
    A11yNode n;
    n.node_id = j.at("node_id").get<std::string>();
    n.role = j.at("role").get<std::string>();
    n.label = j.at("label").get<std::string>();
    const auto& b = j.at("bounds");
    n.bounds = Rect{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                    b.at(3).get<double>()};
    n.interactive = j.at("interactive").get<bool>();
    n.editable = j.at("editable").get<bool>();
    n.value = j.at("value").get<std::string>();
    for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
    return n;
}

nlohmann::json screen_to_json(const ScreenState& state) {
    json j;
    j["a11y"] = node_to_json(state.a11y_root);
    j["field_values"] = state.field_values;
    j["screen_id"] = state.screen_id;
    return j;
}

ScreenState screen_from_json(const json& j) {
    ScreenState s;
    s.screen_id = j.at("screen_id").get<std::string>();
    s.a11y_root = node_from_json(j.at("a11y"));
    s.field_values = j.at("field_values").get<std::map<std::string, std::string>>();
    return s;
}

std::string canonical_screen_bytes(const ScreenState& state) {
    // nlohmann::json objects are std::map-backed, so dump() emits sorted keys.
    return screen_to_json(state).dump(2) + "\n";
}

std::string state_hash(const ScreenState& state) {
    return sha256_hex(canonical_screen_bytes(state));
}

ScreenState parse_screen_bytes(std::string_view bytes) {
    json j = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error(Errc::parse_error, "malformed canonical screen bytes");
    return screen_from_json(j);
}

namespace {

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

void render_node(const ScreenState& state, const A11yNode& node, int depth,
                 std::string_view highlight, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "- " + node.node_id + " (" + node.role + ")";
    if (!node.label.empty()) out += " \"" + node.label + "\"";
    out += " @(" + fmt_coord(node.bounds.x0) + "," + fmt_coord(node.bounds.y0) + "," +
           fmt_coord(node.bounds.x1) + "," + fmt_coord(node.bounds.y1) + ")";
    if (node.interactive) out += " interactive";
    if (node.editable) out += " editable value=\"" + field_text(state, node) + "\"";
    if (!highlight.empty() && node.node_id == highlight) out += " [interacted]";
    out += "\n";
    for (const auto& c : node.children) render_node(state, c, depth + 1, highlight, out);
}

void collect_interactive(const A11yNode& node, std::vector<const A11yNode*>& out) {
    if (node.interactive) out.push_back(&node);
    for (const auto& c : node.children) collect_interactive(c, out);
}

const A11yNode* find_in(const A11yNode& node, std::string_view node_id) {
    if (node.node_id == node_id) return &node;
    for (const auto& c : node.children) {
        if (const A11yNode* hit = find_in(c, node_id)) return hit;
    }
    return nullptr;
}

void deepest_at(const A11yNode& node, double x, double y, int depth, int& best_depth,
                const A11yNode*& best) {
    if (!node.bounds.contains(x, y)) return;
    if (depth > best_depth) {  // first in document order wins at equal depth
        best_depth = depth;
        best = &node;
    }
    for (const auto& c : node.children) deepest_at(c, x, y, depth + 1, best_depth, best);
}

void check_node(const ScreenState& state, const A11yNode& node, std::set<std::string>& seen) {
    if (node.node_id.empty())
        throw Error(Errc::validation_error, "node with empty id on screen " + state.screen_id);
    if (!seen.insert(node.node_id).second)
        throw Error(Errc::validation_error,
                    "duplicate node id \"" + node.node_id + "\" on screen " + state.screen_id);
    if (!node.bounds.valid())
        throw Error(Errc::validation_error, "node \"" + node.node_id + "\" has bounds outside [0,1]");
    if (node.editable && !node.interactive)
        throw Error(Errc::validation_error, "editable node \"" + node.node_id + "\" must be interactive");
    for (const auto& c : node.children) check_node(state, c, seen);
}

}  // namespace

std::string render_screen(const ScreenState& state, std::string_view highlight_node) {
    std::string out = "[screen] " + state.screen_id + "\n";
    render_node(state, state.a11y_root, 1, highlight_node, out);
    return out;
}

std::vector<const A11yNode*> list_interactive(const ScreenState& state) {
    std::vector<const A11yNode*> out;
    collect_interactive(state.a11y_root, out);
    return out;
}

const A11yNode* find_node(const ScreenState& state, std::string_view node_id) {
    return find_in(state.a11y_root, node_id);
}

const A11yNode* node_at(const ScreenState& state, double x, double y) {
    const A11yNode* best = nullptr;
    int best_depth = -1;
    deepest_at(state.a11y_root, x, y, 0, best_depth, best);
    return best;
}

std::string field_text(const ScreenState& state, const A11yNode& node) {
    auto it = state.field_values.find(node.node_id);
    if (it != state.field_values.end()) return it->second;
    return node.value;
}

void validate_tree(const ScreenState& state) {
    std::set<std::string> seen;
    check_node(state, state.a11y_root, seen);
}

}  // namespace guiforge
