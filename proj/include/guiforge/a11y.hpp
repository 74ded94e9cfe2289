#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace guiforge {

/// Rectangle in screen-fraction units; 0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    bool valid() const {
        return 0.0 <= x0 && x0 <= x1 && x1 <= 1.0 && 0.0 <= y0 && y0 <= y1 && y1 <= 1.0;
    }
    bool operator==(const Rect&) const = default;
};

/// One element of an accessibility tree.
struct A11yNode {
    std::string node_id;
    std::string role;
    std::string label;
    Rect bounds;
    bool interactive = false;
    bool editable = false;
    std::string value;  // current text content, editable nodes only
    std::vector<A11yNode> children;

    bool operator==(const A11yNode&) const = default;
};

/// An observation: a symbolic screenshot token plus the accessibility tree.
/// field_values overrides the template `value` of editable nodes.
struct ScreenState {
    std::string screen_id;
    A11yNode a11y_root;
    std::map<std::string, std::string> field_values;

    bool operator==(const ScreenState&) const = default;
};

/// Deterministic stand-in for a pixel screenshot; pure function of
/// (screen_id, field_values).
std::string screenshot_token(const ScreenState& state);

/// Sorted-key structured text (JSON, 2-space indent, LF line endings); the
/// digest input for state hashes and the round-trippable canonical form.
std::string canonical_screen_bytes(const ScreenState& state);

/// SHA-256 hex of canonical_screen_bytes.
std::string state_hash(const ScreenState& state);

ScreenState parse_screen_bytes(std::string_view bytes);

nlohmann::json screen_to_json(const ScreenState& state);
ScreenState screen_from_json(const nlohmann::json& j);
nlohmann::json node_to_json(const A11yNode& node);
A11yNode node_from_json(const nlohmann::json& j);

/// Multi-line textual rendering of the screen (the {a11y_tree} slot in
/// prompts). When highlight_node is non-empty that node's line carries an
/// " [interacted]" mark, the red-bbox analogue.
std::string render_screen(const ScreenState& state, std::string_view highlight_node = {});

/// All interactive nodes in document (pre-order) order.
std::vector<const A11yNode*> list_interactive(const ScreenState& state);

/// Node lookup by id anywhere in the tree; nullptr when absent.
const A11yNode* find_node(const ScreenState& state, std::string_view node_id);

/// Innermost node whose bounds contain (x, y); ties broken by
/// deepest-then-document-order. nullptr when nothing contains the point.
const A11yNode* node_at(const ScreenState& state, double x, double y);

/// Current text of an editable node: field_values override, else template value.
std::string field_text(const ScreenState& state, const A11yNode& node);

/// Checks node-id uniqueness, bounds ranges and editable => interactive.
/// Throws Error(validation_error) naming the offending node.
void validate_tree(const ScreenState& state);

}  // namespace guiforge
