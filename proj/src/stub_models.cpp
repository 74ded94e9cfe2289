#include "guiforge/stub_models.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"

namespace guiforge {

using nlohmann::json;

namespace {

std::string request_text(const ChatRequest& request) {
    std::string out;
    for (const auto& msg : request.messages)
        for (const auto& part : msg.parts)
            if (part.type == MessagePart::Type::text) out += part.text;
    return out;
}

std::vector<std::string> request_renderings(const ChatRequest& request) {
    std::vector<std::string> out;
    for (const auto& msg : request.messages)
        for (const auto& part : msg.parts)
            if (part.type == MessagePart::Type::image_token) out.push_back(part.rendering);
    return out;
}

std::string line_value(std::string_view text, std::string_view prefix) {
    std::size_t pos = text.find(prefix);
    if (pos == std::string_view::npos) return {};
    std::size_t start = pos + prefix.size();
    std::size_t eol = text.find('\n', start);
    std::string_view v = text.substr(start, eol == std::string_view::npos ? eol : eol - start);
    std::size_t b = v.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = v.find_last_not_of(" \t\r");
    return std::string(v.substr(b, e - b + 1));
}

std::string between(std::string_view text, std::string_view from, std::string_view to) {
    std::size_t a = text.find(from);
    if (a == std::string_view::npos) return {};
    a += from.size();
    std::size_t b = to.empty() ? std::string_view::npos : text.find(to, a);
    return std::string(text.substr(a, b == std::string_view::npos ? b : b - a));
}

struct RenderedNode {
    std::string id;
    std::string role;
    std::string label;
    bool interactive = false;
    bool editable = false;
    std::string value;
    bool interacted = false;
};

// Reads lines of the screen rendering: `- id (role) "label" @(...) ...`.
std::vector<RenderedNode> parse_rendering(std::string_view rendering) {
    std::vector<RenderedNode> out;
    std::istringstream ss{std::string(rendering)};
    std::string line;
    while (std::getline(ss, line)) {
        std::size_t dash = line.find("- ");
        if (dash == std::string::npos) continue;
        RenderedNode node;
        std::size_t pos = dash + 2;
        std::size_t sp = line.find(' ', pos);
        if (sp == std::string::npos) continue;
        node.id = line.substr(pos, sp - pos);
        std::size_t ro = line.find('(', sp);
        std::size_t rc = line.find(')', ro);
        if (ro == std::string::npos || rc == std::string::npos) continue;
        node.role = line.substr(ro + 1, rc - ro - 1);
        std::size_t q1 = line.find('"', rc);
        std::size_t at = line.find("@(", rc);
        if (q1 != std::string::npos && (at == std::string::npos || q1 < at)) {
            std::size_t q2 = line.find('"', q1 + 1);
            if (q2 != std::string::npos) node.label = line.substr(q1 + 1, q2 - q1 - 1);
        }
        node.interactive = line.find(" interactive") != std::string::npos;
        node.editable = line.find(" editable") != std::string::npos;
        std::size_t vp = line.find("value=\"");
        if (vp != std::string::npos) {
            std::size_t vq = line.find('"', vp + 7);
            if (vq != std::string::npos) node.value = line.substr(vp + 7, vq - vp - 7);
        }
        node.interacted = line.find("[interacted]") != std::string::npos;
        out.push_back(std::move(node));
    }
    return out;
}

std::string screen_id_of(std::string_view rendering) {
    return line_value(rendering, "[screen]");
}

std::string display_name(const RenderedNode& node) {
    return node.label.empty() ? node.id : node.label;
}

std::string lexicon_text_for(const RenderedNode& field) {
    std::string key = field.label + " " + field.id;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto has = [&](const char* w) { return key.find(w) != std::string::npos; };
    if (has("name") || has("contact")) return "Alex Chen";
    if (has("search") || has("query") || has("filter")) return "meeting notes";
    if (has("phone") || has("tel")) return "555-0147";
    if (has("mail")) return "alex@example.com";
    if (has("title") || has("subject")) return "Trip Plan";
    if (has("body") || has("content") || has("note") || has("message"))
        return "Draft agenda for Monday.";
    return "hello world";
}

std::string json_escape(const std::string& s) {
    return json(s).dump();  // includes surrounding quotes
}

}  // namespace

std::string stub_association_response(const ChatRequest& request) {
    const std::string text = request_text(request);
    auto renderings = request_renderings(request);
    std::string current_action = line_value(text, "Current Action:");
    std::string surface = line_value(text, "App Name:");
    if (surface.empty()) surface = line_value(text, "Website Name:");

    std::vector<RenderedNode> pre_nodes, post_nodes;
    std::string pre_screen, post_screen;
    if (!renderings.empty()) {
        pre_nodes = parse_rendering(renderings[0]);
        pre_screen = screen_id_of(renderings[0]);
    }
    if (renderings.size() > 1) {
        post_nodes = parse_rendering(renderings[1]);
        post_screen = screen_id_of(renderings[1]);
    }
    const RenderedNode* focus = nullptr;
    for (const auto& n : pre_nodes)
        if (n.interacted) focus = &n;
    if (focus == nullptr)
        for (const auto& n : pre_nodes)
            if (!n.label.empty()) {
                focus = &n;
                break;
            }
    std::string label = focus ? display_name(*focus) : pre_screen;
    std::string role = focus ? focus->role : "screen";

    std::string typed;
    std::size_t q = current_action.find('"');
    if (q != std::string::npos) {
        std::size_t q2 = current_action.rfind('"');
        if (q2 > q) typed = current_action.substr(q + 1, q2 - q - 1);
    }

    std::string sub, high;
    if (current_action.rfind("TYPE", 0) == 0 || current_action.rfind("type ", 0) == 0) {
        if (typed.empty()) typed = "sample text";
        sub = "Type '" + typed + "' into the '" + label + "' field.";
        high = "In " + surface + ", enter '" + typed + "' into the '" + label +
               "' field and confirm the entry is saved.";
    } else if (current_action.rfind("SCROLL", 0) == 0 ||
               current_action.rfind("scroll", 0) == 0) {
        sub = "Scroll to browse more of the '" + label + "' area.";
        high = "In " + surface + ", scroll through '" + label + "' and find the last entry.";
    } else if (current_action.rfind("PRESS_BACK", 0) == 0 ||
               current_action.rfind("go_back", 0) == 0) {
        sub = "Press back to return to the previous screen.";
        high = "In " + surface + ", check '" + label + "' and then return to where you started.";
    } else if (current_action.rfind("LONG_PRESS", 0) == 0) {
        sub = "Long press the '" + label + "' " + role + " to bring up more options.";
        high = "In " + surface + ", use the options of '" + label + "' to tidy up the list.";
    } else {
        sub = "Click the '" + label + "' " + role + " to open it.";
        high = "In " + surface + ", open '" + label + "' and complete the update it offers.";
    }
    std::string analysis = "The screen changes from '" + pre_screen + "' to '" + post_screen +
                           "' after this action. From there, the visible elements can be "
                           "inspected or edited to carry the task further.";

    return std::string("Sure, here is the dictionary:\n{\n  \"Sub-Instruction\": ") +
           json_escape(sub) + ",\n  \"Analysis\": " + json_escape(analysis) +
           ",\n  \"High-Level-Instruction\": " + json_escape(high) + "\n}";
}

std::string stub_judge_response(const ChatRequest& request) {
    int score = 1 + static_cast<int>(digest_u64(canonical_request_bytes(request)) % 5);
    return "Reason: Deterministic offline assessment of the recorded steps and final states.\n"
           "Score: " +
           std::to_string(score);
}

namespace {

struct ExecutorView {
    std::string history;
    std::vector<RenderedNode> nodes;
};

ExecutorView executor_view(const std::string& text, std::string_view history_label,
                           std::string_view tree_label, std::string_view tree_end) {
    ExecutorView view;
    view.history = between(text, history_label, tree_label);
    view.nodes = parse_rendering(between(text, tree_label, tree_end));
    return view;
}

int history_steps(const std::string& history) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = history.find("Step ", pos)) != std::string::npos) {
        ++n;
        pos += 5;
    }
    return n;
}

// Policy shared by both platforms: fill the first empty editable field the
// history has not touched, otherwise click the first untouched interactive
// element, otherwise finish.
const RenderedNode* pick_field(const ExecutorView& view) {
    for (const auto& n : view.nodes)
        if (n.editable && n.value.empty() &&
            view.history.find("[" + n.id + "]") == std::string::npos &&
            view.history.find("\"" + n.id + "\"") == std::string::npos)
            return &n;
    return nullptr;
}

const RenderedNode* pick_click(const ExecutorView& view) {
    for (const auto& n : view.nodes)
        if (n.interactive && !n.editable &&
            view.history.find("[" + n.id + "]") == std::string::npos &&
            view.history.find("\"" + n.id + "\"") == std::string::npos)
            return &n;
    return nullptr;
}

}  // namespace

std::string stub_executor_mobile_response(const ChatRequest& request) {
    const std::string text = request_text(request);
    ExecutorView view = executor_view(text, "Action history:", "Accessibility tree:",
                                      "\n\nPlease generate");
    const int steps = history_steps(view.history);
    if (steps >= 5) {
        return "thoughts:\nThe task appears complete, so I will finish here.\nactions:\n"
               "{\"action_type\": \"terminate\"}";
    }
    if (const RenderedNode* field = pick_field(view)) {
        std::string value = lexicon_text_for(*field);
        return "thoughts:\nI will type '" + value + "' into the '" + display_name(*field) +
               "' field as the task requires.\nactions:\n{\"action_type\": \"type\", \"target\": " +
               json_escape(field->id) + ", \"text\": " + json_escape(value) + "}";
    }
    if (const RenderedNode* node = pick_click(view)) {
        return "thoughts:\nI will click the '" + display_name(*node) + "' " + node->role +
               " to make progress on the task.\nactions:\n{\"action_type\": \"click\", "
               "\"target\": " +
               json_escape(node->id) + "}";
    }
    return "thoughts:\nNothing else on this screen needs attention.\nactions:\n"
           "{\"action_type\": \"terminate\"}";
}

std::string stub_executor_web_response(const ChatRequest& request) {
    const std::string text = request_text(request);
    ExecutorView view = executor_view(text, "Action History:", "What's the next action?", "");
    // the tree precedes the history in the web template
    view.nodes = parse_rendering(between(text, "Accessibility tree:", "Action History:"));
    const int steps = history_steps(view.history);
    if (steps >= 5) {
        return "Let's think step-by-step. The objective has been handled. In summary, the next "
               "action I will perform is ```stop [done]```";
    }
    if (const RenderedNode* field = pick_field(view)) {
        std::string value = lexicon_text_for(*field);
        return "Let's think step-by-step. I will type '" + value + "' into the '" +
               display_name(*field) +
               "' field. In summary, the next action I will perform is ```type [" + field->id +
               "] [" + value + "] [press_enter_after=1]```";
    }
    if (const RenderedNode* node = pick_click(view)) {
        return "Let's think step-by-step. I will open the '" + display_name(*node) +
               "' element. In summary, the next action I will perform is ```click [" + node->id +
               "]```";
    }
    return "Let's think step-by-step. Nothing else is actionable. In summary, the next action I "
           "will perform is ```stop [done]```";
}

std::string stub_task_list_response(const ChatRequest& request) {
    const std::string text = request_text(request);
    auto nodes = parse_rendering(between(text, "Initial screen:", "\n\n"));
    if (nodes.empty()) nodes = parse_rendering(between(text, "initial screen of", ""));
    std::vector<const RenderedNode*> labeled;
    for (const auto& n : nodes)
        if (n.interactive && !n.label.empty()) labeled.push_back(&n);

    if (text.find("Propose one new high-level task instruction") != std::string::npos) {
        // self-instruct: one new task keyed off the demonstrations
        std::string demos = between(text, "demonstration tasks", "The initial screen");
        std::string label = labeled.empty()
                                ? "main"
                                : labeled[digest_u64(demos) % labeled.size()]->label;
        json out = json::array(
            {"Building on the examples, open '" + label + "' and review what it contains."});
        return out.dump();
    }

    int n = 3;
    try {
        std::string count = between(text, "JSON list of exactly ", " distinct");
        if (!count.empty()) n = std::stoi(count);
    } catch (const std::exception&) {
    }
    json out = json::array();
    for (int i = 0; i < n; ++i) {
        if (labeled.empty()) {
            out.push_back("Inspect the initial screen and report what it shows (variant " +
                          std::to_string(i + 1) + ").");
            continue;
        }
        const RenderedNode* node = labeled[static_cast<std::size_t>(i) % labeled.size()];
        std::string task = "Open '" + node->label + "' and note what it shows.";
        int variant = i / static_cast<int>(labeled.size());
        if (variant > 0) task += " Then repeat the check (pass " + std::to_string(variant + 1) + ").";
        out.push_back(task);
    }
    return out.dump();
}

std::string stub_respond(const ChatRequest& request) {
    const std::string text = request_text(request);
    if (text.find("RETURN ME THE DICTIONARY I ASKED FOR") != std::string::npos)
        return stub_association_response(request);
    if (text.find("Rate the trajectory on a scale of 1 to 5") != std::string::npos)
        return stub_judge_response(request);
    if (text.find("Candidate Actions:") != std::string::npos)
        return stub_executor_mobile_response(request);
    if (text.find("What's the next action?") != std::string::npos)
        return stub_executor_web_response(request);
    if (text.find("Return a JSON list") != std::string::npos)
        return stub_task_list_response(request);
    if (text.find("Reply with the field text only.") != std::string::npos) {
        auto nodes = parse_rendering(between(text, "Current screen:", "\nReply with"));
        for (const auto& n : nodes)
            if (n.interacted) return lexicon_text_for(n);
        return "hello world";
    }
    throw Error(Errc::unmapped_mock_request,
                "offline responder does not recognize this prompt");
}

Annotator make_stub_annotator(const std::string& model_name) {
    return Annotator(model_name,
                     std::make_unique<CallbackTransport>(stub_respond, "stub"));
}

}  // namespace guiforge
