#include "guiforge/explorer.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"
#include "guiforge/model_client.hpp"

namespace guiforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string Triplet::ref() const {
    return "t-" + short_digest(pre_hash() + "|" + canonical_action(action) + "|" + post_hash());
}

namespace {

bool label_matches(const A11yNode& field, std::initializer_list<const char*> words) {
    std::string haystack = field.label + " " + field.node_id + " " + field.role;
    std::transform(haystack.begin(), haystack.end(), haystack.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* w : words)
        if (haystack.find(w) != std::string::npos) return true;
    return false;
}

const std::vector<std::string>& lexicon_for(const A11yNode& field) {
    static const std::vector<std::string> names = {"Alex Chen", "Dana Flores", "Sam Patel",
                                                   "Robin Diaz"};
    static const std::vector<std::string> queries = {"meeting notes", "coffee shops",
                                                     "project roadmap", "weekly report"};
    static const std::vector<std::string> phones = {"555-0147", "555-0199", "555-0123"};
    static const std::vector<std::string> emails = {"alex@example.com", "dana@example.com"};
    static const std::vector<std::string> titles = {"Quarterly Report", "Trip Plan",
                                                    "Reading List"};
    static const std::vector<std::string> urls = {"https://example.com/docs",
                                                  "https://example.com/blog"};
    static const std::vector<std::string> bodies = {"Remember to water the plants.",
                                                    "Draft agenda for Monday."};
    static const std::vector<std::string> fallback = {"hello world", "sample text"};
    if (label_matches(field, {"name", "contact"})) return names;
    if (label_matches(field, {"search", "query", "find", "filter"})) return queries;
    if (label_matches(field, {"phone", "mobile", "tel"})) return phones;
    if (label_matches(field, {"email", "mail"})) return emails;
    if (label_matches(field, {"title", "subject"})) return titles;
    if (label_matches(field, {"url", "link", "address"})) return urls;
    if (label_matches(field, {"body", "content", "note", "message", "comment"})) return bodies;
    return fallback;
}

}  // namespace

std::string LexiconTextProvider::text_for(const EnvironmentDefinition& def,
                                          const ScreenState& screen, const A11yNode& field) {
    const auto& table = lexicon_for(field);
    std::string key = std::to_string(seed_) + "|" + def.env_id + "|" + screen.screen_id + "|" +
                      field.node_id;
    return table[digest_u64(key) % table.size()];
}

std::string AnnotatorTextProvider::text_for(const EnvironmentDefinition& def,
                                            const ScreenState& screen, const A11yNode& field) {
    std::string prompt =
        "Provide realistic text content for the '" +
        (field.label.empty() ? field.node_id : field.label) + "' field (role: " + field.role +
        ") on the current screen of " + def.surface_name() + ".\n\nCurrent screen:\n" +
        render_screen(screen, field.node_id) + "\nReply with the field text only.";
    try {
        std::string text = annotator_->ask(prompt);
        std::size_t eol = text.find('\n');
        if (eol != std::string::npos) text = text.substr(0, eol);
        std::size_t b = text.find_first_not_of(" \t\r\"");
        if (b == std::string::npos) return fallback_.text_for(def, screen, field);
        std::size_t e = text.find_last_not_of(" \t\r\"");
        return text.substr(b, e - b + 1);
    } catch (const Error&) {
        return fallback_.text_for(def, screen, field);
    }
}

namespace {

struct Candidate {
    Action action;
    std::string highlight;
};

// Scroll targets: containers that plausibly scroll.
bool scrollable(const A11yNode& node) {
    return node.role == "list" || node.role == "scrollview" || node.role == "feed" ||
           node.role == "page";
}

void collect_scrollables(const A11yNode& node, std::vector<const A11yNode*>& out) {
    if (scrollable(node)) out.push_back(&node);
    for (const auto& c : node.children) collect_scrollables(c, out);
}

std::vector<Candidate> candidate_actions(const EnvironmentDefinition& def,
                                         const ScreenState& screen,
                                         const ExploreOptions& options,
                                         TextProvider& text_provider) {
    std::vector<Candidate> out;
    const Platform p = def.platform;
    for (const A11yNode* node : list_interactive(screen)) {
        Action click{p, ActionKind::click, node->node_id};
        out.push_back({click, node->node_id});
        if (node->editable) {
            Action typing{p, ActionKind::type, node->node_id};
            typing.text = text_provider.text_for(def, screen, *node);
            out.push_back({typing, node->node_id});
        }
        if (p == Platform::mobile && options.include_long_press) {
            Action lp{p, ActionKind::long_press, node->node_id};
            out.push_back({lp, node->node_id});
        }
    }
    std::vector<const A11yNode*> containers;
    collect_scrollables(screen.a11y_root, containers);
    const std::vector<std::string> directions =
        p == Platform::mobile ? std::vector<std::string>{"up", "down", "left", "right"}
                              : std::vector<std::string>{"up", "down"};
    for (const A11yNode* c : containers) {
        for (const auto& d : directions) {
            Action s{p, ActionKind::scroll, c->node_id};
            s.direction = d;
            out.push_back({s, c->node_id});
        }
    }
    if (options.include_back) {
        Action back{p, p == Platform::mobile ? ActionKind::navigate_back : ActionKind::go_back};
        out.push_back({back, ""});
    }
    return out;
}

}  // namespace

std::vector<Triplet> explore(const EnvironmentDefinition& def, const ExplorationBudget& budget,
                             TextProvider& text_provider, const ExploreOptions& options) {
    if (budget.max_triplets < 0 || budget.max_depth < 0 || budget.max_visits_per_screen < 0)
        throw Error(Errc::validation_error, "exploration budget limits must be >= 0");

    std::vector<Triplet> out;
    std::set<std::string> seen;  // (pre_hash | canonical | post_hash)

    struct QueueEntry {
        std::string screen_id;
        std::vector<Action> path;  // replayed from reset to reach the screen
    };
    std::deque<QueueEntry> queue;
    std::map<std::string, int> scheduled;

    queue.push_back({def.initial_screen, {}});
    scheduled[def.initial_screen] = 1;

    while (!queue.empty()) {
        QueueEntry entry = std::move(queue.front());
        queue.pop_front();
        const int depth = static_cast<int>(entry.path.size());

        Environment base = reset(def);
        for (const Action& a : entry.path) base.step(a);
        const ScreenState pre = observe(base);

        for (const Candidate& cand : candidate_actions(def, pre, options, text_provider)) {
            if (static_cast<int>(out.size()) >= budget.max_triplets) return out;
            Environment env = reset(def);
            for (const Action& a : entry.path) env.step(a);
            ScreenState post = env.step(cand.action);

            Triplet t{pre, cand.action, post, def.env_id, depth, cand.highlight};
            std::string key = t.pre_hash() + "|" + canonical_action(cand.action) + "|" +
                              t.post_hash();
            if (seen.insert(key).second) out.push_back(std::move(t));

            if (post.screen_id != pre.screen_id && depth + 1 <= budget.max_depth &&
                scheduled[post.screen_id] < budget.max_visits_per_screen) {
                ++scheduled[post.screen_id];
                std::vector<Action> path = entry.path;
                path.push_back(cand.action);
                queue.push_back({post.screen_id, std::move(path)});
            }
        }
    }
    return out;
}

std::vector<Triplet> dedupe_triplets(const std::vector<Triplet>& triplets) {
    std::vector<Triplet> out;
    std::set<std::string> seen;
    for (const auto& t : triplets) {
        std::string key = t.pre_hash() + "|" + canonical_action(t.action) + "|" + t.post_hash();
        if (seen.insert(key).second) out.push_back(t);
    }
    return out;
}

void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets) {
    for (const auto& t : triplets) {
        ordered_json rec;
        rec["env_id"] = t.env_id;
        rec["pre_hash"] = t.pre_hash();
        rec["action"] = canonical_action(t.action);
        rec["post_hash"] = t.post_hash();
        rec["depth"] = t.depth;
        rec["highlight"] = t.highlight;
        rec["pre"] = json::parse(canonical_screen_bytes(t.pre));
        rec["post"] = json::parse(canonical_screen_bytes(t.post));
        rec["platform"] = to_string(t.action.platform);
        out << rec.dump() << "\n";
    }
}

void write_triplets_file(const std::string& path, const std::vector<Triplet>& triplets) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    write_triplets(out, triplets);
}

std::vector<Triplet> read_triplets(std::istream& in) {
    std::vector<Triplet> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "triplet store line " + std::to_string(lineno));
        Triplet t;
        t.env_id = rec.at("env_id").get<std::string>();
        t.depth = rec.at("depth").get<int>();
        t.highlight = rec.at("highlight").get<std::string>();
        t.pre = screen_from_json(rec.at("pre"));
        t.post = screen_from_json(rec.at("post"));
        Platform p = platform_from_string(rec.at("platform").get<std::string>());
        t.action = parse_canonical_action(rec.at("action").get<std::string>(), p);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Triplet> read_triplets_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_triplets(in);
}

}  // namespace guiforge
