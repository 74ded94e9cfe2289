#include "guiforge/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/error.hpp"
#include "guiforge/prompts.hpp"

namespace guiforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::task_oriented: return "task-oriented";
        case TaskKind::question_oriented: return "question-oriented";
        case TaskKind::info_seeking: return "info-seeking";
        case TaskKind::navigation: return "navigation";
        case TaskKind::content_modification: return "content-modification";
    }
    return "?";
}

TaskKind task_kind_from_string(std::string_view s) {
    for (TaskKind k : {TaskKind::task_oriented, TaskKind::question_oriented,
                       TaskKind::info_seeking, TaskKind::navigation,
                       TaskKind::content_modification})
        if (s == to_string(k)) return k;
    throw Error(Errc::parse_error, "unknown task kind \"" + std::string(s) + "\"");
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::reverse_synthesis: return "reverse-synthesis";
        case Provenance::task_driven: return "task-driven";
        case Provenance::self_instruct: return "self-instruct";
        case Provenance::human: return "human";
    }
    return "?";
}

Provenance provenance_from_string(std::string_view s) {
    for (Provenance p : {Provenance::reverse_synthesis, Provenance::task_driven,
                         Provenance::self_instruct, Provenance::human})
        if (s == to_string(p)) return p;
    throw Error(Errc::parse_error, "unknown provenance \"" + std::string(s) + "\"");
}

ChatRequest build_association_prompt(const Triplet& triplet, const EnvironmentDefinition& def,
                                     const std::string& model_name) {
    if (triplet.action.platform != def.platform)
        throw Error(Errc::platform_mismatch, "triplet platform does not match definition");
    std::string text;
    if (def.platform == Platform::mobile) {
        text = prompts::render(prompts::association_mobile_template(),
                               {{"current_action", prompts::format_current_action(triplet.action)},
                                {"app_name", def.app_name},
                                {"examples", def.task_examples}});
    } else {
        text = prompts::render(prompts::association_web_template(),
                               {{"current_action", prompts::format_current_action(triplet.action)},
                                {"website_name", def.website_name},
                                {"website_intro", def.website_intro},
                                {"task_examples", def.task_examples}});
    }
    MessagePart pre{MessagePart::Type::image_token, "", screenshot_token(triplet.pre),
                    render_screen(triplet.pre, triplet.highlight)};
    MessagePart post{MessagePart::Type::image_token, "", screenshot_token(triplet.post),
                     render_screen(triplet.post)};
    return make_user_request(model_name, std::move(text), {std::move(pre), std::move(post)});
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

AssociationFields parse_association_response(std::string_view text) {
    static const char* kKeys[3] = {"Sub-Instruction", "Analysis", "High-Level-Instruction"};
    // Scan balanced {...} spans; the first one that parses to an object
    // mentioning any expected key is the dictionary.
    for (std::size_t start = 0; (start = text.find('{', start)) != std::string_view::npos;
         ++start) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) {
                std::string_view span = text.substr(start, i - start + 1);
                json j = json::parse(span, nullptr, /*allow_exceptions=*/false);
                if (j.is_object()) {
                    bool relevant = false;
                    for (const char* k : kKeys) relevant |= j.contains(k);
                    if (relevant) {
                        for (const char* k : kKeys)
                            if (!j.contains(k) || !j.at(k).is_string())
                                throw Error(Errc::missing_key, std::string(k));
                        return {trim(j.at(kKeys[0]).get<std::string>()),
                                trim(j.at(kKeys[1]).get<std::string>()),
                                trim(j.at(kKeys[2]).get<std::string>())};
                    }
                }
                break;  // this span is not it; continue scanning after '{'
            }
        }
    }
    throw Error(Errc::no_dictionary_found, "response carries no association dictionary");
}

InstructionPair synthesize_low(const Triplet& triplet, Annotator& annotator,
                               const EnvironmentDefinition& def) {
    ChatRequest request = build_association_prompt(triplet, def, annotator.model_name());
    std::string response;
    AssociationFields fields;
    const int attempts = 3;
    for (int i = 1;; ++i) {
        response = annotator.chat(request);
        try {
            fields = parse_association_response(response);
            break;
        } catch (const Error&) {
            if (i >= attempts)
                throw Error(Errc::annotator_exhausted,
                            "no parseable association dictionary after " +
                                std::to_string(attempts) + " attempts");
        }
    }
    InstructionPair pair;
    pair.sub_instruction = fields.sub_instruction;
    pair.analysis = fields.analysis;
    pair.high_level = fields.high_level;  // validated by synthesize_high
    pair.source_triplet = triplet.ref();
    pair.env_id = def.env_id;
    pair.platform = def.platform;
    pair.provenance = Provenance::reverse_synthesis;
    if (pair.sub_instruction.empty())
        throw Error(Errc::validation_error, "annotator returned an empty Sub-Instruction");
    return pair;
}

std::vector<std::string> screen_entities(const ScreenState& state) {
    static const std::set<std::string> stopwords = {
        "the", "and", "for", "with", "from", "into", "this", "that", "all", "new",
        "are", "you", "your", "not", "its", "has", "have", "was", "were", "will"};
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::vector<const A11yNode*> stack = {&state.a11y_root};
    while (!stack.empty()) {
        const A11yNode* node = stack.back();
        stack.pop_back();
        std::string word;
        auto flush = [&] {
            if (word.size() >= 3 && !stopwords.count(word) && seen.insert(word).second)
                out.push_back(word);
            word.clear();
        };
        for (char c : node->label + " " + field_text(state, *node)) {
            if (std::isalnum(static_cast<unsigned char>(c)))
                word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            else
                flush();
        }
        flush();
        for (const auto& child : node->children) stack.push_back(&child);
    }
    return out;
}

bool mentions_screen_entity(std::string_view text, const std::vector<std::string>& entities) {
    std::string lower;
    lower.reserve(text.size());
    for (char c : text)
        lower.push_back(std::isalnum(static_cast<unsigned char>(c))
                            ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                            : ' ');
    std::stringstream ss(lower);
    std::set<std::string> words;
    std::string w;
    while (ss >> w) words.insert(w);
    for (const auto& e : entities)
        if (words.count(e)) return true;
    return false;
}

namespace {

bool question_like(const std::string& s) {
    if (!s.empty() && s.back() == '?') return true;
    std::string head = s.substr(0, s.find(' '));
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    static const std::set<std::string> question_words = {"what",  "which", "how",  "when",
                                                         "where", "who",   "why",  "is",
                                                         "are",   "does",  "do",   "can"};
    return question_words.count(head) > 0;
}

bool modification_like(const std::string& s) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* verb : {"add", "create", "edit", "delete", "update", "change", "write",
                             "set ", "rename", "remove", "post", "upload", "publish", "modify"})
        if (lower.find(verb) != std::string::npos) return true;
    return false;
}

TaskKind classify(const std::string& high_level, Platform platform) {
    if (platform == Platform::mobile)
        return question_like(high_level) ? TaskKind::question_oriented : TaskKind::task_oriented;
    if (question_like(high_level)) return TaskKind::info_seeking;
    if (modification_like(high_level)) return TaskKind::content_modification;
    return TaskKind::navigation;
}

}  // namespace

InstructionPair synthesize_high(InstructionPair pair, Annotator& annotator,
                                const Triplet& triplet, const EnvironmentDefinition& def) {
    (void)annotator;  // single-call design: the association response already
                      // carried the high-level text; two-call annotators can
                      // override this hook.
    if (pair.sub_instruction.empty())
        throw Error(Errc::validation_error, "pair has no sub-instruction");
    pair.high_level = trim(pair.high_level);
    if (pair.high_level.empty())
        throw Error(Errc::validation_error, "annotator returned an empty High-Level-Instruction");

    std::vector<std::string> entities = screen_entities(triplet.pre);
    for (const auto& e : screen_entities(triplet.post)) entities.push_back(e);
    if (triplet.action.kind == ActionKind::type) {
        std::string word;
        for (char c : triplet.action.text) {
            if (std::isalnum(static_cast<unsigned char>(c)))
                word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            else if (!word.empty()) {
                entities.push_back(word);
                word.clear();
            }
        }
        if (!word.empty()) entities.push_back(word);
    }
    if (!mentions_screen_entity(pair.high_level, entities))
        throw Error(Errc::specificity_failure,
                    "high-level instruction references nothing on screen: " + pair.high_level);
    pair.task_kind = classify(pair.high_level, def.platform);
    return pair;
}

TaskSet synthesize_task_set(const std::vector<Triplet>& triplets, Annotator& annotator,
                            const EnvironmentDefinition& def, int limit) {
    if (limit < 0) throw Error(Errc::validation_error, "limit must be >= 0");
    TaskSet set;
    for (const auto& triplet : triplets) {
        if (static_cast<int>(set.tasks.size()) >= limit) break;
        try {
            InstructionPair pair = synthesize_low(triplet, annotator, def);
            pair = synthesize_high(std::move(pair), annotator, triplet, def);
            pair.task_id = "rs-" + def.env_id + "-" + std::to_string(set.tasks.size() + 1);
            set.tasks.push_back(std::move(pair));
        } catch (const Error& e) {
            set.skips.push_back({triplet.ref(), e.what()});
        }
    }
    return set;
}

void write_tasks(std::ostream& out, const TaskSet& set) {
    for (const auto& t : set.tasks) {
        ordered_json rec;
        rec["task_id"] = t.task_id;
        rec["provenance"] = to_string(t.provenance);
        rec["platform"] = to_string(t.platform);
        rec["sub_instruction"] = t.sub_instruction;
        rec["analysis"] = t.analysis;
        rec["high_level"] = t.high_level;
        rec["source_triplet_ref"] = t.source_triplet;
        rec["env_id"] = t.env_id;
        rec["task_kind"] = to_string(t.task_kind);
        if (!t.demo_ids.empty()) rec["demo_ids"] = t.demo_ids;
        out << rec.dump() << "\n";
    }
    for (const auto& s : set.skips) {
        ordered_json rec;
        rec["skip"] = s.triplet_ref;
        rec["reason"] = s.reason;
        out << rec.dump() << "\n";
    }
}

void write_tasks_file(const std::string& path, const TaskSet& set) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    write_tasks(out, set);
}

TaskSet read_tasks(std::istream& in) {
    TaskSet set;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "task store line " + std::to_string(lineno));
        if (rec.contains("skip")) {
            set.skips.push_back(
                {rec.at("skip").get<std::string>(), rec.at("reason").get<std::string>()});
            continue;
        }
        InstructionPair t;
        t.task_id = rec.at("task_id").get<std::string>();
        t.provenance = provenance_from_string(rec.at("provenance").get<std::string>());
        t.platform = platform_from_string(rec.at("platform").get<std::string>());
        t.sub_instruction = rec.at("sub_instruction").get<std::string>();
        t.analysis = rec.at("analysis").get<std::string>();
        t.high_level = rec.at("high_level").get<std::string>();
        t.source_triplet = rec.at("source_triplet_ref").get<std::string>();
        t.env_id = rec.at("env_id").get<std::string>();
        t.task_kind = task_kind_from_string(rec.at("task_kind").get<std::string>());
        if (rec.contains("demo_ids"))
            t.demo_ids = rec.at("demo_ids").get<std::vector<std::string>>();
        set.tasks.push_back(std::move(t));
    }
    return set;
}

TaskSet read_tasks_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_tasks(in);
}

}  // namespace guiforge
