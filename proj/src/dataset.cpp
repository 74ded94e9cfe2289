#include "guiforge/dataset.hpp"

#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/error.hpp"
#include "guiforge/prompts.hpp"

namespace guiforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(TrainingExample::Kind kind) {
    return kind == TrainingExample::Kind::planning ? "planning" : "action";
}

const char* to_string(ExportMode mode) {
    switch (mode) {
        case ExportMode::weighted: return "weighted";
        case ExportMode::filtered: return "filtered";
        case ExportMode::uniform: return "uniform";
    }
    return "?";
}

ExportMode export_mode_from_string(std::string_view s) {
    for (ExportMode m : {ExportMode::weighted, ExportMode::filtered, ExportMode::uniform})
        if (s == to_string(m)) return m;
    throw Error(Errc::config_invalid, "unknown export mode \"" + std::string(s) + "\"");
}

namespace {

std::string planning_target(const TrajectoryStep& step, Platform platform) {
    if (platform == Platform::mobile)
        return "thoughts:\n" + step.thought + "\nactions:\n" + canonical_action(step.action);
    return step.thought + "\nIn summary, the next action I will perform is ```" +
           canonical_action(step.action) + "```";
}

std::string action_target(const TrajectoryStep& step, Platform platform) {
    if (platform == Platform::mobile) return canonical_action(step.action);
    return "```" + canonical_action(step.action) + "```";
}

}  // namespace

std::vector<TrainingExample> emit_planning_examples(const Trajectory& traj) {
    std::vector<TrainingExample> out;
    for (int j = 0; j < traj.length(); ++j) {
        const TrajectoryStep& step = traj.steps[static_cast<std::size_t>(j)];
        TrainingExample ex;
        ex.kind = TrainingExample::Kind::planning;
        ex.screenshot_token = screenshot_token(step.state);
        ex.a11y_tree = render_screen(step.state);
        ex.high_level = traj.high_level;
        ex.history = history_context(traj.steps, j);
        std::string history = ex.history.empty() ? "None" : ex.history;
        if (traj.platform == Platform::mobile) {
            ex.rendered_prompt = prompts::render(prompts::planning_training_mobile_template(),
                                                 {{"high_level_instruction", traj.high_level},
                                                  {"action_history", history},
                                                  {"a11y_tree", ex.a11y_tree}});
        } else {
            ex.rendered_prompt = prompts::render(prompts::planning_training_web_template(),
                                                 {{"instruction", traj.high_level},
                                                  {"a11y_tree", ex.a11y_tree},
                                                  {"action_history", history}});
        }
        ex.target = planning_target(step, traj.platform);
        ex.trajectory_ref = traj.trajectory_id;
        ex.step = step.index;
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<TrainingExample> emit_action_examples(const Trajectory& traj) {
    std::vector<TrainingExample> out;
    for (int j = 0; j < traj.length(); ++j) {
        const TrajectoryStep& step = traj.steps[static_cast<std::size_t>(j)];
        TrainingExample ex;
        ex.kind = TrainingExample::Kind::action;
        ex.screenshot_token = screenshot_token(step.state);
        ex.a11y_tree = render_screen(step.state);
        ex.history = history_context(traj.steps, j);
        ex.thought = step.thought;
        std::string history = ex.history.empty() ? "None" : ex.history;
        std::string thought = step.thought.empty() ? "None" : step.thought;
        if (traj.platform == Platform::mobile) {
            ex.rendered_prompt = prompts::render(prompts::action_training_mobile_template(),
                                                 {{"action_history", history},
                                                  {"a11y_tree", ex.a11y_tree},
                                                  {"low_level_thought", thought}});
        } else {
            ex.rendered_prompt = prompts::render(prompts::action_training_web_template(),
                                                 {{"a11y_tree", ex.a11y_tree},
                                                  {"low_level_thought", thought}});
        }
        ex.target = action_target(step, traj.platform);
        ex.trajectory_ref = traj.trajectory_id;
        ex.step = step.index;
        out.push_back(std::move(ex));
    }
    return out;
}

ExportResult export_dataset(const std::vector<Trajectory>& trajectories,
                            const std::vector<RewardedTrajectory>& rewards, ExportMode mode,
                            int n_samples, std::uint64_t seed, int labeler_threshold) {
    std::map<std::string, const Trajectory*> by_id;
    for (const auto& t : trajectories) by_id[t.trajectory_id] = &t;
    for (const auto& r : rewards)
        if (!by_id.count(r.trajectory_id))
            throw Error(Errc::store_inconsistency,
                        "reward references unknown trajectory " + r.trajectory_id);

    ExportResult result;
    std::vector<std::pair<const Trajectory*, long long>> selected;
    switch (mode) {
        case ExportMode::uniform:
            for (const auto& t : trajectories) selected.push_back({&t, 1});
            break;
        case ExportMode::filtered: {
            for (const auto& id : labeler_filter(rewards, labeler_threshold))
                selected.push_back({by_id.at(id), 1});
            if (selected.empty())
                result.warning = "labeler filter retained no trajectories";
            break;
        }
        case ExportMode::weighted: {
            SamplingDistribution dist = sampling_distribution(rewards);
            for (const auto& id : sample_trajectories(dist, n_samples, seed))
                ++result.multiplicity[id];
            for (const auto& r : rewards) {
                auto it = result.multiplicity.find(r.trajectory_id);
                if (it != result.multiplicity.end())
                    selected.push_back({by_id.at(r.trajectory_id), it->second});
            }
            break;
        }
    }

    for (const auto& [traj, weight] : selected) {
        for (auto& ex : emit_planning_examples(*traj)) {
            ex.weight = weight;
            result.examples.push_back(std::move(ex));
        }
        for (auto& ex : emit_action_examples(*traj)) {
            ex.weight = weight;
            result.examples.push_back(std::move(ex));
        }
    }
    return result;
}

void write_dataset(std::ostream& out, const std::vector<TrainingExample>& examples) {
    for (const auto& ex : examples) {
        ordered_json rec;
        rec["kind"] = to_string(ex.kind);
        ordered_json inputs;
        inputs["rendered_prompt"] = ex.rendered_prompt;
        inputs["screenshot_token"] = ex.screenshot_token;
        inputs["a11y_tree"] = ex.a11y_tree;
        inputs["high_level"] = ex.high_level;
        inputs["history"] = ex.history;
        inputs["thought"] = ex.thought;
        rec["inputs"] = std::move(inputs);
        rec["target"] = ex.target;
        rec["trajectory_ref"] = ex.trajectory_ref;
        rec["step"] = ex.step;
        rec["weight"] = ex.weight;
        out << rec.dump() << "\n";
    }
}

void write_dataset_file(const std::string& path, const std::vector<TrainingExample>& examples) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    write_dataset(out, examples);
}

std::vector<TrainingExample> read_dataset(std::istream& in) {
    std::vector<TrainingExample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "dataset line " + std::to_string(lineno));
        TrainingExample ex;
        std::string kind = rec.at("kind").get<std::string>();
        ex.kind = kind == "planning" ? TrainingExample::Kind::planning
                                     : TrainingExample::Kind::action;
        const auto& inputs = rec.at("inputs");
        ex.rendered_prompt = inputs.at("rendered_prompt").get<std::string>();
        ex.screenshot_token = inputs.at("screenshot_token").get<std::string>();
        ex.a11y_tree = inputs.at("a11y_tree").get<std::string>();
        ex.high_level = inputs.at("high_level").get<std::string>();
        ex.history = inputs.at("history").get<std::string>();
        ex.thought = inputs.at("thought").get<std::string>();
        ex.target = rec.at("target").get<std::string>();
        ex.trajectory_ref = rec.at("trajectory_ref").get<std::string>();
        ex.step = rec.at("step").get<int>();
        ex.weight = rec.at("weight").get<long long>();
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<TrainingExample> read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_dataset(in);
}

namespace {

std::vector<std::string> parse_task_list(const std::string& response) {
    // First JSON array of strings anywhere in the response.
    for (std::size_t start = 0; (start = response.find('[', start)) != std::string::npos;
         ++start) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < response.size(); ++i) {
            char c = response[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            if (c == '[') ++depth;
            if (c == ']' && --depth == 0) {
                json j = json::parse(response.substr(start, i - start + 1), nullptr,
                                     /*allow_exceptions=*/false);
                if (j.is_array()) {
                    std::vector<std::string> out;
                    bool all_strings = true;
                    for (const auto& item : j) {
                        if (!item.is_string()) {
                            all_strings = false;
                            break;
                        }
                        out.push_back(item.get<std::string>());
                    }
                    if (all_strings && !out.empty()) return out;
                }
                break;
            }
        }
    }
    throw Error(Errc::no_dictionary_found, "response carries no JSON task list");
}

}  // namespace

TaskSet generate_task_driven(const EnvironmentDefinition& def, Annotator& annotator, int n) {
    if (n < 0) throw Error(Errc::validation_error, "n must be >= 0");
    TaskSet set;
    if (n == 0) return set;
    const ScreenState& initial = *def.screen(def.initial_screen);
    std::string prompt = prompts::render(prompts::task_driven_template(),
                                         {{"surface_name", def.surface_name()},
                                          {"initial_screen", render_screen(initial)},
                                          {"task_examples", def.task_examples},
                                          {"n", std::to_string(n)}});
    std::vector<std::string> texts;
    try {
        std::string response = annotator.ask(
            prompt, {MessagePart{MessagePart::Type::image_token, "", screenshot_token(initial),
                                 render_screen(initial)}});
        texts = parse_task_list(response);
    } catch (const Error& e) {
        set.skips.push_back({"task-driven", e.what()});
        return set;
    }
    std::vector<std::string> entities = screen_entities(initial);
    int index = 0;
    for (const auto& text : texts) {
        if (static_cast<int>(set.tasks.size()) >= n) break;
        if (!mentions_screen_entity(text, entities)) {
            set.skips.push_back({"task-driven", "instruction references nothing on the initial screen: " + text});
            continue;
        }
        InstructionPair pair;
        pair.task_id = "td-" + def.env_id + "-" + std::to_string(++index);
        pair.provenance = Provenance::task_driven;
        pair.env_id = def.env_id;
        pair.platform = def.platform;
        pair.high_level = text;
        pair.sub_instruction = text;  // baselines carry no separate low-level step
        pair.task_kind = def.platform == Platform::mobile ? TaskKind::task_oriented
                                                          : TaskKind::navigation;
        set.tasks.push_back(std::move(pair));
    }
    return set;
}

TaskSet generate_self_instruct(const TaskSet& base, const EnvironmentDefinition& def,
                               Annotator& annotator, int n, std::uint64_t seed) {
    if (n < 0) throw Error(Errc::validation_error, "n must be >= 0");
    if (base.tasks.empty()) throw Error(Errc::base_empty, "self-instruct needs a non-empty base");
    const ScreenState& initial = *def.screen(def.initial_screen);
    std::mt19937_64 rng(seed);
    TaskSet set;
    for (int i = 0; i < n; ++i) {
        // Exactly 3 demonstrations: without replacement when the base allows,
        // with replacement for 1- or 2-task bases.
        std::vector<std::size_t> picks;
        if (base.tasks.size() >= 3) {
            std::set<std::size_t> chosen;
            while (chosen.size() < 3) {
                std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                      (std::numeric_limits<std::uint64_t>::max() %
                                       base.tasks.size());
                std::uint64_t r;
                do {
                    r = rng();
                } while (r >= limit);
                chosen.insert(static_cast<std::size_t>(r % base.tasks.size()));
            }
            picks.assign(chosen.begin(), chosen.end());
        } else {
            for (int k = 0; k < 3; ++k)
                picks.push_back(static_cast<std::size_t>(rng() % base.tasks.size()));
        }
        std::string prompt = prompts::render(
            prompts::self_instruct_template(),
            {{"surface_name", def.surface_name()},
             {"demo_1", base.tasks[picks[0]].high_level},
             {"demo_2", base.tasks[picks[1]].high_level},
             {"demo_3", base.tasks[picks[2]].high_level},
             {"initial_screen", render_screen(initial)}});
        try {
            std::string response = annotator.ask(
                prompt, {MessagePart{MessagePart::Type::image_token, "",
                                     screenshot_token(initial), render_screen(initial)}});
            std::vector<std::string> texts = parse_task_list(response);
            InstructionPair pair;
            pair.task_id = "si-" + def.env_id + "-" +
                           std::to_string(static_cast<int>(set.tasks.size()) + 1);
            pair.provenance = Provenance::self_instruct;
            pair.env_id = def.env_id;
            pair.platform = def.platform;
            pair.high_level = texts.front();
            pair.sub_instruction = texts.front();
            pair.task_kind = def.platform == Platform::mobile ? TaskKind::task_oriented
                                                              : TaskKind::navigation;
            for (std::size_t p : picks) pair.demo_ids.push_back(base.tasks[p].task_id);
            set.tasks.push_back(std::move(pair));
        } catch (const Error& e) {
            set.skips.push_back({"self-instruct", e.what()});
        }
    }
    return set;
}

}  // namespace guiforge
