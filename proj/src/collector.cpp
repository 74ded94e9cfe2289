#include "guiforge/collector.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"
#include "guiforge/prompts.hpp"

namespace guiforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(TerminalReason r) {
    switch (r) {
        case TerminalReason::completed: return "completed";
        case TerminalReason::max_steps: return "max-steps";
        case TerminalReason::executor_error: return "executor-error";
        case TerminalReason::environment_error: return "environment-error";
    }
    return "?";
}

TerminalReason terminal_reason_from_string(std::string_view s) {
    for (TerminalReason r : {TerminalReason::completed, TerminalReason::max_steps,
                             TerminalReason::executor_error, TerminalReason::environment_error})
        if (s == to_string(r)) return r;
    throw Error(Errc::parse_error, "unknown terminal reason \"" + std::string(s) + "\"");
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::pair<std::string, Action> parse_mobile_output(std::string_view text) {
    // thoughts: <free text> actions: <json dictionary>, possibly multi-line.
    std::size_t tpos = text.find("thoughts:");
    std::size_t apos = text.find("actions:");
    if (apos == std::string_view::npos)
        throw Error(Errc::unparseable_action, "no actions: block in executor output");
    std::string thought;
    if (tpos != std::string_view::npos && tpos < apos)
        thought = trim(text.substr(tpos + 9, apos - tpos - 9));
    std::string_view rest = text.substr(apos + 8);
    std::size_t open = rest.find('{');
    if (open == std::string_view::npos)
        throw Error(Errc::unparseable_action, "no action dictionary in executor output");
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < rest.size(); ++i) {
        char c = rest[i];
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
            json j = json::parse(rest.substr(open, i - open + 1), nullptr,
                                 /*allow_exceptions=*/false);
            if (j.is_discarded())
                throw Error(Errc::unparseable_action, "action dictionary is not valid JSON");
            return {thought, parse_mobile_action_json(j)};
        }
    }
    throw Error(Errc::unparseable_action, "unbalanced action dictionary");
}

std::pair<std::string, Action> parse_web_output(std::string_view text) {
    static const std::string kPhrase = "In summary, the next action I will perform is";
    std::size_t phrase = text.rfind(kPhrase);
    std::string thought =
        phrase == std::string_view::npos ? "" : trim(text.substr(0, phrase));
    std::string_view rest =
        phrase == std::string_view::npos ? text : text.substr(phrase + kPhrase.size());
    std::size_t open = rest.find("```");
    if (open == std::string_view::npos)
        throw Error(Errc::unparseable_action, "no fenced action in executor output");
    std::size_t close = rest.find("```", open + 3);
    if (close == std::string_view::npos)
        throw Error(Errc::unparseable_action, "unterminated action fence");
    return {thought, parse_web_action(rest.substr(open + 3, close - open - 3))};
}

}  // namespace

std::pair<std::string, Action> parse_executor_output(std::string_view text, Platform platform) {
    return platform == Platform::mobile ? parse_mobile_output(text) : parse_web_output(text);
}

std::string history_context(const std::vector<TrajectoryStep>& steps, int upto, int window) {
    int end = std::min<int>(upto, static_cast<int>(steps.size()));
    int begin = std::max(0, end - window);
    std::string out;
    for (int i = begin; i < end; ++i) {
        out += "Step " + std::to_string(steps[static_cast<std::size_t>(i)].index) + ": " +
               steps[static_cast<std::size_t>(i)].thought + " -> " +
               canonical_action(steps[static_cast<std::size_t>(i)].action) + "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

std::string build_executor_prompt(const EnvironmentDefinition& def, const InstructionPair& task,
                                  const std::vector<TrajectoryStep>& steps,
                                  const ScreenState& current) {
    std::string history = history_context(steps, static_cast<int>(steps.size()));
    if (history.empty()) history = "None";
    if (def.platform == Platform::mobile) {
        return prompts::render(prompts::executor_mobile_template(),
                               {{"high_level_instruction", task.high_level},
                                {"action_history", history},
                                {"a11y_tree", render_screen(current)}});
    }
    return prompts::render(prompts::planning_training_web_template(),
                           {{"instruction", task.high_level},
                            {"a11y_tree", render_screen(current)},
                            {"action_history", history}});
}

Trajectory collect_trajectory(const EnvironmentDefinition& def, const InstructionPair& task,
                              Annotator& executor, int max_steps) {
    if (max_steps < 1) throw Error(Errc::validation_error, "max_steps must be >= 1");
    Trajectory traj;
    traj.task_id = task.task_id;
    traj.high_level = task.high_level;
    traj.env_id = def.env_id;
    traj.platform = def.platform;
    traj.terminal_reason = TerminalReason::max_steps;

    Environment env = reset(def);
    for (int j = 1; j <= max_steps; ++j) {
        ScreenState state = observe(env);
        std::string prompt = build_executor_prompt(def, task, traj.steps, state);

        std::string raw;
        std::string thought;
        Action action;
        std::vector<std::string> discarded;
        bool parsed = false;
        std::string ask = prompt;
        for (int attempt = 0; attempt < 3; ++attempt) {
            try {
                raw = executor.ask(ask, {MessagePart{MessagePart::Type::image_token, "",
                                                     screenshot_token(state),
                                                     render_screen(state)}});
            } catch (const Error&) {
                traj.terminal_reason = TerminalReason::executor_error;
                traj.trajectory_id = "g-" + short_digest(task.task_id + "|" + task.high_level);
                return traj;
            }
            try {
                std::tie(thought, action) = parse_executor_output(raw, def.platform);
                parsed = true;
                break;
            } catch (const Error&) {
                discarded.push_back(raw);
                ask = prompt +
                      "\n\nYour previous reply could not be parsed. Reply again using exactly "
                      "the required output format.";
            }
        }
        if (!parsed) {
            traj.terminal_reason = TerminalReason::executor_error;
            break;
        }

        TrajectoryStep step;
        step.index = j;
        step.state = state;
        step.thought = thought;
        step.action = action;
        step.raw_model_output = raw;
        step.discarded_outputs = std::move(discarded);

        bool is_terminal = action.kind == ActionKind::terminate || action.kind == ActionKind::stop;
        if (!is_terminal) {
            try {
                env.step(action);
            } catch (const Error& e) {
                if (e.code() == Errc::invalid_kind) {
                    traj.steps.push_back(std::move(step));
                    traj.terminal_reason = TerminalReason::environment_error;
                    break;
                }
                // invalid target / non-editable type: a failed action is a
                // recorded no-op, like an inert click on a real GUI
            }
        }
        traj.steps.push_back(std::move(step));
        if (is_terminal) {
            traj.terminal_reason = TerminalReason::completed;
            break;
        }
    }
    traj.trajectory_id = "g-" + short_digest(task.task_id + "|" + task.high_level);
    return traj;
}

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    for (const auto& t : trajectories) {
        ordered_json rec;
        rec["trajectory_id"] = t.trajectory_id;
        rec["task_id"] = t.task_id;
        rec["env_id"] = t.env_id;
        rec["platform"] = to_string(t.platform);
        rec["high_level"] = t.high_level;
        rec["terminal_reason"] = to_string(t.terminal_reason);
        rec["steps"] = ordered_json::array();
        for (const auto& s : t.steps) {
            ordered_json js;
            js["index"] = s.index;
            js["state"] = json::parse(canonical_screen_bytes(s.state));
            js["thought"] = s.thought;
            js["action"] = canonical_action(s.action);
            js["raw_model_output"] = s.raw_model_output;
            js["discarded_outputs"] = s.discarded_outputs;
            rec["steps"].push_back(std::move(js));
        }
        out << rec.dump() << "\n";
    }
}

void write_trajectories_file(const std::string& path,
                             const std::vector<Trajectory>& trajectories) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    write_trajectories(out, trajectories);
}

void write_trajectory_index(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    for (const auto& t : trajectories) {
        ordered_json rec;
        rec["trajectory_id"] = t.trajectory_id;
        rec["task_id"] = t.task_id;
        rec["steps"] = t.length();
        rec["terminal_reason"] = to_string(t.terminal_reason);
        out << rec.dump() << "\n";
    }
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
    std::vector<Trajectory> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "trajectory store line " + std::to_string(lineno));
        Trajectory t;
        t.trajectory_id = rec.at("trajectory_id").get<std::string>();
        t.task_id = rec.at("task_id").get<std::string>();
        t.env_id = rec.at("env_id").get<std::string>();
        t.platform = platform_from_string(rec.at("platform").get<std::string>());
        t.high_level = rec.at("high_level").get<std::string>();
        t.terminal_reason =
            terminal_reason_from_string(rec.at("terminal_reason").get<std::string>());
        for (const auto& js : rec.at("steps")) {
            TrajectoryStep s;
            s.index = js.at("index").get<int>();
            s.state = screen_from_json(js.at("state"));
            s.thought = js.at("thought").get<std::string>();
            s.action = parse_canonical_action(js.at("action").get<std::string>(), t.platform);
            s.raw_model_output = js.at("raw_model_output").get<std::string>();
            s.discarded_outputs = js.at("discarded_outputs").get<std::vector<std::string>>();
            t.steps.push_back(std::move(s));
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Trajectory> read_trajectories_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_trajectories(in);
}

}  // namespace guiforge
