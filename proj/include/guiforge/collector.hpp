#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guiforge/environment.hpp"
#include "guiforge/model_client.hpp"
#include "guiforge/synthesis.hpp"

namespace guiforge {

enum class TerminalReason { completed, max_steps, executor_error, environment_error };
const char* to_string(TerminalReason r);
TerminalReason terminal_reason_from_string(std::string_view s);

struct TrajectoryStep {
    int index = 1;  // 1-based
    ScreenState state;
    std::string thought;
    Action action;
    std::string raw_model_output;
    std::vector<std::string> discarded_outputs;  // malformed attempts, preserved

    bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory {
    std::string trajectory_id;
    std::string task_id;
    std::string high_level;
    std::string env_id;
    Platform platform = Platform::mobile;
    std::vector<TrajectoryStep> steps;
    TerminalReason terminal_reason = TerminalReason::completed;

    int length() const { return static_cast<int>(steps.size()); }
};

/// Splits thought from action. Mobile: "thoughts: ... actions: {dict}".
/// Web: fenced action after "In summary, the next action I will perform is".
std::pair<std::string, Action> parse_executor_output(std::string_view text, Platform platform);

/// History context c: "Step k: <thought> -> <canonical action>" lines for
/// steps [first_step .. upto) capped to the most recent `window` steps.
std::string history_context(const std::vector<TrajectoryStep>& steps, int upto,
                            int window = 8);

/// Rendered executor prompt for the next step (platform-specific template).
std::string build_executor_prompt(const EnvironmentDefinition& def, const InstructionPair& task,
                                  const std::vector<TrajectoryStep>& steps,
                                  const ScreenState& current);

/// Observe -> prompt -> parse -> step loop; halts on terminate/stop,
/// max_steps, or an unrecoverable error. Failed actions are recorded as
/// no-op steps. Malformed outputs trigger up to 2 re-prompts with a format
/// reminder before the trajectory ends with executor-error.
Trajectory collect_trajectory(const EnvironmentDefinition& def, const InstructionPair& task,
                              Annotator& executor, int max_steps = 15);

/// Trajectory store plus compact index, one JSON record per line each.
void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories);
void write_trajectories_file(const std::string& path, const std::vector<Trajectory>& trajectories);
void write_trajectory_index(std::ostream& out, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(std::istream& in);
std::vector<Trajectory> read_trajectories_file(const std::string& path);

}  // namespace guiforge
