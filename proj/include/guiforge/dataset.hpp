#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "guiforge/collector.hpp"
#include "guiforge/reward.hpp"

namespace guiforge {

/// One supervised example for the planning or the action objective.
struct TrainingExample {
    enum class Kind { planning, action };
    Kind kind = Kind::planning;
    std::string rendered_prompt;
    std::string screenshot_token;
    std::string a11y_tree;
    std::string high_level;  // planning only
    std::string history;
    std::string thought;  // action inputs only; never in planning inputs
    std::string target;   // planning: thought + action; action: action only
    std::string trajectory_ref;
    int step = 1;
    long long weight = 1;

    bool operator==(const TrainingExample&) const = default;
};

const char* to_string(TrainingExample::Kind kind);

enum class ExportMode { weighted, filtered, uniform };
const char* to_string(ExportMode mode);
ExportMode export_mode_from_string(std::string_view s);

/// One planning example per step; history from prior steps only, the step's
/// own thought appears only in the target.
std::vector<TrainingExample> emit_planning_examples(const Trajectory& traj);

/// One action example per step; the thought is an input, the action the target.
std::vector<TrainingExample> emit_action_examples(const Trajectory& traj);

struct ExportResult {
    std::vector<TrainingExample> examples;
    std::map<std::string, long long> multiplicity;  // weighted mode draw counts
    std::string warning;
};

/// weighted: reward-proportional draw counts become integer example weights;
/// filtered: labeler-gate at the threshold; uniform: everything with weight 1.
ExportResult export_dataset(const std::vector<Trajectory>& trajectories,
                            const std::vector<RewardedTrajectory>& rewards, ExportMode mode,
                            int n_samples, std::uint64_t seed, int labeler_threshold = 5);

/// Dataset files: one example per line plus a manifest with counts and
/// source digests.
void write_dataset(std::ostream& out, const std::vector<TrainingExample>& examples);
void write_dataset_file(const std::string& path, const std::vector<TrainingExample>& examples);
std::vector<TrainingExample> read_dataset(std::istream& in);
std::vector<TrainingExample> read_dataset_file(const std::string& path);

/// Task-driven baseline: the annotator sees the initial screen only.
TaskSet generate_task_driven(const EnvironmentDefinition& def, Annotator& annotator, int n);

/// Self-instruct baseline: each call conditions on exactly 3 demonstrations
/// uniformly sampled from the base set (seeded).
TaskSet generate_self_instruct(const TaskSet& base, const EnvironmentDefinition& def,
                               Annotator& annotator, int n, std::uint64_t seed);

}  // namespace guiforge
