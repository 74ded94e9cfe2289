#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guiforge/collector.hpp"
#include "guiforge/model_client.hpp"

namespace guiforge {

/// A trajectory with its graded reward score R in [1, 5].
struct RewardedTrajectory {
    std::string trajectory_id;
    int score = 1;
    std::string reason;
    std::string judge_id;

    bool operator==(const RewardedTrajectory&) const = default;
};

/// Exact reward-proportional sampling weights: probability(i) = R_i / sum(R).
struct SamplingDistribution {
    struct Weight {
        std::string trajectory_id;
        long long numerator = 0;  // R_i
        double probability = 0.0;
    };
    std::vector<Weight> weights;
    long long denominator = 0;  // sum of R_k
};

/// Renders the judge template and attaches the last three states' screenshot
/// tokens (all states when the trajectory is shorter than three steps).
ChatRequest build_trm_prompt(const Trajectory& traj, const std::string& model_name = "judge");

/// Extracts the last "Reason:"/"Score:" pair. The score must be an integer
/// 1..5; out-of-range values are rejected (missing_score / out_of_range_score)
/// so the caller can re-ask.
std::pair<std::string, int> parse_trm_response(std::string_view text);

/// One judged score per trajectory; up to 2 re-asks on parse failure, then
/// the default score 1 with reason "judge-failure".
RewardedTrajectory score_trajectory(const Trajectory& traj, Annotator& judge);

/// Exact proportional weights, order preserved. Throws empty_input.
SamplingDistribution sampling_distribution(const std::vector<RewardedTrajectory>& rewards);

/// n independent draws with replacement, deterministic for a seed. The draw
/// uses integer cumulative weights, so proportions are exact by construction.
std::vector<std::string> sample_trajectories(const SamplingDistribution& dist, int n,
                                             std::uint64_t seed);

/// Without-replacement variant for dataset export: repeatedly draws from the
/// remaining pool until it is empty or n ids were taken.
std::vector<std::string> sample_trajectories_without_replacement(const SamplingDistribution& dist,
                                                                 int n, std::uint64_t seed);

/// Binary-gate baseline: keeps trajectory ids with score >= threshold.
std::vector<std::string> labeler_filter(const std::vector<RewardedTrajectory>& rewards,
                                        int threshold = 5);

/// Reward store and distribution export (exact rational weights).
void write_rewards(std::ostream& out, const std::vector<RewardedTrajectory>& rewards);
void write_rewards_file(const std::string& path, const std::vector<RewardedTrajectory>& rewards);
std::vector<RewardedTrajectory> read_rewards(std::istream& in);
std::vector<RewardedTrajectory> read_rewards_file(const std::string& path);
void write_distribution_file(const std::string& path, const SamplingDistribution& dist,
                             std::uint64_t seed);

}  // namespace guiforge
