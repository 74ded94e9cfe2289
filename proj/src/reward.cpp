#include "guiforge/reward.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/error.hpp"
#include "guiforge/prompts.hpp"

namespace guiforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ChatRequest build_trm_prompt(const Trajectory& traj, const std::string& model_name) {
    if (traj.steps.empty())
        throw Error(Errc::validation_error, "cannot judge an empty trajectory");
    std::string history = history_context(traj.steps, traj.length(),
                                          /*window=*/traj.length());
    std::string text = prompts::render(prompts::trm_template(),
                                       {{"high_level_instruction", traj.high_level},
                                        {"action_history", history}});
    // Last three states, or all states when the trajectory is shorter.
    int first = std::max(0, traj.length() - 3);
    std::vector<MessagePart> images;
    for (int i = first; i < traj.length(); ++i) {
        const ScreenState& s = traj.steps[static_cast<std::size_t>(i)].state;
        images.push_back(
            {MessagePart::Type::image_token, "", screenshot_token(s), render_screen(s)});
    }
    return make_user_request(model_name, std::move(text), std::move(images));
}

std::pair<std::string, int> parse_trm_response(std::string_view text) {
    // Last "Score:" line wins; the reason is everything between the last
    // "Reason:" before it and the score line.
    std::size_t score_pos = text.rfind("Score:");
    if (score_pos == std::string_view::npos)
        throw Error(Errc::missing_score, "no Score: line in judge response");
    std::string_view after = text.substr(score_pos + 6);
    std::size_t eol = after.find('\n');
    std::string score_text(after.substr(0, eol));
    std::size_t b = score_text.find_first_not_of(" \t");
    if (b == std::string::npos) throw Error(Errc::missing_score, "empty Score: line");
    std::size_t e = score_text.find_last_not_of(" \t\r");
    score_text = score_text.substr(b, e - b + 1);
    int score = 0;
    try {
        std::size_t used = 0;
        score = std::stoi(score_text, &used);
        if (used != score_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
        throw Error(Errc::missing_score, "Score: line is not an integer: " + score_text);
    }
    if (score < 1 || score > 5)
        throw Error(Errc::out_of_range_score,
                    "score " + std::to_string(score) + " outside [1,5]");

    std::string reason;
    std::size_t reason_pos = text.rfind("Reason:", score_pos);
    if (reason_pos != std::string_view::npos) {
        std::string_view span = text.substr(reason_pos + 7, score_pos - reason_pos - 7);
        std::size_t rb = span.find_first_not_of(" \t\r\n");
        if (rb != std::string_view::npos) {
            std::size_t re = span.find_last_not_of(" \t\r\n");
            reason = std::string(span.substr(rb, re - rb + 1));
        }
    }
    return {reason, score};
}

RewardedTrajectory score_trajectory(const Trajectory& traj, Annotator& judge) {
    ChatRequest request = build_trm_prompt(traj, judge.model_name());
    RewardedTrajectory out;
    out.trajectory_id = traj.trajectory_id;
    out.judge_id = judge.model_name();
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::string response;
        try {
            response = judge.chat(request);
        } catch (const Error&) {
            break;  // transport exhausted; fall through to the default
        }
        try {
            auto [reason, score] = parse_trm_response(response);
            out.reason = reason;
            out.score = score;
            return out;
        } catch (const Error&) {
            // re-ask
        }
    }
    out.score = 1;
    out.reason = "judge-failure";
    return out;
}

SamplingDistribution sampling_distribution(const std::vector<RewardedTrajectory>& rewards) {
    if (rewards.empty()) throw Error(Errc::empty_input, "no rewarded trajectories");
    SamplingDistribution dist;
    long long total = 0;
    for (const auto& r : rewards) {
        if (r.score < 1 || r.score > 5)
            throw Error(Errc::validation_error,
                        "score outside [1,5] for " + r.trajectory_id);
        total += r.score;
    }
    dist.denominator = total;
    for (const auto& r : rewards) {
        dist.weights.push_back({r.trajectory_id, r.score,
                                static_cast<double>(r.score) / static_cast<double>(total)});
    }
    return dist;
}

namespace {

// Unbiased uniform draw in [0, n) from the standard-specified mt19937_64
// stream; rejection keeps it exact and portable.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

}  // namespace

std::vector<std::string> sample_trajectories(const SamplingDistribution& dist, int n,
                                             std::uint64_t seed) {
    if (n < 0) throw Error(Errc::validation_error, "n must be >= 0");
    if (dist.weights.empty() || dist.denominator <= 0)
        throw Error(Errc::empty_input, "empty sampling distribution");
    std::vector<long long> cumulative;
    cumulative.reserve(dist.weights.size());
    long long acc = 0;
    for (const auto& w : dist.weights) {
        acc += w.numerator;
        cumulative.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto r = static_cast<long long>(
            uniform_below(rng, static_cast<std::uint64_t>(dist.denominator)));
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        out.push_back(dist.weights[static_cast<std::size_t>(it - cumulative.begin())]
                          .trajectory_id);
    }
    return out;
}

std::vector<std::string> sample_trajectories_without_replacement(const SamplingDistribution& dist,
                                                                 int n, std::uint64_t seed) {
    if (n < 0) throw Error(Errc::validation_error, "n must be >= 0");
    if (dist.weights.empty() || dist.denominator <= 0)
        throw Error(Errc::empty_input, "empty sampling distribution");
    std::vector<SamplingDistribution::Weight> pool = dist.weights;
    long long total = dist.denominator;
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    while (static_cast<int>(out.size()) < n && !pool.empty()) {
        auto r = static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(total)));
        long long acc = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            acc += pool[i].numerator;
            if (r < acc) {
                out.push_back(pool[i].trajectory_id);
                total -= pool[i].numerator;
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
                break;
            }
        }
    }
    return out;
}

std::vector<std::string> labeler_filter(const std::vector<RewardedTrajectory>& rewards,
                                        int threshold) {
    if (threshold < 1 || threshold > 5)
        throw Error(Errc::validation_error, "threshold must be in [1,5]");
    std::vector<std::string> out;
    for (const auto& r : rewards)
        if (r.score >= threshold) out.push_back(r.trajectory_id);
    return out;
}

void write_rewards(std::ostream& out, const std::vector<RewardedTrajectory>& rewards) {
    for (const auto& r : rewards) {
        ordered_json rec;
        rec["trajectory_id"] = r.trajectory_id;
        rec["score"] = r.score;
        rec["reason"] = r.reason;
        rec["judge_id"] = r.judge_id;
        out << rec.dump() << "\n";
    }
}

void write_rewards_file(const std::string& path, const std::vector<RewardedTrajectory>& rewards) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    write_rewards(out, rewards);
}

std::vector<RewardedTrajectory> read_rewards(std::istream& in) {
    std::vector<RewardedTrajectory> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "reward store line " + std::to_string(lineno));
        RewardedTrajectory r;
        r.trajectory_id = rec.at("trajectory_id").get<std::string>();
        r.score = rec.at("score").get<int>();
        r.reason = rec.at("reason").get<std::string>();
        r.judge_id = rec.at("judge_id").get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RewardedTrajectory> read_rewards_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_rewards(in);
}

void write_distribution_file(const std::string& path, const SamplingDistribution& dist,
                             std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::write_failure, "cannot open " + path);
    ordered_json j;
    j["seed"] = seed;
    j["denominator"] = dist.denominator;
    j["weights"] = ordered_json::array();
    for (const auto& w : dist.weights) {
        ordered_json wj;
        wj["trajectory_id"] = w.trajectory_id;
        wj["numerator"] = w.numerator;
        wj["denominator"] = dist.denominator;
        wj["probability"] = w.probability;
        j["weights"].push_back(std::move(wj));
    }
    out << j.dump(2) << "\n";
}

}  // namespace guiforge
