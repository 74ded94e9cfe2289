#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "guiforge/action.hpp"
#include "guiforge/collector.hpp"
#include "guiforge/synthesis.hpp"

namespace guiforge {

struct EmbeddingVector {
    Eigen::VectorXd values;
    std::string model_id;
};

/// Provider interface: a remote endpoint for real runs, the seeded hashing
/// embedder for tests and offline runs.
class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic feature-hashing embedder: tokens hash to signed buckets,
/// vectors are L2-normalized. Pure function of (seed, dim, text).
class HashingEmbedder : public Embedder {
  public:
    explicit HashingEmbedder(std::uint64_t seed = 0, int dim = 64) : seed_(seed), dim_(dim) {}
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  private:
    std::uint64_t seed_;
    int dim_;
};

std::vector<EmbeddingVector> embed_instructions(const std::vector<std::string>& texts,
                                                Embedder& provider);

/// Mean over all unordered pairs of (1 - cosine similarity).
/// Throws fewer_than_two / zero_vector.
double avg_pairwise_cosine_distance(const std::vector<EmbeddingVector>& vectors);

struct ProvenanceStats {
    long long task_count = 0;
    long long word_total = 0;
    long long trajectory_count = 0;
    long long step_total = 0;
    double avg_words = 0.0;
    double avg_steps = 0.0;
};

struct CorpusStats {
    double avg_words = 0.0;
    double avg_steps = 0.0;
    std::map<std::string, ProvenanceStats> by_provenance;
};

/// Whitespace-token word counts over high-level instructions; steps = K_i.
CorpusStats corpus_stats(const TaskSet& tasks, const std::vector<Trajectory>& trajectories);

/// Rank correlation with average ranks for ties.
/// Throws length_mismatch / fewer_than_two / constant_input.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct MatchVerdict {
    bool type_match = false;
    bool full_match = false;
    double distance_fraction = 0.0;  // of screen width
};

/// Inclusive 0.14 screen-width threshold for coordinate-addressed actions;
/// targets/texts must agree where present. Throws platform_mismatch.
MatchVerdict match_action(const Action& pred, const Action& gold);

struct MetricReport {
    double sr = 0.0;    // fraction full_match
    double type = 0.0;  // fraction type_match
    long long count = 0;
    std::string warning;  // set on empty input
};

MetricReport aggregate_metrics(const std::vector<MatchVerdict>& verdicts);

/// Deterministic 2-axis projection onto the top-2 principal axes. Each axis
/// is sign-normalized (largest-magnitude component positive) so coordinates
/// are reproducible. Throws fewer_than_two (<3 vectors) / degenerate_covariance.
std::vector<std::array<double, 2>> export_embedding_coordinates(
    const std::vector<EmbeddingVector>& vectors);

void write_coordinates_csv(std::ostream& out, const std::vector<std::string>& labels,
                           const std::vector<std::array<double, 2>>& coords);

}  // namespace guiforge
