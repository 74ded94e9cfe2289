#include "guiforge/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"

namespace guiforge {

std::vector<EmbeddingVector> HashingEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            std::uint64_t h = digest_u64(std::to_string(seed_) + "|" + token);
            auto idx = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
            v[idx] += (h >> 63) ? -1.0 : 1.0;  // signed hashing
            token.clear();
        };
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c)))
                token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            else
                flush();
        }
        flush();
        double norm = v.norm();
        if (norm > 0.0) v /= norm;
        out.push_back({std::move(v), "hashing-" + std::to_string(seed_) + "-" +
                                         std::to_string(dim_)});
    }
    return out;
}

std::vector<EmbeddingVector> embed_instructions(const std::vector<std::string>& texts,
                                                Embedder& provider) {
    auto out = provider.embed(texts);
    if (out.size() != texts.size())
        throw Error(Errc::validation_error, "embedder returned a mismatched vector count");
    return out;
}

double avg_pairwise_cosine_distance(const std::vector<EmbeddingVector>& vectors) {
    const std::size_t n = vectors.size();
    if (n < 2) throw Error(Errc::fewer_than_two, "need at least two vectors");
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors[i].values.norm() == 0.0)
            throw Error(Errc::zero_vector, "vector " + std::to_string(i) + " has zero norm");
        if (vectors[i].values.size() != vectors[0].values.size())
            throw Error(Errc::length_mismatch, "embedding dimensions differ within the corpus");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double cosine = vectors[i].values.dot(vectors[j].values) /
                            (vectors[i].values.norm() * vectors[j].values.norm());
            total += 1.0 - cosine;
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

namespace {

long long word_count(const std::string& text) {
    std::istringstream ss(text);
    std::string w;
    long long n = 0;
    while (ss >> w) ++n;
    return n;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

CorpusStats corpus_stats(const TaskSet& tasks, const std::vector<Trajectory>& trajectories) {
    CorpusStats stats;
    std::map<std::string, std::string> provenance_of_task;
    long long words = 0;
    for (const auto& t : tasks.tasks) {
        auto& p = stats.by_provenance[to_string(t.provenance)];
        ++p.task_count;
        long long w = word_count(t.high_level);
        p.word_total += w;
        words += w;
        provenance_of_task[t.task_id] = to_string(t.provenance);
    }
    long long steps = 0;
    for (const auto& g : trajectories) {
        steps += g.length();
        auto it = provenance_of_task.find(g.task_id);
        if (it != provenance_of_task.end()) {
            auto& p = stats.by_provenance[it->second];
            ++p.trajectory_count;
            p.step_total += g.length();
        }
    }
    if (!tasks.tasks.empty())
        stats.avg_words = static_cast<double>(words) / static_cast<double>(tasks.tasks.size());
    if (!trajectories.empty())
        stats.avg_steps = static_cast<double>(steps) / static_cast<double>(trajectories.size());
    for (auto& [name, p] : stats.by_provenance) {
        if (p.task_count > 0)
            p.avg_words = static_cast<double>(p.word_total) / static_cast<double>(p.task_count);
        if (p.trajectory_count > 0)
            p.avg_steps =
                static_cast<double>(p.step_total) / static_cast<double>(p.trajectory_count);
    }
    return stats;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error(Errc::length_mismatch, "input lengths differ");
    if (x.size() < 2) throw Error(Errc::fewer_than_two, "need at least two observations");
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    if (constant(x) || constant(y))
        throw Error(Errc::constant_input, "rank correlation of a constant input is undefined");

    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mean = (n + 1.0) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    return num / std::sqrt(dx * dy);
}

MatchVerdict match_action(const Action& pred, const Action& gold) {
    if (pred.platform != gold.platform)
        throw Error(Errc::platform_mismatch, "actions come from different platforms");
    MatchVerdict v;
    v.type_match = pred.kind == gold.kind;
    if (pred.coordinates && gold.coordinates) {
        double dx = pred.coordinates->first - gold.coordinates->first;
        double dy = pred.coordinates->second - gold.coordinates->second;
        v.distance_fraction = std::sqrt(dx * dx + dy * dy);
    }
    if (!v.type_match) return v;

    auto both_or_neither = [](const std::string& a, const std::string& b) {
        return a == b;  // equal covers the both-empty case
    };
    bool fields_ok = both_or_neither(pred.target, gold.target) &&
                     both_or_neither(pred.text, gold.text) &&
                     both_or_neither(pred.direction, gold.direction) &&
                     both_or_neither(pred.key_comb, gold.key_comb) &&
                     both_or_neither(pred.url, gold.url) && pred.tab_index == gold.tab_index;
    bool coords_ok;
    if (pred.coordinates.has_value() != gold.coordinates.has_value())
        coords_ok = false;
    else if (!pred.coordinates)
        coords_ok = true;  // no coordinates required
    else
        coords_ok = v.distance_fraction <= 0.14;  // inclusive boundary
    v.full_match = fields_ok && coords_ok;
    return v;
}

MetricReport aggregate_metrics(const std::vector<MatchVerdict>& verdicts) {
    MetricReport report;
    report.count = static_cast<long long>(verdicts.size());
    if (verdicts.empty()) {
        report.warning = "empty corpus: SR and Type default to 0.0";
        return report;
    }
    long long full = 0, type = 0;
    for (const auto& v : verdicts) {
        full += v.full_match ? 1 : 0;
        type += v.type_match ? 1 : 0;
    }
    report.sr = static_cast<double>(full) / static_cast<double>(verdicts.size());
    report.type = static_cast<double>(type) / static_cast<double>(verdicts.size());
    return report;
}

std::vector<std::array<double, 2>> export_embedding_coordinates(
    const std::vector<EmbeddingVector>& vectors) {
    if (vectors.size() < 3)
        throw Error(Errc::fewer_than_two, "projection needs at least three vectors");
    const Eigen::Index dim = vectors[0].values.size();
    const Eigen::Index n = static_cast<Eigen::Index>(vectors.size());
    Eigen::MatrixXd data(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (vectors[static_cast<std::size_t>(i)].values.size() != dim)
            throw Error(Errc::length_mismatch, "embedding dimensions differ within the corpus");
        data.row(i) = vectors[static_cast<std::size_t>(i)].values.transpose();
    }
    Eigen::RowVectorXd mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - mean;
    Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);
    if (cov.norm() == 0.0)
        throw Error(Errc::degenerate_covariance, "all points identical");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::degenerate_covariance, "eigendecomposition failed");
    // Eigen orders eigenvalues ascending; the top-2 axes are the last columns.
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(dim, 2);
    axes.col(0) = solver.eigenvectors().col(dim - 1);
    if (dim >= 2) axes.col(1) = solver.eigenvectors().col(dim - 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index imax = 0;
        axes.col(c).cwiseAbs().maxCoeff(&imax);
        if (axes(imax, c) < 0.0) axes.col(c) = -axes.col(c);
    }
    Eigen::MatrixXd projected = centered * axes;
    std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = {projected(i, 0), projected(i, 1)};
    return out;
}

void write_coordinates_csv(std::ostream& out, const std::vector<std::string>& labels,
                           const std::vector<std::array<double, 2>>& coords) {
    out << "label,x,y\n";
    char buf[64];
    for (std::size_t i = 0; i < coords.size(); ++i) {
        std::string label = i < labels.size() ? labels[i] : std::to_string(i);
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g", coords[i][0], coords[i][1]);
        out << label << "," << buf << "\n";
    }
}

}  // namespace guiforge
