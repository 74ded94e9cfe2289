#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "guiforge/dataset.hpp"
#include "guiforge/explorer.hpp"
#include "guiforge/model_client.hpp"

namespace guiforge {

/// Endpoint/transport settings for one model role (annotator/judge/executor).
struct RoleConfig {
    std::string transport = "stub";  // stub | replay | live
    std::string model = "stub";
    std::string fixture;      // replay table path
    std::string base_url;     // live endpoint
    std::string api_key_env;  // env var holding the bearer token (secrets
                              // never live in the config document)
};

struct PipelineConfig {
    std::vector<std::string> environments;
    std::string out_dir = "out";
    std::map<std::string, std::uint64_t> seeds;  // explore/sample/self_instruct/export/embedder
    ExplorationBudget budget;
    RoleConfig annotator;
    RoleConfig judge;
    RoleConfig executor;
    std::string text_provider = "lexicon";  // lexicon | annotator
    int task_limit = 20;
    int max_steps = 15;
    ExportMode export_mode = ExportMode::uniform;
    int n_samples = 1000;
    int labeler_threshold = 5;
    int task_driven_n = 0;   // 0 disables the baseline
    int self_instruct_n = 0;
    int embedder_dim = 64;
    bool force_stub = false;  // --mock

    std::uint64_t seed(const std::string& name) const;
};

/// Parses and validates the configuration document. Flags override document
/// values; Error(config_invalid) on anything malformed or missing.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const nlohmann::json& j, const std::string& base_dir);

struct StageReport {
    std::string stage;
    std::map<std::string, long long> counts;
    std::vector<std::pair<std::string, std::string>> outputs;  // out_dir-relative path, sha256
    std::int64_t duration_ms = 0;
};

extern const std::vector<std::string> kStageOrder;  // 7 stages

/// Runs one stage; requires its upstream outputs
/// (Error(missing_upstream, "<stage>") otherwise). Appends the report to
/// <out_dir>/reports.log. Idempotent given identical inputs and seeds.
StageReport run_stage(const std::string& stage, const PipelineConfig& config);

/// All stages in order; writes <out_dir>/manifest.json recording every
/// output digest and the seeds.
nlohmann::json run_pipeline(const PipelineConfig& config);

}  // namespace guiforge
