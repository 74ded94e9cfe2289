#include "guiforge/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guiforge/analysis.hpp"
#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"
#include "guiforge/stub_models.hpp"
#include "guiforge/synthesis.hpp"

namespace guiforge {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::vector<std::string> kStageOrder = {"explore", "synthesize", "collect", "score",
                                              "sample",  "export",     "analyze"};

std::uint64_t PipelineConfig::seed(const std::string& name) const {
    auto it = seeds.find(name);
    if (it == seeds.end())
        throw Error(Errc::config_invalid, "no seed named \"" + name + "\"");
    return it->second;
}

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / path).string();
}

RoleConfig parse_role(const json& j, const std::string& base_dir, const std::string& name) {
    RoleConfig role;
    if (!j.is_object())
        throw Error(Errc::config_invalid, name + " must be an object");
    if (j.contains("transport")) role.transport = j.at("transport").get<std::string>();
    if (role.transport != "stub" && role.transport != "replay" && role.transport != "live")
        throw Error(Errc::config_invalid,
                    name + ".transport must be stub, replay or live");
    if (j.contains("model")) role.model = j.at("model").get<std::string>();
    if (j.contains("fixture"))
        role.fixture = resolve_path(base_dir, j.at("fixture").get<std::string>());
    if (j.contains("base_url")) role.base_url = j.at("base_url").get<std::string>();
    if (j.contains("api_key_env")) role.api_key_env = j.at("api_key_env").get<std::string>();
    if (role.transport == "replay" && role.fixture.empty())
        throw Error(Errc::config_invalid, name + ": replay transport needs a fixture path");
    if (role.transport == "replay" && !fs::exists(role.fixture))
        throw Error(Errc::config_invalid, name + ": fixture does not exist: " + role.fixture);
    if (role.transport == "live" && role.base_url.empty())
        throw Error(Errc::config_invalid, name + ": live transport needs base_url");
    return role;
}

Annotator make_role_annotator(const RoleConfig& role, bool force_stub,
                              std::shared_ptr<AuditLog> audit) {
    RoleConfig effective = role;
    if (force_stub) effective.transport = "stub";
    Annotator out = [&]() -> Annotator {
        if (effective.transport == "stub") return make_stub_annotator(effective.model);
        if (effective.transport == "replay")
            return Annotator(effective.model,
                             std::make_unique<ReplayTransport>(effective.fixture));
        EndpointConfig endpoint;
        endpoint.base_url = effective.base_url;
        if (!effective.api_key_env.empty()) {
            const char* key = std::getenv(effective.api_key_env.c_str());
            if (key != nullptr) endpoint.api_key = key;
        }
        return Annotator(effective.model, std::make_unique<LiveTransport>(endpoint));
    }();
    out.set_audit_log(std::move(audit));
    return out;
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

void require_upstream(const PipelineConfig& config, const std::string& file,
                      const std::string& producing_stage) {
    if (!fs::exists(fs::path(config.out_dir) / file))
        throw Error(Errc::missing_upstream, producing_stage);
}

std::vector<EnvironmentDefinition> load_definitions(const PipelineConfig& config) {
    std::vector<EnvironmentDefinition> defs;
    for (const auto& path : config.environments) defs.push_back(load_environment_file(path));
    return defs;
}

void append_report(const PipelineConfig& config, const StageReport& report) {
    std::ofstream out(fs::path(config.out_dir) / "reports.log", std::ios::app);
    ordered_json j;
    j["stage"] = report.stage;
    j["counts"] = report.counts;
    j["outputs"] = ordered_json::array();
    for (const auto& [path, digest] : report.outputs)
        j["outputs"].push_back({{"path", path}, {"digest", digest}});
    j["duration_ms"] = report.duration_ms;
    out << j.dump() << "\n";
}

void add_output(StageReport& report, const PipelineConfig& config, const std::string& file) {
    report.outputs.emplace_back(file, file_digest(fs::path(config.out_dir) / file));
}

StageReport stage_explore(const PipelineConfig& config) {
    StageReport report{"explore", {}, {}, 0};
    auto defs = load_definitions(config);
    std::shared_ptr<AuditLog> audit = std::make_shared<AuditLog>();
    std::vector<Triplet> all;
    for (const auto& def : defs) {
        ExplorationBudget budget = config.budget;
        budget.seed = config.seed("explore");
        std::unique_ptr<TextProvider> provider;
        std::optional<Annotator> annotator;
        if (config.text_provider == "annotator") {
            annotator.emplace(make_role_annotator(config.annotator, config.force_stub, audit));
            provider = std::make_unique<AnnotatorTextProvider>(*annotator, budget.seed);
        } else {
            provider = std::make_unique<LexiconTextProvider>(budget.seed);
        }
        auto triplets = explore(def, budget, *provider);
        report.counts["triplets_" + def.env_id] = static_cast<long long>(triplets.size());
        for (auto& t : triplets) all.push_back(std::move(t));
    }
    report.counts["triplets"] = static_cast<long long>(all.size());
    write_triplets_file((fs::path(config.out_dir) / "triplets.jsonl").string(), all);
    add_output(report, config, "triplets.jsonl");
    return report;
}

StageReport stage_synthesize(const PipelineConfig& config) {
    require_upstream(config, "triplets.jsonl", "explore");
    StageReport report{"synthesize", {}, {}, 0};
    auto defs = load_definitions(config);
    auto triplets = read_triplets_file((fs::path(config.out_dir) / "triplets.jsonl").string());

    Annotator annotator =
        make_role_annotator(config.annotator, config.force_stub, std::make_shared<AuditLog>());
    TaskSet all;
    for (const auto& def : defs) {
        std::vector<Triplet> local;
        for (const auto& t : triplets)
            if (t.env_id == def.env_id) local.push_back(t);
        TaskSet set = synthesize_task_set(local, annotator, def, config.task_limit);
        for (auto& t : set.tasks) all.tasks.push_back(std::move(t));
        for (auto& s : set.skips) all.skips.push_back(std::move(s));
    }
    report.counts["reverse_synthesis_tasks"] = static_cast<long long>(all.tasks.size());

    if (config.task_driven_n > 0) {
        for (const auto& def : defs) {
            TaskSet td = generate_task_driven(def, annotator, config.task_driven_n);
            for (auto& t : td.tasks) all.tasks.push_back(std::move(t));
            for (auto& s : td.skips) all.skips.push_back(std::move(s));
        }
    }
    if (config.self_instruct_n > 0) {
        for (const auto& def : defs) {
            TaskSet base;
            for (const auto& t : all.tasks)
                if (t.env_id == def.env_id && t.provenance == Provenance::task_driven)
                    base.tasks.push_back(t);
            if (base.tasks.empty())
                for (const auto& t : all.tasks)
                    if (t.env_id == def.env_id) base.tasks.push_back(t);
            if (base.tasks.empty())
                throw Error(Errc::base_empty,
                            "self-instruct needs existing tasks for " + def.env_id);
            TaskSet si = generate_self_instruct(base, def, annotator, config.self_instruct_n,
                                                config.seed("self_instruct"));
            for (auto& t : si.tasks) all.tasks.push_back(std::move(t));
            for (auto& s : si.skips) all.skips.push_back(std::move(s));
        }
    }
    report.counts["tasks"] = static_cast<long long>(all.tasks.size());
    report.counts["skips"] = static_cast<long long>(all.skips.size());
    write_tasks_file((fs::path(config.out_dir) / "tasks.jsonl").string(), all);
    add_output(report, config, "tasks.jsonl");
    return report;
}

StageReport stage_collect(const PipelineConfig& config) {
    require_upstream(config, "tasks.jsonl", "synthesize");
    StageReport report{"collect", {}, {}, 0};
    auto defs = load_definitions(config);
    std::map<std::string, const EnvironmentDefinition*> by_env;
    for (const auto& def : defs) by_env[def.env_id] = &def;

    TaskSet tasks = read_tasks_file((fs::path(config.out_dir) / "tasks.jsonl").string());
    Annotator executor =
        make_role_annotator(config.executor, config.force_stub, std::make_shared<AuditLog>());

    std::vector<Trajectory> trajectories;
    for (const auto& task : tasks.tasks) {
        auto it = by_env.find(task.env_id);
        if (it == by_env.end())
            throw Error(Errc::store_inconsistency,
                        "task " + task.task_id + " references unknown environment " + task.env_id);
        Trajectory t = collect_trajectory(*it->second, task, executor, config.max_steps);
        if (t.length() >= 1) trajectories.push_back(std::move(t));
    }
    report.counts["trajectories"] = static_cast<long long>(trajectories.size());
    long long steps = 0;
    for (const auto& t : trajectories) steps += t.length();
    report.counts["steps"] = steps;
    write_trajectories_file((fs::path(config.out_dir) / "trajectories.jsonl").string(),
                            trajectories);
    {
        std::ofstream out(fs::path(config.out_dir) / "trajectory-index.jsonl");
        write_trajectory_index(out, trajectories);
    }
    add_output(report, config, "trajectories.jsonl");
    add_output(report, config, "trajectory-index.jsonl");
    return report;
}

StageReport stage_score(const PipelineConfig& config) {
    require_upstream(config, "trajectories.jsonl", "collect");
    StageReport report{"score", {}, {}, 0};
    auto trajectories =
        read_trajectories_file((fs::path(config.out_dir) / "trajectories.jsonl").string());
    Annotator judge =
        make_role_annotator(config.judge, config.force_stub, std::make_shared<AuditLog>());
    std::vector<RewardedTrajectory> rewards;
    for (const auto& t : trajectories) rewards.push_back(score_trajectory(t, judge));
    report.counts["scored"] = static_cast<long long>(rewards.size());
    write_rewards_file((fs::path(config.out_dir) / "rewards.jsonl").string(), rewards);
    add_output(report, config, "rewards.jsonl");
    return report;
}

StageReport stage_sample(const PipelineConfig& config) {
    require_upstream(config, "rewards.jsonl", "score");
    StageReport report{"sample", {}, {}, 0};
    auto rewards = read_rewards_file((fs::path(config.out_dir) / "rewards.jsonl").string());
    SamplingDistribution dist = sampling_distribution(rewards);
    std::uint64_t seed = config.seed("sample");
    write_distribution_file((fs::path(config.out_dir) / "distribution.json").string(), dist,
                            seed);
    auto draws = sample_trajectories(dist, config.n_samples, seed);
    {
        std::ofstream out(fs::path(config.out_dir) / "samples.jsonl");
        for (std::size_t i = 0; i < draws.size(); ++i) {
            ordered_json rec;
            rec["draw"] = i;
            rec["trajectory_id"] = draws[i];
            out << rec.dump() << "\n";
        }
    }
    report.counts["draws"] = static_cast<long long>(draws.size());
    add_output(report, config, "distribution.json");
    add_output(report, config, "samples.jsonl");
    return report;
}

StageReport stage_export(const PipelineConfig& config) {
    require_upstream(config, "trajectories.jsonl", "collect");
    require_upstream(config, "rewards.jsonl", "score");
    StageReport report{"export", {}, {}, 0};
    auto trajectories =
        read_trajectories_file((fs::path(config.out_dir) / "trajectories.jsonl").string());
    auto rewards = read_rewards_file((fs::path(config.out_dir) / "rewards.jsonl").string());
    std::uint64_t seed = config.seed("export");
    ExportResult result = export_dataset(trajectories, rewards, config.export_mode,
                                         config.n_samples, seed, config.labeler_threshold);
    write_dataset_file((fs::path(config.out_dir) / "dataset.jsonl").string(), result.examples);

    long long planning = 0, action = 0;
    for (const auto& ex : result.examples)
        (ex.kind == TrainingExample::Kind::planning ? planning : action) += 1;
    ordered_json manifest;
    manifest["mode"] = to_string(config.export_mode);
    manifest["seed"] = seed;
    manifest["n_samples"] = config.n_samples;
    manifest["planning_examples"] = planning;
    manifest["action_examples"] = action;
    manifest["trajectories"] = static_cast<long long>(trajectories.size());
    manifest["multiplicity"] = result.multiplicity;
    if (!result.warning.empty()) manifest["warning"] = result.warning;
    manifest["source_digests"] = {
        {"trajectories", file_digest(fs::path(config.out_dir) / "trajectories.jsonl")},
        {"rewards", file_digest(fs::path(config.out_dir) / "rewards.jsonl")}};
    {
        std::ofstream out(fs::path(config.out_dir) / "dataset-manifest.json");
        out << manifest.dump(2) << "\n";
    }
    report.counts["planning_examples"] = planning;
    report.counts["action_examples"] = action;
    add_output(report, config, "dataset.jsonl");
    add_output(report, config, "dataset-manifest.json");
    return report;
}

StageReport stage_analyze(const PipelineConfig& config) {
    require_upstream(config, "tasks.jsonl", "synthesize");
    require_upstream(config, "trajectories.jsonl", "collect");
    StageReport report{"analyze", {}, {}, 0};
    TaskSet tasks = read_tasks_file((fs::path(config.out_dir) / "tasks.jsonl").string());
    auto trajectories =
        read_trajectories_file((fs::path(config.out_dir) / "trajectories.jsonl").string());

    CorpusStats stats = corpus_stats(tasks, trajectories);
    HashingEmbedder embedder(config.seed("embedder"), config.embedder_dim);

    ordered_json aj;
    aj["tasks"] = static_cast<long long>(tasks.tasks.size());
    aj["trajectories"] = static_cast<long long>(trajectories.size());
    aj["avg_words"] = stats.avg_words;
    aj["avg_steps"] = stats.avg_steps;
    aj["by_provenance"] = ordered_json::object();
    for (const auto& [name, p] : stats.by_provenance) {
        aj["by_provenance"][name] = {{"tasks", p.task_count},
                                     {"avg_words", p.avg_words},
                                     {"trajectories", p.trajectory_count},
                                     {"avg_steps", p.avg_steps}};
    }

    // Instruction diversity per provenance plus overall (average pairwise
    // cosine distance of instruction embeddings).
    std::map<std::string, std::vector<std::string>> instructions;
    std::vector<std::string> all_instructions;
    std::vector<std::string> labels;
    for (const auto& t : tasks.tasks) {
        instructions[to_string(t.provenance)].push_back(t.high_level);
        all_instructions.push_back(t.high_level);
        labels.push_back(t.task_id);
    }
    aj["instruction_diversity"] = ordered_json::object();
    for (const auto& [name, texts] : instructions) {
        if (texts.size() < 2) continue;
        aj["instruction_diversity"][name] =
            avg_pairwise_cosine_distance(embed_instructions(texts, embedder));
    }
    if (all_instructions.size() >= 2)
        aj["instruction_diversity"]["overall"] =
            avg_pairwise_cosine_distance(embed_instructions(all_instructions, embedder));

    // Trajectory diversity: embed the concatenated low-level thoughts.
    std::vector<std::string> thought_docs;
    for (const auto& t : trajectories) {
        std::string doc;
        for (const auto& s : t.steps) doc += s.thought + " ";
        thought_docs.push_back(doc);
    }
    if (thought_docs.size() >= 2)
        aj["trajectory_diversity"] =
            avg_pairwise_cosine_distance(embed_instructions(thought_docs, embedder));

    {
        std::ofstream out(fs::path(config.out_dir) / "analysis-report.json");
        out << aj.dump(2) << "\n";
    }
    if (all_instructions.size() >= 3) {
        auto coords =
            export_embedding_coordinates(embed_instructions(all_instructions, embedder));
        std::ofstream out(fs::path(config.out_dir) / "instruction-embeddings.csv");
        write_coordinates_csv(out, labels, coords);
        add_output(report, config, "instruction-embeddings.csv");
    }
    report.counts["tasks"] = static_cast<long long>(tasks.tasks.size());
    report.counts["trajectories"] = static_cast<long long>(trajectories.size());
    add_output(report, config, "analysis-report.json");
    return report;
}

}  // namespace

PipelineConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw Error(Errc::config_invalid, "config must be a JSON object");
    PipelineConfig config;
    if (!j.contains("environments") || !j.at("environments").is_array() ||
        j.at("environments").empty())
        throw Error(Errc::config_invalid, "config needs a non-empty environments list");
    for (const auto& e : j.at("environments")) {
        std::string path = resolve_path(base_dir, e.get<std::string>());
        if (!fs::exists(path))
            throw Error(Errc::config_invalid, "environment file does not exist: " + path);
        config.environments.push_back(path);
    }
    if (j.contains("out_dir"))
        config.out_dir = resolve_path(base_dir, j.at("out_dir").get<std::string>());
    if (!j.contains("seeds") || !j.at("seeds").is_object())
        throw Error(Errc::config_invalid, "config needs an explicit seeds object");
    for (const char* name : {"explore", "sample", "self_instruct", "export", "embedder"}) {
        if (!j.at("seeds").contains(name))
            throw Error(Errc::config_invalid, std::string("seeds.") + name + " is required");
        config.seeds[name] = j.at("seeds").at(name).get<std::uint64_t>();
    }
    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        if (b.contains("max_triplets")) config.budget.max_triplets = b.at("max_triplets");
        if (b.contains("max_depth")) config.budget.max_depth = b.at("max_depth");
        if (b.contains("max_visits_per_screen"))
            config.budget.max_visits_per_screen = b.at("max_visits_per_screen");
    }
    config.budget.seed = config.seeds["explore"];
    if (j.contains("annotator")) config.annotator = parse_role(j.at("annotator"), base_dir, "annotator");
    if (j.contains("judge")) config.judge = parse_role(j.at("judge"), base_dir, "judge");
    if (j.contains("executor")) config.executor = parse_role(j.at("executor"), base_dir, "executor");
    if (j.contains("text_provider")) {
        config.text_provider = j.at("text_provider").get<std::string>();
        if (config.text_provider != "lexicon" && config.text_provider != "annotator")
            throw Error(Errc::config_invalid, "text_provider must be lexicon or annotator");
    }
    if (j.contains("task_limit")) config.task_limit = j.at("task_limit");
    if (j.contains("max_steps")) config.max_steps = j.at("max_steps");
    if (j.contains("export")) {
        const auto& e = j.at("export");
        if (e.contains("mode"))
            config.export_mode = export_mode_from_string(e.at("mode").get<std::string>());
        if (e.contains("n_samples")) config.n_samples = e.at("n_samples");
        if (e.contains("labeler_threshold")) config.labeler_threshold = e.at("labeler_threshold");
    }
    if (j.contains("baselines")) {
        const auto& b = j.at("baselines");
        if (b.contains("task_driven")) config.task_driven_n = b.at("task_driven");
        if (b.contains("self_instruct")) config.self_instruct_n = b.at("self_instruct");
    }
    if (j.contains("embedder_dim")) config.embedder_dim = j.at("embedder_dim");
    if (config.task_limit < 0 || config.max_steps < 1 || config.n_samples < 0 ||
        config.embedder_dim < 2 || config.task_driven_n < 0 || config.self_instruct_n < 0)
        throw Error(Errc::config_invalid, "a numeric limit is out of range");
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_invalid, "cannot open config " + path);
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error(Errc::config_invalid, "config is not valid JSON");
    return parse_config(j, fs::path(path).parent_path().string());
}

StageReport run_stage(const std::string& stage, const PipelineConfig& config) {
    fs::create_directories(config.out_dir);
    auto started = std::chrono::steady_clock::now();
    StageReport report;
    if (stage == "explore")
        report = stage_explore(config);
    else if (stage == "synthesize")
        report = stage_synthesize(config);
    else if (stage == "collect")
        report = stage_collect(config);
    else if (stage == "score")
        report = stage_score(config);
    else if (stage == "sample")
        report = stage_sample(config);
    else if (stage == "export")
        report = stage_export(config);
    else if (stage == "analyze")
        report = stage_analyze(config);
    else
        throw Error(Errc::config_invalid, "unknown stage \"" + stage + "\"");
    report.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    append_report(config, report);
    return report;
}

nlohmann::json run_pipeline(const PipelineConfig& config) {
    ordered_json manifest;
    manifest["seeds"] = config.seeds;
    manifest["stages"] = ordered_json::array();
    for (const auto& stage : kStageOrder) {
        StageReport report = run_stage(stage, config);
        ordered_json sj;
        sj["stage"] = report.stage;
        sj["outputs"] = ordered_json::array();
        for (const auto& [path, digest] : report.outputs)
            sj["outputs"].push_back({{"path", path}, {"digest", digest}});
        manifest["stages"].push_back(std::move(sj));
    }
    {
        std::ofstream out(fs::path(config.out_dir) / "manifest.json");
        out << manifest.dump(2) << "\n";
    }
    return manifest;
}

}  // namespace guiforge
