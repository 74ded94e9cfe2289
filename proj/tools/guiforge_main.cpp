#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "guiforge/error.hpp"
#include "guiforge/pipeline.hpp"

namespace {

// --seed N derives one explicit seed per stage so a single flag still pins
// the whole run.
void apply_overrides(guiforge::PipelineConfig& config, const std::string& out_dir,
                     bool have_seed, std::uint64_t seed, bool mock) {
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (have_seed) {
        config.seeds["explore"] = seed;
        config.seeds["sample"] = seed + 1;
        config.seeds["self_instruct"] = seed + 2;
        config.seeds["export"] = seed + 3;
        config.seeds["embedder"] = seed + 4;
        config.budget.seed = seed;
    }
    if (mock) config.force_stub = true;
}

void print_report(const guiforge::StageReport& report) {
    std::cout << "stage " << report.stage << ": ";
    bool first = true;
    for (const auto& [key, value] : report.counts) {
        if (!first) std::cout << ", ";
        std::cout << key << "=" << value;
        first = false;
    }
    std::cout << " (" << report.duration_ms << " ms)\n";
    for (const auto& [path, digest] : report.outputs)
        std::cout << "  " << path << "  sha256:" << digest.substr(0, 12) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GUI-agent trajectory synthesis pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool mock = false;
    app.add_option("--config", config_path, "pipeline configuration document")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config seeds)");
    app.add_flag("--mock", mock, "force the deterministic offline responders for all roles");

    for (const auto& stage : guiforge::kStageOrder)
        app.add_subcommand(stage, "run the " + stage + " stage");
    app.add_subcommand("pipeline", "run every stage in order and write the manifest");

    CLI11_PARSE(app, argc, argv);

    try {
        guiforge::PipelineConfig config = guiforge::load_config(config_path);
        apply_overrides(config, out_dir, seed_opt->count() > 0, seed, mock);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "pipeline") {
            nlohmann::json manifest = guiforge::run_pipeline(config);
            std::cout << "pipeline complete: " << manifest["stages"].size() << " stages, manifest at "
                      << config.out_dir << "/manifest.json\n";
        } else {
            print_report(guiforge::run_stage(sub, config));
        }
        return 0;
    } catch (const guiforge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == guiforge::Errc::config_invalid ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
