#pragma once

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "guiforge/environment.hpp"
#include "guiforge/error.hpp"
#include "guiforge/model_client.hpp"

namespace guiforge::test {

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Byte-compares against the golden file; GUIFORGE_UPDATE_GOLDENS=1 rewrites
/// it instead (regenerate, review, freeze).
inline bool matches_golden(const std::string& name, const std::string& actual) {
    const std::string path = golden_path(name);
    if (std::getenv("GUIFORGE_UPDATE_GOLDENS") != nullptr) {
        std::ofstream out(path, std::ios::binary);
        out << actual;
        return true;
    }
    return read_file(path) == actual;
}

inline EnvironmentDefinition load_fixture(const std::string& name) {
    return load_environment_file(fixture_path(name));
}

/// Scripted transport: replays a response list in order (repeating the last
/// entry), optionally throwing for entries equal to kFail.
class ScriptTransport : public Transport {
  public:
    static constexpr const char* kFail = "<<fail>>";
    explicit ScriptTransport(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    std::string send(const ChatRequest&) override {
        std::size_t i = index_ < responses_.size() ? index_++ : responses_.size() - 1;
        if (responses_[i] == kFail)
            throw Error(Errc::transport_error, "scripted failure");
        return responses_[i];
    }
    const char* name() const override { return "script"; }
    std::size_t calls() const { return index_; }

  private:
    std::vector<std::string> responses_;
    std::size_t index_ = 0;
};

inline Annotator make_scripted(std::vector<std::string> responses,
                               const std::string& model = "scripted") {
    return Annotator(model, std::make_unique<ScriptTransport>(std::move(responses)));
}

inline Annotator make_const_annotator(const std::string& response,
                                      const std::string& model = "canned") {
    return Annotator(model, std::make_unique<CallbackTransport>(
                                [response](const ChatRequest&) { return response; }));
}

/// Replays a recorded action list with the collector's tolerance: failed
/// targets are no-ops, terminal actions are not applied.
inline std::vector<std::string> replay_state_hashes(const EnvironmentDefinition& def,
                                                    const std::vector<Action>& actions) {
    Environment env = reset(def);
    std::vector<std::string> hashes;
    for (const auto& a : actions) {
        hashes.push_back(state_hash(observe(env)));
        if (a.kind == ActionKind::terminate || a.kind == ActionKind::stop) continue;
        try {
            env.step(a);
        } catch (const Error& e) {
            if (e.code() != Errc::invalid_target && e.code() != Errc::non_editable_type) throw;
        }
    }
    return hashes;
}

}  // namespace guiforge::test
