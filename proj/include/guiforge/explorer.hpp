#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "guiforge/a11y.hpp"
#include "guiforge/action.hpp"
#include "guiforge/environment.hpp"

namespace guiforge {

/// One interaction record: pre-state, action, post-state.
struct Triplet {
    ScreenState pre;
    Action action;
    ScreenState post;
    std::string env_id;
    int depth = 0;          // distance from the initial screen
    std::string highlight;  // interacted node, when applicable

    std::string pre_hash() const { return state_hash(pre); }
    std::string post_hash() const { return state_hash(post); }
    /// Stable reference used by task records: t-<digest12>.
    std::string ref() const;
};

struct ExplorationBudget {
    int max_triplets = 1000;
    int max_depth = 8;
    int max_visits_per_screen = 2;
    std::uint64_t seed = 0;
};

/// Supplies contents for editable fields during exploration.
class TextProvider {
  public:
    virtual ~TextProvider() = default;
    virtual std::string text_for(const EnvironmentDefinition& def, const ScreenState& screen,
                                 const A11yNode& field) = 0;
};

/// Deterministic fallback: a fixed seeded table keyed by field role/label
/// (name-like fields get person names, search-like fields query terms, ...).
class LexiconTextProvider : public TextProvider {
  public:
    explicit LexiconTextProvider(std::uint64_t seed = 0) : seed_(seed) {}
    std::string text_for(const EnvironmentDefinition& def, const ScreenState& screen,
                         const A11yNode& field) override;

  private:
    std::uint64_t seed_;
};

class Annotator;

/// Asks the annotation model for contextually appropriate field contents,
/// falling back to the lexicon when the call fails.
class AnnotatorTextProvider : public TextProvider {
  public:
    AnnotatorTextProvider(Annotator& annotator, std::uint64_t fallback_seed = 0)
        : annotator_(&annotator), fallback_(fallback_seed) {}
    std::string text_for(const EnvironmentDefinition& def, const ScreenState& screen,
                         const A11yNode& field) override;

  private:
    Annotator* annotator_;
    LexiconTextProvider fallback_;
};

struct ExploreOptions {
    bool include_long_press = true;  // applied on mobile only
    bool include_back = true;        // navigate_back (mobile) / go_back (web)
};

/// Breadth-first functional discovery: every interactive element of every
/// visited screen is exercised with each applicable action kind; editable
/// fields receive provider text. Output is deduplicated by
/// (pre-hash, canonical action, post-hash) and deterministic for a fixed seed.
std::vector<Triplet> explore(const EnvironmentDefinition& def, const ExplorationBudget& budget,
                             TextProvider& text_provider, const ExploreOptions& options = {});

/// Keeps the first occurrence per (pre-hash, canonical action, post-hash).
std::vector<Triplet> dedupe_triplets(const std::vector<Triplet>& triplets);

/// Triplet store: one JSON record per line, stable field order.
void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets);
void write_triplets_file(const std::string& path, const std::vector<Triplet>& triplets);
std::vector<Triplet> read_triplets(std::istream& in);
std::vector<Triplet> read_triplets_file(const std::string& path);

}  // namespace guiforge
