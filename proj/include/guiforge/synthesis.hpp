#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "guiforge/explorer.hpp"
#include "guiforge/model_client.hpp"

namespace guiforge {

enum class TaskKind {
    task_oriented,      // mobile
    question_oriented,  // mobile
    info_seeking,       // web
    navigation,         // web
    content_modification,  // web
};
const char* to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view s);

enum class Provenance { reverse_synthesis, task_driven, self_instruct, human };
const char* to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// A low-level instruction, its analysis, and the associated high-level task.
struct InstructionPair {
    std::string task_id;
    std::string sub_instruction;  // low-level
    std::string analysis;
    std::string high_level;
    std::string source_triplet;  // triplet ref; empty for baseline provenances
    std::string env_id;
    Platform platform = Platform::mobile;
    TaskKind task_kind = TaskKind::task_oriented;
    Provenance provenance = Provenance::reverse_synthesis;
    std::vector<std::string> demo_ids;  // self-instruct: the 3 demonstration task ids

    bool operator==(const InstructionPair&) const = default;
};

struct SkipRecord {
    std::string triplet_ref;
    std::string reason;
};

struct TaskSet {
    std::vector<InstructionPair> tasks;
    std::vector<SkipRecord> skips;
};

/// Renders the association template for the triplet's platform; the pre-state
/// image slot carries the highlight annotation (the red-bbox analogue).
ChatRequest build_association_prompt(const Triplet& triplet, const EnvironmentDefinition& def,
                                     const std::string& model_name = "annotator");

struct AssociationFields {
    std::string sub_instruction;
    std::string analysis;
    std::string high_level;
};

/// Extracts the first well-formed {Sub-Instruction, Analysis,
/// High-Level-Instruction} dictionary, tolerating surrounding prose and code
/// fences. Throws no_dictionary_found / missing_key.
AssociationFields parse_association_response(std::string_view text);

/// One annotator round trip; fills sub_instruction and analysis (high-level
/// text is carried along raw, validated by synthesize_high).
InstructionPair synthesize_low(const Triplet& triplet, Annotator& annotator,
                               const EnvironmentDefinition& def);

/// Validates and normalizes the high-level field: task-kind classification
/// plus the specificity check (must mention an entity visible in the triplet
/// or the typed text). Throws Error(specificity_failure) otherwise.
InstructionPair synthesize_high(InstructionPair pair, Annotator& annotator,
                                const Triplet& triplet, const EnvironmentDefinition& def);

/// Maps triplets through synthesize_low then synthesize_high; per-item
/// failures become skip records, never fatal. Truncates to limit.
TaskSet synthesize_task_set(const std::vector<Triplet>& triplets, Annotator& annotator,
                            const EnvironmentDefinition& def, int limit);

/// True when text mentions at least one concrete label word or the typed
/// text from the triplet's screens (the testable "include all critical
/// specifics" stand-in). Exposed for the baseline generators.
bool mentions_screen_entity(std::string_view text, const std::vector<std::string>& entities);
std::vector<std::string> screen_entities(const ScreenState& state);

/// Task store: one JSON record per line, stable field order.
void write_tasks(std::ostream& out, const TaskSet& set);
void write_tasks_file(const std::string& path, const TaskSet& set);
TaskSet read_tasks(std::istream& in);
TaskSet read_tasks_file(const std::string& path);

}  // namespace guiforge
