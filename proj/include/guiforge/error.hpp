#pragma once

#include <stdexcept>
#include <string>

namespace guiforge {

enum class Errc {
    parse_error,
    validation_error,
    invalid_target,
    invalid_kind,
    non_editable_type,
    missing_template_variable,
    no_dictionary_found,
    missing_key,
    unparseable_action,
    unknown_kind,
    missing_score,
    out_of_range_score,
    annotator_exhausted,
    transport_error,
    unmapped_mock_request,
    zero_vector,
    fewer_than_two,
    length_mismatch,
    constant_input,
    platform_mismatch,
    degenerate_covariance,
    empty_input,
    base_empty,
    specificity_failure,
    store_inconsistency,
    missing_upstream,
    config_invalid,
    write_failure,
};

const char* errc_name(Errc code);

/// Single exception type used across the pipeline; the code carries
/// the machine-checkable category, the message the human-readable detail.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

}  // namespace guiforge
