#include "guiforge/error.hpp"

namespace guiforge {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::parse_error: return "parse-error";
        case Errc::validation_error: return "validation-error";
        case Errc::invalid_target: return "invalid-target";
        case Errc::invalid_kind: return "invalid-kind";
        case Errc::non_editable_type: return "non-editable-type";
        case Errc::missing_template_variable: return "missing-template-variable";
        case Errc::no_dictionary_found: return "no-dictionary-found";
        case Errc::missing_key: return "missing-key";
        case Errc::unparseable_action: return "unparseable-action";
        case Errc::unknown_kind: return "unknown-kind";
        case Errc::missing_score: return "missing-score";
        case Errc::out_of_range_score: return "out-of-range-score";
        case Errc::annotator_exhausted: return "annotator-exhausted";
        case Errc::transport_error: return "transport-error";
        case Errc::unmapped_mock_request: return "unmapped-mock-request";
        case Errc::zero_vector: return "zero-vector";
        case Errc::fewer_than_two: return "fewer-than-two";
        case Errc::length_mismatch: return "length-mismatch";
        case Errc::constant_input: return "constant-input";
        case Errc::platform_mismatch: return "platform-mismatch";
        case Errc::degenerate_covariance: return "degenerate-covariance";
        case Errc::empty_input: return "empty-input";
        case Errc::base_empty: return "base-empty";
        case Errc::specificity_failure: return "specificity-failure";
        case Errc::store_inconsistency: return "store-inconsistency";
        case Errc::missing_upstream: return "missing-upstream";
        case Errc::config_invalid: return "config-invalid";
        case Errc::write_failure: return "write-failure";
    }
    return "error";
}

}  // namespace guiforge
