#pragma once

#include <memory>
#include <string>

#include "guiforge/model_client.hpp"

namespace guiforge {

/// Deterministic offline responders: pure functions of the request that
/// synthesize plausible annotator / judge / executor replies, so full
/// pipeline runs need no endpoint and no fixture tables. Dispatch keys off
/// marker phrases the prompt templates always contain.
std::string stub_respond(const ChatRequest& request);

std::string stub_association_response(const ChatRequest& request);
std::string stub_judge_response(const ChatRequest& request);
std::string stub_executor_mobile_response(const ChatRequest& request);
std::string stub_executor_web_response(const ChatRequest& request);
std::string stub_task_list_response(const ChatRequest& request);

/// Annotator wired to stub_respond.
Annotator make_stub_annotator(const std::string& model_name = "stub-annotator");

}  // namespace guiforge
