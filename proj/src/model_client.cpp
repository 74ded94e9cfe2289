#include "guiforge/model_client.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "guiforge/digest.hpp"
#include "guiforge/error.hpp"

namespace guiforge {

using nlohmann::json;

ChatRequest make_user_request(std::string model_name, std::string text,
                              std::vector<MessagePart> images) {
    ChatRequest req;
    req.model_name = std::move(model_name);
    ChatMessage msg;
    msg.role = "user";
    msg.parts.push_back({MessagePart::Type::text, std::move(text), "", ""});
    for (auto& img : images) msg.parts.push_back(std::move(img));
    req.messages.push_back(std::move(msg));
    return req;
}

nlohmann::json request_to_json(const ChatRequest& request) {
    json j;
    j["model"] = request.model_name;
    j["temperature"] = request.temperature;
    j["max_tokens"] = request.max_tokens;
    j["messages"] = json::array();
    for (const auto& msg : request.messages) {
        json parts = json::array();
        for (const auto& p : msg.parts) {
            if (p.type == MessagePart::Type::text) {
                parts.push_back({{"type", "text"}, {"text", p.text}});
            } else {
                parts.push_back({{"type", "image_token"},
                                 {"token", p.token},
                                 {"rendering", p.rendering}});
            }
        }
        j["messages"].push_back({{"role", msg.role}, {"content", parts}});
    }
    return j;
}

std::string canonical_request_bytes(const ChatRequest& request) {
    return request_to_json(request).dump();
}

std::string request_digest(const ChatRequest& request) {
    return sha256_hex(canonical_request_bytes(request));
}

void AuditLog::record(const std::string& digest, const std::string& transport,
                      const std::string& outcome, int attempts, std::int64_t latency_ms,
                      std::size_t response_bytes) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.push_back({digest, transport, outcome, attempts, latency_ms, response_bytes});
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        nlohmann::ordered_json rec;
        rec["digest"] = digest;
        rec["transport"] = transport;
        rec["outcome"] = outcome;
        rec["attempts"] = attempts;
        rec["latency_ms"] = latency_ms;
        rec["response_bytes"] = response_bytes;
        out << rec.dump() << "\n";
    }
}

int AuditLog::calls(const std::string& transport) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (transport.empty()) return static_cast<int>(entries_.size());
    int n = 0;
    for (const auto& e : entries_)
        if (e.transport == transport) ++n;
    return n;
}

ReplayTransport::ReplayTransport(const std::string& fixture_path) {
    std::ifstream in(fixture_path);
    if (!in) throw Error(Errc::parse_error, "cannot open fixture table " + fixture_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw Error(Errc::parse_error, "malformed fixture line in " + fixture_path);
        table_[rec.at("digest").get<std::string>()] = rec.at("response").get<std::string>();
    }
}

std::string ReplayTransport::send(const ChatRequest& request) {
    std::string digest = request_digest(request);
    auto it = table_.find(digest);
    if (it == table_.end())
        throw Error(Errc::unmapped_mock_request, "no fixture for request digest " + digest);
    return it->second;
}

void ReplayTransport::add(const std::string& digest, const std::string& response) {
    table_[digest] = response;
}

bool ReplayTransport::contains(const std::string& digest) const {
    return table_.count(digest) > 0;
}

void ReplayTransport::save(const std::string& fixture_path) const {
    std::ofstream out(fixture_path);
    if (!out) throw Error(Errc::write_failure, "cannot write fixture table " + fixture_path);
    for (const auto& [digest, response] : table_) {
        nlohmann::ordered_json rec;
        rec["digest"] = digest;
        rec["response"] = response;
        out << rec.dump() << "\n";
    }
}

LiveTransport::LiveTransport(EndpointConfig config) : config_(std::move(config)) {}

std::string LiveTransport::send(const ChatRequest& request) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(config_.path, headers, canonical_request_bytes(request),
                           "application/json");
    if (!res)
        throw Error(Errc::transport_error,
                    "request to " + config_.base_url + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error(Errc::transport_error,
                    "endpoint returned HTTP " + std::to_string(res->status));
    json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.contains("choices") || body["choices"].empty())
        throw Error(Errc::transport_error, "malformed chat-completions response");
    const auto& message = body["choices"][0].at("message");
    return message.at("content").get<std::string>();
}

std::string RecordingTransport::send(const ChatRequest& request) {
    std::string response = inner_->send(request);
    sink_->add(request_digest(request), response);
    return response;
}

Annotator::Annotator(std::string model_name, std::unique_ptr<Transport> transport,
                     RetryPolicy retry, int concurrency_bound)
    : model_name_(std::move(model_name)), impl_(std::make_shared<Impl>()) {
    impl_->transport = std::move(transport);
    impl_->retry = retry;
    impl_->bound = concurrency_bound;
    impl_->sleeper = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

std::string Annotator::chat(const ChatRequest& request) {
    if (request.messages.empty())
        throw Error(Errc::validation_error, "chat request needs at least one message");
    bool has_user = false;
    for (const auto& m : request.messages) has_user |= m.role == "user";
    if (!has_user)
        throw Error(Errc::validation_error, "chat request needs at least one user message");

    Impl& impl = *impl_;
    {
        std::unique_lock<std::mutex> lock(impl.mu);
        impl.cv.wait(lock, [&] { return impl.in_flight < impl.bound; });
        ++impl.in_flight;
    }
    struct Slot {
        Impl& impl;
        ~Slot() {
            {
                std::lock_guard<std::mutex> lock(impl.mu);
                --impl.in_flight;
            }
            impl.cv.notify_one();
        }
    } slot{impl};

    const std::string digest = request_digest(request);
    const int max_attempts = std::max(1, impl.retry.max_attempts);
    int delay = impl.retry.base_delay_ms;
    auto started = std::chrono::steady_clock::now();
    for (int attempt = 1;; ++attempt) {
        try {
            std::string response = impl.transport->send(request);
            auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();
            if (impl.audit)
                impl.audit->record(digest, impl.transport->name(), "ok", attempt, latency,
                                   response.size());
            return response;
        } catch (const Error& e) {
            bool retry_it = impl.transport->retryable() && attempt < max_attempts;
            if (!retry_it) {
                auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();
                if (impl.audit)
                    impl.audit->record(digest, impl.transport->name(), "error", attempt, latency,
                                       0);
                throw;
            }
            impl.sleeper(delay);
            delay = static_cast<int>(delay * impl.retry.backoff_multiplier);
        }
    }
}

std::string Annotator::ask(const std::string& text, std::vector<MessagePart> images) {
    return chat(make_user_request(model_name_, text, std::move(images)));
}

std::string record_fixture(ReplayTransport& table, const ChatRequest& request,
                           const std::string& response) {
    std::string digest = request_digest(request);
    table.add(digest, response);
    return digest;
}

}  // namespace guiforge
