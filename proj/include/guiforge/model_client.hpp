#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace guiforge {

/// One content part of a chat message. Image parts carry the symbolic
/// screenshot token plus its textual rendering, never pixels.
struct MessagePart {
    enum class Type { text, image_token };
    Type type = Type::text;
    std::string text;       // text parts
    std::string token;      // image parts: screenshot token (state digest)
    std::string rendering;  // image parts: symbolic screen rendering

    bool operator==(const MessagePart&) const = default;
};

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::vector<MessagePart> parts;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model_name;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::vector<ChatMessage> messages;

    bool operator==(const ChatRequest&) const = default;
};

ChatRequest make_user_request(std::string model_name, std::string text,
                              std::vector<MessagePart> images = {});

/// Canonical JSON bytes of a request (sorted keys); the digest keys mock
/// lookups, fixture records and the audit log.
std::string canonical_request_bytes(const ChatRequest& request);
std::string request_digest(const ChatRequest& request);

nlohmann::json request_to_json(const ChatRequest& request);

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 250;
    double backoff_multiplier = 2.0;
};

/// Appends one line per call: digest, transport, outcome, attempts, latency.
class AuditLog {
  public:
    AuditLog() = default;
    explicit AuditLog(std::string path) : path_(std::move(path)) {}

    void record(const std::string& digest, const std::string& transport,
                const std::string& outcome, int attempts, std::int64_t latency_ms,
                std::size_t response_bytes);

    int calls(const std::string& transport = "") const;

  private:
    struct Entry {
        std::string digest, transport, outcome;
        int attempts;
        std::int64_t latency_ms;
        std::size_t response_bytes;
    };
    mutable std::mutex mu_;
    std::string path_;
    std::vector<Entry> entries_;
};

/// Transport abstraction: one blocking request/response exchange.
/// Throws Error(transport_error) on failure; transient failures may be
/// retried by the caller.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual std::string send(const ChatRequest& request) = 0;
    virtual const char* name() const = 0;
    /// Whether a failed send is worth retrying (network hiccups yes,
    /// missing fixtures no).
    virtual bool retryable() const { return false; }
};

/// digest -> canned response table for record/replay testing.
class ReplayTransport : public Transport {
  public:
    ReplayTransport() = default;
    explicit ReplayTransport(const std::string& fixture_path);

    std::string send(const ChatRequest& request) override;
    const char* name() const override { return "replay"; }

    void add(const std::string& digest, const std::string& response);
    bool contains(const std::string& digest) const;
    void save(const std::string& fixture_path) const;

  private:
    std::map<std::string, std::string> table_;
};

/// Adapts a plain function; used for scripted annotators in tests and for
/// the deterministic offline responders.
class CallbackTransport : public Transport {
  public:
    using Fn = std::function<std::string(const ChatRequest&)>;
    explicit CallbackTransport(Fn fn, std::string name = "callback")
        : fn_(std::move(fn)), name_(std::move(name)) {}
    std::string send(const ChatRequest& request) override { return fn_(request); }
    const char* name() const override { return name_.c_str(); }

  private:
    Fn fn_;
    std::string name_;
};

struct EndpointConfig {
    std::string base_url;     // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";
    std::string api_key;      // bearer token; empty = no Authorization header
    int timeout_seconds = 60;
};

/// Chat-completions wire protocol over HTTP.
class LiveTransport : public Transport {
  public:
    explicit LiveTransport(EndpointConfig config);
    std::string send(const ChatRequest& request) override;
    const char* name() const override { return "live"; }
    bool retryable() const override { return true; }

  private:
    EndpointConfig config_;
};

/// Wraps another transport and records every exchange into a replay table.
class RecordingTransport : public Transport {
  public:
    RecordingTransport(std::unique_ptr<Transport> inner, ReplayTransport& sink)
        : inner_(std::move(inner)), sink_(&sink) {}
    std::string send(const ChatRequest& request) override;
    const char* name() const override { return inner_->name(); }
    bool retryable() const override { return inner_->retryable(); }

  private:
    std::unique_ptr<Transport> inner_;
    ReplayTransport* sink_;
};

/// An annotation/judging/executing model behind retries, a concurrency bound
/// and call logging. Copyable handles share one underlying client.
class Annotator {
  public:
    Annotator(std::string model_name, std::unique_ptr<Transport> transport,
              RetryPolicy retry = {}, int concurrency_bound = 4);

    const std::string& model_name() const { return model_name_; }

    /// One round trip; retries per policy on retryable transports with
    /// non-decreasing backoff delays. Every call is audited.
    std::string chat(const ChatRequest& request);

    /// Convenience: single user message, default decoding settings.
    std::string ask(const std::string& text, std::vector<MessagePart> images = {});

    void set_audit_log(std::shared_ptr<AuditLog> log) { impl_->audit = std::move(log); }
    AuditLog* audit_log() const { return impl_->audit.get(); }

    /// Test hook: replaces real sleeping between retries.
    void set_sleeper(std::function<void(int)> sleeper) { impl_->sleeper = std::move(sleeper); }

    int concurrency_bound() const { return impl_->bound; }

  private:
    struct Impl {
        std::unique_ptr<Transport> transport;
        RetryPolicy retry;
        int bound;
        int in_flight = 0;
        std::mutex mu;
        std::condition_variable_any cv;
        std::shared_ptr<AuditLog> audit;
        std::function<void(int)> sleeper;
    };
    std::string model_name_;
    std::shared_ptr<Impl> impl_;
};

/// Persists digest -> response for later replay; returns the digest.
std::string record_fixture(ReplayTransport& table, const ChatRequest& request,
                           const std::string& response);

}  // namespace guiforge
