#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace logiscan {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

enum class Purpose { Scenario, Property, Recognition };
std::string_view to_string(Purpose p) noexcept;
std::optional<Purpose> purpose_from(std::string_view s);

enum class GatewayMode { Live, Record, Replay };
std::string_view to_string(GatewayMode m) noexcept;
std::optional<GatewayMode> gateway_mode_from(std::string_view s);

struct ProviderConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::size_t max_context_tokens = 4096;
    double price_in_per_1k = 0.0;
    double price_out_per_1k = 0.0;
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_seconds = 60;
};

/// Replay key. `attempt` separates the identical re-ask made after an
/// unparseable answer.
struct ExchangeKey {
    Purpose purpose = Purpose::Scenario;
    std::string rule_id;
    std::string function_id;
    std::string prompt_sha256;
    int attempt = 0;

    auto tie() const { return std::tie(purpose, rule_id, function_id, prompt_sha256, attempt); }
    bool operator<(const ExchangeKey& o) const { return tie() < o.tie(); }
    bool operator==(const ExchangeKey& o) const { return tie() == o.tie(); }
    std::string describe() const;
};

struct LlmExchange {
    ExchangeKey key;
    std::string system;
    std::string user;
    std::string response;
    std::size_t tokens_in = 0;
    std::size_t tokens_out = 0;
    double latency_ms = 0.0;
};

/// Hash binding a prompt pair to its replay entry.
std::string prompt_hash(std::string_view system, std::string_view user);

std::string exchange_to_jsonl(const LlmExchange& ex);
LlmExchange exchange_from_jsonl(std::string_view line);

/// JSON-lines store of exchanges. Appends are serialized.
class Transcript {
public:
    Transcript() = default;
    Transcript(Transcript&& o) noexcept : entries_(std::move(o.entries_)), index_(std::move(o.index_)) {}
    Transcript& operator=(Transcript&& o) noexcept
    {
        entries_ = std::move(o.entries_);
        index_ = std::move(o.index_);
        return *this;
    }

    /// Loads an existing file; a missing file yields an empty transcript.
    static Transcript load(const std::filesystem::path& file);

    const LlmExchange* find(const ExchangeKey& key) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<LlmExchange>& entries() const noexcept { return entries_; }

    /// Adds in memory and, when `file` is set, appends one line to it.
    void append(const LlmExchange& ex, const std::filesystem::path* file = nullptr);

private:
    std::vector<LlmExchange> entries_;
    std::map<ExchangeKey, std::size_t> index_;
    mutable std::mutex mutex_;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = 0.0;
    std::vector<ChatMessage> messages;
};

struct ChatReply {
    std::string text;
    std::optional<std::size_t> tokens_in;
    std::optional<std::size_t> tokens_out;
};

/// Sends one chat-completion request. Throws ProviderError on failure.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual ChatReply send(const ChatRequest& request) = 0;
};

/// OpenAI-style chat-completions over HTTP(S).
class HttpChatTransport : public ChatTransport {
public:
    HttpChatTransport(ProviderConfig config, std::string api_key);
    ChatReply send(const ChatRequest& request) override;

    /// Request body for `request` (exposed for tests).
    static std::string request_body(const ChatRequest& request);
    /// Parses a chat-completions response body.
    static ChatReply parse_response(std::string_view body);

private:
    ProviderConfig config_;
    std::string api_key_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class Gateway {
public:
    /// Live and record modes need a transport; record and replay need a
    /// transcript path. Throws ConfigError otherwise.
    Gateway(ProviderConfig config,
            GatewayMode mode,
            std::shared_ptr<ChatTransport> transport,
            std::optional<std::filesystem::path> transcript_path,
            std::size_t max_in_flight = 4,
            Sleeper sleeper = {});

    /// One fresh two-message conversation. Replay misses throw ReplayMiss;
    /// provider failures are retried three times with 1s, 2s backoff.
    LlmExchange complete(Purpose purpose,
                         const std::string& rule_id,
                         const std::string& function_id,
                         const std::string& system,
                         const std::string& user,
                         int attempt = 0);

    /// Every exchange completed so far, in completion order.
    std::vector<LlmExchange> exchanges() const;

    GatewayMode mode() const noexcept { return mode_; }
    const ProviderConfig& config() const noexcept { return config_; }

    static constexpr int kMaxAttempts = 3;

private:
    ChatReply send_with_retry(const ChatRequest& request);

    ProviderConfig config_;
    GatewayMode mode_;
    std::shared_ptr<ChatTransport> transport_;
    std::optional<std::filesystem::path> transcript_path_;
    Transcript transcript_;
    Sleeper sleeper_;
    std::counting_semaphore<64> slots_;
    mutable std::mutex ledger_mutex_;
    std::vector<LlmExchange> ledger_;
};

} // namespace logiscan
