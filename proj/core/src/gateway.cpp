#include "logiscan/gateway.hpp"

#include "logiscan/errors.hpp"
#include "logiscan/tokens.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <thread>

namespace logiscan {

using nlohmann::json;
using nlohmann::ordered_json;

std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

std::string_view to_string(Purpose p) noexcept
{
    switch (p) {
    case Purpose::Scenario: return "scenario";
    case Purpose::Property: return "property";
    case Purpose::Recognition: return "recognition";
    }
    return "?";
}

std::optional<Purpose> purpose_from(std::string_view s)
{
    for (const auto p : {Purpose::Scenario, Purpose::Property, Purpose::Recognition}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

std::string_view to_string(GatewayMode m) noexcept
{
    switch (m) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Record: return "record";
    case GatewayMode::Replay: return "replay";
    }
    return "?";
}

std::optional<GatewayMode> gateway_mode_from(std::string_view s)
{
    for (const auto m : {GatewayMode::Live, GatewayMode::Record, GatewayMode::Replay}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    return std::nullopt;
}

std::string ExchangeKey::describe() const
{
    std::string out = std::string(to_string(purpose)) + "/" + rule_id + "/" + function_id + "/" + prompt_sha256;
    if (attempt != 0) {
        out += "#" + std::to_string(attempt);
    }
    return out;
}

std::string prompt_hash(std::string_view system, std::string_view user)
{
    std::string joined;
    joined.reserve(system.size() + user.size() + 1);
    joined.append(system).append("\n").append(user);
    return sha256_hex(joined);
}

std::string exchange_to_jsonl(const LlmExchange& ex)
{
    ordered_json j;
    j["purpose"] = to_string(ex.key.purpose);
    j["rule_id"] = ex.key.rule_id;
    j["function_id"] = ex.key.function_id;
    j["prompt_sha256"] = ex.key.prompt_sha256;
    j["attempt"] = ex.key.attempt;
    j["system"] = ex.system;
    j["user"] = ex.user;
    j["response"] = ex.response;
    j["tokens_in"] = ex.tokens_in;
    j["tokens_out"] = ex.tokens_out;
    j["latency_ms"] = ex.latency_ms;
    return j.dump();
}

LlmExchange exchange_from_jsonl(std::string_view line)
{
    const json j = json::parse(line);
    LlmExchange ex;
    const auto purpose = purpose_from(j.at("purpose").get<std::string>());
    if (!purpose) {
        throw Error("unknown purpose in transcript line");
    }
    ex.key.purpose = *purpose;
    ex.key.rule_id = j.at("rule_id").get<std::string>();
    ex.key.function_id = j.at("function_id").get<std::string>();
    ex.key.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
    ex.key.attempt = j.value("attempt", 0);
    ex.system = j.at("system").get<std::string>();
    ex.user = j.at("user").get<std::string>();
    ex.response = j.at("response").get<std::string>();
    ex.tokens_in = j.at("tokens_in").get<std::size_t>();
    ex.tokens_out = j.at("tokens_out").get<std::size_t>();
    ex.latency_ms = j.value("latency_ms", 0.0);
    return ex;
}

Transcript Transcript::load(const std::filesystem::path& file)
{
    Transcript t;
    std::ifstream in(file);
    if (!in) {
        return t;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            t.append(exchange_from_jsonl(line));
        } catch (const json::exception& e) {
            throw Error(file.string() + ":" + std::to_string(lineno) + ": bad transcript line: " + e.what());
        }
    }
    return t;
}

const LlmExchange* Transcript::find(const ExchangeKey& key) const
{
    std::lock_guard lock(mutex_);
    const auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

void Transcript::append(const LlmExchange& ex, const std::filesystem::path* file)
{
    std::lock_guard lock(mutex_);
    if (index_.contains(ex.key)) {
        throw Error("duplicate transcript key " + ex.key.describe());
    }
    index_.emplace(ex.key, entries_.size());
    entries_.push_back(ex);
    if (file) {
        std::ofstream out(*file, std::ios::app);
        if (!out) {
            throw IoError("cannot append to transcript " + file->string());
        }
        out << exchange_to_jsonl(ex) << '\n';
    }
}

Gateway::Gateway(ProviderConfig config,
                 GatewayMode mode,
                 std::shared_ptr<ChatTransport> transport,
                 std::optional<std::filesystem::path> transcript_path,
                 std::size_t max_in_flight,
                 Sleeper sleeper)
    : config_(std::move(config)),
      mode_(mode),
      transport_(std::move(transport)),
      transcript_path_(std::move(transcript_path)),
      sleeper_(std::move(sleeper)),
      slots_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_in_flight, 1, 64)))
{
    if (mode_ != GatewayMode::Replay && !transport_) {
        throw ConfigError(std::string(to_string(mode_)) + " mode needs a chat transport");
    }
    if (mode_ != GatewayMode::Live && !transcript_path_) {
        throw ConfigError(std::string(to_string(mode_)) + " mode needs a transcript path");
    }
    if (mode_ == GatewayMode::Replay) {
        if (!std::filesystem::exists(*transcript_path_)) {
            throw ConfigError("transcript not found: " + transcript_path_->string());
        }
        transcript_ = Transcript::load(*transcript_path_);
    } else if (mode_ == GatewayMode::Record) {
        std::ofstream truncate(*transcript_path_, std::ios::trunc);
        if (!truncate) {
            throw ConfigError("cannot write transcript " + transcript_path_->string());
        }
    }
    if (!sleeper_) {
        sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

ChatReply Gateway::send_with_retry(const ChatRequest& request)
{
    std::chrono::milliseconds backoff{1000};
    for (int attempt = 1;; ++attempt) {
        try {
            return transport_->send(request);
        } catch (const ProviderError&) {
            if (attempt >= kMaxAttempts) {
                throw;
            }
        }
        sleeper_(backoff);
        backoff *= 2;
    }
}

LlmExchange Gateway::complete(Purpose purpose,
                              const std::string& rule_id,
                              const std::string& function_id,
                              const std::string& system,
                              const std::string& user,
                              int attempt)
{
    LlmExchange ex;
    ex.key = {purpose, rule_id, function_id, prompt_hash(system, user), attempt};
    ex.system = system;
    ex.user = user;

    if (mode_ == GatewayMode::Replay) {
        const auto* hit = transcript_.find(ex.key);
        if (!hit) {
            throw ReplayMiss("no recorded exchange for " + ex.key.describe());
        }
        ex = *hit;
    } else {
        ChatRequest request{config_.model, config_.temperature, {{"system", system}, {"user", user}}};
        slots_.acquire();
        const auto start = std::chrono::steady_clock::now();
        ChatReply reply;
        try {
            reply = send_with_retry(request);
        } catch (...) {
            slots_.release();
            throw;
        }
        slots_.release();
        ex.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        ex.response = std::move(reply.text);
        ex.tokens_in = reply.tokens_in.value_or(estimate_tokens(system) + estimate_tokens(user));
        ex.tokens_out = reply.tokens_out.value_or(estimate_tokens(ex.response));
        if (mode_ == GatewayMode::Record) {
            transcript_.append(ex, &*transcript_path_);
        }
    }
    std::lock_guard lock(ledger_mutex_);
    ledger_.push_back(ex);
    return ex;
}

std::vector<LlmExchange> Gateway::exchanges() const
{
    std::lock_guard lock(ledger_mutex_);
    return ledger_;
}

} // namespace logiscan
