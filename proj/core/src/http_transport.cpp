#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "logiscan/errors.hpp"
#include "logiscan/gateway.hpp"

#include <nlohmann/json.hpp>

#include <regex>

namespace logiscan {

using nlohmann::json;

HttpChatTransport::HttpChatTransport(ProviderConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key))
{
}

std::string HttpChatTransport::request_body(const ChatRequest& request)
{
    json body;
    body["model"] = request.model;
    body["temperature"] = request.temperature;
    body["messages"] = json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    return body.dump();
}

ChatReply HttpChatTransport::parse_response(std::string_view body)
{
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw ProviderError(std::string("response is not JSON: ") + e.what());
    }
    ChatReply reply;
    try {
        reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError("response has no choices[0].message.content");
    }
    if (const auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
        if (usage->contains("prompt_tokens")) {
            reply.tokens_in = usage->at("prompt_tokens").get<std::size_t>();
        }
        if (usage->contains("completion_tokens")) {
            reply.tokens_out = usage->at("completion_tokens").get<std::size_t>();
        }
    }
    return reply;
}

ChatReply HttpChatTransport::send(const ChatRequest& request)
{
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url_re)) {
        throw ProviderError("malformed endpoint URL: " + config_.endpoint);
    }
    const std::string base = m[1];
    const std::string path = m[2].matched ? std::string(m[2]) : "/";

    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }
    const auto res = client.Post(path, headers, request_body(request), "application/json");
    if (!res) {
        throw ProviderError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError("provider returned HTTP " + std::to_string(res->status));
    }
    return parse_response(res->body);
}

} // namespace logiscan
