// SPDX-License-Identifier: Apache-2.0
#include "agentic/backends/http.hpp"

#include <atomic>

#include <httplib.h>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic {

namespace {

std::atomic<std::size_t> g_requests{0};

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& base) {
    auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + base);
    auto path_start = base.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base;
    } else {
        out.scheme_host_port = base.substr(0, path_start);
        out.path_prefix = base.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

struct HttpOutcome {
    int status = 0;
    std::string body;
    bool cancelled = false;
};

// POSTs a JSON body.  body_sink, when set, receives body bytes as they arrive
// and may return false to cancel; otherwise the body is buffered.
HttpOutcome post_json(const HttpEndpoint& ep, const std::string& path, const nlohmann::json& body,
                      const std::function<bool(std::string_view)>& body_sink = {}) {
    auto url = parse_base_url(ep.base_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(std::chrono::duration<double>(std::min(ep.timeout_seconds, 30.0)));
    client.set_read_timeout(std::chrono::duration<double>(ep.timeout_seconds));
    client.set_write_timeout(std::chrono::duration<double>(ep.timeout_seconds));

    httplib::Request req;
    req.method = "POST";
    req.path = url.path_prefix + path;
    req.body = body.dump();
    req.set_header("Content-Type", "application/json");
    req.set_header("Accept", body_sink ? "text/event-stream" : "application/json");
    if (!ep.api_key.empty()) req.set_header("Authorization", "Bearer " + ep.api_key);

    HttpOutcome out;
    bool sink_stopped = false;
    req.response_handler = [&](const httplib::Response& res) {
        out.status = res.status;
        return true;
    };
    req.content_receiver = [&](const char* data, size_t len, uint64_t, uint64_t) {
        std::string_view chunk(data, len);
        if (body_sink && out.status >= 200 && out.status < 300) {
            if (!body_sink(chunk)) {
                sink_stopped = true;
                return false;
            }
            return true;
        }
        out.body.append(chunk);
        return true;
    };

    ++g_requests;
    auto result = client.send(req);
    if (!result) {
        if (sink_stopped && result.error() == httplib::Error::Canceled) {
            out.cancelled = true;
            return out;
        }
        throw transport_error("HTTP POST " + ep.base_url + path + " failed: " + httplib::to_string(result.error()));
    }
    out.status = result->status;
    if (out.status < 200 || out.status >= 300) {
        throw application_error("HTTP " + std::to_string(out.status) + " from " + ep.base_url + path + ": " +
                                out.body.substr(0, 512));
    }
    return out;
}

nlohmann::json parse_body(const HttpOutcome& out, const std::string& what) {
    try {
        return nlohmann::json::parse(out.body);
    } catch (const nlohmann::json::exception& e) {
        throw application_error(what + ": malformed JSON response: " + e.what());
    }
}

}  // namespace

std::size_t http_requests_issued() { return g_requests.load(); }

std::vector<std::string> SseDecoder::feed(std::string_view bytes) {
    std::vector<std::string> out;
    buffer_.append(bytes);
    while (true) {
        // Events end with a blank line; tolerate CRLF framing.
        auto lf = buffer_.find("\n\n");
        auto crlf = buffer_.find("\r\n\r\n");
        std::size_t end = std::min(lf, crlf);
        if (end == std::string::npos) break;
        std::size_t sep = (end == crlf) ? 4 : 2;
        std::string event = buffer_.substr(0, end);
        buffer_.erase(0, end + sep);
        std::string data;
        for (const auto& line : text::split_lines(event)) {
            if (line.rfind("data:", 0) == 0) {
                auto payload = std::string_view(line).substr(5);
                if (!payload.empty() && payload.front() == ' ') payload.remove_prefix(1);
                if (!data.empty()) data.push_back('\n');
                data.append(payload);
            }
        }
        if (!data.empty()) handle_event(data, out);
    }
    return out;
}

void SseDecoder::handle_event(std::string_view data, std::vector<std::string>& out) {
    if (data == "[DONE]") {
        done_ = true;
        return;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(data);
    } catch (const nlohmann::json::exception&) {
        throw application_error("malformed stream event: " + std::string(data.substr(0, 200)));
    }
    if (j.contains("usage") && j["usage"].is_object()) {
        completion_tokens_ = j["usage"].value("completion_tokens", completion_tokens_);
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return;
    const auto& choice = j["choices"][0];
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        finish_reason_ = choice["finish_reason"].get<std::string>();
    }
    if (choice.contains("delta") && choice["delta"].contains("content") && choice["delta"]["content"].is_string()) {
        auto piece = choice["delta"]["content"].get<std::string>();
        if (!piece.empty()) out.push_back(std::move(piece));
    }
}

nlohmann::json OpenAIChatClient::request_body(const ChatRequest& request) const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : request.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    nlohmann::json body = {
        {"model", endpoint_.model},
        {"messages", msgs},
        {"max_tokens", request.params.max_tokens},
        {"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"top_k", request.params.top_k},
        {"repetition_penalty", request.params.repetition_penalty},
        {"stream", request.stream},
    };
    if (request.stream) body["stream_options"] = {{"include_usage", true}};
    return body;
}

ChatResponse OpenAIChatClient::complete(const ChatRequest& request, const ChunkCallback& on_chunk) {
    request.validate();
    auto body = request_body(request);
    ChatResponse response;
    if (request.stream) {
        SseDecoder decoder;
        bool stopped = false;
        auto sink = [&](std::string_view bytes) {
            for (auto& piece : decoder.feed(bytes)) {
                response.text += piece;
                if (on_chunk && !on_chunk(piece)) {
                    stopped = true;
                    return false;
                }
            }
            return true;
        };
        post_json(endpoint_, "/chat/completions", body, sink);
        if (!stopped && !decoder.done() && decoder.finish_reason().empty()) {
            throw transport_error("chat stream ended before completion");
        }
        response.finish_reason = stopped ? "stop" : (decoder.finish_reason().empty() ? "stop" : decoder.finish_reason());
        response.token_count = (!stopped && decoder.completion_tokens() >= 0)
                                   ? decoder.completion_tokens()
                                   : static_cast<int>(text::count_tokens(response.text));
        return response;
    }

    auto out = post_json(endpoint_, "/chat/completions", body);
    auto j = parse_body(out, "chat completion");
    try {
        const auto& choice = j.at("choices").at(0);
        const auto& content = choice.at("message").at("content");
        response.text = content.is_string() ? content.get<std::string>() : std::string();
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
            response.finish_reason = choice["finish_reason"].get<std::string>();
        }
        if (j.contains("usage") && j["usage"].is_object()) {
            response.token_count = j["usage"].value("completion_tokens", 0);
        } else {
            response.token_count = static_cast<int>(text::count_tokens(response.text));
        }
    } catch (const nlohmann::json::exception& e) {
        throw application_error(std::string("chat completion: unexpected response shape: ") + e.what());
    }
    return response;
}

std::vector<WebPage> HttpSearchClient::search(std::string_view query, int count) {
    auto out = post_json(endpoint_, "/search", {{"query", query}, {"count", count}});
    auto j = parse_body(out, "search");
    try {
        return j.at("results").get<std::vector<WebPage>>();
    } catch (const nlohmann::json::exception& e) {
        throw application_error(std::string("search: unexpected response shape: ") + e.what());
    }
}

std::vector<double> HttpRerankClient::score(std::string_view query, std::span<const std::string> documents) {
    if (documents.empty()) throw PreconditionError("rerank called with no documents");
    nlohmann::json body = {{"model", endpoint_.model},
                           {"query", query},
                           {"documents", std::vector<std::string>(documents.begin(), documents.end())},
                           {"top_n", documents.size()}};
    auto j = parse_body(post_json(endpoint_, "/rerank", body), "rerank");
    std::vector<double> scores(documents.size(), -1.0);
    try {
        const auto& results = j.at("results");
        if (results.size() != documents.size()) {
            throw application_error("rerank returned " + std::to_string(results.size()) + " scores for " +
                                    std::to_string(documents.size()) + " documents");
        }
        for (const auto& r : results) {
            auto index = r.at("index").get<std::size_t>();
            if (index >= scores.size()) throw application_error("rerank index out of range");
            scores[index] = std::clamp(r.at("relevance_score").get<double>(), 0.0, 1.0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw application_error(std::string("rerank: unexpected response shape: ") + e.what());
    }
    for (double s : scores) {
        if (s < 0.0) throw application_error("rerank response skipped a document");
    }
    return scores;
}

std::vector<std::vector<float>> OpenAIEmbeddingClient::embed(std::span<const std::string> texts) {
    nlohmann::json body = {{"model", endpoint_.model},
                           {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    auto j = parse_body(post_json(endpoint_, "/embeddings", body), "embeddings");
    std::vector<std::vector<float>> out(texts.size());
    try {
        const auto& data = j.at("data");
        if (data.size() != texts.size()) throw application_error("embedding count mismatch");
        for (const auto& d : data) {
            auto index = d.at("index").get<std::size_t>();
            if (index >= out.size()) throw application_error("embedding index out of range");
            out[index] = d.at("embedding").get<std::vector<float>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw application_error(std::string("embeddings: unexpected response shape: ") + e.what());
    }
    return out;
}

}  // namespace agentic
