// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "agentic/backends/providers.hpp"

namespace agentic {

/// Where a live provider lives.  base_url may carry a path prefix
/// ("https://api.example.com/v1"); request paths are appended to it.
struct HttpEndpoint {
    std::string base_url;
    std::string api_key;
    std::string model;
    double timeout_seconds = 120.0;
};

/// Total HTTP requests issued by the live clients in this process.  Mock and
/// replay sessions leave it unchanged.
std::size_t http_requests_issued();

/// Chat-completion client for the common OpenAI-compatible wire protocol:
/// POST {base}/chat/completions, streaming via server-sent events.  top_k and
/// repetition_penalty are sent as extra body fields (vLLM / DeepSeek style).
class OpenAIChatClient final : public ChatProvider {
public:
    explicit OpenAIChatClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk = {}) override;

    /// Request body as sent on the wire.
    nlohmann::json request_body(const ChatRequest& request) const;

private:
    HttpEndpoint endpoint_;
};

/// Generic JSON search client: POST {base}/search {"query", "count"} ->
/// {"results": [{"url", "title", "content" | "snippet"}]}.
class HttpSearchClient final : public SearchProvider {
public:
    explicit HttpSearchClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<WebPage> search(std::string_view query, int count) override;

private:
    HttpEndpoint endpoint_;
};

/// Rerank client for the Cohere-style protocol: POST {base}/rerank
/// {"model", "query", "documents", "top_n"} -> {"results": [{"index",
/// "relevance_score"}]}.  Scores are re-aligned to input order; a result
/// count different from the document count is an error.
class HttpRerankClient final : public RerankProvider {
public:
    explicit HttpRerankClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<double> score(std::string_view query, std::span<const std::string> documents) override;

private:
    HttpEndpoint endpoint_;
};

/// OpenAI-style embeddings: POST {base}/embeddings {"model", "input"} ->
/// {"data": [{"index", "embedding"}]}.
class OpenAIEmbeddingClient final : public EmbeddingProvider {
public:
    explicit OpenAIEmbeddingClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

private:
    HttpEndpoint endpoint_;
};

/// Incremental server-sent-events decoder for chat-completion streams.
class SseDecoder {
public:
    /// Feeds raw bytes; returns content deltas completed by them.
    std::vector<std::string> feed(std::string_view bytes);

    bool done() const noexcept { return done_; }
    const std::string& finish_reason() const noexcept { return finish_reason_; }
    int completion_tokens() const noexcept { return completion_tokens_; }

private:
    void handle_event(std::string_view data, std::vector<std::string>& out);

    std::string buffer_;
    bool done_ = false;
    std::string finish_reason_;
    int completion_tokens_ = -1;
};

}  // namespace agentic
