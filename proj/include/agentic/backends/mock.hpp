// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentic/backends/providers.hpp"
#include "agentic/errors.hpp"

namespace agentic {

/// One scripted chat reply, or a scripted failure.
struct MockReply {
    std::string text;
    std::optional<ProviderError::Kind> failure;

    static MockReply ok(std::string t) { return {std::move(t), std::nullopt}; }
    static MockReply transport_failure() { return {"scripted transport failure", ProviderError::Kind::Transport}; }
    static MockReply application_failure() {
        return {"scripted application failure", ProviderError::Kind::Application};
    }
};

/// Scripted chat model.  Replies are served in order; keyed scripts take
/// precedence when their key occurs in the request's first user message.
/// Replies longer than params.max_tokens whitespace tokens are cut there
/// (finish_reason "length").  Streaming delivers chunk_size bytes at a time
/// (0 = whole reply in one chunk).
class MockChatProvider final : public ChatProvider {
public:
    using Responder = std::function<MockReply(const ChatRequest&)>;

    MockChatProvider() = default;
    explicit MockChatProvider(std::vector<std::string> replies, std::size_t chunk_size = 0);
    explicit MockChatProvider(Responder responder) : responder_(std::move(responder)) {}

    void push(MockReply reply);
    void add_keyed_script(std::string key, std::vector<MockReply> replies);
    void set_chunk_size(std::size_t n) { chunk_size_ = n; }

    ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk = {}) override;

    std::vector<ChatRequest> requests() const;
    std::size_t call_count() const;

private:
    MockReply next_reply(const ChatRequest& request);

    mutable std::mutex mutex_;
    std::vector<MockReply> script_;
    std::size_t cursor_ = 0;
    std::map<std::string, std::pair<std::vector<MockReply>, std::size_t>> keyed_;
    Responder responder_;
    std::size_t chunk_size_ = 0;
    std::vector<ChatRequest> requests_;
};

/// Search results keyed by exact query string; unknown queries yield nothing.
class MockSearchProvider final : public SearchProvider {
public:
    MockSearchProvider() = default;
    explicit MockSearchProvider(std::map<std::string, std::vector<WebPage>> results)
        : results_(std::move(results)) {}

    void set(std::string query, std::vector<WebPage> pages) { results_[std::move(query)] = std::move(pages); }
    void set_failure(std::optional<ProviderError::Kind> failure) { failure_ = failure; }

    std::vector<WebPage> search(std::string_view query, int count) override;

    struct Call {
        std::string query;
        int count = 0;
    };
    std::vector<Call> calls() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<WebPage>> results_;
    std::optional<ProviderError::Kind> failure_;
    std::vector<Call> calls_;
};

/// Scores documents from, in priority order: the next queued score list,
/// a per-document rule (first rule whose needle occurs in the document), or
/// the default score.  Queued lists are passed through unmodified.
class MockRerankProvider final : public RerankProvider {
public:
    MockRerankProvider() = default;

    void push_scores(std::vector<double> scores) { queued_.push_back(std::move(scores)); }
    void add_rule(std::string needle, double score) { rules_.emplace_back(std::move(needle), score); }
    void set_default_score(double s) { default_score_ = s; }
    void set_failure(std::optional<ProviderError::Kind> failure) { failure_ = failure; }

    std::vector<double> score(std::string_view query, std::span<const std::string> documents) override;

    struct Call {
        std::string query;
        std::vector<std::string> documents;
    };
    std::vector<Call> calls() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::vector<double>> queued_;
    std::size_t cursor_ = 0;
    std::vector<std::pair<std::string, double>> rules_;
    double default_score_ = 0.5;
    std::optional<ProviderError::Kind> failure_;
    std::vector<Call> calls_;
};

/// Returns scripted execution results instead of running anything.
class MockExecutor final : public CodeExecutor {
public:
    explicit MockExecutor(std::vector<ExecutionResult> results = {}) : results_(std::move(results)) {}
    void push(ExecutionResult r) { results_.push_back(std::move(r)); }

    ExecutionResult execute(std::string_view code) override;
    std::vector<std::string> programs() const;

private:
    mutable std::mutex mutex_;
    std::vector<ExecutionResult> results_;
    std::size_t cursor_ = 0;
    std::vector<std::string> programs_;
};

}  // namespace agentic
