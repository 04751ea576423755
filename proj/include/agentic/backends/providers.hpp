// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentic/backends/types.hpp"
#include "agentic/sandbox.hpp"

namespace agentic {

/// Receives streamed text.  Returning false asks the provider to stop.
using ChunkCallback = std::function<bool(std::string_view)>;

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    /// When on_chunk is set and the request asks for streaming, text is
    /// surfaced incrementally; the returned text is everything delivered.
    virtual ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk = {}) = 0;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<WebPage> search(std::string_view query, int count) = 0;
};

class RerankProvider {
public:
    virtual ~RerankProvider() = default;
    /// One score in [0, 1] per document, order-aligned with the input.
    virtual std::vector<double> score(std::string_view query, std::span<const std::string> documents) = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
};

class Clock {
public:
    virtual ~Clock() = default;
    virtual double now_seconds() = 0;
};

class SteadyClock final : public Clock {
public:
    double now_seconds() override;
};

/// Always reads `now`; tests advance it by hand.
class ManualClock final : public Clock {
public:
    explicit ManualClock(double start = 0.0) : now_(start) {}
    double now_seconds() override { return now_; }
    void advance(double seconds) { now_ += seconds; }

private:
    double now_;
};

struct TraceNote {
    std::string category;
    std::string detail;

    bool operator==(const TraceNote&) const = default;
};

/// Per-session provider call accounting plus a capture point for trace notes.
/// Calls are counted per channel ("chat.<role>", "search", "rerank", "embed",
/// "exec"); while a Capture is active, every call and note is also appended to
/// the captured note list.
class CallLedger {
public:
    void record_call(const std::string& channel);
    void note(std::string category, std::string detail);

    int count(std::string_view channel) const;
    std::map<std::string, int> counts() const;

    class Capture {
    public:
        Capture(CallLedger& ledger, std::vector<TraceNote>& sink);
        ~Capture();
        Capture(const Capture&) = delete;
        Capture& operator=(const Capture&) = delete;

    private:
        CallLedger& ledger_;
        std::vector<TraceNote>* previous_;
    };

private:
    mutable std::mutex mutex_;
    std::map<std::string, int> counts_;
    std::vector<TraceNote>* sink_ = nullptr;
};

/// The providers one session talks to.  Chat roles without an explicit entry
/// fall back to default_chat.
struct ProviderSet {
    std::map<ChatRole, std::shared_ptr<ChatProvider>> chat;
    std::shared_ptr<ChatProvider> default_chat;
    std::shared_ptr<SearchProvider> search;
    std::shared_ptr<RerankProvider> rerank;
    std::shared_ptr<EmbeddingProvider> embedding;
    std::shared_ptr<CodeExecutor> executor;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<CallLedger> ledger;
    /// Sampling parameters for agent-side calls (one set across all models).
    GenerationParams params;

    /// Throw ConfigError when the channel is not configured.
    ChatProvider& chat_for(ChatRole role) const;
    SearchProvider& search_provider() const;
    RerankProvider& rerank_provider() const;
    EmbeddingProvider& embedding_provider() const;
    CodeExecutor& code_executor() const;
    Clock& session_clock() const;

    bool has_chat(ChatRole role) const;

    /// Appends a trace note through the ledger; no-op without one.
    void note(std::string category, std::string detail) const;
};

struct RetryPolicy {
    int max_retries = 2;
    double base_delay_seconds = 0.5;
    /// Sleeps for the given seconds; defaults to std::this_thread::sleep_for.
    std::function<void(double)> sleep;
};

/// Calls fn, retrying transport-class ProviderErrors with exponential backoff
/// (base, 2*base, ...).  Application errors propagate immediately.
template <typename Fn>
auto with_retry(const RetryPolicy& policy, Fn&& fn) -> decltype(fn());

void sleep_seconds(double seconds);

/// Wraps every provider with call accounting (outermost) and the retry
/// policy.  Streaming chat calls are retried only if no chunk was delivered.
ProviderSet instrument(const ProviderSet& raw, std::shared_ptr<CallLedger> ledger, RetryPolicy retry);

}  // namespace agentic

#include "agentic/backends/retry_impl.hpp"
