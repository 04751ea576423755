// SPDX-License-Identifier: Apache-2.0
#include "agentic/backends/providers.hpp"

#include <chrono>
#include <thread>

namespace agentic {

double SteadyClock::now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void sleep_seconds(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void CallLedger::record_call(const std::string& channel) {
    std::lock_guard lock(mutex_);
    ++counts_[channel];
    if (sink_ != nullptr) sink_->push_back({"provider_call", channel});
}

void CallLedger::note(std::string category, std::string detail) {
    std::lock_guard lock(mutex_);
    if (sink_ != nullptr) sink_->push_back({std::move(category), std::move(detail)});
}

int CallLedger::count(std::string_view channel) const {
    std::lock_guard lock(mutex_);
    auto it = counts_.find(std::string(channel));
    return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, int> CallLedger::counts() const {
    std::lock_guard lock(mutex_);
    return counts_;
}

CallLedger::Capture::Capture(CallLedger& ledger, std::vector<TraceNote>& sink) : ledger_(ledger) {
    std::lock_guard lock(ledger_.mutex_);
    previous_ = ledger_.sink_;
    ledger_.sink_ = &sink;
}

CallLedger::Capture::~Capture() {
    std::lock_guard lock(ledger_.mutex_);
    ledger_.sink_ = previous_;
}

ChatProvider& ProviderSet::chat_for(ChatRole role) const {
    if (auto it = chat.find(role); it != chat.end() && it->second) return *it->second;
    if (default_chat) return *default_chat;
    throw ConfigError("no chat provider configured for role " + std::string(to_string(role)));
}

bool ProviderSet::has_chat(ChatRole role) const {
    if (auto it = chat.find(role); it != chat.end() && it->second) return true;
    return default_chat != nullptr;
}

SearchProvider& ProviderSet::search_provider() const {
    if (!search) throw ConfigError("no search provider configured");
    return *search;
}

RerankProvider& ProviderSet::rerank_provider() const {
    if (!rerank) throw ConfigError("no rerank provider configured");
    return *rerank;
}

EmbeddingProvider& ProviderSet::embedding_provider() const {
    if (!embedding) throw ConfigError("no embedding provider configured");
    return *embedding;
}

CodeExecutor& ProviderSet::code_executor() const {
    if (!executor) throw ConfigError("no code executor configured");
    return *executor;
}

Clock& ProviderSet::session_clock() const {
    if (!clock) throw ConfigError("no clock configured");
    return *clock;
}

void ProviderSet::note(std::string category, std::string detail) const {
    if (ledger) ledger->note(std::move(category), std::move(detail));
}

namespace {

class InstrumentedChat final : public ChatProvider {
public:
    InstrumentedChat(std::shared_ptr<ChatProvider> inner, std::shared_ptr<CallLedger> ledger, RetryPolicy retry)
        : inner_(std::move(inner)), ledger_(std::move(ledger)), retry_(std::move(retry)) {}

    ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk) override {
        request.validate();
        if (ledger_) ledger_->record_call("chat." + std::string(to_string(request.role)));
        bool delivered = false;
        ChunkCallback tracking;
        if (on_chunk) {
            tracking = [&](std::string_view chunk) {
                delivered = true;
                return on_chunk(chunk);
            };
        }
        RetryPolicy policy = retry_;
        double delay = policy.base_delay_seconds;
        for (int attempt = 0;; ++attempt) {
            try {
                return inner_->complete(request, tracking);
            } catch (const ProviderError& e) {
                if (!e.retryable() || attempt >= policy.max_retries || delivered) throw;
            }
            if (delay > 0.0) policy.sleep ? policy.sleep(delay) : sleep_seconds(delay);
            delay *= 2.0;
        }
    }

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<CallLedger> ledger_;
    RetryPolicy retry_;
};

class InstrumentedSearch final : public SearchProvider {
public:
    InstrumentedSearch(std::shared_ptr<SearchProvider> inner, std::shared_ptr<CallLedger> ledger, RetryPolicy retry)
        : inner_(std::move(inner)), ledger_(std::move(ledger)), retry_(std::move(retry)) {}

    std::vector<WebPage> search(std::string_view query, int count) override {
        if (ledger_) ledger_->record_call("search");
        return with_retry(retry_, [&] { return inner_->search(query, count); });
    }

private:
    std::shared_ptr<SearchProvider> inner_;
    std::shared_ptr<CallLedger> ledger_;
    RetryPolicy retry_;
};

class InstrumentedRerank final : public RerankProvider {
public:
    InstrumentedRerank(std::shared_ptr<RerankProvider> inner, std::shared_ptr<CallLedger> ledger, RetryPolicy retry)
        : inner_(std::move(inner)), ledger_(std::move(ledger)), retry_(std::move(retry)) {}

    std::vector<double> score(std::string_view query, std::span<const std::string> documents) override {
        if (documents.empty()) throw PreconditionError("rerank called with no documents");
        if (ledger_) ledger_->record_call("rerank");
        auto scores = with_retry(retry_, [&] { return inner_->score(query, documents); });
        if (scores.size() != documents.size()) {
            throw application_error("rerank provider returned " + std::to_string(scores.size()) +
                                    " scores for " + std::to_string(documents.size()) + " documents");
        }
        return scores;
    }

private:
    std::shared_ptr<RerankProvider> inner_;
    std::shared_ptr<CallLedger> ledger_;
    RetryPolicy retry_;
};

class InstrumentedEmbedding final : public EmbeddingProvider {
public:
    InstrumentedEmbedding(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<CallLedger> ledger,
                          RetryPolicy retry)
        : inner_(std::move(inner)), ledger_(std::move(ledger)), retry_(std::move(retry)) {}

    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
        if (texts.empty()) throw PreconditionError("embed called with no texts");
        if (ledger_) ledger_->record_call("embed");
        return with_retry(retry_, [&] { return inner_->embed(texts); });
    }

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::shared_ptr<CallLedger> ledger_;
    RetryPolicy retry_;
};

class InstrumentedExecutor final : public CodeExecutor {
public:
    InstrumentedExecutor(std::shared_ptr<CodeExecutor> inner, std::shared_ptr<CallLedger> ledger)
        : inner_(std::move(inner)), ledger_(std::move(ledger)) {}

    ExecutionResult execute(std::string_view code) override {
        if (ledger_) ledger_->record_call("exec");
        return inner_->execute(code);
    }

private:
    std::shared_ptr<CodeExecutor> inner_;
    std::shared_ptr<CallLedger> ledger_;
};

}  // namespace

ProviderSet instrument(const ProviderSet& raw, std::shared_ptr<CallLedger> ledger, RetryPolicy retry) {
    ProviderSet out;
    out.ledger = ledger;
    out.clock = raw.clock;
    out.params = raw.params;
    for (const auto& [role, provider] : raw.chat) {
        if (provider) out.chat[role] = std::make_shared<InstrumentedChat>(provider, ledger, retry);
    }
    if (raw.default_chat) out.default_chat = std::make_shared<InstrumentedChat>(raw.default_chat, ledger, retry);
    if (raw.search) out.search = std::make_shared<InstrumentedSearch>(raw.search, ledger, retry);
    if (raw.rerank) out.rerank = std::make_shared<InstrumentedRerank>(raw.rerank, ledger, retry);
    if (raw.embedding) out.embedding = std::make_shared<InstrumentedEmbedding>(raw.embedding, ledger, retry);
    if (raw.executor) out.executor = std::make_shared<InstrumentedExecutor>(raw.executor, ledger);
    return out;
}

}  // namespace agentic
