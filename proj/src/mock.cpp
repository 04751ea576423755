// SPDX-License-Identifier: Apache-2.0
#include "agentic/backends/mock.hpp"

#include "agentic/text.hpp"

namespace agentic {

namespace {

// Cuts s after its first max_tokens whitespace tokens, keeping the original
// spacing of the kept prefix.
std::string truncate_tokens(const std::string& s, int max_tokens, bool& truncated) {
    truncated = false;
    int seen = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && text::is_space(s[i])) ++i;
        if (i >= s.size()) break;
        if (seen == max_tokens) {
            truncated = true;
            return s.substr(0, i);
        }
        while (i < s.size() && !text::is_space(s[i])) ++i;
        ++seen;
    }
    return s;
}

std::string first_user_message(const ChatRequest& request) {
    for (const auto& m : request.messages) {
        if (m.role == Message::Role::User) return m.content;
    }
    return {};
}

}  // namespace

MockChatProvider::MockChatProvider(std::vector<std::string> replies, std::size_t chunk_size)
    : chunk_size_(chunk_size) {
    for (auto& r : replies) script_.push_back(MockReply::ok(std::move(r)));
}

void MockChatProvider::push(MockReply reply) {
    std::lock_guard lock(mutex_);
    script_.push_back(std::move(reply));
}

void MockChatProvider::add_keyed_script(std::string key, std::vector<MockReply> replies) {
    std::lock_guard lock(mutex_);
    keyed_[std::move(key)] = {std::move(replies), 0};
}

MockReply MockChatProvider::next_reply(const ChatRequest& request) {
    if (responder_) return responder_(request);
    if (!keyed_.empty()) {
        auto user = first_user_message(request);
        for (auto& [key, script] : keyed_) {
            if (user.find(key) == std::string::npos) continue;
            if (script.second >= script.first.size()) {
                throw application_error("mock chat script exhausted for key '" + key + "'");
            }
            return script.first[script.second++];
        }
    }
    if (cursor_ >= script_.size()) {
        throw application_error("mock chat script exhausted for role " + std::string(to_string(request.role)));
    }
    return script_[cursor_++];
}

ChatResponse MockChatProvider::complete(const ChatRequest& request, const ChunkCallback& on_chunk) {
    MockReply reply;
    std::size_t chunk_size = 0;
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
        reply = next_reply(request);
        chunk_size = chunk_size_;
    }
    if (reply.failure) throw ProviderError(*reply.failure, reply.text);

    ChatResponse response;
    bool truncated = false;
    std::string full = truncate_tokens(reply.text, request.params.max_tokens, truncated);
    response.finish_reason = truncated ? "length" : "stop";

    if (request.stream && on_chunk) {
        std::size_t step = chunk_size == 0 ? std::max<std::size_t>(full.size(), 1) : chunk_size;
        std::size_t pos = 0;
        while (pos < full.size()) {
            auto piece = full.substr(pos, step);
            pos += piece.size();
            response.text += piece;
            if (!on_chunk(piece)) {
                response.finish_reason = "stop";
                break;
            }
        }
    } else {
        response.text = full;
    }
    response.token_count = static_cast<int>(text::count_tokens(response.text));
    return response;
}

std::vector<ChatRequest> MockChatProvider::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t MockChatProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

std::vector<WebPage> MockSearchProvider::search(std::string_view query, int count) {
    std::lock_guard lock(mutex_);
    calls_.push_back({std::string(query), count});
    if (failure_) throw ProviderError(*failure_, "scripted search failure");
    auto it = results_.find(std::string(query));
    if (it == results_.end()) return {};
    auto pages = it->second;
    if (count >= 0 && pages.size() > static_cast<std::size_t>(count)) pages.resize(count);
    return pages;
}

std::vector<MockSearchProvider::Call> MockSearchProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<double> MockRerankProvider::score(std::string_view query, std::span<const std::string> documents) {
    std::lock_guard lock(mutex_);
    calls_.push_back({std::string(query), {documents.begin(), documents.end()}});
    if (failure_) throw ProviderError(*failure_, "scripted rerank failure");
    if (cursor_ < queued_.size()) return queued_[cursor_++];
    std::vector<double> scores;
    scores.reserve(documents.size());
    for (const auto& doc : documents) {
        double s = default_score_;
        for (const auto& [needle, value] : rules_) {
            if (doc.find(needle) != std::string::npos) {
                s = value;
                break;
            }
        }
        scores.push_back(s);
    }
    return scores;
}

std::vector<MockRerankProvider::Call> MockRerankProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

ExecutionResult MockExecutor::execute(std::string_view code) {
    std::lock_guard lock(mutex_);
    programs_.emplace_back(code);
    if (cursor_ >= results_.size()) throw application_error("mock executor script exhausted");
    return results_[cursor_++];
}

std::vector<std::string> MockExecutor::programs() const {
    std::lock_guard lock(mutex_);
    return programs_;
}

}  // namespace agentic
