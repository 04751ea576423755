// SPDX-License-Identifier: Apache-2.0
#include "agentic/backends/fixture.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string request_digest(const ChatRequest& request) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : request.messages) {
        msgs.push_back({to_string(m.role), text::normalize_whitespace(m.content)});
    }
    nlohmann::json params;
    to_json(params, request.params);
    nlohmann::json key = {{"role", to_string(request.role)}, {"messages", msgs}, {"params", params}};
    return sha256_hex(key.dump());
}

std::string json_digest(std::string_view channel, const nlohmann::json& request) {
    return sha256_hex(std::string(channel) + "\n" + request.dump());
}

void Fixture::append(FixtureEntry entry) {
    std::lock_guard lock(mutex_);
    by_channel_[entry.channel].push_back(entries_.size());
    entries_.push_back(std::move(entry));
}

const FixtureEntry& Fixture::next(const std::string& channel, const std::string& digest) {
    std::lock_guard lock(mutex_);
    auto& cursor = cursor_[channel];
    auto it = by_channel_.find(channel);
    if (it == by_channel_.end() || cursor >= it->second.size()) {
        throw ReplayMismatchError("replay mismatch on channel '" + channel + "': request #" +
                                  std::to_string(cursor + 1) + " (digest " + digest +
                                  ") has no recorded counterpart");
    }
    const auto& entry = entries_[it->second[cursor]];
    if (entry.digest != digest) {
        throw ReplayMismatchError("replay mismatch on channel '" + channel + "': request #" +
                                  std::to_string(cursor + 1) + " has digest " + digest +
                                  ", recorded digest " + entry.digest);
    }
    ++cursor;
    if (entry.error) {
        auto kind = entry.error->value("kind", std::string("application")) == "transport"
                        ? ProviderError::Kind::Transport
                        : ProviderError::Kind::Application;
        throw ProviderError(kind, entry.error->value("message", std::string("recorded failure")));
    }
    return entry;
}

void Fixture::save(const std::filesystem::path& path) const {
    std::lock_guard lock(mutex_);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write fixture file " + path.string());
    for (const auto& e : entries_) {
        nlohmann::json line = {{"channel", e.channel}, {"digest", e.digest}, {"request", e.request}};
        if (e.error) {
            line["error"] = *e.error;
        } else {
            line["response"] = e.response;
        }
        out << line.dump() << '\n';
    }
}

std::shared_ptr<Fixture> Fixture::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read fixture file " + path.string());
    auto fixture = std::make_shared<Fixture>();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            FixtureEntry e;
            e.channel = j.at("channel").get<std::string>();
            e.digest = j.at("digest").get<std::string>();
            e.request = j.value("request", nlohmann::json());
            if (j.contains("error")) {
                e.error = j.at("error");
            } else {
                e.response = j.at("response");
            }
            fixture->append(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return fixture;
}

std::vector<FixtureEntry> Fixture::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t Fixture::pending() const {
    std::lock_guard lock(mutex_);
    std::size_t consumed = 0;
    for (const auto& [channel, c] : cursor_) consumed += c;
    return entries_.size() - consumed;
}

namespace {

nlohmann::json error_json(const ProviderError& e) {
    return {{"kind", e.retryable() ? "transport" : "application"}, {"message", e.what()}};
}

std::string chat_channel(const ChatRequest& r) { return "chat." + std::string(to_string(r.role)); }

nlohmann::json chat_request_json(const ChatRequest& r) {
    auto j = to_json(r);
    j.erase("stream");
    return j;
}

// Runs call, appending its outcome (value or ProviderError) to the fixture.
template <typename Fn, typename ToJson>
auto record_call(Fixture& fixture, std::string channel, std::string digest, nlohmann::json request, Fn&& call,
                 ToJson&& to_json_fn) -> decltype(call()) {
    FixtureEntry entry{std::move(channel), std::move(digest), std::move(request), {}, std::nullopt};
    try {
        auto result = call();
        entry.response = to_json_fn(result);
        fixture.append(std::move(entry));
        return result;
    } catch (const ProviderError& e) {
        entry.error = error_json(e);
        fixture.append(std::move(entry));
        throw;
    }
}

class RecordingChat final : public ChatProvider {
public:
    RecordingChat(std::shared_ptr<ChatProvider> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk) override {
        return record_call(
            *fixture_, chat_channel(request), request_digest(request), chat_request_json(request),
            [&] { return inner_->complete(request, on_chunk); },
            [](const ChatResponse& r) { return to_json(r); });
    }

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class RecordingSearch final : public SearchProvider {
public:
    RecordingSearch(std::shared_ptr<SearchProvider> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    std::vector<WebPage> search(std::string_view query, int count) override {
        nlohmann::json req = {{"query", query}, {"count", count}};
        auto digest = json_digest("search", req);
        return record_call(
            *fixture_, "search", digest, req, [&] { return inner_->search(query, count); },
            [](const std::vector<WebPage>& pages) { return nlohmann::json(pages); });
    }

private:
    std::shared_ptr<SearchProvider> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class RecordingRerank final : public RerankProvider {
public:
    RecordingRerank(std::shared_ptr<RerankProvider> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    std::vector<double> score(std::string_view query, std::span<const std::string> documents) override {
        nlohmann::json req = {{"query", query}, {"documents", std::vector<std::string>(documents.begin(), documents.end())}};
        auto digest = json_digest("rerank", req);
        return record_call(
            *fixture_, "rerank", digest, req, [&] { return inner_->score(query, documents); },
            [](const std::vector<double>& s) { return nlohmann::json(s); });
    }

private:
    std::shared_ptr<RerankProvider> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class RecordingEmbedding final : public EmbeddingProvider {
public:
    RecordingEmbedding(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
        nlohmann::json req = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
        auto digest = json_digest("embed", req);
        return record_call(
            *fixture_, "embed", digest, req, [&] { return inner_->embed(texts); },
            [](const std::vector<std::vector<float>>& v) { return nlohmann::json(v); });
    }

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class RecordingExecutor final : public CodeExecutor {
public:
    RecordingExecutor(std::shared_ptr<CodeExecutor> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    ExecutionResult execute(std::string_view code) override {
        nlohmann::json req = {{"code", code}};
        auto digest = json_digest("exec", req);
        return record_call(
            *fixture_, "exec", digest, req, [&] { return inner_->execute(code); },
            [](const ExecutionResult& r) { return nlohmann::json(r); });
    }

private:
    std::shared_ptr<CodeExecutor> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class RecordingClock final : public Clock {
public:
    RecordingClock(std::shared_ptr<Clock> inner, std::shared_ptr<Fixture> fixture)
        : inner_(std::move(inner)), fixture_(std::move(fixture)) {}

    double now_seconds() override {
        double t = inner_->now_seconds();
        fixture_->append({"clock", json_digest("clock", nullptr), nullptr, t, std::nullopt});
        return t;
    }

private:
    std::shared_ptr<Clock> inner_;
    std::shared_ptr<Fixture> fixture_;
};

class ReplayChat final : public ChatProvider {
public:
    explicit ReplayChat(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    ChatResponse complete(const ChatRequest& request, const ChunkCallback& on_chunk) override {
        const auto& entry = fixture_->next(chat_channel(request), request_digest(request));
        auto response = chat_response_from_json(entry.response);
        if (request.stream && on_chunk && !response.text.empty()) on_chunk(response.text);
        return response;
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

class ReplaySearch final : public SearchProvider {
public:
    explicit ReplaySearch(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    std::vector<WebPage> search(std::string_view query, int count) override {
        nlohmann::json req = {{"query", query}, {"count", count}};
        return fixture_->next("search", json_digest("search", req)).response.get<std::vector<WebPage>>();
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

class ReplayRerank final : public RerankProvider {
public:
    explicit ReplayRerank(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    std::vector<double> score(std::string_view query, std::span<const std::string> documents) override {
        nlohmann::json req = {{"query", query}, {"documents", std::vector<std::string>(documents.begin(), documents.end())}};
        return fixture_->next("rerank", json_digest("rerank", req)).response.get<std::vector<double>>();
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

class ReplayEmbedding final : public EmbeddingProvider {
public:
    explicit ReplayEmbedding(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
        nlohmann::json req = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
        return fixture_->next("embed", json_digest("embed", req)).response.get<std::vector<std::vector<float>>>();
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

class ReplayExecutor final : public CodeExecutor {
public:
    explicit ReplayExecutor(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    ExecutionResult execute(std::string_view code) override {
        nlohmann::json req = {{"code", code}};
        return fixture_->next("exec", json_digest("exec", req)).response.get<ExecutionResult>();
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

class ReplayClock final : public Clock {
public:
    explicit ReplayClock(std::shared_ptr<Fixture> fixture) : fixture_(std::move(fixture)) {}

    double now_seconds() override {
        return fixture_->next("clock", json_digest("clock", nullptr)).response.get<double>();
    }

private:
    std::shared_ptr<Fixture> fixture_;
};

}  // namespace

ProviderSet recording(const ProviderSet& live, std::shared_ptr<Fixture> fixture) {
    ProviderSet out;
    out.ledger = live.ledger;
    out.params = live.params;
    for (const auto& [role, p] : live.chat) {
        if (p) out.chat[role] = std::make_shared<RecordingChat>(p, fixture);
    }
    if (live.default_chat) out.default_chat = std::make_shared<RecordingChat>(live.default_chat, fixture);
    if (live.search) out.search = std::make_shared<RecordingSearch>(live.search, fixture);
    if (live.rerank) out.rerank = std::make_shared<RecordingRerank>(live.rerank, fixture);
    if (live.embedding) out.embedding = std::make_shared<RecordingEmbedding>(live.embedding, fixture);
    if (live.executor) out.executor = std::make_shared<RecordingExecutor>(live.executor, fixture);
    if (live.clock) out.clock = std::make_shared<RecordingClock>(live.clock, fixture);
    return out;
}

ProviderSet replaying(std::shared_ptr<Fixture> fixture) {
    ProviderSet out;
    out.default_chat = std::make_shared<ReplayChat>(fixture);
    out.search = std::make_shared<ReplaySearch>(fixture);
    out.rerank = std::make_shared<ReplayRerank>(fixture);
    out.embedding = std::make_shared<ReplayEmbedding>(fixture);
    out.executor = std::make_shared<ReplayExecutor>(fixture);
    out.clock = std::make_shared<ReplayClock>(fixture);
    return out;
}

}  // namespace agentic
