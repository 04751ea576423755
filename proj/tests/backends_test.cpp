// SPDX-License-Identifier: Apache-2.0
#include <filesystem>

#include <gtest/gtest.h>

#include "agentic/backends/fixture.hpp"
#include "agentic/backends/http.hpp"
#include "agentic/backends/mock.hpp"
#include "agentic/errors.hpp"
#include "test_support.hpp"

using namespace agentic;
using agentic::support::MockWorld;
using agentic::support::page;

namespace {

ChatRequest request(ChatRole role, std::string text) {
    ChatRequest r;
    r.role = role;
    r.messages = {user_message(std::move(text))};
    return r;
}

}  // namespace

TEST(GenerationParams, DefaultsMatchPublishedSettings) {
    GenerationParams p;
    EXPECT_EQ(p.max_tokens, 32768);
    EXPECT_DOUBLE_EQ(p.temperature, 0.7);
    EXPECT_DOUBLE_EQ(p.top_p, 0.8);
    EXPECT_EQ(p.top_k, 20);
    EXPECT_DOUBLE_EQ(p.repetition_penalty, 1.05);
    nlohmann::json j = p;
    EXPECT_EQ(j.dump(), R"({"max_tokens":32768,"repetition_penalty":1.05,"temperature":0.7,"top_k":20,"top_p":0.8})");
}

TEST(GenerationParams, RejectsUnknownKeysAndBadRanges) {
    GenerationParams p;
    EXPECT_THROW(from_json(nlohmann::json{{"temprature", 0.1}}, p), ConfigError);
    p.top_p = 0.0;
    EXPECT_THROW(p.validate(), PreconditionError);
    p = {};
    p.max_tokens = 0;
    EXPECT_THROW(p.validate(), PreconditionError);
}

TEST(ChatRequest, RejectsEmptyMessages) {
    ChatRequest r;
    EXPECT_THROW(r.validate(), PreconditionError);
}

TEST(ChatRoles, RoundTripNames) {
    for (auto role : kAllChatRoles) EXPECT_EQ(chat_role_from_string(to_string(role)), role);
    EXPECT_FALSE(chat_role_from_string("nope").has_value());
}

TEST(MockChat, ScriptedRepliesInOrder) {
    MockChatProvider chat({"<<BEGIN_SEARCH>>q<<END_SEARCH>>", "final"});
    EXPECT_EQ(chat.complete(request(ChatRole::Reasoning, "x")).text, "<<BEGIN_SEARCH>>q<<END_SEARCH>>");
    EXPECT_EQ(chat.complete(request(ChatRole::Reasoning, "x")).text, "final");
    EXPECT_THROW(chat.complete(request(ChatRole::Reasoning, "x")), ProviderError);
}

TEST(MockChat, StreamsInChunksAndStopsWhenAsked) {
    MockChatProvider chat({"abcdefghij"}, 3);
    auto r = request(ChatRole::Reasoning, "x");
    r.stream = true;
    std::vector<std::string> chunks;
    auto response = chat.complete(r, [&](std::string_view c) {
        chunks.emplace_back(c);
        return chunks.size() < 2;
    });
    EXPECT_EQ(chunks, (std::vector<std::string>{"abc", "def"}));
    EXPECT_EQ(response.text, "abcdef");
}

TEST(MockChat, TruncatesAtMaxTokens) {
    MockChatProvider chat({"one two three four"});
    auto r = request(ChatRole::Reasoning, "x");
    r.params.max_tokens = 2;
    auto response = chat.complete(r);
    EXPECT_EQ(text::count_tokens(response.text), 2u);
    EXPECT_EQ(response.finish_reason, "length");
}

TEST(MockChat, KeyedScriptsFollowFirstUserMessage) {
    MockChatProvider chat;
    chat.add_keyed_script("alpha", {MockReply::ok("A1"), MockReply::ok("A2")});
    chat.add_keyed_script("beta", {MockReply::ok("B1")});
    EXPECT_EQ(chat.complete(request(ChatRole::Reasoning, "beta?")).text, "B1");
    EXPECT_EQ(chat.complete(request(ChatRole::Reasoning, "alpha?")).text, "A1");
    EXPECT_EQ(chat.complete(request(ChatRole::Reasoning, "alpha?")).text, "A2");
}

TEST(MockSearch, KeyedByExactQuery) {
    MockSearchProvider search;
    search.set("q", {page("u1", "c1"), page("u2", "c2")});
    EXPECT_EQ(search.search("q", 20).size(), 2u);
    EXPECT_EQ(search.search("q", 1).size(), 1u);
    EXPECT_TRUE(search.search("other", 20).empty());
}

TEST(MockRerank, QueuedScoresPassThroughUnmodified) {
    MockRerankProvider rerank;
    rerank.push_scores({0.25, 0.75});
    std::vector<std::string> docs{"a", "b"};
    EXPECT_EQ(rerank.score("q", docs), (std::vector<double>{0.25, 0.75}));
}

TEST(Instrument, RerankPreconditionsAndStrictCounts) {
    MockWorld world;
    std::shared_ptr<CallLedger> ledger;
    auto providers = world.instrumented(ledger);
    std::vector<std::string> none;
    EXPECT_THROW(providers.rerank_provider().score("q", none), PreconditionError);

    world.rerank->push_scores(std::vector<double>(9, 0.5));
    std::vector<std::string> ten(10, "doc");
    EXPECT_THROW(providers.rerank_provider().score("q", ten), ProviderError);
}

TEST(Instrument, RetriesTransportErrorsOnly) {
    auto chat = std::make_shared<MockChatProvider>();
    chat->push(MockReply::transport_failure());
    chat->push(MockReply::transport_failure());
    chat->push(MockReply::ok("third time"));
    chat->push(MockReply::application_failure());
    chat->push(MockReply::ok("never reached"));
    ProviderSet raw;
    raw.default_chat = chat;
    auto ledger = std::make_shared<CallLedger>();
    std::vector<double> sleeps;
    RetryPolicy retry;
    retry.sleep = [&](double s) { sleeps.push_back(s); };
    auto providers = instrument(raw, ledger, retry);

    EXPECT_EQ(providers.chat_for(ChatRole::Coding).complete(request(ChatRole::Coding, "x")).text, "third time");
    EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.0}));
    EXPECT_THROW(providers.chat_for(ChatRole::Coding).complete(request(ChatRole::Coding, "x")), ProviderError);
    EXPECT_EQ(chat->call_count(), 4u);
    EXPECT_EQ(ledger->count("chat.coding"), 2);
}

TEST(Instrument, GivesUpAfterTwoRetries) {
    auto chat = std::make_shared<MockChatProvider>();
    for (int i = 0; i < 4; ++i) chat->push(MockReply::transport_failure());
    ProviderSet raw;
    raw.default_chat = chat;
    RetryPolicy retry;
    retry.sleep = [](double) {};
    auto providers = instrument(raw, std::make_shared<CallLedger>(), retry);
    EXPECT_THROW(providers.chat_for(ChatRole::Reasoning).complete(request(ChatRole::Reasoning, "x")), ProviderError);
    EXPECT_EQ(chat->call_count(), 3u);
}

TEST(ProviderSet, MissingChannelsAreConfigErrors) {
    ProviderSet empty;
    EXPECT_THROW(empty.chat_for(ChatRole::Reasoning), ConfigError);
    EXPECT_THROW(empty.search_provider(), ConfigError);
    EXPECT_THROW(empty.code_executor(), ConfigError);
}

TEST(HashEmbedding, BagOfWordsAndFixedDimension) {
    rag::HashEmbeddingProvider embed;
    std::vector<std::string> texts{"a b", "b a", "a b", "something else entirely"};
    auto v = embed.embed(texts);
    EXPECT_EQ(v[0], v[1]);
    EXPECT_EQ(v[0], v[2]);
    for (const auto& x : v) EXPECT_EQ(x.size(), rag::kHashEmbeddingDims);
}

TEST(RequestDigest, NormalizesWhitespaceButNotContent) {
    auto a = request(ChatRole::Reasoning, "hello   world\n");
    auto b = request(ChatRole::Reasoning, "hello world");
    auto c = request(ChatRole::Reasoning, "hello worle");
    EXPECT_EQ(request_digest(a), request_digest(b));
    EXPECT_NE(request_digest(a), request_digest(c));
    auto d = b;
    d.params.temperature = 0.5;
    EXPECT_NE(request_digest(b), request_digest(d));
    auto e = b;
    e.role = ChatRole::Coding;
    EXPECT_NE(request_digest(b), request_digest(e));
}

TEST(Fixture, RecordThenReplayAllChannels) {
    MockWorld world;
    world.search->set("q", {page("u1", "content one")});
    world.rerank->push_scores({0.9});
    world.executor->push(ExecutionResult{"42\n", "", 0, 0.1, false});
    auto fixture = std::make_shared<Fixture>();
    auto rec = recording(world.providers(), fixture);

    auto r1 = rec.chat_for(ChatRole::SearchRag).complete(request(ChatRole::SearchRag, "x"));
    auto pages = rec.search_provider().search("q", 20);
    std::vector<std::string> docs{"content one"};
    auto scores = rec.rerank_provider().score("q", docs);
    auto vecs = rec.embedding_provider().embed(docs);
    auto exec = rec.code_executor().execute("print(42)");
    world.clock->advance(1.5);
    auto t = rec.session_clock().now_seconds();

    auto path = std::filesystem::temp_directory_path() / "agentic_fixture_test.jsonl";
    fixture->save(path);
    auto loaded = Fixture::load(path);
    std::filesystem::remove(path);
    auto rep = replaying(loaded);
    EXPECT_EQ(rep.chat_for(ChatRole::SearchRag).complete(request(ChatRole::SearchRag, "x")).text, r1.text);
    EXPECT_EQ(rep.search_provider().search("q", 20).size(), pages.size());
    EXPECT_EQ(rep.rerank_provider().score("q", docs), scores);
    EXPECT_EQ(rep.embedding_provider().embed(docs), vecs);
    EXPECT_EQ(rep.code_executor().execute("print(42)"), exec);
    EXPECT_DOUBLE_EQ(rep.session_clock().now_seconds(), t);
    EXPECT_EQ(loaded->pending(), 0u);
}

TEST(Fixture, AlteredPromptIsAMismatch) {
    MockWorld world;
    auto fixture = std::make_shared<Fixture>();
    auto rec = recording(world.providers(), fixture);
    rec.chat_for(ChatRole::GraphQuery).complete(request(ChatRole::GraphQuery, "who?"));
    auto rep = replaying(fixture);
    EXPECT_THROW(rep.chat_for(ChatRole::GraphQuery).complete(request(ChatRole::GraphQuery, "whom?")),
                 ReplayMismatchError);
}

TEST(Fixture, UnknownSearchQueryIsAMismatch) {
    MockWorld world;
    auto fixture = std::make_shared<Fixture>();
    auto rep = replaying(fixture);
    EXPECT_THROW(rep.search_provider().search("never recorded", 20), ReplayMismatchError);
}

TEST(Fixture, RecordedErrorsReplayAsErrors) {
    MockWorld world;
    world.search->set_failure(ProviderError::Kind::Application);
    auto fixture = std::make_shared<Fixture>();
    auto rec = recording(world.providers(), fixture);
    EXPECT_THROW(rec.search_provider().search("q", 20), ProviderError);
    auto rep = replaying(fixture);
    EXPECT_THROW(rep.search_provider().search("q", 20), ProviderError);
}

TEST(Fixture, MockAndReplayOpenNoSockets) {
    auto before = http_requests_issued();
    MockWorld world;
    auto fixture = std::make_shared<Fixture>();
    auto rec = recording(world.providers(), fixture);
    rec.chat_for(ChatRole::Reasoning).complete(request(ChatRole::Reasoning, "x"));
    replaying(fixture).chat_for(ChatRole::Reasoning).complete(request(ChatRole::Reasoning, "x"));
    EXPECT_EQ(http_requests_issued(), before);
}
