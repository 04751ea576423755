// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "agentic/errors.hpp"
#include "agentic/orchestrator.hpp"
#include "agentic/stream_parser.hpp"
#include "agentic/trace.hpp"
#include "agentic/websearch.hpp"
#include "kinship_fixture.hpp"
#include "test_support.hpp"

using namespace agentic;
using namespace agentic::support;

namespace {

enum class R { Gen, Tool, Inj, Final };

std::vector<R> shape(const SessionTrace& t) {
    std::vector<R> out;
    for (const auto& r : t.records) out.push_back(static_cast<R>(r.index()));
    return out;
}

int calls(const SessionTrace& t, const std::string& channel) {
    auto it = t.provider_calls.find(channel);
    return it == t.provider_calls.end() ? 0 : it->second;
}

int mindmap_calls(const SessionTrace& t) {
    return calls(t, "chat.graph_construction") + calls(t, "chat.community_summary") +
           calls(t, "chat.context_synthesis") + calls(t, "chat.graph_query");
}

bool has_final(const SessionTrace& t) { return t.count<FinalAnswer>() > 0; }

std::string search(const std::string& q) { return "<<BEGIN_SEARCH>>" + q + "<<END_SEARCH>>"; }

MockWorld paris_world() {
    MockWorld world;
    world.search->set("capital of France", {page("https://paris.example", "Paris is the capital of France.")});
    world.rerank->add_rule("Paris", 0.95);
    return world;
}

}  // namespace

TEST(FormatInjection, Examples) {
    EXPECT_EQ(format_injection("Paris"), "<<RESULT>>Paris<<END_RESULT>>");
    EXPECT_EQ(format_injection(""), "<<RESULT>>[no result]<<END_RESULT>>");
    auto escaped = format_injection("a <<RESULT>>b<<END_RESULT>> c");
    EXPECT_EQ(escaped, "<<RESULT>>a <<<<RESULT>>>>b<<<<END_RESULT>>>> c<<END_RESULT>>");
    auto body = escaped.substr(10, escaped.size() - 10 - 14);
    EXPECT_EQ(unescape_injection_body(body), "a <<RESULT>>b<<END_RESULT>> c");
}

TEST(FormatInjection, EscapingRoundTripsRandomText) {
    std::mt19937 rng(4);
    const std::vector<std::string> atoms{"<<RESULT>>", "<<END_RESULT>>", "<<BEGIN_SEARCH>>", "<<END_CODE>>",
                                         "<", ">", "<<", ">>", "x", " "};
    for (int t = 0; t < 2000; ++t) {
        std::string s;
        for (int i = 0, n = int(rng() % 12) + 1; i < n; ++i) s += atoms[rng() % atoms.size()];
        auto inj = format_injection(s);
        ASSERT_EQ(inj.rfind("<<RESULT>>", 0), 0u);
        ASSERT_EQ(inj.substr(inj.size() - 14), "<<END_RESULT>>");
        ASSERT_EQ(unescape_injection_body(inj.substr(10, inj.size() - 24)), s);
    }
}

TEST(RawMemory, MostRecentFirstAndTruncated) {
    std::vector<std::string> spans{"old one two", "mid three", "new four five"};
    EXPECT_EQ(raw_memory(spans, 100), "new four five\n\nmid three\n\nold one two");
    EXPECT_EQ(raw_memory(spans, 4), "new four five\n\nthree");
    EXPECT_EQ(raw_memory(spans, 0), "");
}

TEST(SystemPrompt, ListsOnlyEnabledTools) {
    SessionConfig config;
    config.tools.code = false;
    auto p = system_prompt(config, TaskMode::Answer);
    EXPECT_NE(p.find("<<BEGIN_SEARCH>>"), std::string::npos);
    EXPECT_NE(p.find("<<BEGIN_MIND>>"), std::string::npos);
    EXPECT_EQ(p.find("<<BEGIN_CODE>>"), std::string::npos);
}

TEST(RunSession, SearchThenAnswerTraceShape) {
    auto world = paris_world();
    auto reasoning = world.script(ChatRole::Reasoning,
                                  {"I should check. " + search("capital of France") + " ignored tail",
                                   "The answer is Paris."},
                                  7);
    auto result = run_session("What is the capital of France?", SessionConfig{}, world.providers());
    EXPECT_EQ(result.termination, Termination::Completed);
    EXPECT_EQ(shape(result.trace), (std::vector<R>{R::Gen, R::Tool, R::Inj, R::Gen, R::Final}));
    EXPECT_EQ(result.final_answer, "The answer is Paris.");

    const auto& span = std::get<GenerationSpan>(result.trace.records[0]);
    EXPECT_EQ(span.text, "I should check. " + search("capital of France"));
    const auto& tool = std::get<ToolInvocation>(result.trace.records[1]);
    EXPECT_EQ(tool.kind, ToolKind::WebSearch);
    EXPECT_EQ(tool.query, "capital of France");
    EXPECT_EQ(std::get<Injection>(result.trace.records[2]).text, format_injection(tool.agent_response));

    ASSERT_EQ(reasoning->call_count(), 2u);
    const auto requests = reasoning->requests();
    const auto& second = requests[1];
    ASSERT_EQ(second.messages.size(), 3u);
    EXPECT_EQ(second.messages[2].role, Message::Role::Assistant);
    EXPECT_EQ(second.messages[2].content, span.text + format_injection(tool.agent_response));
    EXPECT_EQ(calls(result.trace, "search"), 1);
}

TEST(RunSession, NoToolCallsGivesSpanAndFinal) {
    MockWorld world;
    world.script(ChatRole::Reasoning, {"Two plus two is four."});
    auto result = run_session("2+2?", SessionConfig{}, world.providers());
    EXPECT_EQ(shape(result.trace), (std::vector<R>{R::Gen, R::Final}));
    EXPECT_EQ(result.final_answer, "Two plus two is four.");
    EXPECT_EQ(mindmap_calls(result.trace), 0);
}

TEST(RunSession, ZeroToolBudgetRefusesAndContinues) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {search("capital of France"), "Without tools: Paris."});
    SessionConfig config;
    config.max_tool_calls = 0;
    auto result = run_session("capital?", config, world.providers());
    EXPECT_EQ(result.termination, Termination::Completed);
    EXPECT_EQ(shape(result.trace), (std::vector<R>{R::Gen, R::Inj, R::Gen, R::Final}));
    EXPECT_EQ(std::get<Injection>(result.trace.records[1]).text, format_injection(kBudgetRefusal));
    EXPECT_EQ(result.trace.count<ToolInvocation>(), 0u);
    EXPECT_EQ(calls(result.trace, "search"), 0);
}

TEST(RunSession, PersistentCallsHitBudgetThenAnswerNow) {
    auto world = paris_world();
    auto reasoning = world.script(ChatRole::Reasoning,
                                  {search("capital of France"), search("capital of France"),
                                   search("capital of France"), "Final: Paris " + search("more")});
    SessionConfig config;
    config.max_tool_calls = 1;
    auto result = run_session("capital?", config, world.providers());
    EXPECT_EQ(result.termination, Termination::BudgetExhausted);
    EXPECT_FALSE(has_final(result.trace));
    EXPECT_EQ(result.trace.count<ToolInvocation>(), 1u);
    EXPECT_EQ(result.final_answer, "Final: Paris");
    EXPECT_EQ(last_user_message(reasoning->requests().back()), kAnswerNowInstruction);
    EXPECT_EQ(shape(result.trace), (std::vector<R>{R::Gen, R::Tool, R::Inj, R::Gen, R::Inj, R::Gen, R::Inj, R::Gen}));
}

TEST(RunSession, DisabledToolRefusedWithoutProviderCall) {
    MockWorld world;
    world.script(ChatRole::Reasoning, {"<<BEGIN_CODE>>compute 2+2<<END_CODE>>", "It is 4."});
    auto coder = world.script(ChatRole::Coding, {"```python\nprint(4)\n```"});
    SessionConfig config;
    config.tools.code = false;
    auto result = run_session("2+2?", config, world.providers());
    EXPECT_EQ(result.termination, Termination::Completed);
    EXPECT_EQ(coder->call_count(), 0u);
    EXPECT_EQ(result.trace.count<ToolInvocation>(), 0u);
    EXPECT_EQ(std::get<Injection>(result.trace.records[1]).text, format_injection(disabled_tool_refusal(ToolKind::Code)));
}

TEST(RunSession, MemoryNoneMakesNoMindMapCalls) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {"Check. " + search("capital of France"), "Paris."});
    SessionConfig config;
    config.memory = MemoryMode::None;
    config.tools.mind_map = false;
    auto result = run_session("capital?", config, world.providers());
    EXPECT_EQ(mindmap_calls(result.trace), 0);
    ASSERT_EQ(world.rerank->calls().size(), 1u);
    EXPECT_EQ(world.rerank->calls()[0].query, websearch::rerank_query({"capital of France", ""}));
}

TEST(RunSession, MindMapMemoryIngestsEachToolSpan) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {"A. " + search("capital of France"), "B. " + search("capital of France"), "Done."});
    auto result = run_session("capital?", SessionConfig{}, world.providers());
    EXPECT_EQ(calls(result.trace, "chat.graph_construction"), 2);
}

TEST(RunSession, RawMemoryFeedsSpansToAgents) {
    MockWorld world;
    world.script(ChatRole::Reasoning, {"First thought. <<BEGIN_CODE>>add numbers<<END_CODE>>", "Done."});
    auto coder = world.script(ChatRole::Coding, {"```python\nprint(3)\n```", "three"});
    world.executor->push({"3\n", "", 0, 0.0, false});
    SessionConfig config;
    config.memory = MemoryMode::Raw;
    auto result = run_session("1+2?", config, world.providers());
    EXPECT_NE(last_user_message(coder->requests()[0]).find("given the context First thought."), std::string::npos);
    EXPECT_EQ(mindmap_calls(result.trace), 0);
}

TEST(Dispatch, MindMapKinshipQuery) {
    MockWorld world;
    world.script(ChatRole::GraphConstruction, {kKinshipRecords});
    world.scripted[ChatRole::GraphQuery] = std::make_shared<MockChatProvider>(genealogy_responder);
    auto providers = world.providers();
    SessionConfig config;
    mindmap::MindMap mind(providers);
    mind.ingest("Jason's family over four generations.");
    std::vector<std::string> spans;
    AgentContext ctx{config, providers, mind, "q", spans};
    EXPECT_EQ(dispatch_tool_call({ToolKind::MindMap, "Who was Jason's maternal great-grandfather?"}, ctx), "Edmund");
}

TEST(Dispatch, DisabledAndFailingAgents) {
    MockWorld world;
    auto providers = world.providers();
    SessionConfig config;
    config.tools.web_search = false;
    mindmap::MindMap mind(providers);
    std::vector<std::string> spans;
    AgentContext ctx{config, providers, mind, "q", spans};
    EXPECT_EQ(dispatch_tool_call({ToolKind::WebSearch, "x"}, ctx), disabled_tool_refusal(ToolKind::WebSearch));
    EXPECT_TRUE(world.search->calls().empty());

    auto coder = std::make_shared<MockChatProvider>(std::vector<std::string>{"```python\nx\n```", "explain"});
    world.scripted[ChatRole::Coding] = coder;
    auto providers2 = world.providers();
    AgentContext ctx2{config, providers2, mind, "q", spans};
    auto out = dispatch_tool_call({ToolKind::Code, "x"}, ctx2);
    EXPECT_NE(out.find("mock executor script exhausted"), std::string::npos);
}

TEST(RunSession, ReasoningProviderErrorKeepsPartialTrace) {
    auto world = paris_world();
    auto reasoning = std::make_shared<MockChatProvider>(std::vector<std::string>{search("capital of France")});
    reasoning->push(MockReply::application_failure());
    world.scripted[ChatRole::Reasoning] = reasoning;
    auto result = run_session("capital?", SessionConfig{}, world.providers());
    EXPECT_EQ(result.termination, Termination::ProviderError);
    EXPECT_FALSE(has_final(result.trace));
    EXPECT_EQ(shape(result.trace), (std::vector<R>{R::Gen, R::Tool, R::Inj, R::Gen}));
    const auto& last = std::get<GenerationSpan>(result.trace.records.back());
    ASSERT_FALSE(last.notes.empty());
    EXPECT_EQ(last.notes.back().category, "provider_error");
}

TEST(RunSession, TokenBudgetExhaustion) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {"a b " + search("capital of France") + " tail", "never"});
    SessionConfig config;
    config.generation.max_tokens = 3;
    auto result = run_session("capital?", config, world.providers());
    EXPECT_EQ(result.termination, Termination::BudgetExhausted);
    EXPECT_EQ(result.final_answer, "a b");
    int tokens = 0;
    for (const auto& r : result.trace.records) {
        if (auto* g = std::get_if<GenerationSpan>(&r)) tokens += g->token_count;
    }
    EXPECT_LE(tokens, 3);
}

TEST(RunSession, UnclosedCallIsExecuted) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {"<<BEGIN_SEARCH>>capital of France", "Paris."});
    auto result = run_session("capital?", SessionConfig{}, world.providers());
    ASSERT_EQ(result.trace.count<ToolInvocation>(), 1u);
    EXPECT_EQ(std::get<ToolInvocation>(result.trace.records[1]).query, "capital of France");
    const auto& span = std::get<GenerationSpan>(result.trace.records[0]);
    EXPECT_TRUE(std::any_of(span.notes.begin(), span.notes.end(),
                            [](const TraceNote& n) { return n.category == "parse_error"; }));
}

TEST(RunSession, WallTimeFromSessionClock) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {search("capital of France"), "Paris."});
    world.search = std::make_shared<MockSearchProvider>();
    auto clock = world.clock;
    struct TickingSearch final : SearchProvider {
        std::shared_ptr<ManualClock> clock;
        std::vector<WebPage> search(std::string_view, int) override {
            clock->advance(1.5);
            return {page("https://p.example", "Paris")};
        }
    };
    auto ticking = std::make_shared<TickingSearch>();
    ticking->clock = clock;
    auto providers = world.providers();
    providers.search = ticking;
    auto result = run_session("capital?", SessionConfig{}, providers);
    EXPECT_DOUBLE_EQ(std::get<ToolInvocation>(result.trace.records[1]).wall_time, 1.5);
}

TEST(RunSession, EmptyQuestionAndBadConfigRejected) {
    MockWorld world;
    EXPECT_THROW(run_session(" ", SessionConfig{}, world.providers()), PreconditionError);
    SessionConfig bad;
    bad.generation.top_p = 0;
    EXPECT_THROW(run_session("q", bad, world.providers()), ConfigError);
}

TEST(Trace, RoundTripsLosslessly) {
    auto world = paris_world();
    world.script(ChatRole::Reasoning, {"Thinking \"quoted\" \xC3\xA9\n" + search("capital of France"), "Paris.\tDone"});
    auto result = run_session("capital?", SessionConfig{}, world.providers());
    auto text = serialize_trace(result.trace);
    auto parsed = parse_trace(text);
    EXPECT_EQ(parsed, result.trace);
    EXPECT_EQ(serialize_trace(parsed), text);
    auto header = nlohmann::json::parse(text.substr(0, text.find('\n')));
    EXPECT_EQ(header.at("type"), "session");
    EXPECT_EQ(header.at("version"), 1);
    EXPECT_THROW(parse_trace("{\"type\":\"session\",\"version\":99}"), std::runtime_error);
    EXPECT_THROW(parse_trace("not json"), std::runtime_error);
}

TEST(Trace, ReplayedSessionsAreByteIdentical) {
    auto run = [] {
        auto world = paris_world();
        world.script(ChatRole::Reasoning, {"x " + search("capital of France"), "Paris."});
        return serialize_trace(run_session("capital?", SessionConfig{}, world.providers()).trace);
    };
    EXPECT_EQ(run(), run());
}

TEST(RunSession, RandomScriptsRespectInvariants) {
    std::mt19937 rng(17);
    const std::vector<std::string> calls_text{search("capital of France"), "<<BEGIN_CODE>>compute<<END_CODE>>",
                                              "<<BEGIN_MIND>>recall<<END_MIND>>", "plain words here", "<<END_SEARCH>>",
                                              "<<BEGIN_SEARCH>>unclosed"};
    for (int t = 0; t < 150; ++t) {
        auto world = paris_world();
        std::vector<std::string> replies;
        for (int i = 0, n = int(rng() % 8) + 1; i < n; ++i) {
            replies.push_back("step " + std::to_string(i) + " " + calls_text[rng() % calls_text.size()]);
        }
        replies.push_back("final words");
        auto chat = world.script(ChatRole::Reasoning, replies, rng() % 5);
        for (int i = 0; i < 20; ++i) world.executor->push({"ok\n", "", 0, 0.0, false});
        world.fallback = std::make_shared<MockChatProvider>([](const ChatRequest& r) { return canned_reply(r); });
        world.scripted[ChatRole::Reasoning] = std::make_shared<MockChatProvider>([replies, i = std::size_t(0)](const ChatRequest&) mutable {
            return MockReply::ok(i < replies.size() ? replies[i++] : "final words");
        });
        SessionConfig config;
        config.tools = {rng() % 2 == 0, rng() % 2 == 0, rng() % 2 == 0};
        config.memory = static_cast<MemoryMode>(rng() % 3);
        config.max_tool_calls = int(rng() % 4);
        config.generation.max_tokens = int(rng() % 40) + 1;
        auto result = run_session("question?", config, world.providers());
        const auto& tr = result.trace;

        int tokens = 0;
        for (const auto& r : tr.records) {
            if (auto* g = std::get_if<GenerationSpan>(&r)) tokens += g->token_count;
            if (auto* ti = std::get_if<ToolInvocation>(&r)) {
                ASSERT_TRUE((ti->kind == ToolKind::WebSearch && config.tools.web_search) ||
                            (ti->kind == ToolKind::Code && config.tools.code) ||
                            (ti->kind == ToolKind::MindMap && config.tools.mind_map));
            }
        }
        ASSERT_LE(tokens, config.generation.max_tokens);
        ASSERT_LE(tr.count<ToolInvocation>(), std::size_t(config.max_tool_calls));
        ASSERT_EQ(result.termination == Termination::Completed, has_final(tr));
        if (config.memory == MemoryMode::None) ASSERT_EQ(calls(tr, "chat.graph_construction"), 0);
        ASSERT_EQ(parse_trace(serialize_trace(tr)), tr);
    }
}
