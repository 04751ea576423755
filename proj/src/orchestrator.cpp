// SPDX-License-Identifier: Apache-2.0
#include "agentic/orchestrator.hpp"

#include <algorithm>
#include <array>

#include "agentic/backends/fixture.hpp"
#include "agentic/codeagent.hpp"
#include "agentic/errors.hpp"
#include "agentic/text.hpp"
#include "agentic/websearch.hpp"

namespace agentic {

namespace {

constexpr std::array<std::string_view, 8> kAllMarkers = {
    markers::kBeginSearch, markers::kEndSearch, markers::kBeginCode, markers::kEndCode,
    markers::kBeginMind,   markers::kEndMind,   markers::kResult,    markers::kEndResult,
};

bool tool_enabled(const SessionConfig& config, ToolKind kind) {
    switch (kind) {
        case ToolKind::WebSearch: return config.tools.web_search;
        case ToolKind::Code: return config.tools.code;
        case ToolKind::MindMap: return config.tools.mind_map;
    }
    return false;
}

std::string replace_markers(std::string_view s, bool escape) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        bool matched = false;
        for (auto m : kAllMarkers) {
            std::string from = escape ? std::string(m) : "<<" + std::string(m) + ">>";
            if (s.substr(i, from.size()) == from) {
                out += escape ? "<<" + std::string(m) + ">>" : std::string(m);
                i += from.size();
                matched = true;
                break;
            }
        }
        if (!matched) out.push_back(s[i++]);
    }
    return out;
}

}  // namespace

std::string disabled_tool_refusal(ToolKind kind) {
    return "[tool unavailable: " + std::string(to_string(kind)) + " is disabled for this session]";
}

std::string format_injection(std::string_view agent_text) {
    std::string body = agent_text.empty() ? std::string(kNoResult) : replace_markers(agent_text, true);
    return std::string(markers::kResult) + body + std::string(markers::kEndResult);
}

std::string unescape_injection_body(std::string_view body) { return replace_markers(body, false); }

std::string system_prompt(const SessionConfig& config, TaskMode mode) {
    std::string s = "You are a careful reasoning assistant. Think step by step.";
    if (mode == TaskMode::Research) {
        s += " The user gives a topic; write a long-form, well-organized article on it, grounded in the "
             "information you gather.";
    }
    bool any = config.tools.web_search || config.tools.code || config.tools.mind_map;
    if (any) {
        s += "\n\nWhile reasoning you can call tools by writing a request between markers. After the end marker, "
             "stop and wait: the result is appended as " +
             std::string(markers::kResult) + "..." + std::string(markers::kEndResult) +
             " and you continue from there. Available tools:\n";
        if (config.tools.web_search) {
            s += "- Web search: " + std::string(markers::kBeginSearch) + "what to look up" +
                 std::string(markers::kEndSearch) + "\n";
        }
        if (config.tools.code) {
            s += "- Coding: " + std::string(markers::kBeginCode) + "what to compute" +
                 std::string(markers::kEndCode) + "\n";
        }
        if (config.tools.mind_map) {
            s += "- Memory of your reasoning so far: " + std::string(markers::kBeginMind) + "question" +
                 std::string(markers::kEndMind) + "\n";
        }
    }
    s += "\nWhen you are done, write the final answer with no tool markers.";
    return s;
}

std::string raw_memory(const std::vector<std::string>& spans_oldest_first, int budget_tokens) {
    std::vector<std::string> parts;
    long remaining = budget_tokens;
    for (auto it = spans_oldest_first.rbegin(); it != spans_oldest_first.rend() && remaining > 0; ++it) {
        auto tokens = text::split_whitespace(*it);
        if (tokens.empty()) continue;
        if (static_cast<long>(tokens.size()) <= remaining) {
            parts.push_back(text::trim(*it));
            remaining -= static_cast<long>(tokens.size());
        } else {
            std::vector<std::string> tail(tokens.end() - remaining, tokens.end());
            parts.push_back(text::join(tail, " "));
            remaining = 0;
        }
    }
    return text::join(parts, "\n\n");
}

std::string reasoning_context(AgentContext& ctx, bool for_search) {
    switch (ctx.config.memory) {
        case MemoryMode::None: return "";
        case MemoryMode::Raw: return raw_memory(ctx.spans, ctx.config.raw_memory_tokens);
        case MemoryMode::MindMap:
            if (for_search && !ctx.config.websearch.mindmap_context) return "";
            return ctx.mind.synthesize_context();
    }
    return "";
}

std::string dispatch_tool_call(const ToolCallEvent& event, AgentContext& ctx) {
    if (!tool_enabled(ctx.config, event.kind)) return disabled_tool_refusal(event.kind);
    try {
        switch (event.kind) {
            case ToolKind::WebSearch: {
                websearch::Options options;
                options.query_breakdown = ctx.config.websearch.query_breakdown;
                options.rerank = ctx.config.websearch.rerank;
                options.knowledge_refinement = ctx.config.websearch.knowledge_refinement;
                options.search_count = ctx.config.websearch.search_count;
                websearch::SearchTask task{event.query, reasoning_context(ctx, true)};
                auto outcome = websearch::run_search(task, options, ctx.providers);
                ctx.providers.note("search", "iterations=" + std::to_string(outcome.iterations_used) +
                                                 " confidence=" + std::string(to_string(outcome.confidence)));
                return outcome.snippet;
            }
            case ToolKind::Code: {
                codeagent::CodeRequest request{event.query, reasoning_context(ctx, false), ctx.question};
                return codeagent::run_code_task(request, ctx.providers).answer;
            }
            case ToolKind::MindMap: return ctx.mind.query_graph(event.query);
        }
    } catch (const ProviderError& e) {
        ctx.providers.note("error", e.what());
        return "[" + std::string(to_string(event.kind)) + " agent failed: " + e.what() + "]";
    } catch (const PreconditionError& e) {
        ctx.providers.note("error", e.what());
        return "[" + std::string(to_string(event.kind)) + " agent rejected the request: " + e.what() + "]";
    }
    return std::string(kNoResult);
}

std::string session_id(std::string_view question, TaskMode mode, const SessionConfig& config) {
    std::string material = std::string(question) + "\n" + std::string(to_string(mode)) + "\n" + to_json(config).dump();
    return sha256_hex(material).substr(0, 16);
}

namespace {

struct Generation {
    std::string span_text;
    std::optional<ToolCallEvent> call;
    std::vector<TraceNote> parse_notes;
};

/// Streams one reasoning turn, stopping at the first tool call.
Generation generate(const ProviderSet& providers, ChatRequest request, bool allow_tools) {
    StreamParser parser;
    std::vector<ParseEvent> events;
    bool halted = false;
    auto take = [&](std::vector<ParseEvent> batch) {
        for (auto& e : batch) {
            if (halted) return;
            if (std::holds_alternative<StreamEndEvent>(e)) continue;
            events.push_back(std::move(e));
            if (allow_tools && std::holds_alternative<ToolCallEvent>(events.back())) halted = true;
        }
    };
    request.stream = true;
    providers.chat_for(ChatRole::Reasoning).complete(request, [&](std::string_view chunk) {
        take(parser.feed(chunk));
        return !halted;
    });
    if (!halted) take(parser.finalize());

    Generation g;
    std::vector<ParseEvent> kept;
    for (auto& e : events) {
        if (auto* call = std::get_if<ToolCallEvent>(&e)) {
            if (allow_tools) {
                g.call = *call;
                kept.push_back(e);
            } else {
                g.parse_notes.push_back({"ignored_tool_call", std::string(to_string(call->kind))});
            }
            continue;
        }
        if (auto* err = std::get_if<ParseErrorEvent>(&e)) {
            std::string kind = err->kind ? std::string(to_string(*err->kind)) : "";
            switch (err->error) {
                case ParseErrorKind::StrayEnd: g.parse_notes.push_back({"parse_error", "stray end marker"}); break;
                case ParseErrorKind::MismatchedEnd:
                    g.parse_notes.push_back({"parse_error", "mismatched end marker in " + kind + " call"});
                    break;
                case ParseErrorKind::Overlong:
                    g.parse_notes.push_back({"parse_error", "overlong " + kind + " query force-closed"});
                    break;
                case ParseErrorKind::Unclosed:
                    if (allow_tools && err->kind && !g.call) {
                        g.parse_notes.push_back({"parse_error", "unclosed " + kind + " call executed"});
                        g.call = ToolCallEvent{*err->kind, err->partial_query};
                    } else {
                        g.parse_notes.push_back({"parse_error", "unclosed " + kind + " call"});
                    }
                    break;
            }
        }
        kept.push_back(e);
    }
    g.span_text = serialize_events(kept);
    return g;
}

std::string plain_text(std::string_view span) {
    std::string out;
    for (const auto& e : parse_all(span)) {
        if (const auto* t = std::get_if<TextEvent>(&e)) out += t->text;
    }
    return text::trim(out);
}

void append_notes(std::vector<TraceNote>& to, std::vector<TraceNote>& from) {
    to.insert(to.end(), from.begin(), from.end());
    from.clear();
}

}  // namespace

SessionResult run_session(std::string_view question, const SessionConfig& config, const ProviderSet& raw,
                          TaskMode mode) {
    config.validate();
    if (text::trim(question).empty()) throw PreconditionError("session needs a question");

    auto ledger = std::make_shared<CallLedger>();
    RetryPolicy retry;
    retry.max_retries = config.retry.max_retries;
    retry.base_delay_seconds = config.retry.base_delay_seconds;
    ProviderSet base = raw;
    if (!base.clock) base.clock = std::make_shared<SteadyClock>();
    ProviderSet providers = instrument(base, ledger, retry);
    providers.params = config.generation;

    SessionResult result;
    SessionTrace& trace = result.trace;
    trace.session_id = session_id(question, mode, config);
    trace.question = std::string(question);
    trace.mode = mode;
    trace.config = config;

    mindmap::MindMap mind(providers);
    std::vector<std::string> spans;
    std::string transcript;
    int tokens_used = 0;
    int tool_calls = 0;
    int budget_refusals = 0;
    const std::string system = system_prompt(config, mode);

    auto request_for = [&](int remaining, std::optional<std::string> instruction) {
        ChatRequest request;
        request.role = ChatRole::Reasoning;
        request.params = config.generation;
        request.params.max_tokens = remaining;
        request.messages = {system_message(system), user_message(std::string(question))};
        if (!transcript.empty()) request.messages.push_back(assistant_message(transcript));
        if (instruction) request.messages.push_back(user_message(*instruction));
        return request;
    };
    auto finish = [&](Termination t, std::string answer) {
        result.termination = t;
        result.final_answer = std::move(answer);
        trace.termination = t;
        trace.final_answer = result.final_answer;
        trace.provider_calls = ledger->counts();
        return result;
    };

    while (true) {
        int remaining = config.generation.max_tokens - tokens_used;
        if (remaining <= 0) {
            std::string answer = spans.empty() ? std::string() : plain_text(spans.back());
            return finish(Termination::BudgetExhausted, answer);
        }

        GenerationSpan span;
        Generation g;
        {
            CallLedger::Capture capture(*ledger, span.notes);
            try {
                g = generate(providers, request_for(remaining, std::nullopt), true);
            } catch (const ProviderError& e) {
                providers.note("provider_error", e.what());
                trace.records.push_back(std::move(span));
                return finish(Termination::ProviderError, "");
            }
        }
        span.text = g.span_text;
        span.token_count = static_cast<int>(text::count_tokens(span.text));
        append_notes(span.notes, g.parse_notes);
        tokens_used += span.token_count;
        transcript += span.text;
        spans.push_back(span.text);

        if (!g.call) {
            auto answer = plain_text(span.text);
            trace.records.push_back(std::move(span));
            trace.records.push_back(FinalAnswer{answer, {}});
            return finish(Termination::Completed, answer);
        }

        if (config.memory == MemoryMode::MindMap) {
            auto ingest_text = text::trim(plain_text(span.text) + "\n" + g.call->query);
            if (!ingest_text.empty()) {
                CallLedger::Capture capture(*ledger, span.notes);
                try {
                    mind.ingest(ingest_text);
                } catch (const ProviderError& e) {
                    providers.note("warning", std::string("mind-map ingestion failed: ") + e.what());
                }
            }
        }
        trace.records.push_back(std::move(span));

        if (!tool_enabled(config, g.call->kind)) {
            auto injection = format_injection(disabled_tool_refusal(g.call->kind));
            trace.records.push_back(Injection{injection, {{"refusal", "tool disabled"}}});
            transcript += injection;
            continue;
        }
        if (tool_calls >= config.max_tool_calls) {
            ++budget_refusals;
            auto injection = format_injection(kBudgetRefusal);
            trace.records.push_back(Injection{injection, {{"refusal", "tool-call budget spent"}}});
            transcript += injection;
            if (budget_refusals < kMaxBudgetRefusals) continue;

            remaining = config.generation.max_tokens - tokens_used;
            if (remaining <= 0) return finish(Termination::BudgetExhausted, plain_text(spans.back()));
            GenerationSpan last;
            {
                CallLedger::Capture capture(*ledger, last.notes);
                providers.note("final_turn", "answer now without tools");
                try {
                    g = generate(providers, request_for(remaining, std::string(kAnswerNowInstruction)), false);
                } catch (const ProviderError& e) {
                    providers.note("provider_error", e.what());
                    trace.records.push_back(std::move(last));
                    return finish(Termination::ProviderError, "");
                }
            }
            last.text = g.span_text;
            last.token_count = static_cast<int>(text::count_tokens(last.text));
            append_notes(last.notes, g.parse_notes);
            auto answer = plain_text(last.text);
            trace.records.push_back(std::move(last));
            return finish(Termination::BudgetExhausted, answer);
        }

        ++tool_calls;
        ToolInvocation invocation;
        invocation.kind = g.call->kind;
        invocation.query = g.call->query;
        {
            CallLedger::Capture capture(*ledger, invocation.notes);
            double start = providers.session_clock().now_seconds();
            AgentContext ctx{config, providers, mind, std::string(question), spans};
            invocation.agent_response = dispatch_tool_call(*g.call, ctx);
            invocation.wall_time = providers.session_clock().now_seconds() - start;
        }
        auto injection = format_injection(invocation.agent_response);
        trace.records.push_back(std::move(invocation));
        trace.records.push_back(Injection{injection, {}});
        transcript += injection;
    }
}

}  // namespace agentic
