// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "agentic/backends/providers.hpp"
#include "agentic/mindmap/agent.hpp"
#include "agentic/session_config.hpp"
#include "agentic/stream_parser.hpp"
#include "agentic/trace.hpp"

namespace agentic {

inline constexpr std::string_view kNoResult = "[no result]";
inline constexpr std::string_view kBudgetRefusal =
    "[tool call refused: the tool-call budget for this session is spent; continue without tools]";
inline constexpr std::string_view kAnswerNowInstruction =
    "The tool budget is exhausted. Answer the question now without any further tool calls.";
/// Budget refusals tolerated before the forced final turn.
inline constexpr int kMaxBudgetRefusals = 2;

/// Fixed refusal for a tool that is disabled in the session config.
std::string disabled_tool_refusal(ToolKind kind);

/// `<<RESULT>>` + text + `<<END_RESULT>>`.  Empty text becomes kNoResult;
/// every marker inside the text is escaped by doubling its angle brackets.
std::string format_injection(std::string_view agent_text);

/// Inverse of the escaping done by format_injection (body only).
std::string unescape_injection_body(std::string_view body);

/// System prompt teaching the marker grammar for the enabled tools.
std::string system_prompt(const SessionConfig& config, TaskMode mode);

/// Generation spans, most recent first, cut to the newest `budget_tokens`
/// whitespace tokens.
std::string raw_memory(const std::vector<std::string>& spans_oldest_first, int budget_tokens);

/// What an agent sees of the session.
struct AgentContext {
    const SessionConfig& config;
    const ProviderSet& providers;
    mindmap::MindMap& mind;
    std::string question;
    /// Spans so far, oldest first (used for raw memory).
    const std::vector<std::string>& spans;
};

/// Reasoning context for an agent per the memory mode.  `for_search`
/// applies the websearch mindmap_context toggle.
std::string reasoning_context(AgentContext& ctx, bool for_search);

/// Runs the agent for one call.  A disabled tool yields
/// disabled_tool_refusal(); agent failures yield an error text.
/// ConfigError and ReplayMismatchError propagate.
std::string dispatch_tool_call(const ToolCallEvent& event, AgentContext& ctx);

struct SessionResult {
    std::string final_answer;
    SessionTrace trace;
    Termination termination = Termination::Completed;
};

/// Runs one session.  `providers` must be uninstrumented: the session wraps
/// them with its own call accounting and the config's retry policy.
SessionResult run_session(std::string_view question, const SessionConfig& config, const ProviderSet& providers,
                          TaskMode mode = TaskMode::Answer);

/// Stable id from the question, mode and config snapshot.
std::string session_id(std::string_view question, TaskMode mode, const SessionConfig& config);

}  // namespace agentic
