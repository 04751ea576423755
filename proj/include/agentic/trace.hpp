// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agentic/backends/providers.hpp"
#include "agentic/session_config.hpp"
#include "agentic/stream_parser.hpp"

namespace agentic {

inline constexpr int kTraceVersion = 1;

struct GenerationSpan {
    std::string text;
    int token_count = 0;
    std::vector<TraceNote> notes;

    bool operator==(const GenerationSpan&) const = default;
};

struct ToolInvocation {
    ToolKind kind = ToolKind::WebSearch;
    std::string query;
    std::string agent_response;
    double wall_time = 0.0;
    std::vector<TraceNote> notes;

    bool operator==(const ToolInvocation&) const = default;
};

struct Injection {
    std::string text;
    std::vector<TraceNote> notes;

    bool operator==(const Injection&) const = default;
};

struct FinalAnswer {
    std::string text;
    std::vector<TraceNote> notes;

    bool operator==(const FinalAnswer&) const = default;
};

using TraceRecord = std::variant<GenerationSpan, ToolInvocation, Injection, FinalAnswer>;

enum class Termination { Completed, BudgetExhausted, ProviderError };

std::string_view to_string(Termination t);

struct SessionTrace {
    std::string session_id;
    std::string question;
    TaskMode mode = TaskMode::Answer;
    SessionConfig config;
    std::vector<TraceRecord> records;
    Termination termination = Termination::Completed;
    std::string final_answer;
    std::map<std::string, int> provider_calls;

    template <typename R>
    std::size_t count() const {
        std::size_t n = 0;
        for (const auto& r : records) n += std::holds_alternative<R>(r) ? 1 : 0;
        return n;
    }

    bool operator==(const SessionTrace&) const = default;
};

/// JSON-lines form.  Line 1 is the session header
/// {"type":"session","version":1,"session_id",...,"config":{...}}, then one
/// line per record ("generation", "tool", "injection", "final"), then a
/// "summary" line with termination, final answer and provider call counts.
std::string serialize_trace(const SessionTrace& trace);

/// Inverse of serialize_trace.  Throws std::runtime_error on malformed input
/// or an unsupported version.
SessionTrace parse_trace(std::string_view jsonl);

}  // namespace agentic
