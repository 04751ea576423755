// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentic/backends/providers.hpp"
#include "agentic/sandbox.hpp"

namespace agentic::codeagent {

inline constexpr int kMaxExecutions = 2;

struct CodeRequest {
    std::string code_message;
    std::string reasoning_context;
    std::string user_query;
};

/// `Write code to perform <code_message> given the context <reasoning_context>
/// to answer the query <user_query>.`  No escaping; empty slots are kept.
std::string build_code_request(const CodeRequest& request);

/// System instruction sent with every coding call.
extern const std::string_view kCodingInstruction;

/// Body of the largest ``` fenced block (ties: the first).  nullopt when the
/// text has no closed fence.
std::optional<std::string> extract_code_block(std::string_view text);

struct CodeOutcome {
    std::string answer;
    std::vector<std::string> programs;
    std::vector<ExecutionResult> executions;
};

/// Write, execute, repair once on failure, then explain.  Provider failures
/// are reported in the answer text; ConfigError from the executor
/// propagates.
CodeOutcome run_code_task(const CodeRequest& request, const ProviderSet& providers);

}  // namespace agentic::codeagent
