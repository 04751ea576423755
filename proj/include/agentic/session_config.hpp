// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "agentic/backends/types.hpp"

namespace agentic {

enum class MemoryMode { None, Raw, MindMap };
enum class TaskMode { Answer, Research };

std::string_view to_string(MemoryMode mode);
std::optional<MemoryMode> memory_mode_from_string(std::string_view name);
std::string_view to_string(TaskMode mode);
std::optional<TaskMode> task_mode_from_string(std::string_view name);

struct ToolFlags {
    bool web_search = true;
    bool code = true;
    bool mind_map = true;

    bool operator==(const ToolFlags&) const = default;
};

struct WebSearchToggles {
    bool query_breakdown = true;
    bool rerank = true;
    bool mindmap_context = true;
    bool knowledge_refinement = false;
    int search_count = 20;

    bool operator==(const WebSearchToggles&) const = default;
};

struct RetrySettings {
    int max_retries = 2;
    double base_delay_seconds = 0.5;

    bool operator==(const RetrySettings&) const = default;
};

struct SessionConfig {
    GenerationParams generation;
    ToolFlags tools;
    MemoryMode memory = MemoryMode::MindMap;
    int max_tool_calls = 10;
    WebSearchToggles websearch;
    /// Whitespace tokens of raw memory handed to agents (most recent kept).
    int raw_memory_tokens = 4096;
    RetrySettings retry;
    /// Provider name per chat role; roles absent here use the default.
    std::map<ChatRole, std::string> provider_selection;

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    bool operator==(const SessionConfig&) const = default;
};

/// Every key is written.  Parsing accepts any subset (the rest keep their
/// defaults), rejects unknown keys with ConfigError, and validates.
nlohmann::json to_json(const SessionConfig& config);
SessionConfig session_config_from_json(const nlohmann::json& j);

}  // namespace agentic
