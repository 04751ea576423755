// SPDX-License-Identifier: Apache-2.0
#include "agentic/session_config.hpp"

#include <algorithm>
#include <initializer_list>

#include "agentic/errors.hpp"

namespace agentic {

std::string_view to_string(MemoryMode mode) {
    switch (mode) {
        case MemoryMode::None: return "none";
        case MemoryMode::Raw: return "raw";
        case MemoryMode::MindMap: return "mindmap";
    }
    return "none";
}

std::optional<MemoryMode> memory_mode_from_string(std::string_view name) {
    if (name == "none") return MemoryMode::None;
    if (name == "raw") return MemoryMode::Raw;
    if (name == "mindmap") return MemoryMode::MindMap;
    return std::nullopt;
}

std::string_view to_string(TaskMode mode) { return mode == TaskMode::Answer ? "answer" : "research"; }

std::optional<TaskMode> task_mode_from_string(std::string_view name) {
    if (name == "answer") return TaskMode::Answer;
    if (name == "research") return TaskMode::Research;
    return std::nullopt;
}

void SessionConfig::validate() const {
    try {
        generation.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    if (max_tool_calls < 0) throw ConfigError("max_tool_calls must be >= 0");
    if (websearch.search_count < 1) throw ConfigError("websearch.search_count must be >= 1");
    if (raw_memory_tokens < 0) throw ConfigError("raw_memory_tokens must be >= 0");
    if (retry.max_retries < 0) throw ConfigError("retry.max_retries must be >= 0");
    if (retry.base_delay_seconds < 0) throw ConfigError("retry.base_delay_seconds must be >= 0");
}

namespace {

void check_keys(const nlohmann::json& j, std::string_view where, std::initializer_list<std::string_view> known) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key in " + std::string(where) + ": " + key);
        }
    }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("bad value for ") + key);
    }
}

}  // namespace

nlohmann::json to_json(const SessionConfig& c) {
    nlohmann::json selection = nlohmann::json::object();
    for (const auto& [role, name] : c.provider_selection) selection[std::string(to_string(role))] = name;
    return {
        {"generation", c.generation},
        {"tools", {{"web_search", c.tools.web_search}, {"code", c.tools.code}, {"mind_map", c.tools.mind_map}}},
        {"memory", to_string(c.memory)},
        {"max_tool_calls", c.max_tool_calls},
        {"websearch",
         {{"query_breakdown", c.websearch.query_breakdown},
          {"rerank", c.websearch.rerank},
          {"mindmap_context", c.websearch.mindmap_context},
          {"knowledge_refinement", c.websearch.knowledge_refinement},
          {"search_count", c.websearch.search_count}}},
        {"raw_memory_tokens", c.raw_memory_tokens},
        {"retry", {{"max_retries", c.retry.max_retries}, {"base_delay_seconds", c.retry.base_delay_seconds}}},
        {"provider_selection", selection},
    };
}

SessionConfig session_config_from_json(const nlohmann::json& j) {
    check_keys(j, "session config",
               {"generation", "tools", "memory", "max_tool_calls", "websearch", "raw_memory_tokens", "retry",
                "provider_selection"});
    SessionConfig c;
    if (j.contains("generation")) {
        try {
            from_json(j.at("generation"), c.generation);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("bad generation parameters");
        }
    }
    if (j.contains("tools")) {
        const auto& t = j.at("tools");
        check_keys(t, "tools", {"web_search", "code", "mind_map"});
        read(t, "web_search", c.tools.web_search);
        read(t, "code", c.tools.code);
        read(t, "mind_map", c.tools.mind_map);
    }
    if (j.contains("memory")) {
        std::string name;
        read(j, "memory", name);
        auto mode = memory_mode_from_string(name);
        if (!mode) throw ConfigError("unknown memory mode: " + name);
        c.memory = *mode;
    }
    read(j, "max_tool_calls", c.max_tool_calls);
    if (j.contains("websearch")) {
        const auto& w = j.at("websearch");
        check_keys(w, "websearch", {"query_breakdown", "rerank", "mindmap_context", "knowledge_refinement",
                                    "search_count"});
        read(w, "query_breakdown", c.websearch.query_breakdown);
        read(w, "rerank", c.websearch.rerank);
        read(w, "mindmap_context", c.websearch.mindmap_context);
        read(w, "knowledge_refinement", c.websearch.knowledge_refinement);
        read(w, "search_count", c.websearch.search_count);
    }
    read(j, "raw_memory_tokens", c.raw_memory_tokens);
    if (j.contains("retry")) {
        const auto& r = j.at("retry");
        check_keys(r, "retry", {"max_retries", "base_delay_seconds"});
        read(r, "max_retries", c.retry.max_retries);
        read(r, "base_delay_seconds", c.retry.base_delay_seconds);
    }
    if (j.contains("provider_selection")) {
        const auto& s = j.at("provider_selection");
        if (!s.is_object()) throw ConfigError("provider_selection must be an object");
        for (const auto& [key, value] : s.items()) {
            auto role = chat_role_from_string(key);
            if (!role) throw ConfigError("unknown chat role in provider_selection: " + key);
            if (!value.is_string()) throw ConfigError("provider_selection values must be strings");
            c.provider_selection[*role] = value.get<std::string>();
        }
    }
    c.validate();
    return c;
}

}  // namespace agentic
