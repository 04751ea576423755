// SPDX-License-Identifier: Apache-2.0
#include "agentic/backends/types.hpp"

#include <algorithm>

#include "agentic/errors.hpp"

namespace agentic {

std::string_view to_string(ChatRole role) {
    switch (role) {
        case ChatRole::Reasoning: return "reasoning";
        case ChatRole::GraphConstruction: return "graph_construction";
        case ChatRole::CommunitySummary: return "community_summary";
        case ChatRole::ContextSynthesis: return "context_synthesis";
        case ChatRole::GraphQuery: return "graph_query";
        case ChatRole::QueryBreakdown: return "query_breakdown";
        case ChatRole::KnowledgeRefinement: return "knowledge_refinement";
        case ChatRole::SearchRag: return "search_rag";
        case ChatRole::SnippetSynthesis: return "snippet_synthesis";
        case ChatRole::Coding: return "coding";
    }
    return "unknown";
}

std::optional<ChatRole> chat_role_from_string(std::string_view name) {
    for (auto role : kAllChatRoles) {
        if (to_string(role) == name) return role;
    }
    return std::nullopt;
}

std::string_view to_string(Message::Role role) {
    switch (role) {
        case Message::Role::System: return "system";
        case Message::Role::User: return "user";
        case Message::Role::Assistant: return "assistant";
    }
    return "user";
}

Message::Role message_role_from_string(std::string_view name) {
    if (name == "system") return Message::Role::System;
    if (name == "user") return Message::Role::User;
    if (name == "assistant") return Message::Role::Assistant;
    throw PreconditionError("unknown message role: " + std::string(name));
}

void GenerationParams::validate() const {
    if (max_tokens < 1) throw PreconditionError("max_tokens must be >= 1");
    if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw PreconditionError("top_p must be in (0, 1]");
    if (top_k < 1) throw PreconditionError("top_k must be >= 1");
    if (!(repetition_penalty > 0.0)) throw PreconditionError("repetition_penalty must be > 0");
}

void to_json(nlohmann::json& j, const GenerationParams& p) {
    j = nlohmann::json{{"max_tokens", p.max_tokens},
                       {"temperature", p.temperature},
                       {"top_p", p.top_p},
                       {"top_k", p.top_k},
                       {"repetition_penalty", p.repetition_penalty}};
}

void from_json(const nlohmann::json& j, GenerationParams& p) {
    static const std::array<std::string_view, 5> known = {"max_tokens", "temperature", "top_p",
                                                          "top_k", "repetition_penalty"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown generation key: " + key);
        }
    }
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.top_k = j.value("top_k", p.top_k);
    p.repetition_penalty = j.value("repetition_penalty", p.repetition_penalty);
}

void ChatRequest::validate() const {
    if (messages.empty()) throw PreconditionError("chat request has no messages");
    params.validate();
}

nlohmann::json to_json(const ChatRequest& r) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : r.messages) {
        msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    nlohmann::json params;
    to_json(params, r.params);
    return {{"role", to_string(r.role)}, {"messages", msgs}, {"params", params}, {"stream", r.stream}};
}

nlohmann::json to_json(const ChatResponse& r) {
    return {{"text", r.text}, {"token_count", r.token_count}, {"finish_reason", r.finish_reason}};
}

ChatResponse chat_response_from_json(const nlohmann::json& j) {
    ChatResponse r;
    r.text = j.at("text").get<std::string>();
    r.token_count = j.value("token_count", 0);
    r.finish_reason = j.value("finish_reason", std::string("stop"));
    return r;
}

void to_json(nlohmann::json& j, const WebPage& p) {
    j = nlohmann::json{{"url", p.url}, {"title", p.title}, {"content", p.content}};
}

void from_json(const nlohmann::json& j, WebPage& p) {
    p.url = j.at("url").get<std::string>();
    p.title = j.value("title", std::string());
    if (j.contains("content")) {
        p.content = j.at("content").get<std::string>();
    } else {
        p.content = j.value("snippet", std::string());
    }
}

}  // namespace agentic
