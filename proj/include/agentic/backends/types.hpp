// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentic {

/// Every pipeline stage that talks to a chat model.  Each role resolves to an
/// independently configured provider and model id.
enum class ChatRole {
    Reasoning,
    GraphConstruction,
    CommunitySummary,
    ContextSynthesis,
    GraphQuery,
    QueryBreakdown,
    KnowledgeRefinement,
    SearchRag,
    SnippetSynthesis,
    Coding,
};

inline constexpr std::array<ChatRole, 10> kAllChatRoles = {
    ChatRole::Reasoning,        ChatRole::GraphConstruction, ChatRole::CommunitySummary,
    ChatRole::ContextSynthesis, ChatRole::GraphQuery,        ChatRole::QueryBreakdown,
    ChatRole::KnowledgeRefinement, ChatRole::SearchRag,      ChatRole::SnippetSynthesis,
    ChatRole::Coding,
};

std::string_view to_string(ChatRole role);
std::optional<ChatRole> chat_role_from_string(std::string_view name);

struct Message {
    enum class Role { System, User, Assistant };
    Role role{Role::User};
    std::string content;

    bool operator==(const Message&) const = default;
};

std::string_view to_string(Message::Role role);
Message::Role message_role_from_string(std::string_view name);

inline Message system_message(std::string content) { return {Message::Role::System, std::move(content)}; }
inline Message user_message(std::string content) { return {Message::Role::User, std::move(content)}; }
inline Message assistant_message(std::string content) {
    return {Message::Role::Assistant, std::move(content)};
}

/// Sampling parameters shared by every generative call.
struct GenerationParams {
    int max_tokens = 32768;
    double temperature = 0.7;
    double top_p = 0.8;
    int top_k = 20;
    double repetition_penalty = 1.05;

    /// Throws PreconditionError on out-of-range values.
    void validate() const;
    bool operator==(const GenerationParams&) const = default;
};

void to_json(nlohmann::json& j, const GenerationParams& p);
void from_json(const nlohmann::json& j, GenerationParams& p);

struct ChatRequest {
    ChatRole role{ChatRole::Reasoning};
    std::vector<Message> messages;
    GenerationParams params;
    bool stream = false;

    /// Throws PreconditionError when messages is empty.
    void validate() const;
};

struct ChatResponse {
    std::string text;
    int token_count = 0;
    std::string finish_reason = "stop";

    bool operator==(const ChatResponse&) const = default;
};

nlohmann::json to_json(const ChatRequest& r);
nlohmann::json to_json(const ChatResponse& r);
ChatResponse chat_response_from_json(const nlohmann::json& j);

struct WebPage {
    std::string url;
    std::string title;
    std::string content;

    bool operator==(const WebPage&) const = default;
};

void to_json(nlohmann::json& j, const WebPage& p);
void from_json(const nlohmann::json& j, WebPage& p);

}  // namespace agentic
