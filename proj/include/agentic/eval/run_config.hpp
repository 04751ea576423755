// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "agentic/backends/providers.hpp"
#include "agentic/sandbox.hpp"
#include "agentic/session_config.hpp"

namespace agentic::eval {

/// One provider entry.  `kind` is "openai" / "http" (live), "mock"
/// (scripted, inline in `mock`) or, for embeddings, "hash".
struct ProviderSpec {
    std::string kind;
    std::string base_url;
    std::string model;
    std::string api_key;
    std::string api_key_env;
    double timeout_seconds = 120.0;
    nlohmann::json mock = nlohmann::json::object();
};

enum class FixtureMode { Off, Record, Replay };

struct CodeSettings {
    std::string kind = "subprocess";
    SandboxOptions sandbox;
    /// Scripted results for kind "mock".
    std::vector<ExecutionResult> mock_results;
};

/// File form of a session config plus provider endpoints and fixtures.
struct RunConfig {
    SessionConfig session;
    /// Named chat providers; "default" serves roles without a selection.
    std::map<std::string, ProviderSpec> chat;
    std::optional<ProviderSpec> search;
    std::optional<ProviderSpec> rerank;
    std::optional<ProviderSpec> embedding;
    CodeSettings code;
    FixtureMode fixture_mode = FixtureMode::Off;
    std::filesystem::path fixture_dir;
};

/// Strict parse: unknown keys and bad values throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fresh provider instances for one session (mocks carry per-session
/// state).  API keys named by api_key_env are read here; a missing variable
/// is a ConfigError.  Selections naming unknown providers are ConfigErrors.
ProviderSet build_providers(const RunConfig& config);

}  // namespace agentic::eval
