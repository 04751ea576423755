// SPDX-License-Identifier: Apache-2.0
#include "agentic/eval/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <initializer_list>

#include "agentic/backends/http.hpp"
#include "agentic/backends/mock.hpp"
#include "agentic/errors.hpp"
#include "agentic/rag.hpp"

namespace agentic::eval {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> known) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key in " + where + ": " + key);
        }
    }
}

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for " + where + "." + key);
    }
}

ProviderSpec parse_spec(const json& j, const std::string& where) {
    check_keys(j, where, {"kind", "base_url", "model", "api_key", "api_key_env", "timeout_seconds", "mock"});
    ProviderSpec s;
    s.kind = get<std::string>(j, "kind", "", where);
    if (s.kind.empty()) throw ConfigError(where + ".kind is required");
    s.base_url = get<std::string>(j, "base_url", "", where);
    s.model = get<std::string>(j, "model", "", where);
    s.api_key = get<std::string>(j, "api_key", "", where);
    s.api_key_env = get<std::string>(j, "api_key_env", "", where);
    s.timeout_seconds = get<double>(j, "timeout_seconds", s.timeout_seconds, where);
    if (j.contains("mock")) s.mock = j.at("mock");
    bool live = s.kind == "openai" || s.kind == "http";
    if (live && s.base_url.empty()) throw ConfigError(where + ".base_url is required for kind " + s.kind);
    return s;
}

void require_kind(const ProviderSpec& s, const std::string& where, std::initializer_list<std::string_view> kinds) {
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
        throw ConfigError("unsupported kind for " + where + ": " + s.kind);
    }
}

HttpEndpoint endpoint(const ProviderSpec& s) {
    HttpEndpoint e{s.base_url, s.api_key, s.model, s.timeout_seconds};
    if (!s.api_key_env.empty()) {
        const char* value = std::getenv(s.api_key_env.c_str());
        if (!value) throw ConfigError("environment variable " + s.api_key_env + " is not set");
        e.api_key = value;
    }
    return e;
}

MockReply mock_reply(const json& j) {
    if (j.is_string()) return MockReply::ok(j.get<std::string>());
    auto failure = j.value("failure", std::string());
    if (failure == "transport") return MockReply::transport_failure();
    if (failure == "application") return MockReply::application_failure();
    throw ConfigError("mock reply must be a string or {\"failure\": \"transport\"|\"application\"}");
}

std::shared_ptr<ChatProvider> make_chat(const ProviderSpec& s, const std::string& where) {
    require_kind(s, where, {"openai", "mock"});
    if (s.kind == "openai") return std::make_shared<OpenAIChatClient>(endpoint(s));
    check_keys(s.mock, where + ".mock", {"replies", "keyed", "chunk_size"});
    auto chat = std::make_shared<MockChatProvider>();
    chat->set_chunk_size(get<std::size_t>(s.mock, "chunk_size", 0, where + ".mock"));
    for (const auto& r : s.mock.value("replies", json::array())) chat->push(mock_reply(r));
    const json keyed = s.mock.value("keyed", json::object());
    for (const auto& [key, replies] : keyed.items()) {
        std::vector<MockReply> script;
        for (const auto& r : replies) script.push_back(mock_reply(r));
        chat->add_keyed_script(key, std::move(script));
    }
    return chat;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    check_keys(j, "config", {"session", "providers", "code", "fixtures"});
    RunConfig c;
    if (j.contains("session")) c.session = session_config_from_json(j.at("session"));
    if (j.contains("providers")) {
        const auto& p = j.at("providers");
        check_keys(p, "providers", {"chat", "search", "rerank", "embedding"});
        if (p.contains("chat")) {
            const auto& chat = p.at("chat");
            if (!chat.is_object()) throw ConfigError("providers.chat must be an object");
            for (const auto& [name, spec] : chat.items()) {
                c.chat[name] = parse_spec(spec, "providers.chat." + name);
                require_kind(c.chat[name], "providers.chat." + name, {"openai", "mock"});
            }
        }
        if (p.contains("search")) {
            c.search = parse_spec(p.at("search"), "providers.search");
            require_kind(*c.search, "providers.search", {"http", "mock"});
        }
        if (p.contains("rerank")) {
            c.rerank = parse_spec(p.at("rerank"), "providers.rerank");
            require_kind(*c.rerank, "providers.rerank", {"http", "mock"});
        }
        if (p.contains("embedding")) {
            c.embedding = parse_spec(p.at("embedding"), "providers.embedding");
            require_kind(*c.embedding, "providers.embedding", {"openai", "hash"});
        }
    }
    for (const auto& [role, name] : c.session.provider_selection) {
        if (!c.chat.count(name)) {
            throw ConfigError("provider_selection for " + std::string(to_string(role)) + " names unknown provider " +
                              name);
        }
    }
    if (j.contains("code")) {
        const auto& code = j.at("code");
        check_keys(code, "code", {"kind", "interpreter", "timeout_seconds", "output_cap_bytes", "deny_network",
                                  "mock_results"});
        c.code.kind = get<std::string>(code, "kind", c.code.kind, "code");
        if (c.code.kind != "subprocess" && c.code.kind != "mock") {
            throw ConfigError("unsupported kind for code: " + c.code.kind);
        }
        c.code.sandbox.interpreter = get(code, "interpreter", c.code.sandbox.interpreter, "code");
        if (c.code.sandbox.interpreter.empty()) throw ConfigError("code.interpreter must not be empty");
        c.code.sandbox.timeout_seconds = get(code, "timeout_seconds", c.code.sandbox.timeout_seconds, "code");
        c.code.sandbox.output_cap_bytes = get(code, "output_cap_bytes", c.code.sandbox.output_cap_bytes, "code");
        c.code.sandbox.deny_network = get(code, "deny_network", c.code.sandbox.deny_network, "code");
        if (c.code.sandbox.timeout_seconds <= 0) throw ConfigError("code.timeout_seconds must be > 0");
        if (code.contains("mock_results")) {
            try {
                c.code.mock_results = code.at("mock_results").get<std::vector<ExecutionResult>>();
            } catch (const json::exception& e) {
                throw ConfigError(std::string("bad code.mock_results: ") + e.what());
            }
        }
    }
    if (j.contains("fixtures")) {
        const auto& f = j.at("fixtures");
        check_keys(f, "fixtures", {"mode", "dir"});
        auto mode = get<std::string>(f, "mode", "off", "fixtures");
        if (mode == "off") {
            c.fixture_mode = FixtureMode::Off;
        } else if (mode == "record") {
            c.fixture_mode = FixtureMode::Record;
        } else if (mode == "replay") {
            c.fixture_mode = FixtureMode::Replay;
        } else {
            throw ConfigError("unknown fixtures.mode: " + mode);
        }
        c.fixture_dir = get<std::string>(f, "dir", "", "fixtures");
        if (c.fixture_mode != FixtureMode::Off && c.fixture_dir.empty()) {
            throw ConfigError("fixtures.dir is required when fixtures.mode is " + mode);
        }
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

ProviderSet build_providers(const RunConfig& config) {
    ProviderSet set;
    std::map<std::string, std::shared_ptr<ChatProvider>> named;
    for (const auto& [name, spec] : config.chat) named[name] = make_chat(spec, "providers.chat." + name);
    if (auto it = named.find("default"); it != named.end()) set.default_chat = it->second;
    for (const auto& [role, name] : config.session.provider_selection) {
        auto it = named.find(name);
        if (it == named.end()) throw ConfigError("provider_selection names unknown provider " + name);
        set.chat[role] = it->second;
    }

    if (config.search) {
        if (config.search->kind == "http") {
            set.search = std::make_shared<HttpSearchClient>(endpoint(*config.search));
        } else {
            const auto& m = config.search->mock;
            check_keys(m, "providers.search.mock", {"results"});
            auto search = std::make_shared<MockSearchProvider>();
            const json results = m.value("results", json::object());
            for (const auto& [query, pages] : results.items()) {
                try {
                    search->set(query, pages.get<std::vector<WebPage>>());
                } catch (const json::exception& e) {
                    throw ConfigError(std::string("bad providers.search.mock.results: ") + e.what());
                }
            }
            set.search = search;
        }
    }
    if (config.rerank) {
        if (config.rerank->kind == "http") {
            set.rerank = std::make_shared<HttpRerankClient>(endpoint(*config.rerank));
        } else {
            const auto& m = config.rerank->mock;
            check_keys(m, "providers.rerank.mock", {"default_score", "rules", "queued"});
            auto rerank = std::make_shared<MockRerankProvider>();
            try {
                rerank->set_default_score(m.value("default_score", 0.5));
                for (const auto& rule : m.value("rules", json::array())) {
                    rerank->add_rule(rule.at(0).get<std::string>(), rule.at(1).get<double>());
                }
                for (const auto& scores : m.value("queued", json::array())) {
                    rerank->push_scores(scores.get<std::vector<double>>());
                }
            } catch (const json::exception& e) {
                throw ConfigError(std::string("bad providers.rerank.mock: ") + e.what());
            }
            set.rerank = rerank;
        }
    }
    if (!config.embedding || config.embedding->kind == "hash") {
        set.embedding = std::make_shared<rag::HashEmbeddingProvider>();
    } else {
        set.embedding = std::make_shared<OpenAIEmbeddingClient>(endpoint(*config.embedding));
    }
    if (config.code.kind == "mock") {
        set.executor = std::make_shared<MockExecutor>(config.code.mock_results);
    } else {
        set.executor = std::make_shared<SubprocessExecutor>(config.code.sandbox);
    }
    set.clock = std::make_shared<SteadyClock>();
    set.params = config.session.generation;
    return set;
}

}  // namespace agentic::eval
