// SPDX-License-Identifier: Apache-2.0
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "agentic/backends/http.hpp"
#include "agentic/errors.hpp"

using namespace agentic;
using nlohmann::json;

namespace {

class LocalServer {
public:
    LocalServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& server() { return server_; }
    HttpEndpoint endpoint(std::string prefix = "/v1") const {
        return {"http://127.0.0.1:" + std::to_string(port_) + prefix, "sk-test", "test-model", 5.0};
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

ChatRequest chat_request(bool stream) {
    ChatRequest r;
    r.role = ChatRole::Reasoning;
    r.messages = {system_message("sys"), user_message("hi")};
    r.stream = stream;
    return r;
}

std::string sse(const json& j) { return "data: " + j.dump() + "\n\n"; }

json delta(const std::string& content) { return {{"choices", {{{"delta", {{"content", content}}}}}}}; }

}  // namespace

TEST(OpenAIChatClient, SendsParamsAndParsesCompletion) {
    LocalServer local;
    json seen;
    std::string auth;
    local.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "Paris"}}}, {"finish_reason", "stop"}}}},
                     {"usage", {{"completion_tokens", 1}}}};
        res.set_content(body.dump(), "application/json");
    });
    OpenAIChatClient client(local.endpoint());
    auto response = client.complete(chat_request(false));
    EXPECT_EQ(response.text, "Paris");
    EXPECT_EQ(response.token_count, 1);
    EXPECT_EQ(response.finish_reason, "stop");
    EXPECT_EQ(auth, "Bearer sk-test");
    EXPECT_EQ(seen["model"], "test-model");
    EXPECT_EQ(seen["max_tokens"], 32768);
    EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.7);
    EXPECT_DOUBLE_EQ(seen["top_p"].get<double>(), 0.8);
    EXPECT_EQ(seen["top_k"], 20);
    EXPECT_DOUBLE_EQ(seen["repetition_penalty"].get<double>(), 1.05);
    EXPECT_EQ(seen["messages"].size(), 2u);
    EXPECT_EQ(seen["messages"][0]["role"], "system");
}

TEST(OpenAIChatClient, StreamsServerSentEvents) {
    LocalServer local;
    local.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        std::string body = sse(delta("Hel")) + sse(delta("lo")) +
                           sse({{"choices", {{{"delta", json::object()}, {"finish_reason", "stop"}}}}}) +
                           sse({{"choices", json::array()}, {"usage", {{"completion_tokens", 2}}}}) +
                           "data: [DONE]\n\n";
        res.set_content(body, "text/event-stream");
    });
    OpenAIChatClient client(local.endpoint());
    std::vector<std::string> pieces;
    auto response = client.complete(chat_request(true), [&](std::string_view p) {
        pieces.emplace_back(p);
        return true;
    });
    EXPECT_EQ(pieces, (std::vector<std::string>{"Hel", "lo"}));
    EXPECT_EQ(response.text, "Hello");
    EXPECT_EQ(response.token_count, 2);
}

TEST(OpenAIChatClient, CallerCanStopTheStream) {
    LocalServer local;
    local.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.set_chunked_content_provider("text/event-stream", [](size_t, httplib::DataSink& sink) {
            for (int i = 0; i < 50; ++i) {
                auto s = sse(delta("x"));
                if (!sink.write(s.data(), s.size())) return false;
            }
            sink.done();
            return true;
        });
    });
    OpenAIChatClient client(local.endpoint());
    int seen = 0;
    auto response = client.complete(chat_request(true), [&](std::string_view) { return ++seen < 3; });
    EXPECT_EQ(seen, 3);
    EXPECT_EQ(response.text, "xxx");
}

TEST(OpenAIChatClient, ServerErrorIsApplicationError) {
    LocalServer local;
    local.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    OpenAIChatClient client(local.endpoint());
    try {
        client.complete(chat_request(false));
        FAIL() << "expected ProviderError";
    } catch (const ProviderError& e) {
        EXPECT_FALSE(e.retryable());
        EXPECT_NE(std::string(e.what()).find("500"), std::string::npos);
    }
}

TEST(OpenAIChatClient, ConnectionRefusedIsTransportError) {
    int port;
    {
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    OpenAIChatClient client(HttpEndpoint{"http://127.0.0.1:" + std::to_string(port), "", "m", 1.0});
    try {
        client.complete(chat_request(false));
        FAIL() << "expected ProviderError";
    } catch (const ProviderError& e) {
        EXPECT_TRUE(e.retryable());
    }
}

TEST(HttpSearchClient, PostsQueryAndCount) {
    LocalServer local;
    json seen;
    local.server().Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        json body = {{"results",
                      {{{"url", "https://a"}, {"title", "A"}, {"content", "alpha"}},
                       {{"url", "https://b"}, {"title", "B"}, {"snippet", "beta"}}}}};
        res.set_content(body.dump(), "application/json");
    });
    HttpSearchClient client(local.endpoint(""));
    auto pages = client.search("q", 20);
    EXPECT_EQ(seen["query"], "q");
    EXPECT_EQ(seen["count"], 20);
    ASSERT_EQ(pages.size(), 2u);
    EXPECT_EQ(pages[1].content, "beta");
}

TEST(HttpRerankClient, RealignsByIndexAndRejectsShortResults) {
    LocalServer local;
    int results = 3;
    local.server().Post("/rerank", [&](const httplib::Request&, httplib::Response& res) {
        json r = json::array();
        if (results >= 1) r.push_back({{"index", 2}, {"relevance_score", 0.9}});
        if (results >= 2) r.push_back({{"index", 0}, {"relevance_score", 0.5}});
        if (results >= 3) r.push_back({{"index", 1}, {"relevance_score", 0.1}});
        res.set_content(json{{"results", r}}.dump(), "application/json");
    });
    HttpRerankClient client(local.endpoint(""));
    std::vector<std::string> docs{"a", "b", "c"};
    EXPECT_EQ(client.score("q", docs), (std::vector<double>{0.5, 0.1, 0.9}));
    results = 2;
    EXPECT_THROW(client.score("q", docs), ProviderError);
}

TEST(OpenAIEmbeddingClient, OrdersByIndex) {
    LocalServer local;
    local.server().Post("/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
        json body = {{"data",
                      {{{"index", 1}, {"embedding", {0.0, 1.0}}}, {{"index", 0}, {"embedding", {1.0, 0.0}}}}}};
        res.set_content(body.dump(), "application/json");
    });
    OpenAIEmbeddingClient client(local.endpoint());
    std::vector<std::string> texts{"x", "y"};
    auto v = client.embed(texts);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0], (std::vector<float>{1.0f, 0.0f}));
    EXPECT_EQ(v[1], (std::vector<float>{0.0f, 1.0f}));
}

TEST(SseDecoder, HandlesSplitsAndCrlfFraming) {
    SseDecoder d;
    auto a = d.feed("data: {\"choices\":[{\"delta\":{\"content\":\"A\"}}]}\r");
    EXPECT_TRUE(a.empty());
    auto b = d.feed("\n\r\ndata: {\"choices\":[{\"delta\":{\"content\":\"B\"},\"finish_reason\":\"length\"}]}\n\ndata: [DO");
    EXPECT_EQ(b, (std::vector<std::string>{"A", "B"}));
    EXPECT_FALSE(d.done());
    d.feed("NE]\n\n");
    EXPECT_TRUE(d.done());
    EXPECT_EQ(d.finish_reason(), "length");
}

TEST(HttpEndpoint, RejectsUrlWithoutScheme) {
    OpenAIChatClient client(HttpEndpoint{"localhost:1234", "", "m", 1.0});
    EXPECT_THROW(client.complete(chat_request(false)), ConfigError);
}
