// SPDX-License-Identifier: Apache-2.0
#include "agentic/codeagent.hpp"

#include <cstdio>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic::codeagent {

const std::string_view kCodingInstruction =
    "You are a coding assistant. When asked to write code, reply with one complete Python 3 program in a single "
    "```python fenced block; it must print its results to stdout and must not read input or use the network. "
    "When asked to explain a run, always return the outcome in natural language.";

std::string build_code_request(const CodeRequest& request) {
    return "Write code to perform " + request.code_message + " given the context " + request.reasoning_context +
           " to answer the query " + request.user_query + ".";
}

std::optional<std::string> extract_code_block(std::string_view text) {
    std::optional<std::string> best;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        auto body = text.find('\n', open + 3);
        if (body == std::string_view::npos) break;
        ++body;
        auto close = text.find("```", body);
        if (close == std::string_view::npos) break;
        std::string code(text.substr(body, close - body));
        if (!best || code.size() > best->size()) best = std::move(code);
        pos = close + 3;
    }
    return best;
}

namespace {

std::string ask(const ProviderSet& providers, std::vector<Message> history) {
    ChatRequest request;
    request.role = ChatRole::Coding;
    request.params = providers.params;
    request.messages.push_back(system_message(std::string(kCodingInstruction)));
    for (auto& m : history) request.messages.push_back(std::move(m));
    return providers.chat_for(ChatRole::Coding).complete(request).text;
}

std::string describe_run(const std::string& code, const ExecutionResult& r) {
    std::string s = "Program:\n```python\n" + code + "```\n\nExit status: " + std::to_string(r.exit_status);
    if (r.timed_out) s += " (killed after timeout)";
    s += "\nstdout:\n" + (r.stdout_text.empty() ? std::string("(empty)") : r.stdout_text);
    s += "\nstderr:\n" + (r.stderr_text.empty() ? std::string("(empty)") : r.stderr_text);
    return s;
}

std::string local_report(const ExecutionResult& r) {
    if (r.succeeded()) {
        auto out = text::trim(r.stdout_text);
        return out.empty() ? "The program ran successfully but printed nothing."
                           : "The program ran successfully and printed: " + out;
    }
    if (r.timed_out) return "The program did not finish before the time limit.";
    auto err = text::trim(r.stderr_text);
    return "The program failed with exit status " + std::to_string(r.exit_status) +
           (err.empty() ? std::string(".") : ": " + err);
}

ExecutionResult execute(const ProviderSet& providers, const std::string& code, CodeOutcome& outcome) {
    auto result = providers.code_executor().execute(code);
    outcome.programs.push_back(code);
    outcome.executions.push_back(result);
    char duration[32];
    std::snprintf(duration, sizeof duration, "%.3f", result.duration_seconds);
    providers.note("execution", "exit_status=" + std::to_string(result.exit_status) +
                                    " timed_out=" + (result.timed_out ? "true" : "false") +
                                    " duration=" + duration);
    return result;
}

}  // namespace

CodeOutcome run_code_task(const CodeRequest& request, const ProviderSet& providers) {
    if (text::trim(request.code_message).empty()) throw PreconditionError("code request needs a code message");
    CodeOutcome outcome;
    std::vector<Message> history{user_message(build_code_request(request))};

    std::optional<std::string> code;
    try {
        auto reply = ask(providers, history);
        code = extract_code_block(reply);
        if (!code) {
            providers.note("reprompt", "coding reply had no fenced code block");
            history.push_back(assistant_message(reply));
            history.push_back(user_message("Reply with the complete program inside a single ```python fenced block."));
            code = extract_code_block(ask(providers, history));
        }
    } catch (const ProviderError& e) {
        providers.note("fallback", std::string("coding: ") + e.what());
        outcome.answer = std::string("The coding assistant could not be reached, so no code was run (") + e.what() +
                         ").";
        return outcome;
    }
    if (!code) {
        outcome.answer = "The coding assistant did not produce a runnable program, so no code was run.";
        return outcome;
    }

    auto result = execute(providers, *code, outcome);
    if (!result.succeeded()) {
        try {
            auto repair = ask(providers, {user_message(build_code_request(request)),
                                          user_message("The program below failed. Return a corrected program.\n\n" +
                                                       describe_run(*code, result))});
            if (auto revised = extract_code_block(repair)) {
                code = std::move(revised);
                result = execute(providers, *code, outcome);
            } else {
                providers.note("warning", "repair reply had no fenced code block");
            }
        } catch (const ProviderError& e) {
            providers.note("fallback", std::string("repair: ") + e.what());
        }
    }

    try {
        outcome.answer = text::trim(
            ask(providers, {user_message(build_code_request(request)),
                            user_message("Explain in natural language what this run shows for the query.\n\n" +
                                         describe_run(*code, result))}));
    } catch (const ProviderError& e) {
        providers.note("fallback", std::string("explanation: ") + e.what());
        outcome.answer = local_report(result);
    }
    return outcome;
}

}  // namespace agentic::codeagent
