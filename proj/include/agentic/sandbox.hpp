// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentic {

struct ExecutionResult {
    std::string stdout_text;
    std::string stderr_text;
    int exit_status = 0;
    double duration_seconds = 0.0;
    bool timed_out = false;

    bool succeeded() const noexcept { return exit_status == 0 && !timed_out; }
    bool operator==(const ExecutionResult&) const = default;
};

void to_json(nlohmann::json& j, const ExecutionResult& r);
void from_json(const nlohmann::json& j, ExecutionResult& r);

/// Runs a program text and reports what happened.
class CodeExecutor {
public:
    virtual ~CodeExecutor() = default;
    virtual ExecutionResult execute(std::string_view code) = 0;
};

struct SandboxOptions {
    /// Interpreter argv; the script path is appended as the last argument.
    std::vector<std::string> interpreter = {"python3"};
    std::string script_name = "main.py";
    double timeout_seconds = 30.0;
    std::size_t output_cap_bytes = 64 * 1024;
    /// Try to drop network access (new user + network namespace).  Silently
    /// skipped where the kernel refuses.
    bool deny_network = true;
};

/// Executes code in a fresh empty temp directory as a child process group,
/// killed with SIGKILL once the wall-clock timeout passes.  A timed-out run
/// reports exit_status 128 + SIGKILL.
///
/// Throws ConfigError when the interpreter binary cannot be executed.
class SubprocessExecutor final : public CodeExecutor {
public:
    explicit SubprocessExecutor(SandboxOptions options = {});

    ExecutionResult execute(std::string_view code) override;

    const SandboxOptions& options() const noexcept { return options_; }

private:
    SandboxOptions options_;
};

}  // namespace agentic
