// SPDX-License-Identifier: Apache-2.0
#include <chrono>

#include <gtest/gtest.h>

#include "agentic/errors.hpp"
#include "agentic/sandbox.hpp"

using namespace agentic;

namespace {

SandboxOptions quick(double timeout = 5.0) {
    SandboxOptions o;
    o.timeout_seconds = timeout;
    return o;
}

}  // namespace

TEST(Sandbox, CapturesStdout) {
    SubprocessExecutor exec(quick());
    auto r = exec.execute("print(42)\n");
    EXPECT_EQ(r.stdout_text, "42\n");
    EXPECT_EQ(r.exit_status, 0);
    EXPECT_FALSE(r.timed_out);
    EXPECT_TRUE(r.succeeded());
}

TEST(Sandbox, NonzeroExitCapturesTraceback) {
    SubprocessExecutor exec(quick());
    auto r = exec.execute("raise ValueError('bad input')\n");
    EXPECT_NE(r.exit_status, 0);
    EXPECT_NE(r.stderr_text.find("ValueError: bad input"), std::string::npos);
}

TEST(Sandbox, InfiniteLoopKilledWithinGrace) {
    SubprocessExecutor exec(quick(1.0));
    auto start = std::chrono::steady_clock::now();
    auto r = exec.execute("import sys\nprint('started', flush=True)\nwhile True:\n    pass\n");
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_TRUE(r.timed_out);
    EXPECT_EQ(r.exit_status, 128 + 9);
    EXPECT_EQ(r.stdout_text, "started\n");
    EXPECT_LT(elapsed, 2.0);
    EXPECT_LE(r.duration_seconds, 2.0);
}

TEST(Sandbox, ChildProcessesAreKilledToo) {
    SubprocessExecutor exec(quick(1.0));
    auto start = std::chrono::steady_clock::now();
    auto r = exec.execute("import subprocess\nsubprocess.run(['sleep', '30'])\n");
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_TRUE(r.timed_out);
    EXPECT_LT(elapsed, 2.0);
}

TEST(Sandbox, OutputIsCapped) {
    SandboxOptions o = quick();
    o.output_cap_bytes = 1000;
    SubprocessExecutor exec(o);
    auto r = exec.execute("import sys\nsys.stdout.write('x' * 100000)\nsys.stderr.write('y' * 5000)\n");
    EXPECT_EQ(r.stdout_text.size(), 1000u);
    EXPECT_EQ(r.stderr_text.size(), 1000u);
    EXPECT_EQ(r.exit_status, 0);
}

TEST(Sandbox, RunsInAnEmptyWorkingDirectory) {
    SubprocessExecutor exec(quick());
    auto r = exec.execute("import os\nprint(sorted(os.listdir('.')))\n");
    EXPECT_EQ(r.stdout_text, "['main.py']\n");
}

TEST(Sandbox, StdinIsClosed) {
    SubprocessExecutor exec(quick());
    auto r = exec.execute("import sys\nprint(repr(sys.stdin.read()))\n");
    EXPECT_EQ(r.stdout_text, "''\n");
}

TEST(Sandbox, MissingInterpreterIsConfigError) {
    SandboxOptions o = quick();
    o.interpreter = {"/nonexistent/python-interpreter"};
    SubprocessExecutor exec(o);
    EXPECT_THROW(exec.execute("print(1)"), ConfigError);
}

TEST(ExecutionResult, JsonRoundTrip) {
    ExecutionResult r{"out", "err", 3, 1.25, true};
    nlohmann::json j = r;
    EXPECT_EQ(j.at("stdout"), "out");
    EXPECT_EQ(j.get<ExecutionResult>(), r);
}
