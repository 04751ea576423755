// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "agentic/eval/run_config.hpp"
#include "agentic/orchestrator.hpp"

namespace agentic::eval {

inline constexpr std::string_view kFixtureFile = "fixture.jsonl";
inline constexpr std::string_view kTraceFile = "trace.jsonl";

/// Runs one session with providers built from the config.  Fixture mode
/// Record writes fixture.jsonl and trace.jsonl into `fixture_dir`; Replay
/// serves every provider from fixture_dir/fixture.jsonl.
SessionResult run_configured_session(const RunConfig& config, std::string_view question, TaskMode mode,
                                     const std::filesystem::path& fixture_dir);

struct ReplayOutcome {
    bool identical = false;
    std::string recorded_trace;
    std::string replayed_trace;
    /// Fixture entries the replay did not consume.
    std::size_t unconsumed = 0;
};

/// Re-runs the recorded session (question, mode and config come from the
/// trace header) against its fixture and compares serialized traces.
/// Throws ReplayMismatchError when a request diverges from the fixture.
ReplayOutcome replay_recording(const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace agentic::eval
