// SPDX-License-Identifier: Apache-2.0
#include "agentic/eval/session_runner.hpp"

#include <fstream>
#include <sstream>

#include "agentic/backends/fixture.hpp"
#include "agentic/errors.hpp"

namespace agentic::eval {

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SessionResult run_configured_session(const RunConfig& config, std::string_view question, TaskMode mode,
                                     const std::filesystem::path& fixture_dir) {
    switch (config.fixture_mode) {
        case FixtureMode::Off: return run_session(question, config.session, build_providers(config), mode);
        case FixtureMode::Record: {
            auto fixture = std::make_shared<Fixture>();
            auto providers = recording(build_providers(config), fixture);
            auto result = run_session(question, config.session, providers, mode);
            if (!fixture_dir.empty()) std::filesystem::create_directories(fixture_dir);
            fixture->save(fixture_dir / kFixtureFile);
            write_text_file(fixture_dir / kTraceFile, serialize_trace(result.trace));
            return result;
        }
        case FixtureMode::Replay: {
            auto fixture = Fixture::load(fixture_dir / kFixtureFile);
            auto providers = replaying(fixture);
            providers.params = config.session.generation;
            return run_session(question, config.session, providers, mode);
        }
    }
    throw ConfigError("unknown fixture mode");
}

ReplayOutcome replay_recording(const std::filesystem::path& dir) {
    ReplayOutcome outcome;
    outcome.recorded_trace = read_text_file(dir / kTraceFile);
    SessionTrace recorded;
    try {
        recorded = parse_trace(outcome.recorded_trace);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("recorded trace is unreadable: " + std::string(e.what()));
    }
    auto fixture = Fixture::load(dir / kFixtureFile);
    auto providers = replaying(fixture);
    providers.params = recorded.config.generation;
    auto result = run_session(recorded.question, recorded.config, providers, recorded.mode);
    outcome.replayed_trace = serialize_trace(result.trace);
    outcome.unconsumed = fixture->pending();
    outcome.identical = outcome.replayed_trace == outcome.recorded_trace && outcome.unconsumed == 0;
    return outcome;
}

}  // namespace agentic::eval
