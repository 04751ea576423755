// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agentic/backends/fixture.hpp"
#include "agentic/errors.hpp"
#include "agentic/eval/cli_flags.hpp"
#include "agentic/eval/harness.hpp"
#include "agentic/eval/run_config.hpp"
#include "agentic/eval/session_runner.hpp"

namespace fs = std::filesystem;
using namespace agentic;

namespace {

struct Common {
    std::string config_path;
    eval::AblationFlags flags;
    std::string record_dir;
};

eval::RunConfig resolve(const Common& common) {
    eval::RunConfig config;
    if (!common.config_path.empty()) config = eval::load_run_config(common.config_path);
    eval::apply_ablation_flags(config.session, common.flags);
    config.session.validate();
    if (!common.record_dir.empty()) {
        config.fixture_mode = eval::FixtureMode::Record;
        config.fixture_dir = common.record_dir;
    }
    return config;
}

void add_common(CLI::App& app, Common& common) {
    app.add_option("--config", common.config_path, "Run configuration file (JSON)");
    app.add_option("--record", common.record_dir, "Record provider traffic and the trace into this directory");
    eval::add_ablation_flags(app, common.flags);
}

int run_single(const Common& common, const std::string& question, TaskMode mode, const std::string& trace_path) {
    auto config = resolve(common);
    auto result = eval::run_configured_session(config, question, mode, config.fixture_dir);
    if (!trace_path.empty()) eval::write_text_file(trace_path, serialize_trace(result.trace));
    std::cout << result.final_answer << "\n";
    if (result.termination != Termination::Completed) {
        std::cerr << "session ended: " << to_string(result.termination) << "\n";
    }
    return result.termination == Termination::ProviderError ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reasoning sessions with web-search, coding and Mind-Map agents"};
    app.require_subcommand(1);

    Common answer_opts;
    std::string question;
    std::string answer_trace = "trace.jsonl";
    auto* answer = app.add_subcommand("answer", "Answer a question");
    answer->add_option("question", question, "Question")->required();
    answer->add_option("--trace", answer_trace, "Where to write the session trace (empty: do not write)");
    add_common(*answer, answer_opts);

    Common research_opts;
    std::string topic;
    std::string research_trace = "trace.jsonl";
    auto* research = app.add_subcommand("research", "Write a long-form article on a topic");
    research->add_option("topic", topic, "Topic")->required();
    research->add_option("--trace", research_trace, "Where to write the session trace (empty: do not write)");
    add_common(*research, research_opts);

    Common eval_opts;
    std::string dataset;
    std::string report_path;
    int parallel = 1;
    auto* eval_cmd = app.add_subcommand("eval", "Run sessions over a dataset and report metrics");
    eval_cmd->add_option("dataset", dataset, "Dataset file (JSON lines)")->required();
    eval_cmd->add_option("--parallel", parallel, "Concurrent sessions")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--report", report_path, "Write the JSON report here");
    add_common(*eval_cmd, eval_opts);

    std::string replay_dir;
    auto* replay = app.add_subcommand("replay", "Re-run a recorded session and verify its trace");
    replay->add_option("dir", replay_dir, "Directory holding fixture.jsonl and trace.jsonl")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*answer) return run_single(answer_opts, question, TaskMode::Answer, answer_trace);
        if (*research) return run_single(research_opts, topic, TaskMode::Research, research_trace);
        if (*eval_cmd) {
            auto config = resolve(eval_opts);
            auto items = eval::load_dataset(dataset);
            auto report = eval::run_eval(
                items,
                [&](const eval::DatasetItem& item) {
                    return eval::run_configured_session(config, item.question, item.mode,
                                                        config.fixture_dir / item.id);
                },
                parallel);
            if (!report_path.empty()) eval::write_text_file(report_path, eval::report_json(report).dump(2) + "\n");
            std::cout << eval::report_table(report);
            return 0;
        }
        if (*replay) {
            auto outcome = eval::replay_recording(replay_dir);
            if (!outcome.identical) {
                std::cerr << "replay diverged: trace differs from the recording";
                if (outcome.unconsumed) std::cerr << " (" << outcome.unconsumed << " fixture entries unused)";
                std::cerr << "\n";
                return 4;
            }
            std::cout << "replay identical\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ReplayMismatchError& e) {
        std::cerr << "replay mismatch: " << e.what() << "\n";
        return 4;
    } catch (const ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
