// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentic/orchestrator.hpp"
#include "agentic/session_config.hpp"

namespace agentic::eval {

/// One dataset line: {"id", "question" | "topic", "gold_answer" |
/// "gold_article" and/or "gold_entities"}.  A "topic" runs in research mode.
struct DatasetItem {
    std::string id;
    std::string question;
    TaskMode mode = TaskMode::Answer;
    std::optional<char> gold_answer;
    std::optional<std::string> gold_article;
    std::vector<std::string> gold_entities;
};

DatasetItem dataset_item_from_json(const nlohmann::json& j);

/// Throws ConfigError when the file is unreadable or a line is malformed
/// (the message names the line).
std::vector<DatasetItem> load_dataset(const std::filesystem::path& path);

struct EvalRecord {
    std::string id;
    std::string question;
    std::optional<char> gold_answer;
    std::optional<std::string> gold_article;
    std::vector<std::string> gold_entities;
    std::string prediction;
    Termination termination = Termination::Completed;
    /// Only metrics applicable to the gold types present.
    std::map<std::string, double> metrics;
    std::optional<char> extracted_choice;
};

/// Computes the applicable metrics for a finished session.
EvalRecord score_item(const DatasetItem& item, std::string prediction, Termination termination);

/// Exact-match fraction; a missing extracted choice counts as wrong.
/// Throws PreconditionError on an empty list or a record without a gold
/// answer letter.
double mc_accuracy(std::span<const EvalRecord> records);

struct EvalReport {
    std::vector<EvalRecord> records;
    /// Means over the records each metric applies to, plus "mc_accuracy".
    std::map<std::string, double> summary;
    std::vector<std::string> unparseable_ids;
};

EvalReport summarize(std::vector<EvalRecord> records);

/// Runs one session per item with up to `parallel` sessions at once.
/// `run` executes a single item; records keep dataset order.
using SessionRunner = std::function<SessionResult(const DatasetItem&)>;
EvalReport run_eval(std::span<const DatasetItem> items, const SessionRunner& run, int parallel = 1);

nlohmann::json report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace agentic::eval
