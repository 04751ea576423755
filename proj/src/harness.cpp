// SPDX-License-Identifier: Apache-2.0
#include "agentic/eval/harness.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "agentic/errors.hpp"
#include "agentic/eval/metrics.hpp"
#include "agentic/text.hpp"

namespace agentic::eval {

using nlohmann::json;

DatasetItem dataset_item_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("dataset line must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "id" && key != "question" && key != "topic" && key != "gold_answer" && key != "gold_article" &&
            key != "gold_entities") {
            throw ConfigError("unknown dataset key: " + key);
        }
    }
    DatasetItem item;
    try {
        item.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        if (j.contains("question") == j.contains("topic")) {
            throw ConfigError("dataset item " + item.id + " needs exactly one of question/topic");
        }
        if (j.contains("topic")) {
            item.question = j.at("topic").get<std::string>();
            item.mode = TaskMode::Research;
        } else {
            item.question = j.at("question").get<std::string>();
        }
        if (j.contains("gold_answer")) {
            auto g = text::trim(j.at("gold_answer").get<std::string>());
            if (g.size() != 1 || std::toupper(static_cast<unsigned char>(g[0])) < 'A' ||
                std::toupper(static_cast<unsigned char>(g[0])) > 'E') {
                throw ConfigError("dataset item " + item.id + ": gold_answer must be one letter A-E");
            }
            item.gold_answer = static_cast<char>(std::toupper(static_cast<unsigned char>(g[0])));
        }
        if (j.contains("gold_article")) item.gold_article = j.at("gold_article").get<std::string>();
        if (j.contains("gold_entities")) item.gold_entities = j.at("gold_entities").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad dataset item: ") + e.what());
    }
    if (!item.gold_answer && !item.gold_article && item.gold_entities.empty()) {
        throw ConfigError("dataset item " + item.id + " has no gold data");
    }
    if (text::trim(item.question).empty()) throw ConfigError("dataset item " + item.id + " has an empty question");
    return item;
}

std::vector<DatasetItem> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read dataset " + path.string());
    std::vector<DatasetItem> items;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::trim(line).empty()) continue;
        try {
            items.push_back(dataset_item_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return items;
}

EvalRecord score_item(const DatasetItem& item, std::string prediction, Termination termination) {
    EvalRecord r;
    r.id = item.id;
    r.question = item.question;
    r.gold_answer = item.gold_answer;
    r.gold_article = item.gold_article;
    r.gold_entities = item.gold_entities;
    r.prediction = std::move(prediction);
    r.termination = termination;
    if (item.gold_answer) {
        r.extracted_choice = extract_choice(r.prediction);
        r.metrics["correct"] = r.extracted_choice == item.gold_answer ? 1.0 : 0.0;
    }
    if (item.gold_article) {
        auto r1 = rouge_n(r.prediction, *item.gold_article, 1);
        auto rl = rouge_l(r.prediction, *item.gold_article);
        r.metrics["rouge_1_f1"] = r1.f1;
        r.metrics["rouge_l_f1"] = rl.f1;
    }
    if (!item.gold_entities.empty()) r.metrics["entity_recall"] = entity_recall(r.prediction, item.gold_entities);
    return r;
}

double mc_accuracy(std::span<const EvalRecord> records) {
    if (records.empty()) throw PreconditionError("mc_accuracy needs at least one record");
    std::size_t correct = 0;
    for (const auto& r : records) {
        if (!r.gold_answer) throw PreconditionError("record " + r.id + " has no gold answer letter");
        auto choice = r.extracted_choice ? r.extracted_choice : extract_choice(r.prediction);
        if (choice == r.gold_answer) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

EvalReport summarize(std::vector<EvalRecord> records) {
    EvalReport report;
    std::vector<EvalRecord> mc;
    std::map<std::string, std::pair<double, int>> sums;
    for (const auto& r : records) {
        if (r.gold_answer) {
            mc.push_back(r);
            if (!r.extracted_choice) report.unparseable_ids.push_back(r.id);
        }
        for (const auto& [name, value] : r.metrics) {
            if (name == "correct") continue;
            sums[name].first += value;
            sums[name].second += 1;
        }
    }
    if (!mc.empty()) report.summary["mc_accuracy"] = mc_accuracy(mc);
    for (const auto& [name, s] : sums) report.summary[name] = s.first / s.second;
    report.records = std::move(records);
    return report;
}

EvalReport run_eval(std::span<const DatasetItem> items, const SessionRunner& run, int parallel) {
    std::vector<std::optional<EvalRecord>> slots(items.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            auto i = next.fetch_add(1);
            if (i >= items.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                auto result = run(items[i]);
                slots[i] = score_item(items[i], result.final_answer, result.termination);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    auto n = static_cast<std::size_t>(std::max(1, parallel));
    n = std::min(n, std::max<std::size_t>(1, items.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<EvalRecord> records;
    for (auto& s : slots) records.push_back(std::move(*s));
    return summarize(std::move(records));
}

json report_json(const EvalReport& report) {
    json records = json::array();
    for (const auto& r : report.records) {
        json j = {{"id", r.id},
                  {"question", r.question},
                  {"prediction", r.prediction},
                  {"termination", to_string(r.termination)},
                  {"metrics", r.metrics}};
        if (r.gold_answer) {
            j["gold_answer"] = std::string(1, *r.gold_answer);
            j["extracted_choice"] = r.extracted_choice ? json(std::string(1, *r.extracted_choice)) : json(nullptr);
        }
        if (r.gold_article) j["gold_article"] = *r.gold_article;
        if (!r.gold_entities.empty()) j["gold_entities"] = r.gold_entities;
        records.push_back(std::move(j));
    }
    return {{"records", records}, {"summary", report.summary}, {"unparseable", report.unparseable_ids}};
}

std::string report_table(const EvalReport& report) {
    std::string out = "id                   termination       metrics\n";
    char line[256];
    for (const auto& r : report.records) {
        std::string metrics;
        for (const auto& [name, value] : r.metrics) {
            char m[64];
            std::snprintf(m, sizeof m, "%s=%.4f ", name.c_str(), value);
            metrics += m;
        }
        if (r.gold_answer && !r.extracted_choice) metrics += "(no choice extracted)";
        std::snprintf(line, sizeof line, "%-20.20s %-17s ", r.id.c_str(), std::string(to_string(r.termination)).c_str());
        out += line + metrics + "\n";
    }
    out += "\nsummary\n";
    for (const auto& [name, value] : report.summary) {
        std::snprintf(line, sizeof line, "  %-16s %.4f\n", name.c_str(), value);
        out += line;
    }
    return out;
}

}  // namespace agentic::eval
