// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agentic/backends/providers.hpp"

namespace agentic::websearch {

/// Gate: mean of the top kGateTopN rerank scores must reach this (inclusive).
/// Page qualification for extraction is strictly above it.
inline constexpr double kRelevanceThreshold = 0.7;
inline constexpr std::size_t kGateTopN = 10;
inline constexpr int kMaxIterations = 3;
inline constexpr int kDefaultSearchCount = 20;
inline constexpr std::size_t kMaxRefinedQueries = 5;
inline constexpr std::size_t kExtractTopK = 6;
/// Absolute slack for threshold comparisons on summed doubles.
inline constexpr double kScoreEpsilon = 1e-9;

inline constexpr std::string_view kInsufficientSources = "[insufficient sources]";
inline constexpr std::string_view kUncertaintyPrefix = "Given the limited knowledge retrieved, ";

struct Options {
    bool query_breakdown = true;
    bool rerank = true;
    bool knowledge_refinement = false;
    int search_count = kDefaultSearchCount;
};

struct SearchTask {
    std::string original_query;
    std::string reasoning_context;
};

struct ScoredPage {
    std::string url;
    std::string title;
    std::string content;
    double score = 0.0;

    bool operator==(const ScoredPage&) const = default;
};

enum class Gate { Pass, Fail };
enum class Confidence { Sufficient, Limited };

std::string_view to_string(Confidence c);

struct SearchOutcome {
    std::string snippet;
    Confidence confidence = Confidence::Limited;
    int iterations_used = 0;
    std::vector<std::string> refined_queries;
    /// Mean of the final top-kGateTopN scores (0 when nothing was scored).
    double final_top_mean = 0.0;
};

/// Mean of the first min(kGateTopN, n) scores of a descending list; 0 for
/// an empty list.
double top_mean(std::span<const double> sorted_scores);

/// Pass iff n > 0 and top_mean >= kRelevanceThreshold.
Gate gate_decision(std::span<const double> sorted_scores);

bool qualifies(double score);

/// Feedback for a refinement round: a prior query and the best score any of
/// its pages received.
struct QueryFeedback {
    std::string query;
    double top_score = 0.0;
};

/// Splits breakdown output into queries: one per line, list markers and
/// surrounding quotes stripped, duplicates removed, first kMaxRefinedQueries
/// kept in order.
std::vector<std::string> parse_refined_queries(std::string_view output);

/// Toggle off: [original_query].  Otherwise one breakdown call; provider
/// failure or an empty parse fall back to [original_query].
std::vector<std::string> breakdown_query(const SearchTask& task, const Options& options, const ProviderSet& providers,
                                         std::span<const QueryFeedback> prior = {});

/// The single text the reranker aligns pages with.
std::string rerank_query(const SearchTask& task);

/// Toggle off: every page scores 1.0 and the gate passes (no provider call).
/// Provider failure: every page scores 0.5.  Pages are sorted by score
/// descending, url ascending.
std::pair<std::vector<ScoredPage>, Gate> rerank_and_gate(const std::vector<WebPage>& pages, const SearchTask& task,
                                                        const Options& options, const ProviderSet& providers);

/// RAG over the pages scoring above the threshold; kInsufficientSources (and
/// no provider call) when none do.  With knowledge_refinement each
/// qualifying page is first summarized by one call; `refined_cache` (url ->
/// summary) lets a run reuse those summaries across queries.
std::string extract_per_query(std::string_view refined_query, std::span<const ScoredPage> pages,
                              const SearchTask& task, const Options& options, const ProviderSet& providers,
                              std::map<std::string, std::string>* refined_cache = nullptr);

/// One synthesis call; limited confidence prefixes kUncertaintyPrefix.
/// Provider failure joins the answers with separators.
std::string synthesize_snippet(std::span<const std::string> answers, const SearchTask& task, Confidence confidence,
                               const ProviderSet& providers);

/// Breakdown, search, dedupe, rerank and gate, repeated up to kMaxIterations
/// while the gate fails (only while breakdown can refine); then per-query
/// extraction and snippet synthesis.
SearchOutcome run_search(const SearchTask& task, const Options& options, const ProviderSet& providers);

}  // namespace agentic::websearch
