// SPDX-License-Identifier: Apache-2.0
#include "agentic/websearch.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <tuple>

#include "agentic/errors.hpp"
#include "agentic/rag.hpp"
#include "agentic/text.hpp"

namespace agentic::websearch {

std::string_view to_string(Confidence c) { return c == Confidence::Sufficient ? "sufficient" : "limited"; }

double top_mean(std::span<const double> sorted_scores) {
    auto n = std::min(kGateTopN, sorted_scores.size());
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += sorted_scores[i];
    return sum / static_cast<double>(n);
}

Gate gate_decision(std::span<const double> sorted_scores) {
    if (sorted_scores.empty()) return Gate::Fail;
    return top_mean(sorted_scores) >= kRelevanceThreshold - kScoreEpsilon ? Gate::Pass : Gate::Fail;
}

bool qualifies(double score) { return score > kRelevanceThreshold + kScoreEpsilon; }

std::vector<std::string> parse_refined_queries(std::string_view output) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& raw : text::split_lines(output)) {
        auto line = text::trim(raw);
        if (line.empty() || line.rfind("```", 0) == 0) continue;
        // "- q", "* q", "1. q", "2) q"
        std::size_t i = 0;
        if (line[0] == '-' || line[0] == '*' || line[0] == '\xe2') {
            while (i < line.size() && !text::is_space(line[i])) ++i;
        } else {
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
            if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
                ++i;
            } else {
                i = 0;
            }
        }
        line = text::trim(std::string_view(line).substr(i));
        if (line.size() >= 2 && (line.front() == '"' || line.front() == '\'') && line.back() == line.front()) {
            line = text::trim(std::string_view(line).substr(1, line.size() - 2));
        }
        if (line.empty() || !seen.insert(line).second) continue;
        out.push_back(line);
        if (out.size() == kMaxRefinedQueries) break;
    }
    return out;
}

std::vector<std::string> breakdown_query(const SearchTask& task, const Options& options, const ProviderSet& providers,
                                         std::span<const QueryFeedback> prior) {
    if (text::trim(task.original_query).empty()) throw PreconditionError("search task needs a query");
    if (!options.query_breakdown) return {task.original_query};

    std::string prompt = "Rewrite the search request below into one to five search-engine queries, one per line, "
                         "with no commentary.\n\nSearch request: " +
                         task.original_query + "\n\nReasoning context:\n" +
                         (task.reasoning_context.empty() ? std::string("(none)") : task.reasoning_context) + "\n";
    if (!prior.empty()) {
        prompt += "\nThese earlier queries retrieved insufficiently relevant pages (best relevance score shown); "
                  "write different, more specific queries:\n";
        for (const auto& f : prior) {
            char score[32];
            std::snprintf(score, sizeof score, "%.2f", f.top_score);
            prompt += "- " + f.query + " (" + score + ")\n";
        }
    }
    ChatRequest request;
    request.role = ChatRole::QueryBreakdown;
    request.params = providers.params;
    request.messages = {system_message("You turn research needs into precise web search queries."),
                        user_message(prompt)};
    try {
        auto queries = parse_refined_queries(providers.chat_for(ChatRole::QueryBreakdown).complete(request).text);
        if (!queries.empty()) return queries;
        providers.note("fallback", "query breakdown returned no queries");
    } catch (const ProviderError& e) {
        providers.note("fallback", std::string("query breakdown: ") + e.what());
    }
    return {task.original_query};
}

std::string rerank_query(const SearchTask& task) {
    if (task.reasoning_context.empty()) return task.original_query;
    return task.original_query + "\n\n" + task.reasoning_context;
}

std::pair<std::vector<ScoredPage>, Gate> rerank_and_gate(const std::vector<WebPage>& pages, const SearchTask& task,
                                                        const Options& options, const ProviderSet& providers) {
    std::vector<ScoredPage> scored;
    scored.reserve(pages.size());
    for (const auto& p : pages) scored.push_back({p.url, p.title, p.content, 1.0});
    if (!options.rerank) {
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredPage& a, const ScoredPage& b) { return a.url < b.url; });
        return {std::move(scored), Gate::Pass};
    }
    if (!pages.empty()) {
        std::vector<std::string> documents;
        documents.reserve(pages.size());
        for (const auto& p : pages) documents.push_back(p.title.empty() ? p.content : p.title + "\n" + p.content);
        std::vector<double> scores;
        try {
            scores = providers.rerank_provider().score(rerank_query(task), documents);
        } catch (const ProviderError& e) {
            providers.note("fallback", std::string("rerank: ") + e.what());
            scores.assign(pages.size(), 0.5);
        }
        for (std::size_t i = 0; i < scored.size(); ++i) scored[i].score = std::clamp(scores[i], 0.0, 1.0);
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredPage& a, const ScoredPage& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.url < b.url;
    });
    std::vector<double> sorted;
    for (const auto& p : scored) sorted.push_back(p.score);
    return {std::move(scored), gate_decision(sorted)};
}

std::string extract_per_query(std::string_view refined_query, std::span<const ScoredPage> pages,
                              const SearchTask& task, const Options& options, const ProviderSet& providers,
                              std::map<std::string, std::string>* refined_cache) {
    std::vector<const ScoredPage*> selected;
    for (const auto& p : pages) {
        if (qualifies(p.score)) selected.push_back(&p);
    }
    if (selected.empty()) return std::string(kInsufficientSources);

    std::vector<rag::Chunk> chunks;
    for (const auto* p : selected) {
        std::string content = p->content;
        if (options.knowledge_refinement) {
            auto cached = refined_cache ? refined_cache->find(p->url) : std::map<std::string, std::string>::iterator{};
            if (refined_cache && cached != refined_cache->end()) {
                content = cached->second;
            } else {
                ChatRequest request;
                request.role = ChatRole::KnowledgeRefinement;
                request.params = providers.params;
                request.messages = {
                    system_message("You summarize web pages, keeping every fact relevant to the query."),
                    user_message("Query: " + task.original_query + "\n\nPage: " + p->title + " (" + p->url + ")\n" +
                                 p->content),
                };
                try {
                    content = text::trim(providers.chat_for(ChatRole::KnowledgeRefinement).complete(request).text);
                    if (refined_cache) (*refined_cache)[p->url] = content;
                } catch (const ProviderError& e) {
                    providers.note("fallback", std::string("knowledge refinement: ") + e.what());
                }
            }
        }
        auto page_chunks = rag::chunk_text(p->url, content);
        chunks.insert(chunks.end(), page_chunks.begin(), page_chunks.end());
    }

    std::vector<rag::RetrievalHit> hits;
    try {
        hits = rag::retrieve_top_k(refined_query, chunks, kExtractTopK, providers.embedding_provider());
    } catch (const ProviderError& e) {
        providers.note("warning", std::string("retrieval failed: ") + e.what());
    }
    return rag::generate_grounded_answer(refined_query, hits, task.reasoning_context, providers, ChatRole::SearchRag);
}

std::string synthesize_snippet(std::span<const std::string> answers, const SearchTask& task, Confidence confidence,
                               const ProviderSet& providers) {
    if (answers.empty()) throw PreconditionError("synthesize_snippet needs at least one answer");
    std::string prompt = "Combine the findings below into one cohesive snippet that answers the search request.\n\n"
                         "Search request: " +
                         task.original_query + "\n\nReasoning context:\n" +
                         (task.reasoning_context.empty() ? std::string("(none)") : task.reasoning_context) +
                         "\n\nFindings:\n";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        prompt += "[" + std::to_string(i + 1) + "] " + answers[i] + "\n";
    }
    if (confidence == Confidence::Limited) {
        prompt += "\nThe retrieved sources were weakly relevant. State what is likely and say that more data is "
                  "needed.\n";
    }
    ChatRequest request;
    request.role = ChatRole::SnippetSynthesis;
    request.params = providers.params;
    request.messages = {system_message("You write concise, factual research snippets."), user_message(prompt)};
    std::string snippet;
    try {
        snippet = text::trim(providers.chat_for(ChatRole::SnippetSynthesis).complete(request).text);
    } catch (const ProviderError& e) {
        providers.note("fallback", std::string("snippet synthesis: ") + e.what());
        snippet = text::join(std::vector<std::string>(answers.begin(), answers.end()), "\n---\n");
    }
    if (confidence == Confidence::Limited) snippet = std::string(kUncertaintyPrefix) + snippet;
    return snippet;
}

SearchOutcome run_search(const SearchTask& task, const Options& options, const ProviderSet& providers) {
    if (text::trim(task.original_query).empty()) throw PreconditionError("search task needs a query");
    SearchOutcome outcome;
    std::vector<QueryFeedback> feedback;
    std::vector<ScoredPage> scored;
    std::map<std::string, std::set<std::string>> urls_by_query;
    Gate gate = Gate::Fail;

    for (int iteration = 1; iteration <= kMaxIterations; ++iteration) {
        outcome.iterations_used = iteration;
        outcome.refined_queries = breakdown_query(task, options, providers, feedback);
        urls_by_query.clear();

        std::vector<WebPage> pages;
        std::set<std::string> seen;
        try {
            for (const auto& q : outcome.refined_queries) {
                for (auto& page : providers.search_provider().search(q, options.search_count)) {
                    if (page.url.empty()) continue;
                    urls_by_query[q].insert(page.url);
                    if (seen.insert(page.url).second) pages.push_back(std::move(page));
                }
            }
        } catch (const ProviderError& e) {
            providers.note("warning", std::string("search failed: ") + e.what());
            outcome.confidence = Confidence::Limited;
            outcome.snippet = std::string(kUncertaintyPrefix) +
                              "no sources could be consulted because the search service failed.";
            return outcome;
        }

        std::tie(scored, gate) = rerank_and_gate(pages, task, options, providers);
        std::vector<double> sorted;
        for (const auto& p : scored) sorted.push_back(p.score);
        outcome.final_top_mean = top_mean(sorted);
        if (gate == Gate::Pass || iteration == kMaxIterations || !options.query_breakdown) break;

        feedback.clear();
        for (const auto& q : outcome.refined_queries) {
            double best = 0.0;
            for (const auto& p : scored) {
                if (urls_by_query[q].count(p.url)) best = std::max(best, p.score);
            }
            feedback.push_back({q, best});
        }
        providers.note("refine", "iteration " + std::to_string(iteration) + " gate failed");
    }

    outcome.confidence = gate == Gate::Pass ? Confidence::Sufficient : Confidence::Limited;
    std::map<std::string, std::string> refined_cache;
    std::vector<std::string> answers;
    for (const auto& q : outcome.refined_queries) {
        std::vector<ScoredPage> own;
        for (const auto& p : scored) {
            if (urls_by_query[q].count(p.url)) own.push_back(p);
        }
        answers.push_back(extract_per_query(q, own, task, options, providers, &refined_cache));
    }
    outcome.snippet = synthesize_snippet(answers, task, outcome.confidence, providers);
    return outcome;
}

}  // namespace agentic::websearch
