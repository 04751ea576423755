// SPDX-License-Identifier: Apache-2.0
#include "agentic/rag.hpp"

#include <algorithm>
#include <cmath>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic::rag {

std::vector<Chunk> chunk_text(std::string_view doc_id, std::string_view text, std::size_t size,
                              std::size_t overlap) {
    if (size <= overlap) throw PreconditionError("chunk size must exceed overlap");
    auto tokens = text::split_whitespace(text);
    std::vector<Chunk> out;
    if (tokens.empty()) return out;
    const std::size_t stride = size - overlap;
    for (std::size_t start = 0;; start += stride) {
        auto end = std::min(start + size, tokens.size());
        std::vector<std::string> window(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(end));
        out.push_back({std::string(doc_id), out.size(), text::join(window, " ")});
        if (end == tokens.size()) break;
    }
    return out;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw PreconditionError("cosine of vectors with different dimensions");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<float> hash_embed(std::string_view text, std::size_t dims) {
    std::vector<double> counts(dims, 0.0);
    for (const auto& term : text::terms(text)) counts[fnv1a64(term) % dims] += 1.0;
    double norm = 0.0;
    for (double c : counts) norm += c * c;
    std::vector<float> out(dims, 0.0f);
    if (norm == 0.0) return out;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < dims; ++i) out[i] = static_cast<float>(counts[i] / norm);
    return out;
}

std::vector<std::vector<float>> HashEmbeddingProvider::embed(std::span<const std::string> texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t, dims_));
    return out;
}

bool hit_before(const RetrievalHit& a, const RetrievalHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
    return a.chunk.index < b.chunk.index;
}

std::vector<RetrievalHit> retrieve_top_k(std::string_view query, std::span<const Chunk> chunks, std::size_t k,
                                         EmbeddingProvider& embedder) {
    if (k < 1) throw PreconditionError("retrieve_top_k needs k >= 1");
    if (chunks.empty()) return {};
    std::vector<std::string> texts;
    texts.reserve(chunks.size() + 1);
    texts.emplace_back(query);
    for (const auto& c : chunks) texts.push_back(c.text);
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) throw application_error("embedding provider returned wrong vector count");

    std::vector<RetrievalHit> hits;
    hits.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        hits.push_back({chunks[i], cosine_similarity(vectors[0], vectors[i + 1])});
    }
    auto take = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), hit_before);
    hits.resize(take);
    return hits;
}

std::string grounded_answer_prompt(std::string_view query, std::span<const RetrievalHit> hits,
                                   std::string_view context) {
    std::string prompt = "Answer the query using the sources below. Cite sources by their labels.\n\n";
    prompt += "Query: ";
    prompt += query;
    prompt += "\n\nReasoning context:\n";
    prompt += context.empty() ? std::string_view("(none)") : context;
    prompt += "\n\n";
    if (hits.empty()) {
        prompt += kNoSourcesNote;
        prompt += '\n';
        return prompt;
    }
    prompt += "Sources:\n";
    for (const auto& hit : hits) {
        prompt += "[" + hit.chunk.doc_id + "#" + std::to_string(hit.chunk.index) + "] ";
        prompt += hit.chunk.text;
        prompt += '\n';
    }
    return prompt;
}

std::string generate_grounded_answer(std::string_view query, std::span<const RetrievalHit> hits,
                                     std::string_view context, const ProviderSet& providers, ChatRole role) {
    ChatRequest request;
    request.role = role;
    request.params = providers.params;
    request.messages = {
        system_message("You answer questions strictly from the supplied sources and context, in concise natural "
                       "language."),
        user_message(grounded_answer_prompt(query, hits, context)),
    };
    try {
        return text::trim(providers.chat_for(role).complete(request).text);
    } catch (const ProviderError& e) {
        providers.note("fallback", std::string(to_string(role)) + ": " + e.what());
        return std::string(kGroundedAnswerFailure);
    }
}

}  // namespace agentic::rag
