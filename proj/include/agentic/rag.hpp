// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentic/backends/providers.hpp"

namespace agentic::rag {

struct Chunk {
    std::string doc_id;
    std::size_t index = 0;
    std::string text;

    bool operator==(const Chunk&) const = default;
};

struct RetrievalHit {
    Chunk chunk;
    double similarity = 0.0;
};

inline constexpr std::size_t kDefaultChunkSize = 512;
inline constexpr std::size_t kDefaultChunkOverlap = 64;

/// Sliding window over whitespace tokens: `size` tokens per chunk, advancing
/// by `size - overlap`; a trailing partial window is kept.  Chunk text is the
/// window's tokens joined by single spaces.
///
/// Throws PreconditionError unless size > overlap.
std::vector<Chunk> chunk_text(std::string_view doc_id, std::string_view text,
                              std::size_t size = kDefaultChunkSize,
                              std::size_t overlap = kDefaultChunkOverlap);

/// Cosine similarity; 0 when either vector is zero.  Vectors of different
/// dimension are a PreconditionError.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Deterministic bag-of-words embedding: each term (text::terms) adds one to
/// dimension fnv1a64(term) mod dims, then the vector is L2-normalized.
inline constexpr std::size_t kHashEmbeddingDims = 256;
std::uint64_t fnv1a64(std::string_view s);
std::vector<float> hash_embed(std::string_view text, std::size_t dims = kHashEmbeddingDims);

class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dims = kHashEmbeddingDims) : dims_(dims) {}
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

private:
    std::size_t dims_;
};

/// Orders hits by similarity descending, then (doc_id, index) ascending.
bool hit_before(const RetrievalHit& a, const RetrievalHit& b);

/// Embeds the query and all chunks in one provider call and returns the k
/// most similar chunks.  Embedding failures propagate.
std::vector<RetrievalHit> retrieve_top_k(std::string_view query, std::span<const Chunk> chunks, std::size_t k,
                                         EmbeddingProvider& embedder);

inline constexpr std::string_view kNoSourcesNote = "No sources were retrieved; answer from the context alone.";
inline constexpr std::string_view kGroundedAnswerFailure = "[answer generation failed]";

/// Prompt text for a grounded answer; sources are labelled [doc_id#index].
std::string grounded_answer_prompt(std::string_view query, std::span<const RetrievalHit> hits,
                                   std::string_view context);

/// One provider call under `role`.  Provider failure yields
/// kGroundedAnswerFailure.
std::string generate_grounded_answer(std::string_view query, std::span<const RetrievalHit> hits,
                                     std::string_view context, const ProviderSet& providers, ChatRole role);

}  // namespace agentic::rag
