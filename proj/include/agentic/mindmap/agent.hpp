// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentic/backends/providers.hpp"
#include "agentic/mindmap/graph.hpp"
#include "agentic/rag.hpp"

namespace agentic::mindmap {

inline constexpr std::string_view kMemoryEmpty = "memory is empty";
inline constexpr std::size_t kQueryTopK = 8;

/// Records parsed from the extractor's line format:
///   ENTITY<TAB>name<TAB>description
///   REL<TAB>source<TAB>target<TAB>label
struct ExtractionRecords {
    struct EntityRecord {
        std::string name;
        std::string description;
    };
    struct RelationRecord {
        std::string source;
        std::string target;
        std::string label;
    };
    std::vector<EntityRecord> entities;
    std::vector<RelationRecord> relations;
};

/// Parses extractor output.  Code-fence lines and blank lines are skipped;
/// other non-record lines are tolerated as long as at least one record
/// parses.  Returns nullopt when the output has content but no records.
/// "NONE" (alone) means an explicitly empty extraction.
std::optional<ExtractionRecords> parse_extraction(std::string_view output);

/// Resolves parsed records against the graph: names matching an existing
/// entity (after normalization) reuse its id, new names get fresh ids in
/// first-mention order, each distinct name counts one mention, and
/// self-relations are dropped.
GraphDelta resolve_records(const ExtractionRecords& records, const KnowledgeGraph& existing);

std::string extraction_prompt(std::string_view reasoning_text, const KnowledgeGraph& existing);

/// One graph-construction call, plus one format-reminder reprompt if the
/// output does not parse.  A second failure (or a provider error) yields an
/// empty delta and a "warning" trace note.
///
/// Throws PreconditionError on empty text.
GraphDelta extract_graph_delta(std::string_view reasoning_text, const KnowledgeGraph& existing,
                               const ProviderSet& providers);

/// Retrieval corpus text for one entity: name, description, and every
/// incident relation as "source label target".
std::string render_entity(const KnowledgeGraph& graph, const Entity& entity);

/// "Entities: A, B, C" with members in id order.
std::string fallback_summary(const KnowledgeGraph& graph, const Community& community);

/// Mind-Map memory for one session: owns the graph and a summary cache keyed
/// by community membership, so unchanged communities are never re-summarized.
class MindMap {
public:
    explicit MindMap(ProviderSet providers) : providers_(std::move(providers)) {}

    const KnowledgeGraph& graph() const noexcept { return graph_; }
    void set_graph(KnowledgeGraph graph) { graph_ = std::move(graph); }

    /// Extracts a delta from the text and merges it.  Returns the delta.
    GraphDelta ingest(std::string_view reasoning_text);
    void merge(const GraphDelta& delta) { graph_ = merge_delta(graph_, delta); }

    /// Re-runs clustering if the graph changed since the last run.  Emits a
    /// "clustering" trace note when it does.
    const std::vector<Community>& ensure_communities();

    /// One community-summary call unless the same membership was summarized
    /// before.  Provider failure stores fallback_summary (noted in the trace).
    std::string summarize_community(const Community& community);

    /// Current communities and summaries, then one context-synthesis call
    /// over all summaries.  Empty graph: "" with no provider call.  Provider
    /// failure: the summaries joined by newlines.
    std::string synthesize_context();

    /// Graph-RAG answer: entity renderings plus community summaries are the
    /// corpus, top kQueryTopK retrieved, one grounded-answer call.  Empty
    /// graph: kMemoryEmpty, no provider call.
    std::string query_graph(std::string_view question);

    /// The corpus query_graph retrieves from.
    std::vector<rag::Chunk> retrieval_corpus() const;

    /// Provider calls spent on community summaries so far.
    std::size_t summary_calls() const noexcept { return summary_calls_; }

private:
    ProviderSet providers_;
    KnowledgeGraph graph_;
    std::map<std::vector<EntityId>, std::string> summary_cache_;
    std::size_t summary_calls_ = 0;
};

}  // namespace agentic::mindmap
