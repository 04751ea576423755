// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentic/mindmap/louvain.hpp"

namespace agentic::mindmap {

struct EntityId {
    std::int64_t value = 0;
    auto operator<=>(const EntityId&) const = default;
};

struct Entity {
    EntityId id;
    std::string canonical_name;
    std::string description;
    int mention_count = 1;

    bool operator==(const Entity&) const = default;
};

struct Relation {
    EntityId source;
    EntityId target;
    std::string label;
    double weight = 1.0;

    bool operator==(const Relation&) const = default;
};

struct Community {
    int id = 0;
    std::vector<EntityId> members;  ///< ascending
    double internal_weight = 0.0;

    bool operator==(const Community&) const = default;
};

/// Entities and relations produced by one extraction.  Entity ids are
/// already resolved against the graph the delta will be merged into.
struct GraphDelta {
    std::vector<Entity> entities;
    std::vector<Relation> relations;

    bool empty() const noexcept { return entities.empty() && relations.empty(); }
};

/// Case-fold + trim.  The only normalization applied to entity names and
/// relation labels.
std::string normalize_name(std::string_view name);

/// The Mind-Map's structured memory.
///
/// Invariants: normalized names are unique; relation endpoints exist and
/// differ; at most one relation per (source, target, normalized label);
/// communities, when present, partition the entity ids; summaries exist only
/// for current communities.
class KnowledgeGraph {
public:
    const std::map<EntityId, Entity>& entities() const noexcept { return entities_; }
    std::vector<Relation> relations() const;
    std::size_t relation_count() const noexcept { return relations_.size(); }
    bool empty() const noexcept { return entities_.empty(); }

    const Entity* find(EntityId id) const;
    std::optional<EntityId> find_by_name(std::string_view name) const;
    EntityId next_id() const;

    /// Relations touching the entity, in key order.
    std::vector<Relation> incident(EntityId id) const;

    bool has_communities() const noexcept { return communities_.has_value(); }
    const std::vector<Community>& communities() const;
    /// Throws PreconditionError unless the list partitions the entity ids.
    void set_communities(std::vector<Community> communities);
    void clear_communities();

    const std::map<int, std::string>& summaries() const noexcept { return summaries_; }
    /// Throws PreconditionError for an id that is not a current community.
    void set_summary(int community_id, std::string summary);

    /// Undirected projection for clustering; node i is the i-th entity in id
    /// order, and both relation directions add onto one edge.
    graph::WeightedGraph undirected(std::vector<EntityId>* node_ids = nullptr) const;

    /// Throws PreconditionError on any broken invariant.
    void check_invariants() const;

    bool operator==(const KnowledgeGraph&) const = default;

    friend KnowledgeGraph merge_delta(const KnowledgeGraph& graph, const GraphDelta& delta);
    friend KnowledgeGraph graph_from_json(const nlohmann::json& j);

private:
    using RelationKey = std::tuple<EntityId, EntityId, std::string>;

    std::map<EntityId, Entity> entities_;
    std::map<std::string, EntityId> by_name_;
    std::map<RelationKey, Relation> relations_;
    std::optional<std::vector<Community>> communities_;
    std::map<int, std::string> summaries_;
};

/// Adds the delta: new entities are inserted, re-mentioned ones get their
/// mention_count increased (and an empty description filled), repeated
/// relations add their weight.  Communities and summaries are cleared when
/// the entity set or any relation changes; otherwise they are kept.
///
/// Throws PreconditionError when delta ids are inconsistent (an id reused for
/// a different name, a relation to an unknown entity, or a self-relation).
KnowledgeGraph merge_delta(const KnowledgeGraph& graph, const GraphDelta& delta);

/// Louvain over the undirected projection.  Community ids follow the lowest
/// member id; empty graph -> empty list.
std::vector<Community> detect_communities(const KnowledgeGraph& graph, graph::LouvainResult* stats = nullptr);

/// Q of a community list on the graph's undirected projection.
double graph_modularity(const KnowledgeGraph& graph, const std::vector<Community>& communities);

nlohmann::json graph_to_json(const KnowledgeGraph& graph);
KnowledgeGraph graph_from_json(const nlohmann::json& j);

/// Graphviz rendering; entities are clustered by community when known.
std::string graph_to_dot(const KnowledgeGraph& graph);

}  // namespace agentic::mindmap
