// SPDX-License-Identifier: Apache-2.0
#include "agentic/mindmap/graph.hpp"

#include <set>
#include <sstream>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic::mindmap {

std::string normalize_name(std::string_view name) { return text::lower(text::trim(name)); }

std::vector<Relation> KnowledgeGraph::relations() const {
    std::vector<Relation> out;
    out.reserve(relations_.size());
    for (const auto& [_, r] : relations_) out.push_back(r);
    return out;
}

const Entity* KnowledgeGraph::find(EntityId id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &it->second;
}

std::optional<EntityId> KnowledgeGraph::find_by_name(std::string_view name) const {
    auto it = by_name_.find(normalize_name(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

EntityId KnowledgeGraph::next_id() const {
    return entities_.empty() ? EntityId{1} : EntityId{entities_.rbegin()->first.value + 1};
}

std::vector<Relation> KnowledgeGraph::incident(EntityId id) const {
    std::vector<Relation> out;
    for (const auto& [_, r] : relations_) {
        if (r.source == id || r.target == id) out.push_back(r);
    }
    return out;
}

const std::vector<Community>& KnowledgeGraph::communities() const {
    static const std::vector<Community> none;
    return communities_ ? *communities_ : none;
}

void KnowledgeGraph::set_communities(std::vector<Community> communities) {
    std::set<EntityId> seen;
    std::set<int> ids;
    for (const auto& c : communities) {
        if (c.members.empty()) throw PreconditionError("community with no members");
        if (!ids.insert(c.id).second) throw PreconditionError("duplicate community id");
        for (auto m : c.members) {
            if (!entities_.count(m)) throw PreconditionError("community member is not an entity");
            if (!seen.insert(m).second) throw PreconditionError("communities overlap");
        }
    }
    if (seen.size() != entities_.size()) throw PreconditionError("communities do not cover every entity");
    communities_ = std::move(communities);
    summaries_.clear();
}

void KnowledgeGraph::clear_communities() {
    communities_.reset();
    summaries_.clear();
}

void KnowledgeGraph::set_summary(int community_id, std::string summary) {
    for (const auto& c : communities()) {
        if (c.id == community_id) {
            summaries_[community_id] = std::move(summary);
            return;
        }
    }
    throw PreconditionError("summary for unknown community " + std::to_string(community_id));
}

graph::WeightedGraph KnowledgeGraph::undirected(std::vector<EntityId>* node_ids) const {
    std::map<EntityId, std::size_t> index;
    for (const auto& [id, _] : entities_) index.emplace(id, index.size());
    graph::WeightedGraph g(entities_.size());
    for (const auto& [_, r] : relations_) g.add_edge(index.at(r.source), index.at(r.target), r.weight);
    if (node_ids != nullptr) {
        node_ids->clear();
        for (const auto& [id, _] : entities_) node_ids->push_back(id);
    }
    return g;
}

void KnowledgeGraph::check_invariants() const {
    std::set<std::string> names;
    for (const auto& [id, e] : entities_) {
        if (e.id != id) throw PreconditionError("entity id mismatch");
        if (e.mention_count < 1) throw PreconditionError("mention_count < 1");
        if (!names.insert(normalize_name(e.canonical_name)).second) throw PreconditionError("duplicate entity name");
    }
    for (const auto& [key, r] : relations_) {
        if (r.source == r.target) throw PreconditionError("self relation");
        if (!entities_.count(r.source) || !entities_.count(r.target)) throw PreconditionError("dangling relation");
        if (r.weight < 1.0) throw PreconditionError("relation weight < 1");
    }
    if (communities_) {
        std::set<EntityId> seen;
        for (const auto& c : *communities_) {
            for (auto m : c.members) {
                if (!seen.insert(m).second) throw PreconditionError("communities overlap");
            }
        }
        if (seen.size() != entities_.size()) throw PreconditionError("communities do not partition entities");
    }
    for (const auto& [cid, _] : summaries_) {
        bool known = false;
        for (const auto& c : communities()) known = known || c.id == cid;
        if (!known) throw PreconditionError("summary for a stale community");
    }
}

KnowledgeGraph merge_delta(const KnowledgeGraph& graph, const GraphDelta& delta) {
    KnowledgeGraph out = graph;
    bool structural = false;

    for (const auto& e : delta.entities) {
        auto norm = normalize_name(e.canonical_name);
        if (norm.empty()) throw PreconditionError("entity with empty name");
        auto it = out.entities_.find(e.id);
        if (it != out.entities_.end()) {
            if (normalize_name(it->second.canonical_name) != norm) {
                throw PreconditionError("delta reuses id " + std::to_string(e.id.value) + " for a different name");
            }
            it->second.mention_count += std::max(1, e.mention_count);
            if (it->second.description.empty()) it->second.description = e.description;
            continue;
        }
        if (auto named = out.by_name_.find(norm); named != out.by_name_.end()) {
            throw PreconditionError("delta introduces '" + e.canonical_name + "' under a new id");
        }
        Entity copy = e;
        copy.mention_count = std::max(1, e.mention_count);
        out.entities_.emplace(e.id, copy);
        out.by_name_.emplace(norm, e.id);
        structural = true;
    }

    for (const auto& r : delta.relations) {
        if (r.source == r.target) throw PreconditionError("self relation in delta");
        if (!out.entities_.count(r.source) || !out.entities_.count(r.target)) {
            throw PreconditionError("relation endpoint missing from graph and delta");
        }
        KnowledgeGraph::RelationKey key{r.source, r.target, normalize_name(r.label)};
        double w = std::max(1.0, r.weight);
        auto it = out.relations_.find(key);
        if (it == out.relations_.end()) {
            Relation copy = r;
            copy.label = text::trim(r.label);
            copy.weight = w;
            out.relations_.emplace(std::move(key), std::move(copy));
        } else {
            it->second.weight += w;
        }
        structural = true;
    }

    if (structural) out.clear_communities();
    return out;
}

std::vector<Community> detect_communities(const KnowledgeGraph& graph, graph::LouvainResult* stats) {
    if (graph.empty()) return {};
    std::vector<EntityId> node_ids;
    auto g = graph.undirected(&node_ids);
    auto result = graph::louvain(g);

    std::map<std::size_t, Community> by_label;
    for (std::size_t u = 0; u < node_ids.size(); ++u) {
        auto& c = by_label[result.community[u]];
        c.id = static_cast<int>(result.community[u]);
        c.members.push_back(node_ids[u]);
    }
    std::map<EntityId, int> owner;
    for (const auto& [_, c] : by_label) {
        for (auto m : c.members) owner[m] = c.id;
    }
    for (const auto& r : graph.relations()) {
        if (owner[r.source] == owner[r.target]) by_label[static_cast<std::size_t>(owner[r.source])].internal_weight += r.weight;
    }
    std::vector<Community> out;
    for (auto& [_, c] : by_label) out.push_back(std::move(c));
    if (stats != nullptr) *stats = std::move(result);
    return out;
}

double graph_modularity(const KnowledgeGraph& graph, const std::vector<Community>& communities) {
    std::vector<EntityId> node_ids;
    auto g = graph.undirected(&node_ids);
    std::map<EntityId, std::size_t> label;
    for (std::size_t i = 0; i < communities.size(); ++i) {
        for (auto m : communities[i].members) label[m] = i;
    }
    std::vector<std::size_t> assignment(node_ids.size());
    for (std::size_t u = 0; u < node_ids.size(); ++u) assignment[u] = label.at(node_ids[u]);
    return graph::modularity(g, assignment);
}

nlohmann::json graph_to_json(const KnowledgeGraph& graph) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& [id, e] : graph.entities()) {
        entities.push_back({{"id", id.value},
                            {"name", e.canonical_name},
                            {"description", e.description},
                            {"mention_count", e.mention_count}});
    }
    nlohmann::json relations = nlohmann::json::array();
    for (const auto& r : graph.relations()) {
        relations.push_back(
            {{"source", r.source.value}, {"target", r.target.value}, {"label", r.label}, {"weight", r.weight}});
    }
    nlohmann::json out = {{"entities", entities}, {"relations", relations}};
    if (graph.has_communities()) {
        nlohmann::json communities = nlohmann::json::array();
        for (const auto& c : graph.communities()) {
            nlohmann::json members = nlohmann::json::array();
            for (auto m : c.members) members.push_back(m.value);
            communities.push_back({{"id", c.id}, {"members", members}, {"internal_weight", c.internal_weight}});
        }
        out["communities"] = communities;
        nlohmann::json summaries = nlohmann::json::object();
        for (const auto& [cid, s] : graph.summaries()) summaries[std::to_string(cid)] = s;
        out["summaries"] = summaries;
    } else {
        out["communities"] = nullptr;
        out["summaries"] = nlohmann::json::object();
    }
    return out;
}

KnowledgeGraph graph_from_json(const nlohmann::json& j) {
    try {
        GraphDelta delta;
        for (const auto& e : j.at("entities")) {
            delta.entities.push_back({EntityId{e.at("id").get<std::int64_t>()}, e.at("name").get<std::string>(),
                                      e.value("description", std::string()), e.value("mention_count", 1)});
        }
        for (const auto& r : j.at("relations")) {
            delta.relations.push_back({EntityId{r.at("source").get<std::int64_t>()},
                                       EntityId{r.at("target").get<std::int64_t>()}, r.at("label").get<std::string>(),
                                       r.value("weight", 1.0)});
        }
        auto graph = merge_delta(KnowledgeGraph{}, delta);
        if (j.contains("communities") && j["communities"].is_array()) {
            std::vector<Community> communities;
            for (const auto& c : j["communities"]) {
                Community community;
                community.id = c.at("id").get<int>();
                for (const auto& m : c.at("members")) community.members.push_back(EntityId{m.get<std::int64_t>()});
                community.internal_weight = c.value("internal_weight", 0.0);
                communities.push_back(std::move(community));
            }
            graph.set_communities(std::move(communities));
            if (j.contains("summaries")) {
                for (const auto& [key, value] : j["summaries"].items()) {
                    graph.set_summary(std::stoi(key), value.get<std::string>());
                }
            }
        }
        return graph;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed graph JSON: ") + e.what());
    }
}

namespace {
std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}
}  // namespace

std::string graph_to_dot(const KnowledgeGraph& graph) {
    std::ostringstream out;
    out << "digraph mindmap {\n  node [shape=box];\n";
    auto node_line = [&](const Entity& e) {
        out << "    e" << e.id.value << " [label=\"" << dot_escape(e.canonical_name) << "\"];\n";
    };
    if (graph.has_communities()) {
        for (const auto& c : graph.communities()) {
            out << "  subgraph cluster_" << c.id << " {\n    label=\"community " << c.id << "\";\n";
            for (auto m : c.members) node_line(*graph.find(m));
            out << "  }\n";
        }
    } else {
        for (const auto& [_, e] : graph.entities()) node_line(e);
    }
    for (const auto& r : graph.relations()) {
        out << "  e" << r.source.value << " -> e" << r.target.value << " [label=\"" << dot_escape(r.label);
        if (r.weight != 1.0) out << " (" << r.weight << ")";
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace agentic::mindmap
