// SPDX-License-Identifier: Apache-2.0
#include "agentic/mindmap/agent.hpp"

#include <cstdio>
#include <set>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic::mindmap {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        out.push_back(text::trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

std::string padded(const char* prefix, long long value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s:%06lld", prefix, value);
    return buf;
}

constexpr std::string_view kExtractionSystem =
    "You build a knowledge graph from reasoning text. Output only records, one per line, fields separated by a "
    "single TAB character:\n"
    "ENTITY<TAB>name<TAB>short description\n"
    "REL<TAB>source name<TAB>target name<TAB>relation label\n"
    "Use snake_case relation labels. Output NONE if there is nothing to extract.";

constexpr std::string_view kFormatReminder =
    "Your previous output could not be parsed. Reply again using only ENTITY and REL lines with TAB-separated "
    "fields, exactly as specified, or NONE.";

}  // namespace

std::optional<ExtractionRecords> parse_extraction(std::string_view output) {
    ExtractionRecords records;
    bool content = false;
    bool explicit_none = false;
    for (const auto& raw : text::split_lines(output)) {
        auto line = text::trim(raw);
        if (line.empty() || line.rfind("```", 0) == 0) continue;
        if (line == "NONE") {
            explicit_none = true;
            continue;
        }
        content = true;
        auto fields = split_tabs(raw);
        for (auto& f : fields) f = text::trim(f);
        if (fields.size() >= 2 && fields[0] == "ENTITY" && !fields[1].empty()) {
            records.entities.push_back({fields[1], fields.size() >= 3 ? fields[2] : std::string()});
        } else if (fields.size() >= 4 && fields[0] == "REL" && !fields[1].empty() && !fields[2].empty() &&
                   !fields[3].empty()) {
            records.relations.push_back({fields[1], fields[2], fields[3]});
        }
    }
    bool any = !records.entities.empty() || !records.relations.empty();
    if (content && !any && !explicit_none) return std::nullopt;
    return records;
}

GraphDelta resolve_records(const ExtractionRecords& records, const KnowledgeGraph& existing) {
    GraphDelta delta;
    std::map<std::string, std::size_t> slot;  // normalized name -> index in delta.entities
    auto next = existing.next_id();
    auto mention = [&](const std::string& name, const std::string& description) -> EntityId {
        auto norm = normalize_name(name);
        if (auto it = slot.find(norm); it != slot.end()) {
            auto& e = delta.entities[it->second];
            if (e.description.empty()) e.description = description;
            return e.id;
        }
        Entity e;
        if (auto id = existing.find_by_name(name)) {
            e = *existing.find(*id);
            e.description = description;
        } else {
            e.id = next;
            next.value += 1;
            e.canonical_name = text::trim(name);
            e.description = description;
        }
        e.mention_count = 1;
        slot.emplace(norm, delta.entities.size());
        delta.entities.push_back(e);
        return e.id;
    };
    for (const auto& e : records.entities) mention(e.name, e.description);
    for (const auto& r : records.relations) {
        auto src = mention(r.source, "");
        auto dst = mention(r.target, "");
        if (src == dst) continue;
        delta.relations.push_back({src, dst, r.label, 1.0});
    }
    return delta;
}

std::string extraction_prompt(std::string_view reasoning_text, const KnowledgeGraph& existing) {
    std::string prompt;
    if (!existing.empty()) {
        std::vector<std::string> names;
        for (const auto& [_, e] : existing.entities()) names.push_back(e.canonical_name);
        prompt += "Known entities (reuse these exact names when they recur): " + text::join(names, ", ") + "\n\n";
    }
    prompt += "Reasoning text:\n";
    prompt += reasoning_text;
    return prompt;
}

GraphDelta extract_graph_delta(std::string_view reasoning_text, const KnowledgeGraph& existing,
                               const ProviderSet& providers) {
    if (text::trim(reasoning_text).empty()) throw PreconditionError("extract_graph_delta needs non-empty text");
    ChatRequest request;
    request.role = ChatRole::GraphConstruction;
    request.params = providers.params;
    request.messages = {system_message(std::string(kExtractionSystem)),
                        user_message(extraction_prompt(reasoning_text, existing))};
    try {
        auto& chat = providers.chat_for(ChatRole::GraphConstruction);
        auto first = chat.complete(request);
        if (auto records = parse_extraction(first.text)) return resolve_records(*records, existing);
        request.messages.push_back(assistant_message(first.text));
        request.messages.push_back(user_message(std::string(kFormatReminder)));
        auto second = chat.complete(request);
        if (auto records = parse_extraction(second.text)) return resolve_records(*records, existing);
        providers.note("warning", "graph extraction output unparseable after reprompt; delta dropped");
    } catch (const ProviderError& e) {
        providers.note("warning", std::string("graph extraction failed: ") + e.what());
    }
    return {};
}

std::string render_entity(const KnowledgeGraph& graph, const Entity& entity) {
    std::string out = entity.canonical_name;
    if (!entity.description.empty()) out += ": " + entity.description;
    auto rels = graph.incident(entity.id);
    if (!rels.empty()) {
        std::vector<std::string> parts;
        for (const auto& r : rels) {
            parts.push_back(graph.find(r.source)->canonical_name + " " + r.label + " " +
                            graph.find(r.target)->canonical_name);
        }
        out += "\nRelations: " + text::join(parts, "; ");
    }
    return out;
}

std::string fallback_summary(const KnowledgeGraph& graph, const Community& community) {
    std::vector<std::string> names;
    for (auto m : community.members) names.push_back(graph.find(m)->canonical_name);
    return "Entities: " + text::join(names, ", ");
}

GraphDelta MindMap::ingest(std::string_view reasoning_text) {
    auto delta = extract_graph_delta(reasoning_text, graph_, providers_);
    merge(delta);
    return delta;
}

const std::vector<Community>& MindMap::ensure_communities() {
    if (!graph_.has_communities() && !graph_.empty()) {
        auto communities = detect_communities(graph_);
        providers_.note("clustering", "detect_communities: " + std::to_string(communities.size()) +
                                          " communities over " + std::to_string(graph_.entities().size()) +
                                          " entities");
        graph_.set_communities(std::move(communities));
    }
    return graph_.communities();
}

std::string MindMap::summarize_community(const Community& community) {
    for (auto m : community.members) {
        if (graph_.find(m) == nullptr) throw PreconditionError("community member missing from graph");
    }
    if (auto it = summary_cache_.find(community.members); it != summary_cache_.end()) {
        if (graph_.has_communities()) {
            for (const auto& c : graph_.communities()) {
                if (c.id == community.id && c.members == community.members) graph_.set_summary(c.id, it->second);
            }
        }
        return it->second;
    }

    std::set<EntityId> members(community.members.begin(), community.members.end());
    std::string prompt = "Summarize this group of related entities in two or three sentences.\n\nEntities:\n";
    for (auto m : community.members) {
        const auto* e = graph_.find(m);
        prompt += "- " + e->canonical_name;
        if (!e->description.empty()) prompt += ": " + e->description;
        prompt += '\n';
    }
    std::string rels;
    for (const auto& r : graph_.relations()) {
        if (members.count(r.source) && members.count(r.target)) {
            rels += "- " + graph_.find(r.source)->canonical_name + " " + r.label + " " +
                    graph_.find(r.target)->canonical_name + '\n';
        }
    }
    if (!rels.empty()) prompt += "\nRelations:\n" + rels;

    ChatRequest request;
    request.role = ChatRole::CommunitySummary;
    request.params = providers_.params;
    request.messages = {system_message("You write concise summaries of knowledge-graph communities."),
                        user_message(prompt)};
    std::string summary;
    ++summary_calls_;
    try {
        summary = text::trim(providers_.chat_for(ChatRole::CommunitySummary).complete(request).text);
        summary_cache_[community.members] = summary;
    } catch (const ProviderError& e) {
        providers_.note("fallback", std::string("community summary: ") + e.what());
        summary = fallback_summary(graph_, community);
    }
    if (graph_.has_communities()) {
        for (const auto& c : graph_.communities()) {
            if (c.id == community.id && c.members == community.members) graph_.set_summary(c.id, summary);
        }
    }
    return summary;
}

std::string MindMap::synthesize_context() {
    if (graph_.empty()) return {};
    auto communities = ensure_communities();
    std::vector<std::string> summaries;
    for (const auto& c : communities) {
        auto it = graph_.summaries().find(c.id);
        summaries.push_back(it != graph_.summaries().end() ? it->second : summarize_community(c));
    }
    std::string prompt = "Combine these summaries of the reasoning so far into one context paragraph.\n\n";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        prompt += "[" + std::to_string(i + 1) + "] " + summaries[i] + "\n";
    }
    ChatRequest request;
    request.role = ChatRole::ContextSynthesis;
    request.params = providers_.params;
    request.messages = {system_message("You condense structured memory into a single context paragraph."),
                        user_message(prompt)};
    try {
        return text::trim(providers_.chat_for(ChatRole::ContextSynthesis).complete(request).text);
    } catch (const ProviderError& e) {
        providers_.note("fallback", std::string("context synthesis: ") + e.what());
        return text::join(summaries, "\n");
    }
}

std::vector<rag::Chunk> MindMap::retrieval_corpus() const {
    std::vector<rag::Chunk> corpus;
    for (const auto& [id, e] : graph_.entities()) {
        corpus.push_back({padded("entity", id.value), 0, render_entity(graph_, e)});
    }
    for (const auto& [cid, summary] : graph_.summaries()) {
        if (!text::trim(summary).empty()) corpus.push_back({padded("community", cid), 0, summary});
    }
    return corpus;
}

std::string MindMap::query_graph(std::string_view question) {
    if (text::trim(question).empty()) throw PreconditionError("query_graph needs a question");
    if (graph_.empty()) return std::string(kMemoryEmpty);
    auto corpus = retrieval_corpus();
    std::vector<rag::RetrievalHit> hits;
    try {
        hits = rag::retrieve_top_k(question, corpus, kQueryTopK, providers_.embedding_provider());
    } catch (const ProviderError& e) {
        providers_.note("warning", std::string("graph retrieval failed: ") + e.what());
    }
    return rag::generate_grounded_answer(question, hits, "", providers_, ChatRole::GraphQuery);
}

}  // namespace agentic::mindmap
