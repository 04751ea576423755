// SPDX-License-Identifier: Apache-2.0
#include "agentic/trace.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "agentic/text.hpp"

namespace agentic {

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::BudgetExhausted: return "budget_exhausted";
        case Termination::ProviderError: return "provider_error";
    }
    return "completed";
}

namespace {

using nlohmann::json;

Termination termination_from_string(const std::string& s) {
    if (s == "completed") return Termination::Completed;
    if (s == "budget_exhausted") return Termination::BudgetExhausted;
    if (s == "provider_error") return Termination::ProviderError;
    throw std::runtime_error("trace: unknown termination " + s);
}

json notes_json(const std::vector<TraceNote>& notes) {
    json a = json::array();
    for (const auto& n : notes) a.push_back({{"category", n.category}, {"detail", n.detail}});
    return a;
}

std::vector<TraceNote> notes_from(const json& j) {
    std::vector<TraceNote> out;
    if (!j.contains("notes")) return out;
    for (const auto& n : j.at("notes")) out.push_back({n.at("category"), n.at("detail")});
    return out;
}

struct RecordWriter {
    json operator()(const GenerationSpan& r) const {
        return {{"type", "generation"}, {"text", r.text}, {"token_count", r.token_count}, {"notes", notes_json(r.notes)}};
    }
    json operator()(const ToolInvocation& r) const {
        return {{"type", "tool"},
                {"kind", to_string(r.kind)},
                {"query", r.query},
                {"agent_response", r.agent_response},
                {"wall_time", r.wall_time},
                {"notes", notes_json(r.notes)}};
    }
    json operator()(const Injection& r) const {
        return {{"type", "injection"}, {"text", r.text}, {"notes", notes_json(r.notes)}};
    }
    json operator()(const FinalAnswer& r) const {
        return {{"type", "final"}, {"text", r.text}, {"notes", notes_json(r.notes)}};
    }
};

}  // namespace

std::string serialize_trace(const SessionTrace& trace) {
    std::string out;
    json header = {{"type", "session"},
                   {"version", kTraceVersion},
                   {"session_id", trace.session_id},
                   {"question", trace.question},
                   {"mode", to_string(trace.mode)},
                   {"config", to_json(trace.config)}};
    out += header.dump() + "\n";
    for (const auto& r : trace.records) out += std::visit(RecordWriter{}, r).dump() + "\n";
    json calls = json::object();
    for (const auto& [k, v] : trace.provider_calls) calls[k] = v;
    json summary = {{"type", "summary"},
                    {"termination", to_string(trace.termination)},
                    {"final_answer", trace.final_answer},
                    {"provider_calls", calls}};
    out += summary.dump() + "\n";
    return out;
}

namespace {

SessionTrace parse_trace_lines(std::string_view jsonl) {
    SessionTrace trace;
    bool have_header = false;
    bool have_summary = false;
    for (const auto& line : text::split_lines(jsonl)) {
        if (text::trim(line).empty()) continue;
        if (have_summary) throw std::runtime_error("trace: content after summary line");
        json j = json::parse(line);
        const std::string type = j.at("type");
        if (!have_header) {
            if (type != "session") throw std::runtime_error("trace: first line must be the session header");
            if (j.at("version").get<int>() != kTraceVersion) throw std::runtime_error("trace: unsupported version");
            trace.session_id = j.at("session_id");
            trace.question = j.at("question");
            auto mode = task_mode_from_string(j.at("mode").get<std::string>());
            if (!mode) throw std::runtime_error("trace: unknown mode");
            trace.mode = *mode;
            trace.config = session_config_from_json(j.at("config"));
            have_header = true;
        } else if (type == "generation") {
            trace.records.push_back(GenerationSpan{j.at("text"), j.at("token_count"), notes_from(j)});
        } else if (type == "tool") {
            auto kind = tool_kind_from_string(j.at("kind").get<std::string>());
            if (!kind) throw std::runtime_error("trace: unknown tool kind");
            trace.records.push_back(
                ToolInvocation{*kind, j.at("query"), j.at("agent_response"), j.at("wall_time"), notes_from(j)});
        } else if (type == "injection") {
            trace.records.push_back(Injection{j.at("text"), notes_from(j)});
        } else if (type == "final") {
            trace.records.push_back(FinalAnswer{j.at("text"), notes_from(j)});
        } else if (type == "summary") {
            trace.termination = termination_from_string(j.at("termination"));
            trace.final_answer = j.at("final_answer");
            for (const auto& [k, v] : j.at("provider_calls").items()) trace.provider_calls[k] = v.get<int>();
            have_summary = true;
        } else {
            throw std::runtime_error("trace: unknown record type " + type);
        }
    }
    if (!have_header || !have_summary) throw std::runtime_error("trace: missing header or summary line");
    return trace;
}

}  // namespace

SessionTrace parse_trace(std::string_view jsonl) {
    try {
        return parse_trace_lines(jsonl);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("trace: ") + e.what());
    }
}

}  // namespace agentic
