// SPDX-License-Identifier: Apache-2.0
#include "agentic/stream_parser.hpp"

#include <array>
#include <stdexcept>

namespace agentic {

namespace {

constexpr std::array<ToolKind, 3> kAllKinds = {ToolKind::WebSearch, ToolKind::Code,
                                               ToolKind::MindMap};

constexpr std::string_view kOpen = "<<";

// True when s is a non-empty proper prefix of some marker in the set.
template <typename MarkerFn>
bool is_partial_marker(std::string_view s, MarkerFn marker_of) {
    for (auto kind : kAllKinds) {
        auto m = marker_of(kind);
        if (s.size() < m.size() && m.substr(0, s.size()) == s) return true;
    }
    return false;
}

template <typename MarkerFn>
std::optional<ToolKind> full_marker_at(std::string_view s, MarkerFn marker_of) {
    for (auto kind : kAllKinds) {
        if (s.substr(0, marker_of(kind).size()) == marker_of(kind)) return kind;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(ToolKind kind) {
    switch (kind) {
        case ToolKind::WebSearch: return "web_search";
        case ToolKind::Code: return "code";
        case ToolKind::MindMap: return "mind_map";
    }
    return "unknown";
}

std::optional<ToolKind> tool_kind_from_string(std::string_view name) {
    for (auto kind : kAllKinds) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

namespace markers {
std::string_view begin_marker(ToolKind kind) {
    switch (kind) {
        case ToolKind::WebSearch: return kBeginSearch;
        case ToolKind::Code: return kBeginCode;
        case ToolKind::MindMap: return kBeginMind;
    }
    return {};
}

std::string_view end_marker(ToolKind kind) {
    switch (kind) {
        case ToolKind::WebSearch: return kEndSearch;
        case ToolKind::Code: return kEndCode;
        case ToolKind::MindMap: return kEndMind;
    }
    return {};
}
}  // namespace markers

std::vector<ParseEvent> StreamParser::feed(std::string_view chunk) {
    if (finalized_) throw std::logic_error("StreamParser::feed after finalize");
    buf_.append(chunk);
    std::vector<ParseEvent> out;
    scan(out, false);
    return out;
}

std::vector<ParseEvent> StreamParser::finalize() {
    if (finalized_) throw std::logic_error("StreamParser::finalize called twice");
    std::vector<ParseEvent> out;
    scan(out, true);
    if (open_) {
        query_ += buf_;
        buf_.clear();
        ParseErrorEvent err;
        err.error = ParseErrorKind::Unclosed;
        err.kind = open_;
        err.partial_query = query_;
        err.raw = std::string(markers::begin_marker(*open_)) + query_;
        out.emplace_back(std::move(err));
        open_.reset();
        query_.clear();
    }
    out.emplace_back(StreamEndEvent{});
    finalized_ = true;
    return out;
}

void StreamParser::scan(std::vector<ParseEvent>& out, bool at_end) {
    // Each pass consumes input or flips state; stop once a pass does neither.
    while (true) {
        auto before = buf_.size();
        bool was_open = open_.has_value();
        if (open_) {
            scan_inside(out, at_end);
        } else {
            scan_outside(out, at_end);
        }
        if (buf_.size() == before && was_open == open_.has_value()) return;
    }
}

void StreamParser::emit_text(std::vector<ParseEvent>& out, std::string_view s) {
    if (s.empty()) return;
    if (!out.empty()) {
        if (auto* t = std::get_if<TextEvent>(&out.back())) {
            t->text.append(s);
            return;
        }
    }
    out.emplace_back(TextEvent{std::string(s)});
}

void StreamParser::scan_outside(std::vector<ParseEvent>& out, bool at_end) {
    std::size_t pos = 0;
    std::size_t text_start = 0;
    while (true) {
        auto lt = buf_.find(kOpen.front(), pos);
        if (lt == std::string::npos) {
            pos = buf_.size();
            break;
        }
        std::string_view rest(buf_.data() + lt, buf_.size() - lt);
        if (auto kind = full_marker_at(rest, markers::begin_marker)) {
            emit_text(out, std::string_view(buf_).substr(text_start, lt - text_start));
            buf_.erase(0, lt + markers::begin_marker(*kind).size());
            open_ = kind;
            query_.clear();
            return;
        }
        if (auto kind = full_marker_at(rest, markers::end_marker)) {
            emit_text(out, std::string_view(buf_).substr(text_start, lt - text_start));
            ParseErrorEvent err;
            err.error = ParseErrorKind::StrayEnd;
            err.kind = kind;
            err.raw = std::string(markers::end_marker(*kind));
            out.emplace_back(std::move(err));
            buf_.erase(0, lt + markers::end_marker(*kind).size());
            return;
        }
        if (!at_end && (is_partial_marker(rest, markers::begin_marker) ||
                        is_partial_marker(rest, markers::end_marker))) {
            // Hold back from here; could still become a marker.
            pos = lt;
            emit_text(out, std::string_view(buf_).substr(text_start, pos - text_start));
            buf_.erase(0, pos);
            return;
        }
        pos = lt + 1;
    }
    emit_text(out, std::string_view(buf_).substr(text_start, pos - text_start));
    buf_.erase(0, pos);
}

void StreamParser::scan_inside(std::vector<ParseEvent>& out, bool at_end) {
    const auto kind = *open_;
    std::size_t pos = 0;
    std::size_t consumed = 0;  // bytes of buf_ known to be query text
    std::optional<ToolKind> closing;
    std::size_t close_at = 0;
    while (true) {
        auto lt = buf_.find(kOpen.front(), pos);
        if (lt == std::string::npos) {
            consumed = buf_.size();
            break;
        }
        std::string_view rest(buf_.data() + lt, buf_.size() - lt);
        if (auto k = full_marker_at(rest, markers::end_marker)) {
            closing = k;
            close_at = lt;
            break;
        }
        if (!at_end && is_partial_marker(rest, markers::end_marker)) {
            consumed = lt;
            break;
        }
        pos = lt + 1;
    }
    std::size_t take = closing ? close_at : consumed;

    if (query_.size() + take > max_query_bytes_) {
        auto room = max_query_bytes_ - query_.size();
        query_.append(buf_, 0, room);
        buf_.erase(0, room);
        ParseErrorEvent err;
        err.error = ParseErrorKind::Overlong;
        err.kind = kind;
        err.partial_query = query_;
        err.raw = std::string(markers::begin_marker(kind)) + query_;
        out.emplace_back(std::move(err));
        open_.reset();
        query_.clear();
        return;
    }

    query_.append(buf_, 0, take);
    if (!closing) {
        buf_.erase(0, take);
        return;
    }

    auto end_len = markers::end_marker(*closing).size();
    if (*closing == kind) {
        out.emplace_back(ToolCallEvent{kind, std::move(query_)});
    } else {
        ParseErrorEvent err;
        err.error = ParseErrorKind::MismatchedEnd;
        err.kind = kind;
        err.partial_query = query_;
        err.raw = std::string(markers::begin_marker(kind)) + query_ +
                  std::string(markers::end_marker(*closing));
        out.emplace_back(std::move(err));
    }
    buf_.erase(0, close_at + end_len);
    open_.reset();
    query_.clear();
}

std::vector<ParseEvent> coalesce_text(const std::vector<ParseEvent>& events) {
    std::vector<ParseEvent> out;
    for (const auto& ev : events) {
        if (const auto* t = std::get_if<TextEvent>(&ev)) {
            if (t->text.empty()) continue;
            if (!out.empty()) {
                if (auto* prev = std::get_if<TextEvent>(&out.back())) {
                    prev->text += t->text;
                    continue;
                }
            }
        }
        out.push_back(ev);
    }
    return out;
}

std::string serialize_events(const std::vector<ParseEvent>& events) {
    std::string out;
    for (const auto& ev : events) {
        if (const auto* t = std::get_if<TextEvent>(&ev)) {
            out += t->text;
        } else if (const auto* c = std::get_if<ToolCallEvent>(&ev)) {
            out += markers::begin_marker(c->kind);
            out += c->query;
            out += markers::end_marker(c->kind);
        } else if (const auto* e = std::get_if<ParseErrorEvent>(&ev)) {
            out += e->raw;
        }
    }
    return out;
}

std::vector<ParseEvent> parse_all(std::string_view s) {
    StreamParser parser;
    auto events = parser.feed(s);
    auto tail = parser.finalize();
    events.insert(events.end(), tail.begin(), tail.end());
    return events;
}

}  // namespace agentic
