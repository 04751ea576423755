// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace agentic {

enum class ToolKind { WebSearch, Code, MindMap };

std::string_view to_string(ToolKind kind);
std::optional<ToolKind> tool_kind_from_string(std::string_view name);

/// Marker surface forms.  Prompts quote these verbatim, see docs/protocol.md.
namespace markers {
inline constexpr std::string_view kBeginSearch = "<<BEGIN_SEARCH>>";
inline constexpr std::string_view kEndSearch = "<<END_SEARCH>>";
inline constexpr std::string_view kBeginCode = "<<BEGIN_CODE>>";
inline constexpr std::string_view kEndCode = "<<END_CODE>>";
inline constexpr std::string_view kBeginMind = "<<BEGIN_MIND>>";
inline constexpr std::string_view kEndMind = "<<END_MIND>>";
inline constexpr std::string_view kResult = "<<RESULT>>";
inline constexpr std::string_view kEndResult = "<<END_RESULT>>";

std::string_view begin_marker(ToolKind kind);
std::string_view end_marker(ToolKind kind);
}  // namespace markers

struct TextEvent {
    std::string text;
    bool operator==(const TextEvent&) const = default;
};

struct ToolCallEvent {
    ToolKind kind{ToolKind::WebSearch};
    std::string query;
    bool operator==(const ToolCallEvent&) const = default;
};

enum class ParseErrorKind {
    StrayEnd,       ///< end-marker with no open call
    MismatchedEnd,  ///< end-marker of a different kind than the open call
    Unclosed,       ///< stream ended inside a call
    Overlong,       ///< query exceeded the buffer limit and was force-closed
};

/// Recoverable parse error.  `raw` holds the exact input bytes the error
/// consumed, so text + tool-call serializations + raw error bytes reassemble
/// the stream.
struct ParseErrorEvent {
    ParseErrorKind error{ParseErrorKind::StrayEnd};
    std::optional<ToolKind> kind;
    std::string partial_query;
    std::string raw;
    bool operator==(const ParseErrorEvent&) const = default;
};

struct StreamEndEvent {
    bool operator==(const StreamEndEvent&) const = default;
};

using ParseEvent = std::variant<TextEvent, ToolCallEvent, ParseErrorEvent, StreamEndEvent>;

/// Incremental scanner for tool-call markers in a decoded text stream.
///
/// Markers may be split across arbitrary chunk boundaries; any suffix that
/// could still grow into a marker is held back until the next feed().  Calls
/// do not nest: a begin-marker inside an open call is literal query text.
class StreamParser {
public:
    static constexpr std::size_t kMaxQueryBytes = 16 * 1024;

    explicit StreamParser(std::size_t max_query_bytes = kMaxQueryBytes)
        : max_query_bytes_(max_query_bytes) {}

    /// Throws std::logic_error once finalize() has been called.
    std::vector<ParseEvent> feed(std::string_view chunk);

    /// Flushes held-back bytes, reports an unclosed call, appends StreamEnd.
    std::vector<ParseEvent> finalize();

    bool finalized() const noexcept { return finalized_; }
    bool in_call() const noexcept { return open_.has_value(); }

private:
    void scan(std::vector<ParseEvent>& out, bool at_end);
    void scan_outside(std::vector<ParseEvent>& out, bool at_end);
    void scan_inside(std::vector<ParseEvent>& out, bool at_end);
    void emit_text(std::vector<ParseEvent>& out, std::string_view s);

    std::size_t max_query_bytes_;
    std::string buf_;
    std::optional<ToolKind> open_;
    std::string query_;
    bool finalized_ = false;
};

/// Merges adjacent TextEvents.  Chunking only changes how text is split, so
/// event lists are compared in this canonical form.
std::vector<ParseEvent> coalesce_text(const std::vector<ParseEvent>& events);

/// Re-serializes events with the marker grammar (inverse of parsing).
std::string serialize_events(const std::vector<ParseEvent>& events);

/// Parses a complete string in one shot, including finalize().
std::vector<ParseEvent> parse_all(std::string_view s);

}  // namespace agentic
