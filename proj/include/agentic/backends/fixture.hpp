// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentic/backends/providers.hpp"

namespace agentic {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Replay key for a chat request: hash of (role, messages, params) with
/// message text whitespace-normalized.  The stream flag is not part of it.
std::string request_digest(const ChatRequest& request);

/// Replay key for any other channel: hash of the request's canonical JSON.
std::string json_digest(std::string_view channel, const nlohmann::json& request);

/// One recorded provider interaction.  Exactly one of response / error is set.
struct FixtureEntry {
    std::string channel;
    std::string digest;
    nlohmann::json request;
    nlohmann::json response;
    std::optional<nlohmann::json> error;  ///< {"kind": "transport"|"application", "message": ...}
};

/// Ordered provider interactions, per channel.  In record mode entries are
/// appended; in replay mode each channel's requests must match the recorded
/// digests in order or ReplayMismatchError is thrown.
///
/// On disk: JSON-lines, one entry per line, in global call order.
class Fixture {
public:
    void append(FixtureEntry entry);

    /// Returns the next entry for the channel after checking its digest.
    /// Recorded errors are rethrown as ProviderError.
    const FixtureEntry& next(const std::string& channel, const std::string& digest);

    void save(const std::filesystem::path& path) const;
    static std::shared_ptr<Fixture> load(const std::filesystem::path& path);

    std::vector<FixtureEntry> entries() const;
    /// Entries not yet consumed by replay.
    std::size_t pending() const;

private:
    mutable std::mutex mutex_;
    std::vector<FixtureEntry> entries_;
    std::map<std::string, std::vector<std::size_t>> by_channel_;
    std::map<std::string, std::size_t> cursor_;
};

/// Wraps each live provider so every interaction (including failures and
/// clock reads) is appended to the fixture.
ProviderSet recording(const ProviderSet& live, std::shared_ptr<Fixture> fixture);

/// Provider set served entirely from a fixture: no network, no processes.
ProviderSet replaying(std::shared_ptr<Fixture> fixture);

}  // namespace agentic
