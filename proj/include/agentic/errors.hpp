// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace agentic {

/// Failure reported by an external provider.  Transport failures (connection
/// refused, timeouts, truncated streams) are retryable; application failures
/// (non-2xx responses, malformed payloads, exhausted mock scripts) are not.
class ProviderError : public std::runtime_error {
public:
    enum class Kind { Transport, Application };

    ProviderError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return kind_ == Kind::Transport; }

private:
    Kind kind_;
};

inline ProviderError transport_error(const std::string& what) {
    return ProviderError(ProviderError::Kind::Transport, what);
}

inline ProviderError application_error(const std::string& what) {
    return ProviderError(ProviderError::Kind::Application, what);
}

/// A replayed request did not match the recorded digest.  Never swallowed by
/// agent fallbacks: it propagates out of run_session.
class ReplayMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or incomplete configuration (missing provider, bad key, missing
/// interpreter binary).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace agentic
