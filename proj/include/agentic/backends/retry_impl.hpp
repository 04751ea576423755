// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "agentic/errors.hpp"

namespace agentic {

template <typename Fn>
auto with_retry(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
    double delay = policy.base_delay_seconds;
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const ProviderError& e) {
            if (!e.retryable() || attempt >= policy.max_retries) throw;
        }
        if (delay > 0.0) {
            if (policy.sleep) {
                policy.sleep(delay);
            } else {
                sleep_seconds(delay);
            }
        }
        delay *= 2.0;
    }
}

}  // namespace agentic
