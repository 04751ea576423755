// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agentic::eval {

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Case-folded tokens; ASCII punctuation acts as a separator.
std::vector<std::string> metric_tokens(std::string_view text);

/// Clipped n-gram overlap.  Empty candidate or reference (or no n-grams) is
/// all zeros.  Throws PreconditionError for n < 1.
Prf rouge_n(std::string_view candidate, std::string_view reference, int n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

Prf rouge_l(std::string_view candidate, std::string_view reference);

/// Fraction of gold entities found, case-insensitively and after whitespace
/// normalization, as substrings of the candidate.  Throws PreconditionError
/// on an empty gold list.
double entity_recall(std::string_view candidate, std::span<const std::string> gold_entities);

/// Last standalone capital A-E; otherwise an "Answer: x" form.
std::optional<char> extract_choice(std::string_view prediction);

}  // namespace agentic::eval
