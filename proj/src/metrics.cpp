// SPDX-License-Identifier: Apache-2.0
#include "agentic/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "agentic/errors.hpp"
#include "agentic/text.hpp"

namespace agentic::eval {

std::vector<std::string> metric_tokens(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        auto uc = static_cast<unsigned char>(c);
        cleaned.push_back(std::ispunct(uc) ? ' ' : static_cast<char>(std::tolower(uc)));
    }
    return text::split_whitespace(cleaned);
}

namespace {

Prf from_counts(double overlap, double candidate, double reference) {
    Prf r;
    if (candidate == 0 || reference == 0 || overlap == 0) return r;
    r.precision = overlap / candidate;
    r.recall = overlap / reference;
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

std::map<std::vector<std::string>, int> ngrams(const std::vector<std::string>& tokens, int n) {
    std::map<std::vector<std::string>, int> out;
    if (tokens.size() < static_cast<std::size_t>(n)) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++out[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    }
    return out;
}

}  // namespace

Prf rouge_n(std::string_view candidate, std::string_view reference, int n) {
    if (n < 1) throw PreconditionError("rouge_n needs n >= 1");
    auto c = ngrams(metric_tokens(candidate), n);
    auto r = ngrams(metric_tokens(reference), n);
    double c_total = 0, r_total = 0, overlap = 0;
    for (const auto& [g, k] : c) c_total += k;
    for (const auto& [g, k] : r) {
        r_total += k;
        if (auto it = c.find(g); it != c.end()) overlap += std::min(k, it->second);
    }
    return from_counts(overlap, c_total, r_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

Prf rouge_l(std::string_view candidate, std::string_view reference) {
    auto c = metric_tokens(candidate);
    auto r = metric_tokens(reference);
    return from_counts(static_cast<double>(lcs_length(c, r)), static_cast<double>(c.size()),
                       static_cast<double>(r.size()));
}

double entity_recall(std::string_view candidate, std::span<const std::string> gold_entities) {
    if (gold_entities.empty()) throw PreconditionError("entity_recall needs at least one gold entity");
    auto haystack = text::lower(text::normalize_whitespace(candidate));
    std::size_t found = 0;
    for (const auto& entity : gold_entities) {
        auto needle = text::lower(text::normalize_whitespace(entity));
        if (!needle.empty() && haystack.find(needle) != std::string::npos) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(gold_entities.size());
}

std::optional<char> extract_choice(std::string_view prediction) {
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = prediction.size(); i-- > 0;) {
        char c = prediction[i];
        if (c < 'A' || c > 'E') continue;
        bool left = i == 0 || !alnum(prediction[i - 1]);
        bool right = i + 1 == prediction.size() || !alnum(prediction[i + 1]);
        if (left && right) return c;
    }
    static const std::regex answer_form(R"(answer\s*(?:is)?\s*[:=]?\s*\(?([a-e])\)?(?![a-z0-9]))", std::regex::icase);
    std::string s(prediction);
    std::optional<char> last;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), answer_form); it != std::sregex_iterator(); ++it) {
        last = static_cast<char>(std::toupper(static_cast<unsigned char>((*it)[1].str()[0])));
    }
    return last;
}

}  // namespace agentic::eval
