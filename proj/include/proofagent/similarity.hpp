#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace proofagent {

/// Sorted, deduplicated identifier tokens (same tokenizer as
/// identifier_tokens).
using TokenSet = std::vector<std::string>;

TokenSet make_token_set(std::string_view text);

std::size_t overlap_count(const TokenSet& a, const TokenSet& b);

/// Overlap of `query` with each candidate. The serial version is the
/// reference the parallel kernel is tested against.
std::vector<std::size_t> overlap_scores_serial(const TokenSet& query, const std::vector<TokenSet>& candidates);
std::vector<std::size_t> overlap_scores(const TokenSet& query, const std::vector<TokenSet>& candidates);

/// Indices of the best `k` scores: higher score first, ties to the higher
/// index (the more recent candidate).
std::vector<std::size_t> rank_top_k(const std::vector<std::size_t>& scores, std::size_t k);

}  // namespace proofagent
