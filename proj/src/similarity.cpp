#include "proofagent/similarity.hpp"

#include <algorithm>
#include <numeric>

#include "proofagent/text.hpp"

namespace proofagent {

TokenSet make_token_set(std::string_view text) {
  auto toks = identifier_tokens(text);
  std::sort(toks.begin(), toks.end());
  toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
  return toks;
}

std::size_t overlap_count(const TokenSet& a, const TokenSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::vector<std::size_t> overlap_scores_serial(const TokenSet& query, const std::vector<TokenSet>& candidates) {
  std::vector<std::size_t> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = overlap_count(query, candidates[i]);
  return out;
}

std::vector<std::size_t> overlap_scores(const TokenSet& query, const std::vector<TokenSet>& candidates) {
  const auto n = static_cast<long>(candidates.size());
  std::vector<std::size_t> out(candidates.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = overlap_count(query, candidates[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<std::size_t> rank_top_k(const std::vector<std::size_t>& scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto better = [&scores](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a > b;
  };
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

}  // namespace proofagent
