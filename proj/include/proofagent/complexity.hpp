#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace proofagent {

struct LemmaComplexity {
  std::size_t term_count = 0;
  std::size_t hypothesis_count = 0;
  bool operator==(const LemmaComplexity&) const = default;
};

/// Tokens counted as terms: identifiers (quantifier keywords and qualified
/// names included), numeric literals with an attached %scope, and runs of
/// operator symbols. Punctuation ( ) , : ; [ ] { } and bare %scope are
/// dropped.
std::vector<std::string> term_tokens(std::string_view statement);

/// Binders with an operator-bearing type in each quantifier prefix plus
/// top-level implication antecedents.
std::size_t hypothesis_count(std::string_view statement);

/// Throws std::invalid_argument on an empty statement.
LemmaComplexity measure(std::string_view statement);

/// Bucket index for `value` given ascending edges: [0,e1] is 0,
/// (e1,e2] is 1, ..., (en,inf) is n.
std::size_t bucket_of(std::size_t value, const std::vector<std::size_t>& edges);
std::string bucket_label(std::size_t index, const std::vector<std::size_t>& edges);

}  // namespace proofagent
