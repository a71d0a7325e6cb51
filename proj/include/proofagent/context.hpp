#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "proofagent/prover.hpp"

namespace proofagent {

enum class ContextKind { Lemma, Definition, Other };

std::string_view to_string(ContextKind k);

struct ContextItem {
  std::string name;
  std::string statement;
  ContextKind kind = ContextKind::Other;
  QueryKind source_kind = QueryKind::Search;
  std::string source_argument;
  std::size_t retrieved_at_step = 0;

  /// "name : statement", as placed in prompts.
  std::string render() const;
};

inline constexpr std::size_t kDefaultContextCapacity = 50;

/// Declarations retrieved by queries during one run.
class ContextSet {
 public:
  explicit ContextSet(std::size_t capacity = kDefaultContextCapacity);

  /// Adds the result's entries not already present (same name and
  /// statement). Returns how many were new. Over capacity, the oldest items
  /// that were not part of the last selection are evicted first.
  std::size_t ingest(QueryKind kind, const std::string& argument, const QueryResult& result, std::size_t step);

  /// Items ranked by identifier overlap with the goal (ties: most recent
  /// first), longest prefix whose rendering fits in `budget` characters
  /// (one line per item).
  std::vector<ContextItem> select_for_prompt(const GoalState& goal, std::size_t budget);

  const std::vector<ContextItem>& items() const { return items_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }

 private:
  void evict();

  std::size_t capacity_;
  std::vector<ContextItem> items_;
  std::set<std::pair<std::string, std::string>> last_selected_;
};

}  // namespace proofagent
