#include "proofagent/context.hpp"

#include <algorithm>
#include <stdexcept>

#include "proofagent/similarity.hpp"

namespace proofagent {

std::string_view to_string(ContextKind k) {
  switch (k) {
    case ContextKind::Lemma: return "Lemma";
    case ContextKind::Definition: return "Definition";
    case ContextKind::Other: return "Other";
  }
  return "?";
}

std::string ContextItem::render() const { return name + " : " + statement; }

namespace {

ContextKind guess_kind(QueryKind source, const QueryEntry& e) {
  if (source == QueryKind::Print) return ContextKind::Definition;
  if (source == QueryKind::Locate) return ContextKind::Other;
  const auto& s = e.statement;
  bool prop = s.find("forall") != std::string::npos || s.find("<=") != std::string::npos ||
              s.find('=') != std::string::npos || s.find('<') != std::string::npos ||
              s.find("->") != std::string::npos;
  return prop ? ContextKind::Lemma : ContextKind::Other;
}

}  // namespace

ContextSet::ContextSet(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("context capacity must be positive");
}

std::size_t ContextSet::ingest(QueryKind kind, const std::string& argument, const QueryResult& result,
                               std::size_t step) {
  std::size_t added = 0;
  for (const auto& e : result.entries) {
    if (e.name.empty()) continue;
    bool dup = std::any_of(items_.begin(), items_.end(), [&e](const ContextItem& it) {
      return it.name == e.name && it.statement == e.statement;
    });
    if (dup) continue;
    items_.push_back({e.name, e.statement, guess_kind(kind, e), kind, argument, step});
    ++added;
  }
  evict();
  return added;
}

void ContextSet::evict() {
  while (items_.size() > capacity_) {
    auto victim = items_.end();
    for (auto it = items_.begin(); it != items_.end(); ++it) {
      if (last_selected_.count({it->name, it->statement}) != 0) continue;
      if (victim == items_.end() || it->retrieved_at_step < victim->retrieved_at_step) victim = it;
    }
    if (victim == items_.end()) victim = items_.begin();
    items_.erase(victim);
  }
}

std::vector<ContextItem> ContextSet::select_for_prompt(const GoalState& goal, std::size_t budget) {
  std::string goal_text = goal.conclusion;
  for (const auto& h : goal.hypotheses) goal_text += " " + h.statement;
  auto query = make_token_set(goal_text);
  std::vector<TokenSet> candidates;
  candidates.reserve(items_.size());
  for (const auto& it : items_) candidates.push_back(make_token_set(it.name + " " + it.statement));
  auto order = rank_top_k(overlap_scores(query, candidates), items_.size());

  std::vector<ContextItem> out;
  std::size_t used = 0;
  for (auto i : order) {
    std::size_t cost = items_[i].render().size() + 1;
    if (used + cost > budget) break;
    used += cost;
    out.push_back(items_[i]);
  }
  last_selected_.clear();
  for (const auto& it : out) last_selected_.insert({it.name, it.statement});
  return out;
}

}  // namespace proofagent
