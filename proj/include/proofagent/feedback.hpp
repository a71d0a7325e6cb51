#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "proofagent/proof_tree.hpp"

namespace proofagent {

enum class ErrorClass { UnknownReference, TypeMismatch, TacticFailure, SyntaxError, Timeout, Other };

std::string_view to_string(ErrorClass c);
ErrorClass classify_error(std::string_view message);

/// Lowercased, locations removed, quoted terms longer than 30 characters
/// replaced by a placeholder, whitespace collapsed.
std::string normalize_error(std::string_view message);

struct ErrorRecord {
  NodeId node;
  std::string tactic;
  std::string message;
  std::string normalized_message;
  std::size_t attempt_index = 1;  // 1-based, per node
  std::size_t step = 0;
};

struct Thresholds {
  std::size_t same_error_before_search = 3;
  std::size_t max_attempts_per_node = 25;
  std::size_t max_total_steps = 150;
  std::chrono::duration<double> wall_clock_budget{600.0};

  /// Throws std::invalid_argument when a value is zero/non-positive or the
  /// search threshold exceeds the per-node cap.
  void validate() const;
};

enum class AbortReason { StepBudget, TimeBudget, NodeAttemptCap };
std::string_view to_string(AbortReason r);

struct Refine {
  ErrorRecord error;
};
struct SearchContext {
  std::vector<ErrorRecord> recent_failures;
};
struct Abort {
  AbortReason reason;
  std::string detail;
};
using Directive = std::variant<Refine, SearchContext, Abort>;

std::string describe(const Directive& d);

/// Per-run failure bookkeeping. Streaks and attempt counts are kept per
/// proof-tree node; once an Abort is issued every later call returns it.
class FeedbackController {
 public:
  explicit FeedbackController(Thresholds thresholds = {});

  /// Builds the record for a failed attempt at `node`; counts the attempt.
  ErrorRecord record_failure(const NodeId& node, const std::string& tactic, const std::string& message,
                             std::size_t step);
  Directive on_failure(const ErrorRecord& record);

  /// A successful tactic at `node` counts as an attempt and ends its streak.
  void on_success(const NodeId& node);
  /// A context query was issued for `node`; its streak restarts.
  void on_search_issued(const NodeId& node);

  std::optional<Abort> check_budgets(std::size_t steps, std::chrono::duration<double> elapsed);

  std::size_t attempts_at(const NodeId& node) const;
  std::size_t streak_at(const NodeId& node) const;
  const std::optional<Abort>& aborted() const { return abort_; }
  const Thresholds& thresholds() const { return thresholds_; }

 private:
  struct NodeWindow {
    std::size_t attempts = 0;
    std::vector<ErrorRecord> streak;  // consecutive equal normalized messages
  };

  Thresholds thresholds_;
  std::map<NodeId, NodeWindow> windows_;
  std::optional<Abort> abort_;
};

}  // namespace proofagent
