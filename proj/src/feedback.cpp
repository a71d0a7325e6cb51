#include "proofagent/feedback.hpp"

#include <regex>
#include <sstream>
#include <stdexcept>

#include "proofagent/text.hpp"

namespace proofagent {

std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::UnknownReference: return "UnknownReference";
    case ErrorClass::TypeMismatch: return "TypeMismatch";
    case ErrorClass::TacticFailure: return "TacticFailure";
    case ErrorClass::SyntaxError: return "SyntaxError";
    case ErrorClass::Timeout: return "Timeout";
    case ErrorClass::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(AbortReason r) {
  switch (r) {
    case AbortReason::StepBudget: return "StepBudget";
    case AbortReason::TimeBudget: return "TimeBudget";
    case AbortReason::NodeAttemptCap: return "NodeAttemptCap";
  }
  return "?";
}

namespace {

struct Rule {
  ErrorClass cls;
  std::vector<std::string_view> needles;
};

const std::vector<Rule>& rules() {
  static const std::vector<Rule> r = {
      {ErrorClass::Timeout, {"timeout", "timed out"}},
      {ErrorClass::SyntaxError, {"syntax error", "lexer", "illegal begin", "unbalanced"}},
      {ErrorClass::UnknownReference,
       {"was not found in the current environment", "unknown reference", "unbound", "no object of basename",
        "not a defined object"}},
      {ErrorClass::TypeMismatch,
       {"is expected to have type", "has type", "unable to unify", "cannot unify", "type mismatch", "ill-typed",
        "cannot infer"}},
      {ErrorClass::TacticFailure,
       {"tactic failure", "cannot find witness", "no such assumption", "not an inductive", "no product",
        "expects a", "no applicable tactic", "no such goal", "is already used", "incomplete proof",
        "no progress", "failed", "not a declared", "query refused"}},
  };
  return r;
}

}  // namespace

ErrorClass classify_error(std::string_view message) {
  auto m = to_lower(message);
  for (const auto& rule : rules()) {
    for (auto n : rule.needles) {
      if (m.find(n) != std::string::npos) return rule.cls;
    }
  }
  return ErrorClass::Other;
}

std::string normalize_error(std::string_view message) {
  static const std::regex file_loc(R"re(file\s+"[^"]*"\s*,?)re");
  static const std::regex line_loc(R"(\b(line|lines|column|columns|char|chars|characters)\s+\d+(\s*-\s*\d+)?)");
  static const std::regex quoted(R"re("([^"]*)")re");
  auto s = to_lower(message);
  s = std::regex_replace(s, file_loc, " ");
  s = std::regex_replace(s, line_loc, " ");
  std::string out;
  auto begin = std::sregex_iterator(s.begin(), s.end(), quoted);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out += s.substr(last, static_cast<std::size_t>(m.position(0)) - last);
    out += m[1].length() > 30 ? std::string("\"<term>\"") : m.str(0);
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out += s.substr(last);
  // drop punctuation left behind by removed locations ("at , :")
  out = collapse_whitespace(out);
  std::string cleaned;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if ((out[i] == ',' || out[i] == ':') && (cleaned.empty() || cleaned.back() == ' ' || cleaned.back() == ',')) {
      continue;
    }
    cleaned += out[i];
  }
  return collapse_whitespace(cleaned);
}

void Thresholds::validate() const {
  if (same_error_before_search == 0 || max_attempts_per_node == 0 || max_total_steps == 0) {
    throw std::invalid_argument("thresholds must be positive");
  }
  if (wall_clock_budget.count() <= 0) throw std::invalid_argument("wall-clock budget must be positive");
  if (same_error_before_search > max_attempts_per_node) {
    throw std::invalid_argument("same-error threshold exceeds the per-node attempt cap");
  }
}

std::string describe(const Directive& d) {
  std::ostringstream out;
  if (const auto* r = std::get_if<Refine>(&d)) {
    out << "Refine node=" << node_label(r->error.node) << " attempt=" << r->error.attempt_index;
  } else if (const auto* s = std::get_if<SearchContext>(&d)) {
    out << "SearchContext failures=" << s->recent_failures.size();
    if (!s->recent_failures.empty()) out << " node=" << node_label(s->recent_failures.back().node);
  } else {
    const auto& a = std::get<Abort>(d);
    out << "Abort " << to_string(a.reason) << ": " << a.detail;
  }
  return out.str();
}

FeedbackController::FeedbackController(Thresholds thresholds) : thresholds_(thresholds) {
  thresholds_.validate();
}

ErrorRecord FeedbackController::record_failure(const NodeId& node, const std::string& tactic,
                                               const std::string& message, std::size_t step) {
  auto& w = windows_[node];
  ++w.attempts;
  return ErrorRecord{node, tactic, message, normalize_error(message), w.attempts, step};
}

Directive FeedbackController::on_failure(const ErrorRecord& record) {
  if (abort_) return *abort_;
  auto& w = windows_[record.node];
  if (!w.streak.empty() && w.streak.back().normalized_message != record.normalized_message) w.streak.clear();
  w.streak.push_back(record);
  if (w.attempts >= thresholds_.max_attempts_per_node) {
    abort_ = Abort{AbortReason::NodeAttemptCap,
                   std::to_string(w.attempts) + " attempts at node " + node_label(record.node)};
    return *abort_;
  }
  if (w.streak.size() >= thresholds_.same_error_before_search) return SearchContext{w.streak};
  return Refine{record};
}

void FeedbackController::on_success(const NodeId& node) {
  auto& w = windows_[node];
  ++w.attempts;
  w.streak.clear();
}

void FeedbackController::on_search_issued(const NodeId& node) { windows_[node].streak.clear(); }

std::optional<Abort> FeedbackController::check_budgets(std::size_t steps, std::chrono::duration<double> elapsed) {
  if (abort_) return abort_;
  if (steps >= thresholds_.max_total_steps) {
    abort_ = Abort{AbortReason::StepBudget,
                   std::to_string(steps) + "/" + std::to_string(thresholds_.max_total_steps) + " steps"};
  } else if (elapsed > thresholds_.wall_clock_budget) {
    std::ostringstream d;
    d << elapsed.count() << " s elapsed, budget " << thresholds_.wall_clock_budget.count() << " s";
    abort_ = Abort{AbortReason::TimeBudget, d.str()};
  }
  return abort_;
}

std::size_t FeedbackController::attempts_at(const NodeId& node) const {
  auto it = windows_.find(node);
  return it == windows_.end() ? 0 : it->second.attempts;
}

std::size_t FeedbackController::streak_at(const NodeId& node) const {
  auto it = windows_.find(node);
  return it == windows_.end() ? 0 : it->second.streak.size();
}

}  // namespace proofagent
