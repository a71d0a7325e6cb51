#include "proofagent/prover.hpp"

#include <sstream>

#include "proofagent/coqtop_session.hpp"
#include "proofagent/mock_prover.hpp"
#include "proofagent/sanitize.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

void ProverConfig::validate() const {
  if (sentence_timeout.count() <= 0) {
    throw std::invalid_argument("per-sentence timeout must be positive");
  }
  for (const auto& p : prelude_files) {
    auto resolved = p.is_relative() && !working_directory.empty() ? working_directory / p : p;
    if (!std::filesystem::exists(resolved)) {
      throw std::invalid_argument("prelude file does not exist: " + resolved.string());
    }
  }
}

std::vector<std::string> GoalState::hypothesis_lines() const {
  std::vector<std::string> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) out.push_back(join(h.names, ", ") + " : " + h.statement);
  return out;
}

std::string GoalState::render() const {
  std::string out;
  for (const auto& line : hypothesis_lines()) out += line + "\n";
  out += "============================\n";
  out += conclusion;
  return out;
}

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::Search: return "Search";
    case QueryKind::Print: return "Print";
    case QueryKind::Locate: return "Locate";
    case QueryKind::About: return "About";
    case QueryKind::Check: return "Check";
  }
  return "?";
}

std::optional<QueryKind> query_kind_from_string(std::string_view s) {
  for (auto k : kAllQueryKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ProverErrorKind k) {
  switch (k) {
    case ProverErrorKind::ProcessSpawnFailure: return "ProcessSpawnFailure";
    case ProverErrorKind::CompilationFailure: return "CompilationFailure";
    case ProverErrorKind::LemmaNotFound: return "LemmaNotFound";
    case ProverErrorKind::SanitizationRejected: return "SanitizationRejected";
    case ProverErrorKind::SentenceTimeout: return "SentenceTimeout";
    case ProverErrorKind::SessionDead: return "SessionDead";
    case ProverErrorKind::QueryRejected: return "QueryRejected";
    case ProverErrorKind::RollbackTooDeep: return "RollbackTooDeep";
    case ProverErrorKind::ReplyMismatch: return "ReplyMismatch";
  }
  return "?";
}

namespace {

// "name: statement" or "name : statement" with a plain identifier head.
std::optional<QueryEntry> parse_named_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_ident_char(line[i])) ++i;
  if (i == 0) return std::nullopt;
  std::size_t j = i;
  while (j < line.size() && line[j] == ' ') ++j;
  if (j >= line.size() || line[j] != ':' || (j + 1 < line.size() && line[j + 1] == '=')) {
    return std::nullopt;
  }
  return QueryEntry{std::string(line.substr(0, i)), trim(line.substr(j + 1))};
}

QueryEntry parse_block(const std::vector<std::string>& lines) {
  if (auto e = parse_named_line(lines.front())) {
    for (std::size_t i = 1; i < lines.size(); ++i) e->statement += " " + trim(lines[i]);
    e->statement = collapse_whitespace(e->statement);
    return *e;
  }
  // "term\n     : type" (Check / Print layout)
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto t = trim(lines[i]);
    if (!t.empty() && t.front() == ':' && (t.size() == 1 || t[1] != '=')) {
      std::string name;
      for (std::size_t k = 0; k < i; ++k) name += (k ? " " : "") + trim(lines[k]);
      std::string stmt = trim(t.substr(1));
      for (std::size_t k = i + 1; k < lines.size(); ++k) stmt += " " + trim(lines[k]);
      return QueryEntry{collapse_whitespace(name), collapse_whitespace(stmt)};
    }
  }
  std::string rest;
  for (std::size_t i = 1; i < lines.size(); ++i) rest += (i > 1 ? " " : "") + trim(lines[i]);
  auto head = trim(lines.front());
  return QueryEntry{head, rest.empty() ? head : collapse_whitespace(rest)};
}

}  // namespace

std::vector<QueryEntry> split_query_output(std::string_view raw) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> cur;
  std::istringstream in{std::string(raw)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      if (!cur.empty()) blocks.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    // a new column-0 "name: ..." line starts a record even without a blank line
    bool column0 = !line.empty() && line.front() != ' ' && line.front() != '\t';
    if (column0 && !cur.empty() && parse_named_line(line) && parse_named_line(cur.front())) {
      blocks.push_back(std::move(cur));
      cur.clear();
    }
    cur.push_back(line);
  }
  if (!cur.empty()) blocks.push_back(std::move(cur));

  std::vector<QueryEntry> out;
  for (const auto& b : blocks) {
    if (out.size() == kQueryResultCap) break;
    out.push_back(parse_block(b));
  }
  if (out.empty() && !trim(raw).empty()) out.push_back({trim(raw), trim(raw)});
  return out;
}

ProverSession::ProverSession(std::shared_ptr<Transcript> transcript)
    : transcript_(transcript ? std::move(transcript) : std::make_shared<Transcript>()) {}

void ProverSession::set_initial_goal(GoalState goal) {
  goal.goal_id = "0";
  initial_ = goal;
  current_ = {std::move(goal)};
}

void ProverSession::require_open() const {
  if (closed_) throw ProverError(ProverErrorKind::SessionDead, "session is closed");
}

ProverReply ProverSession::apply_tactic(std::string_view tactic) {
  require_open();
  auto sentence = trim(tactic);
  if (auto why = sanitization_violation(sentence)) {
    transcript_->append("note", "rejected before sending: " + *why + "\n" + sentence);
    throw ProverError(ProverErrorKind::SanitizationRejected, *why);
  }
  transcript_->append("send", sentence);
  TacticOutcome outcome;
  try {
    outcome = send_tactic(sentence);
  } catch (const ProverError& e) {
    transcript_->append("reply", std::string("error ") + std::string(to_string(e.kind())) +
                                     ": " + e.what());
    if (e.kind() == ProverErrorKind::SessionDead) closed_ = true;
    throw;
  }

  if (auto* f = std::get_if<Failure>(&outcome)) {
    transcript_->append("reply", "failure\n" + f->raw);
    return *f;
  }

  auto before = current_;
  if (auto* q = std::get_if<QedOutcome>(&outcome)) {
    transcript_->append("reply", "no goals\n" + q->raw);
    history_.push_back(std::move(before));
    current_.clear();
    return QedReply{};
  }

  auto& goals = std::get<GoalsOutcome>(outcome);
  transcript_->append("reply", goals.raw);
  const std::size_t n = before.size();
  const std::size_t m = goals.goals.size();
  std::vector<GoalState> next = std::move(goals.goals);
  if (n == 0 && m > 0) {
    throw ProverError(ProverErrorKind::ReplyMismatch, "prover reported goals after the proof was done");
  }
  if (is_structure_marker(sentence) && m == n) {
    for (std::size_t i = 0; i < m; ++i) next[i].goal_id = before[i].goal_id;
  } else if (n > 0 && m + 1 >= n) {
    const std::size_t k = m + 1 - n;
    for (std::size_t i = 0; i < k; ++i) next[i].goal_id = before[0].goal_id + "." + std::to_string(i);
    for (std::size_t i = k; i < m; ++i) next[i].goal_id = before[i - k + 1].goal_id;
  } else {
    // closed several goals at once: keep the ids of the surviving tail
    for (std::size_t i = 0; i < m; ++i) next[i].goal_id = before[n - m + i].goal_id;
  }
  history_.push_back(std::move(before));
  current_ = next;
  if (current_.empty()) return QedReply{};
  return Advanced{std::move(next)};
}

QueryResult ProverSession::run_query(QueryKind kind, std::string_view argument) {
  require_open();
  auto arg = trim(argument);
  while (!arg.empty() && arg.back() == '.') arg = trim(arg.substr(0, arg.size() - 1));
  if (arg.empty()) throw ProverError(ProverErrorKind::QueryRejected, "empty query argument");
  std::string sentence = std::string(to_string(kind)) + " " + arg + ".";
  if (auto w = forbidden_word(sentence)) {
    throw ProverError(ProverErrorKind::QueryRejected, *w);
  }
  std::string rest;
  if (split_sentences(sentence, &rest).size() != 1 || !rest.empty() ||
      !balanced(strip_comments(arg))) {
    throw ProverError(ProverErrorKind::QueryRejected, "malformed query: " + sentence);
  }
  transcript_->append("query", sentence);
  std::string raw;
  try {
    raw = send_query(sentence);
  } catch (const ProverError& e) {
    transcript_->append("query-reply", std::string("error: ") + e.what());
    throw;
  }
  transcript_->append("query-reply", raw);
  return QueryResult{split_query_output(raw), raw};
}

GoalState ProverSession::rollback(std::size_t n) {
  require_open();
  if (n == 0 || n > history_.size()) {
    throw ProverError(ProverErrorKind::RollbackTooDeep,
                      "cannot roll back " + std::to_string(n) + " of " +
                          std::to_string(history_.size()) + " applied sentences");
  }
  transcript_->append("note", "rollback " + std::to_string(n));
  send_undo(n);
  current_ = history_[history_.size() - n];
  history_.resize(history_.size() - n);
  return current_.empty() ? GoalState{} : current_.front();
}

std::optional<Failure> ProverSession::finish_proof() {
  require_open();
  transcript_->append("send", "Qed.");
  auto f = send_qed();
  transcript_->append("reply", f ? "failure\n" + f->raw : std::string("accepted"));
  return f;
}

void ProverSession::close() {
  if (closed_) return;
  closed_ = true;
  terminate();
}

std::vector<GoalState> ProverSession::goals() const { return current_; }

std::string ProverSession::printed_goals() const {
  if (current_.empty()) return "No more goals.";
  std::string out;
  for (const auto& g : current_) {
    if (!out.empty()) out += "\n\n";
    out += "goal " + g.goal_id + ":\n" + g.render();
  }
  return out;
}

std::shared_ptr<ProverFactory> make_prover_factory(const ProverConfig& config) {
  if (config.executable_path == kMockProverPath) return std::make_shared<MockProverFactory>();
  return std::make_shared<CoqtopFactory>();
}

ReplayVerdict replay_script(const ProverFactory& factory, const ProverConfig& config,
                            std::string_view lemma_source, std::string_view lemma_name,
                            const std::vector<std::string>& script,
                            std::shared_ptr<Transcript> transcript) {
  if (script.empty()) return RejectedAt{0, "empty proof script"};
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (auto why = sanitization_violation(script[i])) {
      return RejectedAt{i, "SanitizationRejected: " + *why};
    }
  }
  auto session = factory.start(config, lemma_source, lemma_name, std::move(transcript));
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      auto reply = session->apply_tactic(script[i]);
      if (auto* f = std::get_if<Failure>(&reply)) {
        session->close();
        return RejectedAt{i, f->message};
      }
    } catch (const ProverError& e) {
      session->close();
      return RejectedAt{i, std::string(to_string(e.kind())) + ": " + e.what()};
    }
  }
  if (!session->goals().empty()) {
    auto n = session->goals().size();
    session->close();
    return RejectedAt{script.size(), "proof incomplete: " + std::to_string(n) + " goal(s) remain"};
  }
  auto qed = session->finish_proof();
  session->close();
  if (qed) return RejectedAt{script.size(), qed->message};
  return Verified{};
}

}  // namespace proofagent
