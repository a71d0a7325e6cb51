#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "proofagent/transcript.hpp"

namespace proofagent {

/// Selects the in-memory mock prover when used as `executable_path`.
inline constexpr std::string_view kMockProverPath = "mock";

struct ProverConfig {
  std::string executable_path = "coqtop";
  std::vector<std::filesystem::path> prelude_files;
  std::chrono::duration<double> sentence_timeout{60.0};
  std::filesystem::path working_directory;
  std::vector<std::string> extra_args;

  /// Throws std::invalid_argument on a non-positive timeout or a missing
  /// prelude file.
  void validate() const;
};

struct Hypothesis {
  std::vector<std::string> names;
  std::string statement;

  bool operator==(const Hypothesis&) const = default;
};

struct GoalState {
  std::vector<Hypothesis> hypotheses;
  std::string conclusion;
  std::string goal_id;

  /// Prover-style text: one "names : statement" line per hypothesis, a
  /// separator rule, then the conclusion.
  std::string render() const;
  std::vector<std::string> hypothesis_lines() const;

  bool operator==(const GoalState&) const = default;
};

struct Advanced {
  std::vector<GoalState> open_goals;
};
struct QedReply {};
struct Failure {
  std::string message;
  std::string raw;
};

using ProverReply = std::variant<Advanced, QedReply, Failure>;

inline bool is_failure(const ProverReply& r) { return std::holds_alternative<Failure>(r); }

enum class QueryKind { Search, Print, Locate, About, Check };

std::string_view to_string(QueryKind k);
std::optional<QueryKind> query_kind_from_string(std::string_view s);
inline constexpr QueryKind kAllQueryKinds[] = {QueryKind::Search, QueryKind::Print,
                                               QueryKind::Locate, QueryKind::About,
                                               QueryKind::Check};

struct QueryEntry {
  std::string name;
  std::string statement;

  bool operator==(const QueryEntry&) const = default;
};

inline constexpr std::size_t kQueryResultCap = 50;

struct QueryResult {
  std::vector<QueryEntry> entries;
  std::string raw;
};

/// Splits raw query output into entries on blank-line and column-0
/// "name: statement" record boundaries. Falls back to one entry holding the
/// raw text. Truncated to kQueryResultCap entries in output order.
std::vector<QueryEntry> split_query_output(std::string_view raw);

enum class ProverErrorKind {
  ProcessSpawnFailure,
  CompilationFailure,
  LemmaNotFound,
  SanitizationRejected,
  SentenceTimeout,
  SessionDead,
  QueryRejected,
  RollbackTooDeep,
  ReplyMismatch,
};

std::string_view to_string(ProverErrorKind k);

class ProverError : public std::runtime_error {
 public:
  ProverError(ProverErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ProverErrorKind kind() const { return kind_; }

 private:
  ProverErrorKind kind_;
};

/// A live proof session on one lemma. Single-owner; not thread-safe.
///
/// The public operations enforce the session contract (sanitization,
/// transcript logging, goal identity, rollback bookkeeping); concrete
/// provers implement the protected hooks.
class ProverSession {
 public:
  virtual ~ProverSession() = default;
  ProverSession(const ProverSession&) = delete;
  ProverSession& operator=(const ProverSession&) = delete;

  const GoalState& initial_goal() const { return initial_; }

  ProverReply apply_tactic(std::string_view tactic);
  QueryResult run_query(QueryKind kind, std::string_view argument);
  GoalState rollback(std::size_t n);

  /// Sends the proof-closing command. Returns the prover's failure when it
  /// rejects the proof (e.g. goals remain).
  std::optional<Failure> finish_proof();

  void close();
  bool is_closed() const { return closed_; }

  /// Currently open goals, focused goal first, with session goal ids.
  std::vector<GoalState> goals() const;
  /// Canonical printed form of all open goals.
  std::string printed_goals() const;
  std::size_t applied_count() const { return history_.size(); }

  Transcript& transcript() { return *transcript_; }
  std::shared_ptr<Transcript> transcript_handle() const { return transcript_; }

 protected:
  explicit ProverSession(std::shared_ptr<Transcript> transcript);

  struct GoalsOutcome {
    std::vector<GoalState> goals;  // ids left empty; the base assigns them
    std::string raw;
  };
  struct QedOutcome {
    std::string raw;
  };
  using TacticOutcome = std::variant<GoalsOutcome, QedOutcome, Failure>;

  /// Called once by the concrete constructor after entering proof mode.
  void set_initial_goal(GoalState goal);

  virtual TacticOutcome send_tactic(const std::string& sentence) = 0;
  /// Returns raw output; throws ProverError(QueryRejected) on prover errors.
  virtual std::string send_query(const std::string& sentence) = 0;
  virtual void send_undo(std::size_t n) = 0;
  virtual std::optional<Failure> send_qed() = 0;
  virtual void terminate() noexcept = 0;

 private:
  void require_open() const;

  std::shared_ptr<Transcript> transcript_;
  GoalState initial_;
  std::vector<GoalState> current_;
  std::vector<std::vector<GoalState>> history_;  // goal lists before each applied sentence
  bool closed_ = false;
};

/// Starts sessions for one kind of prover.
class ProverFactory {
 public:
  virtual ~ProverFactory() = default;
  virtual std::unique_ptr<ProverSession> start(const ProverConfig& config,
                                               std::string_view lemma_source,
                                               std::string_view lemma_name,
                                               std::shared_ptr<Transcript> transcript) const = 0;
};

/// Mock factory with default options when `executable_path` is "mock",
/// otherwise a coqtop REPL factory.
std::shared_ptr<ProverFactory> make_prover_factory(const ProverConfig& config);

struct Verified {};
struct RejectedAt {
  std::size_t index;
  std::string message;
};
using ReplayVerdict = std::variant<Verified, RejectedAt>;

/// Checks a proof script on a fresh session: every sentence must pass
/// sanitization and apply, and the proof must close. Spawn and compilation
/// errors propagate as ProverError.
ReplayVerdict replay_script(const ProverFactory& factory, const ProverConfig& config,
                            std::string_view lemma_source, std::string_view lemma_name,
                            const std::vector<std::string>& script,
                            std::shared_ptr<Transcript> transcript = nullptr);

}  // namespace proofagent
