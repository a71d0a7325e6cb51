#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "proofagent/prover.hpp"

namespace proofagent {

struct StepRecord {
  std::string theorem_name;
  std::size_t tactic_id = 0;
  std::string tactic;
  std::string goal_before;
  std::string goal_after;
  std::vector<std::string> hypotheses_before;
  std::vector<std::string> hypotheses_added;
  std::vector<std::string> hypotheses_removed;

  /// Compact form used as a prompt snippet.
  std::string render() const;

  bool operator==(const StepRecord&) const = default;
};

enum class HistoryErrorKind { DuplicateTheorem, InvalidSteps, StorageFailure, SchemaViolation };

class HistoryError : public std::runtime_error {
 public:
  HistoryError(HistoryErrorKind kind, const std::string& what, long record_index = -1)
      : std::runtime_error(what), kind_(kind), record_index_(record_index) {}
  HistoryErrorKind kind() const { return kind_; }
  /// Offending record for SchemaViolation; -1 when the document itself is
  /// malformed.
  long record_index() const { return record_index_; }

 private:
  HistoryErrorKind kind_;
  long record_index_;
};

/// Hypothesis delta between two goal displays, as "names : statement" lines.
StepRecord make_step_record(const std::string& theorem, std::size_t tactic_id, const std::string& tactic,
                            const GoalState& before, const std::vector<GoalState>& after);

/// JSON-backed store of steps from proved lemmas. Readers may run
/// concurrently; writes take an exclusive lock and flush atomically.
class HistoryDB {
 public:
  explicit HistoryDB(std::filesystem::path storage_path = {});

  /// Missing file gives an empty database.
  static HistoryDB load(const std::filesystem::path& path);

  /// Appends the steps (tactic ids 0..n-1, in order) and flushes.
  void record_proof(const std::string& theorem, const std::vector<StepRecord>& steps);

  /// Up to `k` records ranked by identifier overlap between goal-before and
  /// the goal's conclusion; ties go to the later record.
  std::vector<StepRecord> top_k_similar(const GoalState& goal, std::size_t k = 5) const;

  void save() const;
  void clear();

  std::vector<StepRecord> records() const;
  std::vector<StepRecord> steps_for(const std::string& theorem) const;
  std::vector<std::pair<std::string, std::size_t>> theorem_summary() const;
  bool has_theorem(const std::string& theorem) const;
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

  /// Validates a history document.
  static std::vector<StepRecord> parse_document(const std::string& text);
  static std::string to_document(const std::vector<StepRecord>& records);

 private:
  void save_locked() const;

  std::filesystem::path path_;
  std::vector<StepRecord> records_;
  std::unique_ptr<std::shared_mutex> mu_;
};

}  // namespace proofagent
