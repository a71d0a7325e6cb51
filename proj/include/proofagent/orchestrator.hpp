#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "proofagent/feedback.hpp"
#include "proofagent/gateway.hpp"
#include "proofagent/history.hpp"
#include "proofagent/proof_tree.hpp"
#include "proofagent/prover.hpp"

namespace proofagent {

struct RunConfig {
  ProverConfig prover;
  GenerationConfig generation;
  Thresholds thresholds;
  std::filesystem::path history_path = "proof-history.json";
  bool history_enabled = true;
  std::filesystem::path audit_dir = "audit";
  /// Consecutive queries after which the next prompt demands a tactic.
  std::size_t query_streak_limit = 3;
  std::size_t prompt_budget = kPromptBudget;
  std::size_t context_capacity = kDefaultContextCapacity;
};

struct RunStats {
  std::size_t total_attempts = 0;
  std::size_t failed_attempts = 0;
  std::size_t queries_issued = 0;
  std::chrono::duration<double> wall_time{0.0};
  std::size_t proof_steps = 0;
};

enum class FailureReason { StepBudget, TimeBudget, NodeAttemptCap, BackendUnavailable, ProverError, GiveUp };
std::string_view to_string(FailureReason r);

struct Proved {
  ProofScript script;
  ProofTree tree;
  RunStats stats;
};

struct Failed {
  FailureReason reason;
  std::string detail;
  RunStats stats;
  std::optional<ProofTree> tree;  // absent when the session never started
};

/// Size facts about one prompt sent during a run.
struct PromptRecord {
  PromptMode mode;
  bool tactic_required;
  std::size_t history_snippets;
  std::size_t context_items;
  std::size_t rendered_size;
};

struct RunResult {
  std::string lemma_name;
  std::variant<Proved, Failed> outcome;
  std::shared_ptr<Transcript> transcript;
  std::vector<PromptRecord> prompts;
  std::vector<std::string> directives;

  bool proved() const { return std::holds_alternative<Proved>(outcome); }
  const RunStats& stats() const;
  const ProofTree* tree() const;
};

/// Runs the agent loop on one lemma. Never throws for run-level failures;
/// they come back as Failed. `history` may be null (no history reads or
/// writes regardless of config.history_enabled).
RunResult prove_lemma(const std::string& lemma_source, const std::string& lemma_name, const RunConfig& config,
                      GenerationBackend& backend, const ProverFactory& factory, HistoryDB* history = nullptr,
                      std::shared_ptr<Transcript> transcript = nullptr);

nlohmann::json stats_document(const RunResult& result);

struct AuditPaths {
  std::filesystem::path tree;
  std::optional<std::filesystem::path> certificate;
  std::filesystem::path stats;
  std::filesystem::path transcript;
};

class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes <lemma>-<timestamp>.{tree.json,v,stats.json,transcript.log} to
/// the audit directory (.v only for proved runs). An empty `timestamp`
/// uses the current UTC time. Throws AuditError (storage failure).
AuditPaths write_audit(const RunResult& result, const RunConfig& config, std::string timestamp = {});

/// Certificate file body for a proof script.
std::string certificate_text(const ProofScript& script);

}  // namespace proofagent
