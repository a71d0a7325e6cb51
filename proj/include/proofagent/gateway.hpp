#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "proofagent/context.hpp"
#include "proofagent/history.hpp"
#include "proofagent/proof_tree.hpp"
#include "proofagent/prover.hpp"
#include "proofagent/transcript.hpp"

namespace proofagent {

struct GenerationConfig {
  std::string model_id = "gpt-4.1";
  double temperature = 0.0;
  int max_output_tokens = 512;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string auth_token_env_var = "OPENAI_API_KEY";

  void validate() const;
};

enum class PromptMode { Analyze, FixError, PersistentError };
std::string_view to_string(PromptMode m);

struct FailedAttempt {
  std::string tactic;
  std::string message;
};

inline constexpr std::size_t kPromptBudget = 12000;
inline constexpr std::size_t kMaxHistorySnippets = 5;
inline constexpr std::size_t kMaxContextItems = 50;

struct PromptBundle {
  PromptMode mode = PromptMode::Analyze;
  std::string lemma_statement;
  std::string tree_rendering;  // outline plus the focused subgoal
  std::vector<std::string> history_snippets;
  std::vector<std::string> context_items;
  std::vector<FailedAttempt> error_feedback;
  std::vector<std::string> recent_failed_tactics;
  bool tactic_required = false;
  std::string instructions;

  /// The complete prompt text sent to the model.
  std::string render() const;
};

enum class GatewayErrorKind { BackendUnavailable, EmptyCompletion, BudgetExceeded };
std::string_view to_string(GatewayErrorKind k);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  GatewayErrorKind kind() const { return kind_; }

 private:
  GatewayErrorKind kind_;
};

/// Assembles a prompt within `budget` characters: the lemma statement
/// first, then tree 40%, context 30%, history 20%, instructions 10% of the
/// remainder. Takes at most 5 history records and 50 context items.
PromptBundle build_prompt(PromptMode mode, const std::string& lemma_statement, const ProofTree& tree,
                          const std::vector<StepRecord>& history, ContextSet& context,
                          const std::vector<FailedAttempt>& errors, bool tactic_required = false,
                          std::size_t budget = kPromptBudget);

struct EmitTactic {
  std::string sentence;
  bool operator==(const EmitTactic&) const = default;
};
struct EmitQuery {
  QueryKind kind;
  std::string argument;
  bool operator==(const EmitQuery&) const = default;
};
struct GiveUp {
  std::string reason;
  std::string text;  // the rejected candidate sentence
  bool operator==(const GiveUp&) const = default;
};
using AgentDecision = std::variant<EmitTactic, EmitQuery, GiveUp>;

/// Total: fences and prose are stripped, the first complete sentence is
/// kept, and anything that is neither a query nor a sanitized tactic
/// becomes GiveUp.
AgentDecision parse_decision(std::string_view raw);

/// Text that parses back to the same decision.
std::string canonical_text(const AgentDecision& d);
std::string describe(const AgentDecision& d);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  /// Raw completion text; throws GatewayError(BackendUnavailable).
  virtual std::string complete(const PromptBundle& bundle, const GenerationConfig& config) = 0;
};

/// Delimiter line between records of a replay fixture.
inline constexpr std::string_view kFixtureDelimiter = "--8<--";

std::vector<std::string> parse_fixture(std::string_view text);
std::string format_fixture(const std::vector<std::string>& completions);

/// Returns recorded completions in order; running out is BackendUnavailable.
class ReplayBackend final : public GenerationBackend {
 public:
  explicit ReplayBackend(std::vector<std::string> completions);
  static std::unique_ptr<ReplayBackend> from_file(const std::filesystem::path& path);

  std::string complete(const PromptBundle& bundle, const GenerationConfig& config) override;
  std::size_t remaining() const { return completions_.size() - next_; }

 private:
  std::vector<std::string> completions_;
  std::size_t next_ = 0;
};

/// Calls a function per request (tests and generated scripts).
class FunctionBackend final : public GenerationBackend {
 public:
  using Fn = std::function<std::string(const PromptBundle&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const PromptBundle& bundle, const GenerationConfig&) override { return fn_(bundle); }

 private:
  Fn fn_;
};

/// Chat-completions HTTP client. Transport errors, 5xx and 429 are retried
/// up to 3 times with 1 s, 2 s, 4 s backoff; other statuses surface at once.
class LiveBackend final : public GenerationBackend {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;
  explicit LiveBackend(Sleeper sleeper = {});

  std::string complete(const PromptBundle& bundle, const GenerationConfig& config) override;

  static nlohmann::json request_body(const PromptBundle& bundle, const GenerationConfig& config);

 private:
  Sleeper sleeper_;
};

struct Decision {
  AgentDecision decision;
  std::string raw;
};

/// Queries the backend, logs prompt and completion to the transcript, and
/// parses the completion. Empty completions raise EmptyCompletion.
Decision decide_next(const PromptBundle& bundle, const GenerationConfig& config, GenerationBackend& backend,
                     Transcript* transcript = nullptr);

}  // namespace proofagent
