#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofagent/prover.hpp"

namespace proofagent {

/// Runs `coqtop -emacs` as a subprocess, one sentence per round trip.
class CoqtopFactory final : public ProverFactory {
 public:
  std::unique_ptr<ProverSession> start(const ProverConfig& config, std::string_view lemma_source,
                                       std::string_view lemma_name,
                                       std::shared_ptr<Transcript> transcript) const override;
};

namespace coqtop {

/// Output of one round trip with the prompt markup removed.
struct Reply {
  std::string text;
  bool error = false;        // an "Error:" / "Toplevel input" report is present
  std::string message;       // error text without location lines
};

Reply parse_reply(std::string_view raw);

/// Goals printed after a tactic ("N goals ... goal 2 is: ..."). Returns
/// nullopt when the text contains no goal display. "No more goals." gives
/// an empty list. Only the first goal carries hypotheses in this layout.
std::optional<std::vector<GoalState>> parse_goals(std::string_view text);

/// Full display of one goal as printed by "Show n." (hypotheses + rule +
/// conclusion).
std::optional<GoalState> parse_single_goal(std::string_view text);

/// Resolves `exe` against PATH; nullopt when not found or not executable.
std::optional<std::string> find_executable(const std::string& exe);

}  // namespace coqtop

}  // namespace proofagent
