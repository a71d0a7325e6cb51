#pragma once

#include <set>
#include <string>
#include <vector>

#include "proofagent/prover.hpp"

namespace proofagent {

/// A declaration visible to the mock prover's query commands and to
/// `apply`/`exact`/`pose proof`.
struct MockDeclaration {
  std::string name;
  std::string statement;
  std::string body;      // empty for lemmas
  std::string location;  // fully qualified path printed by Locate
};

/// Declarations of the small integer-arithmetic library the mock preloads.
const std::vector<MockDeclaration>& mock_standard_library();

struct MockProverOptions {
  /// Sentences that never terminate; applying one raises SentenceTimeout.
  std::set<std::string> diverging_tactics;
  std::vector<MockDeclaration> extra_declarations;
  bool load_standard_library = true;
};

/// Deterministic in-memory prover with Coq-like surface behaviour.
///
/// Goals are propositions over integer variables. Supported tactics:
/// intros/intro, split, left, right, exfalso, exact, assumption,
/// reflexivity, trivial, auto, easy, lia, nia, destruct (disjunctive,
/// conjunctive and existential patterns), assert, pose proof, apply,
/// unfold, simpl, cbn, idtac, and the focus markers { } - + *.
/// `lia` decides single-variable linear bounds; `nia` additionally uses
/// `c <= v * v` facts for non-negative v.
class MockProverFactory final : public ProverFactory {
 public:
  MockProverFactory() = default;
  explicit MockProverFactory(MockProverOptions options) : options_(std::move(options)) {}

  std::unique_ptr<ProverSession> start(const ProverConfig& config, std::string_view lemma_source,
                                       std::string_view lemma_name,
                                       std::shared_ptr<Transcript> transcript) const override;

  const MockProverOptions& options() const { return options_; }

 private:
  MockProverOptions options_;
};

}  // namespace proofagent
