#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace proofagent {

/// Returns the reason a sentence may not be sent to the prover as a tactic,
/// or nullopt when it is acceptable.
///
/// Rejected: whole-word admit/Admitted/Admit/Abort/Axiom/give_up anywhere;
/// sentences starting with vernacular (Require, Definition, Ltac, Lemma, the
/// five query commands, ...); more than one sentence; a missing terminating
/// '.'. Focus markers ("{", "}", bullets) are accepted.
std::optional<std::string> sanitization_violation(std::string_view sentence);

/// Only checks the forbidden-word list (used for query sentences).
std::optional<std::string> forbidden_word(std::string_view text);

bool is_structure_marker(std::string_view sentence);

/// True when `word` (trailing '.'/':' ignored) starts a vernacular command.
bool is_vernacular_head(std::string_view word);

}  // namespace proofagent
