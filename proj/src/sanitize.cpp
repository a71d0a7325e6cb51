#include "proofagent/sanitize.hpp"

#include <algorithm>
#include <iterator>

#include "proofagent/text.hpp"

namespace proofagent {

namespace {

constexpr std::string_view kForbiddenWords[] = {
    "admit", "Admitted", "Admit", "Abort", "Axiom", "Axioms", "give_up"};

// Sentence-initial keywords that are commands rather than tactics.
constexpr std::string_view kVernacular[] = {
    "Require", "Import", "Export", "From", "Definition", "Fixpoint", "CoFixpoint",
    "Inductive", "CoInductive", "Variant", "Record", "Structure", "Class", "Instance",
    "Existing", "Ltac", "Ltac2", "Tactic", "Notation", "Infix", "Lemma", "Theorem",
    "Fact", "Remark", "Corollary", "Proposition", "Example", "Hypothesis", "Hypotheses",
    "Variable", "Variables", "Parameter", "Parameters", "Conjecture", "Section", "End",
    "Module", "Declare", "Hint", "Create", "Set", "Unset", "Local", "Global", "Arguments",
    "Opaque", "Transparent", "Qed", "Defined", "Save", "Proof", "Restart", "Undo", "Back",
    "BackTo", "Reset", "Load", "Add", "Remove", "Open", "Close", "Scheme", "Program",
    "Obligation", "Obligations", "Next", "Search", "SearchPattern", "SearchRewrite",
    "Print", "Locate", "About", "Check", "Compute", "Eval", "Show", "Goal", "Drop", "Quit",
    "Timeout", "Fail", "Time", "Redirect", "Extraction", "Generalizable", "Implicit",
    "Context", "Let", "Canonical", "Coercion", "Universe", "Succeed"};

std::string_view strip_sentence_word(std::string_view w) {
  while (!w.empty() && (w.back() == '.' || w.back() == ':')) w.remove_suffix(1);
  return w;
}

}  // namespace

bool is_vernacular_head(std::string_view word) {
  auto head = strip_sentence_word(word);
  return std::find(std::begin(kVernacular), std::end(kVernacular), head) != std::end(kVernacular);
}

bool is_structure_marker(std::string_view sentence) {
  auto s = trim(sentence);
  if (s == "{" || s == "}") return true;
  if (s.empty()) return false;
  char c = s.front();
  if (c != '-' && c != '+' && c != '*') return false;
  return std::all_of(s.begin(), s.end(), [c](char x) { return x == c; });
}

std::optional<std::string> forbidden_word(std::string_view text) {
  for (auto w : kForbiddenWords) {
    if (contains_word(text, w)) return "forbidden command '" + std::string(w) + "'";
  }
  return std::nullopt;
}

std::optional<std::string> sanitization_violation(std::string_view sentence) {
  auto s = trim(sentence);
  if (s.empty()) return "empty sentence";
  if (auto w = forbidden_word(s)) return w;
  if (is_structure_marker(s)) return std::nullopt;
  if (!balanced(strip_comments(s))) return "unbalanced delimiters";
  if (s.back() != '.') return "sentence must end with '.'";
  std::string rest;
  auto sentences = split_sentences(s, &rest);
  if (sentences.size() != 1 || !rest.empty()) return "more than one sentence";
  const auto word = first_word(s);
  if (is_vernacular_head(word)) {
    return "vernacular command '" + std::string(strip_sentence_word(word)) + "' is not a tactic";
  }
  return std::nullopt;
}

}  // namespace proofagent
