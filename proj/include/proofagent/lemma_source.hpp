#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace proofagent {

/// One top-level declaration recognised in a prover source file.
struct SourceDecl {
  std::string keyword;    // Lemma, Theorem, Definition, ...
  std::string name;
  std::string statement;  // text after "name :" (binders included for definitions)
  std::string body;       // ":= ..." part for definitions, empty otherwise
  bool is_goal() const;   // Lemma/Theorem/Fact/... (needs a proof)
};

class SourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the sentence structure of a .v-style file. Proof blocks
/// (Proof. ... Qed./Defined./Admitted.) are skipped. Throws SourceError
/// with a prover-style message on unbalanced delimiters, an unknown
/// sentence head, or an empty statement.
std::vector<SourceDecl> parse_source(std::string_view text);

/// Names of all lemma-like declarations, in file order.
std::vector<std::string> lemma_names(std::string_view text);

/// Statement of the named lemma, or nullopt when absent.
std::optional<std::string> lemma_statement(std::string_view text, std::string_view name);

}  // namespace proofagent
