#include "proofagent/lemma_source.hpp"

#include <algorithm>
#include <iterator>

#include "proofagent/text.hpp"

namespace proofagent {

namespace {

constexpr std::string_view kGoalKeywords[] = {"Lemma", "Theorem", "Fact", "Remark",
                                              "Corollary", "Proposition", "Example"};
constexpr std::string_view kDefKeywords[] = {"Definition", "Fixpoint", "Axiom", "Parameter",
                                             "Hypothesis", "Variable", "Inductive"};
constexpr std::string_view kIgnoredKeywords[] = {
    "Require", "Import", "Export", "From", "Open", "Close", "Set", "Unset", "Local",
    "Global", "Section", "End", "Module", "Hint", "Arguments", "Notation", "Infix",
    "Ltac", "Declare", "Opaque", "Transparent", "Implicit", "Generalizable"};
constexpr std::string_view kProofEnd[] = {"Qed.", "Defined.", "Admitted.", "Abort."};

template <std::size_t N>
bool one_of(std::string_view w, const std::string_view (&list)[N]) {
  return std::find(std::begin(list), std::end(list), w) != std::end(list);
}

}  // namespace

bool SourceDecl::is_goal() const { return one_of(keyword, kGoalKeywords); }

std::vector<SourceDecl> parse_source(std::string_view text) {
  auto clean = strip_comments(text);
  if (!balanced(clean)) throw SourceError("Syntax error: unbalanced parentheses.");
  std::string rest;
  auto sentences = split_sentences(clean, &rest);
  if (!rest.empty()) throw SourceError("Syntax error: '.' expected after [vernac] (in [vernac_aux]).");

  std::vector<SourceDecl> out;
  bool in_proof = false;
  for (const auto& s : sentences) {
    auto head = first_word(s);
    auto keyword = head;
    if (!keyword.empty() && keyword.back() == '.') keyword.pop_back();
    if (in_proof) {
      bool new_decl = one_of(keyword, kGoalKeywords) || one_of(keyword, kDefKeywords) ||
                      one_of(keyword, kIgnoredKeywords);
      if (one_of(head, kProofEnd)) in_proof = false;
      if (!new_decl) continue;
      in_proof = false;
    }
    if (keyword == "Proof") {
      in_proof = true;
      continue;
    }
    if (one_of(keyword, kIgnoredKeywords)) continue;
    if (!one_of(keyword, kGoalKeywords) && !one_of(keyword, kDefKeywords)) {
      throw SourceError("Syntax error: illegal begin of vernac: '" + keyword + "'.");
    }
    // "<keyword> name <binders> : statement [:= body]."
    std::string_view body(s);
    body.remove_prefix(head.size());
    body.remove_suffix(1);  // final '.'
    auto decl_text = trim(body);
    std::size_t name_end = 0;
    while (name_end < decl_text.size() && is_ident_char(decl_text[name_end])) ++name_end;
    SourceDecl d;
    d.keyword = keyword;
    d.name = decl_text.substr(0, name_end);
    if (d.name.empty()) throw SourceError("Syntax error: identifier expected after " + keyword + ".");
    std::string after = decl_text.substr(name_end);
    auto def_pos = find_top_level(after, ":=");
    if (def_pos != std::string::npos) {
      d.body = trim(after.substr(def_pos + 2));
      after = after.substr(0, def_pos);
    }
    auto colon = find_top_level(after, ":");
    std::string binders = trim(after.substr(0, colon == std::string::npos ? after.size() : colon));
    std::string type = colon == std::string::npos ? std::string() : trim(after.substr(colon + 1));
    if (d.is_goal()) {
      if (!binders.empty()) {
        type = "forall " + binders + ", " + type;
      }
      if (trim(type).empty() || colon == std::string::npos) {
        throw SourceError("Syntax error: statement expected for " + d.name + ".");
      }
      d.statement = collapse_whitespace(type);
    } else {
      d.statement = collapse_whitespace(binders.empty() ? type : binders + " : " + type);
    }
    in_proof = d.is_goal();
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::string> lemma_names(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& d : parse_source(text)) {
    if (d.is_goal()) out.push_back(d.name);
  }
  return out;
}

std::optional<std::string> lemma_statement(std::string_view text, std::string_view name) {
  for (const auto& d : parse_source(text)) {
    if (d.is_goal() && d.name == name) return d.statement;
  }
  return std::nullopt;
}

}  // namespace proofagent
