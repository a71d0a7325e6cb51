#include <doctest.h>

#include "proofagent/lemma_source.hpp"
#include "support.hpp"

using namespace proofagent;

TEST_CASE("declarations are parsed and proof blocks skipped") {
  auto decls = parse_source(
      "Require Import ZArith.\nDefinition two := 2.\nLemma a : True.\nProof. trivial. Qed.\n"
      "Theorem b : forall x : Z, x = x.\n");
  auto names = lemma_names("Lemma a : True.\nProof. trivial. Qed.\nTheorem b : forall x : Z, x = x.\n");
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "a");
  CHECK(names[1] == "b");
  bool saw_def = false;
  for (const auto& d : decls) saw_def |= d.keyword == "Definition" && d.name == "two";
  CHECK(saw_def);
}

TEST_CASE("lemma_statement") {
  auto src = testsupport::wp_source();
  auto st = lemma_statement(src, "wp_goal");
  REQUIRE(st);
  CHECK(st->find("i1 = 10%Z") != std::string::npos);
  CHECK_FALSE(lemma_statement(src, "nope"));
}

TEST_CASE("malformed sources raise SourceError") {
  CHECK_THROWS_AS(parse_source("Lemma a : (True."), SourceError);
  CHECK_THROWS_AS(parse_source("Lemma a : ."), SourceError);
}
