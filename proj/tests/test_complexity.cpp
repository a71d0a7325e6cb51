#include <doctest.h>

#include <stdexcept>

#include "proofagent/complexity.hpp"

using namespace proofagent;

TEST_CASE("hand-counted examples") {
  CHECK(measure("True") == LemmaComplexity{1, 0});
  // forall x y Zneq_bool x y = false -> x = y
  CHECK(measure("forall x y, Zneq_bool x y=false -> x=y.") == LemmaComplexity{12, 1});
  // forall x Z H x > 0 x <> 0 : ten tokens, H is a named hypothesis
  CHECK(measure("forall (x : Z) (H : x > 0), x <> 0") == LemmaComplexity{10, 1});
}

TEST_CASE("tokenizer details") {
  CHECK(term_tokens("(10%Z <= i1)") == std::vector<std::string>{"10%Z", "<=", "i1"});
  CHECK(term_tokens("Z.abs x") == std::vector<std::string>{"Z.abs", "x"});
  CHECK(term_tokens("(a + b)%Z") == std::vector<std::string>{"a", "+", "b"});
}

TEST_CASE("hypothesis counting") {
  CHECK(hypothesis_count("A <-> B") == 0);
  CHECK(hypothesis_count("(A -> B) -> C") == 1);
  CHECK(hypothesis_count("forall x, A -> forall y, B -> C") == 2);
  CHECK(hypothesis_count("forall x : Z, x = x") == 0);
}

TEST_CASE("empty statement is an error") {
  CHECK_THROWS_AS(measure("  "), std::invalid_argument);
  CHECK_THROWS_AS(measure("."), std::invalid_argument);
}

TEST_CASE("buckets") {
  std::vector<std::size_t> e = {25, 50, 75, 100};
  CHECK(bucket_of(0, e) == 0);
  CHECK(bucket_of(25, e) == 0);
  CHECK(bucket_of(26, e) == 1);
  CHECK(bucket_of(100, e) == 3);
  CHECK(bucket_of(101, e) == 4);
  CHECK(bucket_label(4, e) == "(100,inf)");
  CHECK(bucket_label(0, e) == "[0,25]");
}
