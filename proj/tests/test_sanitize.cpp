#include <doctest.h>

#include "proofagent/sanitize.hpp"

using namespace proofagent;

TEST_CASE("forbidden words are rejected anywhere in a sentence") {
  for (auto s : {"admit.", "Admitted.", "Abort.", "Axiom x : False.", "intros; admit.", "give_up."}) {
    CAPTURE(s);
    CHECK(sanitization_violation(s).has_value());
  }
}

TEST_CASE("vernacular is rejected") {
  for (auto s : {"Require Import Lia.", "Definition x := 1.", "Lemma l : True.", "Search (_ + _).",
                 "Set Printing All.", "Ltac t := idtac."}) {
    CAPTURE(s);
    CHECK(sanitization_violation(s).has_value());
  }
}

TEST_CASE("ordinary tactics and markers pass") {
  for (auto s : {"lia.", "intros x H.", "destruct H as [a | b].", "{", "}", "-", "+", "*", "apply Z.abs_le."}) {
    CAPTURE(s);
    CHECK_FALSE(sanitization_violation(s).has_value());
  }
}

TEST_CASE("multiple sentences and missing terminator are rejected") {
  CHECK(sanitization_violation("intros. lia.").has_value());
  CHECK(sanitization_violation("lia").has_value());
}

TEST_CASE("word boundaries") {
  CHECK_FALSE(sanitization_violation("apply admittable_lemma.").has_value());
  CHECK_FALSE(forbidden_word("Z.abs_le").has_value());
  CHECK(forbidden_word("(admit)").has_value());
}

TEST_CASE("structure markers") {
  CHECK(is_structure_marker("{"));
  CHECK(is_structure_marker("-"));
  CHECK_FALSE(is_structure_marker("lia."));
}
