#include <doctest.h>

#include <random>

#include "proofagent/mock_prover.hpp"
#include "support.hpp"

using namespace proofagent;
using testsupport::mock_config;

namespace {

std::unique_ptr<ProverSession> wp_session(std::shared_ptr<Transcript> t = nullptr) {
  static MockProverFactory factory;
  return factory.start(mock_config(), testsupport::wp_source(), "wp_goal", t ? t : std::make_shared<Transcript>());
}

}  // namespace

TEST_CASE("wp_goal interaction") {
  auto s = wp_session();
  CHECK(s->initial_goal().goal_id == "0");
  CHECK(s->initial_goal().conclusion.find("i1 = 10%Z") != std::string::npos);

  auto r = s->apply_tactic("intros i1 i Hlo Hhi Hi Hsq Habs Hcases.");
  REQUIRE(std::holds_alternative<Advanced>(r));
  auto goals = std::get<Advanced>(r).open_goals;
  REQUIRE(goals.size() == 1);
  CHECK(goals[0].goal_id == "0.0");
  REQUIRE(goals[0].hypotheses.size() == 7);
  CHECK(goals[0].hypotheses[0].names == std::vector<std::string>{"i1", "i"});
  CHECK(goals[0].hypotheses[6].names == std::vector<std::string>{"Hcases"});

  r = s->apply_tactic("destruct Hcases as [H10 | Hn10 | Hle9].");
  REQUIRE(is_failure(r));
  CHECK(std::get<Failure>(r).message.find("disjunctive pattern") != std::string::npos);

  r = s->apply_tactic("destruct Hcases as [H10 | [Hn10 | Hle9]].");
  REQUIRE(std::holds_alternative<Advanced>(r));
  goals = std::get<Advanced>(r).open_goals;
  REQUIRE(goals.size() == 3);
  CHECK(goals[0].goal_id == "0.0.0");
  CHECK(goals[2].goal_id == "0.0.2");

  CHECK_FALSE(is_failure(s->apply_tactic("lia.")));
  CHECK_FALSE(is_failure(s->apply_tactic("lia.")));
  r = s->apply_tactic("lia.");
  REQUIRE(is_failure(r));
  CHECK(std::get<Failure>(r).message.find("Cannot find witness") != std::string::npos);
  r = s->apply_tactic("nia.");
  CHECK(std::holds_alternative<QedReply>(r));
  CHECK_FALSE(s->finish_proof().has_value());
}

TEST_CASE("queries return library entries") {
  auto s = wp_session();
  auto q = s->run_query(QueryKind::Search, "(Z.abs _ <= _)");
  bool found = false;
  for (const auto& e : q.entries) found |= e.name == "Z.abs_le";
  CHECK(found);
  CHECK(q.entries.size() <= kQueryResultCap);
  auto c = s->run_query(QueryKind::Check, "0%Z");
  CHECK(c.raw.find(": Z") != std::string::npos);
  CHECK_THROWS_AS(s->run_query(QueryKind::Print, "no_such_thing"), ProverError);
}

TEST_CASE("sanitization happens before the prover sees a sentence") {
  auto t = std::make_shared<Transcript>();
  auto s = wp_session(t);
  try {
    s->apply_tactic("admit.");
    FAIL("expected rejection");
  } catch (const ProverError& e) {
    CHECK(e.kind() == ProverErrorKind::SanitizationRejected);
  }
  for (const auto& p : t->payloads("send")) CHECK(p.find("admit") == std::string::npos);
}

TEST_CASE("rollback restores earlier goals") {
  auto s = wp_session();
  auto before = s->printed_goals();
  s->apply_tactic("intros i1 i Hlo Hhi Hi Hsq Habs Hcases.");
  s->apply_tactic("destruct Hcases as [H10 | [Hn10 | Hle9]].");
  auto g = s->rollback(2);
  CHECK(s->printed_goals() == before);
  CHECK(g.goal_id == "0");
  CHECK_THROWS_AS(s->rollback(1), ProverError);
}

TEST_CASE("unknown lemma and broken source") {
  MockProverFactory f;
  try {
    f.start(mock_config(), testsupport::wp_source(), "missing", std::make_shared<Transcript>());
    FAIL("expected LemmaNotFound");
  } catch (const ProverError& e) {
    CHECK(e.kind() == ProverErrorKind::LemmaNotFound);
  }
  try {
    f.start(mock_config(), "Lemma a : (True.", "a", std::make_shared<Transcript>());
    FAIL("expected CompilationFailure");
  } catch (const ProverError& e) {
    CHECK(e.kind() == ProverErrorKind::CompilationFailure);
  }
}

TEST_CASE("diverging tactic times out") {
  MockProverOptions opts;
  opts.diverging_tactics = {"repeat idtac."};
  MockProverFactory f(opts);
  auto s = f.start(mock_config(), "Lemma t : True.", "t", std::make_shared<Transcript>());
  auto before = s->printed_goals();
  try {
    s->apply_tactic("repeat idtac.");
    FAIL("expected timeout");
  } catch (const ProverError& e) {
    CHECK(e.kind() == ProverErrorKind::SentenceTimeout);
  }
  if (!s->is_closed()) CHECK(s->printed_goals() == before);
}

TEST_CASE("property: queries and failing tactics leave printed goals unchanged") {
  std::mt19937 rng(11);
  const std::vector<std::string> tactics = {
      "lia.", "nia.", "split.", "left.", "right.", "intros.", "exact H.", "apply Z.abs_le.",
      "destruct Hcases as [a | b | c].", "reflexivity.", "assumption.", "exfalso.", "trivial.",
      "destruct Hcases as [H10 | [Hn10 | Hle9]].", "intros i1 i Hlo Hhi Hi Hsq Habs Hcases.", "{", "}"};
  const std::vector<std::pair<QueryKind, std::string>> queries = {
      {QueryKind::Search, "(Z.abs _ <= _)"}, {QueryKind::Search, "(_ * _ <= _ * _)"},
      {QueryKind::Check, "0%Z"},            {QueryKind::About, "Z.abs_le"},
      {QueryKind::Locate, "Z.abs"},         {QueryKind::Print, "Z.abs"}};
  std::size_t checks = 0;
  for (int run = 0; run < 40; ++run) {
    auto s = wp_session();
    for (int step = 0; step < 25 && !s->is_closed(); ++step) {
      auto before = s->printed_goals();
      if (rng() % 3 == 0) {
        const auto& q = queries[rng() % queries.size()];
        try {
          s->run_query(q.first, q.second);
        } catch (const ProverError&) {
        }
        CHECK(s->printed_goals() == before);
        ++checks;
      } else {
        ProverReply r;
        try {
          r = s->apply_tactic(tactics[rng() % tactics.size()]);
        } catch (const ProverError&) {
          CHECK(s->printed_goals() == before);
          continue;
        }
        if (is_failure(r)) {
          CHECK(s->printed_goals() == before);
          ++checks;
        }
        if (std::holds_alternative<QedReply>(r)) break;
      }
    }
  }
  CHECK(checks > 100);
}
