#include <doctest.h>

#include "generators.hpp"
#include "proofagent/history.hpp"
#include "support.hpp"

using namespace proofagent;

namespace {

StepRecord step(const std::string& thm, std::size_t id, const std::string& before) {
  StepRecord r;
  r.theorem_name = thm;
  r.tactic_id = id;
  r.tactic = "lia.";
  r.goal_before = before;
  return r;
}

}  // namespace

TEST_CASE("make_step_record diffs hypotheses") {
  GoalState before{{{{"H"}, "0 <= x"}}, "x = x", "0"};
  GoalState after{{{{"x"}, "Z"}, {{"H"}, "0 <= x"}, {{"H2"}, "x <= 5"}}, "x <= 5", "0.0"};
  auto r = make_step_record("t", 0, "intros.", before, {after});
  CHECK(r.goal_before == "x = x");
  CHECK(r.goal_after == "x <= 5");
  CHECK(r.hypotheses_before == std::vector<std::string>{"H : 0 <= x"});
  CHECK(r.hypotheses_added == std::vector<std::string>{"x : Z", "H2 : x <= 5"});
  CHECK(r.hypotheses_removed.empty());
  auto closed = make_step_record("t", 1, "lia.", before, {});
  CHECK(closed.goal_after.empty());
}

TEST_CASE("record, reload and query") {
  auto dir = testsupport::scratch_dir("hist");
  auto path = dir / "h.json";
  {
    HistoryDB db(path);
    db.record_proof("a", {step("a", 0, "Z.abs x <= 3"), step("a", 1, "y = y")});
    CHECK_THROWS_AS(db.record_proof("a", {step("a", 0, "q")}), HistoryError);
    CHECK_THROWS_AS(db.record_proof("b", {step("b", 1, "q")}), HistoryError);
  }
  auto db = HistoryDB::load(path);
  CHECK(db.size() == 2);
  CHECK(db.has_theorem("a"));
  CHECK(db.theorem_summary() == std::vector<std::pair<std::string, std::size_t>>{{"a", 2}});
  auto top = db.top_k_similar(GoalState{{}, "Z.abs x <= 7", ""}, 5);
  REQUIRE_FALSE(top.empty());
  CHECK(top[0].goal_before == "Z.abs x <= 3");
  db.clear();
  db.save();
  CHECK(HistoryDB::load(path).size() == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("top_k caps at k and breaks ties toward later records") {
  HistoryDB db;
  std::vector<StepRecord> steps;
  for (std::size_t i = 0; i < 8; ++i) steps.push_back(step("t", i, "x"));
  db.record_proof("t", steps);
  auto top = db.top_k_similar(GoalState{{}, "x", ""}, 5);
  REQUIRE(top.size() == 5);
  CHECK(top[0].tactic_id == 7);
}

TEST_CASE("schema violations report the record index") {
  try {
    HistoryDB::parse_document(R"({"records":[{"theorem-name":"a","tactic-id":0,"tactic":"t.","goal-before":"g",
      "goal-after":"","hypotheses-before":[],"hypotheses-added":[],"hypotheses-removed":[]},{"theorem-name":3}]})");
    FAIL("expected SchemaViolation");
  } catch (const HistoryError& e) {
    CHECK(e.kind() == HistoryErrorKind::SchemaViolation);
    CHECK(e.record_index() == 1);
  }
  try {
    HistoryDB::parse_document("{\"records\": [");
    FAIL("expected SchemaViolation");
  } catch (const HistoryError& e) {
    CHECK(e.record_index() == -1);
  }
}

TEST_CASE("missing file loads empty") {
  auto dir = testsupport::scratch_dir("hist-missing");
  CHECK(HistoryDB::load(dir / "none.json").size() == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("storage failure leaves memory unchanged") {
  HistoryDB db("/proc/definitely/not/writable.json");
  CHECK_THROWS_AS(db.record_proof("a", {step("a", 0, "g")}), HistoryError);
  CHECK(db.size() == 0);
}

TEST_CASE("property: document round trip") {
  testsupport::Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    std::vector<StepRecord> all;
    for (int t = 0; t < 3; ++t) {
      auto s = testsupport::random_steps(rng, "thm" + std::to_string(t));
      all.insert(all.end(), s.begin(), s.end());
    }
    REQUIRE(HistoryDB::parse_document(HistoryDB::to_document(all)) == all);
  }
}
