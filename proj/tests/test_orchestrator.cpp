#include <doctest.h>

#include "proofagent/mock_prover.hpp"
#include "proofagent/orchestrator.hpp"
#include "support.hpp"

using namespace proofagent;

namespace {

const char* kSquare = "Require Import ZArith.\nOpen Scope Z_scope.\n"
                      "Lemma sq : forall x : Z, 0 <= x -> 4 <= x * x -> 2 <= x.\n"
                      "Lemma t : True.\n";

RunConfig mock_run() {
  RunConfig c;
  c.prover = testsupport::mock_config();
  c.history_enabled = false;
  return c;
}

std::vector<PromptMode> modes(const RunResult& r) {
  std::vector<PromptMode> out;
  for (const auto& p : r.prompts) out.push_back(p.mode);
  return out;
}

}  // namespace

TEST_CASE("wp_goal replay proves with the expected tree") {
  MockProverFactory factory;
  auto backend = ReplayBackend::from_file(testsupport::kFixtures / "replay" / "wp_goal.txt");
  auto r = prove_lemma(testsupport::wp_source(), "wp_goal", mock_run(), *backend, factory);
  REQUIRE(r.proved());
  const auto& p = std::get<Proved>(r.outcome);
  CHECK(p.tree.size() == 5);
  CHECK(p.tree.node({0}).children.size() == 3);
  CHECK(p.stats.proof_steps == 5);
  CHECK(p.stats.queries_issued == 2);
  CHECK(p.stats.failed_attempts == 4);
  CHECK(p.stats.total_attempts == 9);
  CHECK(std::holds_alternative<Verified>(
      replay_script(factory, testsupport::mock_config(), testsupport::wp_source(), "wp_goal", p.script.sentences())));
  using M = PromptMode;
  CHECK(modes(r) == std::vector<M>{M::Analyze, M::Analyze, M::Analyze, M::FixError, M::Analyze, M::Analyze,
                                   M::Analyze, M::FixError, M::FixError, M::PersistentError, M::Analyze});
}

TEST_CASE("same failure triggers the context search at the threshold") {
  MockProverFactory factory;
  for (std::size_t th : {1u, 3u, 5u}) {
    CAPTURE(th);
    auto cfg = mock_run();
    cfg.thresholds.same_error_before_search = th;
    FunctionBackend lia([](const PromptBundle&) { return "lia."; });
    auto r = prove_lemma(kSquare, "sq", cfg, lia, factory);
    REQUIRE_FALSE(r.proved());
    CHECK(std::get<Failed>(r.outcome).reason == FailureReason::NodeAttemptCap);
    auto m = modes(r);
    REQUIRE(m.size() > th + 1);
    CHECK(m[0] == PromptMode::Analyze);
    for (std::size_t i = 1; i < th; ++i) CHECK(m[i] == PromptMode::FixError);
    CHECK(m[th] == PromptMode::PersistentError);
    CHECK(r.stats().total_attempts == cfg.thresholds.max_attempts_per_node);
  }
}

TEST_CASE("queries are capped before a tactic is demanded") {
  MockProverFactory factory;
  int calls = 0;
  bool saw_required = false;
  FunctionBackend b([&](const PromptBundle& p) -> std::string {
    saw_required |= p.tactic_required;
    return ++calls <= 4 ? "Search (_ <= _)." : "trivial.";
  });
  auto r = prove_lemma(kSquare, "t", mock_run(), b, factory);
  REQUIRE(r.proved());
  CHECK(saw_required);
  CHECK(r.stats().queries_issued == 3);
  CHECK(r.stats().failed_attempts == 1);
}

TEST_CASE("a tactic that changes nothing counts as a failure") {
  MockProverFactory factory;
  int calls = 0;
  FunctionBackend b([&](const PromptBundle&) -> std::string { return ++calls == 1 ? "idtac." : "trivial."; });
  auto r = prove_lemma(kSquare, "t", mock_run(), b, factory);
  REQUIRE(r.proved());
  CHECK(r.stats().failed_attempts == 1);
  CHECK(std::get<Proved>(r.outcome).script.sentences() == std::vector<std::string>{"trivial."});
  bool noted = false;
  for (const auto& d : r.directives) noted |= d.find("Refine") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("run-level failures") {
  MockProverFactory factory;
  SUBCASE("unknown lemma") {
    ReplayBackend b({"trivial."});
    auto r = prove_lemma(kSquare, "missing", mock_run(), b, factory);
    REQUIRE_FALSE(r.proved());
    CHECK(std::get<Failed>(r.outcome).reason == FailureReason::ProverError);
    CHECK(r.tree() == nullptr);
  }
  SUBCASE("backend exhausted") {
    ReplayBackend b({});
    auto r = prove_lemma(kSquare, "t", mock_run(), b, factory);
    CHECK(std::get<Failed>(r.outcome).reason == FailureReason::BackendUnavailable);
    REQUIRE(r.tree() != nullptr);
    CHECK(r.tree()->size() == 1);
  }
  SUBCASE("give up on forbidden output") {
    ReplayBackend b({"Admitted."});
    auto r = prove_lemma(kSquare, "t", mock_run(), b, factory);
    CHECK(std::get<Failed>(r.outcome).reason == FailureReason::GiveUp);
  }
  SUBCASE("step budget") {
    auto cfg = mock_run();
    cfg.thresholds.max_total_steps = 4;
    int i = 0;
    FunctionBackend b([&](const PromptBundle&) { return "apply nothing" + std::to_string(i++) + "."; });
    auto r = prove_lemma(kSquare, "sq", cfg, b, factory);
    CHECK(std::get<Failed>(r.outcome).reason == FailureReason::StepBudget);
    CHECK(r.stats().total_attempts == 4);
  }
}

TEST_CASE("history is written after a proof and offered later") {
  MockProverFactory factory;
  HistoryDB db;
  auto cfg = mock_run();
  cfg.history_enabled = true;
  ReplayBackend b1({"intros x H0 H.", "nia."});
  auto r1 = prove_lemma(kSquare, "sq", cfg, b1, factory, &db);
  REQUIRE(r1.proved());
  CHECK(db.steps_for("sq").size() == 2);
  ReplayBackend b2({"trivial."});
  auto r2 = prove_lemma(kSquare, "t", cfg, b2, factory, &db);
  REQUIRE(r2.proved());
  REQUIRE_FALSE(r2.prompts.empty());
  CHECK(r2.prompts[0].history_snippets > 0);
  ReplayBackend b3({"intros x H0 H.", "nia."});
  auto r3 = prove_lemma(kSquare, "sq", cfg, b3, factory, &db);
  CHECK(r3.proved());
  CHECK(db.steps_for("sq").size() == 2);
}

TEST_CASE("audit bundle") {
  MockProverFactory factory;
  auto cfg = mock_run();
  cfg.audit_dir = testsupport::scratch_dir("audit");
  ReplayBackend ok({"trivial."});
  auto r = prove_lemma(kSquare, "t", cfg, ok, factory);
  auto paths = write_audit(r, cfg, "T1");
  REQUIRE(paths.certificate);
  CHECK(testsupport::read(*paths.certificate) == "Proof.\ntrivial.\nQed.\n");
  auto stats = nlohmann::json::parse(testsupport::read(paths.stats));
  CHECK(stats["result"] == "Proved");
  CHECK(stats["proof-steps"] == 1);
  CHECK(ProofTree::deserialize(nlohmann::json::parse(testsupport::read(paths.tree))) == *r.tree());
  CHECK_FALSE(Transcript::read_file(paths.transcript).empty());

  ReplayBackend none({});
  auto f = prove_lemma(kSquare, "t", cfg, none, factory);
  auto fp = write_audit(f, cfg, "T2");
  CHECK_FALSE(fp.certificate);
  CHECK_FALSE(std::filesystem::exists(cfg.audit_dir / "t-T2.v"));
  CHECK(nlohmann::json::parse(testsupport::read(fp.stats))["reason"] == "BackendUnavailable");

  auto bad = cfg;
  bad.audit_dir = "/proc/no/such/dir";
  CHECK_THROWS_AS(write_audit(r, bad, "T3"), AuditError);
  std::filesystem::remove_all(cfg.audit_dir);
}
