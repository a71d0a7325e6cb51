#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "proofagent/gateway.hpp"
#include "support.hpp"

using namespace proofagent;

namespace {

ProofTree small_tree() { return ProofTree(GoalState{{{{"H"}, "0 <= x"}}, "x <= 10", "0"}); }

std::vector<StepRecord> many_steps(std::size_t n) {
  std::vector<StepRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    StepRecord r;
    r.theorem_name = "t";
    r.tactic_id = i;
    r.tactic = "lia.";
    r.goal_before = "x <= " + std::to_string(i);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("analyze prompt carries the statement, tree and allowed answers") {
  ContextSet ctx;
  auto b = build_prompt(PromptMode::Analyze, "forall x, 0 <= x -> x <= 10", small_tree(), {}, ctx, {});
  auto text = b.render();
  CHECK(text.find("forall x, 0 <= x -> x <= 10") != std::string::npos);
  CHECK(text.find("x <= 10") != std::string::npos);
  CHECK(text.find("Search") != std::string::npos);
  CHECK(text.size() <= kPromptBudget);
}

TEST_CASE("error modes need their inputs") {
  ContextSet ctx;
  CHECK_THROWS_AS(build_prompt(PromptMode::FixError, "s", small_tree(), {}, ctx, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_prompt(PromptMode::PersistentError, "s", small_tree(), {}, ctx, {}), std::invalid_argument);
  auto fix = build_prompt(PromptMode::FixError, "s", small_tree(), {}, ctx, {{"lia.", "Cannot find witness."}});
  CHECK(fix.render().find("Cannot find witness.") != std::string::npos);
  auto per = build_prompt(PromptMode::PersistentError, "s", small_tree(), {}, ctx,
                          {{"lia.", "e"}, {"nia.", "e"}, {"omega.", "e"}});
  CHECK(per.recent_failed_tactics.size() == 3);
  CHECK(per.render().find("omega.") != std::string::npos);
}

TEST_CASE("tactic_required is visible in the prompt") {
  ContextSet ctx;
  auto a = build_prompt(PromptMode::Analyze, "s", small_tree(), {}, ctx, {}, false).render();
  auto b = build_prompt(PromptMode::Analyze, "s", small_tree(), {}, ctx, {}, true).render();
  CHECK(a != b);
}

TEST_CASE("property: prompt bounds hold for arbitrary inputs") {
  testsupport::Rng rng(23);
  for (int i = 0; i < 150; ++i) {
    ContextSet ctx;
    QueryResult qr;
    auto n = rng() % 80;
    for (std::size_t j = 0; j < n; ++j) qr.entries.push_back({"L" + std::to_string(j), testsupport::random_text(rng, 40)});
    ctx.ingest(QueryKind::Search, "x", qr, 1);
    auto tree = testsupport::random_tree(rng);
    if (!tree.focus()) continue;
    std::size_t budget = 1000 + rng() % 14000;
    std::vector<FailedAttempt> errs;
    for (unsigned j = 0; j < 1 + rng() % 5; ++j) errs.push_back({testsupport::random_text(rng, 5), std::string(rng() % 3000, 'e')});
    auto mode = static_cast<PromptMode>(rng() % 3);
    auto b = build_prompt(mode, std::string(rng() % 900, 's'), tree, many_steps(rng() % 12), ctx, errs,
                          rng() % 2 == 0, budget);
    CAPTURE(budget);
    CHECK(b.history_snippets.size() <= kMaxHistorySnippets);
    CHECK(b.context_items.size() <= kMaxContextItems);
    CHECK(b.render().size() <= budget);
  }
}

TEST_CASE("an oversized statement is a budget error") {
  ContextSet ctx;
  try {
    build_prompt(PromptMode::Analyze, std::string(5000, 's'), small_tree(), {}, ctx, {}, false, 4000);
    FAIL("expected BudgetExceeded");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::BudgetExceeded);
  }
}

TEST_CASE("parse_decision examples") {
  CHECK(parse_decision("lia.") == AgentDecision{EmitTactic{"lia."}});
  CHECK(parse_decision("```coq\nintros x H.\n```") == AgentDecision{EmitTactic{"intros x H."}});
  CHECK(parse_decision("The next tactic is: lia.") == AgentDecision{EmitTactic{"lia."}});
  CHECK(parse_decision("- nia.") == AgentDecision{EmitTactic{"nia."}});
  CHECK(parse_decision("split. lia.") == AgentDecision{EmitTactic{"split."}});
  CHECK(parse_decision("Search (Z.abs _ <= _).") == AgentDecision{EmitQuery{QueryKind::Search, "(Z.abs _ <= _)"}});
  CHECK(parse_decision("Check 0%Z.") == AgentDecision{EmitQuery{QueryKind::Check, "0%Z"}});
  CHECK(std::holds_alternative<GiveUp>(parse_decision("Admitted.")));
  CHECK(std::holds_alternative<GiveUp>(parse_decision("Search (admit).")));
  CHECK(std::holds_alternative<GiveUp>(parse_decision("I am not sure")));
  CHECK(std::holds_alternative<GiveUp>(parse_decision("Require Import Lia.")));
  CHECK(parse_decision("{") == AgentDecision{EmitTactic{"{"}});
  CHECK(std::holds_alternative<GiveUp>(parse_decision("Hypothesis H : False.")));
  CHECK(std::holds_alternative<GiveUp>(parse_decision("Axiom cheat : forall P : Prop, P.")));
}

TEST_CASE("property: canonical text parses back to the same decision") {
  testsupport::Rng rng(29);
  const std::vector<std::string> seeds = {
      "lia.", "intros.", "Search (_ + _).", "Print Z.abs.", "Admitted.", "hello", "```\nsplit.\n```",
      "Locate Z.le.", "About Z.", "- lia.", "Proof: nia.", "(* c *) auto.", "{", "}", "exact (f x.y)."};
  for (int i = 0; i < 500; ++i) {
    std::string raw = seeds[rng() % seeds.size()];
    if (rng() % 2) raw += " " + testsupport::random_text(rng, 4);
    if (rng() % 3 == 0) raw = testsupport::random_text(rng, 8) + ".";
    auto d = parse_decision(raw);
    CAPTURE(raw);
    if (!std::holds_alternative<GiveUp>(d)) CHECK(parse_decision(canonical_text(d)) == d);
  }
}

TEST_CASE("fixture format round trip") {
  std::vector<std::string> c = {"lia.", "```coq\nintros.\n```", "", "a\n\nb"};
  CHECK(parse_fixture(format_fixture(c)) == c);
  CHECK(parse_fixture("a.\n--8<--\nb.\n") == std::vector<std::string>{"a.", "b."});
}

TEST_CASE("replay backend runs out") {
  ReplayBackend b({"lia."});
  PromptBundle p;
  GenerationConfig g;
  CHECK(b.complete(p, g) == "lia.");
  CHECK_THROWS_AS(b.complete(p, g), GatewayError);
}

TEST_CASE("decide_next logs and rejects empty completions") {
  auto t = std::make_shared<Transcript>();
  FunctionBackend ok([](const PromptBundle&) { return "  lia.  "; });
  ContextSet ctx;
  auto bundle = build_prompt(PromptMode::Analyze, "s", small_tree(), {}, ctx, {});
  auto d = decide_next(bundle, GenerationConfig{}, ok, t.get());
  CHECK(d.decision == AgentDecision{EmitTactic{"lia."}});
  CHECK(t->payloads("llm-prompt").size() == 1);
  CHECK(t->payloads("llm-response").size() == 1);
  FunctionBackend empty([](const PromptBundle&) { return "  \n"; });
  try {
    decide_next(bundle, GenerationConfig{}, empty, t.get());
    FAIL("expected EmptyCompletion");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::EmptyCompletion);
  }
}

TEST_CASE("generation config validation") {
  GenerationConfig g;
  CHECK_NOTHROW(g.validate());
  g.temperature = -1;
  CHECK_THROWS(g.validate());
  g = {};
  g.max_output_tokens = 0;
  CHECK_THROWS(g.validate());
}
