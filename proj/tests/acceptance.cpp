// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "proofagent/batch.hpp"
#include "proofagent/coqtop_session.hpp"
#include "proofagent/mock_prover.hpp"
#include "proofagent/orchestrator.hpp"
#include "proofagent/sanitize.hpp"
#include "proofagent/text.hpp"
#include "support.hpp"

using namespace proofagent;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Report {
  Verdict verdict;
  std::string detail;
};

RunConfig mock_run() {
  RunConfig c;
  c.prover = testsupport::mock_config();
  c.history_enabled = false;
  return c;
}

std::string wp_source() { return testsupport::wp_source(); }

// Every prompt of every run checked in the suite lands here for criterion 5.
std::vector<std::pair<std::string, PromptRecord>> g_prompts;
std::vector<std::size_t> g_budgets;

void keep_prompts(const std::string& tag, const RunResult& r, std::size_t budget) {
  for (const auto& p : r.prompts) {
    g_prompts.emplace_back(tag, p);
    g_budgets.push_back(budget);
  }
}

struct RandomLemma {
  std::string name;
  std::string source;
};

RandomLemma random_lemma(testsupport::Rng& rng, int i) {
  auto n = [&](int lo, int hi) { return std::to_string(lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1))); };
  std::string name = "gen" + std::to_string(i);
  std::string st;
  switch (rng() % 6) {
    case 0: st = "True"; break;
    case 1: st = "forall x : Z, " + n(-5, 5) + " <= x -> x <= " + n(0, 20) + " -> x + " + n(0, 3) + " <= " + n(0, 30); break;
    case 2: {
      auto k = n(1, 5);
      st = "forall x : Z, 0 <= x -> " + k + " * " + k + " <= x * x -> " + k + " <= x";
      break;
    }
    case 3: st = "forall x : Z, " + n(-3, 3) + " < x -> 0 <= x /\\ x <> 0"; break;
    case 4: {
      auto a = n(0, 4);
      st = "forall x : Z, x = " + a + " -> x = " + a + " \\/ x = " + n(0, 9);
      break;
    }
    default: st = "forall x : Z, x <= x"; break;
  }
  return {name, "Require Import ZArith.\nOpen Scope Z_scope.\nLemma " + name + " : " + st + ".\n"};
}

FunctionBackend random_backend(testsupport::Rng& rng) {
  static const std::vector<std::string> pool = {
      "intros.", "intros.", "intros x H.", "intros x H1 H2.", "lia.", "lia.", "lia.", "nia.", "nia.",
      "split.", "left.", "right.", "trivial.", "reflexivity.", "assumption.", "auto.", "exfalso.", "idtac.",
      "Search (_ <= _).", "Check x.", "About Z.le.", "{", "}", "garbage output", "```coq\nlia.\n```",
      "Tactic: split.", "apply Z.le_refl.", "destruct H as [a | b]."};
  return FunctionBackend([&rng](const PromptBundle&) { return pool[rng() % pool.size()]; });
}

// 1
Report certificate_soundness() {
  testsupport::Rng rng(2024);
  MockProverFactory prover_under_test;
  MockProverFactory fresh;
  auto cfg = mock_run();
  cfg.thresholds.max_total_steps = 40;
  cfg.thresholds.max_attempts_per_node = 10;
  std::size_t runs = 0, proved = 0, violations = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 300; ++i) {
    auto lemma = random_lemma(rng, i);
    auto backend = random_backend(rng);
    auto r = prove_lemma(lemma.source, lemma.name, cfg, backend, prover_under_test);
    keep_prompts("random", r, cfg.prompt_budget);
    ++runs;
    if (!r.proved()) continue;
    ++proved;
    auto verdict = replay_script(fresh, cfg.prover, lemma.source, lemma.name,
                                 std::get<Proved>(r.outcome).script.sentences());
    if (!std::holds_alternative<Verified>(verdict)) ++violations;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << runs << " runs, " << proved << " proved, " << violations << " replay violations, " << secs << " s";
  bool ok = runs >= 200 && proved > 0 && violations == 0 && secs < 60.0;
  return {ok ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 2
Report motivating_example() {
  MockProverFactory factory;
  auto backend = ReplayBackend::from_file(testsupport::kFixtures / "replay" / "wp_goal.txt");
  auto cfg = mock_run();
  auto r = prove_lemma(wp_source(), "wp_goal", cfg, *backend, factory);
  keep_prompts("wp_goal", r, cfg.prompt_budget);
  if (!r.proved()) return {Verdict::Fail, "not proved: " + std::get<Failed>(r.outcome).detail};
  const auto& p = std::get<Proved>(r.outcome);
  const std::string intros = "intros i1 i Hlo Hhi Hi Hsq Habs Hcases.";
  const std::string destruct = "destruct Hcases as [H10 | [Hn10 | Hle9]].";
  struct Expect {
    NodeId id;
    std::optional<std::string> incoming, closing;
    std::size_t children;
  };
  const std::vector<Expect> expect = {
      {{}, std::nullopt, std::nullopt, 1},   {{0}, intros, std::nullopt, 3},
      {{0, 0}, destruct, "lia.", 0},         {{0, 1}, destruct, "lia.", 0},
      {{0, 2}, destruct, "nia.", 0}};
  std::vector<std::string> problems;
  if (p.tree.size() != expect.size()) problems.push_back("node count " + std::to_string(p.tree.size()));
  for (const auto& e : expect) {
    if (!p.tree.nodes().count(e.id)) {
      problems.push_back("missing " + node_label(e.id));
      continue;
    }
    const auto& n = p.tree.node(e.id);
    if (n.incoming_tactic != e.incoming || n.closing_tactic != e.closing || n.children.size() != e.children ||
        n.status != NodeStatus::Closed) {
      problems.push_back("mismatch at " + node_label(e.id));
    }
  }
  std::size_t subgoals = p.tree.size() - 1;
  auto verdict = replay_script(factory, cfg.prover, wp_source(), "wp_goal", p.script.sentences());
  if (!std::holds_alternative<Verified>(verdict)) problems.push_back("certificate rejected");
  std::ostringstream d;
  d << subgoals << " subgoal nodes under the root, 3 from the branching tactic, certificate "
    << (std::holds_alternative<Verified>(verdict) ? "verified" : "rejected");
  for (const auto& pr : problems) d << "; " << pr;
  return {problems.empty() && subgoals == 4 ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 3
Report persistent_error_policy() {
  const std::string src = "Require Import ZArith.\nOpen Scope Z_scope.\n"
                          "Lemma sq : forall x : Z, 0 <= x -> 4 <= x * x -> 2 <= x.\n";
  MockProverFactory factory;
  std::ostringstream d;
  bool ok = true;
  for (std::size_t th : {3u, 1u, 5u}) {
    auto cfg = mock_run();
    cfg.thresholds.same_error_before_search = th;
    FunctionBackend lia([](const PromptBundle&) { return "lia."; });
    auto r = prove_lemma(src, "sq", cfg, lia, factory);
    keep_prompts("policy", r, cfg.prompt_budget);
    std::vector<PromptMode> expect = {PromptMode::Analyze};
    for (std::size_t i = 1; i < th; ++i) expect.push_back(PromptMode::FixError);
    expect.push_back(PromptMode::PersistentError);
    bool match = r.prompts.size() >= expect.size();
    std::size_t first_search = 0;
    for (std::size_t i = 0; i < r.prompts.size(); ++i) {
      if (i < expect.size() && r.prompts[i].mode != expect[i]) match = false;
      if (!first_search && r.prompts[i].mode == PromptMode::PersistentError) first_search = i;
    }
    ok &= match && !r.proved();
    if (th != 3) d << "; ";
    d << "Err" << th << " search at failure " << first_search << (match ? "" : " (mismatch)");
  }
  return {ok ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 4
Report purity_and_atomicity() {
  testsupport::Rng rng(77);
  MockProverFactory factory;
  const std::vector<std::string> tactics = {
      "lia.", "nia.", "split.", "left.", "right.", "exact H.", "apply Z.abs_le.", "destruct Hcases as [a | b | c].",
      "reflexivity.", "assumption.", "intros i1 i Hlo Hhi Hi Hsq Habs Hcases.", "destruct Hcases as [H10 | [Hn10 | Hle9]].",
      "exfalso.", "unfold foo.", "apply nothing.", "{", "}", "-", "trivial."};
  const std::vector<std::pair<QueryKind, std::string>> queries = {
      {QueryKind::Search, "(Z.abs _ <= _)"}, {QueryKind::Search, "(_ * _ <= _ * _)"}, {QueryKind::Check, "0%Z"},
      {QueryKind::About, "Z.abs_le"},       {QueryKind::Locate, "Z.abs"},             {QueryKind::Print, "Z.abs"},
      {QueryKind::Print, "no_such"}};
  std::size_t query_checks = 0, failure_checks = 0, violations = 0;
  for (int run = 0; run < 200; ++run) {
    auto s = factory.start(mock_run().prover, wp_source(), "wp_goal", std::make_shared<Transcript>());
    for (int step = 0; step < 30 && !s->is_closed(); ++step) {
      auto before = s->printed_goals();
      if (rng() % 3 == 0) {
        const auto& q = queries[rng() % queries.size()];
        try {
          s->run_query(q.first, q.second);
        } catch (const ProverError&) {
        }
        ++query_checks;
        violations += s->printed_goals() != before;
        continue;
      }
      ProverReply r;
      try {
        r = s->apply_tactic(tactics[rng() % tactics.size()]);
      } catch (const ProverError&) {
        ++failure_checks;
        violations += s->printed_goals() != before;
        continue;
      }
      if (is_failure(r)) {
        ++failure_checks;
        violations += s->printed_goals() != before;
      }
      if (std::holds_alternative<QedReply>(r)) break;
    }
  }
  std::ostringstream d;
  d << query_checks << " queries and " << failure_checks << " failed tactics on the mock, " << violations
    << " violations; live prover "
    << (coqtop::find_executable("coqtop") ? "present but not exercised here" : "absent, mock only");
  return {violations == 0 && query_checks > 0 && failure_checks > 0 ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 5, run after the others so their prompts are included
Report prompt_bounds() {
  // a run with a full history database and a large context set
  MockProverFactory factory;
  HistoryDB db;
  testsupport::Rng rng(5);
  for (int t = 0; t < 20; ++t) db.record_proof("h" + std::to_string(t), testsupport::random_steps(rng, "h" + std::to_string(t)));
  auto cfg = mock_run();
  cfg.history_enabled = true;
  cfg.prompt_budget = 3000;
  auto backend = ReplayBackend::from_file(testsupport::kFixtures / "replay" / "wp_goal.txt");
  auto r = prove_lemma(wp_source(), "wp_goal", cfg, *backend, factory, &db);
  keep_prompts("history", r, cfg.prompt_budget);

  // oversized context and history against a range of budgets
  for (std::size_t budget : {1500u, 4000u, 12000u, 40000u}) {
    ContextSet ctx(200);
    for (int q = 0; q < 4; ++q) {
      QueryResult qr;
      for (int j = 0; j < 40; ++j) qr.entries.push_back({"L" + std::to_string(q) + "_" + std::to_string(j), "x <= " + std::to_string(j)});
      ctx.ingest(QueryKind::Search, "(_ <= _)", qr, static_cast<std::size_t>(q));
    }
    ProofTree tree(GoalState{{{{"H"}, "0 <= x"}}, "x <= 10", "0"});
    auto b = build_prompt(PromptMode::Analyze, "forall x : Z, 0 <= x -> x <= 10", tree, db.top_k_similar(tree.root().goal, 50),
                          ctx, {}, false, budget);
    g_prompts.emplace_back("stress", PromptRecord{b.mode, b.tactic_required, b.history_snippets.size(),
                                                  b.context_items.size(), b.render().size()});
    g_budgets.push_back(budget);
  }

  std::size_t violations = 0, max_hist = 0, max_ctx = 0;
  for (std::size_t i = 0; i < g_prompts.size(); ++i) {
    const auto& p = g_prompts[i].second;
    max_hist = std::max(max_hist, p.history_snippets);
    max_ctx = std::max(max_ctx, p.context_items);
    if (p.history_snippets > kMaxHistorySnippets || p.context_items > kMaxContextItems ||
        p.rendered_size > g_budgets[i]) {
      ++violations;
    }
  }
  std::ostringstream d;
  d << g_prompts.size() << " prompts, max history " << max_hist << ", max context " << max_ctx << ", "
    << violations << " violations";
  return {violations == 0 && max_hist == kMaxHistorySnippets && max_ctx == kMaxContextItems ? Verdict::Pass : Verdict::Fail,
          d.str()};
}

// 6
Report sanitization_wall() {
  auto completions = parse_fixture(testsupport::read(testsupport::kFixtures / "adversarial" / "completions.txt"));
  MockProverFactory factory;
  std::size_t leaked = 0, runs = 0;
  // queries and the engine's own closing Qed. face only the forbidden-word list
  auto scan = [&](const RunResult& r) {
    auto records = r.transcript->records();
    std::size_t last_send = records.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].kind == "send") last_send = i;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      if (rec.kind != "send" && rec.kind != "query") continue;
      if (forbidden_word(rec.payload)) ++leaked;
      const bool engine_qed = r.proved() && i == last_send && trim(rec.payload) == "Qed.";
      if (rec.kind == "send" && !engine_qed && !is_structure_marker(rec.payload) &&
          sanitization_violation(rec.payload)) {
        ++leaked;
      }
    }
  };
  for (const auto& c : completions) {
    // adversarial answer first, then mid-proof
    for (int pos : {0, 3}) {
      auto script = parse_fixture(testsupport::read(testsupport::kFixtures / "replay" / "wp_goal.txt"));
      script.insert(script.begin() + pos, c);
      ReplayBackend b(script);
      auto r = prove_lemma(wp_source(), "wp_goal", mock_run(), b, factory);
      keep_prompts("adversarial", r, mock_run().prompt_budget);
      scan(r);
      ++runs;
    }
  }
  std::ostringstream d;
  d << completions.size() << " adversarial completions, " << runs << " runs, " << leaked
    << " forbidden sentences reached the prover";
  return {completions.size() == 30 && leaked == 0 ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 7
Report round_trips() {
  testsupport::Rng rng(99);
  std::size_t tree_bad = 0, hist_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    auto t = testsupport::random_tree(rng);
    try {
      if (!(ProofTree::deserialize(nlohmann::json::parse(t.serialize().dump())) == t)) ++tree_bad;
    } catch (const std::exception&) {
      ++tree_bad;
    }
  }
  auto dir = testsupport::scratch_dir("accept-hist");
  for (int i = 0; i < 1000; ++i) {
    auto path = dir / ("h" + std::to_string(i % 7) + ".json");
    fs::remove(path);
    try {
      HistoryDB db(path);
      auto n = 1 + rng() % 3;
      for (std::size_t t = 0; t < n; ++t) db.record_proof("thm" + std::to_string(t), testsupport::random_steps(rng, "thm" + std::to_string(t)));
      if (HistoryDB::load(path).records() != db.records()) ++hist_bad;
    } catch (const std::exception&) {
      ++hist_bad;
    }
  }
  fs::remove_all(dir);
  std::ostringstream d;
  d << "1000 trees (" << tree_bad << " mismatches), 1000 history files (" << hist_bad << " mismatches)";
  return {tree_bad == 0 && hist_bad == 0 ? Verdict::Pass : Verdict::Fail, d.str()};
}

int run_cli(const std::string& args, const fs::path& dir) {
  std::string cmd = "cd '" + dir.string() + "' && '" + PROOFAGENT_CLI + "' " + args + " > cli.log 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// 8
Report batch_metrics() {
  auto dir = testsupport::scratch_dir("accept-batch");
  const auto fx = testsupport::kFixtures.string();
  int code = run_cli("batch " + fx + "/corpus/manifest.json --prover-path mock --no-history --backend replay:" + fx +
                         "/corpus/replay --audit-dir out",
                     dir);
  if (code != 0) return {Verdict::Fail, "batch exited " + std::to_string(code)};
  std::vector<BatchRecord> records;
  std::istringstream lines(testsupport::read(dir / "out" / "batch-records.jsonl"));
  std::string line;
  while (std::getline(lines, line)) records.push_back(BatchRecord::from_json(nlohmann::json::parse(line)));
  auto summary = nlohmann::json::parse(testsupport::read(dir / "out" / "batch-summary.json"));
  fs::remove_all(dir);

  std::size_t proved = 0;
  double t = 0.0, s = 0.0;
  for (const auto& r : records) {
    if (!r.proved) continue;
    ++proved;
    t += r.wall_time;
    s += static_cast<double>(r.proof_steps);
  }
  const double rate = static_cast<double>(proved) / static_cast<double>(records.size());
  const double avg_t = t / static_cast<double>(proved);
  const double avg_s = s / static_cast<double>(proved);
  bool ok = records.size() == 10 && summary["total"] == 10 && summary["proved"] == proved &&
            summary["success-rate"].get<double>() == rate && summary["average-time"].get<double>() == avg_t &&
            summary["average-steps"].get<double>() == avg_s;
  std::ostringstream d;
  d << records.size() << " records, " << proved << " proved, rate " << rate << ", avg steps " << avg_s
    << ", avg time " << avg_t << " s; summary " << (ok ? "matches" : "differs");
  return {ok ? Verdict::Pass : Verdict::Fail, d.str()};
}

// 9
Report live_smoke() {
  auto coqtop = coqtop::find_executable("coqtop");
  GenerationConfig g;
  const char* key = std::getenv(g.auth_token_env_var.c_str());
  if (!coqtop || key == nullptr || *key == '\0') {
    return {Verdict::Skip, std::string("needs coqtop on PATH and ") + g.auth_token_env_var + " (" +
                               (coqtop ? "coqtop found" : "no coqtop") + ", " + (key ? "token set" : "no token") + ")"};
  }
  auto dir = testsupport::scratch_dir("accept-live");
  {
    std::ofstream(dir / "smoke.v") << "Require Import ZArith Lia.\nOpen Scope Z_scope.\nLemma t: True.\n"
                                      "Lemma small : forall x : Z, 0 <= x -> x < 5 -> x * 2 < 10.\n";
  }
  std::ostringstream d;
  bool ok = true;
  for (std::string lemma : {"t", "small"}) {
    int code = run_cli("prove smoke.v " + lemma + " --no-history --audit-dir out", dir);
    fs::path cert;
    if (fs::exists(dir / "out")) {
      for (const auto& e : fs::directory_iterator(dir / "out")) {
        auto n = e.path().filename().string();
        if (n.rfind(lemma + "-", 0) == 0 && n.ends_with(".v")) cert = e.path();
      }
    }
    int replay = cert.empty() ? -1 : run_cli("replay smoke.v " + lemma + " " + cert.string(), dir);
    d << lemma << ": prove " << code << ", replay " << replay << "; ";
    ok &= code == 0 && replay == 0;
  }
  fs::remove_all(dir);
  return {ok ? Verdict::Pass : Verdict::Fail, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Report()>>> criteria = {
      {"certificate soundness", certificate_soundness},
      {"motivating example fixture", motivating_example},
      {"persistent-error policy", persistent_error_policy},
      {"query purity and failure atomicity", purity_and_atomicity},
      {"prompt bounds", prompt_bounds},
      {"sanitization wall", sanitization_wall},
      {"round trips", round_trips},
      {"batch metrics arithmetic", batch_metrics},
      {"live smoke test", live_smoke},
  };
  // criterion 5 runs last, over the prompts kept by the others
  std::vector<Report> reports(criteria.size());
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (i == 4) continue;
    try {
      reports[i] = criteria[i].second();
    } catch (const std::exception& e) {
      reports[i] = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
  }
  try {
    reports[4] = criteria[4].second();
  } catch (const std::exception& e) {
    reports[4] = {Verdict::Fail, std::string("exception: ") + e.what()};
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const char* v = reports[i].verdict == Verdict::Pass ? "PASS" : reports[i].verdict == Verdict::Skip ? "SKIP" : "FAIL";
    failures += reports[i].verdict == Verdict::Fail;
    std::cout << "criterion " << (i + 1) << " [" << v << "] " << criteria[i].first << ": " << reports[i].detail << '\n';
  }
  return failures == 0 ? 0 : 1;
}
