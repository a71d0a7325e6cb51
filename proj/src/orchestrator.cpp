#include "proofagent/orchestrator.hpp"

#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "proofagent/context.hpp"
#include "proofagent/lemma_source.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::StepBudget: return "StepBudget";
    case FailureReason::TimeBudget: return "TimeBudget";
    case FailureReason::NodeAttemptCap: return "NodeAttemptCap";
    case FailureReason::BackendUnavailable: return "BackendUnavailable";
    case FailureReason::ProverError: return "ProverError";
    case FailureReason::GiveUp: return "GiveUp";
  }
  return "?";
}

const RunStats& RunResult::stats() const {
  if (const auto* p = std::get_if<Proved>(&outcome)) return p->stats;
  return std::get<Failed>(outcome).stats;
}

const ProofTree* RunResult::tree() const {
  if (const auto* p = std::get_if<Proved>(&outcome)) return &p->tree;
  const auto& f = std::get<Failed>(outcome);
  return f.tree ? &*f.tree : nullptr;
}

namespace {

FailureReason from_abort(AbortReason r) {
  switch (r) {
    case AbortReason::StepBudget: return FailureReason::StepBudget;
    case AbortReason::TimeBudget: return FailureReason::TimeBudget;
    case AbortReason::NodeAttemptCap: return FailureReason::NodeAttemptCap;
  }
  return FailureReason::ProverError;
}

bool same_goal(const GoalState& a, const GoalState& b) {
  return a.conclusion == b.conclusion && a.hypotheses == b.hypotheses;
}

class Run {
 public:
  Run(const std::string& source, const std::string& name, const RunConfig& config, GenerationBackend& backend,
      const ProverFactory& factory, HistoryDB* history, std::shared_ptr<Transcript> transcript)
      : source_(source),
        name_(name),
        config_(config),
        backend_(backend),
        factory_(factory),
        history_(config.history_enabled ? history : nullptr),
        feedback_(config.thresholds),
        context_(config.context_capacity) {
    result_.lemma_name = name;
    result_.transcript = transcript ? std::move(transcript) : std::make_shared<Transcript>();
  }

  RunResult execute() {
    start_ = std::chrono::steady_clock::now();
    try {
      session_ = factory_.start(config_.prover, source_, name_, result_.transcript);
    } catch (const ProverError& e) {
      return fail(FailureReason::ProverError, std::string(to_string(e.kind())) + ": " + e.what());
    }
    tree_ = ProofTree(session_->initial_goal());
    statement_ = session_->initial_goal().conclusion;
    try {
      loop();
    } catch (const ProverError& e) {
      fail(FailureReason::ProverError, std::string(to_string(e.kind())) + ": " + e.what());
    } catch (const std::exception& e) {
      fail(FailureReason::ProverError, std::string("internal error: ") + e.what());
    }
    session_->close();
    return std::move(result_);
  }

 private:
  void note(const std::string& text) { result_.transcript->append("note", text); }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  RunResult& fail(FailureReason reason, const std::string& detail) {
    stats_.wall_time = std::chrono::duration<double>(elapsed());
    std::optional<ProofTree> tree;
    if (session_) tree = tree_;
    note("run failed: " + std::string(to_string(reason)) + ": " + detail);
    result_.outcome = Failed{reason, detail, stats_, std::move(tree)};
    done_ = true;
    return result_;
  }

  void loop() {
    while (!done_) {
      if (auto a = feedback_.check_budgets(steps_, std::chrono::duration<double>(elapsed()))) {
        record_directive(*a);
        fail(from_abort(a->reason), a->detail);
        return;
      }
      const NodeId focus = *tree_.focus();
      const GoalState& goal = tree_.node(focus).goal;
      std::vector<StepRecord> hist;
      if (history_ != nullptr) hist = history_->top_k_similar(goal, kMaxHistorySnippets);

      PromptBundle bundle = build_prompt(mode_, statement_, tree_, hist, context_, errors_, tactic_required_,
                                         config_.prompt_budget);
      result_.prompts.push_back({bundle.mode, bundle.tactic_required, bundle.history_snippets.size(),
                                 bundle.context_items.size(), bundle.render().size()});
      Decision d;
      try {
        d = decide_next(bundle, config_.generation, backend_, result_.transcript.get());
      } catch (const GatewayError& e) {
        std::string detail = e.what();
        if (e.kind() != GatewayErrorKind::BackendUnavailable) detail = std::string(to_string(e.kind())) + ": " + detail;
        fail(FailureReason::BackendUnavailable, detail);
        return;
      }
      note("decision: " + describe(d.decision));

      if (const auto* g = std::get_if<GiveUp>(&d.decision)) {
        fail(FailureReason::GiveUp, g->reason);
        return;
      }
      if (const auto* q = std::get_if<EmitQuery>(&d.decision)) {
        handle_query(focus, *q);
      } else {
        handle_tactic(focus, std::get<EmitTactic>(d.decision).sentence);
      }
    }
  }

  void handle_query(const NodeId& focus, const EmitQuery& q) {
    const std::string text = canonical_text(q);
    if (tactic_required_) {
      ++steps_;
      ++stats_.total_attempts;
      failure(focus, text, "query refused: a tactic is required after " +
                               std::to_string(consecutive_queries_) + " consecutive queries");
      return;
    }
    ++steps_;
    ++stats_.queries_issued;
    ++consecutive_queries_;
    try {
      auto result = session_->run_query(q.kind, q.argument);
      auto added = context_.ingest(q.kind, q.argument, result, steps_);
      note("query added " + std::to_string(added) + " context item(s)");
    } catch (const ProverError& e) {
      if (e.kind() == ProverErrorKind::SessionDead) throw;
      note(std::string("query rejected: ") + e.what());
    }
    feedback_.on_search_issued(focus);
    if (consecutive_queries_ >= config_.query_streak_limit) tactic_required_ = true;
    mode_ = PromptMode::Analyze;
    errors_.clear();
  }

  void handle_tactic(const NodeId& focus, const std::string& tactic) {
    consecutive_queries_ = 0;
    tactic_required_ = false;
    ++steps_;
    ++stats_.total_attempts;
    const GoalState before = tree_.node(focus).goal;
    const auto goals_before = session_->goals();

    ProverReply reply;
    try {
      reply = session_->apply_tactic(tactic);
    } catch (const ProverError& e) {
      if (e.kind() == ProverErrorKind::SanitizationRejected ||
          (e.kind() == ProverErrorKind::SentenceTimeout && !session_->is_closed())) {
        failure(focus, tactic, std::string(to_string(e.kind())) + ": " + e.what());
        return;
      }
      throw;
    }
    if (const auto* f = std::get_if<Failure>(&reply)) {
      failure(focus, tactic, f->message);
      return;
    }
    const auto goals_after = session_->goals();
    if (!goals_after.empty() && goals_after.size() == goals_before.size() &&
        same_goal(goals_after.front(), goals_before.front())) {
      session_->rollback(1);
      failure(focus, tactic, "no progress: goal unchanged");
      return;
    }

    auto outcome = tree_.record_application(focus, tactic, reply);
    feedback_.on_success(focus);
    std::vector<GoalState> produced;
    for (const auto& c : outcome.children) produced.push_back(tree_.node(c).goal);
    steps_log_.push_back(make_step_record(name_, steps_log_.size(), tactic, before, produced));
    note("applied at " + node_label(focus) + ": " + std::string(to_string(outcome.kind)));
    mode_ = PromptMode::Analyze;
    errors_.clear();

    if (tree_.is_complete()) finish();
  }

  void failure(const NodeId& focus, const std::string& tactic, const std::string& message) {
    ++stats_.failed_attempts;
    auto rec = feedback_.record_failure(focus, tactic, message, steps_);
    Directive d = feedback_.on_failure(rec);
    record_directive(d);
    if (const auto* a = std::get_if<Abort>(&d)) {
      fail(from_abort(a->reason), a->detail);
      return;
    }
    if (const auto* s = std::get_if<SearchContext>(&d)) {
      mode_ = PromptMode::PersistentError;
      errors_.clear();
      for (const auto& r : s->recent_failures) errors_.push_back({r.tactic, r.message});
    } else {
      mode_ = PromptMode::FixError;
      errors_ = {{tactic, message}};
    }
  }

  void record_directive(const Directive& d) {
    auto text = describe(d);
    result_.directives.push_back(text);
    note("directive: " + text);
  }

  void finish() {
    if (auto qed = session_->finish_proof()) {
      fail(FailureReason::ProverError, "proof not accepted: " + qed->message);
      return;
    }
    ProofScript script = tree_.linearize();
    note("replaying certificate on a fresh session");
    auto verdict = replay_script(factory_, config_.prover, source_, name_, script.sentences());
    if (const auto* r = std::get_if<RejectedAt>(&verdict)) {
      fail(FailureReason::ProverError,
           "certificate replay rejected at sentence " + std::to_string(r->index) + ": " + r->message);
      return;
    }
    stats_.proof_steps = script.tactic_count();
    if (history_ != nullptr) {
      try {
        history_->record_proof(name_, steps_log_);
      } catch (const HistoryError& e) {
        note(std::string("history not updated: ") + e.what());
      }
    }
    stats_.wall_time = std::chrono::duration<double>(elapsed());
    result_.outcome = Proved{std::move(script), tree_, stats_};
    done_ = true;
  }

  const std::string& source_;
  const std::string& name_;
  const RunConfig& config_;
  GenerationBackend& backend_;
  const ProverFactory& factory_;
  HistoryDB* history_;

  RunResult result_;
  std::unique_ptr<ProverSession> session_;
  ProofTree tree_;
  std::string statement_;
  FeedbackController feedback_;
  ContextSet context_;
  RunStats stats_;
  std::vector<StepRecord> steps_log_;
  std::chrono::steady_clock::time_point start_;

  PromptMode mode_ = PromptMode::Analyze;
  std::vector<FailedAttempt> errors_;
  std::size_t consecutive_queries_ = 0;
  bool tactic_required_ = false;
  std::size_t steps_ = 0;
  bool done_ = false;
};

}  // namespace

RunResult prove_lemma(const std::string& lemma_source, const std::string& lemma_name, const RunConfig& config,
                      GenerationBackend& backend, const ProverFactory& factory, HistoryDB* history,
                      std::shared_ptr<Transcript> transcript) {
  Run run(lemma_source, lemma_name, config, backend, factory, history, std::move(transcript));
  return run.execute();
}

nlohmann::json stats_document(const RunResult& result) {
  const auto& s = result.stats();
  nlohmann::json doc = {
      {"lemma", result.lemma_name},
      {"result", result.proved() ? "Proved" : "Failed"},
      {"total-attempts", s.total_attempts},
      {"failed-attempts", s.failed_attempts},
      {"queries-issued", s.queries_issued},
      {"wall-time", s.wall_time.count()},
      {"proof-steps", s.proof_steps},
  };
  if (const auto* f = std::get_if<Failed>(&result.outcome)) {
    doc["reason"] = std::string(to_string(f->reason));
    doc["detail"] = f->detail;
  }
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& p : result.prompts) modes.push_back(std::string(to_string(p.mode)));
  doc["prompt-modes"] = modes;
  doc["directives"] = result.directives;
  return doc;
}

std::string certificate_text(const ProofScript& script) { return "Proof.\n" + script.text() + "Qed.\n"; }

namespace {

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%dT%H%M%S") << std::setw(3) << std::setfill('0') << ms << "Z";
  return out.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw AuditError("cannot write " + p.string());
}

}  // namespace

AuditPaths write_audit(const RunResult& result, const RunConfig& config, std::string timestamp) {
  if (timestamp.empty()) timestamp = utc_timestamp();
  std::error_code ec;
  std::filesystem::create_directories(config.audit_dir, ec);
  if (ec || !std::filesystem::is_directory(config.audit_dir)) {
    throw AuditError("audit directory is not writable: " + config.audit_dir.string());
  }
  const auto stem = result.lemma_name + "-" + timestamp;
  AuditPaths paths;
  paths.tree = config.audit_dir / (stem + ".tree.json");
  paths.stats = config.audit_dir / (stem + ".stats.json");
  paths.transcript = config.audit_dir / (stem + ".transcript.log");

  const ProofTree* tree = result.tree();
  write_text(paths.tree, (tree != nullptr ? tree->serialize() : nlohmann::json(nullptr)).dump(2) + "\n");
  write_text(paths.stats, stats_document(result).dump(2) + "\n");
  try {
    if (result.transcript) {
      result.transcript->write_file(paths.transcript);
    } else {
      write_text(paths.transcript, "");
    }
  } catch (const std::runtime_error& e) {
    throw AuditError(e.what());
  }
  if (const auto* p = std::get_if<Proved>(&result.outcome)) {
    paths.certificate = config.audit_dir / (stem + ".v");
    write_text(*paths.certificate, certificate_text(p->script));
  }
  return paths;
}

}  // namespace proofagent
