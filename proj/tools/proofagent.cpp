#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "proofagent/batch.hpp"
#include "proofagent/config.hpp"
#include "proofagent/lemma_source.hpp"
#include "proofagent/orchestrator.hpp"
#include "proofagent/text.hpp"

using namespace proofagent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_file;
  Settings flags;
  std::vector<std::string> preludes;
  bool no_history = false;
  std::string backend = "live";
};

// Registers an option that lands in `flags[key]` only when given.
void setting_option(CLI::App& app, CommonFlags& c, const std::string& name, const std::string& key,
                    const std::string& help) {
  app.add_option_function<std::string>(name, [&c, key](const std::string& v) { c.flags[key] = v; }, help);
}

void add_common(CLI::App& app, CommonFlags& c) {
  app.add_option("--config", c.config_file, "flat key = value config file");
  setting_option(app, c, "--prover-path", "prover-path", "coqtop executable, or \"mock\"");
  app.add_option("--prelude", c.preludes, "prelude file loaded before the lemma source");
  setting_option(app, c, "--model", "model", "model id");
  setting_option(app, c, "--endpoint", "endpoint", "chat-completions endpoint");
  setting_option(app, c, "--temperature", "temperature", "sampling temperature (default 0)");
  setting_option(app, c, "--err-threshold", "err-threshold", "identical failures before a context search");
  setting_option(app, c, "--timeout", "timeout", "per-sentence prover timeout, seconds");
  setting_option(app, c, "--max-steps", "max-steps", "step budget per lemma");
  setting_option(app, c, "--history", "history", "history database path");
  app.add_flag("--no-history", c.no_history, "disable history reads and writes");
  app.add_option("--backend", c.backend, "live | replay:<fixture file or directory>");
  setting_option(app, c, "--audit-dir", "audit-dir", "audit bundle directory");
  setting_option(app, c, "--jobs", "jobs", "parallel lemma runs (batch)");
}

struct Resolved {
  RunConfig run;
  Settings settings;
};

Resolved resolve(const CommonFlags& c) {
  Settings flags = c.flags;
  if (!c.preludes.empty()) flags["prelude"] = join(c.preludes, ",");
  if (c.no_history) flags["history-enabled"] = "false";
  Settings file;
  if (!c.config_file.empty()) file = load_config_file(c.config_file);
  Resolved r;
  r.settings = merge_settings({file, settings_from_env(), flags});
  apply_settings(r.settings, r.run);
  jobs_setting(r.settings);
  return r;
}

BackendProvider backend_provider(const std::string& choice) {
  if (choice == "live") {
    return [](const ManifestEntry&) -> std::unique_ptr<GenerationBackend> { return std::make_unique<LiveBackend>(); };
  }
  const std::string prefix = "replay:";
  if (choice.rfind(prefix, 0) != 0) throw UsageError("--backend must be live or replay:<path>");
  std::filesystem::path path = choice.substr(prefix.size());
  if (!std::filesystem::exists(path)) throw UsageError("replay fixture not found: " + path.string());
  const bool dir = std::filesystem::is_directory(path);
  return [path, dir](const ManifestEntry& e) -> std::unique_ptr<GenerationBackend> {
    auto file = dir ? path / (e.lemma_name + ".txt") : path;
    if (!std::filesystem::exists(file)) return std::make_unique<ReplayBackend>(std::vector<std::string>{});
    return ReplayBackend::from_file(file);
  };
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::unique_ptr<HistoryDB> open_history(const RunConfig& config) {
  if (!config.history_enabled) return nullptr;
  return std::make_unique<HistoryDB>(HistoryDB::load(config.history_path));
}

std::vector<std::size_t> parse_edges(const std::string& text) {
  std::vector<std::size_t> edges;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto t = trim(part);
    if (t.empty()) continue;
    if (!std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw UsageError("bad bucket edge: " + t);
    }
    edges.push_back(std::stoull(t));
  }
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw UsageError("bucket edges must be strictly increasing");
  }
  return edges;
}

int cmd_prove(const CommonFlags& common, const std::string& source_path, const std::string& lemma, bool all) {
  auto cfg = resolve(common);
  auto source = read_text(source_path);
  std::vector<std::string> names;
  if (all) {
    names = lemma_names(source);
    if (names.empty()) throw UsageError("no lemmas in " + source_path);
  } else {
    if (lemma.empty()) throw UsageError("give a lemma name or --all");
    names = {lemma};
  }
  auto provider = backend_provider(common.backend);
  auto factory = make_prover_factory(cfg.run.prover);
  auto history = open_history(cfg.run);
  int rc = kExitOk;
  for (const auto& name : names) {
    auto backend = provider(ManifestEntry{source_path, name, std::nullopt});
    auto result = prove_lemma(source, name, cfg.run, *backend, *factory, history.get());
    const auto& st = result.stats();
    std::ostringstream line;
    line << name << ": ";
    if (result.proved()) {
      line << "Proved in " << st.proof_steps << " steps, " << st.total_attempts << " attempts, "
           << st.queries_issued << " queries, " << st.wall_time.count() << " s";
    } else {
      const auto& f = std::get<Failed>(result.outcome);
      line << "Failed (" << to_string(f.reason) << ") " << f.detail;
      rc = kExitFailed;
    }
    try {
      auto paths = write_audit(result, cfg.run);
      line << "  [" << paths.stats.parent_path().string() << "]";
    } catch (const AuditError& e) {
      line << "  [audit not written: " << e.what() << "]";
      rc = kExitFailed;
    }
    std::cout << line.str() << '\n';
  }
  return rc;
}

int cmd_replay(const CommonFlags& common, const std::string& source_path, const std::string& lemma,
               const std::string& certificate) {
  auto cfg = resolve(common);
  auto source = read_text(source_path);
  auto script = parse_certificate(read_text(certificate));
  auto factory = make_prover_factory(cfg.run.prover);
  auto verdict = replay_script(*factory, cfg.run.prover, source, lemma, script);
  if (std::holds_alternative<Verified>(verdict)) {
    std::cout << lemma << ": Verified (" << script.size() << " sentences)\n";
    return kExitOk;
  }
  const auto& r = std::get<RejectedAt>(verdict);
  std::cout << lemma << ": RejectedAt " << r.index << ": " << r.message << '\n';
  return kExitFailed;
}

int cmd_batch(const CommonFlags& common, const std::string& manifest_path, const std::string& edges_text) {
  auto cfg = resolve(common);
  auto entries = load_manifest(manifest_path);
  BatchOptions options;
  options.jobs = jobs_setting(cfg.settings);
  options.bucket_edges = parse_edges(edges_text);
  auto provider = backend_provider(common.backend);
  auto factory = make_prover_factory(cfg.run.prover);
  auto history = open_history(cfg.run);
  auto records = run_batch(entries, cfg.run, *factory, provider, history.get(), options);
  auto summary = summarize(records, options.bucket_edges);
  write_batch_outputs(records, summary, cfg.run.audit_dir);
  std::cout << render_summary_table(records, summary);
  return kExitOk;
}

int cmd_stats(const std::string& manifest_path, const std::string& term_edges, const std::string& hyp_edges) {
  auto entries = load_manifest(manifest_path);
  auto report = complexity_report(entries, parse_edges(term_edges), parse_edges(hyp_edges));
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_history(const CommonFlags& common, const std::string& action, const std::string& theorem, bool yes) {
  auto cfg = resolve(common);
  auto db = HistoryDB::load(cfg.run.history_path);
  if (action == "list") {
    for (const auto& [name, steps] : db.theorem_summary()) std::cout << name << '\t' << steps << '\n';
    return kExitOk;
  }
  if (action == "show") {
    if (theorem.empty()) throw UsageError("history show needs a theorem name");
    if (!db.has_theorem(theorem)) {
      std::cerr << "unknown theorem: " << theorem << '\n';
      return kExitFailed;
    }
    for (const auto& s : db.steps_for(theorem)) std::cout << s.render() << "\n\n";
    return kExitOk;
  }
  if (!yes) throw UsageError("history clear needs --yes");
  db.clear();
  db.save();
  std::cout << "history cleared: " << db.path().string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactic-level proof agent for extracted lemmas"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string source, lemma, certificate, manifest, theorem, action;
  std::string edges = "25,50,75,100", hyp_edges = "0,1,2,4,8";
  bool all = false, yes = false;

  auto* prove = app.add_subcommand("prove", "prove one lemma or every lemma in a file");
  prove->add_option("source", source, "lemma source file")->required();
  prove->add_option("lemma", lemma, "lemma name");
  prove->add_flag("--all", all, "prove every lemma in the file");
  add_common(*prove, common);

  auto* replay = app.add_subcommand("replay", "check a certificate on a fresh session");
  replay->add_option("source", source, "lemma source file")->required();
  replay->add_option("lemma", lemma, "lemma name")->required();
  replay->add_option("certificate", certificate, "certificate file")->required();
  add_common(*replay, common);

  auto* batch = app.add_subcommand("batch", "run a manifest and report success rate and averages");
  batch->add_option("manifest", manifest, "corpus manifest (JSON)")->required();
  batch->add_option("--bucket-edges", edges, "term-count bucket edges, comma separated");
  add_common(*batch, common);

  auto* stats = app.add_subcommand("stats", "term and hypothesis counts for a manifest");
  stats->add_option("manifest", manifest, "corpus manifest (JSON)")->required();
  stats->add_option("--term-edges", edges, "term-count bucket edges");
  stats->add_option("--hypothesis-edges", hyp_edges, "hypothesis-count bucket edges");

  auto* history = app.add_subcommand("history", "inspect the tactic history database");
  history->add_option("action", action, "list | show | clear")
      ->required()
      ->check(CLI::IsMember({"list", "show", "clear"}));
  history->add_option("theorem", theorem, "theorem name for show");
  history->add_flag("--yes", yes, "confirm clear");
  add_common(*history, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (prove->parsed()) return cmd_prove(common, source, lemma, all);
    if (replay->parsed()) return cmd_replay(common, source, lemma, certificate);
    if (batch->parsed()) return cmd_batch(common, manifest, edges);
    if (stats->parsed()) return cmd_stats(manifest, edges, hyp_edges);
    if (history->parsed()) return cmd_history(common, action, theorem, yes);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HistoryError& e) {
    std::cerr << "history error: " << e.what();
    if (e.record_index() >= 0) std::cerr << " (record " << e.record_index() << ")";
    std::cerr << '\n';
    return kExitUsage;
  } catch (const ProverError& e) {
    std::cerr << "prover error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
