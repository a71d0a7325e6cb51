#include "proofagent/batch.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "proofagent/lemma_source.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::NonOverflow: return "NonOverflow";
    case Category::FunctionalCorrectness: return "FunctionalCorrectness";
    case Category::LoopInvariant: return "LoopInvariant";
  }
  return "?";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (auto c : {Category::NonOverflow, Category::FunctionalCorrectness, Category::LoopInvariant}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::vector<ManifestEntry> parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw ManifestError("manifest must be an object with an \"entries\" array");
  }
  std::vector<ManifestEntry> out;
  std::size_t i = 0;
  for (const auto& e : doc["entries"]) {
    auto where = "manifest entry " + std::to_string(i++);
    if (!e.is_object() || !e.contains("source-file") || !e["source-file"].is_string() ||
        !e.contains("lemma-name") || !e["lemma-name"].is_string()) {
      throw ManifestError(where + ": needs string source-file and lemma-name");
    }
    ManifestEntry m;
    m.source_file = e["source-file"].get<std::string>();
    if (m.source_file.is_relative()) m.source_file = base_dir / m.source_file;
    m.lemma_name = e["lemma-name"].get<std::string>();
    if (m.lemma_name.empty()) throw ManifestError(where + ": empty lemma-name");
    if (e.contains("category") && !e["category"].is_null()) {
      if (!e["category"].is_string()) throw ManifestError(where + ": category must be a string");
      auto c = e["category"].get<std::string>();
      if (!c.empty()) {
        m.category = category_from_string(c);
        if (!m.category) throw ManifestError(where + ": unknown category " + c);
      }
    }
    out.push_back(std::move(m));
  }
  if (out.empty()) throw ManifestError("manifest has no entries");
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot read manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError("manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

nlohmann::json BatchRecord::to_json() const {
  nlohmann::json j = {
      {"name", name},
      {"category", category ? nlohmann::json(std::string(to_string(*category))) : nlohmann::json(nullptr)},
      {"result", proved ? "Proved" : "Failed"},
      {"wall-time", wall_time},
      {"proof-steps", proof_steps},
      {"attempts", attempts},
      {"queries", queries},
      {"term-count", term_count ? nlohmann::json(*term_count) : nlohmann::json(nullptr)},
  };
  if (!proved) j["reason"] = reason;
  return j;
}

BatchRecord BatchRecord::from_json(const nlohmann::json& j) {
  BatchRecord r;
  r.name = j.at("name").get<std::string>();
  if (!j.at("category").is_null()) r.category = category_from_string(j["category"].get<std::string>());
  r.proved = j.at("result").get<std::string>() == "Proved";
  if (j.contains("reason")) r.reason = j["reason"].get<std::string>();
  r.wall_time = j.at("wall-time").get<double>();
  r.proof_steps = j.at("proof-steps").get<std::size_t>();
  r.attempts = j.at("attempts").get<std::size_t>();
  r.queries = j.at("queries").get<std::size_t>();
  if (!j.at("term-count").is_null()) r.term_count = j["term-count"].get<std::size_t>();
  return r;
}

namespace {

nlohmann::json tally_json(const Tally& t) { return {{"total", t.total}, {"proved", t.proved}}; }

}  // namespace

nlohmann::json BatchSummary::to_json() const {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [k, t] : per_category) cats[k] = tally_json(t);
  nlohmann::json bs = nlohmann::json::array();
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    auto b = tally_json(buckets[i]);
    b["range"] = bucket_label(i, bucket_edges);
    bs.push_back(b);
  }
  return {
      {"total", total},
      {"proved", proved},
      {"success-rate", success_rate},
      {"average-time", average_time},
      {"average-steps", average_steps},
      {"per-category", cats},
      {"bucket-edges", bucket_edges},
      {"term-count-buckets", bs},
  };
}

BatchSummary summarize(const std::vector<BatchRecord>& records, const std::vector<std::size_t>& edges) {
  BatchSummary s;
  s.bucket_edges = edges;
  s.buckets.assign(edges.size() + 1, Tally{});
  double time_sum = 0.0;
  double step_sum = 0.0;
  for (const auto& r : records) {
    ++s.total;
    if (r.proved) {
      ++s.proved;
      time_sum += r.wall_time;
      step_sum += static_cast<double>(r.proof_steps);
    }
    if (r.category) {
      auto& t = s.per_category[std::string(to_string(*r.category))];
      ++t.total;
      if (r.proved) ++t.proved;
    }
    if (r.term_count) {
      auto& b = s.buckets[bucket_of(*r.term_count, edges)];
      ++b.total;
      if (r.proved) ++b.proved;
    }
  }
  if (s.total > 0) s.success_rate = static_cast<double>(s.proved) / static_cast<double>(s.total);
  if (s.proved > 0) {
    s.average_time = time_sum / static_cast<double>(s.proved);
    s.average_steps = step_sum / static_cast<double>(s.proved);
  }
  return s;
}

namespace {

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

BatchRecord run_entry(const ManifestEntry& entry, const RunConfig& config, const ProverFactory& factory,
                      const BackendProvider& backends, HistoryDB* history, bool write_audits) {
  BatchRecord rec;
  rec.name = entry.lemma_name;
  rec.category = entry.category;
  auto source = read_file(entry.source_file);
  if (!source) {
    rec.reason = "ProverError: cannot read " + entry.source_file.string();
    return rec;
  }
  try {
    if (auto st = lemma_statement(*source, entry.lemma_name); st && !trim(*st).empty()) {
      rec.term_count = measure(*st).term_count;
    }
  } catch (const std::exception&) {
  }
  std::unique_ptr<GenerationBackend> backend;
  try {
    backend = backends(entry);
  } catch (const std::exception& e) {
    rec.reason = std::string("BackendUnavailable: ") + e.what();
    return rec;
  }
  auto result = prove_lemma(*source, entry.lemma_name, config, *backend, factory, history);
  const auto& st = result.stats();
  rec.proved = result.proved();
  rec.wall_time = st.wall_time.count();
  rec.proof_steps = st.proof_steps;
  rec.attempts = st.total_attempts;
  rec.queries = st.queries_issued;
  if (const auto* f = std::get_if<Failed>(&result.outcome)) {
    rec.reason = std::string(to_string(f->reason)) + ": " + f->detail;
  }
  if (write_audits) {
    try {
      write_audit(result, config);
    } catch (const AuditError& e) {
      if (rec.reason.empty()) rec.reason = std::string("audit: ") + e.what();
    }
  }
  return rec;
}

}  // namespace

std::vector<BatchRecord> run_batch(const std::vector<ManifestEntry>& entries, const RunConfig& config,
                                   const ProverFactory& factory, const BackendProvider& backends,
                                   HistoryDB* history, const BatchOptions& options) {
  std::vector<BatchRecord> out(entries.size());
  const auto n = static_cast<long>(entries.size());
  const int jobs = options.jobs < 1 ? 1 : options.jobs;
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (long i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    out[idx] = run_entry(entries[idx], config, factory, backends, history, options.write_audits);
  }
  return out;
}

void write_batch_outputs(const std::vector<BatchRecord>& records, const BatchSummary& summary,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream lines(dir / "batch-records.jsonl", std::ios::trunc);
  for (const auto& r : records) lines << r.to_json().dump() << '\n';
  std::ofstream sum(dir / "batch-summary.json", std::ios::trunc);
  sum << summary.to_json().dump(2) << '\n';
  if (!lines || !sum) throw AuditError("cannot write batch outputs to " + dir.string());
}

std::string render_summary_table(const std::vector<BatchRecord>& records, const BatchSummary& s) {
  std::ostringstream out;
  out << std::left << std::setw(32) << "lemma" << std::setw(8) << "result" << std::right << std::setw(10)
      << "time(s)" << std::setw(7) << "steps" << std::setw(9) << "attempts" << std::setw(9) << "queries"
      << '\n';
  for (const auto& r : records) {
    out << std::left << std::setw(32) << r.name << std::setw(8) << (r.proved ? "Proved" : "Failed") << std::right
        << std::setw(10) << std::fixed << std::setprecision(3) << r.wall_time << std::setw(7) << r.proof_steps
        << std::setw(9) << r.attempts << std::setw(9) << r.queries << '\n';
  }
  out << "proved " << s.proved << '/' << s.total << "  success rate " << std::setprecision(1)
      << 100.0 * s.success_rate << "%  avg time " << std::setprecision(3) << s.average_time << " s  avg steps "
      << std::setprecision(2) << s.average_steps << '\n';
  return out.str();
}

nlohmann::json complexity_report(const std::vector<ManifestEntry>& entries,
                                 const std::vector<std::size_t>& term_edges,
                                 const std::vector<std::size_t>& hypothesis_edges) {
  nlohmann::json lemmas = nlohmann::json::array();
  std::vector<std::size_t> term_hist(term_edges.size() + 1, 0);
  std::vector<std::size_t> hyp_hist(hypothesis_edges.size() + 1, 0);
  std::size_t measured = 0;
  for (const auto& e : entries) {
    nlohmann::json row = {{"name", e.lemma_name}};
    auto source = read_file(e.source_file);
    try {
      if (!source) throw std::runtime_error("cannot read " + e.source_file.string());
      auto st = lemma_statement(*source, e.lemma_name);
      if (!st) throw std::runtime_error("lemma not found");
      auto c = measure(*st);
      row["term-count"] = c.term_count;
      row["hypothesis-count"] = c.hypothesis_count;
      ++term_hist[bucket_of(c.term_count, term_edges)];
      ++hyp_hist[bucket_of(c.hypothesis_count, hypothesis_edges)];
      ++measured;
    } catch (const std::exception& ex) {
      row["error"] = ex.what();
    }
    lemmas.push_back(row);
  }
  auto hist = [&](const std::vector<std::size_t>& h, const std::vector<std::size_t>& edges) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < h.size(); ++i) {
      double pct = measured == 0 ? 0.0 : 100.0 * static_cast<double>(h[i]) / static_cast<double>(measured);
      out.push_back({{"range", bucket_label(i, edges)}, {"count", h[i]}, {"percent", pct}});
    }
    return out;
  };
  return {
      {"lemmas", lemmas},
      {"measured", measured},
      {"term-count-histogram", hist(term_hist, term_edges)},
      {"hypothesis-count-histogram", hist(hyp_hist, hypothesis_edges)},
  };
}

}  // namespace proofagent
