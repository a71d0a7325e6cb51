#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "proofagent/complexity.hpp"
#include "proofagent/orchestrator.hpp"

namespace proofagent {

enum class Category { NonOverflow, FunctionalCorrectness, LoopInvariant };
std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

struct ManifestEntry {
  std::filesystem::path source_file;
  std::string lemma_name;
  std::optional<Category> category;
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `{"entries": [{"source-file", "lemma-name", "category"?}]}`. Relative
/// source paths resolve against `base_dir`. Existence is not checked here.
std::vector<ManifestEntry> parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct BatchRecord {
  std::string name;
  std::optional<Category> category;
  bool proved = false;
  std::string reason;  // failure reason, empty when proved
  double wall_time = 0.0;
  std::size_t proof_steps = 0;
  std::size_t attempts = 0;
  std::size_t queries = 0;
  std::optional<std::size_t> term_count;

  nlohmann::json to_json() const;
  static BatchRecord from_json(const nlohmann::json& j);
};

struct Tally {
  std::size_t total = 0;
  std::size_t proved = 0;
};

struct BatchSummary {
  std::size_t total = 0;
  std::size_t proved = 0;
  double success_rate = 0.0;
  double average_time = 0.0;   // over proved lemmas
  double average_steps = 0.0;  // over proved lemmas
  std::map<std::string, Tally> per_category;
  std::vector<std::size_t> bucket_edges;
  std::vector<Tally> buckets;  // by term count, edges.size() + 1 entries

  nlohmann::json to_json() const;
};

/// Pure function of the records.
BatchSummary summarize(const std::vector<BatchRecord>& records, const std::vector<std::size_t>& bucket_edges);

using BackendProvider = std::function<std::unique_ptr<GenerationBackend>(const ManifestEntry&)>;

struct BatchOptions {
  int jobs = 1;
  bool write_audits = true;
  std::vector<std::size_t> bucket_edges = {25, 50, 75, 100};
};

/// Runs every entry (in parallel with `jobs` > 1), each with its own
/// session and backend. Records come back in manifest order. Unreadable
/// sources and backend construction errors become Failed records.
std::vector<BatchRecord> run_batch(const std::vector<ManifestEntry>& entries, const RunConfig& config,
                                   const ProverFactory& factory, const BackendProvider& backends,
                                   HistoryDB* history, const BatchOptions& options);

/// Writes batch-records.jsonl and batch-summary.json into `dir`.
void write_batch_outputs(const std::vector<BatchRecord>& records, const BatchSummary& summary,
                         const std::filesystem::path& dir);

std::string render_summary_table(const std::vector<BatchRecord>& records, const BatchSummary& summary);

/// Per-lemma complexity plus bucketed percentages for both metrics.
/// Parse failures are reported per lemma.
nlohmann::json complexity_report(const std::vector<ManifestEntry>& entries,
                                 const std::vector<std::size_t>& term_edges,
                                 const std::vector<std::size_t>& hypothesis_edges);

}  // namespace proofagent
