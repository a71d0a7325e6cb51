#include "proofagent/history.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "proofagent/similarity.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

using nlohmann::json;

std::string StepRecord::render() const {
  std::ostringstream out;
  out << "[" << theorem_name << " #" << tactic_id << "] goal: " << goal_before << "\n  tactic: " << tactic;
  if (!hypotheses_added.empty()) out << "\n  added: " << join(hypotheses_added, "; ");
  out << "\n  result: " << (goal_after.empty() ? "closed" : goal_after);
  return out.str();
}

StepRecord make_step_record(const std::string& theorem, std::size_t tactic_id, const std::string& tactic,
                            const GoalState& before, const std::vector<GoalState>& after) {
  StepRecord r;
  r.theorem_name = theorem;
  r.tactic_id = tactic_id;
  r.tactic = tactic;
  r.goal_before = before.conclusion;
  r.hypotheses_before = before.hypothesis_lines();
  std::vector<std::string> concl;
  for (const auto& g : after) concl.push_back(g.conclusion);
  r.goal_after = join(concl, " ;; ");
  std::set<std::string> old_set(r.hypotheses_before.begin(), r.hypotheses_before.end());
  std::set<std::string> new_set;
  std::vector<std::string> new_lines;  // display order
  for (const auto& g : after) {
    for (const auto& l : g.hypothesis_lines()) {
      if (new_set.insert(l).second) new_lines.push_back(l);
    }
  }
  if (!after.empty()) {
    for (const auto& l : new_lines) {
      if (old_set.count(l) == 0) r.hypotheses_added.push_back(l);
    }
    for (const auto& l : r.hypotheses_before) {
      if (new_set.count(l) == 0) r.hypotheses_removed.push_back(l);
    }
  }
  return r;
}

HistoryDB::HistoryDB(std::filesystem::path storage_path)
    : path_(std::move(storage_path)), mu_(std::make_unique<std::shared_mutex>()) {}

namespace {

[[noreturn]] void violation(const std::string& what, long index) {
  throw HistoryError(HistoryErrorKind::SchemaViolation, what, index);
}

std::vector<std::string> string_list(const json& rec, const char* key, long index) {
  if (!rec.contains(key) || !rec[key].is_array()) violation(std::string("field '") + key + "' must be an array", index);
  std::vector<std::string> out;
  for (const auto& v : rec[key]) {
    if (!v.is_string()) violation(std::string("field '") + key + "' must hold strings", index);
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const json& rec, const char* key, long index) {
  if (!rec.contains(key) || !rec[key].is_string()) violation(std::string("field '") + key + "' must be a string", index);
  return rec[key].get<std::string>();
}

}  // namespace

std::vector<StepRecord> HistoryDB::parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    violation(std::string("history file is not valid JSON: ") + e.what(), -1);
  }
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
    violation("history document must be an object with a \"records\" array", -1);
  }
  std::vector<StepRecord> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  long index = 0;
  for (const auto& rec : doc["records"]) {
    if (!rec.is_object()) violation("record must be an object", index);
    StepRecord r;
    r.theorem_name = string_field(rec, "theorem-name", index);
    if (!rec.contains("tactic-id") || !rec["tactic-id"].is_number_unsigned()) {
      violation("field 'tactic-id' must be a nonnegative integer", index);
    }
    r.tactic_id = rec["tactic-id"].get<std::size_t>();
    r.tactic = string_field(rec, "tactic", index);
    r.goal_before = string_field(rec, "goal-before", index);
    r.goal_after = string_field(rec, "goal-after", index);
    r.hypotheses_before = string_list(rec, "hypotheses-before", index);
    r.hypotheses_added = string_list(rec, "hypotheses-added", index);
    r.hypotheses_removed = string_list(rec, "hypotheses-removed", index);
    if (r.tactic.empty()) violation("empty tactic", index);
    if (r.goal_before.empty()) violation("empty goal-before", index);
    if (!seen.insert({r.theorem_name, r.tactic_id}).second) violation("duplicate (theorem-name, tactic-id)", index);
    out.push_back(std::move(r));
    ++index;
  }
  return out;
}

std::string HistoryDB::to_document(const std::vector<StepRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"theorem-name", r.theorem_name},
                   {"tactic-id", r.tactic_id},
                   {"tactic", r.tactic},
                   {"goal-before", r.goal_before},
                   {"goal-after", r.goal_after},
                   {"hypotheses-before", r.hypotheses_before},
                   {"hypotheses-added", r.hypotheses_added},
                   {"hypotheses-removed", r.hypotheses_removed}});
  }
  return json{{"records", arr}}.dump(2) + "\n";
}

HistoryDB HistoryDB::load(const std::filesystem::path& path) {
  HistoryDB db(path);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return db;
  std::ifstream in(path);
  if (!in) throw HistoryError(HistoryErrorKind::StorageFailure, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  db.records_ = parse_document(buf.str());
  return db;
}

void HistoryDB::save() const {
  std::shared_lock lock(*mu_);
  save_locked();
}

void HistoryDB::save_locked() const {
  if (path_.empty()) return;  // in-memory database
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  auto tmp = path_;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_document(records_);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw HistoryError(HistoryErrorKind::StorageFailure, "cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw HistoryError(HistoryErrorKind::StorageFailure, "cannot replace " + path_.string() + ": " + ec.message());
  }
}

void HistoryDB::record_proof(const std::string& theorem, const std::vector<StepRecord>& steps) {
  if (steps.empty()) throw HistoryError(HistoryErrorKind::InvalidSteps, "no steps to record for " + theorem);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.theorem_name != theorem || s.tactic_id != i || s.tactic.empty() || s.goal_before.empty()) {
      throw HistoryError(HistoryErrorKind::InvalidSteps,
                         "step " + std::to_string(i) + " of " + theorem + " is malformed");
    }
  }
  std::unique_lock lock(*mu_);
  bool dup = std::any_of(records_.begin(), records_.end(),
                         [&](const StepRecord& r) { return r.theorem_name == theorem; });
  if (dup) throw HistoryError(HistoryErrorKind::DuplicateTheorem, theorem + " is already recorded");
  auto old_size = records_.size();
  records_.insert(records_.end(), steps.begin(), steps.end());
  try {
    save_locked();
  } catch (...) {
    records_.resize(old_size);
    throw;
  }
}

std::vector<StepRecord> HistoryDB::top_k_similar(const GoalState& goal, std::size_t k) const {
  std::shared_lock lock(*mu_);
  auto query = make_token_set(goal.conclusion);
  std::vector<TokenSet> candidates;
  candidates.reserve(records_.size());
  for (const auto& r : records_) candidates.push_back(make_token_set(r.goal_before));
  std::vector<StepRecord> out;
  for (auto i : rank_top_k(overlap_scores(query, candidates), k)) out.push_back(records_[i]);
  return out;
}

void HistoryDB::clear() {
  std::unique_lock lock(*mu_);
  records_.clear();
  save_locked();
}

std::vector<StepRecord> HistoryDB::records() const {
  std::shared_lock lock(*mu_);
  return records_;
}

std::vector<StepRecord> HistoryDB::steps_for(const std::string& theorem) const {
  std::shared_lock lock(*mu_);
  std::vector<StepRecord> out;
  for (const auto& r : records_) {
    if (r.theorem_name == theorem) out.push_back(r);
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> HistoryDB::theorem_summary() const {
  std::shared_lock lock(*mu_);
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& r : records_) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == r.theorem_name; });
    if (it == out.end()) {
      out.emplace_back(r.theorem_name, 1);
    } else {
      ++it->second;
    }
  }
  return out;
}

bool HistoryDB::has_theorem(const std::string& theorem) const {
  std::shared_lock lock(*mu_);
  return std::any_of(records_.begin(), records_.end(), [&](const StepRecord& r) { return r.theorem_name == theorem; });
}

std::size_t HistoryDB::size() const {
  std::shared_lock lock(*mu_);
  return records_.size();
}

}  // namespace proofagent
