#include "proofagent/transcript.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace proofagent {

namespace {

std::string format_record(std::string_view kind, std::size_t seq, std::string_view payload) {
  std::ostringstream rec;
  rec << "@@ " << kind << ' ' << seq << '\n';
  std::istringstream lines{std::string(payload)};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("@@", 0) == 0 || line.rfind("\\", 0) == 0) rec << '\\';
    rec << line << '\n';
  }
  return rec.str();
}

}  // namespace

Transcript::Transcript(std::filesystem::path file) : path_(std::move(file)) {
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot open transcript " + path_.string());
  }
}

void Transcript::append(std::string_view kind, std::string_view payload) {
  std::lock_guard lock(mu_);
  records_.push_back({std::string(kind), std::string(payload)});
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  out << format_record(kind, records_.size(), payload);
}

void Transcript::write_file(const std::filesystem::path& file) const {
  std::lock_guard lock(mu_);
  std::ofstream out(file, std::ios::trunc);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    out << format_record(records_[i].kind, i + 1, records_[i].payload);
  }
  if (!out) throw std::runtime_error("cannot write transcript " + file.string());
}

std::vector<Transcript::Record> Transcript::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<std::string> Transcript::payloads(std::string_view kind) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& r : records_) {
    if (r.kind == kind) out.push_back(r.payload);
  }
  return out;
}

std::vector<Transcript::Record> Transcript::read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read transcript " + file.string());
  std::vector<Record> out;
  std::string line;
  bool fresh = false;
  while (std::getline(in, line)) {
    if (line.rfind("@@ ", 0) == 0) {
      fresh = true;
      std::istringstream hdr(line.substr(3));
      Record r;
      hdr >> r.kind;
      out.push_back(std::move(r));
      continue;
    }
    if (out.empty()) continue;
    if (!line.empty() && line.front() == '\\') line.erase(0, 1);
    auto& payload = out.back().payload;
    if (!fresh) payload += '\n';
    fresh = false;
    payload += line;
  }
  return out;
}

}  // namespace proofagent
