#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace proofagent {

/// Append-only audit log shared by a prover session and the model gateway
/// of one run. Each record is written to disk as
///
///   @@ <kind> <seq>
///   <payload lines>
///
/// Kinds used: send, reply, query, query-reply, llm-prompt, llm-response,
/// note.
class Transcript {
 public:
  struct Record {
    std::string kind;
    std::string payload;
  };

  Transcript() = default;
  explicit Transcript(std::filesystem::path file);

  void append(std::string_view kind, std::string_view payload);

  std::vector<Record> records() const;
  std::vector<std::string> payloads(std::string_view kind) const;
  const std::filesystem::path& path() const { return path_; }

  /// Writes every record held in memory to `file` (replacing it).
  void write_file(const std::filesystem::path& file) const;

  /// Parses a transcript file written by this class.
  static std::vector<Record> read_file(const std::filesystem::path& file);

 private:
  mutable std::mutex mu_;
  std::filesystem::path path_;
  std::vector<Record> records_;
};

}  // namespace proofagent
