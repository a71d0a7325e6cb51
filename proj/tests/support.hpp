#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "proofagent/prover.hpp"

namespace testsupport {

inline const std::filesystem::path kFixtures = PROOFAGENT_FIXTURES;

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string wp_source() { return read(kFixtures / "wp_goal.v"); }

inline proofagent::ProverConfig mock_config() {
  proofagent::ProverConfig c;
  c.executable_path = std::string(proofagent::kMockProverPath);
  return c;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("proofagent-" + tag + "-" + std::to_string(rng()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
