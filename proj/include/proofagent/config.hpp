#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "proofagent/orchestrator.hpp"

namespace proofagent {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Settings = std::map<std::string, std::string>;

/// Keys understood by apply_settings, in documentation order.
const std::vector<std::string>& config_keys();

/// Flat `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed lines are ConfigError.
Settings parse_config_text(const std::string& text);
Settings load_config_file(const std::filesystem::path& path);

/// PROOFAGENT_<KEY> for every known key (upper case, '-' as '_'), plus
/// PROOF_HISTORY_PATH for `history`.
Settings settings_from_env();

/// Later layers win.
Settings merge_settings(const std::vector<Settings>& layers);

/// Applies settings onto `config` and validates the result.
void apply_settings(const Settings& settings, RunConfig& config);

/// Parallel jobs for batch runs (`jobs` key, default 1).
int jobs_setting(const Settings& settings);

}  // namespace proofagent
