#include "proofagent/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "proofagent/text.hpp"

namespace proofagent {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "prover-path", "prelude",        "timeout",     "model",        "endpoint",  "temperature",
      "max-tokens",  "auth-env",       "err-threshold", "max-attempts", "max-steps", "time-budget",
      "history",     "history-enabled", "audit-dir",  "jobs",         "prompt-budget",
  };
  return keys;
}

namespace {

bool known(const std::string& key) {
  const auto& k = config_keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + v);
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ConfigError(key + ": not a non-negative integer: " + v);
  }
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw ConfigError(key + ": out of range: " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  auto l = to_lower(v);
  if (l == "1" || l == "true" || l == "yes" || l == "on") return true;
  if (l == "0" || l == "false" || l == "no" || l == "off") return false;
  throw ConfigError(key + ": not a boolean: " + v);
}

}  // namespace

Settings parse_config_text(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (!known(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key " + key);
    out[key] = value;
  }
  return out;
}

Settings load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Settings settings_from_env() {
  Settings out;
  for (const auto& key : config_keys()) {
    std::string var = "PROOFAGENT_";
    for (char c : key) var += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(var.c_str())) out[key] = v;
  }
  if (const char* v = std::getenv("PROOF_HISTORY_PATH")) out["history"] = v;
  return out;
}

Settings merge_settings(const std::vector<Settings>& layers) {
  Settings out;
  for (const auto& layer : layers) {
    for (const auto& [k, v] : layer) out[k] = v;
  }
  return out;
}

void apply_settings(const Settings& s, RunConfig& c) {
  for (const auto& [key, v] : s) {
    if (key == "prover-path") {
      c.prover.executable_path = v;
    } else if (key == "prelude") {
      c.prover.prelude_files.clear();
      std::istringstream parts(v);
      std::string p;
      while (std::getline(parts, p, ',')) {
        if (!trim(p).empty()) c.prover.prelude_files.emplace_back(trim(p));
      }
    } else if (key == "timeout") {
      c.prover.sentence_timeout = std::chrono::duration<double>(to_double(key, v));
    } else if (key == "model") {
      c.generation.model_id = v;
    } else if (key == "endpoint") {
      c.generation.endpoint = v;
    } else if (key == "temperature") {
      c.generation.temperature = to_double(key, v);
    } else if (key == "max-tokens") {
      c.generation.max_output_tokens = static_cast<int>(to_count(key, v));
    } else if (key == "auth-env") {
      c.generation.auth_token_env_var = v;
    } else if (key == "err-threshold") {
      c.thresholds.same_error_before_search = to_count(key, v);
    } else if (key == "max-attempts") {
      c.thresholds.max_attempts_per_node = to_count(key, v);
    } else if (key == "max-steps") {
      c.thresholds.max_total_steps = to_count(key, v);
    } else if (key == "time-budget") {
      c.thresholds.wall_clock_budget = std::chrono::duration<double>(to_double(key, v));
    } else if (key == "history") {
      c.history_path = v;
    } else if (key == "history-enabled") {
      c.history_enabled = to_bool(key, v);
    } else if (key == "audit-dir") {
      c.audit_dir = v;
    } else if (key == "prompt-budget") {
      c.prompt_budget = to_count(key, v);
    } else if (key == "jobs") {
      jobs_setting(s);
    } else {
      throw ConfigError("unknown key " + key);
    }
  }
  try {
    c.prover.validate();
    c.generation.validate();
    c.thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.prompt_budget < 1000) throw ConfigError("prompt-budget must be at least 1000");
}

int jobs_setting(const Settings& s) {
  auto it = s.find("jobs");
  if (it == s.end()) return 1;
  auto n = to_count("jobs", it->second);
  if (n < 1 || n > 1024) throw ConfigError("jobs must be between 1 and 1024");
  return static_cast<int>(n);
}

}  // namespace proofagent
