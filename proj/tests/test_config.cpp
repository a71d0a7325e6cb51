#include <doctest.h>

#include <cstdlib>

#include "proofagent/config.hpp"

using namespace proofagent;

TEST_CASE("file parsing") {
  auto s = parse_config_text("# comment\nmodel = m1\n  err-threshold=5  # trailing\n\n");
  CHECK(s.at("model") == "m1");
  CHECK(s.at("err-threshold") == "5");
  CHECK_THROWS_AS(parse_config_text("nonsense"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("colour = red"), ConfigError);
}

TEST_CASE("precedence: flags over env over file over defaults") {
  setenv("PROOFAGENT_MODEL", "from-env", 1);
  setenv("PROOFAGENT_MAX_STEPS", "77", 1);
  setenv("PROOF_HISTORY_PATH", "/tmp/env-history.json", 1);
  auto file = parse_config_text("model = from-file\ntimeout = 9\nmax-steps = 10\n");
  Settings flags = {{"max-steps", "99"}};
  RunConfig c;
  apply_settings(merge_settings({file, settings_from_env(), flags}), c);
  CHECK(c.generation.model_id == "from-env");
  CHECK(c.thresholds.max_total_steps == 99);
  CHECK(c.prover.sentence_timeout.count() == 9.0);
  CHECK(c.history_path == "/tmp/env-history.json");
  CHECK(c.thresholds.same_error_before_search == 3);
  CHECK(c.generation.temperature == 0.0);
  unsetenv("PROOFAGENT_MODEL");
  unsetenv("PROOFAGENT_MAX_STEPS");
  unsetenv("PROOF_HISTORY_PATH");
}

TEST_CASE("invalid values") {
  RunConfig c;
  CHECK_THROWS_AS(apply_settings({{"timeout", "-1"}}, c), ConfigError);
  CHECK_THROWS_AS(apply_settings({{"err-threshold", "x"}}, c), ConfigError);
  CHECK_THROWS_AS(apply_settings({{"history-enabled", "maybe"}}, c), ConfigError);
  CHECK_THROWS_AS(apply_settings({{"jobs", "0"}}, c), ConfigError);
  CHECK_THROWS_AS(apply_settings({{"prelude", "/no/such/prelude.v"}}, c), ConfigError);
  CHECK(jobs_setting({}) == 1);
  CHECK(jobs_setting({{"jobs", "4"}}) == 4);
}
