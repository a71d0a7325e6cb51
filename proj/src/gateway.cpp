#include "proofagent/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "proofagent/sanitize.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

void GenerationConfig::validate() const {
  if (max_output_tokens <= 0) throw std::invalid_argument("max-output-tokens must be positive");
  if (temperature < 0) throw std::invalid_argument("temperature must be nonnegative");
  if (model_id.empty()) throw std::invalid_argument("model id must not be empty");
}

std::string_view to_string(PromptMode m) {
  switch (m) {
    case PromptMode::Analyze: return "Analyze";
    case PromptMode::FixError: return "FixError";
    case PromptMode::PersistentError: return "PersistentError";
  }
  return "?";
}

std::string_view to_string(GatewayErrorKind k) {
  switch (k) {
    case GatewayErrorKind::BackendUnavailable: return "BackendUnavailable";
    case GatewayErrorKind::EmptyCompletion: return "EmptyCompletion";
    case GatewayErrorKind::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

namespace {

constexpr std::string_view kStatementHeader = "Lemma to prove:\n";
constexpr std::string_view kTreeHeader = "\n## Proof tree\n";
constexpr std::string_view kContextHeader = "\n## Retrieved context\n";
constexpr std::string_view kHistoryHeader = "\n## Top-5 historical tactics\n";
constexpr std::string_view kInstructionHeader = "\n## Task\n";

std::string section(std::string_view header, const std::vector<std::string>& lines) {
  std::string out(header);
  if (lines.empty()) return out + "(none)\n";
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// Keeps whole lines while they fit.
std::vector<std::string> fit_lines(const std::vector<std::string>& lines, std::size_t budget) {
  std::vector<std::string> out;
  std::size_t used = 0;
  for (const auto& l : lines) {
    if (used + l.size() + 1 > budget) break;
    used += l.size() + 1;
    out.push_back(l);
  }
  return out;
}

std::string instructions_for(const PromptBundle& b, std::size_t budget) {
  std::string out;
  switch (b.mode) {
    case PromptMode::Analyze:
      out =
          "Analyze the current proof tree and Top-5 historical tactics. If sufficient information is available, "
          "generate a tactic to proceed. Otherwise, output a query command to retrieve additional context.\n";
      break;
    case PromptMode::FixError:
      for (const auto& e : b.error_feedback) {
        out += "The previous tactic `" + e.tactic +
               "` failed to apply to the current subgoal with the following error message from Rocq: " +
               e.message + "\n";
      }
      out += "Analyze the error and generate a corrected tactic.\n";
      break;
    case PromptMode::PersistentError:
      out = "The agent has repeatedly generated the following failed tactics for the current subgoal multiple "
            "times:\n";
      for (const auto& t : b.recent_failed_tactics) out += "  " + t + "\n";
      if (!b.error_feedback.empty()) out += "Last error: " + b.error_feedback.back().message + "\n";
      out += "Analyze the current proof tree and determine what additional context is needed to proceed.\n"
             "Output a query command to retrieve the necessary context information.\n";
      break;
  }
  if (b.tactic_required) out += "You have issued several queries in a row. Output a tactic now, not a query.\n";
  std::string tail =
      "Answer with exactly one sentence ending in '.': a tactic, or one of Search, Print, Locate, About, Check.\n";
  if (out.size() + tail.size() > budget) {
    std::size_t keep = budget > tail.size() ? budget - tail.size() : 0;
    out = midline_truncate(out, keep > 0 ? keep - 1 : 0);
    if (!out.empty()) out += "\n";
  }
  out += tail;
  if (out.size() > budget) out = out.substr(0, budget);
  return out;
}

}  // namespace

std::string PromptBundle::render() const {
  std::string out(kStatementHeader);
  out += lemma_statement + "\n";
  out += kTreeHeader;
  out += tree_rendering;
  out += section(kContextHeader, context_items);
  out += section(kHistoryHeader, history_snippets);
  out += kInstructionHeader;
  out += instructions;
  return out;
}

PromptBundle build_prompt(PromptMode mode, const std::string& lemma_statement, const ProofTree& tree,
                          const std::vector<StepRecord>& history, ContextSet& context,
                          const std::vector<FailedAttempt>& errors, bool tactic_required, std::size_t budget) {
  PromptBundle b;
  b.mode = mode;
  b.lemma_statement = lemma_statement;
  b.tactic_required = tactic_required;
  // fixed section headers plus the "(none)" markers
  const std::size_t overhead = kStatementHeader.size() + 1 + kTreeHeader.size() + kContextHeader.size() +
                               kHistoryHeader.size() + kInstructionHeader.size() + 2 * 7;
  if (lemma_statement.size() + overhead > budget) {
    throw GatewayError(GatewayErrorKind::BudgetExceeded, "lemma statement alone exceeds the prompt budget");
  }
  const std::size_t rest = budget - lemma_statement.size() - overhead;
  const std::size_t tree_share = rest * 40 / 100;
  const std::size_t context_share = rest * 30 / 100;
  const std::size_t history_share = rest * 20 / 100;
  const std::size_t instruction_share = rest - tree_share - context_share - history_share;

  // tree outline, then the focused goal in full (each half of the share when both are long)
  std::string goal_text;
  if (auto f = tree.focus()) goal_text = "\nFocused subgoal " + node_label(*f) + ":\n" + tree.node(*f).goal.render() + "\n";
  std::size_t goal_cap = std::min(goal_text.size(), tree_share / 2);
  if (goal_text.size() > goal_cap) goal_text = midline_truncate(goal_text, goal_cap);
  b.tree_rendering = tree.render(std::max<std::size_t>(1, tree_share - goal_text.size())) + goal_text;
  if (b.tree_rendering.size() > tree_share) b.tree_rendering = b.tree_rendering.substr(0, tree_share);

  GoalState focus_goal = tree.focus() ? tree.node(*tree.focus()).goal : tree.root().goal;
  std::vector<std::string> ctx;
  for (const auto& it : context.select_for_prompt(focus_goal, context_share)) {
    if (ctx.size() == kMaxContextItems) break;
    ctx.push_back(it.render());
  }
  b.context_items = fit_lines(ctx, context_share);

  std::vector<std::string> hist;
  for (std::size_t i = 0; i < history.size() && i < kMaxHistorySnippets; ++i) {
    hist.push_back(midline_truncate(history[i].render(), std::max<std::size_t>(history_share / kMaxHistorySnippets, 8)));
  }
  b.history_snippets = fit_lines(hist, history_share);

  b.error_feedback = errors;
  for (const auto& e : errors) b.recent_failed_tactics.push_back(e.tactic);
  if (mode == PromptMode::FixError && b.error_feedback.empty()) {
    throw std::invalid_argument("FixError prompt needs error feedback");
  }
  if (mode == PromptMode::PersistentError && b.recent_failed_tactics.empty()) {
    throw std::invalid_argument("PersistentError prompt needs failed tactics");
  }
  b.instructions = instructions_for(b, instruction_share);
  return b;
}

// ---------------------------------------------------------------------------
// Decision parsing

namespace {

std::string strip_fences(std::string_view raw) {
  auto open = raw.find("```");
  if (open == std::string_view::npos) return std::string(raw);
  auto body = raw.find('\n', open);
  if (body == std::string_view::npos) return std::string(raw.substr(open + 3));
  auto close = raw.find("```", body);
  return std::string(raw.substr(body + 1, close == std::string_view::npos ? std::string_view::npos : close - body - 1));
}

std::string strip_inline_code(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), '`'), s.end());
  return s;
}

// "I will search: Search (...)." -> "Search (...)."
std::string strip_prose_prefix(const std::string& s) {
  auto colon = find_top_level(s, ": ");
  if (colon == std::string::npos) colon = find_top_level(s, ":\n");
  if (colon == std::string::npos) return s;
  auto prefix = trim(std::string_view(s).substr(0, colon));
  if (prefix.find_first_of("()[]{}") != std::string::npos) return s;
  // "Hypothesis H : False." is a declaration, not prose
  if (is_vernacular_head(first_word(prefix)) || forbidden_word(prefix)) return s;
  std::istringstream words(prefix);
  std::string w;
  std::size_t n = 0;
  while (words >> w) ++n;
  if (n < 2) return s;
  return trim(std::string_view(s).substr(colon + 1));
}

std::string strip_bullets(std::string s) {
  s = trim(s);
  while (s.size() >= 2 && (s.front() == '-' || s.front() == '+' || s.front() == '*')) {
    std::size_t i = 0;
    while (i < s.size() && s[i] == s.front()) ++i;
    if (i >= s.size() || !std::isspace(static_cast<unsigned char>(s[i]))) break;
    s = trim(std::string_view(s).substr(i));
  }
  return s;
}

}  // namespace

AgentDecision parse_decision(std::string_view raw) {
  std::string text = strip_inline_code(strip_comments(strip_fences(raw)));
  text = strip_bullets(strip_prose_prefix(trim(text)));
  std::string rest;
  auto sentences = split_sentences(text, &rest);
  std::string candidate;
  if (!sentences.empty()) {
    candidate = strip_bullets(strip_prose_prefix(sentences.front()));
    if (!candidate.empty() && candidate.back() != '.') {
      // the prose prefix swallowed the sentence end; keep the remainder
      candidate = sentences.front();
    }
  } else {
    candidate = trim(text);
    if (is_structure_marker(candidate)) return EmitTactic{candidate};
    return GiveUp{"no complete sentence in completion", collapse_whitespace(candidate)};
  }
  candidate = collapse_whitespace(candidate);

  auto head = first_word(candidate);
  if (auto kind = query_kind_from_string(head)) {
    auto arg = trim(std::string_view(candidate).substr(head.size()));
    while (!arg.empty() && arg.back() == '.') arg = trim(arg.substr(0, arg.size() - 1));
    if (!arg.empty()) {
      if (auto w = forbidden_word(arg)) return GiveUp{*w, candidate};
      return EmitQuery{*kind, arg};
    }
  }
  if (auto why = sanitization_violation(candidate)) return GiveUp{*why, candidate};
  return EmitTactic{candidate};
}

std::string canonical_text(const AgentDecision& d) {
  if (const auto* t = std::get_if<EmitTactic>(&d)) return t->sentence;
  if (const auto* q = std::get_if<EmitQuery>(&d)) return std::string(to_string(q->kind)) + " " + q->argument + ".";
  return std::get<GiveUp>(d).text;
}

std::string describe(const AgentDecision& d) {
  if (const auto* t = std::get_if<EmitTactic>(&d)) return "EmitTactic " + t->sentence;
  if (const auto* q = std::get_if<EmitQuery>(&d)) {
    return "EmitQuery " + std::string(to_string(q->kind)) + " " + q->argument;
  }
  return "GiveUp " + std::get<GiveUp>(d).reason;
}

// ---------------------------------------------------------------------------
// Backends

std::vector<std::string> parse_fixture(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  bool any = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) == kFixtureDelimiter) {
      out.push_back(cur);
      cur.clear();
      any = false;
      continue;
    }
    if (any) cur += "\n";
    cur += line;
    any = true;
  }
  if (any && !trim(cur).empty()) out.push_back(cur);
  return out;
}

std::string format_fixture(const std::vector<std::string>& completions) {
  std::string out;
  for (const auto& c : completions) {
    out += c;
    if (!c.empty() && c.back() != '\n') out += "\n";
    out += std::string(kFixtureDelimiter) + "\n";
  }
  return out;
}

ReplayBackend::ReplayBackend(std::vector<std::string> completions) : completions_(std::move(completions)) {}

std::unique_ptr<ReplayBackend> ReplayBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GatewayError(GatewayErrorKind::BackendUnavailable, "cannot read fixture " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return std::make_unique<ReplayBackend>(parse_fixture(buf.str()));
}

std::string ReplayBackend::complete(const PromptBundle&, const GenerationConfig&) {
  if (next_ >= completions_.size()) {
    throw GatewayError(GatewayErrorKind::BackendUnavailable, "replay fixture exhausted");
  }
  return completions_[next_++];
}

LiveBackend::LiveBackend(Sleeper sleeper) : sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
}

nlohmann::json LiveBackend::request_body(const PromptBundle& bundle, const GenerationConfig& config) {
  return {{"model", config.model_id},
          {"messages",
           nlohmann::json::array({{{"role", "system"},
                                   {"content",
                                    "You are an expert Rocq/Coq proof engineer driving an interactive proof. "
                                    "Reply with a single Coq sentence."}},
                                  {{"role", "user"}, {"content", bundle.render()}}})},
          {"temperature", config.temperature},
          {"max_tokens", config.max_output_tokens}};
}

std::string LiveBackend::complete(const PromptBundle& bundle, const GenerationConfig& config) {
  const char* token = std::getenv(config.auth_token_env_var.c_str());
  if (token == nullptr || *token == '\0') {
    throw GatewayError(GatewayErrorKind::BackendUnavailable,
                       "credential variable " + config.auth_token_env_var + " is not set");
  }
  // split "scheme://host[:port]/path"
  auto scheme_end = config.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw GatewayError(GatewayErrorKind::BackendUnavailable, "malformed endpoint " + config.endpoint);
  }
  auto path_start = config.endpoint.find('/', scheme_end + 3);
  std::string base = config.endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : config.endpoint.substr(path_start);

  const std::string body = request_body(bundle, config).dump();
  const double backoff[] = {1.0, 2.0, 4.0};
  std::string last_error;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (attempt > 0) sleeper_(std::chrono::duration<double>(backoff[attempt - 1]));
    std::unique_ptr<httplib::Client> cli;
    try {
      cli = std::make_unique<httplib::Client>(base);
    } catch (const std::exception& e) {
      throw GatewayError(GatewayErrorKind::BackendUnavailable, std::string("unsupported endpoint: ") + e.what());
    }
    if (!cli->is_valid()) {
      throw GatewayError(GatewayErrorKind::BackendUnavailable, "unsupported endpoint " + config.endpoint);
    }
    cli->set_connection_timeout(10);
    cli->set_read_timeout(120);
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + token}};
    auto res = cli->Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw GatewayError(GatewayErrorKind::BackendUnavailable,
                         "HTTP " + std::to_string(res->status) + ": " + midline_truncate(res->body, 300));
    }
    try {
      auto doc = nlohmann::json::parse(res->body);
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const std::exception& e) {
      throw GatewayError(GatewayErrorKind::BackendUnavailable, std::string("malformed completion response: ") + e.what());
    }
  }
  throw GatewayError(GatewayErrorKind::BackendUnavailable, "giving up after 3 retries: " + last_error);
}

Decision decide_next(const PromptBundle& bundle, const GenerationConfig& config, GenerationBackend& backend,
                     Transcript* transcript) {
  const auto prompt = bundle.render();
  if (transcript != nullptr) {
    transcript->append("llm-prompt", "mode " + std::string(to_string(bundle.mode)) + "\n" + prompt);
  }
  std::string raw;
  try {
    raw = backend.complete(bundle, config);
  } catch (const GatewayError& e) {
    if (transcript != nullptr) transcript->append("note", std::string("backend error: ") + e.what());
    throw;
  }
  if (transcript != nullptr) transcript->append("llm-response", raw);
  if (trim(raw).empty()) throw GatewayError(GatewayErrorKind::EmptyCompletion, "empty completion");
  return Decision{parse_decision(raw), raw};
}

}  // namespace proofagent
