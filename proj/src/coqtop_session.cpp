#include "proofagent/coqtop_session.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "proofagent/lemma_source.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

namespace coqtop {

namespace {

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

bool is_rule(std::string_view line) {
  auto t = trim(line);
  return t.size() >= 4 && t.find_first_not_of('=') == std::string::npos;
}

}  // namespace

Reply parse_reply(std::string_view raw) {
  std::string text;
  std::size_t i = 0;
  while (i < raw.size()) {
    auto open = raw.find("<prompt>", i);
    if (open == std::string_view::npos) {
      text.append(raw.substr(i));
      break;
    }
    text.append(raw.substr(i, open - i));
    auto close = raw.find("</prompt>", open);
    if (close == std::string_view::npos) break;
    i = close + 9;
  }
  Reply r;
  r.text = trim(text);
  auto err = r.text.find("Error:");
  if (err != std::string::npos) {
    r.error = true;
    r.message = collapse_whitespace(r.text.substr(err + 6));
  } else if (r.text.find("Toplevel input") != std::string::npos) {
    r.error = true;
    r.message = collapse_whitespace(r.text);
  }
  return r;
}

std::optional<GoalState> parse_single_goal(std::string_view text) {
  auto lines = lines_of(text);
  std::size_t rule = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_rule(lines[i])) {
      rule = i;
      break;
    }
  }
  if (rule == lines.size()) return std::nullopt;
  GoalState g;
  // hypotheses: "names : statement" with indented continuation lines
  for (std::size_t i = 0; i < rule; ++i) {
    const auto& line = lines[i];
    auto t = trim(line);
    if (t.empty()) continue;
    if (t.find(" goal") != std::string::npos && std::isdigit(static_cast<unsigned char>(t.front()))) continue;
    if (t.rfind("goal ", 0) == 0 && t.back() == ':') continue;
    auto colon = find_top_level(t, " : ");
    bool head = colon != std::string::npos;
    if (head) {
      for (char c : t.substr(0, colon)) {
        if (!is_ident_char(c) && c != ',' && c != ' ') head = false;
      }
    }
    if (head) {
      Hypothesis h;
      std::istringstream names(t.substr(0, colon));
      std::string n;
      while (std::getline(names, n, ',')) {
        n = trim(n);
        if (!n.empty()) h.names.push_back(n);
      }
      h.statement = trim(t.substr(colon + 3));
      g.hypotheses.push_back(std::move(h));
    } else if (!g.hypotheses.empty()) {
      g.hypotheses.back().statement = collapse_whitespace(g.hypotheses.back().statement + " " + t);
    }
  }
  std::string concl;
  for (std::size_t i = rule + 1; i < lines.size(); ++i) {
    auto t = trim(lines[i]);
    if (t.empty()) break;
    concl += (concl.empty() ? "" : " ") + t;
  }
  g.conclusion = collapse_whitespace(concl);
  if (g.conclusion.empty()) return std::nullopt;
  return g;
}

std::optional<std::vector<GoalState>> parse_goals(std::string_view text) {
  auto t = trim(text);
  if (t.find("No more goals") != std::string::npos ||
      t.find("There are no goals left") != std::string::npos) {
    return std::vector<GoalState>{};
  }
  auto first = parse_single_goal(t);
  if (!first) {
    if (t.find("unfocused goals") != std::string::npos ||
        t.find("This subproof is complete") != std::string::npos) {
      return std::vector<GoalState>{};
    }
    return std::nullopt;
  }
  std::vector<GoalState> out{*first};
  std::size_t pos = 0;
  while ((pos = t.find("\ngoal ", pos)) != std::string::npos) {
    auto is = t.find(" is:", pos);
    if (is == std::string::npos) break;
    auto body_start = t.find('\n', is);
    if (body_start == std::string::npos) break;
    auto body_end = t.find("\n\n", body_start + 1);
    std::string body = t.substr(body_start + 1, body_end == std::string::npos ? std::string::npos
                                                                            : body_end - body_start - 1);
    out.push_back(GoalState{{}, collapse_whitespace(body), ""});
    pos = body_start;
  }
  return out;
}

std::optional<std::string> find_executable(const std::string& exe) {
  if (exe.find('/') != std::string::npos) {
    if (::access(exe.c_str(), X_OK) == 0) return exe;
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) return std::nullopt;
  std::istringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    auto candidate = dir + "/" + exe;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  return std::nullopt;
}

}  // namespace coqtop

namespace {

class CoqtopSession final : public ProverSession {
 public:
  CoqtopSession(const ProverConfig& config, std::shared_ptr<Transcript> transcript)
      : ProverSession(std::move(transcript)), config_(config) {}

  ~CoqtopSession() override { terminate(); }

  void spawn(const std::string& exe) {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw ProverError(ProverErrorKind::ProcessSpawnFailure, std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) throw ProverError(ProverErrorKind::ProcessSpawnFailure, std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::dup2(from_child[1], STDERR_FILENO);
      ::close(to_child[1]);
      ::close(from_child[0]);
      if (!config_.working_directory.empty() && ::chdir(config_.working_directory.c_str()) != 0) _exit(126);
      std::vector<std::string> args{exe, "-emacs", "-q"};
      args.insert(args.end(), config_.extra_args.begin(), config_.extra_args.end());
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv(exe.c_str(), argv.data());
      _exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    ::signal(SIGPIPE, SIG_IGN);
    read_until_prompt(config_.sentence_timeout.count() + 30.0);  // banner
  }

  coqtop::Reply round_trip(const std::string& sentence) {
    std::string line = sentence + "\n";
    std::size_t off = 0;
    while (off < line.size()) {
      auto n = ::write(in_, line.data() + off, line.size() - off);
      if (n <= 0) {
        dead_ = true;
        throw ProverError(ProverErrorKind::SessionDead, "prover process is not accepting input");
      }
      off += static_cast<std::size_t>(n);
    }
    return coqtop::parse_reply(read_until_prompt(config_.sentence_timeout.count() + 5.0));
  }

  void enter_proof(std::string_view source, std::string_view name) {
    for (const auto& p : config_.prelude_files) {
      auto path = p.is_relative() && !config_.working_directory.empty() ? config_.working_directory / p : p;
      std::ifstream in(path);
      std::stringstream buf;
      buf << in.rdbuf();
      for (const auto& s : split_sentences(strip_comments(buf.str()))) {
        auto r = round_trip(s);
        if (r.error) throw ProverError(ProverErrorKind::CompilationFailure, path.string() + ": " + r.message);
      }
    }
    for (const auto& s : split_sentences(strip_comments(source))) {
      auto r = round_trip(s);
      if (r.error) throw ProverError(ProverErrorKind::CompilationFailure, r.message);
      auto decl = trim(std::string_view(s).substr(first_word(s).size()));
      std::size_t end = 0;
      while (end < decl.size() && is_ident_char(decl[end])) ++end;
      if (decl.substr(0, end) == name) {
        auto goals = coqtop::parse_goals(r.text);
        if (!goals || goals->empty()) {
          throw ProverError(ProverErrorKind::ReplyMismatch, "no goal displayed after the lemma statement");
        }
        set_initial_goal(goals->front());
        return;
      }
    }
    throw ProverError(ProverErrorKind::LemmaNotFound, "lemma '" + std::string(name) + "' not found in source");
  }

 protected:
  TacticOutcome send_tactic(const std::string& sentence) override {
    auto secs = static_cast<long>(std::ceil(config_.sentence_timeout.count()));
    bool marker = sentence == "{" || sentence == "}" || sentence == "-" || sentence == "+" || sentence == "*";
    auto r = round_trip(marker ? sentence : "Timeout " + std::to_string(secs) + " " + sentence);
    if (r.error) {
      if (r.message.find("Timeout") != std::string::npos && r.message.size() < 40) {
        throw ProverError(ProverErrorKind::SentenceTimeout, r.message);
      }
      return Failure{r.message, r.text};
    }
    ++depth_;
    auto goals = coqtop::parse_goals(r.text);
    if (!goals) goals = show_all();
    if (goals->empty()) {
      auto all = show_all();
      if (all->empty()) return QedOutcome{r.text};
      goals = all;
    }
    fill_hypotheses(*goals);
    return GoalsOutcome{*goals, r.text};
  }

  std::string send_query(const std::string& sentence) override {
    auto r = round_trip(sentence);
    if (r.error) throw ProverError(ProverErrorKind::QueryRejected, r.message);
    return r.text;
  }

  void send_undo(std::size_t n) override {
    auto r = round_trip("Undo " + std::to_string(n) + ".");
    if (r.error) throw ProverError(ProverErrorKind::ReplyMismatch, r.message);
    depth_ -= n;
  }

  std::optional<Failure> send_qed() override {
    auto r = round_trip("Qed.");
    if (r.error) return Failure{r.message, r.text};
    return std::nullopt;
  }

  void terminate() noexcept override {
    if (pid_ <= 0) return;
    if (in_ >= 0) ::close(in_);
    if (out_ >= 0) ::close(out_);
    in_ = out_ = -1;
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }

 private:
  std::optional<std::vector<GoalState>> show_all() {
    auto r = round_trip("Show.");
    auto goals = coqtop::parse_goals(r.text);
    return goals ? goals : std::vector<GoalState>{};
  }

  void fill_hypotheses(std::vector<GoalState>& goals) {
    for (std::size_t i = 1; i < goals.size(); ++i) {
      auto r = round_trip("Show " + std::to_string(i + 1) + ".");
      if (auto g = coqtop::parse_single_goal(r.text)) goals[i] = *g;
    }
  }

  std::string read_until_prompt(double timeout_s) {
    std::string buf;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    char chunk[4096];
    while (buf.find("</prompt>") == std::string::npos) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        terminate();
        dead_ = true;
        throw ProverError(ProverErrorKind::SentenceTimeout, "no reply within the per-sentence timeout");
      }
      pollfd p{out_, POLLIN, 0};
      int rc = ::poll(&p, 1, static_cast<int>(left.count()));
      if (rc < 0 && errno == EINTR) continue;
      if (rc <= 0) continue;
      auto n = ::read(out_, chunk, sizeof chunk);
      if (n <= 0) {
        dead_ = true;
        throw ProverError(ProverErrorKind::SessionDead, "prover process exited");
      }
      buf.append(chunk, static_cast<std::size_t>(n));
    }
    return buf;
  }

  ProverConfig config_;
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::size_t depth_ = 0;
  bool dead_ = false;
};

}  // namespace

std::unique_ptr<ProverSession> CoqtopFactory::start(const ProverConfig& config, std::string_view lemma_source,
                                                    std::string_view lemma_name,
                                                    std::shared_ptr<Transcript> transcript) const {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ProverError(ProverErrorKind::CompilationFailure, e.what());
  }
  auto exe = coqtop::find_executable(config.executable_path);
  if (!exe) {
    throw ProverError(ProverErrorKind::ProcessSpawnFailure,
                      "prover executable not found: " + config.executable_path);
  }
  try {
    auto names = lemma_names(lemma_source);
    if (std::find(names.begin(), names.end(), lemma_name) == names.end()) {
      throw ProverError(ProverErrorKind::LemmaNotFound,
                        "lemma '" + std::string(lemma_name) + "' not found in source");
    }
  } catch (const SourceError& e) {
    throw ProverError(ProverErrorKind::CompilationFailure, e.what());
  }
  auto session = std::make_unique<CoqtopSession>(config, std::move(transcript));
  session->spawn(*exe);
  session->enter_proof(lemma_source, lemma_name);
  return session;
}

}  // namespace proofagent
