#include "proofagent/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace proofagent {

namespace {

constexpr std::array<std::string_view, 12> kStopWords = {
    "forall", "exists", "fun", "let", "in", "match", "with", "end", "if", "then", "else", "_"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string midline_truncate(std::string_view s, std::size_t max_chars) {
  if (s.size() <= max_chars) return std::string(s);
  constexpr std::string_view ellipsis = "...";
  if (max_chars <= ellipsis.size()) return std::string(s.substr(0, max_chars));
  std::size_t keep = max_chars - ellipsis.size();
  std::size_t head = (keep + 1) / 2;
  std::size_t tail = keep - head;
  std::string out(s.substr(0, head));
  out += ellipsis;
  out += s.substr(s.size() - tail);
  return out;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'' || c == '.';
}

std::vector<std::string> identifier_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_ident_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_ident_char(s[j])) ++j;
    std::string_view tok = s.substr(i, j - i);
    while (!tok.empty() && tok.front() == '.') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == '.') tok.remove_suffix(1);
    if (!tok.empty() &&
        std::find(kStopWords.begin(), kStopWords.end(), tok) == kStopWords.end()) {
      out.emplace_back(tok);
    }
    i = j;
  }
  return out;
}

std::set<std::string> identifier_token_set(std::string_view s) {
  auto toks = identifier_tokens(s);
  return {toks.begin(), toks.end()};
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto& t : small) n += large.count(t);
  return n;
}

std::size_t sentence_end(std::string_view s, std::size_t from) {
  int depth = 0;
  int comment = 0;
  bool in_string = false;
  for (std::size_t i = from; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '"') in_string = false;
      continue;
    }
    if (c == '(' && i + 1 < s.size() && s[i + 1] == '*') {
      ++comment;
      ++i;
      continue;
    }
    if (comment > 0) {
      if (c == '*' && i + 1 < s.size() && s[i + 1] == ')') {
        --comment;
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '(': case '[': case '{': ++depth; break;
      case ')': case ']': case '}': depth = std::max(0, depth - 1); break;
      case '.':
        if (depth == 0 && (i + 1 == s.size() || is_space(s[i + 1])) &&
            !(i > 0 && s[i - 1] == '.')) {
          return i + 1;
        }
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

std::vector<std::string> split_sentences(std::string_view s, std::string* rest) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = sentence_end(s, pos);
    if (end == std::string_view::npos) break;
    auto sentence = trim(s.substr(pos, end - pos));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    pos = end;
  }
  if (rest != nullptr) *rest = trim(s.substr(std::min(pos, s.size())));
  return out;
}

std::string strip_comments(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' && i + 1 < s.size() && s[i + 1] == '*') {
      ++depth;
      ++i;
      continue;
    }
    if (depth > 0) {
      if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == ')') {
        --depth;
        ++i;
        if (depth == 0) out.push_back(' ');
      }
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

bool balanced(std::string_view s) {
  std::string stack;
  for (char c : s) {
    switch (c) {
      case '(': stack.push_back(')'); break;
      case '[': stack.push_back(']'); break;
      case '{': stack.push_back('}'); break;
      case ')': case ']': case '}':
        if (stack.empty() || stack.back() != c) return false;
        stack.pop_back();
        break;
      default: break;
    }
  }
  return stack.empty();
}

std::string first_word(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = b;
  while (e < s.size() && !is_space(s[e])) ++e;
  return std::string(s.substr(b, e - b));
}

bool contains_word(std::string_view text, std::string_view word) {
  if (word.empty()) return false;
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !(std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
                                 text[pos - 1] == '_' || text[pos - 1] == '\'');
    std::size_t after = pos + word.size();
    bool right_ok = after >= text.size() ||
                    !(std::isalnum(static_cast<unsigned char>(text[after])) ||
                      text[after] == '_' || text[after] == '\'');
    if (left_ok && right_ok) return true;
    pos = after;
  }
  return false;
}

std::size_t find_top_level(std::string_view s, std::string_view op, std::size_t from) {
  int depth = 0;
  for (std::size_t i = from; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') {
      ++depth;
      continue;
    }
    if (c == ')' || c == ']' || c == '}') {
      --depth;
      continue;
    }
    if (depth == 0 && s.substr(i, op.size()) == op) return i;
  }
  return std::string_view::npos;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace proofagent
