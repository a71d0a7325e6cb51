#include "proofagent/complexity.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "proofagent/text.hpp"

namespace proofagent {

namespace {

bool is_punct(char c) {
  return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' || c == ']' || c == '{' ||
         c == '}';
}

bool is_operator_char(char c) {
  return !std::isalnum(static_cast<unsigned char>(c)) && !std::isspace(static_cast<unsigned char>(c)) &&
         c != '_' && c != '\'' && c != '%' && c != '.' && !is_punct(c);
}

bool has_operator(std::string_view s) {
  for (const auto& t : term_tokens(s)) {
    if (!t.empty() && is_operator_char(t.front())) return true;
  }
  return false;
}

// Splits `forall binders, body` into its binder text and body. Returns
// false when `s` does not start with a quantifier.
bool split_binders(std::string_view s, std::string& binders, std::string& body) {
  auto t = trim(s);
  std::string_view v = t;
  for (std::string_view kw : {"forall", "exists"}) {
    if (v.substr(0, kw.size()) == kw && v.size() > kw.size() && !is_ident_char(v[kw.size()])) {
      auto comma = find_top_level(v, ",", kw.size());
      if (comma == std::string_view::npos) return false;
      binders = std::string(v.substr(kw.size(), comma - kw.size()));
      body = std::string(v.substr(comma + 1));
      return true;
    }
  }
  return false;
}

std::size_t typed_binder_hypotheses(std::string_view binders) {
  std::size_t count = 0;
  std::size_t i = 0;
  bool any_group = false;
  while (i < binders.size()) {
    if (binders[i] == '(') {
      int depth = 0;
      std::size_t j = i;
      for (; j < binders.size(); ++j) {
        if (binders[j] == '(') ++depth;
        if (binders[j] == ')' && --depth == 0) break;
      }
      auto group = binders.substr(i + 1, j - i - 1);
      auto colon = find_top_level(group, ":");
      if (colon != std::string_view::npos && has_operator(group.substr(colon + 1))) {
        count += std::max<std::size_t>(1, identifier_tokens(group.substr(0, colon)).size());
      }
      any_group = true;
      i = j + 1;
    } else {
      ++i;
    }
  }
  if (!any_group) {
    auto colon = find_top_level(binders, ":");
    if (colon != std::string_view::npos && has_operator(binders.substr(colon + 1))) {
      count += std::max<std::size_t>(1, identifier_tokens(binders.substr(0, colon)).size());
    }
  }
  return count;
}

std::size_t find_arrow(std::string_view s, std::size_t from) {
  while (true) {
    auto p = find_top_level(s, "->", from);
    if (p == std::string_view::npos) return p;
    if (p > 0 && s[p - 1] == '<') {
      from = p + 2;
      continue;
    }
    return p;
  }
}

}  // namespace

std::vector<std::string> term_tokens(std::string_view s) {
  auto text = strip_comments(s);
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto n = text.size();
  auto ident = [&](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || is_punct(c)) {
      ++i;
    } else if (ident(c)) {
      std::size_t j = i;
      while (j < n && (ident(text[j]) || (text[j] == '.' && j + 1 < n && ident(text[j + 1])))) ++j;
      if (j < n && text[j] == '%') {
        ++j;
        while (j < n && ident(text[j])) ++j;
      }
      out.push_back(text.substr(i, j - i));
      i = j;
    } else if (c == '%') {
      ++i;
      while (i < n && ident(text[i])) ++i;
    } else if (c == '.') {
      ++i;
    } else {
      std::size_t j = i;
      while (j < n && is_operator_char(text[j])) ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

std::size_t hypothesis_count(std::string_view statement) {
  std::string rest = trim(statement);
  if (!rest.empty() && rest.back() == '.') rest.pop_back();
  std::size_t count = 0;
  while (true) {
    std::string binders, body;
    if (split_binders(rest, binders, body)) {
      count += typed_binder_hypotheses(binders);
      rest = trim(body);
      continue;
    }
    auto arrow = find_arrow(rest, 0);
    if (arrow == std::string::npos) break;
    ++count;
    rest = trim(std::string_view(rest).substr(arrow + 2));
  }
  return count;
}

LemmaComplexity measure(std::string_view statement) {
  auto s = trim(statement);
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (trim(s).empty()) throw std::invalid_argument("empty statement");
  return {term_tokens(s).size(), hypothesis_count(s)};
}

std::size_t bucket_of(std::size_t value, const std::vector<std::size_t>& edges) {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

std::string bucket_label(std::size_t index, const std::vector<std::size_t>& edges) {
  if (edges.empty()) return "[0,inf)";
  if (index == 0) return "[0," + std::to_string(edges[0]) + "]";
  if (index >= edges.size()) return "(" + std::to_string(edges.back()) + ",inf)";
  return "(" + std::to_string(edges[index - 1]) + "," + std::to_string(edges[index]) + "]";
}

}  // namespace proofagent
