#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace proofagent {

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower(std::string_view s);

/// Shortens `s` to at most `max_chars` by replacing its middle with "...".
std::string midline_truncate(std::string_view s, std::size_t max_chars);

bool is_ident_char(char c);

/// Identifier tokens used for relevance scoring: maximal runs of
/// [A-Za-z0-9_'.] with leading/trailing dots stripped. The wildcard "_"
/// and binder/match keywords are dropped.
std::vector<std::string> identifier_tokens(std::string_view s);
std::set<std::string> identifier_token_set(std::string_view s);

/// Number of tokens shared by two token sets.
std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b);

/// Position one past the first sentence terminator ('.' followed by
/// whitespace or end of text, outside (), [], {} and string literals and
/// outside comments). Returns npos when no complete sentence exists.
std::size_t sentence_end(std::string_view s, std::size_t from = 0);

/// Splits text into complete sentences, each trimmed and ending with '.'.
/// Trailing text without a terminator is returned in `rest` when given.
std::vector<std::string> split_sentences(std::string_view s, std::string* rest = nullptr);

/// Removes (* ... *) comments (nesting allowed).
std::string strip_comments(std::string_view s);

/// True when the parentheses/brackets/braces in `s` balance.
bool balanced(std::string_view s);

/// First whitespace-delimited word of `s`.
std::string first_word(std::string_view s);

/// Whole-word search: `word` delimited by non-identifier characters.
bool contains_word(std::string_view text, std::string_view word);

/// Index of the first top-level occurrence of `op` (depth 0 w.r.t. () [] {}).
std::size_t find_top_level(std::string_view s, std::string_view op, std::size_t from = 0);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace proofagent
