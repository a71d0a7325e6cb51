#include "proofagent/mock_prover.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "proofagent/lemma_source.hpp"
#include "proofagent/sanitize.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

const std::vector<MockDeclaration>& mock_standard_library() {
  static const std::vector<MockDeclaration> lib = {
      {"I", "True", "", "Coq.Init.Logic.I"},
      {"conj", "forall A B : Prop, A -> B -> A /\\ B", "", "Coq.Init.Logic.conj"},
      {"Z.abs", "Z -> Z", "fun z : Z => match z with | Z0 => 0 | Zpos p => Zpos p | Zneg p => Zpos p end",
       "Coq.ZArith.BinInt.Z.abs"},
      {"Z.quot", "Z -> Z -> Z", "fun a b : Z => Z.quot a b", "Coq.ZArith.BinInt.Z.quot"},
      {"Z.abs_le", "forall n m : Z, - m <= n <= m <-> Z.abs n <= m", "", "Coq.ZArith.BinInt.Z.abs_le"},
      {"Z.abs_lt", "forall n m : Z, - m < n < m <-> Z.abs n < m", "", "Coq.ZArith.BinInt.Z.abs_lt"},
      {"Z.abs_nonneg", "forall n : Z, 0 <= Z.abs n", "", "Coq.ZArith.BinInt.Z.abs_nonneg"},
      {"Z.abs_eq", "forall n : Z, 0 <= n -> Z.abs n = n", "", "Coq.ZArith.BinInt.Z.abs_eq"},
      {"Z.abs_neq", "forall n : Z, n <= 0 -> Z.abs n = - n", "", "Coq.ZArith.BinInt.Z.abs_neq"},
      {"Z.abs_square", "forall n : Z, Z.abs n * Z.abs n = n * n", "", "Coq.ZArith.BinInt.Z.abs_square"},
      {"Z.square_le_mono_nonneg", "forall n m : Z, 0 <= n -> n <= m -> n * n <= m * m", "",
       "Coq.ZArith.BinInt.Z.square_le_mono_nonneg"},
      {"Z.square_lt_mono_nonneg", "forall n m : Z, 0 <= n -> n < m -> n * n < m * m", "",
       "Coq.ZArith.BinInt.Z.square_lt_mono_nonneg"},
      {"Z.mul_le_mono_nonneg",
       "forall n m p q : Z, 0 <= n -> n <= m -> 0 <= p -> p <= q -> n * p <= m * q", "",
       "Coq.ZArith.BinInt.Z.mul_le_mono_nonneg"},
      {"Z.quot_rem", "forall a b : Z, b <> 0 -> a = b * Z.quot a b + Z.rem a b", "",
       "Coq.ZArith.BinInt.Z.quot_rem"},
      {"Z.quot_div", "forall a b : Z, b <> 0 -> Z.quot a b = Z.sgn a * Z.sgn b * (Z.abs a / Z.abs b)",
       "", "Coq.ZArith.BinInt.Z.quot_div"},
      {"Z.quot_0_l", "forall a : Z, a <> 0 -> Z.quot 0 a = 0", "", "Coq.ZArith.BinInt.Z.quot_0_l"},
      {"Z.add_comm", "forall n m : Z, n + m = m + n", "", "Coq.ZArith.BinInt.Z.add_comm"},
      {"Z.mul_comm", "forall n m : Z, n * m = m * n", "", "Coq.ZArith.BinInt.Z.mul_comm"},
      {"Z.le_refl", "forall n : Z, n <= n", "", "Coq.ZArith.BinInt.Z.le_refl"},
      {"Z.le_trans", "forall n m p : Z, n <= m -> m <= p -> n <= p", "", "Coq.ZArith.BinInt.Z.le_trans"},
      {"Z.lt_le_incl", "forall n m : Z, n < m -> n <= m", "", "Coq.ZArith.BinInt.Z.lt_le_incl"},
      {"Z.le_antisymm", "forall n m : Z, n <= m -> m <= n -> n = m", "", "Coq.ZArith.BinInt.Z.le_antisymm"},
  };
  return lib;
}

namespace {

// ---------------------------------------------------------------------------
// Proposition surface syntax

std::string strip_outer_parens(std::string_view in) {
  std::string s = trim(in);
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool wraps = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0 && i + 1 < s.size()) {
        wraps = false;
        break;
      }
    }
    if (!wraps) break;
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

std::string norm(std::string_view s) { return collapse_whitespace(strip_outer_parens(s)); }

bool starts_with_keyword(std::string_view s, std::string_view kw) {
  return s.size() > kw.size() && s.substr(0, kw.size()) == kw &&
         std::isspace(static_cast<unsigned char>(s[kw.size()]));
}

// First top-level "->" that is not part of "<->".
std::size_t find_arrow(std::string_view s) {
  std::size_t from = 0;
  while (true) {
    auto p = find_top_level(s, "->", from);
    if (p == std::string_view::npos) return p;
    if (p == 0 || s[p - 1] != '<') return p;
    from = p + 2;
  }
}

struct Binder {
  std::string name;
  std::string type;
};

// Parses "forall <binders>, body".
std::optional<std::pair<std::vector<Binder>, std::string>> split_quantifier(std::string_view in,
                                                                            std::string_view kw) {
  auto s = norm(in);
  if (!starts_with_keyword(s, kw)) return std::nullopt;
  auto comma = find_top_level(s, ",", kw.size());
  if (comma == std::string::npos) return std::nullopt;
  std::string binders = trim(std::string_view(s).substr(kw.size(), comma - kw.size()));
  std::string body = trim(std::string_view(s).substr(comma + 1));
  std::vector<Binder> out;
  auto add_group = [&out](std::string_view group) {
    auto colon = find_top_level(group, ":");
    std::string names = trim(group.substr(0, colon == std::string_view::npos ? group.size() : colon));
    std::string type = colon == std::string_view::npos ? "_" : norm(group.substr(colon + 1));
    std::istringstream in(names);
    std::string n;
    while (in >> n) out.push_back({n, type});
  };
  if (!binders.empty() && binders.front() == '(') {
    std::size_t i = 0;
    while (i < binders.size()) {
      if (binders[i] != '(') {
        ++i;
        continue;
      }
      int depth = 0;
      std::size_t j = i;
      for (; j < binders.size(); ++j) {
        if (binders[j] == '(') ++depth;
        if (binders[j] == ')' && --depth == 0) break;
      }
      add_group(std::string_view(binders).substr(i + 1, j - i - 1));
      i = j + 1;
    }
  } else {
    add_group(binders);
  }
  if (out.empty()) return std::nullopt;
  return std::make_pair(std::move(out), std::move(body));
}

bool quantified(std::string_view s) {
  return starts_with_keyword(s, "forall") || starts_with_keyword(s, "exists");
}

std::optional<std::pair<std::string, std::string>> split_at(std::string_view in, std::string_view op) {
  auto s = norm(in);
  if (quantified(s)) return std::nullopt;
  std::size_t p = op == "->" ? find_arrow(s) : find_top_level(s, op);
  if (p == std::string::npos) return std::nullopt;
  return std::make_pair(norm(s.substr(0, p)), norm(s.substr(p + op.size())));
}

std::optional<std::pair<std::string, std::string>> split_arrow(std::string_view s) {
  return split_at(s, "->");
}
std::optional<std::pair<std::string, std::string>> split_iff(std::string_view s) {
  if (split_arrow(s)) return std::nullopt;
  return split_at(s, "<->");
}
std::optional<std::pair<std::string, std::string>> split_or(std::string_view s) {
  if (split_arrow(s) || split_at(s, "<->")) return std::nullopt;
  return split_at(s, "\\/");
}
std::optional<std::pair<std::string, std::string>> split_and(std::string_view s) {
  if (split_arrow(s) || split_at(s, "<->") || split_at(s, "\\/")) return std::nullopt;
  return split_at(s, "/\\");
}
std::optional<std::string> split_not(std::string_view in) {
  auto s = norm(in);
  if (s.empty() || s.front() != '~' || split_arrow(s) || split_at(s, "\\/") || split_at(s, "/\\")) {
    return std::nullopt;
  }
  return norm(s.substr(1));
}

std::string replace_word(std::string_view text, std::string_view from, std::string_view to) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, from.size()) == from &&
        (i == 0 || !is_ident_char(text[i - 1])) &&
        (i + from.size() == text.size() || !is_ident_char(text[i + from.size()]))) {
      out += to;
      i += from.size();
    } else {
      out += text[i++];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear integer arithmetic over single-variable facts

using Int = long long;

struct Lin {
  std::map<std::string, Int> coef;
  Int k = 0;

  bool constant() const { return coef.empty(); }
  void clean() {
    for (auto it = coef.begin(); it != coef.end();) it = it->second == 0 ? coef.erase(it) : std::next(it);
  }
};

Lin add(Lin a, const Lin& b, Int sign) {
  for (const auto& [v, c] : b.coef) a.coef[v] += sign * c;
  a.k += sign * b.k;
  a.clean();
  return a;
}

class LinParser {
 public:
  explicit LinParser(std::string_view s) : s_(s) {}

  std::optional<Lin> parse() {
    auto e = expr();
    skip();
    if (!e || pos_ != s_.size()) return std::nullopt;
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::optional<Lin> expr() {
    auto lhs = term();
    while (lhs) {
      if (eat('+')) {
        auto r = term();
        if (!r) return std::nullopt;
        lhs = add(*lhs, *r, 1);
      } else if (eat('-')) {
        auto r = term();
        if (!r) return std::nullopt;
        lhs = add(*lhs, *r, -1);
      } else {
        break;
      }
    }
    return lhs;
  }
  std::optional<Lin> term() {
    auto lhs = unary();
    while (lhs && eat('*')) {
      auto r = unary();
      if (!r) return std::nullopt;
      if (lhs->constant()) {
        Lin out = *r;
        for (auto& [v, c] : out.coef) c *= lhs->k;
        out.k *= lhs->k;
        out.clean();
        lhs = out;
      } else if (r->constant()) {
        for (auto& [v, c] : lhs->coef) c *= r->k;
        lhs->k *= r->k;
        lhs->clean();
      } else {
        return std::nullopt;  // non-linear
      }
    }
    return lhs;
  }
  std::optional<Lin> unary() {
    if (eat('-')) {
      auto u = unary();
      if (!u) return std::nullopt;
      return add(Lin{}, *u, -1);
    }
    return atom();
  }
  std::optional<Lin> atom() {
    skip();
    if (pos_ >= s_.size()) return std::nullopt;
    if (eat('(')) {
      auto e = expr();
      if (!e || !eat(')')) return std::nullopt;
      return e;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = v * 10 + (s_[pos_++] - '0');
      }
      Lin l;
      l.k = v;
      return l;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_' || s_[pos_] == '\'')) {
        ++pos_;
      }
      if (pos_ < s_.size() && s_[pos_] == '.') return std::nullopt;  // qualified name
      std::string name(s_.substr(b, pos_ - b));
      // function application is opaque to the mock
      std::size_t save = pos_;
      skip();
      if (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '(')) {
        return std::nullopt;
      }
      pos_ = save;
      Lin l;
      l.coef[name] = 1;
      return l;
    }
    return std::nullopt;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string drop_scopes(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      ++i;
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      --i;
      continue;
    }
    out += s[i];
  }
  return out;
}

std::optional<Lin> parse_lin(std::string_view s) { return LinParser(drop_scopes(s)).parse(); }

struct Relation {
  std::string lhs;
  std::string op;
  std::string rhs;
};

// Splits "a <= b < c" into a chain of relations; empty when no relation.
std::vector<Relation> relations(std::string_view in) {
  auto s = norm(in);
  std::vector<std::string> operands;
  std::vector<std::string> ops;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth != 0) continue;
    std::string op;
    if (s.compare(i, 3, "<->") == 0) return {};
    if (s.compare(i, 2, "->") == 0 || s.compare(i, 2, "=>") == 0) return {};
    if (s.compare(i, 2, "<=") == 0 || s.compare(i, 2, ">=") == 0 || s.compare(i, 2, "<>") == 0) {
      op = s.substr(i, 2);
    } else if (c == '<' || c == '>' || c == '=') {
      op = std::string(1, c);
    }
    if (op.empty()) continue;
    operands.push_back(trim(s.substr(start, i - start)));
    ops.push_back(op);
    i += op.size() - 1;
    start = i + 1;
  }
  if (ops.empty()) return {};
  operands.push_back(trim(s.substr(start)));
  std::vector<Relation> out;
  for (std::size_t i = 0; i < ops.size(); ++i) out.push_back({operands[i], ops[i], operands[i + 1]});
  return out;
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
Int ceil_div(Int a, Int b) { return -floor_div(-a, b); }

Int ceil_sqrt(Int c) {
  if (c <= 0) return 0;
  auto r = static_cast<Int>(std::sqrt(static_cast<double>(c)));
  while (r * r < c) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= c) --r;
  return r;
}
Int floor_sqrt(Int c) {
  if (c < 0) return -1;
  auto r = static_cast<Int>(std::sqrt(static_cast<double>(c)));
  while (r * r > c) --r;
  while ((r + 1) * (r + 1) <= c) ++r;
  return r;
}

bool eval(Int lhs, std::string_view op, Int rhs) {
  if (op == "=") return lhs == rhs;
  if (op == "<>") return lhs != rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == "<") return lhs < rhs;
  if (op == ">=") return lhs >= rhs;
  return lhs > rhs;
}

class Bounds {
 public:
  void add_fact(std::string_view stmt) {
    auto s = norm(stmt);
    if (s == "False") {
      contradiction_ = true;
      return;
    }
    if (auto conj = split_and(s)) {
      add_fact(conj->first);
      add_fact(conj->second);
      return;
    }
    if (auto neg = split_not(s)) {
      auto rel = relations(*neg);
      if (rel.size() == 1 && rel[0].op == "=") add_relation({rel[0].lhs, "<>", rel[0].rhs});
      return;
    }
    for (const auto& r : relations(s)) add_relation(r);
  }

  // Square facts for nia: c <= v * v (with sign information) and v * v <= c.
  void add_square_facts(std::string_view stmt) {
    auto s = norm(stmt);
    if (auto conj = split_and(s)) {
      add_square_facts(conj->first);
      add_square_facts(conj->second);
      return;
    }
    for (auto r : relations(s)) {
      if (r.op == ">=" || r.op == ">") {
        std::swap(r.lhs, r.rhs);
        r.op = r.op == ">=" ? "<=" : "<";
      }
      if (r.op != "<=" && r.op != "<") continue;
      auto lo_side = parse_lin(r.lhs);
      auto sq_var = square_of(r.rhs);
      if (lo_side && lo_side->constant() && sq_var) {
        Int c = lo_side->k + (r.op == "<" ? 1 : 0);
        Int root = ceil_sqrt(c);
        if (lower(*sq_var) && *lower(*sq_var) >= 0) tighten_lo(*sq_var, root);
        if (upper(*sq_var) && *upper(*sq_var) <= 0) tighten_hi(*sq_var, -root);
      }
      auto hi_side = parse_lin(r.rhs);
      auto sq_var2 = square_of(r.lhs);
      if (hi_side && hi_side->constant() && sq_var2) {
        Int c = hi_side->k - (r.op == "<" ? 1 : 0);
        if (c < 0) {
          contradiction_ = true;
        } else {
          Int root = floor_sqrt(c);
          tighten_lo(*sq_var2, -root);
          tighten_hi(*sq_var2, root);
        }
      }
    }
  }

  bool contradiction() const {
    if (contradiction_) return true;
    for (const auto& [v, l] : lo_) {
      auto h = hi_.find(v);
      if (h != hi_.end() && l > h->second) return true;
    }
    for (const auto& [v, val] : neq_) {
      if (lower(v) && upper(v) && *lower(v) == val && *upper(v) == val) return true;
    }
    return false;
  }

  bool implies(std::string_view stmt) const {
    auto s = norm(stmt);
    if (s == "True") return true;
    if (auto conj = split_and(s)) return implies(conj->first) && implies(conj->second);
    if (auto neg = split_not(s)) {
      auto rel = relations(*neg);
      return rel.size() == 1 && rel[0].op == "=" && implies_relation({rel[0].lhs, "<>", rel[0].rhs});
    }
    auto rels = relations(s);
    if (rels.empty()) return false;
    return std::all_of(rels.begin(), rels.end(), [this](const Relation& r) { return implies_relation(r); });
  }

 private:
  static std::optional<std::string> square_of(std::string_view side) {
    auto s = norm(drop_scopes(side));
    auto star = find_top_level(s, "*");
    if (star == std::string::npos) return std::nullopt;
    auto a = norm(s.substr(0, star));
    auto b = norm(s.substr(star + 1));
    auto la = parse_lin(a);
    if (a != b || !la || la->coef.size() != 1 || la->k != 0 || la->coef.begin()->second != 1) {
      return std::nullopt;
    }
    return la->coef.begin()->first;
  }

  std::optional<Int> lower(const std::string& v) const {
    auto it = lo_.find(v);
    return it == lo_.end() ? std::nullopt : std::optional<Int>(it->second);
  }
  std::optional<Int> upper(const std::string& v) const {
    auto it = hi_.find(v);
    return it == hi_.end() ? std::nullopt : std::optional<Int>(it->second);
  }
  void tighten_lo(const std::string& v, Int x) {
    auto it = lo_.find(v);
    if (it == lo_.end() || x > it->second) lo_[v] = x;
  }
  void tighten_hi(const std::string& v, Int x) {
    auto it = hi_.find(v);
    if (it == hi_.end() || x < it->second) hi_[v] = x;
  }

  // a*v + k op 0
  void add_relation(const Relation& r) {
    auto l = parse_lin(r.lhs);
    auto rr = parse_lin(r.rhs);
    if (!l || !rr) return;
    Lin d = add(*l, *rr, -1);
    if (d.constant()) {
      if (!eval(d.k, r.op, 0)) contradiction_ = true;
      return;
    }
    if (d.coef.size() != 1) return;
    const auto& [v, a] = *d.coef.begin();
    Int k = d.k;
    const std::string& op = r.op;
    if (op == "=") {
      if ((-k) % a != 0) {
        contradiction_ = true;
        return;
      }
      tighten_lo(v, -k / a);
      tighten_hi(v, -k / a);
    } else if (op == "<>") {
      if ((-k) % a == 0) neq_.emplace_back(v, -k / a);
    } else {
      // normalise to a*v <= bound or a*v >= bound
      bool le = op == "<=" || op == "<";
      Int bound = -k;
      if (op == "<") bound -= 1;
      if (op == ">") bound += 1;
      bool upper_bound = le == (a > 0);
      if (upper_bound) {
        tighten_hi(v, a > 0 ? floor_div(bound, a) : floor_div(bound, a));
      } else {
        tighten_lo(v, ceil_div(bound, a));
      }
    }
  }

  bool implies_relation(const Relation& r) const {
    auto l = parse_lin(r.lhs);
    auto rr = parse_lin(r.rhs);
    if (!l || !rr) return false;
    Lin d = add(*l, *rr, -1);
    if (d.constant()) return eval(d.k, r.op, 0);
    if (d.coef.size() != 1) return false;
    const auto& [v, a] = *d.coef.begin();
    auto lo = lower(v);
    auto hi = upper(v);
    // range of a*v + k
    std::optional<Int> rmin;
    std::optional<Int> rmax;
    if (a > 0) {
      if (lo) rmin = a * *lo + d.k;
      if (hi) rmax = a * *hi + d.k;
    } else {
      if (hi) rmin = a * *hi + d.k;
      if (lo) rmax = a * *lo + d.k;
    }
    const std::string& op = r.op;
    if (op == "=") return rmin && rmax && *rmin == 0 && *rmax == 0;
    if (op == "<=") return rmax && *rmax <= 0;
    if (op == "<") return rmax && *rmax < 0;
    if (op == ">=") return rmin && *rmin >= 0;
    if (op == ">") return rmin && *rmin > 0;
    if (op == "<>") {
      if ((rmin && *rmin > 0) || (rmax && *rmax < 0)) return true;
      if ((-d.k) % a != 0) return true;
      Int val = -d.k / a;
      return std::any_of(neq_.begin(), neq_.end(),
                         [&](const auto& p) { return p.first == v && p.second == val; });
    }
    return false;
  }

  std::map<std::string, Int> lo_;
  std::map<std::string, Int> hi_;
  std::vector<std::pair<std::string, Int>> neq_;
  bool contradiction_ = false;
};

// ---------------------------------------------------------------------------
// Proof state

struct Goal {
  std::vector<Hypothesis> hyps;
  std::string concl;
};

struct State {
  std::vector<Goal> goals;                // focused block
  std::vector<std::vector<Goal>> saved;   // goals outside each open "{"

  std::vector<Goal> flattened() const {
    std::vector<Goal> out = goals;
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) out.insert(out.end(), it->begin(), it->end());
    return out;
  }
};

GoalState to_goal_state(const Goal& g) { return GoalState{g.hyps, g.concl, ""}; }

const Hypothesis* find_hyp(const Goal& g, std::string_view name) {
  for (const auto& h : g.hyps) {
    if (std::find(h.names.begin(), h.names.end(), name) != h.names.end()) return &h;
  }
  return nullptr;
}

bool name_used(const Goal& g, std::string_view name) { return find_hyp(g, name) != nullptr; }

void remove_hyp(Goal& g, std::string_view name) {
  for (auto it = g.hyps.begin(); it != g.hyps.end(); ++it) {
    auto pos = std::find(it->names.begin(), it->names.end(), name);
    if (pos == it->names.end()) continue;
    it->names.erase(pos);
    if (it->names.empty()) g.hyps.erase(it);
    return;
  }
}

void add_hyp(Goal& g, const std::string& name, const std::string& stmt, bool mergeable) {
  if (mergeable && !g.hyps.empty() && g.hyps.back().statement == stmt) {
    g.hyps.back().names.push_back(name);
    return;
  }
  g.hyps.push_back({{name}, stmt});
}

std::string fresh_name(const Goal& g, const std::string& base = "H") {
  if (!name_used(g, base)) return base;
  for (int i = 0;; ++i) {
    auto n = base + std::to_string(i);
    if (!name_used(g, n)) return n;
  }
}

std::string render_goals(const std::vector<Goal>& goals) {
  if (goals.empty()) return "No more goals.";
  std::ostringstream out;
  out << goals.size() << (goals.size() == 1 ? " goal" : " goals") << "\n\n";
  for (const auto& h : goals.front().hyps) out << "  " << join(h.names, ", ") << " : " << h.statement << "\n";
  out << "  ============================\n  " << goals.front().concl << "\n";
  for (std::size_t i = 1; i < goals.size(); ++i) {
    out << "\ngoal " << (i + 1) << " is:\n  " << goals[i].concl << "\n";
  }
  return out.str();
}

struct TacticError {
  std::string message;
};

using Step = std::variant<std::vector<Goal>, TacticError>;  // replacement for the focused goal

std::string not_found(std::string_view name) {
  return "The reference " + std::string(name) + " was not found in the current environment.";
}

// Disjunctive/conjunctive intro pattern tree.
struct Pattern {
  std::string name;                          // leaf when alternatives empty
  std::vector<std::vector<Pattern>> alternatives;  // [a b | c d]
  bool is_leaf() const { return alternatives.empty(); }
};

std::optional<Pattern> parse_pattern(std::string_view in) {
  auto s = trim(in);
  if (s.empty()) return std::nullopt;
  if (s.front() != '[') {
    for (char c : s) {
      if (!is_ident_char(c) && c != '?') return std::nullopt;
    }
    return Pattern{s, {}};
  }
  if (s.back() != ']') return std::nullopt;
  std::string inner = s.substr(1, s.size() - 2);
  Pattern p;
  std::size_t start = 0;
  int depth = 0;
  std::vector<std::string> alts;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i < inner.size() && inner[i] == '[') ++depth;
    if (i < inner.size() && inner[i] == ']') --depth;
    if (i == inner.size() || (depth == 0 && inner[i] == '|')) {
      alts.push_back(inner.substr(start, i - start));
      start = i + 1;
    }
  }
  for (const auto& alt : alts) {
    std::vector<Pattern> items;
    std::size_t i = 0;
    while (i < alt.size()) {
      if (std::isspace(static_cast<unsigned char>(alt[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      if (alt[i] == '[') {
        int d = 0;
        for (; j < alt.size(); ++j) {
          if (alt[j] == '[') ++d;
          if (alt[j] == ']' && --d == 0) break;
        }
        ++j;
      } else {
        while (j < alt.size() && !std::isspace(static_cast<unsigned char>(alt[j]))) ++j;
      }
      auto sub = parse_pattern(alt.substr(i, j - i));
      if (!sub) return std::nullopt;
      items.push_back(*sub);
      i = j;
    }
    p.alternatives.push_back(std::move(items));
  }
  return p;
}

class MockSession final : public ProverSession {
 public:
  MockSession(const MockProverOptions& options, std::vector<MockDeclaration> decls,
              std::string lemma_statement, std::shared_ptr<Transcript> transcript)
      : ProverSession(std::move(transcript)), options_(options), decls_(std::move(decls)) {
    state_.goals.push_back(Goal{{}, norm(lemma_statement)});
    set_initial_goal(to_goal_state(state_.goals.front()));
  }

 protected:
  TacticOutcome send_tactic(const std::string& sentence) override {
    if (options_.diverging_tactics.count(sentence) != 0) {
      throw ProverError(ProverErrorKind::SentenceTimeout, "Timeout! (" + sentence + ")");
    }
    auto next = state_;
    if (auto err = apply(next, sentence)) {
      return Failure{err->message, "Error: " + err->message};
    }
    undo_.push_back(std::move(state_));
    state_ = std::move(next);
    auto flat = state_.flattened();
    if (flat.empty() && state_.saved.empty()) return QedOutcome{"No more goals."};
    GoalsOutcome out;
    for (const auto& g : flat) out.goals.push_back(to_goal_state(g));
    out.raw = render_goals(flat);
    return out;
  }

  std::string send_query(const std::string& sentence) override {
    std::string body = sentence.substr(0, sentence.size() - 1);
    auto kind_word = first_word(body);
    std::string arg = trim(std::string_view(body).substr(kind_word.size()));
    auto kind = query_kind_from_string(kind_word);
    if (!kind) throw ProverError(ProverErrorKind::QueryRejected, "unknown query command");
    switch (*kind) {
      case QueryKind::Search: return search(arg);
      case QueryKind::Check: return check(arg);
      case QueryKind::Print: return print(arg);
      case QueryKind::About: return about(arg);
      case QueryKind::Locate: return locate(arg);
    }
    return {};
  }

  void send_undo(std::size_t n) override {
    for (std::size_t i = 0; i < n; ++i) {
      state_ = std::move(undo_.back());
      undo_.pop_back();
    }
  }

  std::optional<Failure> send_qed() override {
    if (!state_.flattened().empty() || !state_.saved.empty()) {
      std::string msg = "Attempt to save an incomplete proof (there are remaining open goals).";
      return Failure{msg, "Error: " + msg};
    }
    return std::nullopt;
  }

  void terminate() noexcept override {}

 private:
  const MockDeclaration* find_decl(std::string_view name) const {
    for (const auto& d : decls_) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  // Statement of a hypothesis or declaration, or nullopt.
  std::optional<std::string> lookup(const Goal& g, std::string_view name) const {
    if (const auto* h = find_hyp(g, name)) return h->statement;
    if (const auto* d = find_decl(name)) return d->statement;
    return std::nullopt;
  }

  std::optional<TacticError> apply(State& st, const std::string& sentence) {
    if (sentence == "{") {
      if (st.goals.empty()) return TacticError{"No such goal."};
      std::vector<Goal> rest(st.goals.begin() + 1, st.goals.end());
      st.goals.resize(1);
      st.saved.push_back(std::move(rest));
      return std::nullopt;
    }
    if (sentence == "}") {
      if (st.saved.empty()) return TacticError{"Syntax error: no open focus block to close."};
      if (!st.goals.empty()) {
        return TacticError{"This proof is focused, but cannot be unfocused this way."};
      }
      st.goals = std::move(st.saved.back());
      st.saved.pop_back();
      return std::nullopt;
    }
    if (is_structure_marker(sentence)) {
      return st.goals.empty() ? std::optional<TacticError>(TacticError{"No such goal."}) : std::nullopt;
    }
    if (st.goals.empty()) return TacticError{"No such goal."};

    std::string tac = trim(std::string_view(sentence).substr(0, sentence.size() - 1));
    auto step = run(st.goals.front(), tac);
    if (auto* e = std::get_if<TacticError>(&step)) return *e;
    auto& repl = std::get<std::vector<Goal>>(step);
    std::vector<Goal> goals = std::move(repl);
    goals.insert(goals.end(), st.goals.begin() + 1, st.goals.end());
    st.goals = std::move(goals);
    return std::nullopt;
  }

  Step run(const Goal& g, const std::string& tac) {
    std::string head;
    std::size_t i = 0;
    while (i < tac.size() && (is_ident_char(tac[i]) && tac[i] != '.')) ++i;
    head = tac.substr(0, i);
    std::string args = trim(std::string_view(tac).substr(i));
    if (head.empty()) return TacticError{"Syntax error: illegal begin of tactic."};

    if (head == "intros" || head == "intro") return intros(g, args, head == "intro");
    if (head == "split") return split(g);
    if (head == "left" || head == "right") return choose(g, head == "left");
    if (head == "exfalso") return std::vector<Goal>{Goal{g.hyps, "False"}};
    if (head == "exact") return exact(g, args);
    if (head == "assumption") return assumption(g);
    if (head == "reflexivity") return reflexivity(g);
    if (head == "trivial" || head == "auto" || head == "easy") return trivial(g, head);
    if (head == "lia" || head == "nia" || head == "omega") return arith(g, head == "nia", head);
    if (head == "destruct") return destruct(g, args);
    if (head == "assert") return assert_(g, args);
    if (head == "pose") return pose_proof(g, args);
    if (head == "apply") return apply_(g, args);
    if (head == "unfold") {
      if (args.empty()) return TacticError{"Syntax error: [reference] expected after 'unfold'."};
      auto name = first_word(args);
      if (!lookup(g, name)) return TacticError{not_found(name)};
      return std::vector<Goal>{g};
    }
    if (head == "simpl" || head == "cbn" || head == "idtac") return std::vector<Goal>{g};
    return TacticError{not_found(head)};
  }

  Step intros(const Goal& g, const std::string& args, bool single) {
    std::vector<std::string> names;
    {
      std::istringstream in(args);
      std::string n;
      while (in >> n) names.push_back(n);
    }
    if (single && names.size() > 1) return TacticError{"Syntax error: '.' expected after [tactic]."};
    Goal out = g;
    bool all = names.empty();
    std::size_t wanted = all ? (single ? 1 : SIZE_MAX) : names.size();
    std::size_t introduced = 0;
    while (introduced < wanted) {
      auto given = all ? std::optional<std::string>() : std::optional<std::string>(names[introduced]);
      if (given && name_used(out, *given)) return TacticError{*given + " is already used."};
      if (auto q = split_quantifier(out.concl, "forall")) {
        auto& [binders, body] = *q;
        Binder b = binders.front();
        std::string name = given ? *given : (name_used(out, b.name) ? fresh_name(out, b.name) : b.name);
        std::string rest_body = body;
        if (name != b.name) rest_body = replace_word(rest_body, b.name, name);
        std::vector<std::string> rest_binders;
        for (std::size_t k = 1; k < binders.size(); ++k) {
          rest_binders.push_back("(" + binders[k].name + " : " + binders[k].type + ")");
        }
        if (name != b.name) {
          for (auto& rb : rest_binders) rb = replace_word(rb, b.name, name);
        }
        add_hyp(out, name, b.type, true);
        out.concl = rest_binders.empty() ? norm(rest_body)
                                         : "forall " + join(rest_binders, " ") + ", " + rest_body;
        // keep the compact "forall x y : T," form when all remaining binders share a type
        if (binders.size() > 1) {
          bool same = std::all_of(binders.begin() + 1, binders.end(),
                                  [&](const Binder& x) { return x.type == binders[1].type; });
          if (same) {
            std::vector<std::string> ns;
            for (std::size_t k = 1; k < binders.size(); ++k) ns.push_back(binders[k].name);
            std::string compact = "forall " + join(ns, " ") + " : " + binders[1].type + ", " + body;
            if (name != b.name) compact = replace_word(compact, b.name, name);
            out.concl = compact;
          }
        }
      } else if (auto arrow = split_arrow(out.concl)) {
        std::string name = given ? *given : fresh_name(out);
        add_hyp(out, name, arrow->first, false);
        out.concl = arrow->second;
      } else if (auto neg = split_not(out.concl)) {
        std::string name = given ? *given : fresh_name(out);
        add_hyp(out, name, *neg, false);
        out.concl = "False";
      } else {
        if (all && !single) break;
        return TacticError{"No product even after head-reduction."};
      }
      ++introduced;
    }
    return std::vector<Goal>{out};
  }

  Step split(const Goal& g) {
    if (auto c = split_and(g.concl)) {
      return std::vector<Goal>{Goal{g.hyps, c->first}, Goal{g.hyps, c->second}};
    }
    if (auto c = split_iff(g.concl)) {
      return std::vector<Goal>{Goal{g.hyps, c->first + " -> " + c->second},
                               Goal{g.hyps, c->second + " -> " + c->first}};
    }
    return TacticError{"Not an inductive goal with 1 constructor."};
  }

  Step choose(const Goal& g, bool left) {
    auto c = split_or(g.concl);
    if (!c) return TacticError{"Not an inductive goal with 2 constructors."};
    return std::vector<Goal>{Goal{g.hyps, left ? c->first : c->second}};
  }

  Step exact(const Goal& g, const std::string& term) {
    auto t = norm(term);
    if (t.empty()) return TacticError{"Syntax error: [constr:operconstr] expected after 'exact'."};
    bool simple = std::all_of(t.begin(), t.end(), [](char c) { return is_ident_char(c); });
    if (!simple) {
      for (const auto& tok : identifier_tokens(t)) {
        if (!lookup(g, tok) && !std::isdigit(static_cast<unsigned char>(tok.front()))) {
          return TacticError{not_found(tok)};
        }
      }
      return TacticError{"Unable to unify \"" + t + "\" with \"" + g.concl + "\"."};
    }
    auto stmt = lookup(g, t);
    if (!stmt) return TacticError{not_found(t)};
    if (norm(*stmt) == norm(g.concl)) return std::vector<Goal>{};
    return TacticError{"The term \"" + t + "\" has type \"" + *stmt +
                       "\" while it is expected to have type \"" + g.concl + "\"."};
  }

  Step assumption(const Goal& g) {
    for (const auto& h : g.hyps) {
      if (norm(h.statement) == norm(g.concl)) return std::vector<Goal>{};
    }
    return TacticError{"No such assumption."};
  }

  Step reflexivity(const Goal& g) {
    auto rel = relations(g.concl);
    if (rel.size() != 1 || rel[0].op != "=") {
      return TacticError{"The relation in \"" + g.concl + "\" is not a declared reflexive relation."};
    }
    if (norm(rel[0].lhs) == norm(rel[0].rhs)) return std::vector<Goal>{};
    return TacticError{"Unable to unify \"" + rel[0].rhs + "\" with \"" + rel[0].lhs + "\"."};
  }

  Step trivial(const Goal& g, const std::string& which) {
    auto c = norm(g.concl);
    if (c == "True" || std::holds_alternative<std::vector<Goal>>(assumption(g)) ||
        std::holds_alternative<std::vector<Goal>>(reflexivity(g))) {
      return std::vector<Goal>{};
    }
    if (which == "easy") return TacticError{"Tactic failure: easy failed."};
    return std::vector<Goal>{g};  // auto/trivial leave the goal untouched
  }

  Step arith(const Goal& g, bool nonlinear, const std::string& which) {
    for (const auto& h : g.hyps) {
      if (norm(h.statement) == norm(g.concl)) return std::vector<Goal>{};
    }
    Bounds b;
    for (const auto& h : g.hyps) b.add_fact(h.statement);
    if (nonlinear) {
      for (int round = 0; round < 2; ++round) {
        for (const auto& h : g.hyps) b.add_square_facts(h.statement);
      }
    }
    if (b.contradiction() || b.implies(g.concl)) return std::vector<Goal>{};
    (void)which;
    return TacticError{"Tactic failure: Cannot find witness."};
  }

  // Applies pattern `p` to a hypothesis statement; appends resulting goals.
  std::optional<TacticError> destruct_into(const Goal& base, const std::string& stmt, const Pattern& p,
                                           const std::string& default_name, std::vector<Goal>& out) {
    if (p.is_leaf()) {
      Goal g = base;
      std::string name = p.name == "?" ? fresh_name(g) : p.name;
      if (name_used(g, name)) return TacticError{name + " is already used."};
      add_hyp(g, name, norm(stmt), false);
      out.push_back(std::move(g));
      return std::nullopt;
    }
    if (auto d = split_or(stmt)) {
      if (p.alternatives.size() != 2) {
        return TacticError{"Expects a disjunctive pattern with 2 branches."};
      }
      const std::string parts[2] = {d->first, d->second};
      for (int k = 0; k < 2; ++k) {
        const auto& alt = p.alternatives[k];
        Pattern sub = alt.size() == 1 ? alt.front() : Pattern{"", {alt}};
        if (alt.empty()) sub = Pattern{default_name, {}};
        if (auto e = destruct_into(base, parts[k], sub, default_name, out)) return e;
      }
      return std::nullopt;
    }
    if (auto c = split_and(stmt)) {
      if (p.alternatives.size() != 1 || p.alternatives.front().size() != 2) {
        return TacticError{"Expects a conjunctive pattern."};
      }
      std::vector<Goal> first;
      if (auto e = destruct_into(base, c->first, p.alternatives.front()[0], default_name, first)) return e;
      for (const auto& g : first) {
        if (auto e = destruct_into(g, c->second, p.alternatives.front()[1], default_name, out)) return e;
      }
      return std::nullopt;
    }
    if (auto ex = split_quantifier(stmt, "exists")) {
      const auto& [binders, body] = *ex;
      if (p.alternatives.size() != 1 || p.alternatives.front().size() != 2 ||
          !p.alternatives.front()[0].is_leaf()) {
        return TacticError{"Expects a conjunctive pattern."};
      }
      Goal g = base;
      std::string var = p.alternatives.front()[0].name;
      if (name_used(g, var)) return TacticError{var + " is already used."};
      add_hyp(g, var, binders.front().type, true);
      std::string inner = replace_word(body, binders.front().name, var);
      if (binders.size() > 1) {
        std::vector<std::string> rest;
        for (std::size_t k = 1; k < binders.size(); ++k) rest.push_back("(" + binders[k].name + " : " + binders[k].type + ")");
        inner = "exists " + join(rest, " ") + ", " + inner;
      }
      return destruct_into(g, inner, p.alternatives.front()[1], default_name, out);
    }
    return TacticError{"Expects a disjunctive pattern with 2 branches."};
  }

  Step destruct(const Goal& g, const std::string& args) {
    std::string target = args;
    std::string pattern_text;
    auto as = args.find(" as ");
    if (as != std::string::npos) {
      target = trim(args.substr(0, as));
      pattern_text = trim(args.substr(as + 4));
    }
    target = trim(target);
    if (target.empty()) return TacticError{"Syntax error: [induction_clause_list] expected after 'destruct'."};
    const auto* h = find_hyp(g, target);
    if (!h) {
      if (find_decl(target)) return TacticError{"Tactic failure: destruct on a global reference is not supported."};
      return TacticError{not_found(target)};
    }
    std::string stmt = h->statement;
    Goal base = g;
    remove_hyp(base, target);
    Pattern p;
    if (pattern_text.empty()) {
      // default names: each component reuses the hypothesis name or a fresh one
      if (split_or(stmt)) {
        p.alternatives = {{Pattern{target, {}}}, {Pattern{target, {}}}};
      } else if (split_and(stmt)) {
        p.alternatives = {{Pattern{target, {}}, Pattern{"?", {}}}};
      } else {
        return TacticError{"Tactic failure: " + target + " is not an inductive hypothesis."};
      }
    } else {
      auto parsed = parse_pattern(pattern_text);
      if (!parsed || parsed->is_leaf()) return TacticError{"Syntax error: invalid intro pattern."};
      p = *parsed;
    }
    std::vector<Goal> out;
    if (auto e = destruct_into(base, stmt, p, target, out)) return *e;
    return out;
  }

  Step assert_(const Goal& g, const std::string& args) {
    auto inner = trim(args);
    if (inner.size() < 2 || inner.front() != '(' || inner.back() != ')') {
      return TacticError{"Syntax error: '(' expected after 'assert'."};
    }
    inner = inner.substr(1, inner.size() - 2);
    auto colon = find_top_level(inner, ":");
    if (colon == std::string::npos) return TacticError{"Syntax error: ':' expected in assert."};
    std::string name = trim(inner.substr(0, colon));
    std::string prop = norm(inner.substr(colon + 1));
    if (name.empty() || prop.empty()) return TacticError{"Syntax error: invalid assert."};
    if (name_used(g, name)) return TacticError{name + " is already used."};
    Goal with = g;
    add_hyp(with, name, prop, false);
    return std::vector<Goal>{Goal{g.hyps, prop}, with};
  }

  Step pose_proof(const Goal& g, const std::string& args) {
    // "proof X as H"
    if (first_word(args) != "proof") return TacticError{not_found("pose")};
    std::string rest = trim(std::string_view(args).substr(5));
    auto as = rest.find(" as ");
    std::string term = trim(as == std::string::npos ? rest : rest.substr(0, as));
    std::string name = as == std::string::npos ? fresh_name(g) : trim(rest.substr(as + 4));
    term = norm(term);
    auto stmt = lookup(g, term);
    if (!stmt) {
      for (const auto& tok : identifier_tokens(term)) {
        if (!lookup(g, tok) && !std::isdigit(static_cast<unsigned char>(tok.front()))) {
          return TacticError{not_found(tok)};
        }
      }
      return TacticError{"Cannot infer the type of \"" + term + "\"."};
    }
    if (name_used(g, name)) return TacticError{name + " is already used."};
    Goal out = g;
    add_hyp(out, name, *stmt, false);
    return std::vector<Goal>{out};
  }

  Step apply_(const Goal& g, const std::string& args) {
    auto name = norm(args);
    if (name.empty()) return TacticError{"Syntax error: [constr] expected after 'apply'."};
    auto stmt = lookup(g, name);
    if (!stmt) return TacticError{not_found(name)};
    std::string s = *stmt;
    if (auto q = split_quantifier(s, "forall")) s = q->second;
    if (norm(s) == norm(g.concl)) return std::vector<Goal>{};
    std::vector<std::string> premises;
    while (auto a = split_arrow(s)) {
      premises.push_back(a->first);
      s = a->second;
    }
    if (!premises.empty() && norm(s) == norm(g.concl)) {
      std::vector<Goal> out;
      for (const auto& p : premises) out.push_back(Goal{g.hyps, p});
      return out;
    }
    return TacticError{"Unable to unify \"" + norm(s) + "\" with \"" + g.concl + "\"."};
  }

  // -------------------------------------------------------------------------
  // Queries

  static std::vector<std::string> operator_tokens(std::string_view s) {
    std::vector<std::string> out;
    const std::string ops = "<>=+-*/\\~&|";
    std::size_t i = 0;
    while (i < s.size()) {
      if (ops.find(s[i]) == std::string::npos) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < s.size() && ops.find(s[j]) != std::string::npos) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }

  std::string search(const std::string& pattern) const {
    auto idents = identifier_tokens(pattern);
    auto ops = operator_tokens(pattern);
    std::ostringstream out;
    for (const auto& d : decls_) {
      auto toks = identifier_token_set(d.name + " " + d.statement);
      auto dops = operator_tokens(d.statement);
      bool ok = std::all_of(idents.begin(), idents.end(), [&](const auto& t) { return toks.count(t) != 0; }) &&
                std::all_of(ops.begin(), ops.end(), [&](const auto& o) {
                  return std::find(dops.begin(), dops.end(), o) != dops.end();
                });
      if (ok && (!idents.empty() || !ops.empty())) out << d.name << ": " << d.statement << "\n";
    }
    return out.str();
  }

  std::string check(const std::string& term) const {
    auto t = norm(term);
    const Goal* g = state_.goals.empty() ? nullptr : &state_.goals.front();
    if (g != nullptr) {
      if (auto s = lookup(*g, t)) return t + "\n     : " + *s;
    } else if (const auto* d = find_decl(t)) {
      return t + "\n     : " + d->statement;
    }
    auto lit = drop_scopes(t);
    if (!lit.empty() && std::all_of(lit.begin(), lit.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '(' || c == ')';
        })) {
      return t + "\n     : Z";
    }
    for (const auto& tok : identifier_tokens(drop_scopes(t))) {
      if (std::isdigit(static_cast<unsigned char>(tok.front()))) continue;
      bool known = (g != nullptr && lookup(*g, tok)) || find_decl(tok) != nullptr;
      if (!known) throw ProverError(ProverErrorKind::QueryRejected, not_found(tok));
    }
    bool prop = !relations(t).empty() || split_and(t) || split_or(t) || split_arrow(t);
    return t + "\n     : " + (prop ? "Prop" : "Z");
  }

  std::string print(const std::string& name) const {
    auto n = norm(name);
    if (const auto* d = find_decl(n)) {
      return n + " = " + (d->body.empty() ? "<opaque proof>" : d->body) + "\n     : " + d->statement;
    }
    if (!state_.goals.empty()) {
      if (const auto* h = find_hyp(state_.goals.front(), n)) return "*** [ " + n + " : " + h->statement + " ]";
    }
    throw ProverError(ProverErrorKind::QueryRejected, not_found(n));
  }

  std::string about(const std::string& name) const {
    auto n = norm(name);
    if (const auto* d = find_decl(n)) {
      return n + " : " + d->statement + "\n\nExpands to: Constant " + d->location;
    }
    if (!state_.goals.empty()) {
      if (const auto* h = find_hyp(state_.goals.front(), n)) return n + " : " + h->statement;
    }
    throw ProverError(ProverErrorKind::QueryRejected, not_found(n));
  }

  std::string locate(const std::string& name) const {
    auto n = norm(name);
    if (const auto* d = find_decl(n)) return "Constant " + d->location;
    return "No object of basename " + n;
  }

  const MockProverOptions& options_;
  std::vector<MockDeclaration> decls_;
  State state_;
  std::vector<State> undo_;
};

}  // namespace

std::unique_ptr<ProverSession> MockProverFactory::start(const ProverConfig& config,
                                                        std::string_view lemma_source,
                                                        std::string_view lemma_name,
                                                        std::shared_ptr<Transcript> transcript) const {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ProverError(ProverErrorKind::CompilationFailure, e.what());
  }
  std::vector<MockDeclaration> decls;
  if (options_.load_standard_library) decls = mock_standard_library();
  decls.insert(decls.end(), options_.extra_declarations.begin(), options_.extra_declarations.end());

  auto load = [&](std::string_view text, const std::string& origin, bool stop_at_lemma) -> std::optional<std::string> {
    std::vector<SourceDecl> parsed;
    try {
      parsed = parse_source(text);
    } catch (const SourceError& e) {
      throw ProverError(ProverErrorKind::CompilationFailure, origin + ": " + e.what());
    }
    for (const auto& d : parsed) {
      if (stop_at_lemma && d.is_goal() && d.name == lemma_name) return d.statement;
      decls.push_back({d.name, d.statement, d.body, "Top." + d.name});
    }
    return std::nullopt;
  };

  for (const auto& p : config.prelude_files) {
    auto path = p.is_relative() && !config.working_directory.empty() ? config.working_directory / p : p;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    load(buf.str(), path.string(), false);
  }
  auto statement = load(lemma_source, "source", true);
  if (!statement) {
    throw ProverError(ProverErrorKind::LemmaNotFound,
                      "lemma '" + std::string(lemma_name) + "' not found in source");
  }
  auto session = std::make_unique<MockSession>(options_, std::move(decls), *statement, std::move(transcript));
  session->transcript().append("note", "mock session started for " + std::string(lemma_name));
  return session;
}

}  // namespace proofagent
