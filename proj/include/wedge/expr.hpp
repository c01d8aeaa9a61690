#pragma once

#include <string>
#include <vector>

#include "wedge/word.hpp"

namespace wedge {

// Element recipes drive block rules: Const repeats one element, Cycle loops
// a finite list, Pow takes successive powers (used by whisker tail rules,
// not by word expressions).
enum class RecipeKind { Const, Cycle, Pow };

struct ElemRecipe {
  RecipeKind kind = RecipeKind::Const;
  std::vector<Elem> items;  // raw literals; canonicalized per target summand

  friend bool operator==(const ElemRecipe&, const ElemRecipe&) = default;

  Elem at(std::int64_t n, const SummandSpec& target) const {
    switch (kind) {
      case RecipeKind::Const: return canonical(target, items[0]);
      case RecipeKind::Cycle:
        return canonical(target, items[static_cast<std::size_t>(n % static_cast<std::int64_t>(items.size()))]);
      case RecipeKind::Pow: {
        Elem base = canonical(target, items[0]);
        Elem acc = identity(target);
        for (std::int64_t i = 0; i < n + 1; ++i) acc = mul(target, acc, base);
        return acc;
      }
    }
    return {};
  }
};

// Block n (n = 0,1,2,...) is the single letter (start + n*step : recipe(n)).
// step >= 1 forces strictly increasing summand indices, which is what keeps
// every summand's letter count finite.
struct BlockRule {
  int start = 1;
  int step = 1;
  ElemRecipe recipe;
  friend bool operator==(const BlockRule&, const BlockRule&) = default;

  bool hits(int j) const { return j >= start && (j - start) % step == 0; }
  std::int64_t block_of(int j) const { return (j - start) / step; }
  Letter letter(std::int64_t n, const WedgeConfig& cfg) const {
    int s = start + static_cast<int>(n) * step;
    return {s, recipe.at(n, cfg.at(s))};
  }
};

// Closed expression grammar for transfinite words: finitely many letters per
// summand by construction, so projections to every finite level terminate.
enum class ExprKind { Empty, Lit, Concat, Omega, OmegaStar };

struct Expr {
  ExprKind kind = ExprKind::Empty;
  Letter lit{};             // Lit
  std::vector<Expr> parts;  // Concat
  BlockRule rule{};         // Omega / OmegaStar

  friend bool operator==(const Expr&, const Expr&) = default;

  static Expr empty() { return {}; }
  static Expr literal(Letter l) {
    Expr e;
    e.kind = ExprKind::Lit;
    e.lit = l;
    return e;
  }
  static Expr concat(std::vector<Expr> parts) {
    Expr e;
    e.kind = ExprKind::Concat;
    e.parts = std::move(parts);
    return e;
  }
  static Expr omega(BlockRule r) {
    Expr e;
    e.kind = ExprKind::Omega;
    e.rule = std::move(r);
    return e;
  }
  static Expr omega_star(BlockRule r) {
    Expr e;
    e.kind = ExprKind::OmegaStar;
    e.rule = std::move(r);
    return e;
  }
};

namespace detail {

inline void validate_rule(const BlockRule& r, const WedgeConfig& cfg) {
  if (r.start < 1) throw Error("block rule must start at a positive summand");
  if (r.step < 1) throw Error("block rule step must be >= 1");
  if (r.recipe.items.empty()) throw Error("block rule has no elements");
  if (r.recipe.kind == RecipeKind::Pow)
    throw Error("power recipes are not part of the word-expression grammar");
  // Every explicit summand the rule hits, plus the default template, must
  // see a non-identity element; identity blocks would be hidden trivial
  // letters.
  std::size_t m = r.recipe.items.size();
  for (std::size_t idx = 0; idx < m; ++idx) {
    if (is_identity(cfg.fallback, canonical(cfg.fallback, r.recipe.items[idx])))
      throw Error("block rule element is the identity in the default summand group");
  }
  for (const auto& [j, spec] : cfg.explicit_summands) {
    if (!r.hits(j)) continue;
    std::int64_t n = r.block_of(j);
    if (is_identity(spec, r.recipe.at(n, spec)))
      throw Error("block rule element is the identity at summand " + std::to_string(j));
  }
}

inline void collect_letters(const Expr& e, int k, const WedgeConfig& cfg, std::vector<Letter>& out) {
  switch (e.kind) {
    case ExprKind::Empty: return;
    case ExprKind::Lit:
      if (e.lit.summand <= k) out.push_back(e.lit);
      return;
    case ExprKind::Concat:
      for (const Expr& p : e.parts) collect_letters(p, k, cfg, out);
      return;
    case ExprKind::Omega: {
      for (std::int64_t n = 0; e.rule.start + n * e.rule.step <= k; ++n)
        out.push_back(e.rule.letter(n, cfg));
      return;
    }
    case ExprKind::OmegaStar: {
      std::vector<Letter> tmp;
      for (std::int64_t n = 0; e.rule.start + n * e.rule.step <= k; ++n)
        tmp.push_back(e.rule.letter(n, cfg));
      out.insert(out.end(), tmp.rbegin(), tmp.rend());
      return;
    }
  }
}

}  // namespace detail

inline void validate_expr(const Expr& e, const WedgeConfig& cfg) {
  switch (e.kind) {
    case ExprKind::Empty: return;
    case ExprKind::Lit: {
      const SummandSpec& spec = cfg.at(e.lit.summand);
      check_elem(spec, e.lit.elem);
      if (is_identity(spec, e.lit.elem)) throw Error("literal letters must be non-identity");
      return;
    }
    case ExprKind::Concat:
      for (const Expr& p : e.parts) validate_expr(p, cfg);
      return;
    case ExprKind::Omega:
    case ExprKind::OmegaStar:
      detail::validate_rule(e.rule, cfg);
      return;
  }
}

// Reduced projection to the free product over summands 1..k.  Only finitely
// many blocks reach level k, so this always terminates.
inline Word project_expr(const Expr& e, int k, const WedgeConfig& cfg) {
  validate_expr(e, cfg);
  std::vector<Letter> raw;
  detail::collect_letters(e, k, cfg, raw);
  return Word::reduced(raw, cfg);
}

struct LevelVerdict {
  bool agree = false;  // agree through the checked bound
  int level = 0;       // bound when agree, first difference otherwise
};

// Sound for inequality, inconclusive for equality: words are equal iff all
// finite projections match, and only levels <= K are inspected here.
inline LevelVerdict equal_up_to(const Expr& w, const Expr& v, int K, const WedgeConfig& cfg) {
  for (int k = 1; k <= K; ++k)
    if (project_expr(w, k, cfg) != project_expr(v, k, cfg)) return {false, k};
  return {true, K};
}

inline Expr multiply_expr(const Expr& u, const Expr& v) { return Expr::concat({u, v}); }

inline Expr invert_expr(const Expr& e, const WedgeConfig& cfg) {
  switch (e.kind) {
    case ExprKind::Empty: return e;
    case ExprKind::Lit:
      return Expr::literal({e.lit.summand, inv(cfg.at(e.lit.summand), e.lit.elem)});
    case ExprKind::Concat: {
      std::vector<Expr> parts;
      parts.reserve(e.parts.size());
      for (auto it = e.parts.rbegin(); it != e.parts.rend(); ++it)
        parts.push_back(invert_expr(*it, cfg));
      return Expr::concat(std::move(parts));
    }
    case ExprKind::Omega:
    case ExprKind::OmegaStar: {
      BlockRule r = e.rule;
      if (cfg.at(r.start).kind == GroupKind::Table) {
        // symbol indices invert through the table of the hit summands
        const SummandSpec& spec = cfg.at(r.start);
        for (Elem& item : r.recipe.items) item = inv(spec, canonical(spec, item));
      } else {
        // raw integer literals invert by negation; canonicalization happens
        // per hit summand when the block letter is materialized
        for (Elem& item : r.recipe.items) item = {-item.a, -item.b};
      }
      return e.kind == ExprKind::Omega ? Expr::omega_star(std::move(r)) : Expr::omega(std::move(r));
    }
  }
  return e;
}

// The summand of the order-maximal letter, if the underlying linear order
// has one.  An omega tail has no maximum; the maximal letter of an
// omega-star tail is its block 0.
struct Terminal {
  enum Kind { EmptyWord, NoMax, Summand } kind = EmptyWord;
  int summand = 0;
};

inline Terminal terminal_summand(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Empty: return {Terminal::EmptyWord, 0};
    case ExprKind::Lit: return {Terminal::Summand, e.lit.summand};
    case ExprKind::Omega: return {Terminal::NoMax, 0};
    case ExprKind::OmegaStar: return {Terminal::Summand, e.rule.start};
    case ExprKind::Concat:
      for (auto it = e.parts.rbegin(); it != e.parts.rend(); ++it) {
        Terminal t = terminal_summand(*it);
        if (t.kind != Terminal::EmptyWord) return t;
      }
      return {Terminal::EmptyWord, 0};
  }
  return {Terminal::EmptyWord, 0};
}

// The finitely many G_j letters of the expression, in order.
inline void letters_in_summand_rec(const Expr& e, int j, const WedgeConfig& cfg,
                                   std::vector<Elem>& out) {
  switch (e.kind) {
    case ExprKind::Empty: return;
    case ExprKind::Lit:
      if (e.lit.summand == j) out.push_back(e.lit.elem);
      return;
    case ExprKind::Concat:
      for (const Expr& p : e.parts) letters_in_summand_rec(p, j, cfg, out);
      return;
    case ExprKind::Omega:
    case ExprKind::OmegaStar:
      if (e.rule.hits(j)) out.push_back(e.rule.recipe.at(e.rule.block_of(j), cfg.at(j)));
      return;
  }
}

inline std::vector<Elem> letters_in_summand(const Expr& e, int j, const WedgeConfig& cfg) {
  std::vector<Elem> out;
  letters_in_summand_rec(e, j, cfg, out);
  return out;
}

inline int max_explicit_summand(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Lit: return e.lit.summand;
    case ExprKind::Concat: {
      int m = 0;
      for (const Expr& p : e.parts) m = std::max(m, max_explicit_summand(p));
      return m;
    }
    default: return 0;
  }
}

inline bool has_block(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Omega:
    case ExprKind::OmegaStar: return true;
    case ExprKind::Concat:
      for (const Expr& p : e.parts)
        if (has_block(p)) return true;
      return false;
    default: return false;
  }
}

inline int max_block_start(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Omega:
    case ExprKind::OmegaStar: return e.rule.start;
    case ExprKind::Concat: {
      int m = 0;
      for (const Expr& p : e.parts) m = std::max(m, max_block_start(p));
      return m;
    }
    default: return 0;
  }
}

// Expression syntax:
//   e                                  empty word
//   j:g                                single letter
//   ( expr expr ... )                  concatenation
//   omega[diag <start> <step> const <g>]
//   omega[diag <start> <step> cycle <g1> ... <gm>]
//   omega*[ ... ]                      reverse-ordered blocks
namespace detail {

inline Elem parse_raw_elem(const Token& t) {
  // Raw recipe literal: integer or "a,b" pair; symbols resolve later against
  // the summands the rule hits.
  auto comma = t.text.find(',');
  try {
    if (comma == std::string::npos) {
      std::size_t used = 0;
      std::int64_t v = std::stoll(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument(t.text);
      return {v, 0};
    }
    std::size_t used = 0;
    std::int64_t a = std::stoll(t.text.substr(0, comma), &used);
    std::int64_t b = std::stoll(t.text.substr(comma + 1), &used);
    return {a, b};
  } catch (const std::exception&) {
    throw ParseError("bad rule element '" + t.text + "'", t.line, t.col);
  }
}

inline ElemRecipe parse_recipe(TokenCursor& cur, bool allow_pow) {
  Token kind = cur.next();
  ElemRecipe r;
  if (kind.text == "const") {
    r.kind = RecipeKind::Const;
    r.items.push_back(parse_raw_elem(cur.next()));
    return r;
  }
  if (kind.text == "cycle") {
    r.kind = RecipeKind::Cycle;
    while (!cur.done() && cur.peek().text != "]" && cur.peek().text != ")" &&
           !(cur.peek().text == "summand" || cur.peek().text == "escape" ||
             cur.peek().text == "members" || cur.peek().text == "coeffs"))
      r.items.push_back(parse_raw_elem(cur.next()));
    if (r.items.empty()) throw ParseError("cycle recipe needs elements", kind.line, kind.col);
    return r;
  }
  if (allow_pow && kind.text == "pow") {
    r.kind = RecipeKind::Pow;
    r.items.push_back(parse_raw_elem(cur.next()));
    return r;
  }
  throw ParseError("unknown recipe '" + kind.text + "'", kind.line, kind.col);
}

inline BlockRule parse_block_rule(TokenCursor& cur, bool allow_pow = false, int min_step = 1) {
  cur.expect("diag");
  BlockRule r;
  Token st = cur.next();
  r.start = static_cast<int>(parse_int(st));
  Token sp = cur.next();
  r.step = static_cast<int>(parse_int(sp));
  if (r.start < 1) throw ParseError("rule start must be positive", st.line, st.col);
  if (r.step < min_step) throw ParseError("rule step too small", sp.line, sp.col);
  r.recipe = parse_recipe(cur, allow_pow);
  return r;
}

inline Expr parse_expr_cursor(TokenCursor& cur, const WedgeConfig& cfg) {
  Token t = cur.next();
  if (t.text == "e") return Expr::empty();
  if (t.text == "(") {
    std::vector<Expr> parts;
    while (cur.peek().text != ")") parts.push_back(parse_expr_cursor(cur, cfg));
    cur.expect(")");
    return Expr::concat(std::move(parts));
  }
  if (t.text == "omega" || t.text == "omega*") {
    cur.expect("[");
    BlockRule r = parse_block_rule(cur);
    cur.expect("]");
    return t.text == "omega" ? Expr::omega(std::move(r)) : Expr::omega_star(std::move(r));
  }
  return Expr::literal(parse_letter(t, cfg));
}

}  // namespace detail

// Top level is lenient: several juxtaposed expressions concatenate.
inline Expr parse_expr(const std::vector<Token>& toks, const WedgeConfig& cfg) {
  TokenCursor cur(toks);
  std::vector<Expr> parts;
  while (!cur.done()) parts.push_back(detail::parse_expr_cursor(cur, cfg));
  Expr e = parts.empty() ? Expr::empty()
           : parts.size() == 1 ? parts[0]
                               : Expr::concat(std::move(parts));
  validate_expr(e, cfg);
  return e;
}

inline Expr parse_expr(const std::string& text, const WedgeConfig& cfg) {
  return parse_expr(tokenize(text), cfg);
}

inline std::string format_raw_elem(const Elem& e) {
  if (e.b != 0) return std::to_string(e.a) + "," + std::to_string(e.b);
  return std::to_string(e.a);
}

inline std::string format_recipe(const ElemRecipe& r) {
  std::string out;
  switch (r.kind) {
    case RecipeKind::Const: out = "const"; break;
    case RecipeKind::Cycle: out = "cycle"; break;
    case RecipeKind::Pow: out = "pow"; break;
  }
  for (const Elem& e : r.items) out += " " + format_raw_elem(e);
  return out;
}

inline std::string format_block_rule(const BlockRule& r) {
  return "diag " + std::to_string(r.start) + " " + std::to_string(r.step) + " " +
         format_recipe(r.recipe);
}

inline std::string format_expr(const Expr& e, const WedgeConfig& cfg) {
  switch (e.kind) {
    case ExprKind::Empty: return "e";
    case ExprKind::Lit: return format_letter(e.lit, cfg);
    case ExprKind::Concat: {
      std::string out = "(";
      for (const Expr& p : e.parts) out += " " + format_expr(p, cfg);
      return out + " )";
    }
    case ExprKind::Omega: return "omega[" + format_block_rule(e.rule) + "]";
    case ExprKind::OmegaStar: return "omega*[" + format_block_rule(e.rule) + "]";
  }
  return "e";
}

}  // namespace wedge
