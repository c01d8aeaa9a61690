#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wedge/expr.hpp"

namespace wedge {

// Basic fiber neighborhood N(base, depth): base times any word whose letters
// all lie in summands above depth.
struct FiberNbhd {
  Expr base;
  int depth = 0;
};

struct NbhdVerdict {
  enum Kind { Yes, No, Inconclusive } kind = Inconclusive;
  int level = 0;  // first exposing level for No; checked bound for Yes
};

// Membership of candidate in N(base, J), checked through level K.  A letter
// of summand <= J surviving in some projection is a definitive refutation;
// a clean run certifies membership when every explicit letter and block has
// been seen by level K.
inline NbhdVerdict in_nbhd(const Expr& candidate, const FiberNbhd& nbhd, int K,
                           const WedgeConfig& cfg) {
  validate_expr(candidate, cfg);
  validate_expr(nbhd.base, cfg);
  if (nbhd.depth < 0) throw Error("neighborhood depth must be >= 0");
  if (nbhd.base == candidate) return {NbhdVerdict::Yes, K};
  Expr eps = multiply_expr(invert_expr(nbhd.base, cfg), candidate);
  for (int k = 1; k <= K; ++k) {
    Word p = project_expr(eps, k, cfg);
    for (const Letter& l : p.letters())
      if (l.summand <= nbhd.depth) return {NbhdVerdict::No, k};
  }
  bool structurally_clean = true;
  for (int i = 1; i <= nbhd.depth && structurally_clean; ++i)
    if (!letters_in_summand(eps, i, cfg).empty()) structurally_clean = false;
  if (structurally_clean) return {NbhdVerdict::Yes, K};
  if (K >= nbhd.depth && max_explicit_summand(eps) <= K && max_block_start(eps) <= K)
    return {NbhdVerdict::Yes, K};
  return {NbhdVerdict::Inconclusive, K};
}

// Arithmetic progressions index tail data: value(i) = start + (i-1)*step for
// i = 1,2,3,...
struct IndexRule {
  std::int64_t start = 0;
  std::int64_t step = 0;
  friend bool operator==(const IndexRule&, const IndexRule&) = default;
  std::int64_t at(std::int64_t i) const { return start + (i - 1) * step; }
};

struct MemberRule {
  IndexRule pos;      // summand of the escaping letter of member i
  ElemRecipe recipe;  // its element, recipe index i-1
  friend bool operator==(const MemberRule&, const MemberRule&) = default;
};

// A sequence of coset representatives rep_i = limit * beta_i converging to
// limit in the whisker model: beta_i must use only summands above the
// escape depth J(i), and J(i) must grow.
struct ConvergentTail {
  Expr limit;
  IndexRule summand;  // coefficient group index of member i
  IndexRule escape;   // J(i)
  std::optional<MemberRule> members;  // nullopt: every rep_i is the limit itself
  ElemRecipe coeffs;  // coefficient of member i, recipe index i-1
  friend bool operator==(const ConvergentTail&, const ConvergentTail&) = default;
};

struct IsolatedEntry {
  int summand = 1;
  Expr rep;
  Elem coeff;
  friend bool operator==(const IsolatedEntry&, const IsolatedEntry&) = default;
};

struct SupportFamily {
  std::vector<IsolatedEntry> isolated;
  std::vector<ConvergentTail> tails;
  friend bool operator==(const SupportFamily&, const SupportFamily&) = default;
};

// A finitely described candidate element of the product-of-direct-sums:
// per-summand coefficient groups plus a structured support.
struct ThetaElement {
  std::string config_ref;
  int level = 8;  // declared level for rep comparisons
  WedgeConfig coeff_groups;
  SupportFamily support;
  friend bool operator==(const ThetaElement&, const ThetaElement&) = default;
};

// The escaping letter of member i, or nothing when it melts to the identity.
inline std::optional<Letter> member_letter(const ConvergentTail& tail, std::int64_t i,
                                           const WedgeConfig& cfg) {
  if (!tail.members) return std::nullopt;
  std::int64_t s = tail.members->pos.at(i);
  if (s < 1) throw Error("tail member letter would sit at a non-positive summand");
  const SummandSpec& spec = cfg.at(static_cast<int>(s));
  Elem e = tail.members->recipe.at(i - 1, spec);
  if (is_identity(spec, e)) return std::nullopt;
  return Letter{static_cast<int>(s), e};
}

inline Expr member_rep(const ConvergentTail& tail, std::int64_t i, const WedgeConfig& cfg) {
  auto l = member_letter(tail, i, cfg);
  if (!l) return tail.limit;
  return multiply_expr(tail.limit, Expr::literal(*l));
}

struct ConvergenceReport {
  bool ok = true;
  std::int64_t failed_at = 0;
  std::string reason;
};

// Verifies, member by member, that the declared tail really converges:
// escape depths strictly increase and each escaping letter sits above its
// depth.
inline ConvergenceReport check_convergence(const ConvergentTail& tail, std::int64_t samples,
                                           const WedgeConfig& cfg) {
  for (std::int64_t i = 1; i <= samples; ++i) {
    if (i >= 2 && tail.escape.at(i) <= tail.escape.at(i - 1))
      return {false, i, "escape depth does not increase"};
    auto l = member_letter(tail, i, cfg);
    if (l && l->summand <= tail.escape.at(i))
      return {false, i,
              "member letter at level " + std::to_string(l->summand) +
                  " is not above escape depth " + std::to_string(tail.escape.at(i))};
  }
  return {};
}

namespace detail {

// Exact escape analysis for the whole (infinite) tail.  Positions are
// linear in i, and once the member positions leave the explicitly
// configured summands the element pattern is periodic over the default
// group, so scanning one full period beyond the first arithmetic violation
// settles every later member.
inline ConvergenceReport tail_escapes(const ConvergentTail& tail, std::int64_t K,
                                      const WedgeConfig& cfg) {
  if (tail.escape.step < 1) return {false, 2, "escape depth does not increase"};
  std::int64_t bound = std::max<std::int64_t>(2 * K, 64);
  if (tail.members) {
    std::int64_t d0 = tail.members->pos.at(1) - tail.escape.at(1);
    std::int64_t dstep = tail.members->pos.step - tail.escape.step;
    if (dstep < 0) {
      std::int64_t first_bad = d0 <= 0 ? 1 : 1 + (d0 + (-dstep) - 1) / (-dstep);
      std::int64_t period = 1;
      // the group the positions eventually live in: constant positions stay
      // in one summand, moving ones end up in the default template
      const SummandSpec& eventual = tail.members->pos.step == 0
                                        ? cfg.at(static_cast<int>(tail.members->pos.start))
                                        : cfg.fallback;
      switch (tail.members->recipe.kind) {
        case RecipeKind::Const: period = 1; break;
        case RecipeKind::Cycle:
          period = static_cast<std::int64_t>(tail.members->recipe.items.size());
          break;
        case RecipeKind::Pow:
          // the element order bounds the melting pattern
          if (eventual.kind == GroupKind::Cyclic) period = eventual.modulus;
          if (eventual.kind == GroupKind::Table)
            period = static_cast<std::int64_t>(eventual.table->size());
          break;
      }
      std::int64_t last_explicit = 0;
      for (const auto& [j, spec] : cfg.explicit_summands) {
        if (tail.members->pos.step == 0) break;  // constant position: one spec throughout
        std::int64_t num = j - tail.members->pos.start;
        if (num >= 0 && num % tail.members->pos.step == 0)
          last_explicit = std::max(last_explicit, num / tail.members->pos.step + 1);
      }
      bound = std::max(bound, std::max(first_bad, last_explicit) + period + 2);
    }
  }
  return check_convergence(tail, bound, cfg);
}

inline void require_nonterminal(const Expr& rep, std::int64_t j, const std::string& what) {
  Terminal t = terminal_summand(rep);
  if (t.kind == Terminal::Summand && t.summand == j)
    throw Error(what + " ends in a letter of its own summand " + std::to_string(j));
}

}  // namespace detail

inline void validate_theta(const ThetaElement& el, const WedgeConfig& cfg) {
  for (const auto& [j, spec] : el.coeff_groups.explicit_summands)
    if (!is_abelian(spec)) throw Error("coefficient group at " + std::to_string(j) + " is not abelian");
  if (!is_abelian(el.coeff_groups.fallback)) throw Error("default coefficient group is not abelian");

  for (std::size_t i = 0; i < el.support.isolated.size(); ++i) {
    const IsolatedEntry& entry = el.support.isolated[i];
    if (entry.summand < 1) throw Error("isolated entry has a non-positive summand");
    validate_expr(entry.rep, cfg);
    detail::require_nonterminal(entry.rep, entry.summand, "isolated representative");
    const SummandSpec& A = el.coeff_groups.at(entry.summand);
    check_elem(A, entry.coeff);
    if (is_identity(A, entry.coeff)) throw Error("isolated coefficient is zero");
    for (std::size_t k = 0; k < i; ++k)
      if (el.support.isolated[k].summand == entry.summand && el.support.isolated[k].rep == entry.rep)
        throw Error("duplicate isolated support entry");
  }
  for (std::size_t t = 0; t < el.support.tails.size(); ++t) {
    const ConvergentTail& tail = el.support.tails[t];
    validate_expr(tail.limit, cfg);
    if (tail.summand.at(1) < 1 || tail.summand.step < 0)
      throw Error("tail summand rule must stay positive and non-decreasing");
    if (tail.coeffs.items.empty()) throw Error("tail has no coefficients");
    // Materialized spot check on the coefficients.  Member representatives
    // are not required to be non-terminal here: a member whose escaping
    // letter collides with its own summand can never converge, and the
    // image predicate reports that as a non-escape witness instead.
    for (std::int64_t i = 1; i <= 16; ++i) {
      std::int64_t j = tail.summand.at(i);
      const SummandSpec& A = el.coeff_groups.at(static_cast<int>(j));
      if (is_identity(A, tail.coeffs.at(i - 1, A))) throw Error("tail coefficient is zero");
    }
    for (std::size_t k = 0; k < t; ++k) {
      const ConvergentTail& other = el.support.tails[k];
      if (other.limit == tail.limit && other.summand == tail.summand &&
          other.members == tail.members)
        throw Error("two tails describe the same members; coefficients conflict");
    }
  }
}

struct ThetaVerdict {
  enum Kind { InImage, NotInImage, Inconclusive } kind = Inconclusive;
  std::string witness;
};

// The image predicate: a structured support lies in the image exactly when
// its closure in the whisker model is compact.  Isolated points and
// properly escaping tails are compact; the predicate fails on a tail that
// does not escape or on a summand carrying unboundedly many entries.
inline ThetaVerdict in_theta_image(const ThetaElement& el, int K, const WedgeConfig& cfg) {
  validate_theta(el, cfg);
  for (std::size_t t = 0; t < el.support.tails.size(); ++t) {
    ConvergenceReport rep = detail::tail_escapes(el.support.tails[t], K, cfg);
    if (!rep.ok)
      return {ThetaVerdict::NotInImage,
              "non-escaping tail " + std::to_string(t + 1) + " at member " +
                  std::to_string(rep.failed_at) + ": " + rep.reason};
  }
  for (std::size_t t = 0; t < el.support.tails.size(); ++t) {
    if (el.support.tails[t].summand.step == 0)
      return {ThetaVerdict::NotInImage,
              "unbounded support at summand " + std::to_string(el.support.tails[t].summand.start) +
                  " (tail " + std::to_string(t + 1) + ")"};
  }
  return {ThetaVerdict::InImage, ""};
}

// Coefficientwise sum.  Representatives are matched per summand: structural
// equality merges, a projection difference separates, and agreement through
// the declared level without structural equality is reported as
// undecidable rather than guessed.
inline ThetaElement add_theta(const ThetaElement& a, const ThetaElement& b, const WedgeConfig& cfg) {
  if (a.config_ref != b.config_ref || !(a.coeff_groups == b.coeff_groups))
    throw Error("mismatched configurations");
  validate_theta(a, cfg);
  validate_theta(b, cfg);
  int L = std::min(a.level, b.level);
  ThetaElement out;
  out.config_ref = a.config_ref;
  out.level = L;
  out.coeff_groups = a.coeff_groups;
  out.support.isolated = a.support.isolated;

  for (const IsolatedEntry& entry : b.support.isolated) {
    bool merged = false;
    for (std::size_t i = 0; i < out.support.isolated.size() && !merged; ++i) {
      IsolatedEntry& mine = out.support.isolated[i];
      if (mine.summand != entry.summand || !(mine.rep == entry.rep)) continue;
      const SummandSpec& A = out.coeff_groups.at(entry.summand);
      mine.coeff = mul(A, mine.coeff, entry.coeff);
      merged = true;
      if (is_identity(A, mine.coeff))
        out.support.isolated.erase(out.support.isolated.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (merged) continue;
    for (const IsolatedEntry& mine : out.support.isolated) {
      if (mine.summand != entry.summand) continue;
      if (equal_up_to(mine.rep, entry.rep, L, cfg).agree)
        throw Error("representative comparison inconclusive at level " + std::to_string(L));
    }
    out.support.isolated.push_back(entry);
  }

  out.support.tails = a.support.tails;
  for (const ConvergentTail& tail : b.support.tails) {
    bool merged = false;
    for (std::size_t i = 0; i < out.support.tails.size(); ++i) {
      ConvergentTail& mine = out.support.tails[i];
      if (!(mine.limit == tail.limit && mine.summand == tail.summand &&
            mine.escape == tail.escape && mine.members == tail.members))
        continue;
      if (mine.coeffs.kind != tail.coeffs.kind ||
          mine.coeffs.items.size() != tail.coeffs.items.size() ||
          mine.coeffs.kind == RecipeKind::Pow)
        throw Error("tail coefficient recipes cannot be combined");
      // Raw literals sum componentwise; the canonical value of the sum is
      // then inspected in the coefficient group of each early member.
      ElemRecipe sum = mine.coeffs;
      bool raw_zero = true;
      for (std::size_t m = 0; m < sum.items.size(); ++m) {
        sum.items[m] = {mine.coeffs.items[m].a + tail.coeffs.items[m].a,
                        mine.coeffs.items[m].b + tail.coeffs.items[m].b};
        if (sum.items[m].a != 0 || sum.items[m].b != 0) raw_zero = false;
      }
      bool any_zero = false;
      for (std::int64_t s = 1; s <= 16; ++s) {
        const SummandSpec& A = out.coeff_groups.at(static_cast<int>(mine.summand.at(s)));
        if (is_identity(A, sum.at(s - 1, A))) any_zero = true;
      }
      merged = true;
      if (raw_zero) {
        out.support.tails.erase(out.support.tails.begin() + static_cast<std::ptrdiff_t>(i));
      } else if (any_zero) {
        throw Error("tail coefficients cancel unevenly; not representable");
      } else {
        mine.coeffs = sum;
      }
      break;
    }
    if (!merged) out.support.tails.push_back(tail);
  }
  return out;
}

// --- file format -----------------------------------------------------------
//
//   theta <config-ref> level <K>
//   coeffgroup default <group>
//   coeffgroup <j> <group>
//   iso <j> <word-expr> <coeff>
//   tail limit <word-expr> summand <rule> escape <rule>
//        members none | <rule-with-recipe> coeffs <recipe>
//
// Index rules are "const <v>" or "diag <start> <step>" (a bare integer means
// const).

namespace detail {

inline IndexRule parse_index_rule(TokenCursor& cur) {
  Token t = cur.next();
  if (t.text == "const") return {parse_int(cur.next()), 0};
  if (t.text == "diag") {
    std::int64_t s = parse_int(cur.next());
    std::int64_t st = parse_int(cur.next());
    return {s, st};
  }
  // bare integer
  return {parse_int(t), 0};
}

inline std::string format_index_rule(const IndexRule& r) {
  if (r.step == 0) return "const " + std::to_string(r.start);
  return "diag " + std::to_string(r.start) + " " + std::to_string(r.step);
}

}  // namespace detail

inline ThetaElement parse_theta(const std::string& text, const WedgeConfig& cfg,
                                const FileReader& read_file = {}) {
  ThetaElement el;
  auto toks = tokenize(text);
  std::vector<std::vector<Token>> rows;
  std::size_t i = 0;
  while (i < toks.size()) {
    int line = toks[i].line;
    std::vector<Token> row;
    while (i < toks.size() && toks[i].line == line) row.push_back(toks[i++]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("empty theta file");

  // header and coefficient groups first; defaults to integer coefficients
  bool saw_header = false;
  for (const auto& row : rows) {
    TokenCursor cur(row);
    Token head = cur.next();
    if (head.text == "theta") {
      el.config_ref = cur.next().text;
      cur.expect("level");
      el.level = static_cast<int>(parse_int(cur.next()));
      saw_header = true;
    } else if (head.text == "coeffgroup") {
      Token jt = cur.next();
      if (jt.text == "default")
        el.coeff_groups.fallback = parse_group_spec(cur, read_file);
      else
        el.coeff_groups.explicit_summands[static_cast<int>(parse_int(jt))] =
            parse_group_spec(cur, read_file);
    }
  }
  if (!saw_header) throw Error("theta file is missing its 'theta ... level ...' header");

  for (const auto& row : rows) {
    TokenCursor cur(row);
    Token head = cur.next();
    if (head.text == "theta" || head.text == "coeffgroup") continue;
    if (head.text == "iso") {
      IsolatedEntry entry;
      entry.summand = static_cast<int>(parse_int(cur.next()));
      entry.rep = detail::parse_expr_cursor(cur, cfg);
      Token ct = cur.next();
      const SummandSpec& A = el.coeff_groups.at(entry.summand);
      entry.coeff = canonical(A, parse_elem(A, ct.text, ct.line, ct.col));
      if (!cur.done()) throw ParseError("trailing tokens after iso entry", cur.peek().line, cur.peek().col);
      el.support.isolated.push_back(std::move(entry));
    } else if (head.text == "tail") {
      ConvergentTail tail;
      cur.expect("limit");
      tail.limit = detail::parse_expr_cursor(cur, cfg);
      cur.expect("summand");
      tail.summand = detail::parse_index_rule(cur);
      cur.expect("escape");
      tail.escape = detail::parse_index_rule(cur);
      cur.expect("members");
      if (cur.peek().text == "none") {
        cur.next();
      } else {
        cur.expect("diag");
        MemberRule m;
        m.pos.start = parse_int(cur.next());
        m.pos.step = parse_int(cur.next());
        m.recipe = detail::parse_recipe(cur, /*allow_pow=*/true);
        tail.members = std::move(m);
      }
      cur.expect("coeffs");
      tail.coeffs = detail::parse_recipe(cur, /*allow_pow=*/false);
      if (!cur.done()) throw ParseError("trailing tokens after tail", cur.peek().line, cur.peek().col);
      el.support.tails.push_back(std::move(tail));
    } else {
      throw ParseError("unknown theta directive '" + head.text + "'", head.line, head.col);
    }
  }
  return el;
}

inline std::string format_theta(const ThetaElement& el, const WedgeConfig& cfg) {
  std::string out = "theta " + el.config_ref + " level " + std::to_string(el.level) + "\n";
  out += "coeffgroup default " + format_group_spec(el.coeff_groups.fallback) + "\n";
  for (const auto& [j, spec] : el.coeff_groups.explicit_summands)
    out += "coeffgroup " + std::to_string(j) + " " + format_group_spec(spec) + "\n";
  for (const IsolatedEntry& entry : el.support.isolated) {
    const SummandSpec& A = el.coeff_groups.at(entry.summand);
    out += "iso " + std::to_string(entry.summand) + " " + format_expr(entry.rep, cfg) + " " +
           format_elem(A, entry.coeff) + "\n";
  }
  for (const ConvergentTail& tail : el.support.tails) {
    out += "tail limit " + format_expr(tail.limit, cfg) + " summand " +
           detail::format_index_rule(tail.summand) + " escape " +
           detail::format_index_rule(tail.escape) + " members ";
    if (tail.members) {
      out += "diag " + std::to_string(tail.members->pos.start) + " " +
             std::to_string(tail.members->pos.step) + " " + format_recipe(tail.members->recipe);
    } else {
      out += "none";
    }
    out += " coeffs " + format_recipe(tail.coeffs) + "\n";
  }
  return out;
}

}  // namespace wedge
