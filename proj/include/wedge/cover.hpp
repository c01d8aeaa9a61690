#pragma once

#include <map>
#include <string>
#include <vector>

#include "wedge/expr.hpp"

namespace wedge {

// A labeled copy of the summand-j universal cover inside the cover of the
// level-k finite wedge.  The index word is the coset representative: reduced,
// over summands <= level, not ending in a G_j letter.
struct CopyId {
  int level = 1;
  int summand = 1;
  Word index;
  friend bool operator==(const CopyId&, const CopyId&) = default;
};

inline void validate_copy(const CopyId& c, const WedgeConfig& cfg) {
  if (c.summand < 1 || c.summand > c.level)
    throw Error("copy needs 1 <= summand <= level");
  for (const Letter& l : c.index.letters())
    if (l.summand > c.level)
      throw Error("copy index uses summand " + std::to_string(l.summand) +
                  " beyond level " + std::to_string(c.level));
  if (ends_in(c.index, c.summand)) throw Error("copy index must not end in its own summand");
  (void)cfg;
}

// Where the bonding map sends a copy, one level down.  A copy of the top
// summand collapses to a fiber point; any other copy lands homeomorphically
// on a level-k copy, translated by the deck element exposed when its index
// word loses the level-(k+1) letters.
struct BondingImage {
  bool collapsed = false;
  Word point;     // collapsed case
  CopyId target;  // mapped case
  Elem deck;      // gamma of the nt-decomposition of the projected index
};

inline BondingImage bonding_image(const CopyId& c, const WedgeConfig& cfg) {
  validate_copy(c, cfg);
  if (c.level < 2) throw Error("bonding needs level >= 2");
  BondingImage out;
  if (c.summand == c.level) {
    out.collapsed = true;
    out.point = project_level(c.index, c.level - 1, cfg);
    return out;
  }
  Word down = bonding_step(c.index, c.level - 1, cfg);
  NtSplit split = decompose_nt(down, c.summand, cfg);
  out.target = {c.level - 1, c.summand, split.prefix};
  out.deck = split.tail;
  return out;
}

// The translate coordinate of the copy's assigned tree: identity at the
// creation level (level == summand), and deck^-1 * beta one level up.
inline Elem tree_translate(const CopyId& c, const WedgeConfig& cfg) {
  validate_copy(c, cfg);
  const SummandSpec& spec = cfg.at(c.summand);
  Elem beta = identity(spec);
  CopyId cur = c;
  while (cur.level > cur.summand) {
    BondingImage img = bonding_image(cur, cfg);
    beta = mul(spec, beta, inv(spec, img.deck));
    cur = img.target;
  }
  return beta;
}

// Level-by-level record of the tree translates along a fixed transfinite
// word: beta_k for the copy indexed by the nt-prefix of the level-k
// projection.  The sequence is eventually constant; the report refuses to
// call a value stable without a trailing window of identical values past the
// last level at which a G_j tail was exposed.
struct StabilizationReport {
  Expr target;
  int summand = 1;
  int from_level = 1;        // = summand
  int certified_through = 1;  // = K
  std::vector<Elem> betas;    // betas[i] = beta at level from_level + i
  std::vector<Elem> gammas;   // exposed G_j tail at each level, same indexing
  Elem stable_value;
  int stabilization_level = 1;
  bool certified = false;

  const Elem& beta_at(int k) const { return betas[static_cast<std::size_t>(k - from_level)]; }
  const Elem& gamma_at(int k) const { return gammas[static_cast<std::size_t>(k - from_level)]; }
};

// The level by which the exposed-tail pattern of an expression can no longer
// change: every explicit letter has entered, every block has shown a letter,
// and a forward block passing through j has shown the letter after that hit.
// Beyond this level projections only gain letters above it, which cannot
// reorder or newly separate the G_j letters.
inline int settle_level(const Expr& e, int j) {
  switch (e.kind) {
    case ExprKind::Empty: return 0;
    case ExprKind::Lit: return e.lit.summand;
    case ExprKind::Omega:
      return e.rule.hits(j) ? j + e.rule.step : e.rule.start;
    case ExprKind::OmegaStar: return e.rule.start;
    case ExprKind::Concat: {
      int m = 0;
      for (const Expr& p : e.parts) m = std::max(m, settle_level(p, j));
      return m;
    }
  }
  return 0;
}

inline StabilizationReport stabilize(const Expr& w, int j, int K, const WedgeConfig& cfg) {
  validate_expr(w, cfg);
  if (j < 1) throw Error("summand index must be positive");
  if (K < j) throw Error("level bound must be at least the summand index");
  Terminal t = terminal_summand(w);
  if (t.kind == Terminal::Summand && t.summand == j)
    throw Error("word ends in a letter of summand " + std::to_string(j) +
                "; it indexes no copy of that summand");

  const SummandSpec& spec = cfg.at(j);
  StabilizationReport rep;
  rep.target = w;
  rep.summand = j;
  rep.from_level = j;
  rep.certified_through = K;
  for (int k = j; k <= K; ++k) {
    NtSplit split = decompose_nt(project_expr(w, k, cfg), j, cfg);
    rep.gammas.push_back(split.tail);
    rep.betas.push_back(tree_translate({k, j, split.prefix}, cfg));
  }
  rep.stable_value = rep.betas.back();
  int s = K;
  while (s > j && rep.beta_at(s - 1) == rep.stable_value) --s;
  rep.stabilization_level = s;
  int last_gamma = j - 1;
  for (int k = j; k <= K; ++k)
    if (!is_identity(spec, rep.gamma_at(k))) last_gamma = k;
  // Betas can only move while gammas are alive, gammas are constant past the
  // settle level, and a live settled gamma means the word was terminal after
  // all.  Demand three quiet levels past all of that.
  int quiet_from =
      std::max({rep.stabilization_level, last_gamma + 1, settle_level(w, j) + 1});
  rep.certified = (K - quiet_from >= 2);
  return rep;
}

inline std::string format_stabilization(const StabilizationReport& rep, const WedgeConfig& cfg) {
  const SummandSpec& spec = cfg.at(rep.summand);
  std::string out;
  for (int k = rep.from_level; k <= rep.certified_through; ++k)
    out += std::to_string(k) + " " + format_elem(spec, rep.beta_at(k)) + "\n";
  if (rep.certified) {
    out += "stable " + std::to_string(rep.summand) + ":" + format_elem(spec, rep.stable_value) +
           " at " + std::to_string(rep.stabilization_level) + "\n";
  } else {
    out += "not certified through " + std::to_string(rep.certified_through) + "\n";
  }
  return out;
}

// The combinatorial chart of the level-k cover: one copy per (summand,
// nt-word) with index length <= maxlen, attached wherever two copies contain
// the same fiber word.  Copies meeting at a common point are linked in a
// chain, so the attachment graph stays a tree.
struct Atlas {
  int level = 1;
  int maxlen = 0;
  std::vector<CopyId> copies;
  struct Attachment {
    std::size_t a = 0;
    std::size_t b = 0;
    Word point;
  };
  std::vector<Attachment> attachments;
};

inline Atlas build_atlas(int k, int maxlen, const WedgeConfig& cfg) {
  if (k < 1) throw Error("atlas level must be >= 1");
  Atlas atlas;
  atlas.level = k;
  atlas.maxlen = maxlen;
  for (int j = 1; j <= k; ++j)
    for (const Word& alpha : enumerate_nt(k, j, maxlen, cfg))
      atlas.copies.push_back({k, j, alpha});

  // fiber points of copy (j, alpha): alpha itself and alpha*g for g in G_j
  std::map<Word, std::vector<std::size_t>> holders;
  for (std::size_t c = 0; c < atlas.copies.size(); ++c) {
    const CopyId& copy = atlas.copies[c];
    holders[copy.index].push_back(c);
    for (const Elem& g : enumeration(cfg.at(copy.summand)))
      holders[multiply(copy.index, embed_letter(copy.summand, g, cfg), cfg)].push_back(c);
  }
  for (const auto& [point, cs] : holders)
    for (std::size_t i = 0; i + 1 < cs.size(); ++i)
      atlas.attachments.push_back({cs[i], cs[i + 1], point});
  return atlas;
}

inline std::string emit_atlas_dot(const Atlas& atlas, const WedgeConfig& cfg) {
  std::string out = "graph atlas {\n";
  for (std::size_t i = 0; i < atlas.copies.size(); ++i) {
    const CopyId& c = atlas.copies[i];
    Elem beta = tree_translate(c, cfg);
    out += "  n" + std::to_string(i) + " [label=\"(" + std::to_string(c.summand) + ", " +
           format_word(c.index, cfg) + ", b=" + format_elem(cfg.at(c.summand), beta) + ")\"];\n";
  }
  for (const auto& att : atlas.attachments)
    out += "  n" + std::to_string(att.a) + " -- n" + std::to_string(att.b) + " [label=\"" +
           format_word(att.point, cfg) + "\"];\n";
  out += "}\n";
  return out;
}

inline std::string format_atlas(const Atlas& atlas, const WedgeConfig& cfg) {
  std::string out = "atlas level " + std::to_string(atlas.level) + " maxlen " +
                    std::to_string(atlas.maxlen) + "\n";
  for (const CopyId& c : atlas.copies) {
    out += "copy " + std::to_string(c.summand) + " | " + format_word(c.index, cfg) + " | b " +
           format_elem(cfg.at(c.summand), tree_translate(c, cfg)) + "\n";
  }
  for (const auto& att : atlas.attachments) {
    const CopyId& x = atlas.copies[att.a];
    const CopyId& y = atlas.copies[att.b];
    out += "attach (" + std::to_string(x.summand) + " | " + format_word(x.index, cfg) + ") (" +
           std::to_string(y.summand) + " | " + format_word(y.index, cfg) + ") at " +
           format_word(att.point, cfg) + "\n";
  }
  return out;
}

}  // namespace wedge
