#pragma once

#include <set>
#include <string>
#include <vector>

#include "wedge/group.hpp"

namespace wedge {

struct Letter {
  int summand = 0;
  Elem elem;
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// A reduced word in the free product of the configured summand groups.
// Invariants: no identity letters, adjacent letters lie in distinct summands.
// Every Word is reduced on construction, so equality is structural.
class Word {
 public:
  Word() = default;

  static Word reduced(const std::vector<Letter>& raw, const WedgeConfig& cfg) {
    Word w;
    for (const Letter& l : raw) w.push_reduce(l, cfg);
    return w;
  }

  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::size_t size() const { return letters_.size(); }
  const Letter& back() const { return letters_.back(); }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

  // Appends one letter, cancelling or merging with the current tail.
  void push_reduce(const Letter& l, const WedgeConfig& cfg) {
    const SummandSpec& spec = cfg.at(l.summand);
    Elem e = l.elem;
    check_elem(spec, e);
    if (is_identity(spec, e)) return;
    if (!letters_.empty() && letters_.back().summand == l.summand) {
      Elem merged = mul(spec, letters_.back().elem, e);
      letters_.pop_back();
      if (!is_identity(spec, merged)) letters_.push_back({l.summand, merged});
      return;
    }
    letters_.push_back({l.summand, e});
  }

 private:
  std::vector<Letter> letters_;
};

inline Word reduce(const std::vector<Letter>& raw, const WedgeConfig& cfg) {
  return Word::reduced(raw, cfg);
}

inline Word multiply(const Word& u, const Word& v, const WedgeConfig& cfg) {
  Word out = u;
  for (const Letter& l : v.letters()) out.push_reduce(l, cfg);
  return out;
}

inline Word invert(const Word& u, const WedgeConfig& cfg) {
  std::vector<Letter> rev;
  rev.reserve(u.size());
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it)
    rev.push_back({it->summand, inv(cfg.at(it->summand), it->elem)});
  return Word::reduced(rev, cfg);
}

// The deletion homomorphism onto the sub-free-product over the index set F.
inline Word project(const Word& w, const std::set<int>& keep, const WedgeConfig& cfg) {
  Word out;
  for (const Letter& l : w.letters())
    if (keep.count(l.summand)) out.push_reduce(l, cfg);
  return out;
}

inline Word project_level(const Word& w, int k, const WedgeConfig& cfg) {
  Word out;
  for (const Letter& l : w.letters())
    if (l.summand <= k) out.push_reduce(l, cfg);
  return out;
}

// One step of the inverse system: from level k+1 down to level k.
inline Word bonding_step(const Word& w, int k, const WedgeConfig& cfg) {
  for (const Letter& l : w.letters())
    if (l.summand > k + 1)
      throw Error("word has a letter at summand " + std::to_string(l.summand) +
                  ", beyond level " + std::to_string(k + 1));
  return project_level(w, k, cfg);
}

inline bool ends_in(const Word& w, int j) { return !w.empty() && w.back().summand == j; }

// w = prefix * tail with prefix not ending in a G_j letter.  A reduced word
// never ends in two G_j letters, so peeling the terminal letter suffices.
struct NtSplit {
  Word prefix;
  Elem tail;  // identity when w was already non-terminal
};

inline NtSplit decompose_nt(const Word& w, int j, const WedgeConfig& cfg) {
  NtSplit out;
  out.tail = identity(cfg.at(j));
  if (!ends_in(w, j)) {
    out.prefix = w;
    return out;
  }
  std::vector<Letter> ls = w.letters();
  out.tail = ls.back().elem;
  ls.pop_back();
  out.prefix = Word::reduced(ls, cfg);  // already reduced; normalizes defensively
  return out;
}

inline Word embed_letter(int j, const Elem& g, const WedgeConfig& cfg) {
  Word out;
  out.push_reduce({j, g}, cfg);
  return out;
}

// All reduced words of length <= maxlen over summands 1..k that do not end
// in a G_j letter, in length-then-lexicographic order.
inline std::vector<Word> enumerate_nt(int k, int j, int maxlen, const WedgeConfig& cfg) {
  if (j < 1 || j > k) throw Error("nt enumeration needs 1 <= j <= k");
  std::vector<std::vector<Elem>> elems(static_cast<std::size_t>(k) + 1);
  for (int s = 1; s <= k; ++s) elems[s] = enumeration(cfg.at(s));

  std::vector<Word> out;
  std::vector<std::vector<Letter>> frontier = {{}};
  out.emplace_back();
  for (int len = 1; len <= maxlen; ++len) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : frontier) {
      int last = w.empty() ? 0 : w.back().summand;
      for (int s = 1; s <= k; ++s) {
        if (s == last) continue;  // appending a distinct-summand letter keeps the word reduced
        for (const Elem& e : elems[s]) {
          auto ext = w;
          ext.push_back({s, e});
          next.push_back(std::move(ext));
        }
      }
    }
    for (const auto& w : next)
      if (w.back().summand != j) out.push_back(Word::reduced(w, cfg));
    frontier = std::move(next);
  }
  return out;
}

// Word literal syntax: whitespace-separated "j:g" tokens; "e" is the empty
// word.  Parsing normalizes, so any raw spelling is accepted.
inline Letter parse_letter(const Token& t, const WedgeConfig& cfg) {
  auto colon = t.text.find(':');
  if (colon == std::string::npos || colon == 0)
    throw ParseError("expected a letter 'j:g', got '" + t.text + "'", t.line, t.col);
  std::int64_t j = 0;
  try {
    std::size_t used = 0;
    j = std::stoll(t.text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(t.text);
  } catch (const std::exception&) {
    throw ParseError("bad summand index in '" + t.text + "'", t.line, t.col);
  }
  if (j < 1) throw ParseError("summand index must be positive in '" + t.text + "'", t.line, t.col);
  const SummandSpec& spec = cfg.at(static_cast<int>(j));
  Elem e = canonical(spec, parse_elem(spec, t.text.substr(colon + 1), t.line, t.col));
  return {static_cast<int>(j), e};
}

inline Word parse_word(const std::vector<Token>& toks, const WedgeConfig& cfg) {
  if (toks.size() == 1 && toks[0].text == "e") return {};
  std::vector<Letter> raw;
  for (const Token& t : toks) {
    if (t.text == "e") continue;
    raw.push_back(parse_letter(t, cfg));
  }
  return Word::reduced(raw, cfg);
}

inline Word parse_word(const std::string& text, const WedgeConfig& cfg) {
  return parse_word(tokenize(text), cfg);
}

inline std::string format_letter(const Letter& l, const WedgeConfig& cfg) {
  return std::to_string(l.summand) + ":" + format_elem(cfg.at(l.summand), l.elem);
}

inline std::string format_word(const Word& w, const WedgeConfig& cfg) {
  if (w.empty()) return "e";
  std::string out;
  for (const Letter& l : w.letters()) {
    if (!out.empty()) out += " ";
    out += format_letter(l, cfg);
  }
  return out;
}

}  // namespace wedge
