#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wedge/base.hpp"

namespace wedge {

// Summand groups are black boxes with computable normal forms.  Four kinds
// are built in; "table" admits any small finite group given by its
// multiplication table.
enum class GroupKind { Integer, Cyclic, Table, ZxZ };

// Canonical element encoding in two 64-bit slots:
//   Integer: a;  Cyclic n: a in [0,n);  Table: a = symbol index;  ZxZ: (a,b).
struct Elem {
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const Elem&, const Elem&) = default;
  friend auto operator<=>(const Elem&, const Elem&) = default;
};

struct MulTable {
  std::string name;
  std::vector<std::string> symbols;
  std::size_t identity = 0;
  std::vector<std::size_t> product;  // row-major: product[i*n+j] = index of s_i * s_j

  std::size_t size() const { return symbols.size(); }
  std::size_t mul(std::size_t i, std::size_t j) const { return product[i * size() + j]; }
};

// Exhaustive group-axiom check: identity, associativity, inverses.  Closure
// is implicit in the index representation and is validated while loading.
inline void validate_table(const MulTable& t) {
  std::size_t n = t.size();
  if (n < 2) throw Error("table group '" + t.name + "' is trivial");
  if (t.product.size() != n * n) throw Error("table '" + t.name + "' is not square");
  for (std::size_t v : t.product)
    if (v >= n) throw Error("table '" + t.name + "' is not closed");
  bool found_identity = false;
  for (std::size_t e = 0; e < n; ++e) {
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i)
      if (t.mul(e, i) != i || t.mul(i, e) != i) { ok = false; break; }
    if (ok) {
      if (e != t.identity) throw Error("table '" + t.name + "' identity mismatch");
      found_identity = true;
    }
  }
  if (!found_identity) throw Error("table '" + t.name + "' has no identity");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (t.mul(t.mul(i, j), k) != t.mul(i, t.mul(j, k)))
          throw Error("table '" + t.name + "' is not associative");
  for (std::size_t i = 0; i < n; ++i) {
    bool has_inv = false;
    for (std::size_t j = 0; j < n; ++j)
      if (t.mul(i, j) == t.identity && t.mul(j, i) == t.identity) has_inv = true;
    if (!has_inv) throw Error("table '" + t.name + "' lacks an inverse for '" + t.symbols[i] + "'");
  }
}

// Table file format: first line lists the symbols, each following line is
// one row of the multiplication table ("<sym>: <products...>").
inline MulTable load_table(const std::string& text, const std::string& name) {
  MulTable t;
  t.name = name;
  auto toks = tokenize(text);
  if (toks.empty()) throw Error("table '" + name + "' is empty");
  int first_line = toks[0].line;
  std::size_t i = 0;
  while (i < toks.size() && toks[i].line == first_line) t.symbols.push_back(toks[i++].text);
  std::size_t n = t.symbols.size();
  auto index_of = [&](const Token& tok) -> std::size_t {
    for (std::size_t k = 0; k < n; ++k)
      if (t.symbols[k] == tok.text) return k;
    throw ParseError("unknown symbol '" + tok.text + "' in table '" + name + "'", tok.line, tok.col);
  };
  for (const std::string& s : t.symbols)
    for (char c : s)
      if (!isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
        throw Error("table symbol '" + s + "' must be alphanumeric");
  t.product.assign(n * n, 0);
  std::vector<bool> row_seen(n, false);
  while (i < toks.size()) {
    Token head = toks[i++];
    std::string row_sym = head.text;
    if (!row_sym.empty() && row_sym.back() == ':') row_sym.pop_back();
    std::size_t r = index_of({row_sym, head.line, head.col});
    row_seen[r] = true;
    for (std::size_t c = 0; c < n; ++c) {
      if (i >= toks.size()) throw ParseError("short row in table '" + name + "'", head.line, head.col);
      t.product[r * n + c] = index_of(toks[i++]);
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    if (!row_seen[r]) throw Error("table '" + name + "' is missing the row for '" + t.symbols[r] + "'");
  // locate the identity before the full axiom check
  for (std::size_t e = 0; e < n; ++e) {
    bool ok = true;
    for (std::size_t k = 0; k < n; ++k)
      if (t.mul(e, k) != k || t.mul(k, e) != k) { ok = false; break; }
    if (ok) { t.identity = e; break; }
  }
  validate_table(t);
  return t;
}

struct SummandSpec {
  GroupKind kind = GroupKind::Integer;
  std::int64_t modulus = 0;               // Cyclic
  std::shared_ptr<const MulTable> table;  // Table
  std::string table_ref;                  // path as written in the config
  std::vector<Elem> alphabet;             // declared enumeration for Integer/ZxZ

  friend bool operator==(const SummandSpec& x, const SummandSpec& y) {
    if (x.kind != y.kind || x.modulus != y.modulus || x.alphabet != y.alphabet) return false;
    if (x.kind == GroupKind::Table) {
      if (!x.table || !y.table) return x.table == y.table;
      return x.table->symbols == y.table->symbols && x.table->product == y.table->product;
    }
    return true;
  }
};

inline SummandSpec integer_group() { return {}; }
inline SummandSpec cyclic_group(std::int64_t n) {
  if (n < 2) throw Error("cyclic summand must have order >= 2 (trivial groups are forbidden)");
  SummandSpec s;
  s.kind = GroupKind::Cyclic;
  s.modulus = n;
  return s;
}
inline SummandSpec zxz_group() {
  SummandSpec s;
  s.kind = GroupKind::ZxZ;
  return s;
}
inline SummandSpec table_group(std::shared_ptr<const MulTable> t, std::string ref = "") {
  validate_table(*t);
  SummandSpec s;
  s.kind = GroupKind::Table;
  s.table = std::move(t);
  s.table_ref = std::move(ref);
  return s;
}

inline Elem identity(const SummandSpec& s) {
  if (s.kind == GroupKind::Table) return {static_cast<std::int64_t>(s.table->identity), 0};
  return {0, 0};
}

inline bool is_valid(const SummandSpec& s, const Elem& e) {
  switch (s.kind) {
    case GroupKind::Integer: return e.b == 0;
    case GroupKind::Cyclic: return e.b == 0 && e.a >= 0 && e.a < s.modulus;
    case GroupKind::Table: return e.b == 0 && e.a >= 0 && e.a < static_cast<std::int64_t>(s.table->size());
    case GroupKind::ZxZ: return true;
  }
  return false;
}

inline void check_elem(const SummandSpec& s, const Elem& e) {
  if (!is_valid(s, e)) throw Error("element encoding out of range for summand group");
}

inline bool is_identity(const SummandSpec& s, const Elem& e) { return e == identity(s); }

inline Elem mul(const SummandSpec& s, const Elem& x, const Elem& y) {
  check_elem(s, x);
  check_elem(s, y);
  switch (s.kind) {
    case GroupKind::Integer: return {x.a + y.a, 0};
    case GroupKind::Cyclic: return {(x.a + y.a) % s.modulus, 0};
    case GroupKind::Table:
      return {static_cast<std::int64_t>(s.table->mul(x.a, y.a)), 0};
    case GroupKind::ZxZ: return {x.a + y.a, x.b + y.b};
  }
  return {};
}

inline Elem inv(const SummandSpec& s, const Elem& x) {
  check_elem(s, x);
  switch (s.kind) {
    case GroupKind::Integer: return {-x.a, 0};
    case GroupKind::Cyclic: return {(s.modulus - x.a) % s.modulus, 0};
    case GroupKind::Table: {
      for (std::size_t j = 0; j < s.table->size(); ++j)
        if (s.table->mul(x.a, j) == s.table->identity) return {static_cast<std::int64_t>(j), 0};
      throw Error("table element has no inverse");  // unreachable after validation
    }
    case GroupKind::ZxZ: return {-x.a, -x.b};
  }
  return {};
}

// Brings a raw literal into canonical range (cyclic residues); rejects
// encodings that cannot be interpreted in this group.
inline Elem canonical(const SummandSpec& s, const Elem& e) {
  switch (s.kind) {
    case GroupKind::Integer:
      if (e.b != 0) throw Error("pair literal used in an integer summand");
      return e;
    case GroupKind::Cyclic:
      if (e.b != 0) throw Error("pair literal used in a cyclic summand");
      return {((e.a % s.modulus) + s.modulus) % s.modulus, 0};
    case GroupKind::Table:
      check_elem(s, e);
      return e;
    case GroupKind::ZxZ:
      return e;
  }
  return e;
}

inline bool is_abelian(const SummandSpec& s) {
  if (s.kind != GroupKind::Table) return true;
  std::size_t n = s.table->size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (s.table->mul(i, j) != s.table->mul(j, i)) return false;
  return true;
}

inline std::string format_elem(const SummandSpec& s, const Elem& e) {
  switch (s.kind) {
    case GroupKind::Integer:
    case GroupKind::Cyclic: return std::to_string(e.a);
    case GroupKind::Table: return s.table->symbols[static_cast<std::size_t>(e.a)];
    case GroupKind::ZxZ: return std::to_string(e.a) + "," + std::to_string(e.b);
  }
  return "";
}

inline Elem parse_elem(const SummandSpec& s, const std::string& text, int line, int col) {
  auto as_int = [&](const std::string& part) -> std::int64_t {
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad element literal '" + text + "'", line, col);
    }
  };
  switch (s.kind) {
    case GroupKind::Integer: return {as_int(text), 0};
    case GroupKind::Cyclic: return canonical(s, {as_int(text), 0});
    case GroupKind::Table: {
      for (std::size_t k = 0; k < s.table->size(); ++k)
        if (s.table->symbols[k] == text) return {static_cast<std::int64_t>(k), 0};
      throw ParseError("unknown element symbol '" + text + "'", line, col);
    }
    case GroupKind::ZxZ: {
      auto comma = text.find(',');
      if (comma == std::string::npos)
        throw ParseError("ZxZ element literal must look like 'a,b'", line, col);
      return {as_int(text.substr(0, comma)), as_int(text.substr(comma + 1))};
    }
  }
  return {};
}

inline bool enumerable(const SummandSpec& s) {
  switch (s.kind) {
    case GroupKind::Cyclic:
    case GroupKind::Table: return true;
    default: return !s.alphabet.empty();
  }
}

// Non-identity elements in canonical order: residues 1..n-1 for cyclic,
// symbol order for tables, declared order for alphabets.
inline std::vector<Elem> enumeration(const SummandSpec& s) {
  std::vector<Elem> out;
  switch (s.kind) {
    case GroupKind::Cyclic:
      for (std::int64_t r = 1; r < s.modulus; ++r) out.push_back({r, 0});
      return out;
    case GroupKind::Table:
      for (std::size_t k = 0; k < s.table->size(); ++k)
        if (k != s.table->identity) out.push_back({static_cast<std::int64_t>(k), 0});
      return out;
    default:
      if (s.alphabet.empty())
        throw Error("summand is not enumerable and has no declared alphabet");
      return s.alphabet;
  }
}

// The wedge configuration: finitely many explicit summands plus a default
// template, so the infinite family stays finitely describable.
struct WedgeConfig {
  std::map<int, SummandSpec> explicit_summands;
  SummandSpec fallback;  // nontrivial by construction

  const SummandSpec& at(int j) const {
    if (j < 1) throw Error("summand index must be a positive integer");
    auto it = explicit_summands.find(j);
    return it == explicit_summands.end() ? fallback : it->second;
  }

  friend bool operator==(const WedgeConfig&, const WedgeConfig&) = default;
};

inline Elem group_mul(const WedgeConfig& cfg, int j, const Elem& x, const Elem& y) {
  return mul(cfg.at(j), x, y);
}
inline Elem group_inv(const WedgeConfig& cfg, int j, const Elem& x) { return inv(cfg.at(j), x); }
inline bool is_identity(const WedgeConfig& cfg, int j, const Elem& x) {
  return is_identity(cfg.at(j), x);
}

using FileReader = std::function<std::string(const std::string&)>;

inline SummandSpec parse_group_spec(TokenCursor& cur, const FileReader& read_file) {
  Token kind = cur.next();
  if (kind.text == "integer") return integer_group();
  if (kind.text == "cyclic") return cyclic_group(parse_int(cur.next()));
  if (kind.text == "zxz") return zxz_group();
  if (kind.text == "table") {
    Token path = cur.next();
    if (!read_file) throw ParseError("table groups need a file reader", path.line, path.col);
    auto t = std::make_shared<MulTable>(load_table(read_file(path.text), path.text));
    return table_group(std::move(t), path.text);
  }
  throw ParseError("unknown group kind '" + kind.text + "'", kind.line, kind.col);
}

// Configuration grammar, one directive per line:
//   default <group>
//   summand <j> <group>
//   alphabet <j>|default <elem> ...
// where <group> is: integer | cyclic <n> | zxz | table <path>
inline WedgeConfig parse_config(const std::string& text, const FileReader& read_file = {}) {
  WedgeConfig cfg;
  auto toks = tokenize(text);
  std::size_t i = 0;
  struct PendingAlphabet {
    bool is_default;
    int index;
    std::vector<Token> items;
  };
  std::vector<PendingAlphabet> alphabets;
  while (i < toks.size()) {
    int line = toks[i].line;
    std::vector<Token> row;
    while (i < toks.size() && toks[i].line == line) row.push_back(toks[i++]);
    TokenCursor cur(row);
    Token head = cur.next();
    if (head.text == "default") {
      cfg.fallback = parse_group_spec(cur, read_file);
    } else if (head.text == "summand") {
      Token jt = cur.next();
      std::int64_t j = parse_int(jt);
      if (j < 1) throw ParseError("summand index must be positive", jt.line, jt.col);
      if (cfg.explicit_summands.count(static_cast<int>(j)))
        throw ParseError("summand " + std::to_string(j) + " declared twice", jt.line, jt.col);
      cfg.explicit_summands[static_cast<int>(j)] = parse_group_spec(cur, read_file);
    } else if (head.text == "alphabet") {
      Token jt = cur.next();
      PendingAlphabet pa;
      pa.is_default = (jt.text == "default");
      pa.index = pa.is_default ? 0 : static_cast<int>(parse_int(jt));
      while (!cur.done()) pa.items.push_back(cur.next());
      if (pa.items.empty()) throw ParseError("empty alphabet", jt.line, jt.col);
      alphabets.push_back(std::move(pa));
    } else {
      throw ParseError("unknown config directive '" + head.text + "'", head.line, head.col);
    }
    if (!cur.done()) {
      Token extra = cur.peek();
      throw ParseError("trailing tokens after directive", extra.line, extra.col);
    }
  }
  // alphabets attach after all group kinds are known
  for (const auto& pa : alphabets) {
    SummandSpec* target = pa.is_default ? &cfg.fallback : nullptr;
    if (!pa.is_default) {
      auto it = cfg.explicit_summands.find(pa.index);
      if (it == cfg.explicit_summands.end()) {
        cfg.explicit_summands[pa.index] = cfg.fallback;
        it = cfg.explicit_summands.find(pa.index);
      }
      target = &it->second;
    }
    target->alphabet.clear();
    for (const Token& t : pa.items) {
      Elem e = canonical(*target, parse_elem(*target, t.text, t.line, t.col));
      if (is_identity(*target, e))
        throw ParseError("alphabet entries must be non-identity", t.line, t.col);
      if (std::find(target->alphabet.begin(), target->alphabet.end(), e) == target->alphabet.end())
        target->alphabet.push_back(e);
    }
  }
  return cfg;
}

inline std::string format_group_spec(const SummandSpec& s) {
  switch (s.kind) {
    case GroupKind::Integer: return "integer";
    case GroupKind::Cyclic: return "cyclic " + std::to_string(s.modulus);
    case GroupKind::ZxZ: return "zxz";
    case GroupKind::Table: return "table " + s.table_ref;
  }
  return "";
}

inline std::string format_config(const WedgeConfig& cfg) {
  std::string out = "default " + format_group_spec(cfg.fallback) + "\n";
  for (const auto& [j, s] : cfg.explicit_summands)
    out += "summand " + std::to_string(j) + " " + format_group_spec(s) + "\n";
  if (!cfg.fallback.alphabet.empty()) {
    out += "alphabet default";
    for (const Elem& e : cfg.fallback.alphabet) out += " " + format_elem(cfg.fallback, e);
    out += "\n";
  }
  for (const auto& [j, s] : cfg.explicit_summands) {
    if (s.alphabet.empty()) continue;
    out += "alphabet " + std::to_string(j);
    for (const Elem& e : s.alphabet) out += " " + format_elem(s, e);
    out += "\n";
  }
  return out;
}

}  // namespace wedge
