#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wedge {

// Input errors carry the position of the offending token so the CLI can
// cite line and column.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

// Semantic errors: violated invariants, unresolvable indices, malformed
// structures. These are not positional.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

// Splits on whitespace; '(' ')' '[' ']' are always tokens of their own, so
// "omega[diag 1 2 const 1]" and "( 1:1 2:1 )" tokenize the same way.
// '#' starts a comment that runs to end of line.
inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 0;
  std::string cur;
  int cur_line = 0, cur_col = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back({cur, cur_line, cur_col});
      cur.clear();
    }
  };
  bool comment = false;
  for (char c : text) {
    if (c == '\n') {
      flush();
      comment = false;
      ++line;
      col = 0;
      continue;
    }
    ++col;
    if (comment) continue;
    if (c == '#') {
      flush();
      comment = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      flush();
      continue;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']') {
      flush();
      out.push_back({std::string(1, c), line, col});
      continue;
    }
    if (cur.empty()) {
      cur_line = line;
      cur_col = col;
    }
    cur += c;
  }
  flush();
  return out;
}

// Sequential reader over a token stream.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of input", last_line(), last_col());
    return tokens_[pos_];
  }
  Token next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }
  Token expect(const std::string& text) {
    Token t = next();
    if (t.text != text)
      throw ParseError("expected '" + text + "', got '" + t.text + "'", t.line, t.col);
    return t;
  }
  int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }
  int last_col() const { return tokens_.empty() ? 1 : tokens_.back().col + 1; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline std::int64_t parse_int(const Token& t) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument(t.text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + t.text + "'", t.line, t.col);
  }
}

}  // namespace wedge
