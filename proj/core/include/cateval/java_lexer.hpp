#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cateval::java {

enum class TokKind {
  Identifier,
  Keyword,       // includes the literals true/false/null
  Number,
  CharLit,
  StringLit,     // includes text blocks
  Op,            // operators, separators, braces
  LineComment,
  BlockComment,
};

struct Token {
  TokKind kind;
  std::size_t begin = 0;  // byte offsets into the lexed source
  std::size_t end = 0;
};

/// Full token stream including comment tokens, in source order.
/// Throws ParseError on unterminated strings, chars, or block comments.
std::vector<Token> lex(std::string_view src);

/// Token stream with comments dropped.
std::vector<Token> lex_code(std::string_view src);

inline std::string_view text_of(std::string_view src, const Token& t) {
  return src.substr(t.begin, t.end - t.begin);
}

inline bool is(std::string_view src, const Token& t, std::string_view s) {
  return text_of(src, t) == s;
}

bool is_keyword(std::string_view word);

/// Removes comments, keeping every other token byte-identical. A single
/// space is inserted where deletion would fuse two adjacent word-like
/// tokens. Whole lines that held only a comment are dropped.
std::string strip_comments(std::string_view src);

}  // namespace cateval::java
