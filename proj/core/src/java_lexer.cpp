#include "cateval/java_lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "cateval/errors.hpp"

namespace cateval::java {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool ident_part(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "abstract", "assert",   "boolean",  "break",      "byte",       "case",
      "catch",    "char",     "class",    "const",      "continue",   "default",
      "do",       "double",   "else",     "enum",       "extends",    "final",
      "finally",  "float",    "for",      "goto",       "if",         "implements",
      "import",   "instanceof", "int",    "interface",  "long",       "native",
      "new",      "package",  "private",  "protected",  "public",     "return",
      "short",    "static",   "strictfp", "super",      "switch",     "synchronized",
      "this",     "throw",    "throws",   "transient",  "try",        "void",
      "volatile", "while",    "true",     "false",      "null",       "record",
  };
  return kw;
}

// Longest-match operator table. Multi-char first.
constexpr std::array<std::string_view, 24> kMultiOps = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "<<",
    ">>",   "<=",  ">=",  "==",  "!=",  "+=", "-=", "*=", "/=", "%=", "&=", "|=",
};
constexpr std::string_view kSingleOps = "^=+-*/%<>!&|~?:;,.(){}[]@";

}  // namespace

bool is_keyword(std::string_view word) { return keywords().count(word) > 0; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto starts_with = [&](std::string_view s) {
    return src.compare(i, s.size(), s) == 0;
  };

  while (i < n) {
    char c = src[i];

    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }

    // Comments.
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t start = i;
      i += 2;
      while (i < n && src[i] != '\n') ++i;
      toks.push_back({TokKind::LineComment, start, i});
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t start = i;
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
      if (i + 1 >= n) throw ParseError("unterminated block comment at byte " + std::to_string(start));
      i += 2;
      toks.push_back({TokKind::BlockComment, start, i});
      continue;
    }

    // Text block or string literal.
    if (c == '"') {
      std::size_t start = i;
      if (starts_with("\"\"\"")) {
        i += 3;
        while (i + 2 < n && !(src[i] == '"' && src[i + 1] == '"' && src[i + 2] == '"')) {
          if (src[i] == '\\') ++i;
          ++i;
        }
        if (i + 2 >= n) throw ParseError("unterminated text block at byte " + std::to_string(start));
        i += 3;
      } else {
        ++i;
        while (i < n && src[i] != '"') {
          if (src[i] == '\\') ++i;
          if (src[i] == '\n') throw ParseError("newline in string literal at byte " + std::to_string(start));
          ++i;
        }
        if (i >= n) throw ParseError("unterminated string literal at byte " + std::to_string(start));
        ++i;
      }
      toks.push_back({TokKind::StringLit, start, i});
      continue;
    }

    if (c == '\'') {
      std::size_t start = i;
      ++i;
      while (i < n && src[i] != '\'') {
        if (src[i] == '\\') ++i;
        ++i;
      }
      if (i >= n) throw ParseError("unterminated char literal at byte " + std::to_string(start));
      ++i;
      toks.push_back({TokKind::CharLit, start, i});
      continue;
    }

    // Numbers, including `.5` and hex/binary forms.
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t start = i;
      bool hex = starts_with("0x") || starts_with("0X");
      bool bin = starts_with("0b") || starts_with("0B");
      if (hex || bin) i += 2;
      while (i < n) {
        char d = src[i];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '_' ||
            (hex && std::isxdigit(static_cast<unsigned char>(d)))) {
          ++i;
        } else if (d == '.' && !hex && !bin && i + 1 < n &&
                   (std::isdigit(static_cast<unsigned char>(src[i + 1])) ||
                    !ident_start(src[i + 1]))) {
          // Fraction dot; `1.foo()` never appears because a digit cannot be
          // a receiver, but `1.` as a double literal is legal.
          ++i;
        } else if (!hex && (d == 'e' || d == 'E') && i + 1 < n &&
                   (std::isdigit(static_cast<unsigned char>(src[i + 1])) ||
                    ((src[i + 1] == '+' || src[i + 1] == '-') && i + 2 < n &&
                     std::isdigit(static_cast<unsigned char>(src[i + 2]))))) {
          i += (src[i + 1] == '+' || src[i + 1] == '-') ? 2 : 1;
        } else if (d == 'l' || d == 'L' || d == 'f' || d == 'F' || d == 'd' || d == 'D' ||
                   (hex && (d == 'p' || d == 'P'))) {
          ++i;
        } else {
          break;
        }
      }
      toks.push_back({TokKind::Number, start, i});
      continue;
    }

    if (ident_start(c)) {
      std::size_t start = i;
      while (i < n && ident_part(src[i])) ++i;
      std::string_view word = src.substr(start, i - start);
      toks.push_back({is_keyword(word) ? TokKind::Keyword : TokKind::Identifier, start, i});
      continue;
    }

    bool matched = false;
    for (std::string_view op : kMultiOps) {
      if (starts_with(op)) {
        toks.push_back({TokKind::Op, i, i + op.size()});
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (kSingleOps.find(c) != std::string_view::npos) {
      toks.push_back({TokKind::Op, i, i + 1});
      ++i;
      continue;
    }

    throw ParseError(std::string("unexpected character '") + c + "' at byte " +
                     std::to_string(i));
  }
  return toks;
}

std::vector<Token> lex_code(std::string_view src) {
  std::vector<Token> toks = lex(src);
  std::vector<Token> out;
  out.reserve(toks.size());
  for (const Token& t : toks)
    if (t.kind != TokKind::LineComment && t.kind != TokKind::BlockComment)
      out.push_back(t);
  return out;
}

std::string strip_comments(std::string_view src) {
  std::vector<Token> toks = lex(src);

  auto is_ws = [](std::string_view s) {
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
  };

  std::string out;
  out.reserve(src.size());
  std::size_t cursor = 0;
  for (const Token& t : toks) {
    if (t.kind != TokKind::LineComment && t.kind != TokKind::BlockComment) continue;
    if (t.begin < cursor) continue;

    // When the comment is the only content on its line(s), remove the whole
    // line(s); otherwise splice out just the comment bytes.
    std::size_t bol = src.rfind('\n', t.begin == 0 ? 0 : t.begin - 1);
    bol = (bol == std::string_view::npos) ? 0 : bol + 1;
    std::size_t eol = src.find('\n', t.end);
    std::size_t splice_begin, splice_end;
    if (bol >= cursor && is_ws(src.substr(bol, t.begin - bol)) &&
        is_ws(src.substr(t.end, (eol == std::string_view::npos ? src.size() : eol) - t.end))) {
      splice_begin = bol;
      splice_end = (eol == std::string_view::npos) ? src.size() : eol + 1;
    } else {
      splice_begin = t.begin;
      splice_end = t.end;
    }

    out.append(src.substr(cursor, splice_begin - cursor));
    // A block comment can separate two word tokens: `a/*x*/b`.
    if (splice_begin == t.begin && t.kind == TokKind::BlockComment && !out.empty() &&
        ident_part(out.back()) && splice_end < src.size() && ident_part(src[splice_end]))
      out.push_back(' ');
    cursor = splice_end;
  }
  if (cursor < src.size()) out.append(src.substr(cursor));
  return out;
}

}  // namespace cateval::java
