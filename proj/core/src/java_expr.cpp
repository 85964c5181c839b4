#include "cateval/java_expr.hpp"

#include <algorithm>
#include <unordered_set>

#include "cateval/errors.hpp"

namespace cateval::java {

namespace {

/// Thrown internally when the mini expression parser loses confidence.
struct Bail {};

/// Precedence parser over a token slice. It only needs to be right about
/// where relational/equality operators sit; anything exotic bails out.
class ExprScanner {
 public:
  ExprScanner(std::string_view src, const std::vector<Token>& toks)
      : src_(src), toks_(toks) {}

  std::vector<Comparison> scan() {
    if (toks_.empty()) return {};
    try {
      parse_expression();
      while (pos_ < toks_.size() && at(","))  // expression lists: i++, j++
      {
        advance();
        parse_expression();
      }
      if (pos_ != toks_.size()) return {};  // trailing junk: distrust all
    } catch (const Bail&) {
      return {};
    }
    return found_;
  }

 private:
  bool done() const { return pos_ >= toks_.size(); }
  const Token& tok(std::size_t off = 0) const {
    if (pos_ + off >= toks_.size()) throw Bail{};
    return toks_[pos_ + off];
  }
  std::string_view text(std::size_t off = 0) const {
    return pos_ + off < toks_.size() ? text_of(src_, toks_[pos_ + off])
                                     : std::string_view{};
  }
  bool at(std::string_view s) const { return !done() && text() == s; }
  void advance() { ++pos_; }
  void expect(std::string_view s) {
    if (!at(s)) throw Bail{};
    advance();
  }

  Span parse_expression() { return parse_assignment(); }

  Span parse_assignment() {
    Span left = parse_ternary();
    static const char* kAssign[] = {"=",  "+=", "-=", "*=", "/=",  "%=",
                                    "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    for (auto op : kAssign) {
      if (at(op)) {
        advance();
        Span right = parse_assignment();
        return {left.begin, right.end};
      }
    }
    return left;
  }

  Span parse_ternary() {
    Span cond = parse_lambda_or(/*level=*/0);
    if (at("?")) {
      advance();
      parse_expression();
      expect(":");
      Span rest = parse_ternary();
      return {cond.begin, rest.end};
    }
    return cond;
  }

  // Binary operator tiers, loosest first.
  Span parse_lambda_or(int level) {
    struct Tier {
      std::vector<std::string_view> ops;
      bool comparisons;
    };
    static const std::vector<Tier> kTiers = {
        {{"||"}, false},
        {{"&&"}, false},
        {{"|"}, false},
        {{"^"}, false},
        {{"&"}, false},
        {{"==", "!="}, true},
        {{"<", ">", "<=", ">="}, true},  // instanceof handled inline
        {{"<<", ">>", ">>>"}, false},
        {{"+", "-"}, false},
        {{"*", "/", "%"}, false},
    };
    if (level >= static_cast<int>(kTiers.size())) return parse_unary();

    const Tier& tier = kTiers[static_cast<std::size_t>(level)];
    Span left = parse_lambda_or(level + 1);
    while (!done()) {
      if (tier.comparisons && at("instanceof")) {
        advance();
        skip_type();
        continue;
      }
      bool matched = false;
      for (auto op : tier.ops) {
        if (!at(op)) continue;
        // '<' that opens a plausible generic argument list is not a
        // comparison; bail rather than guess.
        if (op == "<" && match_generic(pos_) != npos) throw Bail{};
        Span op_span{tok().begin, tok().end};
        advance();
        Span right = parse_lambda_or(level + 1);
        if (tier.comparisons) {
          Comparison c;
          c.lhs = left;
          c.rhs = right;
          c.op = op_span;
          c.op_text = std::string(text_of(src_, Token{TokKind::Op, op_span.begin, op_span.end}));
          found_.push_back(c);
        }
        left = {left.begin, right.end};
        matched = true;
        break;
      }
      if (!matched) break;
    }
    return left;
  }

  Span parse_unary() {
    if (at("+") || at("-") || at("!") || at("~") || at("++") || at("--")) {
      Span op{tok().begin, tok().end};
      advance();
      Span operand = parse_unary();
      return {op.begin, operand.end};
    }
    // cast: '(' type ')' followed by a value-ish token
    if (at("(")) {
      std::size_t close = matching_paren(pos_);
      if (close != npos && close + 1 < toks_.size() && is_cast(pos_, close)) {
        Span open{tok().begin, tok().end};
        pos_ = close + 1;
        Span operand = parse_unary();
        return {open.begin, operand.end};
      }
    }
    return parse_postfix();
  }

  Span parse_postfix() {
    Span p = parse_primary();
    while (!done()) {
      if (at(".")) {
        advance();
        if (at("new")) { advance(); }       // qualified inner-class new
        else if (at("<")) {                  // explicit type args
          std::size_t g = match_generic(pos_);
          if (g == npos) throw Bail{};
          pos_ = g;
        }
        if (done()) throw Bail{};
        p.end = tok().end;
        advance();
        continue;
      }
      if (at("::")) {
        advance();
        if (done()) throw Bail{};
        p.end = tok().end;
        advance();
        continue;
      }
      if (at("(")) {
        std::size_t close = matching_paren(pos_);
        if (close == npos) throw Bail{};
        p.end = toks_[close].end;
        scan_arguments(pos_ + 1, close);
        pos_ = close + 1;
        continue;
      }
      if (at("[")) {
        int depth = 0;
        while (!done()) {
          if (at("[")) ++depth;
          else if (at("]")) {
            if (--depth == 0) {
              p.end = tok().end;
              advance();
              break;
            }
          }
          advance();
        }
        continue;
      }
      if (at("++") || at("--")) {
        p.end = tok().end;
        advance();
        continue;
      }
      break;
    }
    return p;
  }

  Span parse_primary() {
    if (done()) throw Bail{};
    const Token& t = tok();
    Span span{t.begin, t.end};

    if (t.kind == TokKind::Number || t.kind == TokKind::StringLit ||
        t.kind == TokKind::CharLit) {
      advance();
      return span;
    }
    if (at("true") || at("false") || at("null") || at("this")) {
      advance();
      return span;
    }
    if (at("new")) return parse_new();
    if (at("(")) {
      std::size_t close = matching_paren(pos_);
      if (close == npos) throw Bail{};
      // lambda: (params) -> body
      if (close + 1 < toks_.size() && text_of(src_, toks_[close + 1]) == "->") {
        pos_ = close + 2;
        Span body = parse_lambda_body();
        return {span.begin, body.end};
      }
      advance();
      parse_expression();
      expect(")");
      return {span.begin, prev_end()};
    }
    if (t.kind == TokKind::Identifier) {
      // identifier -> lambda
      if (text(1) == "->") {
        advance();
        advance();
        Span body = parse_lambda_body();
        return {span.begin, body.end};
      }
      advance();
      return span;
    }
    // primitive types appear as `int.class` or in casts; tolerate `X.class`
    if (t.kind == TokKind::Keyword && is_primitive(text())) {
      advance();
      return span;
    }
    if (at("switch")) throw Bail{};  // switch expressions: out of model
    throw Bail{};
  }

  Span parse_lambda_body() {
    if (at("{")) {
      Span s{tok().begin, tok().end};
      int depth = 0;
      while (!done()) {
        if (at("{")) ++depth;
        else if (at("}")) {
          if (--depth == 0) {
            s.end = tok().end;
            advance();
            return s;
          }
        }
        advance();
      }
      throw Bail{};
    }
    return parse_expression();
  }

  Span parse_new() {
    Span s{tok().begin, tok().end};
    expect("new");
    skip_type();
    if (at("(")) {
      std::size_t close = matching_paren(pos_);
      if (close == npos) throw Bail{};
      scan_arguments(pos_ + 1, close);
      pos_ = close + 1;
      s.end = prev_end();
      // anonymous class body
      if (at("{")) {
        int depth = 0;
        while (!done()) {
          if (at("{")) ++depth;
          else if (at("}")) {
            if (--depth == 0) {
              s.end = tok().end;
              advance();
              break;
            }
          }
          advance();
        }
      }
      return s;
    }
    if (at("[")) {
      while (at("[")) {
        int depth = 0;
        while (!done()) {
          if (at("[")) ++depth;
          else if (at("]")) {
            if (--depth == 0) {
              advance();
              break;
            }
          }
          advance();
        }
      }
      s.end = prev_end();
      if (at("{")) {  // array initializer
        int depth = 0;
        while (!done()) {
          if (at("{")) ++depth;
          else if (at("}")) {
            if (--depth == 0) {
              s.end = tok().end;
              advance();
              break;
            }
          }
          advance();
        }
      }
      return s;
    }
    if (at("{")) {  // new int[] {..} already consumed dims; direct init
      int depth = 0;
      while (!done()) {
        if (at("{")) ++depth;
        else if (at("}")) {
          if (--depth == 0) {
            s.end = tok().end;
            advance();
            break;
          }
        }
        advance();
      }
      return s;
    }
    throw Bail{};
  }

  /// Arguments between parens: recursively scan each for comparisons.
  void scan_arguments(std::size_t from, std::size_t to) {
    std::size_t start = from;
    int depth = 0;
    for (std::size_t i = from; i <= to && i < toks_.size(); ++i) {
      std::string_view t = text_of(src_, toks_[i]);
      bool at_end = (i == to);
      if (!at_end && (t == "(" || t == "[" || t == "{")) ++depth;
      else if (!at_end && (t == ")" || t == "]" || t == "}")) --depth;
      if ((at_end || (depth == 0 && t == "," )) && i > start) {
        std::vector<Token> slice_toks(toks_.begin() + static_cast<long>(start),
                                      toks_.begin() + static_cast<long>(i));
        ExprScanner inner(src_, slice_toks);
        for (auto& c : inner.scan()) found_.push_back(c);
        start = i + 1;
      }
    }
  }

  void skip_type() {
    if (done()) throw Bail{};
    if (is_primitive(text()) || tok().kind == TokKind::Identifier) advance();
    else throw Bail{};
    while (!done()) {
      if (at(".") && pos_ + 1 < toks_.size() &&
          toks_[pos_ + 1].kind == TokKind::Identifier) {
        advance();
        advance();
        continue;
      }
      if (at("<")) {
        std::size_t g = match_generic(pos_);
        if (g == npos) return;
        pos_ = g;
        continue;
      }
      break;
    }
  }

  static bool is_primitive(std::string_view t) {
    static const char* kPrims[] = {"int",   "long",   "short",  "byte",
                                   "char",  "float",  "double", "boolean", "void"};
    for (auto p : kPrims)
      if (t == p) return true;
    return false;
  }

  std::size_t matching_paren(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < toks_.size(); ++i) {
      std::string_view t = text_of(src_, toks_[i]);
      if (t == "(") ++depth;
      else if (t == ")") {
        if (--depth == 0) return i;
      }
    }
    return npos;
  }

  bool is_cast(std::size_t open, std::size_t close) const {
    // (Type) x  — inside must look like a type; next token must start a value
    std::string_view next = text_of(src_, toks_[close + 1]);
    bool value_start = toks_[close + 1].kind == TokKind::Identifier ||
                       toks_[close + 1].kind == TokKind::Number ||
                       toks_[close + 1].kind == TokKind::StringLit ||
                       toks_[close + 1].kind == TokKind::CharLit || next == "(" ||
                       next == "!" || next == "~" || next == "new" ||
                       next == "this" || next == "true" || next == "false" ||
                       next == "null";
    if (!value_start) return false;
    bool saw_word = false;
    for (std::size_t i = open + 1; i < close; ++i) {
      const Token& t = toks_[i];
      std::string_view s = text_of(src_, t);
      if (t.kind == TokKind::Identifier || is_primitive(s)) { saw_word = true; continue; }
      if (s == "." || s == "[" || s == "]" || s == "<" || s == ">" || s == ">>" ||
          s == ">>>" || s == "," || s == "?" || s == "extends" || s == "super" ||
          s == "&")
        continue;
      return false;
    }
    // a parenthesized identifier followed by '(' is a call on a parenthesized
    // value only in weird code; prefer the cast reading like javac does for
    // primitives, and require generics/brackets/dots for reference types
    if (!saw_word) return false;
    // (x)(y) reads as a call on a parenthesized value, not a cast
    if (close == open + 2 && toks_[open + 1].kind == TokKind::Identifier)
      return next != "(";
    return true;
  }

  std::size_t prev_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].end; }

  std::size_t match_generic(std::size_t i) const {
    if (i >= toks_.size() || text_of(src_, toks_[i]) != "<") return npos;
    int depth = 0;
    for (std::size_t j = i; j < toks_.size(); ++j) {
      std::string_view t = text_of(src_, toks_[j]);
      if (t == "<") ++depth;
      else if (t == ">") { if (--depth == 0) return j + 1; }
      else if (t == ">>") { depth -= 2; if (depth <= 0) return j + 1; }
      else if (t == ">>>") { depth -= 3; if (depth <= 0) return j + 1; }
      else if (t == "[" || t == "]" || t == "," || t == "." || t == "?" ||
               t == "&" || t == "extends" || t == "super") {
      } else if (toks_[j].kind == TokKind::Identifier ||
                 (toks_[j].kind == TokKind::Keyword && is_primitive(t))) {
      } else {
        return npos;
      }
    }
    return npos;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Comparison> found_;
};

std::vector<Token> tokens_in(std::string_view src, Span within) {
  std::vector<Token> out;
  for (const Token& t : lex_code(src))
    if (t.begin >= within.begin && t.end <= within.end) out.push_back(t);
  return out;
}

}  // namespace

std::vector<Comparison> find_comparisons(std::string_view src, Span within) {
  if (within.empty()) return {};
  std::vector<Token> toks = tokens_in(src, within);
  ExprScanner scanner(src, toks);
  std::vector<Comparison> found = scanner.scan();
  for (auto& c : found) {
    c.op_text = std::string(src.substr(c.op.begin, c.op.end - c.op.begin));
    c.operands_pure = span_is_pure(src, c.lhs) && span_is_pure(src, c.rhs);
  }
  std::sort(found.begin(), found.end(),
            [](const Comparison& a, const Comparison& b) { return a.op.begin < b.op.begin; });
  return found;
}

bool span_is_pure(std::string_view src, Span within) {
  std::vector<Token> toks = tokens_in(src, within);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string_view t = text_of(src, toks[i]);
    if (t == "++" || t == "--" || t == "new" || t == "[") return false;
    if (t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" || t == "%=" ||
        t == "&=" || t == "|=" || t == "^=" || t == "<<=" || t == ">>=" || t == ">>>=")
      return false;
    if (t == "(" && i > 0 && toks[i - 1].kind == TokKind::Identifier) return false;
  }
  return true;
}

StmtFootprint footprint(std::string_view src, const Stmt& s) {
  StmtFootprint fp;
  std::vector<Token> toks = tokens_in(src, s.span);

  auto has_call = [&]() {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      std::string_view t = text_of(src, toks[i]);
      if (t == "(" && i > 0 && toks[i - 1].kind == TokKind::Identifier) return true;
      if (t == "new" && i + 1 < toks.size()) {
        // allocation with a constructor body or args counts as a call;
        // plain array creation does not
        for (std::size_t j = i + 1; j < toks.size(); ++j) {
          std::string_view u = text_of(src, toks[j]);
          if (u == "(") return true;
          if (u == "[") break;
          if (toks[j].kind != TokKind::Identifier && u != "." && u != "<" &&
              u != ">" && u != ",")
            break;
        }
      }
    }
    return false;
  };

  auto add = [](std::vector<std::string>& v, std::string_view n) {
    std::string s2(n);
    if (std::find(v.begin(), v.end(), s2) == v.end()) v.push_back(std::move(s2));
  };

  auto read_idents_in = [&](Span span) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.begin < span.begin || t.end > span.end) continue;
      if (t.kind != TokKind::Identifier) continue;
      if (i > 0 && text_of(src, toks[i - 1]) == ".") continue;      // field
      if (i + 1 < toks.size() && text_of(src, toks[i + 1]) == "(") continue;  // call
      add(fp.reads, text_of(src, t));
    }
  };

  if (s.kind == StmtKind::LocalDecl) {
    if (has_call()) return fp;
    for (const auto& d : s.declarators) {
      add(fp.writes, d.name);
      if (!d.init.empty()) read_idents_in(d.init);
    }
    // type-name identifiers never land in reads because decl_type is
    // outside declarator init spans
    fp.analyzable = true;
    return fp;
  }

  if (s.kind == StmtKind::ExprStmt) {
    if (has_call()) return fp;
    // supported shapes: `x = expr;`, `x += expr;`, `x++;`, `++x;`
    std::vector<Token> ts = tokens_in(src, s.expr);
    if (ts.empty()) return fp;
    auto text_at = [&](std::size_t i) { return text_of(src, ts[i]); };

    static const char* kCompound[] = {"+=", "-=", "*=", "/=", "%=",
                                      "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    // x++ / x-- / ++x / --x
    if (ts.size() == 2) {
      std::size_t id = ts[0].kind == TokKind::Identifier ? 0
                       : ts[1].kind == TokKind::Identifier ? 1
                                                           : static_cast<std::size_t>(-1);
      std::size_t op = id == 0 ? 1 : 0;
      if (id != static_cast<std::size_t>(-1) &&
          (text_at(op) == "++" || text_at(op) == "--")) {
        add(fp.writes, text_at(id));
        add(fp.reads, text_at(id));
        fp.analyzable = true;
        return fp;
      }
    }
    // simple or compound assignment to a bare identifier
    if (ts.size() >= 3 && ts[0].kind == TokKind::Identifier) {
      std::string_view op = text_at(1);
      bool compound = false;
      for (auto c : kCompound)
        if (op == c) compound = true;
      if (op == "=" || compound) {
        add(fp.writes, text_at(0));
        if (compound) add(fp.reads, text_at(0));
        Span rhs{ts[2].begin, ts.back().end};
        read_idents_in(rhs);
        // nested assignment or inc/dec inside the RHS: unsupported
        for (std::size_t i = 2; i < ts.size(); ++i) {
          std::string_view t = text_at(i);
          if (t == "=" || t == "++" || t == "--") return fp;
          for (auto c : kCompound)
            if (t == c) return fp;
        }
        fp.analyzable = true;
        return fp;
      }
    }
    return fp;
  }

  return fp;
}

}  // namespace cateval::java
