#include "cateval/java_tree.hpp"

#include <algorithm>

#include "cateval/errors.hpp"

namespace cateval::java {

namespace {

/// Cursor over a comment-free token stream.
class Cursor {
 public:
  Cursor(std::string_view src, const std::vector<Token>& toks) : src_(src), toks_(toks) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token& tok(std::size_t off = 0) const {
    static const Token kEnd{TokKind::Op, 0, 0};
    return pos_ + off < toks_.size() ? toks_[pos_ + off] : kEnd;
  }
  std::string_view text(std::size_t off = 0) const {
    return pos_ + off < toks_.size() ? text_of(src_, toks_[pos_ + off]) : std::string_view{};
  }
  bool at(std::string_view s, std::size_t off = 0) const { return text(off) == s; }
  bool at_ident(std::size_t off = 0) const { return tok(off).kind == TokKind::Identifier; }

  void advance() { ++pos_; }
  const Token& take() {
    if (done()) throw ParseError("unexpected end of input");
    return toks_[pos_++];
  }
  void expect(std::string_view s) {
    if (!at(s))
      throw ParseError("expected '" + std::string(s) + "' near byte " +
                       std::to_string(tok().begin));
    advance();
  }

  std::size_t index() const { return pos_; }
  void rewind(std::size_t idx) { pos_ = idx; }

  std::size_t byte_begin() const { return done() ? src_.size() : tok().begin; }

  /// Skips one balanced group starting at the current '(' '[' or '{'.
  void skip_balanced() {
    std::string_view open = text();
    std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    while (!done()) {
      if (at(open)) ++depth;
      else if (at(close)) {
        --depth;
        if (depth == 0) {
          advance();
          return;
        }
      }
      advance();
    }
    throw ParseError("unbalanced " + std::string(open));
  }

  /// Advances until one of `stops` at bracket depth 0; generics inside the
  /// scanned region are matched so their commas do not count as stops.
  /// Returns the stop text actually hit ("" at end of stream).
  std::string consume_until(const std::vector<std::string_view>& stops) {
    int depth = 0;
    while (!done()) {
      std::string_view t = text();
      if (depth == 0) {
        for (auto s : stops)
          if (t == s) return std::string(t);
      }
      if (t == "(" || t == "[" || t == "{") ++depth;
      else if (t == ")" || t == "]" || t == "}") {
        if (depth == 0) return "";  // caller's group closes
        --depth;
      } else if (t == "<" && depth >= 0) {
        std::size_t g = match_generic(pos_);
        if (g != npos) {
          pos_ = g;  // lands just past the closing '>'
          continue;
        }
      }
      advance();
    }
    return "";
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// If toks_[i] is '<' opening a plausible type-argument list, returns the
  /// index just past its matching close; npos when it reads as a comparison.
  std::size_t match_generic(std::size_t i) const {
    if (i >= toks_.size() || text_of(src_, toks_[i]) != "<") return npos;
    int depth = 0;
    std::size_t j = i;
    while (j < toks_.size()) {
      std::string_view t = text_of(src_, toks_[j]);
      if (t == "<") ++depth;
      else if (t == ">") { if (--depth == 0) return j + 1; }
      else if (t == ">>") { depth -= 2; if (depth <= 0) return j + 1; }
      else if (t == ">>>") { depth -= 3; if (depth <= 0) return j + 1; }
      else if (t == "[" || t == "]" || t == "," || t == "." || t == "?" ||
               t == "&" || t == "extends" || t == "super") {
        // type-argument vocabulary
      } else if (toks_[j].kind == TokKind::Identifier || toks_[j].kind == TokKind::Keyword) {
        if (!plausible_type_word(t)) return npos;
      } else {
        return npos;
      }
      ++j;
    }
    return npos;
  }

  static bool plausible_type_word(std::string_view t) {
    static const char* kPrims[] = {"int",  "long",   "short", "byte", "char",
                                   "float", "double", "boolean", "void",
                                   "extends", "super"};
    for (auto p : kPrims)
      if (t == p) return true;
    return !is_keyword(t);
  }

  std::string_view src_;
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

class UnitParser {
 public:
  explicit UnitParser(std::string_view src)
      : src_(src), toks_(lex_code(src)), cur_(src, toks_) {}

  ParsedUnit parse() {
    ParsedUnit unit;
    while (!cur_.done()) {
      if (cur_.at("package") || cur_.at("import")) {
        cur_.consume_until({";"});
        if (cur_.at(";")) cur_.advance();
        continue;
      }
      if (cur_.at("@")) {
        skip_annotation();
        continue;
      }
      if (is_type_decl_ahead()) {
        parse_type_decl(unit, true);
        continue;
      }
      cur_.advance();  // stray modifier or unknown top-level token
    }
    return unit;
  }

 private:
  static bool is_modifier(std::string_view t) {
    static const char* kMods[] = {"public", "private",   "protected", "static",
                                  "final",  "abstract",  "native",    "synchronized",
                                  "strictfp", "transient", "volatile", "default"};
    for (auto m : kMods)
      if (t == m) return true;
    return false;
  }

  bool is_type_decl_ahead() {
    std::size_t save = cur_.index();
    while (is_modifier(cur_.text())) cur_.advance();
    while (cur_.at("@")) skip_annotation();
    while (is_modifier(cur_.text())) cur_.advance();
    bool yes = cur_.at("class") || cur_.at("interface") || cur_.at("enum") ||
               (cur_.at("record") && cur_.at_ident(1));
    cur_.rewind(save);
    return yes;
  }

  void skip_annotation() {
    cur_.expect("@");
    if (cur_.at("interface")) {  // @interface declaration
      cur_.advance();
      cur_.advance();
      while (!cur_.done() && !cur_.at("{")) cur_.advance();
      if (cur_.at("{")) cur_.skip_balanced();
      return;
    }
    cur_.advance();  // annotation name
    while (cur_.at(".")) {
      cur_.advance();
      cur_.advance();
    }
    if (cur_.at("(")) cur_.skip_balanced();
  }

  void parse_type_decl(ParsedUnit& unit, bool top_level) {
    while (is_modifier(cur_.text())) cur_.advance();
    while (cur_.at("@")) skip_annotation();
    while (is_modifier(cur_.text())) cur_.advance();

    bool is_enum = cur_.at("enum");
    cur_.advance();  // class/interface/enum/record
    std::string name(cur_.text());
    cur_.advance();
    if (top_level && unit.primary_class.empty()) unit.primary_class = name;

    // generics, record header, extends/implements
    while (!cur_.done() && !cur_.at("{")) {
      if (cur_.at("(")) { cur_.skip_balanced(); continue; }
      std::size_t g = cur_.match_generic(cur_.index());
      if (cur_.at("<") && g != Cursor::npos) { cur_.rewind(g); continue; }
      cur_.advance();
    }
    cur_.expect("{");

    if (is_enum) skip_enum_constants();

    while (!cur_.done() && !cur_.at("}")) parse_member(unit, name);
    if (cur_.done()) throw ParseError("unterminated body of type " + name);
    cur_.advance();  // '}'
  }

  void skip_enum_constants() {
    // constants run to ';' or the closing '}' of the enum body
    int depth = 0;
    while (!cur_.done()) {
      if (depth == 0 && (cur_.at(";") || cur_.at("}"))) {
        if (cur_.at(";")) cur_.advance();
        return;
      }
      if (cur_.at("(") || cur_.at("{") || cur_.at("[")) ++depth;
      else if (cur_.at(")") || cur_.at("]")) --depth;
      else if (cur_.at("}")) { if (depth == 0) return; --depth; }
      cur_.advance();
    }
  }

  void parse_member(ParsedUnit& unit, const std::string& class_name) {
    std::size_t member_begin = cur_.byte_begin();

    if (cur_.at(";")) { cur_.advance(); return; }
    if (cur_.at("{")) { cur_.skip_balanced(); return; }  // instance initializer
    if (cur_.at("static") && cur_.at("{", 1)) {
      cur_.advance();
      cur_.skip_balanced();
      return;
    }
    if (is_type_decl_ahead()) {
      parse_type_decl(unit, false);
      return;
    }

    while (is_modifier(cur_.text())) cur_.advance();
    while (cur_.at("@")) skip_annotation();
    while (is_modifier(cur_.text())) cur_.advance();
    if (cur_.at("<")) {  // generic method type params
      std::size_t g = cur_.match_generic(cur_.index());
      if (g != Cursor::npos) cur_.rewind(g);
      else cur_.advance();
    }

    // Scan ahead for the first of '(' '=' ';' at depth 0 to classify.
    std::size_t save = cur_.index();
    std::string hit = cur_.consume_until({"(", "=", ";"});
    if (hit != "(") {
      // field: consume through ';' (array initializers balanced already)
      if (hit == "=") cur_.consume_until({";"});
      if (cur_.at(";")) cur_.advance();
      return;
    }

    // Method or constructor. Name is the token right before '('.
    std::size_t paren_idx = cur_.index();
    cur_.rewind(save);
    std::size_t name_idx = paren_idx == 0 ? 0 : paren_idx - 1;
    MethodDecl m;
    m.name = std::string(text_of(src_, toks_[name_idx]));
    m.name_pos = toks_[name_idx].begin;
    m.is_constructor = (m.name == class_name);
    if (!m.is_constructor) {
      // return type text: tokens from current position through name-1
      std::size_t rt_begin = cur_.index();
      std::string rt;
      for (std::size_t k = rt_begin; k + 1 <= name_idx && k < name_idx; ++k) {
        if (!rt.empty()) rt += " ";
        rt += std::string(text_of(src_, toks_[k]));
      }
      m.return_type = rt;
    }
    cur_.rewind(paren_idx);
    parse_params(m);
    m.header = Span{member_begin, cur_.byte_begin()};

    // throws clause
    if (cur_.at("throws")) cur_.consume_until({"{", ";"});
    if (cur_.at(";")) {  // abstract or interface method
      cur_.advance();
      return;
    }
    if (!cur_.at("{"))
      throw ParseError("expected method body near byte " + std::to_string(cur_.byte_begin()));
    m.header.end = cur_.byte_begin();
    m.body = parse_block();
    unit.methods.push_back(std::move(m));
  }

  void parse_params(MethodDecl& m) {
    cur_.expect("(");
    if (cur_.at(")")) { cur_.advance(); return; }
    while (!cur_.done()) {
      // one parameter: tokens until ',' or ')' at depth 0; name = last identifier
      std::size_t last_ident = Cursor::npos;
      int depth = 0;
      while (!cur_.done()) {
        if (depth == 0 && (cur_.at(",") || cur_.at(")"))) break;
        if (cur_.at("(") || cur_.at("[")) ++depth;
        else if (cur_.at(")") || cur_.at("]")) --depth;
        else if (cur_.at("<")) {
          std::size_t g = cur_.match_generic(cur_.index());
          if (g != Cursor::npos) { cur_.rewind(g); continue; }
        }
        if (cur_.at_ident()) last_ident = cur_.index();
        cur_.advance();
      }
      if (last_ident != Cursor::npos) {
        Param p;
        p.name = std::string(text_of(src_, toks_[last_ident]));
        p.name_pos = toks_[last_ident].begin;
        m.params.push_back(std::move(p));
      }
      if (cur_.at(",")) { cur_.advance(); continue; }
      break;
    }
    cur_.expect(")");
  }

  Stmt parse_block() {
    Stmt s;
    s.kind = StmtKind::Block;
    s.span.begin = cur_.byte_begin();
    cur_.expect("{");
    s.block_open = cur_.byte_begin() == 0 ? 0 : toks_[cur_.index() - 1].end;
    while (!cur_.done() && !cur_.at("}")) s.children.push_back(parse_statement());
    if (cur_.done()) throw ParseError("unterminated block");
    s.span.end = cur_.tok().end;
    cur_.advance();
    return s;
  }

  Span parse_paren_span() {
    cur_.expect("(");
    Span inner;
    inner.begin = cur_.byte_begin();
    int depth = 1;
    std::size_t last_end = inner.begin;
    while (!cur_.done()) {
      if (cur_.at("(")) ++depth;
      else if (cur_.at(")")) {
        --depth;
        if (depth == 0) {
          inner.end = last_end;
          cur_.advance();
          return inner;
        }
      }
      last_end = cur_.tok().end;
      cur_.advance();
    }
    throw ParseError("unbalanced parenthesis");
  }

  Stmt parse_statement() {
    std::size_t begin = cur_.byte_begin();

    if (cur_.at("{")) return parse_block();
    if (cur_.at(";")) {
      Stmt s;
      s.kind = StmtKind::Empty;
      s.span = {begin, cur_.tok().end};
      cur_.advance();
      return s;
    }

    if (cur_.at("if")) return parse_if(begin);
    if (cur_.at("while")) return parse_while(begin);
    if (cur_.at("do")) return parse_do(begin);
    if (cur_.at("for")) return parse_for(begin);
    if (cur_.at("switch")) return parse_switch(begin);
    if (cur_.at("try")) return parse_try(begin);
    if (cur_.at("synchronized") && cur_.at("(", 1)) {
      Stmt s;
      s.kind = StmtKind::Synchronized;
      cur_.advance();
      s.expr = parse_paren_span();
      s.children.push_back(parse_statement());
      s.span = {begin, s.children.back().span.end};
      return s;
    }
    if (cur_.at("return") || cur_.at("throw")) {
      Stmt s;
      s.kind = cur_.at("return") ? StmtKind::Return : StmtKind::Throw;
      cur_.advance();
      s.expr.begin = cur_.byte_begin();
      cur_.consume_until({";"});
      s.expr.end = cur_.byte_begin();
      if (s.expr.end > s.expr.begin && !cur_.done()) {
        std::size_t prev = cur_.index() == 0 ? 0 : cur_.index() - 1;
        s.expr.end = toks_[prev].end;
      }
      if (s.expr.begin >= s.expr.end) s.expr = {};
      s.span = {begin, cur_.done() ? s.expr.end : cur_.tok().end};
      if (cur_.at(";")) cur_.advance();
      return s;
    }
    if (cur_.at("break") || cur_.at("continue")) {
      Stmt s;
      s.kind = cur_.at("break") ? StmtKind::Break : StmtKind::Continue;
      cur_.advance();
      if (cur_.at_ident()) {
        s.label = std::string(cur_.text());
        cur_.advance();
      }
      s.span = {begin, cur_.at(";") ? cur_.tok().end : begin};
      if (cur_.at(";")) cur_.advance();
      return s;
    }
    if (cur_.at_ident() && cur_.at(":", 1)) {
      Stmt s;
      s.kind = StmtKind::Labeled;
      s.label = std::string(cur_.text());
      cur_.advance();
      cur_.advance();
      s.children.push_back(parse_statement());
      s.span = {begin, s.children.back().span.end};
      return s;
    }
    if (cur_.at("assert") || is_type_decl_start()) {
      // assert statements and local class declarations: consume structurally
      Stmt s;
      s.kind = StmtKind::Other;
      cur_.consume_until({";", "{"});
      if (cur_.at("{")) cur_.skip_balanced();
      if (cur_.at(";")) cur_.advance();
      std::size_t prev = cur_.index() == 0 ? 0 : cur_.index() - 1;
      s.span = {begin, toks_[prev].end};
      return s;
    }

    return parse_decl_or_expr(begin);
  }

  bool is_type_decl_start() {
    return cur_.at("class") || cur_.at("interface") || cur_.at("enum") ||
           (cur_.at("final") && cur_.at("class", 1));
  }

  Stmt parse_if(std::size_t begin) {
    Stmt s;
    s.kind = StmtKind::If;
    cur_.expect("if");
    s.cond = parse_paren_span();
    s.children.push_back(parse_statement());
    s.span = {begin, s.children.back().span.end};
    if (cur_.at("else")) {
      s.has_else = true;
      s.else_kw = {cur_.tok().begin, cur_.tok().end};
      cur_.advance();
      s.children.push_back(parse_statement());
      s.span.end = s.children.back().span.end;
    }
    return s;
  }

  Stmt parse_while(std::size_t begin) {
    Stmt s;
    s.kind = StmtKind::While;
    cur_.expect("while");
    s.cond = parse_paren_span();
    s.children.push_back(parse_statement());
    s.span = {begin, s.children.back().span.end};
    return s;
  }

  Stmt parse_do(std::size_t begin) {
    Stmt s;
    s.kind = StmtKind::DoWhile;
    cur_.expect("do");
    s.children.push_back(parse_statement());
    cur_.expect("while");
    s.cond = parse_paren_span();
    s.span = {begin, cur_.at(";") ? cur_.tok().end : s.cond.end + 1};
    if (cur_.at(";")) cur_.advance();
    return s;
  }

  Stmt parse_for(std::size_t begin) {
    Stmt s;
    cur_.expect("for");
    cur_.expect("(");

    // Split header at depth 0 into basic-for or for-each.
    std::size_t header_start = cur_.index();
    int depth = 1;
    std::vector<std::size_t> semis;  // token indices
    std::size_t colon = Cursor::npos;
    std::size_t close = Cursor::npos;
    for (std::size_t i = header_start; i < toks_.size(); ++i) {
      std::string_view t = text_of(src_, toks_[i]);
      if (t == "(") ++depth;
      else if (t == ")") {
        if (--depth == 0) { close = i; break; }
      } else if (depth == 1 && t == ";") semis.push_back(i);
      else if (depth == 1 && t == ":" && colon == Cursor::npos && semis.empty()) {
        // exclude ternary ':' — a '?' would have appeared first
        bool ternary = false;
        for (std::size_t k = header_start; k < i; ++k)
          if (text_of(src_, toks_[k]) == "?") ternary = true;
        if (!ternary) colon = i;
      }
    }
    if (close == Cursor::npos) throw ParseError("unbalanced for header");

    auto span_between = [&](std::size_t from_tok, std::size_t to_tok) -> Span {
      if (from_tok >= to_tok) return {};
      return {toks_[from_tok].begin, toks_[to_tok - 1].end};
    };

    if (semis.size() >= 2) {
      s.kind = StmtKind::BasicFor;
      s.for_init = span_between(header_start, semis[0]);
      s.cond = span_between(semis[0] + 1, semis[1]);
      s.for_update = span_between(semis[1] + 1, close);
    } else if (colon != Cursor::npos) {
      s.kind = StmtKind::ForEach;
      s.foreach_var = span_between(header_start, colon);
      s.foreach_iter = span_between(colon + 1, close);
    } else {
      s.kind = StmtKind::Other;
    }
    cur_.rewind(close + 1);
    s.children.push_back(parse_statement());
    s.span = {begin, s.children.back().span.end};
    return s;
  }

  Stmt parse_switch(std::size_t begin) {
    Stmt s;
    s.kind = StmtKind::Switch;
    cur_.expect("switch");
    s.selector = parse_paren_span();
    cur_.expect("{");

    while (!cur_.done() && !cur_.at("}")) {
      if (cur_.at("case") || cur_.at("default")) {
        SwitchCase group;
        group.is_default = cur_.at("default");
        cur_.advance();
        if (!group.is_default) {
          group.label.begin = cur_.byte_begin();
          std::string hit = cur_.consume_until({":", "->"});
          std::size_t prev = cur_.index() == 0 ? 0 : cur_.index() - 1;
          group.label.end = toks_[prev].end;
          group.arrow_form = (hit == "->");
        } else {
          if (!cur_.at(":") && !cur_.at("->")) cur_.consume_until({":", "->"});
          group.arrow_form = cur_.at("->");
        }
        if (cur_.at(":") || cur_.at("->")) cur_.advance();

        if (group.arrow_form) {
          // arrow body: expression or block; consume and mark.
          if (cur_.at("{")) cur_.skip_balanced();
          else {
            cur_.consume_until({";"});
            if (cur_.at(";")) cur_.advance();
          }
          s.cases.push_back(std::move(group));
          continue;
        }

        group.body.begin = cur_.byte_begin();
        std::vector<Stmt> body;
        while (!cur_.done() && !cur_.at("case") && !cur_.at("default") && !cur_.at("}"))
          body.push_back(parse_statement());
        group.stmt_count = body.size();
        if (!body.empty()) {
          group.body.end = body.back().span.end;
          const Stmt& last = body.back();
          group.ends_with_break = (last.kind == StmtKind::Break && last.label.empty());
          group.terminal = group.ends_with_break || last.kind == StmtKind::Return ||
                           last.kind == StmtKind::Throw;
          if (group.ends_with_break) group.trailing_break = last.span;
          for (std::size_t i = 0; i + 1 < body.size(); ++i)
            if (contains_break(body[i])) group.has_inner_break = true;
          if (!group.ends_with_break && !body.empty() && contains_break(body.back()))
            group.has_inner_break = true;
        } else {
          group.body.end = group.body.begin;
        }
        s.cases.push_back(std::move(group));
        continue;
      }
      // stray statement outside any case (malformed but tolerated)
      parse_statement();
    }
    if (cur_.done()) throw ParseError("unterminated switch");
    s.span = {begin, cur_.tok().end};
    cur_.advance();
    return s;
  }

  static bool contains_break(const Stmt& s) {
    if (s.kind == StmtKind::Break) return true;
    // do not descend into nested loops/switches: their breaks bind inward
    if (s.kind == StmtKind::While || s.kind == StmtKind::DoWhile ||
        s.kind == StmtKind::BasicFor || s.kind == StmtKind::ForEach ||
        s.kind == StmtKind::Switch)
      return false;
    for (const Stmt& c : s.children)
      if (contains_break(c)) return true;
    return false;
  }

  Stmt parse_try(std::size_t begin) {
    Stmt s;
    s.kind = StmtKind::Try;
    cur_.expect("try");
    if (cur_.at("(")) {
      // try-with-resources: record declared names
      std::size_t start = cur_.index();
      cur_.skip_balanced();
      for (std::size_t i = start; i < cur_.index(); ++i)
        if (text_of(src_, toks_[i]) == "=" && i > 0 &&
            toks_[i - 1].kind == TokKind::Identifier)
          s.aux_decl_names.emplace_back(text_of(src_, toks_[i - 1]));
    }
    s.children.push_back(parse_block());
    while (cur_.at("catch")) {
      cur_.advance();
      cur_.expect("(");
      std::size_t last_ident = Cursor::npos;
      int depth = 1;
      while (!cur_.done() && depth > 0) {
        if (cur_.at("(")) ++depth;
        else if (cur_.at(")")) { if (--depth == 0) break; }
        if (cur_.at_ident()) last_ident = cur_.index();
        cur_.advance();
      }
      if (last_ident != Cursor::npos)
        s.aux_decl_names.emplace_back(text_of(src_, toks_[last_ident]));
      cur_.expect(")");
      s.children.push_back(parse_block());
    }
    if (cur_.at("finally")) {
      cur_.advance();
      s.children.push_back(parse_block());
    }
    s.span = {begin, s.children.back().span.end};
    return s;
  }

  /// Local variable declaration vs. expression statement.
  Stmt parse_decl_or_expr(std::size_t begin) {
    std::size_t save = cur_.index();
    Stmt decl = try_parse_decl(begin);
    if (decl.kind == StmtKind::LocalDecl) return decl;
    cur_.rewind(save);

    Stmt s;
    s.kind = StmtKind::ExprStmt;
    s.expr.begin = cur_.byte_begin();
    cur_.consume_until({";"});
    std::size_t prev = cur_.index() == 0 ? 0 : cur_.index() - 1;
    s.expr.end = cur_.index() > save ? toks_[prev].end : s.expr.begin;
    s.span = {begin, cur_.at(";") ? cur_.tok().end : s.expr.end};
    if (cur_.at(";")) cur_.advance();
    else if (cur_.done())
      throw ParseError("statement missing ';' near byte " + std::to_string(begin));
    return s;
  }

  bool parse_type_tokens() {
    // [final] (primitive | qualified ident with generics) ('[' ']')*
    if (cur_.at("final")) cur_.advance();
    while (cur_.at("@")) skip_annotation();
    static const char* kPrims[] = {"int",   "long",   "short",  "byte",
                                   "char",  "float",  "double", "boolean"};
    bool prim = false;
    for (auto p : kPrims)
      if (cur_.at(p)) prim = true;
    if (prim) {
      cur_.advance();
    } else if (cur_.at_ident()) {
      cur_.advance();
      while (true) {
        if (cur_.at("<")) {
          std::size_t g = cur_.match_generic(cur_.index());
          if (g == Cursor::npos) return true;  // comparison, not generics
          cur_.rewind(g);
        }
        if (cur_.at(".") && cur_.at_ident(1)) {
          cur_.advance();
          cur_.advance();
          continue;
        }
        break;
      }
    } else {
      return false;
    }
    while (cur_.at("[") && cur_.at("]", 1)) {
      cur_.advance();
      cur_.advance();
    }
    return true;
  }

  Stmt try_parse_decl(std::size_t begin) {
    Stmt s;
    std::size_t type_begin = cur_.byte_begin();
    if (!parse_type_tokens()) return s;
    if (!cur_.at_ident()) return s;
    std::size_t type_end = toks_[cur_.index() - 1].end;
    std::string_view follow = cur_.text(1);
    if (!(follow == "=" || follow == "," || follow == ";" || follow == "["))
      return s;

    s.kind = StmtKind::LocalDecl;
    s.decl_type = {type_begin, type_end};
    while (true) {
      if (!cur_.at_ident()) { s.kind = StmtKind::Other; return s; }
      Declarator d;
      d.name = std::string(cur_.text());
      d.name_pos = cur_.tok().begin;
      cur_.advance();
      while (cur_.at("[") && cur_.at("]", 1)) {  // trailing array dims
        cur_.advance();
        cur_.advance();
      }
      if (cur_.at("=")) {
        cur_.advance();
        d.init.begin = cur_.byte_begin();
        cur_.consume_until({",", ";"});
        std::size_t prev = cur_.index() == 0 ? 0 : cur_.index() - 1;
        d.init.end = toks_[prev].end;
      }
      s.declarators.push_back(std::move(d));
      if (cur_.at(",")) { cur_.advance(); continue; }
      break;
    }
    if (!cur_.at(";")) { s.kind = StmtKind::Other; return s; }
    s.span = {begin, cur_.tok().end};
    cur_.advance();
    return s;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  Cursor cur_;
};

void collect_lambda_params(std::string_view src, const std::vector<Token>& toks,
                           Span within, std::vector<std::string>& out) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].begin < within.begin || toks[i].end > within.end) continue;
    if (text_of(src, toks[i]) != "->") continue;
    if (i == 0) continue;
    const Token& prev = toks[i - 1];
    if (prev.kind == TokKind::Identifier) {
      out.emplace_back(text_of(src, prev));
    } else if (text_of(src, prev) == ")") {
      // walk back to matching '(' collecting simple identifiers
      int depth = 0;
      for (std::size_t j = i - 1; j < toks.size(); --j) {
        std::string_view t = text_of(src, toks[j]);
        if (t == ")") ++depth;
        else if (t == "(") {
          if (--depth == 0) break;
        } else if (depth == 1 && toks[j].kind == TokKind::Identifier &&
                   (j + 1 < toks.size()) &&
                   (text_of(src, toks[j + 1]) == "," || text_of(src, toks[j + 1]) == ")")) {
          out.emplace_back(text_of(src, toks[j]));
        }
        if (j == 0) break;
      }
    }
  }
}

}  // namespace

ParsedUnit parse_unit(std::string_view src) {
  UnitParser p(src);
  return p.parse();
}

bool parses(std::string_view src) {
  try {
    parse_unit(src);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

const MethodDecl* find_method(const ParsedUnit& unit, std::string_view name) {
  for (const auto& m : unit.methods)
    if (m.name == name) return &m;
  return nullptr;
}

void walk(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
  fn(s);
  for (const Stmt& c : s.children) walk(c, fn);
}

std::vector<std::string> declared_names(std::string_view src, const MethodDecl& m) {
  std::vector<std::string> names;
  for (const auto& p : m.params) names.push_back(p.name);

  walk(m.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::LocalDecl) {
      for (const auto& d : s.declarators) names.push_back(d.name);
    } else if (s.kind == StmtKind::BasicFor && !s.for_init.empty()) {
      // re-parse the init as a declaration when it starts with a type
      std::string init_src = std::string(slice(src, s.for_init)) + ";";
      try {
        ParsedUnit u = parse_unit("class X { void f() { " + init_src + " } }");
        if (!u.methods.empty())
          for (const Stmt& c : u.methods[0].body.children)
            if (c.kind == StmtKind::LocalDecl)
              for (const auto& d : c.declarators) names.push_back(d.name);
      } catch (const ParseError&) {
      }
    } else if (s.kind == StmtKind::ForEach && !s.foreach_var.empty()) {
      std::vector<Token> toks = lex_code(slice(src, s.foreach_var));
      for (std::size_t i = toks.size(); i > 0; --i) {
        if (toks[i - 1].kind == TokKind::Identifier) {
          names.emplace_back(text_of(slice(src, s.foreach_var), toks[i - 1]));
          break;
        }
      }
    }
    for (const auto& n : s.aux_decl_names) names.push_back(n);
  });

  std::vector<Token> toks = lex_code(src);
  collect_lambda_params(src, toks, m.body.span, names);
  return names;
}

}  // namespace cateval::java
