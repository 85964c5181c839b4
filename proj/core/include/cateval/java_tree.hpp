#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cateval/java_lexer.hpp"

namespace cateval::java {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin >= end; }
  std::size_t size() const { return end > begin ? end - begin : 0; }
};

inline std::string_view slice(std::string_view src, Span s) {
  return src.substr(s.begin, s.size());
}

enum class StmtKind {
  Block,
  If,
  While,
  DoWhile,
  BasicFor,
  ForEach,
  Switch,
  LocalDecl,
  ExprStmt,
  Return,
  Break,
  Continue,
  Throw,
  Try,
  Labeled,
  Synchronized,
  Empty,
  Other,  // nested type declarations, asserts, anything unmodeled
};

struct Declarator {
  std::string name;
  std::size_t name_pos = 0;
  Span init;  // empty when absent
};

/// One `case`/`default` group of a classic switch.
struct SwitchCase {
  bool is_default = false;
  Span label;           // label expression span (empty for default)
  Span body;            // byte span of the group's statements
  std::size_t stmt_count = 0;
  bool ends_with_break = false;   // last statement is exactly `break;`
  bool terminal = false;          // last statement is return/throw/break
  Span trailing_break;            // span of the trailing break, if any
  bool has_inner_break = false;   // a `break` besides the trailing one
  bool arrow_form = false;
};

struct Stmt {
  StmtKind kind = StmtKind::Other;
  Span span;                    // whole statement incl. terminator
  std::vector<Stmt> children;   // Block: stmts; If: then[,else]; loops: body; ...

  Span cond;                    // If/While/DoWhile/BasicFor
  Span for_init, for_update;    // BasicFor
  Span foreach_var;             // ForEach: declaration left of ':'
  Span foreach_iter;
  Span selector;                // Switch
  std::vector<SwitchCase> cases;

  bool has_else = false;
  Span else_kw;                 // the `else` keyword bytes

  Span decl_type;               // LocalDecl
  std::vector<Declarator> declarators;

  Span expr;                    // ExprStmt / Return / Throw value

  std::string label;            // Labeled / Break / Continue target
  std::size_t block_open = 0;   // Block: byte pos just after '{'

  std::vector<std::string> aux_decl_names;  // catch params, try resources
};

struct Param {
  std::string name;
  std::string type_text;
  std::size_t name_pos = 0;
};

struct MethodDecl {
  std::string name;
  std::size_t name_pos = 0;
  std::vector<Param> params;
  std::string return_type;  // "" for constructors
  Span header;              // modifiers through parameter list / throws
  Stmt body;                // StmtKind::Block
  bool is_constructor = false;
};

/// Shallow model of one compilation unit: enough structure to locate and
/// rewrite the single function the corpus guarantees, while leaving all
/// unmodeled bytes untouched.
struct ParsedUnit {
  std::vector<MethodDecl> methods;   // source order, all nesting levels
  std::string primary_class;         // first top-level type name, may be ""
};

/// Throws ParseError when the token stream has unbalanced braces or a
/// construct cannot be bounded. Tolerates unknown constructs as Other.
ParsedUnit parse_unit(std::string_view src);

/// True when the source lexes and parses and every brace balances.
bool parses(std::string_view src);

const MethodDecl* find_method(const ParsedUnit& unit, std::string_view name);

/// Every variable-like name declared inside the method: parameters, local
/// declarations (incl. for-init and for-each), catch params, and simple
/// lambda parameters. Order of first declaration; duplicates kept.
std::vector<std::string> declared_names(std::string_view src, const MethodDecl& m);

/// Walks every statement in the method body (depth-first, source order).
void walk(const Stmt& s, const std::function<void(const Stmt&)>& fn);

}  // namespace cateval::java
