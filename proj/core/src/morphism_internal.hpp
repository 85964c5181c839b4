#pragma once

#include <string>
#include <vector>

#include "cateval/java_expr.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/morphism.hpp"

namespace cateval::morphism::detail {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Parsed view of one source text shared by enumeration and rewriting.
struct Context {
  std::string src;
  java::ParsedUnit unit;
  std::vector<java::Token> toks;          // comment-free
  std::vector<std::size_t> bracket_match;  // per token: matching ()[]{} index

  std::string_view text(std::size_t i) const {
    return java::text_of(src, toks[i]);
  }
  std::size_t token_starting_at(std::size_t byte_pos) const;
  /// Index of the first token with begin >= byte_pos.
  std::size_t token_at_or_after(std::size_t byte_pos) const;
};

Context make_context(std::string_view source);

struct Edit {
  std::size_t begin = 0;
  std::size_t end = 0;    // == begin for pure insertion
  std::string text;
  int prio = 0;  // at equal begin, higher prio ends up further left
};

std::string apply_edits(std::string_view src, std::vector<Edit> edits);

/// Variables declared in a method, params included; names declared more
/// than once are dropped entirely (rename or flip would merge scopes).
struct VariableTable {
  struct Var {
    std::string name;
    std::size_t decl_name_pos = 0;
    int decl_index = 0;  // 1-based across params then locals
    bool is_boolean_local = false;
    java::Span decl_init;       // boolean locals: initializer span
  };
  std::vector<Var> vars;
};

VariableTable variable_table(const Context& ctx, const java::MethodDecl& m);

/// All identifier tokens that are uses of the named variable inside the
/// method (declaration name token included), excluding field accesses,
/// method names, type positions, and labels.
std::vector<std::size_t> variable_use_tokens(const Context& ctx,
                                             const java::MethodDecl& m,
                                             const std::string& name);

/// Boolean-exchange classification for one boolean local.
struct BoolPlan {
  bool eligible = false;
  std::string why;                      // first ineligibility reason
  java::Span decl_init;                 // may be empty
  std::vector<java::Span> store_spans;  // assignment RHS spans to invert
  std::vector<std::size_t> read_tokens; // token indices to negate
};

BoolPlan boolean_plan(const Context& ctx, const java::MethodDecl& m,
                      const std::string& name);

/// Expression spans of a method body where comparisons are searched.
std::vector<java::Span> expression_spans(const java::MethodDecl& m);

/// Switch statements eligible for the if-chain rewrite.
struct SwitchPlan {
  bool eligible = false;
  const java::Stmt* stmt = nullptr;
  bool string_labels = false;
};

SwitchPlan switch_plan(const Context& ctx, const java::Stmt& sw);

bool span_contains_keyword(const Context& ctx, java::Span span, std::string_view kw);

std::vector<Site> find_sites(const Context& ctx, Kind kind, const Options& opts);

std::string rewrite_site(const Context& ctx, const Site& site, std::uint64_t seed,
                         const Options& opts);

}  // namespace cateval::morphism::detail
