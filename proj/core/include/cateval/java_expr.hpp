#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cateval/java_tree.hpp"

namespace cateval::java {

/// One binary comparison located inside an expression.
struct Comparison {
  Span lhs;
  Span op;
  Span rhs;
  std::string op_text;       // one of < > <= >= == !=
  bool operands_pure = false;  // no calls, allocation, assignment, ++/--, indexing
};

/// Finds every relational/equality comparison inside the expression bytes
/// at `within`. A precedence parser drives the scan; expressions it cannot
/// parse confidently contribute no comparisons (conservative).
std::vector<Comparison> find_comparisons(std::string_view src, Span within);

/// Variable-level read/write footprint of a simple statement, for the
/// conservative independence check. `analyzable` is false whenever the
/// statement is outside the supported shape (method calls, field or array
/// writes, compound targets).
struct StmtFootprint {
  bool analyzable = false;
  std::vector<std::string> reads;
  std::vector<std::string> writes;
};

StmtFootprint footprint(std::string_view src, const Stmt& s);

/// True when the span contains no call, allocation (`new` with arguments),
/// assignment, or increment/decrement token pattern.
bool span_is_pure(std::string_view src, Span within);

}  // namespace cateval::java
