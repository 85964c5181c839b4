#include <doctest.h>

#include <string>

#include "cateval/errors.hpp"
#include "cateval/java_tree.hpp"

using namespace cateval;
using namespace cateval::java;

namespace {

const char* kSample = R"JAVA(
import java.util.*;

public class Solution {
    public static int count(List<Integer> xs, int limit) {
        int total = 0;
        for (int i = 0; i < xs.size(); i++) {
            if (xs.get(i) > limit) {
                total += 1;
            } else {
                total -= 1;
            }
        }
        while (total < 0) {
            total++;
        }
        return total;
    }
}
)JAVA";

const Stmt* find_kind(const Stmt& root, StmtKind kind) {
  const Stmt* found = nullptr;
  walk(root, [&](const Stmt& s) {
    if (!found && s.kind == kind) found = &s;
  });
  return found;
}

}  // namespace

TEST_CASE("tree: unit structure, method and params") {
  ParsedUnit unit = parse_unit(kSample);
  CHECK(unit.primary_class == "Solution");
  REQUIRE(unit.methods.size() == 1);
  const MethodDecl& m = unit.methods[0];
  CHECK(m.name == "count");
  CHECK(m.return_type.find("int") != std::string::npos);
  REQUIRE(m.params.size() == 2);
  CHECK(m.params[0].name == "xs");
  CHECK(m.params[1].name == "limit");
  CHECK(m.body.kind == StmtKind::Block);
}

TEST_CASE("tree: statement kinds and condition spans") {
  std::string src = kSample;
  ParsedUnit unit = parse_unit(src);
  const MethodDecl& m = unit.methods[0];

  const Stmt* f = find_kind(m.body, StmtKind::BasicFor);
  REQUIRE(f != nullptr);
  CHECK(slice(src, f->for_init) == "int i = 0");
  CHECK(slice(src, f->cond) == "i < xs.size()");
  CHECK(slice(src, f->for_update) == "i++");

  const Stmt* iff = find_kind(m.body, StmtKind::If);
  REQUIRE(iff != nullptr);
  CHECK(iff->has_else);
  CHECK(slice(src, iff->cond) == "xs.get(i) > limit");
  CHECK(slice(src, iff->else_kw) == "else");

  const Stmt* wh = find_kind(m.body, StmtKind::While);
  REQUIRE(wh != nullptr);
  CHECK(slice(src, wh->cond) == "total < 0");

  const Stmt* decl = find_kind(m.body, StmtKind::LocalDecl);
  REQUIRE(decl != nullptr);
  REQUIRE(decl->declarators.size() == 1);
  CHECK(decl->declarators[0].name == "total");
  CHECK(slice(src, decl->declarators[0].init) == "0");
}

TEST_CASE("tree: declarations with generics keep commas inside the type") {
  std::string src =
      "class A { void f() { Map<String, Integer> m = new HashMap<String, Integer>(); "
      "int a = 1, b = 2; } }";
  ParsedUnit unit = parse_unit(src);
  const MethodDecl& m = unit.methods[0];
  REQUIRE(m.body.children.size() == 2);
  CHECK(m.body.children[0].kind == StmtKind::LocalDecl);
  CHECK(m.body.children[0].declarators.size() == 1);
  CHECK(m.body.children[0].declarators[0].name == "m");
  CHECK(m.body.children[1].declarators.size() == 2);
}

TEST_CASE("tree: a<b expression statement is not a declaration") {
  std::string src = "class A { boolean f(int a, int b) { boolean r; r = a < b; return r; } }";
  ParsedUnit unit = parse_unit(src);
  const MethodDecl& m = unit.methods[0];
  REQUIRE(m.body.children.size() == 3);
  CHECK(m.body.children[0].kind == StmtKind::LocalDecl);
  CHECK(m.body.children[1].kind == StmtKind::ExprStmt);
  CHECK(m.body.children[2].kind == StmtKind::Return);
}

TEST_CASE("tree: switch cases with labels, bodies and trailing breaks") {
  std::string src = R"(class A { int f(int x) {
    int r = 0;
    switch (x) {
      case 1: r = 10; break;
      case 2:
      case 3: r = 20; break;
      default: r = 30;
    }
    return r;
  } })";
  ParsedUnit unit = parse_unit(src);
  const Stmt* sw = find_kind(unit.methods[0].body, StmtKind::Switch);
  REQUIRE(sw != nullptr);
  CHECK(slice(src, sw->selector) == "x");
  REQUIRE(sw->cases.size() == 4);
  CHECK(slice(src, sw->cases[0].label) == "1");
  CHECK(sw->cases[0].ends_with_break);
  CHECK(sw->cases[1].stmt_count == 0);
  CHECK(slice(src, sw->cases[2].label) == "3");
  CHECK(sw->cases[2].ends_with_break);
  CHECK(sw->cases[3].is_default);
  CHECK(!sw->cases[3].ends_with_break);
  CHECK(sw->cases[3].stmt_count == 1);
}

TEST_CASE("tree: for-each, do-while, try-catch, labeled statements") {
  std::string src = R"(class A { int f(int[] xs) {
    int sum = 0;
    for (int x : xs) { sum += x; }
    do { sum--; } while (sum > 100);
    try { sum /= xs.length; } catch (ArithmeticException e) { sum = 0; } finally { sum++; }
    outer: while (true) { break outer; }
    return sum;
  } })";
  ParsedUnit unit = parse_unit(src);
  const MethodDecl& m = unit.methods[0];
  CHECK(find_kind(m.body, StmtKind::ForEach) != nullptr);
  CHECK(find_kind(m.body, StmtKind::DoWhile) != nullptr);
  const Stmt* tr = find_kind(m.body, StmtKind::Try);
  REQUIRE(tr != nullptr);
  REQUIRE(tr->aux_decl_names.size() == 1);
  CHECK(tr->aux_decl_names[0] == "e");
  const Stmt* lab = find_kind(m.body, StmtKind::Labeled);
  REQUIRE(lab != nullptr);
  CHECK(lab->label == "outer");
  auto names = declared_names(src, m);
  CHECK(std::count(names.begin(), names.end(), "x") == 1);
  CHECK(std::count(names.begin(), names.end(), "e") == 1);
  CHECK(std::count(names.begin(), names.end(), "sum") == 1);
}

TEST_CASE("tree: multiple methods are all collected") {
  std::string src = "class A { int f() { return 1; } int g() { return 2; } }";
  ParsedUnit unit = parse_unit(src);
  CHECK(unit.methods.size() == 2);
  CHECK(find_method(unit, "g") != nullptr);
  CHECK(find_method(unit, "h") == nullptr);
}

TEST_CASE("tree: constructors are flagged") {
  std::string src = "class A { A() { } int f() { return 1; } }";
  ParsedUnit unit = parse_unit(src);
  REQUIRE(unit.methods.size() == 2);
  CHECK(unit.methods[0].is_constructor);
  CHECK(!unit.methods[1].is_constructor);
}

TEST_CASE("tree: unbalanced braces fail to parse") {
  CHECK(!parses("class A { int f() { return 1; }"));
  CHECK(parses("class A { int f() { return 1; } }"));
}
