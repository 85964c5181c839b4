#include <doctest.h>

#include <algorithm>
#include <string>

#include "cateval/corpus.hpp"
#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "cateval/java_lexer.hpp"
#include "cateval/morphism.hpp"

using namespace cateval;
using namespace cateval::morphism;

namespace {

const char* kLoopFn = R"JAVA(class Solution {
    public static int countBelow(int[] xs, int n) {
        int total = 0;
        for (int i = 0; i < n; i++) {
            total = total + xs[i];
        }
        return total;
    }
}
)JAVA";

const char* kThreeVarFn = R"JAVA(class Solution {
    public static int blend(int a, int b) {
        int mid = a + b;
        return mid * 2;
    }
}
)JAVA";

std::vector<Site> sites(const std::string& src, Kind kind) {
  return enumerate_sites(src, "java", kind);
}

std::string apply_one(const std::string& src, Kind kind, std::size_t which = 0,
                      std::uint64_t seed = 7) {
  auto found = sites(src, kind);
  REQUIRE(found.size() > which);
  auto [text, applied] = apply(src, found[which], seed);
  return text;
}

/// Independent count of declared variables: parameter names plus
/// identifiers introduced by `<type> name =` / `<type> name ;` patterns,
/// walked straight over the token stream without the CST.
int independent_var_count(const std::string& src) {
  auto toks = java::lex_code(src);
  // params: identifiers directly before ',' or ')' within the first (...)
  int count = 0;
  std::size_t i = 0;
  while (i < toks.size() && java::text_of(src, toks[i]) != "(") ++i;
  int depth = 0;
  std::size_t params_end = i;
  for (; params_end < toks.size(); ++params_end) {
    auto t = java::text_of(src, toks[params_end]);
    if (t == "(") ++depth;
    if (t == ")" && --depth == 0) break;
  }
  // params: identifiers followed by ',' or the closing ')'
  for (std::size_t j = i + 1; j < params_end; ++j) {
    if (toks[j].kind != java::TokKind::Identifier) continue;
    auto next = java::text_of(src, toks[j + 1]);
    if (next == "," || j + 1 == params_end) ++count;
  }
  // locals: identifier preceded by a type word and followed by '=' (declared
  // with initializer), inside the body
  for (std::size_t j = params_end; j + 1 < toks.size(); ++j) {
    if (toks[j].kind != java::TokKind::Identifier) continue;
    auto next = java::text_of(src, toks[j + 1]);
    if (next != "=") continue;
    auto prev = toks[j - 1];
    auto prev_text = java::text_of(src, prev);
    bool type_like = prev.kind == java::TokKind::Keyword &&
                     (prev_text == "int" || prev_text == "long" || prev_text == "double" ||
                      prev_text == "boolean" || prev_text == "char");
    if (type_like) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("morphism: kind catalog equivalence classes") {
  CHECK(equivalence_of(Kind::Identity) == Equivalence::self);
  for (Kind k : self_kinds()) CHECK(equivalence_of(k) == Equivalence::self);
  CHECK(equivalence_of(Kind::ModifyCondition) == Equivalence::nonequivalent);
  CHECK(equivalence_of(Kind::RemoveElse) == Equivalence::nonequivalent);
  CHECK(self_kinds().size() == 7);
  CHECK(kind_from_string("VR") == Kind::VariableRenaming);
  CHECK(kind_from_string("ReorderCondition") == Kind::ReorderCondition);
  CHECK(!kind_from_string("bogus").has_value());
}

TEST_CASE("morphism: ReorderCondition finds the i<n comparison") {
  auto found = sites(kLoopFn, Kind::ReorderCondition);
  REQUIRE(found.size() == 1);
  CHECK(found[0].descriptor.find("cmp@") == 0);

  auto [text, applied] = apply(kLoopFn, found[0], 1);
  CHECK(text.find("n > i") != std::string::npos);
  CHECK(text.find("i < n") == std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: ModifyCondition rewrites i<n to i<=n") {
  std::string text = apply_one(kLoopFn, Kind::ModifyCondition);
  CHECK(text.find("i <= n") != std::string::npos);
}

TEST_CASE("morphism: SwitchToIf on switch-free source has no sites") {
  CHECK(sites(kLoopFn, Kind::SwitchToIf).empty());
}

TEST_CASE("morphism: VariableRenaming site count matches independent count") {
  auto found = sites(kThreeVarFn, Kind::VariableRenaming);
  CHECK(static_cast<int>(found.size()) == independent_var_count(kThreeVarFn));
  CHECK(found.size() == 3);
}

TEST_CASE("morphism: VariableRenaming rewrites all uses and keeps calls alone") {
  std::string src = R"JAVA(class Solution {
    public static int twice(int value) {
        int result = value + value;
        helper(result);
        return result;
    }
    static void helper(int result) { }
}
)JAVA";
  auto found = sites(src, Kind::VariableRenaming);
  // `result` is declared in both methods; renaming is method-scoped, so each
  // declaration is its own site with a distinct descriptor
  int result_sites = 0;
  for (const auto& s : found)
    if (s.descriptor.find("var:result") == 0) ++result_sites;
  CHECK(result_sites == 2);

  // rename `value`
  const Site* value_site = nullptr;
  for (const auto& s : found)
    if (s.descriptor.find("var:value") == 0) value_site = &s;
  REQUIRE(value_site != nullptr);
  auto [text, applied] = apply(src, *value_site, 3);
  CHECK(text.find("int var_1") != std::string::npos);
  CHECK(text.find("var_1 + var_1") != std::string::npos);
  CHECK(text.find("value") == std::string::npos);
  CHECK(text.find("helper(") != std::string::npos);

  // renaming the first method's `result` leaves the helper's parameter alone
  const Site* result_site = nullptr;
  for (const auto& s : found)
    if (s.descriptor.find("var:result") == 0 && (!result_site || s.node_span.begin <
                                                      result_site->node_span.begin))
      result_site = &s;
  REQUIRE(result_site != nullptr);
  auto [text2, applied2] = apply(src, *result_site, 3);
  CHECK(text2.find("static void helper(int result)") != std::string::npos);
  CHECK(text2.find("helper(var_") != std::string::npos);
}

TEST_CASE("morphism: Identity returns byte-identical source") {
  auto found = sites(kLoopFn, Kind::Identity);
  REQUIRE(found.size() == 1);
  auto [text, applied] = apply(kLoopFn, found[0], 99);
  CHECK(text == kLoopFn);
  CHECK(applied.before == applied.after);
}

TEST_CASE("morphism: LoopExchange for->while hoists init and appends update") {
  std::string text = apply_one(kLoopFn, Kind::LoopExchange);
  CHECK(text.find("while (i < n)") != std::string::npos);
  CHECK(text.find("int i = 0;") != std::string::npos);
  CHECK(text.find("i++;") != std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: LoopExchange while->for keeps body bytes") {
  std::string src = R"JAVA(class Solution {
    static int drain(int n) {
        while (n > 0) { n--; }
        return n;
    }
}
)JAVA";
  std::string text = apply_one(src, Kind::LoopExchange);
  CHECK(text.find("for (; n > 0; )") != std::string::npos);
  CHECK(text.find("{ n--; }") != std::string::npos);
}

TEST_CASE("morphism: LoopExchange skips for loops containing continue") {
  std::string src = R"JAVA(class Solution {
    static int f(int n) {
        int s = 0;
        for (int i = 0; i < n; i++) { if (i == 2) continue; s += i; }
        return s;
    }
}
)JAVA";
  CHECK(sites(src, Kind::LoopExchange).empty());
}

TEST_CASE("morphism: BooleanExchange flips stores and negates reads") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        boolean go = true;
        while (go) {
            x++;
            if (x > 5) go = false;
        }
        return x;
    }
}
)JAVA";
  auto found = sites(src, Kind::BooleanExchange);
  REQUIRE(found.size() == 1);
  auto [text, applied] = apply(src, found[0], 1);
  CHECK(text.find("boolean go = false;") != std::string::npos);
  CHECK(text.find("while (!go)") != std::string::npos);
  CHECK(text.find("go = true;") != std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: BooleanExchange refuses non-boolean read contexts") {
  std::string src = R"JAVA(class Solution {
    static void f() {
        boolean flag = true;
        log(flag);
    }
    static void log(boolean b) { }
}
)JAVA";
  CHECK(sites(src, Kind::BooleanExchange).empty());
}

TEST_CASE("morphism: UnusedStatement inserts a fresh string declaration") {
  std::string text = apply_one(kLoopFn, Kind::UnusedStatement, 0, 42);
  CHECK(text.find("String unused_") != std::string::npos);
  CHECK(text.find("= \"unused\";") != std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: PermuteStatement swaps only independent neighbours") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        int a = x + 1;
        int b = x + 2;
        int c = a + b;
        return c;
    }
}
)JAVA";
  auto found = sites(src, Kind::PermuteStatement);
  // (a,b) independent; (b,c) and (c,return) are not
  REQUIRE(found.size() == 1);
  auto [text, applied] = apply(src, found[0], 1);
  std::size_t pos_b = text.find("int b = x + 2;");
  std::size_t pos_a = text.find("int a = x + 1;");
  REQUIRE(pos_a != std::string::npos);
  REQUIRE(pos_b != std::string::npos);
  CHECK(pos_b < pos_a);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: PermuteStatement refuses calls and dependent pairs") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        int a = helper(x);
        int b = x + 2;
        return a + b;
    }
    static int helper(int v) { return v; }
}
)JAVA";
  CHECK(sites(src, Kind::PermuteStatement).empty());
}

TEST_CASE("morphism: RemoveElse drops the else branch") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        if (x > 0) {
            return x;
        } else {
            return -x;
        }
    }
}
)JAVA";
  auto found = sites(src, Kind::RemoveElse);
  REQUIRE(found.size() == 1);
  auto [text, applied] = apply(src, found[0], 1);
  CHECK(text.find("else") == std::string::npos);
  CHECK(text.find("return -x") == std::string::npos);
  CHECK(text.find("return x") != std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: SwitchToIf builds an equivalent chain") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        int r;
        switch (x) {
            case 1: r = 10; break;
            case 2:
            case 3: r = 20; break;
            default: r = 30; break;
        }
        return r;
    }
}
)JAVA";
  auto found = sites(src, Kind::SwitchToIf);
  REQUIRE(found.size() == 1);
  auto [text, applied] = apply(src, found[0], 1);
  CHECK(text.find("switch") == std::string::npos);
  CHECK(text.find("if (x == 1)") != std::string::npos);
  CHECK(text.find("x == 2 || x == 3") != std::string::npos);
  CHECK(text.find("else {") != std::string::npos);
  CHECK(text.find("break") == std::string::npos);
  CHECK(java::parses(text));
}

TEST_CASE("morphism: SwitchToIf refuses fall-through switches") {
  std::string src = R"JAVA(class Solution {
    static int f(int x) {
        int r = 0;
        switch (x) {
            case 1: r = 10;
            case 2: r = 20; break;
            default: r = 30;
        }
        return r;
    }
}
)JAVA";
  CHECK(sites(src, Kind::SwitchToIf).empty());
}

TEST_CASE("morphism: stale sites are rejected") {
  auto found = sites(kLoopFn, Kind::ReorderCondition);
  REQUIRE(!found.empty());
  std::string other = std::string(kLoopFn) + "\n";
  CHECK_THROWS_AS(apply(other, found[0], 1), StaleSite);
}

TEST_CASE("morphism: unsupported language raises ConfigError") {
  CHECK_THROWS_AS(enumerate_sites("def f():\n  pass\n", "python", Kind::Identity),
                  ConfigError);
}

TEST_CASE("morphism: enumerate order is by position then descriptor") {
  std::string src = R"JAVA(class Solution {
    static int f(int a, int b, int c) {
        if (a < b) { return 1; }
        if (b < c) { return 2; }
        return 0;
    }
}
)JAVA";
  auto found = sites(src, Kind::ModifyCondition);
  REQUIRE(found.size() == 2);
  CHECK(found[0].node_span.begin < found[1].node_span.begin);
}

TEST_CASE("morphism: chain identity laws") {
  for (Kind k : {Kind::ReorderCondition, Kind::UnusedStatement, Kind::VariableRenaming}) {
    auto [with_pre, c1] = apply_chain(kLoopFn, "java", {Kind::Identity, k}, 11);
    auto [bare, c2] = apply_chain(kLoopFn, "java", {k}, 11);
    auto [with_post, c3] = apply_chain(kLoopFn, "java", {k, Kind::Identity}, 11);
    CHECK(with_pre == bare);
    CHECK(bare == with_post);
    CHECK(c1.distance() == 1);
    CHECK(c2.distance() == 1);
    CHECK(c3.distance() == 1);
  }
}

TEST_CASE("morphism: chain distance and label rules") {
  auto [t1, c1] = apply_chain(kLoopFn, "java", {Kind::Identity}, 5);
  CHECK(t1 == kLoopFn);
  CHECK(c1.distance() == 0);
  CHECK(c1.label() == "equivalent");

  auto [t2, c2] = apply_chain(kLoopFn, "java",
                              {Kind::UnusedStatement, Kind::VariableRenaming}, 5);
  CHECK(c2.distance() == 2);
  CHECK(c2.label() == "equivalent");
  CHECK(c2.kinds_key() == "US-VR");

  auto [t3, c3] = apply_chain(kLoopFn, "java",
                              {Kind::VariableRenaming, Kind::ModifyCondition}, 5);
  CHECK(c3.distance() == 2);
  CHECK(c3.label() == "nonequivalent");
}

TEST_CASE("morphism: chains compose sequentially (associativity of application)") {
  std::vector<Kind> kinds = {Kind::UnusedStatement, Kind::ReorderCondition,
                             Kind::VariableRenaming};
  auto [full, chain] = apply_chain(kLoopFn, "java", kinds, 21);

  // replay the recorded steps one at a time from the intermediate sources
  std::string replay = kLoopFn;
  for (const auto& step : chain.steps) {
    auto s = enumerate_sites(replay, "java", step.kind);
    const Site* match = nullptr;
    for (const auto& cand : s)
      if (cand.descriptor == step.site.descriptor) match = &cand;
    REQUIRE(match != nullptr);
    auto [next, applied] = apply(replay, *match, step.seed);
    replay = next;
  }
  CHECK(replay == full);
}

TEST_CASE("morphism: InapplicableKind carries the failing step") {
  try {
    apply_chain(kLoopFn, "java", {Kind::UnusedStatement, Kind::SwitchToIf}, 3);
    FAIL("expected InapplicableKind");
  } catch (const InapplicableKind& e) {
    CHECK(e.kind_name == "SwitchToIf");
    CHECK(e.step_index == 1);
  }
}

TEST_CASE("morphism: apply is deterministic in (source, site, seed)") {
  auto found = sites(kLoopFn, Kind::UnusedStatement);
  REQUIRE(!found.empty());
  auto [a, ap1] = apply(kLoopFn, found[0], 1234);
  auto [b, ap2] = apply(kLoopFn, found[0], 1234);
  CHECK(a == b);
  CHECK(ap1.after == ap2.after);
  auto [c, ap3] = apply(kLoopFn, found[0], 5678);
  CHECK(a != c);  // different seed, different unused-variable name
}

TEST_CASE("morphism: sampling is deterministic and notes shortfalls") {
  corpus::CodeObject obj;
  obj.task_id = "T/1";
  obj.language = "java";
  obj.source = kThreeVarFn;  // no loops/booleans/switches: few kinds apply

  auto r1 = sample_morphism_outputs(obj, 2, 1, 99);
  auto r2 = sample_morphism_outputs(obj, 2, 1, 99);
  REQUIRE(r1.equivalent.size() == r2.equivalent.size());
  for (std::size_t i = 0; i < r1.equivalent.size(); ++i)
    CHECK(r1.equivalent[i].object.source == r2.equivalent[i].object.source);

  auto r3 = sample_morphism_outputs(obj, 6, 0, 99);
  CHECK(r3.equivalent.size() < 6);
  CHECK(!r3.notes.empty());
}

TEST_CASE("morphism: sampled eq variants come from distinct kinds") {
  corpus::CodeObject obj;
  obj.task_id = "T/2";
  obj.language = "java";
  obj.source = kLoopFn;
  auto result = sample_morphism_outputs(obj, 2, 1, 7);
  REQUIRE(result.equivalent.size() == 2);
  CHECK(result.equivalent[0].chain.kinds_key() != result.equivalent[1].chain.kinds_key());
  REQUIRE(result.nonequivalent.size() == 1);
  CHECK(result.nonequivalent[0].chain.label() == "nonequivalent");
}
