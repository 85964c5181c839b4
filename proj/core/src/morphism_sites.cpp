#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "cateval/lang.hpp"
#include "morphism_internal.hpp"

namespace cateval::morphism {

namespace detail {

std::size_t Context::token_starting_at(std::size_t byte_pos) const {
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].begin == byte_pos) return i;
  return npos;
}

std::size_t Context::token_at_or_after(std::size_t byte_pos) const {
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].begin >= byte_pos) return i;
  return npos;
}

Context make_context(std::string_view source) {
  Context ctx;
  ctx.src.assign(source);
  ctx.unit = java::parse_unit(ctx.src);
  ctx.toks = java::lex_code(ctx.src);
  ctx.bracket_match.assign(ctx.toks.size(), npos);

  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < ctx.toks.size(); ++i) {
    std::string_view t = ctx.text(i);
    if (t == "(" || t == "[" || t == "{") {
      stack.push_back(i);
    } else if (t == ")" || t == "]" || t == "}") {
      if (!stack.empty()) {
        ctx.bracket_match[i] = stack.back();
        ctx.bracket_match[stack.back()] = i;
        stack.pop_back();
      }
    }
  }
  return ctx;
}

std::string apply_edits(std::string_view src, std::vector<Edit> edits) {
  std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    if (a.begin != b.begin) return a.begin > b.begin;
    return a.prio < b.prio;
  });
  std::string out(src);
  for (const Edit& e : edits) out.replace(e.begin, e.end - e.begin, e.text);
  return out;
}

bool span_contains_keyword(const Context& ctx, java::Span span, std::string_view kw) {
  for (const auto& t : ctx.toks) {
    if (t.begin < span.begin || t.end > span.end) continue;
    if (t.kind == java::TokKind::Keyword && java::text_of(ctx.src, t) == kw) return true;
  }
  return false;
}

VariableTable variable_table(const Context& ctx, const java::MethodDecl& m) {
  VariableTable table;
  std::vector<std::string> all = java::declared_names(ctx.src, m);
  std::unordered_map<std::string, int> counts;
  for (const auto& n : all) ++counts[n];

  int index = 0;
  auto add = [&](const std::string& name, std::size_t pos, bool boolean_local,
                 java::Span init) {
    ++index;
    if (counts[name] > 1) return;
    table.vars.push_back({name, pos, index, boolean_local, init});
  };

  for (const auto& p : m.params) add(p.name, p.name_pos, false, {});
  java::walk(m.body, [&](const java::Stmt& s) {
    if (s.kind != java::StmtKind::LocalDecl) return;
    bool boolean_type = java::slice(ctx.src, s.decl_type) == "boolean";
    for (const auto& d : s.declarators) add(d.name, d.name_pos, boolean_type, d.init);
  });
  return table;
}

namespace {

bool in_span(const java::Token& t, java::Span s) {
  return t.begin >= s.begin && t.end <= s.end;
}

/// Byte spans that hold type names or labels, where an identifier equal to a
/// variable name is not a use of the variable.
std::vector<java::Span> non_use_spans(const Context& ctx, const java::MethodDecl& m) {
  std::vector<java::Span> spans;
  java::walk(m.body, [&](const java::Stmt& s) {
    if (s.kind == java::StmtKind::LocalDecl) spans.push_back(s.decl_type);
    if (s.kind == java::StmtKind::Switch)
      for (const auto& g : s.cases)
        if (!g.label.empty()) spans.push_back(g.label);
    if (s.kind == java::StmtKind::ForEach && !s.foreach_var.empty()) {
      // all but the trailing identifier of `Type name` is type text
      spans.push_back({s.foreach_var.begin, s.foreach_var.end});
    }
  });
  return spans;
}

}  // namespace

std::vector<std::size_t> variable_use_tokens(const Context& ctx,
                                             const java::MethodDecl& m,
                                             const std::string& name) {
  std::vector<std::size_t> uses;
  java::Span method{m.header.begin, m.body.span.end};
  std::vector<java::Span> skip = non_use_spans(ctx, m);

  for (std::size_t i = 0; i < ctx.toks.size(); ++i) {
    const java::Token& t = ctx.toks[i];
    if (!in_span(t, method)) continue;
    if (t.kind != java::TokKind::Identifier || ctx.text(i) != name) continue;
    if (i > 0) {
      std::string_view prev = ctx.text(i - 1);
      if (prev == "." || prev == "::" || prev == "new" || prev == "instanceof") continue;
    }
    if (i + 1 < ctx.toks.size()) {
      std::string_view next = ctx.text(i + 1);
      if (next == "(" || next == "::") continue;
    }
    bool skipped = false;
    for (auto s : skip) {
      if (in_span(t, s)) {
        // the for-each variable name itself is a use we keep
        if (s.end == t.end) continue;
        skipped = true;
        break;
      }
    }
    if (skipped) continue;
    uses.push_back(i);
  }
  return uses;
}

namespace {

/// True when the '(' at token j is a grouping or condition paren rather
/// than a call/cast argument list.
bool paren_is_grouping(const Context& ctx, std::size_t j) {
  if (j == 0) return true;
  std::string_view prev = ctx.text(j - 1);
  if (prev == ")" || prev == "]") return false;
  if (ctx.toks[j - 1].kind == java::TokKind::Identifier) return false;
  return true;
}

bool paren_is_condition(const Context& ctx, std::size_t j) {
  if (j == 0) return false;
  std::string_view prev = ctx.text(j - 1);
  return prev == "if" || prev == "while";
}

}  // namespace

BoolPlan boolean_plan(const Context& ctx, const java::MethodDecl& m,
                      const std::string& name) {
  BoolPlan plan;

  // Identify boolean locals for the `w = v` context check.
  std::unordered_set<std::string> boolean_locals;
  java::Span decl_init;
  bool found = false;
  java::walk(m.body, [&](const java::Stmt& s) {
    if (s.kind != java::StmtKind::LocalDecl) return;
    if (java::slice(ctx.src, s.decl_type) != "boolean") return;
    for (const auto& d : s.declarators) {
      boolean_locals.insert(d.name);
      if (d.name == name) {
        decl_init = d.init;
        found = true;
      }
    }
  });
  if (!found) {
    plan.why = "not a boolean local";
    return plan;
  }
  plan.decl_init = decl_init;

  // Statement-level assignments `name = rhs;` are stores.
  std::unordered_set<std::size_t> store_lhs_tokens;
  bool bad = false;
  java::walk(m.body, [&](const java::Stmt& s) {
    if (bad || s.kind != java::StmtKind::ExprStmt) return;
    std::vector<std::size_t> ts;
    for (std::size_t i = 0; i < ctx.toks.size(); ++i)
      if (in_span(ctx.toks[i], s.expr)) ts.push_back(i);
    if (ts.size() < 2) return;
    if (ctx.text(ts[0]) != name) return;
    std::string_view op = ctx.text(ts[1]);
    if (op == "=") {
      store_lhs_tokens.insert(ts[0]);
      plan.store_spans.push_back({ctx.toks[ts[2]].begin, ctx.toks[ts.back()].end});
    } else if (op == "&=" || op == "|=" || op == "^=") {
      bad = true;
      plan.why = "compound assignment";
    }
  });
  if (bad) return plan;

  std::vector<std::size_t> uses = variable_use_tokens(ctx, m, name);
  for (std::size_t k : uses) {
    if (ctx.toks[k].begin == 0) continue;
    if (store_lhs_tokens.count(k)) continue;
    // skip the declaration's own name token
    bool is_decl_name = false;
    java::walk(m.body, [&](const java::Stmt& s) {
      if (s.kind != java::StmtKind::LocalDecl) return;
      for (const auto& d : s.declarators)
        if (d.name_pos == ctx.toks[k].begin) is_decl_name = true;
    });
    if (is_decl_name) continue;

    // Left context.
    bool left_ok = false;
    std::size_t j = k;
    while (j > 0) {
      --j;
      std::string_view t = ctx.text(j);
      if (t == "(") {
        if (paren_is_condition(ctx, j)) { left_ok = true; break; }
        if (paren_is_grouping(ctx, j)) continue;
        break;  // call or cast argument
      }
      if (t == "!" || t == "&&" || t == "||" || t == "&" || t == "|" || t == "^" ||
          t == "==" || t == "!=" || t == ";") {
        left_ok = true;
        break;
      }
      if (t == "=") {
        if (j > 0 && ctx.toks[j - 1].kind == java::TokKind::Identifier &&
            boolean_locals.count(std::string(ctx.text(j - 1)))) {
          left_ok = true;
        }
        break;
      }
      if (t == "return") {
        left_ok = (m.return_type == "boolean");
        break;
      }
      break;
    }
    if (!left_ok) {
      plan.why = "read outside boolean context";
      return plan;
    }

    // Right context.
    bool right_ok = false;
    j = k;
    while (j + 1 < ctx.toks.size()) {
      ++j;
      std::string_view t = ctx.text(j);
      if (t == ")") {
        std::size_t open = ctx.bracket_match[j];
        if (open != npos && paren_is_condition(ctx, open)) { right_ok = true; break; }
        if (open != npos && paren_is_grouping(ctx, open)) continue;
        break;
      }
      if (t == "&&" || t == "||" || t == "&" || t == "|" || t == "^" || t == "==" ||
          t == "!=" || t == ";") {
        right_ok = true;
        break;
      }
      break;
    }
    if (!right_ok) {
      plan.why = "read outside boolean context";
      return plan;
    }
    plan.read_tokens.push_back(k);
  }

  plan.eligible = true;
  return plan;
}

std::vector<java::Span> expression_spans(const java::MethodDecl& m) {
  std::vector<java::Span> spans;
  auto push = [&](java::Span s) {
    if (!s.empty()) spans.push_back(s);
  };
  java::walk(m.body, [&](const java::Stmt& s) {
    push(s.cond);
    push(s.for_update);
    push(s.foreach_iter);
    push(s.selector);
    push(s.expr);
    if (s.kind == java::StmtKind::BasicFor) push(s.for_init);
    for (const auto& d : s.declarators) push(d.init);
  });
  return spans;
}

SwitchPlan switch_plan(const Context& ctx, const java::Stmt& sw) {
  SwitchPlan plan;
  plan.stmt = &sw;
  if (sw.cases.empty()) return plan;
  if (!java::span_is_pure(ctx.src, sw.selector)) return plan;

  int string_labels = 0, value_labels = 0;
  for (std::size_t i = 0; i < sw.cases.size(); ++i) {
    const java::SwitchCase& g = sw.cases[i];
    if (g.arrow_form || g.has_inner_break) return plan;
    if (g.is_default) {
      if (i + 1 != sw.cases.size()) return plan;  // default must be last
      continue;
    }
    // label shape: literal, with optional leading minus
    std::size_t first = ctx.token_at_or_after(g.label.begin);
    if (first == npos) return plan;
    std::size_t last = first;
    while (last + 1 < ctx.toks.size() && ctx.toks[last + 1].end <= g.label.end) ++last;
    std::size_t lit = first;
    if (ctx.text(first) == "-" && last > first) lit = first + 1;
    if (lit != last) return plan;
    if (ctx.toks[lit].kind == java::TokKind::StringLit) ++string_labels;
    else if (ctx.toks[lit].kind == java::TokKind::Number ||
             ctx.toks[lit].kind == java::TokKind::CharLit)
      ++value_labels;
    else
      return plan;

    bool last_group = (i + 1 == sw.cases.size());
    if (g.stmt_count == 0) {
      if (last_group) return plan;  // dangling empty case
      continue;                     // merged into the next group's condition
    }
    if (!g.terminal) return plan;  // would fall through
  }
  if (string_labels > 0 && value_labels > 0) return plan;
  plan.string_labels = string_labels > 0;
  plan.eligible = true;
  return plan;
}

namespace {

void sites_in_method(const Context& ctx, const java::MethodDecl& m, Kind kind,
                     const Options& opts, std::vector<Site>& out) {
  auto add = [&](java::Span span, std::string descriptor) {
    Site s;
    s.kind = kind;
    s.node_span = span;
    s.descriptor = std::move(descriptor);
    out.push_back(std::move(s));
  };

  switch (kind) {
    case Kind::Identity:
      break;

    case Kind::VariableRenaming: {
      VariableTable table = variable_table(ctx, m);
      for (const auto& v : table.vars) {
        // a name that collides with a case label or statement label is not
        // safely renameable at token level
        bool label_clash = false;
        java::walk(m.body, [&](const java::Stmt& s) {
          if (s.kind == java::StmtKind::Labeled && s.label == v.name) label_clash = true;
          if (s.kind == java::StmtKind::Switch)
            for (const auto& g : s.cases)
              if (!g.label.empty() && java::slice(ctx.src, g.label) == v.name)
                label_clash = true;
        });
        if (label_clash) continue;
        add({v.decl_name_pos, v.decl_name_pos + v.name.size()},
            "var:" + v.name + "@" + std::to_string(v.decl_name_pos));
      }
      break;
    }

    case Kind::BooleanExchange: {
      VariableTable table = variable_table(ctx, m);
      for (const auto& v : table.vars) {
        if (!v.is_boolean_local) continue;
        BoolPlan plan = boolean_plan(ctx, m, v.name);
        if (plan.eligible)
          add({v.decl_name_pos, v.decl_name_pos + v.name.size()},
              "bool:" + v.name + "@" + std::to_string(v.decl_name_pos));
      }
      break;
    }

    case Kind::LoopExchange: {
      java::walk(m.body, [&](const java::Stmt& s) {
        if (s.kind == java::StmtKind::While) {
          add(s.span, "while@" + std::to_string(s.span.begin));
        } else if (s.kind == java::StmtKind::BasicFor) {
          const java::Stmt& body = s.children.front();
          if (!span_contains_keyword(ctx, body.span, "continue"))
            add(s.span, "for@" + std::to_string(s.span.begin));
        }
      });
      break;
    }

    case Kind::SwitchToIf: {
      java::walk(m.body, [&](const java::Stmt& s) {
        if (s.kind != java::StmtKind::Switch) return;
        if (switch_plan(ctx, s).eligible)
          add(s.span, "switch@" + std::to_string(s.span.begin));
      });
      break;
    }

    case Kind::UnusedStatement: {
      java::walk(m.body, [&](const java::Stmt& s) {
        if (s.kind == java::StmtKind::Block)
          add({s.block_open, s.block_open}, "block@" + std::to_string(s.block_open));
      });
      break;
    }

    case Kind::ReorderCondition:
    case Kind::ModifyCondition: {
      for (java::Span span : expression_spans(m)) {
        for (const auto& c : java::find_comparisons(ctx.src, span)) {
          if (kind == Kind::ReorderCondition && !c.operands_pure) continue;
          add({c.lhs.begin, c.rhs.end},
              "cmp@" + std::to_string(c.op.begin) + ":" + c.op_text);
        }
      }
      break;
    }

    case Kind::PermuteStatement: {
      java::walk(m.body, [&](const java::Stmt& s) {
        if (s.kind != java::StmtKind::Block) return;
        for (std::size_t i = 0; i + 1 < s.children.size(); ++i) {
          const java::Stmt& a = s.children[i];
          const java::Stmt& b = s.children[i + 1];
          java::StmtFootprint fa = java::footprint(ctx.src, a);
          java::StmtFootprint fb = java::footprint(ctx.src, b);
          if (!fa.analyzable || !fb.analyzable) continue;
          auto overlaps = [](const std::vector<std::string>& x,
                             const std::vector<std::string>& y) {
            for (const auto& e : x)
              if (std::find(y.begin(), y.end(), e) != y.end()) return true;
            return false;
          };
          if (overlaps(fa.writes, fb.writes) || overlaps(fa.writes, fb.reads) ||
              overlaps(fb.writes, fa.reads))
            continue;
          add({a.span.begin, b.span.end}, "swap@" + std::to_string(a.span.begin) + "+" +
                                              std::to_string(b.span.begin));
        }
      });
      break;
    }

    case Kind::RemoveElse: {
      java::walk(m.body, [&](const java::Stmt& s) {
        if (s.kind != java::StmtKind::If || !s.has_else) return;
        const java::Stmt& else_branch = s.children[1];
        bool empty_else = else_branch.kind == java::StmtKind::Empty ||
                          (else_branch.kind == java::StmtKind::Block &&
                           else_branch.children.empty());
        if (!empty_else)
          add({s.else_kw.begin, else_branch.span.end},
              "ifelse@" + std::to_string(s.span.begin));
      });
      break;
    }
  }
}

}  // namespace

std::vector<Site> find_sites(const Context& ctx, Kind kind, const Options& opts) {
  std::vector<Site> sites;
  if (kind == Kind::Identity) {
    Site s;
    s.kind = Kind::Identity;
    s.descriptor = "identity";
    sites.push_back(std::move(s));
  } else {
    for (const auto& m : ctx.unit.methods) sites_in_method(ctx, m, kind, opts, sites);
  }
  std::string digest = digest_hex(ctx.src);
  for (auto& s : sites) s.source_digest = digest;
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
    if (a.node_span.begin != b.node_span.begin) return a.node_span.begin < b.node_span.begin;
    return a.descriptor < b.descriptor;
  });
  return sites;
}

}  // namespace detail

std::vector<Site> enumerate_sites(std::string_view source, const std::string& language,
                                  Kind kind, const Options& opts) {
  if (language != lang::kJava)
    throw ConfigError("unsupported language for morphisms: " + language);
  detail::Context ctx = detail::make_context(source);
  return detail::find_sites(ctx, kind, opts);
}

}  // namespace cateval::morphism
