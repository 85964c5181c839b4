#include <algorithm>
#include <unordered_set>

#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "morphism_internal.hpp"

namespace cateval::morphism {

namespace detail {

namespace {

struct NamedSite {
  std::string name;
  std::size_t decl_pos = 0;
};

NamedSite parse_named_descriptor(const std::string& descriptor) {
  // "var:<name>@<pos>" / "bool:<name>@<pos>"
  NamedSite out;
  auto colon = descriptor.find(':');
  auto at = descriptor.rfind('@');
  if (colon == std::string::npos || at == std::string::npos || at < colon)
    throw RewriteFailure("malformed descriptor: " + descriptor);
  out.name = descriptor.substr(colon + 1, at - colon - 1);
  out.decl_pos = std::stoull(descriptor.substr(at + 1));
  return out;
}

const java::MethodDecl& method_containing(const Context& ctx, std::size_t byte_pos) {
  for (const auto& m : ctx.unit.methods)
    if (byte_pos >= m.header.begin && byte_pos <= m.body.span.end) return m;
  throw RewriteFailure("no method contains byte " + std::to_string(byte_pos));
}

const java::Stmt* stmt_at(const java::Stmt& root, java::StmtKind kind,
                          std::size_t span_begin) {
  const java::Stmt* found = nullptr;
  java::walk(root, [&](const java::Stmt& s) {
    if (!found && s.kind == kind && s.span.begin == span_begin) found = &s;
  });
  return found;
}

std::unordered_set<std::string> identifier_texts(const Context& ctx) {
  std::unordered_set<std::string> out;
  for (std::size_t i = 0; i < ctx.toks.size(); ++i)
    if (ctx.toks[i].kind == java::TokKind::Identifier)
      out.insert(std::string(ctx.text(i)));
  return out;
}

std::string rewrite_rename(const Context& ctx, const Site& site, std::uint64_t seed,
                           const Options& opts) {
  NamedSite ns = parse_named_descriptor(site.descriptor);
  const java::MethodDecl& m = method_containing(ctx, ns.decl_pos);

  VariableTable table = variable_table(ctx, m);
  const VariableTable::Var* var = nullptr;
  for (const auto& v : table.vars)
    if (v.name == ns.name && v.decl_name_pos == ns.decl_pos) var = &v;
  if (!var) throw RewriteFailure("variable vanished: " + ns.name);

  std::unordered_set<std::string> taken = identifier_texts(ctx);
  std::string fresh;
  if (opts.rename.scheme == RenameOptions::Scheme::Pool && !opts.rename.pool.empty()) {
    const auto& pool = opts.rename.pool;
    for (std::size_t probe = 0; probe < pool.size(); ++probe) {
      const std::string& candidate = pool[(seed + probe) % pool.size()];
      if (candidate != ns.name && !taken.count(candidate)) {
        fresh = candidate;
        break;
      }
    }
  }
  if (fresh.empty()) {
    int n = var->decl_index;
    while (taken.count("var_" + std::to_string(n))) ++n;
    fresh = "var_" + std::to_string(n);
  }

  std::vector<Edit> edits;
  for (std::size_t i : variable_use_tokens(ctx, m, ns.name))
    edits.push_back({ctx.toks[i].begin, ctx.toks[i].end, fresh});
  return apply_edits(ctx.src, std::move(edits));
}

void flip_value(const Context& ctx, java::Span value, std::vector<Edit>& edits) {
  std::size_t first = ctx.token_at_or_after(value.begin);
  bool single = first != npos && ctx.toks[first].end >= value.end;
  if (single && (ctx.text(first) == "true" || ctx.text(first) == "false")) {
    edits.push_back({ctx.toks[first].begin, ctx.toks[first].end,
                     ctx.text(first) == "true" ? "false" : "true"});
    return;
  }
  edits.push_back({value.begin, value.begin, "!(", 1});
  edits.push_back({value.end, value.end, ")", 0});
}

std::string rewrite_boolean_exchange(const Context& ctx, const Site& site) {
  NamedSite ns = parse_named_descriptor(site.descriptor);
  const java::MethodDecl& m = method_containing(ctx, ns.decl_pos);
  BoolPlan plan = boolean_plan(ctx, m, ns.name);
  if (!plan.eligible) throw RewriteFailure("boolean site ineligible: " + plan.why);

  std::vector<Edit> edits;
  if (!plan.decl_init.empty()) flip_value(ctx, plan.decl_init, edits);
  for (java::Span rhs : plan.store_spans) flip_value(ctx, rhs, edits);
  for (std::size_t i : plan.read_tokens)
    edits.push_back({ctx.toks[i].begin, ctx.toks[i].begin, "!", 0});
  return apply_edits(ctx.src, std::move(edits));
}

/// Splits an expression list (`i = 0, j = 1`) into statements; a declaration
/// stays whole.
std::vector<std::string> statements_from_clause(const Context& ctx, java::Span clause) {
  std::vector<std::string> stmts;
  if (clause.empty()) return stmts;
  std::string text(java::slice(ctx.src, clause));

  bool is_decl = false;
  try {
    java::ParsedUnit probe = java::parse_unit("class X{void f(){" + text + ";}}");
    if (!probe.methods.empty() && !probe.methods[0].body.children.empty() &&
        probe.methods[0].body.children[0].kind == java::StmtKind::LocalDecl)
      is_decl = true;
  } catch (const ParseError&) {
  }
  if (is_decl) {
    stmts.push_back(text + ";");
    return stmts;
  }

  // comma split at bracket depth 0
  int depth = 0;
  std::size_t start = clause.begin;
  for (std::size_t i = 0; i < ctx.toks.size(); ++i) {
    const java::Token& t = ctx.toks[i];
    if (t.begin < clause.begin || t.end > clause.end) continue;
    std::string_view s = ctx.text(i);
    if (s == "(" || s == "[" || s == "{") ++depth;
    else if (s == ")" || s == "]" || s == "}") --depth;
    else if (s == "," && depth == 0) {
      stmts.push_back(std::string(ctx.src.substr(start, t.begin - start)) + ";");
      start = t.end;
    }
  }
  stmts.push_back(std::string(ctx.src.substr(start, clause.end - start)) + ";");
  return stmts;
}

std::string rewrite_loop_exchange(const Context& ctx, const Site& site) {
  bool is_while = site.descriptor.rfind("while@", 0) == 0;
  std::size_t pos = std::stoull(site.descriptor.substr(site.descriptor.find('@') + 1));

  for (const auto& m : ctx.unit.methods) {
    const java::Stmt* s =
        stmt_at(m.body, is_while ? java::StmtKind::While : java::StmtKind::BasicFor, pos);
    if (!s) continue;

    if (is_while) {
      // `while (cond)` -> `for (; cond; )`, body untouched
      std::size_t close = ctx.token_at_or_after(s->cond.end);
      while (close != npos && ctx.text(close) != ")") ++close;
      if (close == npos) throw RewriteFailure("lost while header");
      std::string cond(java::slice(ctx.src, s->cond));
      std::vector<Edit> edits;
      edits.push_back({s->span.begin, ctx.toks[close].end, "for (; " + cond + "; )"});
      return apply_edits(ctx.src, std::move(edits));
    }

    // basic for -> block-wrapped while
    std::vector<std::string> init = statements_from_clause(ctx, s->for_init);
    std::vector<std::string> update = statements_from_clause(ctx, s->for_update);
    std::string cond = s->cond.empty() ? "true" : std::string(java::slice(ctx.src, s->cond));

    const java::Stmt& body = s->children.front();
    std::string inner;
    if (body.kind == java::StmtKind::Block) {
      inner = std::string(
          ctx.src.substr(body.block_open, body.span.end - 1 - body.block_open));
    } else {
      inner = std::string(java::slice(ctx.src, body.span));
    }

    std::string text = "{ ";
    for (const auto& st : init) text += st + " ";
    text += "while (" + cond + ") { " + inner;
    for (const auto& st : update) text += " " + st;
    text += " } }";

    std::vector<Edit> edits;
    edits.push_back({s->span.begin, s->span.end, text});
    return apply_edits(ctx.src, std::move(edits));
  }
  throw RewriteFailure("loop vanished at " + site.descriptor);
}

std::string rewrite_switch_to_if(const Context& ctx, const Site& site) {
  std::size_t pos = std::stoull(site.descriptor.substr(site.descriptor.find('@') + 1));
  for (const auto& m : ctx.unit.methods) {
    const java::Stmt* s = stmt_at(m.body, java::StmtKind::Switch, pos);
    if (!s) continue;
    SwitchPlan plan = switch_plan(ctx, *s);
    if (!plan.eligible) throw RewriteFailure("switch site ineligible");

    std::size_t sel_tokens = 0;
    for (const auto& t : ctx.toks)
      if (t.begin >= s->selector.begin && t.end <= s->selector.end) ++sel_tokens;
    std::string sel(java::slice(ctx.src, s->selector));
    if (sel_tokens > 1) sel = "(" + sel + ")";

    auto condition_for = [&](const std::string& label) {
      if (plan.string_labels) return sel + ".equals(" + label + ")";
      return sel + " == " + label;
    };
    auto body_text = [&](const java::SwitchCase& g) {
      java::Span b = g.body;
      if (g.ends_with_break) b.end = g.trailing_break.begin;
      std::string body(java::slice(ctx.src, b));
      while (!body.empty() && (body.back() == ' ' || body.back() == '\n' ||
                               body.back() == '\t' || body.back() == '\r'))
        body.pop_back();
      return "{ " + body + " }";
    };

    std::string text;
    std::vector<std::string> pending;
    bool first = true;
    for (const auto& g : s->cases) {
      if (g.is_default) {
        if (g.stmt_count == 0) break;
        if (first) text += body_text(g);   // switch with only a default group
        else text += " else " + body_text(g);
        break;
      }
      pending.push_back(std::string(java::slice(ctx.src, g.label)));
      if (g.stmt_count == 0) continue;  // merged labels
      std::string cond;
      for (const auto& l : pending) {
        if (!cond.empty()) cond += " || ";
        cond += condition_for(l);
      }
      pending.clear();
      text += std::string(first ? "" : " else ") + "if (" + cond + ") " + body_text(g);
      first = false;
    }

    std::vector<Edit> edits;
    edits.push_back({s->span.begin, s->span.end, text});
    return apply_edits(ctx.src, std::move(edits));
  }
  throw RewriteFailure("switch vanished at " + site.descriptor);
}

std::string rewrite_unused_statement(const Context& ctx, const Site& site,
                                     std::uint64_t seed) {
  std::size_t k = seed % 100000;
  std::string name = "unused_" + std::to_string(k);
  while (ctx.src.find(name) != std::string::npos) {
    ++k;
    name = "unused_" + std::to_string(k);
  }
  std::vector<Edit> edits;
  edits.push_back({site.node_span.begin, site.node_span.begin,
                   " String " + name + " = \"unused\";"});
  return apply_edits(ctx.src, std::move(edits));
}

struct FoundComparison {
  java::Comparison cmp;
  bool ok = false;
};

FoundComparison comparison_at(const Context& ctx, std::size_t op_pos) {
  FoundComparison out;
  for (const auto& m : ctx.unit.methods) {
    for (java::Span span : expression_spans(m)) {
      for (const auto& c : java::find_comparisons(ctx.src, span)) {
        if (c.op.begin == op_pos) {
          out.cmp = c;
          out.ok = true;
          return out;
        }
      }
    }
  }
  return out;
}

std::size_t descriptor_pos(const std::string& descriptor) {
  auto at = descriptor.find('@');
  return std::stoull(descriptor.substr(at + 1));
}

std::string rewrite_reorder_condition(const Context& ctx, const Site& site) {
  std::size_t op_pos = descriptor_pos(site.descriptor);
  FoundComparison f = comparison_at(ctx, op_pos);
  if (!f.ok) throw RewriteFailure("comparison vanished at " + site.descriptor);

  static const std::pair<const char*, const char*> kMirror[] = {
      {"<", ">"}, {">", "<"}, {"<=", ">="}, {">=", "<="}, {"==", "=="}, {"!=", "!="}};
  std::string mirrored;
  for (const auto& [a, b] : kMirror)
    if (f.cmp.op_text == a) mirrored = b;
  if (mirrored.empty()) throw RewriteFailure("unsupported operator " + f.cmp.op_text);

  std::string lhs(java::slice(ctx.src, f.cmp.lhs));
  std::string rhs(java::slice(ctx.src, f.cmp.rhs));
  std::vector<Edit> edits;
  edits.push_back({f.cmp.lhs.begin, f.cmp.rhs.end, rhs + " " + mirrored + " " + lhs});
  return apply_edits(ctx.src, std::move(edits));
}

std::string rewrite_modify_condition(const Context& ctx, const Site& site) {
  std::size_t op_pos = descriptor_pos(site.descriptor);
  FoundComparison f = comparison_at(ctx, op_pos);
  if (!f.ok) throw RewriteFailure("comparison vanished at " + site.descriptor);

  static const std::pair<const char*, const char*> kAdjacent[] = {
      {"<", "<="}, {"<=", "<"}, {">", ">="}, {">=", ">"}, {"==", "!="}, {"!=", "=="}};
  std::string swapped;
  for (const auto& [a, b] : kAdjacent)
    if (f.cmp.op_text == a) swapped = b;
  if (swapped.empty()) throw RewriteFailure("unsupported operator " + f.cmp.op_text);

  std::vector<Edit> edits;
  edits.push_back({f.cmp.op.begin, f.cmp.op.end, swapped});
  return apply_edits(ctx.src, std::move(edits));
}

std::string rewrite_permute_statement(const Context& ctx, const Site& site) {
  // "swap@<p1>+<p2>"
  auto at = site.descriptor.find('@');
  auto plus = site.descriptor.find('+', at);
  std::size_t p1 = std::stoull(site.descriptor.substr(at + 1, plus - at - 1));
  std::size_t p2 = std::stoull(site.descriptor.substr(plus + 1));

  for (const auto& m : ctx.unit.methods) {
    std::string result;
    bool done = false;
    java::walk(m.body, [&](const java::Stmt& s) {
      if (done || s.kind != java::StmtKind::Block) return;
      for (std::size_t i = 0; i + 1 < s.children.size(); ++i) {
        const java::Stmt& a = s.children[i];
        const java::Stmt& b = s.children[i + 1];
        if (a.span.begin != p1 || b.span.begin != p2) continue;
        std::vector<Edit> edits;
        edits.push_back({a.span.begin, a.span.end, std::string(java::slice(ctx.src, b.span))});
        edits.push_back({b.span.begin, b.span.end, std::string(java::slice(ctx.src, a.span))});
        result = apply_edits(ctx.src, std::move(edits));
        done = true;
        return;
      }
    });
    if (done) return result;
  }
  throw RewriteFailure("statement pair vanished at " + site.descriptor);
}

std::string rewrite_remove_else(const Context& ctx, const Site& site) {
  std::size_t pos = descriptor_pos(site.descriptor);
  for (const auto& m : ctx.unit.methods) {
    const java::Stmt* s = stmt_at(m.body, java::StmtKind::If, pos);
    if (!s) continue;
    if (!s->has_else) throw RewriteFailure("else vanished at " + site.descriptor);
    std::size_t begin = s->else_kw.begin;
    while (begin > 0 && (ctx.src[begin - 1] == ' ' || ctx.src[begin - 1] == '\t'))
      --begin;
    std::vector<Edit> edits;
    edits.push_back({begin, s->children[1].span.end, ""});
    return apply_edits(ctx.src, std::move(edits));
  }
  throw RewriteFailure("if vanished at " + site.descriptor);
}

}  // namespace

std::string rewrite_site(const Context& ctx, const Site& site, std::uint64_t seed,
                         const Options& opts) {
  switch (site.kind) {
    case Kind::Identity: return ctx.src;
    case Kind::VariableRenaming: return rewrite_rename(ctx, site, seed, opts);
    case Kind::BooleanExchange: return rewrite_boolean_exchange(ctx, site);
    case Kind::LoopExchange: return rewrite_loop_exchange(ctx, site);
    case Kind::SwitchToIf: return rewrite_switch_to_if(ctx, site);
    case Kind::UnusedStatement: return rewrite_unused_statement(ctx, site, seed);
    case Kind::ReorderCondition: return rewrite_reorder_condition(ctx, site);
    case Kind::ModifyCondition: return rewrite_modify_condition(ctx, site);
    case Kind::PermuteStatement: return rewrite_permute_statement(ctx, site);
    case Kind::RemoveElse: return rewrite_remove_else(ctx, site);
  }
  throw RewriteFailure("unknown kind");
}

}  // namespace detail

std::pair<std::string, Applied> apply(std::string_view source, const Site& site,
                                      std::uint64_t seed, const Options& opts) {
  std::string before = digest_hex(source);
  if (before != site.source_digest)
    throw StaleSite("site was enumerated on a different source (digest " +
                    site.source_digest + " vs " + before + ")");

  detail::Context ctx = detail::make_context(source);
  std::string rewritten = detail::rewrite_site(ctx, site, seed, opts);

  if (site.kind != Kind::Identity && !java::parses(rewritten))
    throw RewriteFailure("rewritten source does not parse (site " + site.descriptor + ")");

  Applied applied;
  applied.kind = site.kind;
  applied.site = site;
  applied.seed = seed;
  applied.before = before;
  applied.after = digest_hex(rewritten);
  return {std::move(rewritten), std::move(applied)};
}

}  // namespace cateval::morphism
