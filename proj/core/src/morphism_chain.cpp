#include <algorithm>

#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "cateval/lang.hpp"
#include "cateval/rng.hpp"
#include "morphism_internal.hpp"

namespace cateval::morphism {

Equivalence equivalence_of(Kind kind) {
  switch (kind) {
    case Kind::ModifyCondition:
    case Kind::RemoveElse:
      return Equivalence::nonequivalent;
    default:
      return Equivalence::self;
  }
}

std::string_view abbrev(Kind kind) {
  switch (kind) {
    case Kind::Identity: return "ID";
    case Kind::VariableRenaming: return "VR";
    case Kind::BooleanExchange: return "BE";
    case Kind::LoopExchange: return "LE";
    case Kind::SwitchToIf: return "SI";
    case Kind::UnusedStatement: return "US";
    case Kind::ReorderCondition: return "RC";
    case Kind::PermuteStatement: return "PS";
    case Kind::ModifyCondition: return "MC";
    case Kind::RemoveElse: return "RE";
  }
  return "??";
}

std::string_view name(Kind kind) {
  switch (kind) {
    case Kind::Identity: return "Identity";
    case Kind::VariableRenaming: return "VariableRenaming";
    case Kind::BooleanExchange: return "BooleanExchange";
    case Kind::LoopExchange: return "LoopExchange";
    case Kind::SwitchToIf: return "SwitchToIf";
    case Kind::UnusedStatement: return "UnusedStatement";
    case Kind::ReorderCondition: return "ReorderCondition";
    case Kind::PermuteStatement: return "PermuteStatement";
    case Kind::ModifyCondition: return "ModifyCondition";
    case Kind::RemoveElse: return "RemoveElse";
  }
  return "?";
}

std::optional<Kind> kind_from_string(const std::string& text) {
  for (Kind k : all_kinds())
    if (text == name(k) || text == abbrev(k)) return k;
  return std::nullopt;
}

const std::vector<Kind>& self_kinds() {
  static const std::vector<Kind> kinds = {
      Kind::VariableRenaming, Kind::BooleanExchange,  Kind::LoopExchange,
      Kind::SwitchToIf,       Kind::UnusedStatement,  Kind::ReorderCondition,
      Kind::PermuteStatement,
  };
  return kinds;
}

const std::vector<Kind>& nonequivalent_kinds() {
  static const std::vector<Kind> kinds = {Kind::ModifyCondition, Kind::RemoveElse};
  return kinds;
}

const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = {
      Kind::Identity,        Kind::VariableRenaming, Kind::BooleanExchange,
      Kind::LoopExchange,    Kind::SwitchToIf,       Kind::UnusedStatement,
      Kind::ReorderCondition, Kind::PermuteStatement, Kind::ModifyCondition,
      Kind::RemoveElse,
  };
  return kinds;
}

int Chain::distance() const {
  int d = 0;
  for (const auto& step : steps)
    if (step.kind != Kind::Identity) ++d;
  return d;
}

bool Chain::equivalent() const {
  for (const auto& step : steps)
    if (equivalence_of(step.kind) == Equivalence::nonequivalent) return false;
  return true;
}

std::string Chain::label() const { return equivalent() ? "equivalent" : "nonequivalent"; }

std::string Chain::kinds_key() const {
  std::vector<std::string> parts;
  for (const auto& step : steps)
    if (step.kind != Kind::Identity) parts.emplace_back(abbrev(step.kind));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) {
    if (!key.empty()) key += "-";
    key += p;
  }
  return key;
}

json Chain::to_json() const {
  json steps_json = json::array();
  for (const auto& step : steps) {
    steps_json.push_back(json{{"kind", std::string(name(step.kind))},
                              {"descriptor", step.site.descriptor},
                              {"seed", step.seed},
                              {"before", step.before},
                              {"after", step.after}});
  }
  return json{{"steps", steps_json},
              {"distance", distance()},
              {"label", label()},
              {"kinds", kinds_key()}};
}

Chain Chain::from_json(const json& rec) {
  Chain chain;
  if (!rec.contains("steps")) return chain;
  for (const auto& s : rec["steps"]) {
    Applied a;
    auto kind = kind_from_string(s.value("kind", ""));
    if (!kind) throw ConfigError("unknown morphism kind in chain record");
    a.kind = *kind;
    a.site.kind = *kind;
    a.site.descriptor = s.value("descriptor", "");
    a.seed = s.value("seed", 0ull);
    a.before = s.value("before", "");
    a.after = s.value("after", "");
    chain.steps.push_back(std::move(a));
  }
  return chain;
}

std::pair<std::string, Chain> apply_chain(std::string_view source,
                                          const std::string& language,
                                          const std::vector<Kind>& kinds,
                                          std::uint64_t rng_seed, const Options& opts) {
  Rng rng(rng_seed);
  std::string current(source);
  Chain chain;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Kind kind = kinds[i];
    if (kind == Kind::Identity) {
      // identity must not disturb the random stream, or composing with it
      // would change the other steps' choices
      std::vector<Site> sites = enumerate_sites(current, language, kind, opts);
      auto [next, applied] = apply(current, sites.front(), 0, opts);
      chain.steps.push_back(std::move(applied));
      continue;
    }
    std::vector<Site> sites = enumerate_sites(current, language, kind, opts);
    if (sites.empty()) throw InapplicableKind(std::string(name(kind)), i);
    const Site& site = sites[rng.below(sites.size())];
    std::uint64_t step_seed = rng.next();
    auto [next, applied] = apply(current, site, step_seed, opts);
    current = std::move(next);
    chain.steps.push_back(std::move(applied));
  }
  return {std::move(current), std::move(chain)};
}

SampleResult sample_morphism_outputs(const corpus::CodeObject& obj, int want_eq,
                                     int want_neq, std::uint64_t rng_seed,
                                     const Options& opts) {
  SampleResult result;
  Rng rng = Rng::derive(rng_seed, fnv1a64(obj.task_id));

  auto sample_from = [&](const std::vector<Kind>& catalog, int want,
                         std::vector<SampledVariant>& sink) {
    // applicable kinds, in catalog order
    std::vector<std::pair<Kind, std::vector<Site>>> applicable;
    for (Kind kind : catalog) {
      std::vector<Site> sites;
      try {
        sites = enumerate_sites(obj.source, obj.language, kind, opts);
      } catch (const ParseError& e) {
        result.notes.push_back(obj.task_id + ": parse error: " + e.what());
        return;
      }
      if (!sites.empty()) applicable.emplace_back(kind, std::move(sites));
    }
    if (static_cast<int>(applicable.size()) < want)
      result.notes.push_back(obj.task_id + ": only " +
                             std::to_string(applicable.size()) +
                             " applicable kind(s), wanted " + std::to_string(want));

    std::vector<std::size_t> order = rng.shuffled_indices(applicable.size());
    int taken = 0;
    for (std::size_t oi = 0; oi < order.size() && taken < want; ++oi) {
      auto& [kind, sites] = applicable[order[oi]];
      // try sites in a seeded random rotation until one rewrites cleanly
      std::size_t offset = sites.size() > 0 ? rng.below(sites.size()) : 0;
      bool produced = false;
      for (std::size_t probe = 0; probe < sites.size() && !produced; ++probe) {
        const Site& site = sites[(offset + probe) % sites.size()];
        std::uint64_t seed = rng.next();
        try {
          auto [text, applied] = apply(obj.source, site, seed, opts);
          SampledVariant variant;
          variant.object = obj;
          variant.object.task_id =
              obj.task_id + "#" + std::string(abbrev(kind)) + "-" + std::to_string(seed % 997);
          variant.object.source = std::move(text);
          variant.chain.steps.push_back(std::move(applied));
          sink.push_back(std::move(variant));
          produced = true;
        } catch (const RewriteFailure& e) {
          result.notes.push_back(obj.task_id + ": site unusable (" + site.descriptor +
                                 "): " + e.what());
        }
      }
      if (produced) ++taken;
    }
  };

  sample_from(self_kinds(), want_eq, result.equivalent);
  sample_from(nonequivalent_kinds(), want_neq, result.nonequivalent);
  return result;
}

}  // namespace cateval::morphism
