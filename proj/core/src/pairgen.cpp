#include "cateval/pairgen.hpp"

#include <algorithm>
#include <map>

#include "cateval/digest.hpp"
#include "cateval/rng.hpp"

namespace cateval::pairgen {

std::string to_string(PairLabel label) {
  return label == PairLabel::equivalent ? "equivalent" : "nonequivalent";
}

std::string to_string(Distance d) {
  switch (d) {
    case Distance::one: return "1";
    case Distance::two: return "2";
    case Distance::global: return "global";
  }
  return "?";
}

namespace {

PairLabel label_from_string(const std::string& s) {
  return s == "equivalent" ? PairLabel::equivalent : PairLabel::nonequivalent;
}

Distance distance_from_string(const std::string& s) {
  if (s == "1") return Distance::one;
  if (s == "2") return Distance::two;
  return Distance::global;
}

}  // namespace

json to_json(const EvalPair& pair) {
  json rec{{"left", corpus::to_json(pair.left)},
           {"right", corpus::to_json(pair.right)},
           {"label", to_string(pair.label)},
           {"distance", to_string(pair.distance)},
           {"provenance", pair.provenance},
           {"dataset", pair.dataset}};
  if (pair.tests_distinguish) rec["tests_distinguish"] = *pair.tests_distinguish;
  return rec;
}

EvalPair pair_from_json(const json& rec) {
  EvalPair pair;
  pair.left = corpus::code_object_from_json(rec.at("left"));
  pair.right = corpus::code_object_from_json(rec.at("right"));
  pair.label = label_from_string(rec.value("label", "equivalent"));
  pair.distance = distance_from_string(rec.value("distance", "1"));
  pair.provenance = rec.value("provenance", "");
  pair.dataset = rec.value("dataset", "");
  if (rec.contains("tests_distinguish") && rec["tests_distinguish"].is_boolean())
    pair.tests_distinguish = rec["tests_distinguish"].get<bool>();
  return pair;
}

namespace {

/// A/B orientation is randomized per pair so position carries no signal.
EvalPair make_pair(corpus::CodeObject a, corpus::CodeObject b, PairLabel label,
                   Distance distance, std::string provenance, Rng& rng) {
  EvalPair pair;
  if (rng.coin()) std::swap(a, b);
  pair.left = std::move(a);
  pair.right = std::move(b);
  pair.label = label;
  pair.distance = distance;
  pair.provenance = std::move(provenance);
  return pair;
}

std::string merged_kinds_key(const morphism::Chain& c1, const morphism::Chain& c2) {
  std::vector<std::string> parts;
  for (const auto& s : c1.steps)
    if (s.kind != morphism::Kind::Identity)
      parts.emplace_back(morphism::abbrev(s.kind));
  for (const auto& s : c2.steps)
    if (s.kind != morphism::Kind::Identity)
      parts.emplace_back(morphism::abbrev(s.kind));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) {
    if (!key.empty()) key += "-";
    key += p;
  }
  return key;
}

}  // namespace

PairBuildResult build_local_pairs(const std::vector<corpus::CodeObject>& corpus,
                                  std::uint64_t rng_seed, const LocalPairOptions& opts) {
  PairBuildResult result;

  for (const auto& obj : corpus) {
    Rng rng = Rng::derive(rng_seed ^ 0x70616972ull, fnv1a64(obj.task_id));
    morphism::SampleResult sampled = morphism::sample_morphism_outputs(
        obj, opts.eq_outputs_per_object, opts.neq_outputs_per_object, rng_seed,
        opts.morph);
    for (const auto& note : sampled.notes) result.log.push_back(note);

    auto emit = [&](corpus::CodeObject a, corpus::CodeObject b, PairLabel label,
                    Distance distance, std::string provenance) {
      if (a.source == b.source) {
        result.log.push_back(obj.task_id + ": identical-text pair dropped (" +
                             provenance + ")");
        return;
      }
      result.pairs.push_back(
          make_pair(std::move(a), std::move(b), label, distance, std::move(provenance), rng));
    };

    const auto& eq = sampled.equivalent;
    if (eq.size() >= 1)
      emit(obj, eq[0].object, PairLabel::equivalent, Distance::one, eq[0].chain.kinds_key());
    if (eq.size() >= 2) {
      emit(obj, eq[1].object, PairLabel::equivalent, Distance::one, eq[1].chain.kinds_key());
      emit(eq[0].object, eq[1].object, PairLabel::equivalent, Distance::two,
           merged_kinds_key(eq[0].chain, eq[1].chain));
    }
    for (const auto& neq : sampled.nonequivalent)
      emit(obj, neq.object, PairLabel::nonequivalent, Distance::one,
           neq.chain.kinds_key());

    if (opts.emit_two_step_neq && !sampled.equivalent.empty() &&
        !sampled.nonequivalent.empty()) {
      // chain a self kind and a nonequivalent kind on the original
      morphism::Kind self_kind = sampled.equivalent[0].chain.steps[0].kind;
      morphism::Kind neq_kind = sampled.nonequivalent[0].chain.steps[0].kind;
      try {
        auto [text, chain] = morphism::apply_chain(obj.source, obj.language,
                                                   {self_kind, neq_kind}, rng.next(),
                                                   opts.morph);
        corpus::CodeObject variant = obj;
        variant.task_id = obj.task_id + "#chain2";
        variant.source = text;
        emit(obj, variant, PairLabel::nonequivalent, Distance::two, chain.kinds_key());
      } catch (const std::exception& e) {
        result.log.push_back(obj.task_id + ": 2-step neq chain failed: " + e.what());
      }
    }
  }
  return result;
}

json to_json(const VariantRecord& v) {
  return json{{"original_task_id", v.original_task_id},
              {"object", corpus::to_json(v.object)},
              {"chain", v.chain.to_json()},
              {"label", v.chain.label()}};
}

VariantRecord variant_from_json(const json& rec) {
  VariantRecord v;
  v.original_task_id = rec.value("original_task_id", "");
  v.object = corpus::code_object_from_json(rec.at("object"));
  v.chain = morphism::Chain::from_json(rec.at("chain"));
  return v;
}

void write_variants(const std::filesystem::path& path,
                    const std::vector<VariantRecord>& variants, const json& meta) {
  std::vector<json> records;
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& v : variants) records.push_back(to_json(v));
  write_jsonl(path, records);
}

std::vector<VariantRecord> read_variants(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<VariantRecord> out;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    out.push_back(variant_from_json(rec));
  }
  return out;
}

PairBuildResult pairs_from_variants(const std::vector<corpus::CodeObject>& corpus,
                                    const std::vector<VariantRecord>& variants,
                                    std::uint64_t rng_seed) {
  PairBuildResult result;
  for (const auto& obj : corpus) {
    Rng rng = Rng::derive(rng_seed ^ 0x70616972ull, fnv1a64(obj.task_id));
    std::vector<const VariantRecord*> eq, neq;
    for (const auto& v : variants) {
      if (v.original_task_id != obj.task_id) continue;
      (v.chain.equivalent() ? eq : neq).push_back(&v);
    }

    auto emit = [&](corpus::CodeObject a, corpus::CodeObject b, PairLabel label,
                    Distance distance, std::string provenance) {
      if (a.source == b.source) {
        result.log.push_back(obj.task_id + ": identical-text pair dropped (" +
                             provenance + ")");
        return;
      }
      result.pairs.push_back(make_pair(std::move(a), std::move(b), label, distance,
                                       std::move(provenance), rng));
    };

    if (eq.size() >= 1)
      emit(obj, eq[0]->object, PairLabel::equivalent, Distance::one,
           eq[0]->chain.kinds_key());
    if (eq.size() >= 2) {
      emit(obj, eq[1]->object, PairLabel::equivalent, Distance::one,
           eq[1]->chain.kinds_key());
      emit(eq[0]->object, eq[1]->object, PairLabel::equivalent, Distance::two,
           merged_kinds_key(eq[0]->chain, eq[1]->chain));
    }
    for (const auto* v : neq) {
      Distance d = v->chain.distance() >= 2 ? Distance::two : Distance::one;
      emit(obj, v->object, PairLabel::nonequivalent, d, v->chain.kinds_key());
    }
  }
  return result;
}

PairBuildResult build_global_pairs(const std::vector<corpus::CodeObject>& contest,
                                   std::uint64_t rng_seed, const GlobalPairOptions& opts) {
  PairBuildResult result;

  // group by problem, preserving first-seen order
  std::vector<std::string> order;
  std::map<std::string, std::vector<const corpus::CodeObject*>> groups;
  for (const auto& obj : contest) {
    if (!groups.count(obj.problem_id)) order.push_back(obj.problem_id);
    groups[obj.problem_id].push_back(&obj);
  }

  for (const auto& problem : order) {
    Rng rng = Rng::derive(rng_seed ^ 0x676c6f62ull, fnv1a64(problem));
    const auto& members = groups[problem];

    // textually identical solutions test nothing; dedup per language+verdict
    auto dedup = [&](const std::string& language, corpus::SolutionVerdict verdict) {
      std::vector<const corpus::CodeObject*> out;
      std::vector<std::string> seen;
      for (const auto* obj : members) {
        if (obj->language != language || obj->verdict != verdict) continue;
        if (std::find(seen.begin(), seen.end(), obj->source) != seen.end()) {
          result.log.push_back(problem + ": duplicate solution text dropped (" +
                               obj->task_id + ")");
          continue;
        }
        seen.push_back(obj->source);
        out.push_back(obj);
      }
      return out;
    };

    // one equivalent pair from the first language with two distinct corrects
    bool eq_made = false;
    for (const auto& language : opts.language_preference) {
      auto correct = dedup(language, corpus::SolutionVerdict::correct);
      if (correct.size() < 2) continue;
      std::size_t i = rng.below(correct.size());
      std::size_t j = rng.below(correct.size() - 1);
      if (j >= i) ++j;
      result.pairs.push_back(make_pair(*correct[i], *correct[j], PairLabel::equivalent,
                                       Distance::global,
                                       problem + ":correct*correct", rng));
      eq_made = true;
      break;
    }
    if (!eq_made)
      result.log.push_back(problem + ": fewer than 2 distinct correct solutions, no eq pair");

    // nonequivalent pairs: correct vs incorrect, same language, capped
    int emitted = 0;
    for (const auto& language : opts.language_preference) {
      if (emitted >= opts.neq_cap_per_problem) break;
      auto correct = dedup(language, corpus::SolutionVerdict::correct);
      auto incorrect = dedup(language, corpus::SolutionVerdict::incorrect);
      if (correct.empty() || incorrect.empty()) continue;
      std::vector<std::size_t> inc_order = rng.shuffled_indices(incorrect.size());
      for (std::size_t k : inc_order) {
        if (emitted >= opts.neq_cap_per_problem) break;
        const corpus::CodeObject* c = correct[rng.below(correct.size())];
        const corpus::CodeObject* w = incorrect[k];
        if (c->source == w->source) continue;
        result.pairs.push_back(make_pair(*c, *w, PairLabel::nonequivalent,
                                         Distance::global,
                                         problem + ":correct*incorrect", rng));
        ++emitted;
      }
    }
  }
  return result;
}

std::vector<EvalPair> flag_distinguishing_tests(std::vector<EvalPair> pairs,
                                                const ExecPassFn& exec_passes) {
  for (auto& pair : pairs) {
    if (!pair.left.tests.present || !pair.right.tests.present) continue;
    std::optional<bool> left = exec_passes(pair.left);
    std::optional<bool> right = exec_passes(pair.right);
    if (!left || !right) continue;  // environment failure: flag stays absent
    pair.tests_distinguish = (*left != *right);
  }
  return pairs;
}

void write_pairs(const std::filesystem::path& path, const std::vector<EvalPair>& pairs,
                 const json& meta) {
  std::vector<json> records;
  records.reserve(pairs.size() + 1);
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& pair : pairs) records.push_back(to_json(pair));
  write_jsonl(path, records);
}

std::vector<EvalPair> read_pairs(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<EvalPair> pairs;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    pairs.push_back(pair_from_json(rec));
  }
  return pairs;
}

}  // namespace cateval::pairgen
