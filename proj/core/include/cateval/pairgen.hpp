#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/morphism.hpp"

namespace cateval::pairgen {

enum class PairLabel { equivalent, nonequivalent };
enum class Distance { one, two, global };

std::string to_string(PairLabel label);
std::string to_string(Distance d);

/// Two code objects with the ground-truth relation between them.
struct EvalPair {
  corpus::CodeObject left;
  corpus::CodeObject right;
  PairLabel label = PairLabel::equivalent;
  Distance distance = Distance::one;
  std::string provenance;  // morphism kinds key, or problem id + verdicts
  std::string dataset;     // slice key, filled by the caller
  std::optional<bool> tests_distinguish;
};

json to_json(const EvalPair& pair);
EvalPair pair_from_json(const json& rec);

struct LocalPairOptions {
  int eq_outputs_per_object = 2;   // distinct self kinds sampled per object
  int neq_outputs_per_object = 1;
  /// Appendix-style "2-neq" pairs (self kind + nonequivalent kind chained)
  /// are not described by the source experiments; off unless asked for.
  bool emit_two_step_neq = false;
  morphism::Options morph;
};

struct GlobalPairOptions {
  int neq_cap_per_problem = 4;
  /// language preference order when a problem has solutions in several
  std::vector<std::string> language_preference = {"java", "python"};
};

struct PairBuildResult {
  std::vector<EvalPair> pairs;
  std::vector<std::string> log;  // shortfalls, exclusions, skipped problems
};

/// Local pairs from morphism outputs: per object two self variants m1, m2
/// and up to one nonequivalent variant b give (a,m1) (a,m2) at distance one,
/// (m1,m2) at distance two, and (a,b) nonequivalent.
PairBuildResult build_local_pairs(const std::vector<corpus::CodeObject>& corpus,
                                  std::uint64_t rng_seed,
                                  const LocalPairOptions& opts = {});

/// One precomputed morphism output, as produced by the `morph` stage.
struct VariantRecord {
  std::string original_task_id;
  corpus::CodeObject object;
  morphism::Chain chain;
};

json to_json(const VariantRecord& v);
VariantRecord variant_from_json(const json& rec);
void write_variants(const std::filesystem::path& path,
                    const std::vector<VariantRecord>& variants,
                    const json& meta = json::object());
std::vector<VariantRecord> read_variants(const std::filesystem::path& path);

/// Same pairing scheme as build_local_pairs but over variants produced
/// earlier, keyed back to their originals.
PairBuildResult pairs_from_variants(const std::vector<corpus::CodeObject>& corpus,
                                    const std::vector<VariantRecord>& variants,
                                    std::uint64_t rng_seed);

/// Global pairs from multi-solution problems: per problem one equivalent
/// pair of distinct correct solutions and up to cap (correct, incorrect)
/// pairs, all distance=global.
PairBuildResult build_global_pairs(const std::vector<corpus::CodeObject>& contest,
                                   std::uint64_t rng_seed,
                                   const GlobalPairOptions& opts = {});

/// Runs one code object against its own suite; true = passed. nullopt marks
/// an environment failure (the flag is then left absent, never guessed).
using ExecPassFn = std::function<std::optional<bool>(const corpus::CodeObject&)>;

/// Sets tests_distinguish on every pair whose two sides both carry tests:
/// true iff exactly one side passes the shared suite.
std::vector<EvalPair> flag_distinguishing_tests(std::vector<EvalPair> pairs,
                                                const ExecPassFn& exec_passes);

void write_pairs(const std::filesystem::path& path, const std::vector<EvalPair>& pairs,
                 const json& meta = json::object());
std::vector<EvalPair> read_pairs(const std::filesystem::path& path);

}  // namespace cateval::pairgen
