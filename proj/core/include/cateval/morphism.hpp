#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/java_tree.hpp"

namespace cateval::morphism {

/// The rewrite catalog: identity, seven behavior-preserving kinds, and two
/// that deliberately change the program's function.
enum class Kind {
  Identity,
  VariableRenaming,   // VR
  BooleanExchange,    // BE
  LoopExchange,       // LE
  SwitchToIf,         // SI
  UnusedStatement,    // US
  ReorderCondition,   // RC
  PermuteStatement,   // PS
  ModifyCondition,    // MC
  RemoveElse,         // RE
};

enum class Equivalence { self, nonequivalent };

Equivalence equivalence_of(Kind kind);
std::string_view abbrev(Kind kind);   // "ID", "VR", ...
std::string_view name(Kind kind);
std::optional<Kind> kind_from_string(const std::string& text);  // name or abbrev

const std::vector<Kind>& self_kinds();           // the seven, Identity excluded
const std::vector<Kind>& nonequivalent_kinds();  // MC, RE
const std::vector<Kind>& all_kinds();

/// A concrete place where a kind applies. descriptor is unique among all
/// sites of the same kind for one source; source_digest ties the site to the
/// exact source text it was enumerated from.
struct Site {
  Kind kind = Kind::Identity;
  java::Span node_span;
  std::string descriptor;
  std::string source_digest;
};

struct Applied {
  Kind kind = Kind::Identity;
  Site site;
  std::uint64_t seed = 0;
  std::string before;  // source digest
  std::string after;
};

struct Chain {
  std::vector<Applied> steps;

  int distance() const;       // number of non-identity steps
  bool equivalent() const;    // false iff any step kind is nonequivalent
  std::string label() const;  // "equivalent" | "nonequivalent"
  /// Slice key: sorted kind abbreviations joined with '-', e.g. "BE-VR".
  std::string kinds_key() const;
  json to_json() const;
  static Chain from_json(const json& rec);
};

struct RenameOptions {
  enum class Scheme { VarN, Pool };
  Scheme scheme = Scheme::VarN;
  std::vector<std::string> pool;  // used by Scheme::Pool
};

struct Options {
  RenameOptions rename;
};

/// All sites where `kind` applies, ordered by source position then
/// descriptor. Throws ParseError for invalid source and ConfigError for
/// languages without a rewrite engine.
std::vector<Site> enumerate_sites(std::string_view source, const std::string& language,
                                  Kind kind, const Options& opts = {});

/// Rewrites the site. Throws StaleSite when the source digest differs from
/// the one the site was enumerated on and RewriteFailure when the rewritten
/// text no longer parses.
std::pair<std::string, Applied> apply(std::string_view source, const Site& site,
                                      std::uint64_t seed, const Options& opts = {});

/// Applies kinds left to right, choosing each site by seeded sampling.
/// Throws InapplicableKind when a kind has no site at its turn.
std::pair<std::string, Chain> apply_chain(std::string_view source,
                                          const std::string& language,
                                          const std::vector<Kind>& kinds,
                                          std::uint64_t rng_seed,
                                          const Options& opts = {});

struct SampledVariant {
  corpus::CodeObject object;  // same metadata, rewritten source
  Chain chain;
};

struct SampleResult {
  std::vector<SampledVariant> equivalent;
  std::vector<SampledVariant> nonequivalent;
  std::vector<std::string> notes;  // shortfalls and skipped sites
};

/// Samples `want_eq` distinct self-morphism kinds applicable to the object
/// (one output each) and `want_neq` nonequivalent outputs. Deterministic in
/// (object task_id, rng_seed); fewer outputs with a note when fewer kinds
/// apply.
SampleResult sample_morphism_outputs(const corpus::CodeObject& obj, int want_eq,
                                     int want_neq, std::uint64_t rng_seed,
                                     const Options& opts = {});

}  // namespace cateval::morphism
