#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cateval/harness.hpp"
#include "cateval/pairgen.hpp"

namespace cateval::metrics {

/// tp/fn count over ground-truth equivalent pairs, tn/fp over ground-truth
/// nonequivalent pairs.
struct ConfusionCounts {
  long tp = 0;
  long fn = 0;
  long tn = 0;
  long fp = 0;

  long eq_total() const { return tp + fn; }
  long neq_total() const { return tn + fp; }
};

/// TP/(TP+FN); absent (never 0) when no equivalent pairs were scored.
std::optional<double> precision_eq(const ConfusionCounts& c);
/// TN/(TN+FP); absent when no nonequivalent pairs were scored.
std::optional<double> precision_neq(const ConfusionCounts& c);

/// (#pass)/(#outcomes); extraction failures count in the denominator.
/// Absent on empty input.
std::optional<double> pass_at_1(const std::vector<harness::ExecutionOutcome>& outcomes);

/// Confusion counting of verdicts against pair ground truth. Verdicts align
/// with pairs positionally (one verdict per pair, the task ids embed the
/// pair index). Unparseable verdicts score as wrong and are tallied apart.
struct ScoreSlices {
  ConfusionCounts overall;
  long unparseable = 0;
  /// slice key: "<dataset>|<distance>-<eq|neq>", e.g. "HumanEvalX|1-eq"
  std::map<std::string, ConfusionCounts> by_slice;
  /// per morphism-kind combination, e.g. "BE-VR" (local pairs only)
  std::map<std::string, ConfusionCounts> by_kinds;
};

ScoreSlices score_verdicts(const std::vector<harness::Verdict>& verdicts,
                           const std::vector<pairgen::EvalPair>& pairs);

struct BreakdownRow {
  std::string key;
  double precision = 0.0;  // percentage 0..100
  long total = 0;
};

/// Average precision per morphism-kind combination, worst first.
std::vector<BreakdownRow> breakdown_by_morphism(
    const std::vector<harness::Verdict>& verdicts,
    const std::vector<pairgen::EvalPair>& pairs);

/// failure_type -> count, sorted by descending count then label.
std::vector<std::pair<std::string, long>> failure_frequencies(
    const std::vector<harness::ExecutionOutcome>& outcomes);

struct MetricsReport {
  std::string run_id;
  std::string model_id;
  std::string template_id;
  std::uint64_t seed = 0;
  std::string config_digest;
  json body = json::object();  // slices, ratios with denominators, tables

  json to_json() const;
  static MetricsReport from_json(const json& rec);
};

/// Flat comma-separated view of a report, one metric per row.
std::string report_to_csv(const MetricsReport& report);

void write_report(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_report(const std::filesystem::path& path);

}  // namespace cateval::metrics
