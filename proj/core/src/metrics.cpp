#include "cateval/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cateval/errors.hpp"

namespace cateval::metrics {

std::optional<double> precision_eq(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> precision_neq(const ConfusionCounts& c) {
  if (c.tn + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

std::optional<double> pass_at_1(const std::vector<harness::ExecutionOutcome>& outcomes) {
  if (outcomes.empty()) return std::nullopt;
  long passes = 0;
  for (const auto& o : outcomes)
    if (o.status == harness::ExecStatus::pass) ++passes;
  return static_cast<double>(passes) / static_cast<double>(outcomes.size());
}

ScoreSlices score_verdicts(const std::vector<harness::Verdict>& verdicts,
                           const std::vector<pairgen::EvalPair>& pairs) {
  if (verdicts.size() != pairs.size())
    throw ConfigError("score_verdicts: " + std::to_string(verdicts.size()) +
                      " verdicts vs " + std::to_string(pairs.size()) + " pairs");

  ScoreSlices slices;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    const auto& verdict = verdicts[i];
    bool truth_eq = pair.label == pairgen::PairLabel::equivalent;
    bool said_eq = verdict.parsed == harness::ParsedVerdict::equivalent;
    if (verdict.parsed == harness::ParsedVerdict::unparseable) {
      ++slices.unparseable;
      said_eq = !truth_eq;  // scored as wrong, counted separately
    }

    auto tally = [&](ConfusionCounts& c) {
      if (truth_eq) {
        if (said_eq) ++c.tp;
        else ++c.fn;
      } else {
        if (!said_eq) ++c.tn;
        else ++c.fp;
      }
    };

    tally(slices.overall);
    std::string slice_key = pair.dataset + "|" + pairgen::to_string(pair.distance) + "-" +
                            (truth_eq ? "eq" : "neq");
    tally(slices.by_slice[slice_key]);
    if (pair.distance != pairgen::Distance::global && !pair.provenance.empty())
      tally(slices.by_kinds[pair.provenance]);
  }
  return slices;
}

std::vector<BreakdownRow> breakdown_by_morphism(
    const std::vector<harness::Verdict>& verdicts,
    const std::vector<pairgen::EvalPair>& pairs) {
  ScoreSlices slices = score_verdicts(verdicts, pairs);
  std::vector<BreakdownRow> rows;
  for (const auto& [key, counts] : slices.by_kinds) {
    BreakdownRow row;
    row.key = key;
    long correct = counts.tp + counts.tn;
    row.total = counts.eq_total() + counts.neq_total();
    row.precision = row.total == 0
                        ? 0.0
                        : 100.0 * static_cast<double>(correct) /
                              static_cast<double>(row.total);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const BreakdownRow& a, const BreakdownRow& b) {
    if (a.precision != b.precision) return a.precision < b.precision;
    return a.key < b.key;
  });
  return rows;
}

std::vector<std::pair<std::string, long>> failure_frequencies(
    const std::vector<harness::ExecutionOutcome>& outcomes) {
  std::map<std::string, long> counts;
  for (const auto& o : outcomes) {
    if (o.status == harness::ExecStatus::pass) continue;
    std::string label = o.failure_type.empty() ? "Unknown" : o.failure_type;
    ++counts[label];
  }
  std::vector<std::pair<std::string, long>> rows(counts.begin(), counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return rows;
}

json MetricsReport::to_json() const {
  return json{{"run_id", run_id},
              {"model_id", model_id},
              {"template_id", template_id},
              {"seed", seed},
              {"config_digest", config_digest},
              {"body", body}};
}

MetricsReport MetricsReport::from_json(const json& rec) {
  MetricsReport report;
  report.run_id = rec.value("run_id", "");
  report.model_id = rec.value("model_id", "");
  report.template_id = rec.value("template_id", "");
  report.seed = rec.value("seed", 0ull);
  report.config_digest = rec.value("config_digest", "");
  if (rec.contains("body")) report.body = rec["body"];
  return report;
}

namespace {

void flatten(const json& node, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items())
      flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten(node[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (node.is_number_float()) {
    std::ostringstream oss;
    oss.precision(6);
    oss << std::fixed << node.get<double>();
    rows.emplace_back(prefix, oss.str());
  } else if (node.is_string()) {
    rows.emplace_back(prefix, node.get<std::string>());
  } else {
    rows.emplace_back(prefix, node.dump());
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

std::string report_to_csv(const MetricsReport& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("run_id", report.run_id);
  rows.emplace_back("model_id", report.model_id);
  rows.emplace_back("template_id", report.template_id);
  rows.emplace_back("seed", std::to_string(report.seed));
  rows.emplace_back("config_digest", report.config_digest);
  flatten(report.body, "", rows);

  std::string out = "metric,value\n";
  for (const auto& [k, v] : rows) out += csv_escape(k) + "," + csv_escape(v) + "\n";
  return out;
}

void write_report(const std::filesystem::path& path, const MetricsReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw EnvironmentError("cannot write report " + path.string());
  out << report.to_json().dump(2) << "\n";
}

MetricsReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EnvironmentError("cannot read report " + path.string());
  json rec = json::parse(in, nullptr, false);
  if (rec.is_discarded()) throw ConfigError("malformed report json: " + path.string());
  return MetricsReport::from_json(rec);
}

}  // namespace cateval::metrics
