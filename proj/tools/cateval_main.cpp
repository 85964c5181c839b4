// Command-line front end for the evaluation toolkit: each subcommand is one
// pipeline stage over newline-delimited record files, plus `pipeline` to run
// a whole configuration and `doctor` to check the environment.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include <CLI11.hpp>

#include "cateval/corpus.hpp"
#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "cateval/harness.hpp"
#include "cateval/lang.hpp"
#include "cateval/metrics.hpp"
#include "cateval/modelgw.hpp"
#include "cateval/morphism.hpp"
#include "cateval/pairgen.hpp"
#include "cateval/pipeline.hpp"
#include "cateval/rng.hpp"
#include "cateval/taskgen.hpp"
#include "cateval/toolchain.hpp"

using namespace cateval;

namespace {

std::vector<morphism::Kind> parse_kinds(const std::string& csv) {
  std::vector<morphism::Kind> kinds;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!item.empty()) {
      auto kind = morphism::kind_from_string(item);
      if (!kind) throw ConfigError("unknown morphism kind: " + item);
      kinds.push_back(*kind);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (kinds.empty()) throw ConfigError("no morphism kinds given");
  return kinds;
}

json run_meta(const std::string& stage, std::uint64_t seed, const std::string& extra = "") {
  json meta{{"stage", stage}, {"seed", seed}};
  if (!extra.empty()) meta["config_digest"] = digest_hex(extra);
  return meta;
}

int cmd_ingest(const std::string& dataset, const std::string& path,
               const std::string& language, const std::string& split,
               const std::string& out, bool no_compile_check, int max_length,
               const std::string& fields_file) {
  corpus::DatasetDescriptor desc;
  desc.name = corpus::dataset_from_string(dataset);
  desc.split = split;
  desc.language = language;

  corpus::FieldMap fields = corpus::default_field_map(desc.name);
  if (!fields_file.empty()) {
    auto raw = read_jsonl(fields_file);
    if (!raw.records.empty())
      fields = corpus::field_map_from_json(raw.records.front(), desc.name);
  }

  auto loaded = corpus::load_dataset(desc, path, fields);
  std::vector<corpus::CodeObject> stripped;
  for (const auto& obj : loaded.objects) stripped.push_back(corpus::strip_comments(obj));

  corpus::FilterRules rules = corpus::default_rules(desc.name);
  if (no_compile_check) rules.check_compile = false;
  if (max_length > 0) rules.max_source_length = static_cast<std::size_t>(max_length);

  auto filtered = corpus::filter_corpus(stripped, rules);
  corpus::write_corpus(out, filtered.objects, run_meta("ingest", 0, dataset + path));

  std::vector<json> rejects;
  for (const auto& e : loaded.errors)
    rejects.push_back(json{{"line", e.line_no}, {"reason", e.message}});
  for (const auto& r : filtered.rejected)
    rejects.push_back(json{{"task_id", r.task_id}, {"reason", r.reason}});
  write_jsonl(out + ".rejects.jsonl", rejects);

  std::cout << "ingest: " << loaded.objects.size() << " raw -> " << filtered.objects.size()
            << " kept (" << filtered.rejected.size() << " rejected, "
            << loaded.errors.size() << " malformed records)\n";
  return 0;
}

int cmd_morph(const std::string& in, const std::string& kinds_csv, std::uint64_t seed,
              const std::string& out, bool list_sites, int sample_eq, int sample_neq) {
  auto objects = corpus::read_corpus(in);

  if (list_sites) {
    std::vector<morphism::Kind> kinds = kinds_csv.empty()
                                            ? morphism::all_kinds()
                                            : parse_kinds(kinds_csv);
    for (const auto& obj : objects) {
      for (morphism::Kind kind : kinds) {
        try {
          for (const auto& site : morphism::enumerate_sites(obj.source, obj.language, kind))
            std::cout << obj.task_id << "\t" << morphism::name(kind) << "\t"
                      << site.descriptor << "\t[" << site.node_span.begin << ","
                      << site.node_span.end << ")\n";
        } catch (const std::exception& e) {
          std::cout << obj.task_id << "\t" << morphism::name(kind) << "\terror\t"
                    << e.what() << "\n";
        }
      }
    }
    return 0;
  }

  std::vector<pairgen::VariantRecord> variants;
  std::vector<json> notes;

  if (sample_eq > 0 || sample_neq > 0) {
    for (const auto& obj : objects) {
      auto sampled = morphism::sample_morphism_outputs(obj, sample_eq, sample_neq, seed);
      for (const auto& note : sampled.notes) notes.push_back(json{{"note", note}});
      for (const auto& v : sampled.equivalent)
        variants.push_back({obj.task_id, v.object, v.chain});
      for (const auto& v : sampled.nonequivalent)
        variants.push_back({obj.task_id, v.object, v.chain});
    }
  } else {
    std::vector<morphism::Kind> kinds = parse_kinds(kinds_csv);
    for (const auto& obj : objects) {
      Rng rng = Rng::derive(seed, fnv1a64(obj.task_id));
      try {
        auto [text, chain] = morphism::apply_chain(obj.source, obj.language, kinds,
                                                   rng.next());
        corpus::CodeObject variant = obj;
        variant.task_id = obj.task_id + "#" + chain.kinds_key();
        variant.source = text;
        variants.push_back({obj.task_id, std::move(variant), std::move(chain)});
      } catch (const std::exception& e) {
        notes.push_back(json{{"task_id", obj.task_id}, {"skipped", e.what()}});
      }
    }
  }

  pairgen::write_variants(out, variants, run_meta("morph", seed, kinds_csv));
  if (!notes.empty()) write_jsonl(out + ".log.jsonl", notes);
  std::cout << "morph: " << variants.size() << " variants from " << objects.size()
            << " objects (" << notes.size() << " notes)\n";
  return 0;
}

int cmd_pairs(const std::string& corpus_path, const std::string& variants_path,
              const std::string& contest_path, std::uint64_t seed, const std::string& out,
              int neq_cap, bool flag_tests) {
  std::vector<pairgen::EvalPair> pairs;
  std::vector<std::string> log;

  if (!corpus_path.empty()) {
    auto objects = corpus::read_corpus(corpus_path);
    pairgen::PairBuildResult built;
    if (!variants_path.empty()) {
      auto variants = pairgen::read_variants(variants_path);
      built = pairgen::pairs_from_variants(objects, variants, seed);
    } else {
      built = pairgen::build_local_pairs(objects, seed);
    }
    for (auto& p : built.pairs) pairs.push_back(std::move(p));
    log.insert(log.end(), built.log.begin(), built.log.end());
  }

  if (!contest_path.empty()) {
    auto contest = corpus::read_corpus(contest_path);
    pairgen::GlobalPairOptions opts;
    opts.neq_cap_per_problem = neq_cap;
    auto built = pairgen::build_global_pairs(contest, seed, opts);
    for (auto& p : built.pairs) {
      p.dataset = "CodeContest";
      pairs.push_back(std::move(p));
    }
    log.insert(log.end(), built.log.begin(), built.log.end());
  }

  if (flag_tests) {
    harness::Limits limits;
    pairs = pairgen::flag_distinguishing_tests(
        std::move(pairs),
        [&](const corpus::CodeObject& obj) {
          return harness::object_passes_own_suite(obj, limits);
        });
  }

  pairgen::write_pairs(out, pairs, run_meta("pairs", seed, corpus_path + contest_path));
  std::vector<json> log_records;
  for (const auto& line : log) log_records.push_back(json{{"note", line}});
  if (!log_records.empty()) write_jsonl(out + ".log.jsonl", log_records);
  std::cout << "pairs: " << pairs.size() << " pairs (" << log.size() << " notes)\n";
  return 0;
}

int cmd_tasks(const std::string& kind_name, const std::string& corpus_path,
              const std::string& pairs_path, const std::string& explanations_path,
              const std::string& src, const std::string& dst,
              const std::string& template_id, const std::string& prompts_path,
              const std::string& out) {
  std::vector<taskgen::PromptTemplate> templates = taskgen::builtin_templates();
  if (!prompts_path.empty()) {
    auto extra = taskgen::load_prompt_file(prompts_path);
    templates.insert(templates.end(), extra.begin(), extra.end());
  }
  taskgen::TaskKind kind = taskgen::task_kind_from_string(kind_name);
  taskgen::PromptTemplate tpl = [&]() {
    if (!template_id.empty()) return taskgen::find_template(templates, template_id);
    for (const auto& t : templates)
      if (t.task_kind == kind) return t;
    throw ConfigError("no template for task kind " + kind_name);
  }();

  std::vector<taskgen::TaskInstance> tasks;
  switch (kind) {
    case taskgen::TaskKind::MorphismIdentification: {
      if (pairs_path.empty()) throw ConfigError("identification tasks need --pairs");
      tasks = taskgen::build_identification_tasks(pairgen::read_pairs(pairs_path), tpl);
      break;
    }
    case taskgen::TaskKind::Translation: {
      if (corpus_path.empty()) throw ConfigError("translation tasks need --corpus");
      tasks = taskgen::build_translation_tasks(corpus::read_corpus(corpus_path), src, dst,
                                               tpl);
      break;
    }
    case taskgen::TaskKind::Explanation: {
      if (corpus_path.empty()) throw ConfigError("explanation tasks need --corpus");
      tasks = taskgen::build_explanation_tasks(corpus::read_corpus(corpus_path), tpl);
      break;
    }
    case taskgen::TaskKind::Reproduction: {
      if (explanations_path.empty())
        throw ConfigError("reproduction tasks need --explanations (a responses file)");
      std::vector<taskgen::ExplanationText> explanations;
      for (const auto& resp : modelgw::read_responses(explanations_path)) {
        if (resp.status != modelgw::ResponseStatus::ok) continue;
        // responses reference explain:<task_id>
        std::string id = resp.task_id;
        if (id.rfind("explain:", 0) == 0) id = id.substr(8);
        explanations.push_back({id, resp.raw_text});
      }
      auto build = taskgen::build_reproduction_tasks(explanations, dst, tpl);
      for (const auto& skipped : build.skipped)
        std::cerr << "skipped (empty explanation): " << skipped << "\n";
      tasks = std::move(build.tasks);
      break;
    }
  }

  taskgen::write_tasks(out, tasks, run_meta("tasks", 0, kind_name + template_id));
  std::cout << "tasks: " << tasks.size() << " instances (" << tpl.id << ")\n";
  return 0;
}

int cmd_run(const std::string& tasks_path, const std::string& model_id,
            const std::string& adapter_name, const std::string& endpoint,
            const std::string& model_name, int parallel, const std::string& out,
            const std::string& journal, const std::string& oracle_corpus_path,
            int max_tokens) {
  auto tasks = taskgen::read_tasks(tasks_path);

  modelgw::ModelSpec spec;
  spec.id = model_id;
  spec.adapter = modelgw::adapter_from_string(adapter_name);
  spec.endpoint = endpoint;
  spec.model_name = model_name.empty() ? model_id : model_name;
  if (modelgw::is_stub(spec.adapter)) spec.model_name.clear();
  if (modelgw::is_stub(spec.adapter)) spec.endpoint.clear();
  spec.parallelism = parallel;
  spec.max_tokens = max_tokens;

  modelgw::DispatchOptions opts;
  if (!journal.empty()) opts.journal = journal;
  std::vector<corpus::CodeObject> oracle_corpus;
  if (!oracle_corpus_path.empty()) {
    oracle_corpus = corpus::read_corpus(oracle_corpus_path);
    opts.oracle_corpus = &oracle_corpus;
  }
  harness::Limits limits;
  opts.exec_passes = [&](const corpus::CodeObject& obj) {
    return harness::object_passes_own_suite(obj, limits);
  };

  auto responses = modelgw::dispatch(tasks, spec, opts);
  modelgw::write_responses(out, responses, run_meta("run", 0, model_id + adapter_name));

  long ok = 0;
  for (const auto& r : responses)
    if (r.status == modelgw::ResponseStatus::ok) ++ok;
  std::cout << "run: " << responses.size() << " responses, " << ok << " ok\n";
  return 0;
}

int cmd_exec(const std::string& candidates_path, const std::string& tasks_path,
             const std::string& corpus_path, const std::string& language,
             const std::string& limits_spec, const std::string& out) {
  auto responses = modelgw::read_responses(candidates_path);
  auto suite_corpus = corpus::read_corpus(corpus_path);
  std::vector<taskgen::TaskInstance> tasks;
  if (!tasks_path.empty()) tasks = taskgen::read_tasks(tasks_path);

  harness::Limits limits;
  if (!limits_spec.empty() && limits_spec != "default") {
    // "compile_s,run_s,memory_mb"
    int c = 0, r = 0, m = 0;
    if (std::sscanf(limits_spec.c_str(), "%d,%d,%d", &c, &r, &m) == 3) {
      limits.compile_timeout_s = c;
      limits.run_timeout_s = r;
      limits.memory_mb = static_cast<std::uint64_t>(m);
    } else {
      throw ConfigError("bad --limits (want default or compile_s,run_s,memory_mb)");
    }
  }

  std::unordered_map<std::string, const corpus::CodeObject*> suites;
  for (const auto& obj : suite_corpus)
    suites.emplace(pipeline::problem_key(obj.task_id), &obj);

  auto source_ref = [&](const modelgw::ModelResponse& resp) -> std::string {
    for (const auto& t : tasks)
      if (t.id == resp.task_id && t.payload.contains("task_id"))
        return t.payload["task_id"].get<std::string>();
    // fall back to the trailing segment of the response task id
    auto colon = resp.task_id.rfind(':');
    return colon == std::string::npos ? resp.task_id : resp.task_id.substr(colon + 1);
  };

  std::vector<harness::ExecutionOutcome> outcomes;
  for (const auto& resp : responses) {
    auto it = suites.find(pipeline::problem_key(source_ref(resp)));
    if (it == suites.end() || !it->second->tests.present) continue;
    harness::ExecutionOutcome outcome;
    outcome.task_id = resp.task_id;
    if (resp.status != modelgw::ResponseStatus::ok) {
      outcome.status = harness::ExecStatus::extraction_failure;
      outcome.failure_type = "NoResponse";
      outcomes.push_back(outcome);
      continue;
    }
    auto code = harness::extract_code_block(resp.raw_text, language);
    if (!code) {
      outcome.status = harness::ExecStatus::extraction_failure;
      outcome.failure_type = "ExtractionFailure";
      outcomes.push_back(outcome);
      continue;
    }
    outcomes.push_back(harness::run_execution_test(resp.task_id, *code,
                                                   it->second->tests, language, limits));
    outcomes.back().task_id = resp.task_id;
  }

  harness::write_outcomes(out, outcomes, run_meta("exec", 0, candidates_path));
  long pass = 0;
  for (const auto& o : outcomes)
    if (o.status == harness::ExecStatus::pass) ++pass;
  std::cout << "exec: " << outcomes.size() << " executed, " << pass << " pass\n";
  return 0;
}

int cmd_score(const std::string& pairs_path, const std::string& verdicts_path,
              const std::string& responses_path, const std::string& outcomes_path,
              const std::string& out) {
  metrics::MetricsReport report;
  report.run_id = "cli";

  if (!outcomes_path.empty()) {
    auto outcomes = harness::read_outcomes(outcomes_path);
    json failures = json::array();
    for (const auto& [label, count] : metrics::failure_frequencies(outcomes))
      failures.push_back(json{{"type", label}, {"count", count}});
    long extraction = 0;
    for (const auto& o : outcomes)
      if (o.status == harness::ExecStatus::extraction_failure) ++extraction;
    auto p = metrics::pass_at_1(outcomes);
    json entry{{"denominator", outcomes.size()}};
    entry["value"] = p ? json(*p) : json(nullptr);
    report.body = json{{"task", "execution"},
                       {"pass_at_1", entry},
                       {"extraction_failures", extraction},
                       {"failure_types", failures}};
  } else {
    if (pairs_path.empty()) throw ConfigError("score needs --outcomes or --pairs");
    auto pairs = pairgen::read_pairs(pairs_path);
    std::vector<harness::Verdict> verdicts;
    if (!verdicts_path.empty()) {
      auto raw = read_jsonl(verdicts_path);
      for (const auto& rec : raw.records) {
        if (rec.contains("_meta")) continue;
        verdicts.push_back(harness::verdict_from_json(rec));
      }
    } else if (!responses_path.empty()) {
      for (const auto& resp : modelgw::read_responses(responses_path)) {
        if (resp.status != modelgw::ResponseStatus::ok) {
          harness::Verdict v;
          v.task_id = resp.task_id;
          verdicts.push_back(v);
          continue;
        }
        verdicts.push_back(harness::extract_boolean_verdict(resp));
      }
    } else {
      throw ConfigError("score needs --verdicts or --responses with --pairs");
    }

    auto slices = metrics::score_verdicts(verdicts, pairs);
    auto ratio = [](std::optional<double> v, long denom) {
      json entry{{"denominator", denom}};
      entry["value"] = v ? json(*v) : json(nullptr);
      return entry;
    };
    json slices_json = json::object();
    for (const auto& [key, counts] : slices.by_slice) {
      bool eq_slice = key.size() >= 3 && key.compare(key.size() - 3, 3, "-eq") == 0;
      slices_json[key] =
          ratio(eq_slice ? metrics::precision_eq(counts) : metrics::precision_neq(counts),
                eq_slice ? counts.eq_total() : counts.neq_total());
    }
    report.body = json{
        {"task", "identification"},
        {"counts",
         {{"tp", slices.overall.tp},
          {"fn", slices.overall.fn},
          {"tn", slices.overall.tn},
          {"fp", slices.overall.fp}}},
        {"precision_eq",
         ratio(metrics::precision_eq(slices.overall), slices.overall.eq_total())},
        {"precision_neq",
         ratio(metrics::precision_neq(slices.overall), slices.overall.neq_total())},
        {"unparseable", slices.unparseable},
        {"slices", slices_json}};
  }

  metrics::write_report(out, report);
  std::cout << "score: wrote " << out << "\n";
  return 0;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out) {
  auto report = metrics::read_report(in);
  std::string text;
  if (format == "csv") text = metrics::report_to_csv(report);
  else if (format == "json") text = report.to_json().dump(2) + "\n";
  else throw ConfigError("unknown format: " + format);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    f << text;
  }
  return 0;
}

int cmd_doctor(const std::string& require_csv) {
  auto infos = toolchain::probe_all();
  bool all_ok = true;
  for (const auto& info : infos) {
    std::cout << info.language << ": "
              << (info.available ? "ok (" + info.version + ")" : "MISSING (" + info.tool + ")")
              << "\n";
  }
  if (!require_csv.empty()) {
    std::size_t pos = 0;
    while (pos <= require_csv.size()) {
      std::size_t comma = require_csv.find(',', pos);
      std::string item =
          require_csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (!item.empty()) {
        auto tag = lang::normalize(item);
        if (!tag || !toolchain::available(*tag)) {
          std::cout << "required toolchain missing: " << item << "\n";
          all_ok = false;
        }
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return all_ok ? 0 : pipeline::kExitDoctor;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"category-based code evaluation toolkit"};
  app.require_subcommand(1);

  // ingest
  std::string in_dataset, in_path, in_language = "java", in_split = "test", in_out;
  std::string in_fields;
  bool in_no_compile = false;
  int in_max_length = 0;
  auto* ingest = app.add_subcommand("ingest", "load, normalize and filter a dataset");
  ingest->add_option("--dataset", in_dataset)->required();
  ingest->add_option("--path", in_path)->required();
  ingest->add_option("--language", in_language);
  ingest->add_option("--split", in_split);
  ingest->add_option("--out", in_out)->required();
  ingest->add_option("--fields", in_fields, "json file overriding record field names");
  ingest->add_flag("--no-compile-check", in_no_compile);
  ingest->add_option("--max-length", in_max_length, "max source chars (0 = dataset default)");

  // morph
  std::string mo_in, mo_kinds, mo_out;
  std::uint64_t mo_seed = 0;
  bool mo_list = false;
  int mo_eq = 0, mo_neq = 0;
  auto* morph = app.add_subcommand("morph", "apply rewrite chains to a corpus");
  morph->add_option("--in", mo_in)->required();
  morph->add_option("--kinds", mo_kinds, "comma list, e.g. VR,US");
  morph->add_option("--seed", mo_seed);
  morph->add_option("--out", mo_out);
  morph->add_flag("--list-sites", mo_list, "dump the site inventory instead of rewriting");
  morph->add_option("--sample-eq", mo_eq, "sample N equivalent outputs per object");
  morph->add_option("--sample-neq", mo_neq, "sample N nonequivalent outputs per object");

  // pairs
  std::string pa_corpus, pa_variants, pa_contest, pa_out;
  std::uint64_t pa_seed = 0;
  int pa_neq_cap = 4;
  bool pa_flag = false;
  auto* pairs = app.add_subcommand("pairs", "build labeled evaluation pairs");
  pairs->add_option("--corpus", pa_corpus);
  pairs->add_option("--variants", pa_variants);
  pairs->add_option("--contest", pa_contest);
  pairs->add_option("--seed", pa_seed);
  pairs->add_option("--out", pa_out)->required();
  pairs->add_option("--neq-cap", pa_neq_cap, "max nonequivalent global pairs per problem");
  pairs->add_flag("--flag-distinguishing", pa_flag,
                  "run both sides of testable pairs and record whether tests distinguish");

  // tasks
  std::string ta_kind, ta_corpus, ta_pairs, ta_expl, ta_src = "java", ta_dst = "python";
  std::string ta_template, ta_prompts, ta_out;
  auto* tasks = app.add_subcommand("tasks", "render model inputs");
  tasks->add_option("--kind", ta_kind)->required();
  tasks->add_option("--corpus", ta_corpus);
  tasks->add_option("--pairs", ta_pairs);
  tasks->add_option("--explanations", ta_expl, "responses file from the explain phase");
  tasks->add_option("--src", ta_src);
  tasks->add_option("--dst", ta_dst);
  tasks->add_option("--template", ta_template);
  tasks->add_option("--prompts", ta_prompts, "prompt template file");
  tasks->add_option("--out", ta_out)->required();

  // run
  std::string ru_tasks, ru_model = "stub", ru_adapter = "stub_constant_true";
  std::string ru_endpoint, ru_model_name, ru_out, ru_journal, ru_oracle;
  int ru_parallel = 4, ru_max_tokens = 500;
  auto* run = app.add_subcommand("run", "dispatch tasks to a model");
  run->add_option("--tasks", ru_tasks)->required();
  run->add_option("--model", ru_model);
  run->add_option("--adapter", ru_adapter,
                  "chat_http|completion_http|stub_identity|stub_constant_true|stub_execution_oracle");
  run->add_option("--endpoint", ru_endpoint);
  run->add_option("--model-name", ru_model_name);
  run->add_option("--parallel", ru_parallel);
  run->add_option("--max-tokens", ru_max_tokens);
  run->add_option("--out", ru_out)->required();
  run->add_option("--journal", ru_journal, "append-only response journal for resume");
  run->add_option("--oracle-corpus", ru_oracle,
                  "target-language canonical corpus for the execution oracle");

  // exec
  std::string ex_candidates, ex_tasks, ex_corpus, ex_language = "python";
  std::string ex_limits = "default", ex_out;
  auto* exec = app.add_subcommand("exec", "run extracted candidates against suites");
  exec->add_option("--candidates", ex_candidates, "responses file")->required();
  exec->add_option("--tasks", ex_tasks, "task file for source references");
  exec->add_option("--corpus", ex_corpus, "corpus providing the test suites")->required();
  exec->add_option("--language", ex_language);
  exec->add_option("--limits", ex_limits, "default or compile_s,run_s,memory_mb");
  exec->add_option("--out", ex_out)->required();

  // score
  std::string sc_pairs, sc_verdicts, sc_responses, sc_outcomes, sc_out;
  auto* score = app.add_subcommand("score", "aggregate verdicts or outcomes into a report");
  score->add_option("--pairs", sc_pairs);
  score->add_option("--verdicts", sc_verdicts);
  score->add_option("--responses", sc_responses);
  score->add_option("--outcomes", sc_outcomes);
  score->add_option("--out", sc_out)->required();

  // report
  std::string re_in, re_format = "csv", re_out;
  auto* report = app.add_subcommand("report", "format a report");
  report->add_option("--in", re_in)->required();
  report->add_option("--format", re_format, "csv|json");
  report->add_option("--out", re_out);

  // doctor
  std::string doc_require;
  auto* doctor = app.add_subcommand("doctor", "check language toolchains");
  doctor->add_option("--require", doc_require, "comma list of required languages");

  // pipeline
  std::string pi_config;
  auto* pipe = app.add_subcommand("pipeline", "run a full configuration");
  pipe->add_option("--config", pi_config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest)
      return cmd_ingest(in_dataset, in_path, in_language, in_split, in_out, in_no_compile,
                        in_max_length, in_fields);
    if (*morph) {
      if (!mo_list && mo_out.empty())
        throw ConfigError("morph needs --out unless --list-sites");
      return cmd_morph(mo_in, mo_kinds, mo_seed, mo_out, mo_list, mo_eq, mo_neq);
    }
    if (*pairs)
      return cmd_pairs(pa_corpus, pa_variants, pa_contest, pa_seed, pa_out, pa_neq_cap,
                       pa_flag);
    if (*tasks)
      return cmd_tasks(ta_kind, ta_corpus, ta_pairs, ta_expl, ta_src, ta_dst, ta_template,
                       ta_prompts, ta_out);
    if (*run)
      return cmd_run(ru_tasks, ru_model, ru_adapter, ru_endpoint, ru_model_name,
                     ru_parallel, ru_out, ru_journal, ru_oracle, ru_max_tokens);
    if (*exec)
      return cmd_exec(ex_candidates, ex_tasks, ex_corpus, ex_language, ex_limits, ex_out);
    if (*score) return cmd_score(sc_pairs, sc_verdicts, sc_responses, sc_outcomes, sc_out);
    if (*report) return cmd_report(re_in, re_format, re_out);
    if (*doctor) return cmd_doctor(doc_require);
    if (*pipe) {
      auto config = pipeline::RunConfig::load(pi_config);
      auto result = pipeline::run_pipeline(config);
      std::cout << result.to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const pipeline::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return pipeline::kExitConfig;
  } catch (const EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return pipeline::kExitDoctor;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
