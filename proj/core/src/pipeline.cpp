#include "cateval/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "cateval/digest.hpp"
#include "cateval/errors.hpp"
#include "cateval/toolchain.hpp"

namespace fs = std::filesystem;

namespace cateval::pipeline {

namespace {

corpus::FilterRules filter_from_json(const json& rec, corpus::DatasetName name) {
  corpus::FilterRules rules = corpus::default_rules(name);
  if (!rec.is_object()) return rules;
  if (rec.contains("check_parse")) rules.check_parse = rec["check_parse"];
  if (rec.contains("check_single_function"))
    rules.check_single_function = rec["check_single_function"];
  if (rec.contains("check_compile")) rules.check_compile = rec["check_compile"];
  if (rec.contains("max_source_length"))
    rules.max_source_length = rec["max_source_length"].get<std::size_t>();
  if (rec.contains("compile_timeout_s")) rules.compile_timeout_s = rec["compile_timeout_s"];
  if (rec.contains("parallelism")) rules.parallelism = rec["parallelism"];
  return rules;
}

json filter_to_json(const corpus::FilterRules& rules) {
  json rec{{"check_parse", rules.check_parse},
           {"check_single_function", rules.check_single_function},
           {"check_compile", rules.check_compile},
           {"compile_timeout_s", rules.compile_timeout_s},
           {"parallelism", rules.parallelism}};
  if (rules.max_source_length) rec["max_source_length"] = *rules.max_source_length;
  return rec;
}

DatasetConfig dataset_from_json(const json& rec) {
  DatasetConfig ds;
  ds.descriptor.name = corpus::dataset_from_string(rec.at("name").get<std::string>());
  ds.descriptor.split = rec.value("split", "test");
  ds.descriptor.language = rec.value("language", "java");
  ds.path = rec.at("path").get<std::string>();
  ds.filter = filter_from_json(rec.contains("filter") ? rec["filter"] : json(),
                               ds.descriptor.name);
  ds.fields = corpus::field_map_from_json(
      rec.contains("fields") ? rec["fields"] : json::object(), ds.descriptor.name);
  return ds;
}

json dataset_to_json(const DatasetConfig& ds) {
  return json{{"name", corpus::to_string(ds.descriptor.name)},
              {"split", ds.descriptor.split},
              {"language", ds.descriptor.language},
              {"path", ds.path.string()},
              {"filter", filter_to_json(ds.filter)}};
}

}  // namespace

RunConfig RunConfig::from_json(const json& rec) {
  RunConfig config;
  config.run_id = rec.value("run_id", "run");
  config.seed = rec.value("seed", 0ull);
  config.out_dir = rec.value("out_dir", "runs/out");

  if (rec.contains("task")) {
    const auto& task = rec["task"];
    config.task = taskgen::task_kind_from_string(task.value("kind", "identification"));
    config.template_id = task.value("template", "");
    config.explain_template_id = task.value("explain_template", "");
    config.src_language = task.value("src", "java");
    config.dst_language = task.value("dst", config.src_language);
  }

  if (rec.contains("datasets"))
    for (const auto& d : rec["datasets"]) config.datasets.push_back(dataset_from_json(d));
  if (rec.contains("contest")) config.contest = dataset_from_json(rec["contest"]);
  if (rec.contains("target_corpus"))
    config.target_corpus = dataset_from_json(rec["target_corpus"]);

  if (rec.contains("pairs")) {
    const auto& p = rec["pairs"];
    config.local_pairs.eq_outputs_per_object = p.value("eq_outputs_per_object", 2);
    config.local_pairs.neq_outputs_per_object = p.value("neq_outputs_per_object", 1);
    config.local_pairs.emit_two_step_neq = p.value("emit_two_step_neq", false);
    config.global_pairs.neq_cap_per_problem = p.value("neq_cap_per_problem", 4);
    config.flag_distinguishing = p.value("flag_distinguishing", false);
  }
  if (rec.contains("rename_pool")) {
    config.local_pairs.morph.rename.scheme = morphism::RenameOptions::Scheme::Pool;
    config.local_pairs.morph.rename.pool =
        rec["rename_pool"].get<std::vector<std::string>>();
  }

  if (rec.contains("model")) config.model = modelgw::model_spec_from_json(rec["model"]);
  if (rec.contains("harness")) {
    const auto& h = rec["harness"];
    config.limits.compile_timeout_s = h.value("compile_timeout_s", 60);
    config.limits.run_timeout_s = h.value("run_timeout_s", 30);
    config.limits.memory_mb = h.value("memory_mb", 512ull);
    config.exec_parallelism = h.value("parallelism", 0);
  }
  if (rec.contains("prompts")) config.prompt_file = rec["prompts"].get<std::string>();
  return config;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json rec = json::parse(in, nullptr, false);
  if (rec.is_discarded()) throw ConfigError("malformed config json: " + path.string());
  return from_json(rec);
}

json RunConfig::to_json() const {
  json rec{{"run_id", run_id},
           {"seed", seed},
           {"out_dir", out_dir.string()},
           {"task",
            {{"kind", taskgen::to_string(task)},
             {"template", template_id},
             {"explain_template", explain_template_id},
             {"src", src_language},
             {"dst", dst_language}}},
           {"pairs",
            {{"eq_outputs_per_object", local_pairs.eq_outputs_per_object},
             {"neq_outputs_per_object", local_pairs.neq_outputs_per_object},
             {"emit_two_step_neq", local_pairs.emit_two_step_neq},
             {"neq_cap_per_problem", global_pairs.neq_cap_per_problem},
             {"flag_distinguishing", flag_distinguishing}}},
           {"model", modelgw::to_json(model)},
           {"harness",
            {{"compile_timeout_s", limits.compile_timeout_s},
             {"run_timeout_s", limits.run_timeout_s},
             {"memory_mb", limits.memory_mb},
             {"parallelism", exec_parallelism}}}};
  json ds = json::array();
  for (const auto& d : datasets) ds.push_back(dataset_to_json(d));
  rec["datasets"] = ds;
  if (contest) rec["contest"] = dataset_to_json(*contest);
  if (target_corpus) rec["target_corpus"] = dataset_to_json(*target_corpus);
  if (prompt_file) rec["prompts"] = prompt_file->string();
  return rec;
}

std::string RunConfig::digest() const { return digest_hex(to_json().dump()); }

std::string problem_key(const std::string& task_id) {
  auto slash = task_id.rfind('/');
  return slash == std::string::npos ? task_id : task_id.substr(slash + 1);
}

namespace {

json artifact_meta(const std::string& stage, const RunConfig& config) {
  return json{{"stage", stage}, {"config_digest", config.digest()}, {"seed", config.seed}};
}

bool artifact_current(const fs::path& path, const std::string& stage,
                      const RunConfig& config) {
  if (!fs::exists(path)) return false;
  auto raw = read_jsonl(path);
  if (raw.records.empty() || !raw.records.front().contains("_meta")) return false;
  const json& meta = raw.records.front()["_meta"];
  return meta.value("stage", "") == stage &&
         meta.value("config_digest", "") == config.digest();
}

struct NamedCorpus {
  std::string dataset;
  std::vector<corpus::CodeObject> objects;
};

/// ingest: load, strip comments, filter; one artifact per dataset plus a
/// combined corpus file and rejection log.
std::vector<NamedCorpus> stage_ingest(const RunConfig& config) {
  std::vector<NamedCorpus> out;
  fs::path artifact = config.out_dir / "corpus.jsonl";
  fs::path reject_log = config.out_dir / "corpus_rejects.jsonl";

  if (artifact_current(artifact, "ingest", config)) {
    auto raw = read_jsonl(artifact);
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& rec : raw.records) {
      if (rec.contains("_meta")) continue;
      std::string ds = rec.value("_dataset", "");
      auto it = index.find(ds);
      if (it == index.end()) {
        index.emplace(ds, out.size());
        out.push_back({ds, {}});
        it = index.find(ds);
      }
      out[it->second].objects.push_back(corpus::code_object_from_json(rec));
    }
    return out;
  }

  try {
    std::vector<json> reject_records;
    for (const auto& ds : config.datasets) {
      auto loaded = corpus::load_dataset(ds.descriptor, ds.path, ds.fields);
      for (const auto& e : loaded.errors)
        reject_records.push_back(json{{"dataset", corpus::to_string(ds.descriptor.name)},
                                      {"line", e.line_no},
                                      {"reason", e.message}});
      std::vector<corpus::CodeObject> stripped;
      stripped.reserve(loaded.objects.size());
      for (const auto& obj : loaded.objects) stripped.push_back(corpus::strip_comments(obj));
      auto filtered = corpus::filter_corpus(stripped, ds.filter);
      for (const auto& r : filtered.rejected)
        reject_records.push_back(json{{"dataset", corpus::to_string(ds.descriptor.name)},
                                      {"task_id", r.task_id},
                                      {"reason", r.reason}});
      out.push_back({corpus::to_string(ds.descriptor.name), std::move(filtered.objects)});
    }

    std::vector<json> records;
    records.push_back(json{{"_meta", artifact_meta("ingest", config)}});
    for (const auto& nc : out)
      for (const auto& obj : nc.objects) {
        json rec = corpus::to_json(obj);
        rec["_dataset"] = nc.dataset;
        records.push_back(rec);
      }
    write_jsonl(artifact, records);
    write_jsonl(reject_log, reject_records);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("ingest", kExitIngest, e.what());
  }
  return out;
}

std::vector<corpus::CodeObject> load_contest(const RunConfig& config) {
  if (!config.contest) return {};
  auto loaded = corpus::load_dataset(config.contest->descriptor, config.contest->path,
                                     config.contest->fields);
  auto filtered = corpus::filter_corpus(loaded.objects, config.contest->filter);
  return filtered.objects;
}

std::vector<pairgen::EvalPair> stage_pairs(const RunConfig& config,
                                           const std::vector<NamedCorpus>& corpora) {
  fs::path artifact = config.out_dir / "pairs.jsonl";
  if (artifact_current(artifact, "pairs", config)) return pairgen::read_pairs(artifact);

  try {
    std::vector<pairgen::EvalPair> pairs;
    std::vector<std::string> log;
    for (const auto& nc : corpora) {
      auto built = pairgen::build_local_pairs(nc.objects, config.seed, config.local_pairs);
      for (auto& pair : built.pairs) {
        pair.dataset = nc.dataset;
        pairs.push_back(std::move(pair));
      }
      log.insert(log.end(), built.log.begin(), built.log.end());
    }
    if (config.contest) {
      auto contest_objects = load_contest(config);
      auto built =
          pairgen::build_global_pairs(contest_objects, config.seed, config.global_pairs);
      for (auto& pair : built.pairs) {
        pair.dataset = corpus::to_string(config.contest->descriptor.name);
        pairs.push_back(std::move(pair));
      }
      log.insert(log.end(), built.log.begin(), built.log.end());
    }

    if (config.flag_distinguishing) {
      harness::Limits limits = config.limits;
      pairs = pairgen::flag_distinguishing_tests(
          std::move(pairs), [&](const corpus::CodeObject& obj) {
            return harness::object_passes_own_suite(obj, limits);
          });
    }

    pairgen::write_pairs(artifact, pairs, artifact_meta("pairs", config));
    std::vector<json> log_records;
    for (const auto& line : log) log_records.push_back(json{{"note", line}});
    write_jsonl(config.out_dir / "pairs_log.jsonl", log_records);
    return pairs;
  } catch (const std::exception& e) {
    throw StageError("pairs", kExitPairs, e.what());
  }
}

taskgen::PromptTemplate template_for(const RunConfig& config, taskgen::TaskKind kind,
                                     const std::string& requested) {
  std::vector<taskgen::PromptTemplate> templates = taskgen::builtin_templates();
  if (config.prompt_file) {
    auto fromFile = taskgen::load_prompt_file(*config.prompt_file);
    templates.insert(templates.end(), fromFile.begin(), fromFile.end());
  }
  if (!requested.empty()) return taskgen::find_template(templates, requested);
  for (const auto& tpl : templates)
    if (tpl.task_kind == kind) return tpl;
  throw ConfigError("no template available for kind " + taskgen::to_string(kind));
}

std::vector<modelgw::ModelResponse> stage_run(const RunConfig& config,
                                              const std::vector<taskgen::TaskInstance>& tasks,
                                              const std::string& artifact_name,
                                              const corpus::CodeObject* /*unused*/,
                                              const std::vector<corpus::CodeObject>* oracle) {
  fs::path artifact = config.out_dir / (artifact_name + ".jsonl");
  if (artifact_current(artifact, artifact_name, config))
    return modelgw::read_responses(artifact);

  try {
    modelgw::DispatchOptions opts;
    opts.journal = config.out_dir / (artifact_name + ".journal.jsonl");
    opts.oracle_corpus = oracle;
    harness::Limits limits = config.limits;
    opts.exec_passes = [limits](const corpus::CodeObject& obj) {
      return harness::object_passes_own_suite(obj, limits);
    };
    auto responses = modelgw::dispatch(tasks, config.model, opts);
    modelgw::write_responses(artifact, responses, artifact_meta(artifact_name, config));
    return responses;
  } catch (const std::exception& e) {
    throw StageError("run", kExitRun, e.what());
  }
}

struct ExecTarget {
  taskgen::TaskInstance task;
  corpus::TestSuite suite;
  std::string language;
};

std::vector<harness::ExecutionOutcome> stage_exec(
    const RunConfig& config, const std::vector<taskgen::TaskInstance>& tasks,
    const std::vector<modelgw::ModelResponse>& responses,
    const std::unordered_map<std::string, const corpus::CodeObject*>& suites_by_key,
    const std::string& artifact_name) {
  fs::path artifact = config.out_dir / (artifact_name + ".jsonl");
  if (artifact_current(artifact, artifact_name, config))
    return harness::read_outcomes(artifact);

  try {
    struct Job {
      std::size_t index;
      std::string code;
      corpus::TestSuite suite;
      std::string language;
    };
    std::vector<harness::ExecutionOutcome> outcomes;
    std::vector<Job> jobs;

    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& task = tasks[i];
      const auto& resp = responses[i];
      std::string dst = task.target_language.value_or(config.dst_language);

      std::string source_id = task.payload.value("task_id", "");
      auto suite_it = suites_by_key.find(problem_key(source_id));
      if (suite_it == suites_by_key.end() || !suite_it->second->tests.present)
        continue;  // excluded from the pass@1 denominator, like the 3 broken suites

      harness::ExecutionOutcome outcome;
      outcome.task_id = task.id;
      if (resp.status != modelgw::ResponseStatus::ok) {
        outcome.status = harness::ExecStatus::extraction_failure;
        outcome.failure_type = "NoResponse";
        outcomes.push_back(outcome);
        continue;
      }
      auto code = harness::extract_code_block(resp.raw_text, dst);
      if (!code) {
        outcome.status = harness::ExecStatus::extraction_failure;
        outcome.failure_type = "ExtractionFailure";
        outcomes.push_back(outcome);
        continue;
      }
      outcomes.push_back(outcome);  // placeholder, filled by the job below
      jobs.push_back({outcomes.size() - 1, *code, suite_it->second->tests, dst});
    }

    unsigned int workers = config.exec_parallelism > 0
                               ? static_cast<unsigned int>(config.exec_parallelism)
                               : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned int>(workers, std::max<std::size_t>(jobs.size(), 1));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t k = next.fetch_add(1);
          if (k >= jobs.size()) return;
          const Job& job = jobs[k];
          std::string id = outcomes[job.index].task_id;
          outcomes[job.index] = harness::run_execution_test(id, job.code, job.suite,
                                                            job.language, config.limits);
          outcomes[job.index].task_id = id;
        }
      });
    }
    for (auto& t : pool) t.join();

    harness::write_outcomes(artifact, outcomes, artifact_meta(artifact_name, config));
    return outcomes;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("exec", kExitExec, e.what());
  }
}

json ratio_entry(std::optional<double> value, long denom) {
  json rec{{"denominator", denom}};
  if (value) rec["value"] = *value;
  else rec["value"] = nullptr;
  return rec;
}

metrics::MetricsReport score_identification(const RunConfig& config,
                                            const std::vector<taskgen::TaskInstance>& tasks,
                                            const std::vector<modelgw::ModelResponse>& responses,
                                            const std::vector<pairgen::EvalPair>& pairs) {
  try {
    std::vector<harness::Verdict> verdicts;
    verdicts.reserve(responses.size());
    long not_ok = 0;
    for (const auto& resp : responses) {
      if (resp.status != modelgw::ResponseStatus::ok) {
        ++not_ok;
        harness::Verdict v;
        v.task_id = resp.task_id;
        v.parsed = harness::ParsedVerdict::unparseable;
        verdicts.push_back(v);
        continue;
      }
      verdicts.push_back(harness::extract_boolean_verdict(resp));
    }
    std::vector<json> verdict_records;
    verdict_records.push_back(json{{"_meta", artifact_meta("verdicts", config)}});
    for (const auto& v : verdicts) verdict_records.push_back(harness::to_json(v));
    write_jsonl(config.out_dir / "verdicts.jsonl", verdict_records);

    metrics::ScoreSlices slices = metrics::score_verdicts(verdicts, pairs);

    json slices_json = json::object();
    for (const auto& [key, counts] : slices.by_slice) {
      bool eq_slice = key.size() >= 3 && key.compare(key.size() - 3, 3, "-eq") == 0;
      auto p = eq_slice ? metrics::precision_eq(counts) : metrics::precision_neq(counts);
      long denom = eq_slice ? counts.eq_total() : counts.neq_total();
      slices_json[key] = ratio_entry(p, denom);
    }
    json kinds_json = json::object();
    for (const auto& [key, counts] : slices.by_kinds) {
      long correct = counts.tp + counts.tn;
      long total = counts.eq_total() + counts.neq_total();
      kinds_json[key] = json{{"correct", correct}, {"total", total}};
    }

    metrics::MetricsReport report;
    report.run_id = config.run_id;
    report.model_id = config.model.id;
    report.template_id = config.template_id.empty() ? "default" : config.template_id;
    report.seed = config.seed;
    report.config_digest = config.digest();
    report.body = json{
        {"task", "identification"},
        {"counts",
         {{"tp", slices.overall.tp},
          {"fn", slices.overall.fn},
          {"tn", slices.overall.tn},
          {"fp", slices.overall.fp}}},
        {"precision_eq", ratio_entry(metrics::precision_eq(slices.overall),
                                     slices.overall.eq_total())},
        {"precision_neq", ratio_entry(metrics::precision_neq(slices.overall),
                                      slices.overall.neq_total())},
        {"unparseable", slices.unparseable},
        {"responses_not_ok", not_ok},
        {"slices", slices_json},
        {"kinds", kinds_json}};
    return report;
  } catch (const std::exception& e) {
    throw StageError("score", kExitScore, e.what());
  }
}

metrics::MetricsReport score_execution(const RunConfig& config, const std::string& task_name,
                                       const std::vector<harness::ExecutionOutcome>& outcomes) {
  try {
    metrics::MetricsReport report;
    report.run_id = config.run_id;
    report.model_id = config.model.id;
    report.template_id = config.template_id.empty() ? "default" : config.template_id;
    report.seed = config.seed;
    report.config_digest = config.digest();

    json failures = json::array();
    for (const auto& [label, count] : metrics::failure_frequencies(outcomes))
      failures.push_back(json{{"type", label}, {"count", count}});

    long extraction_failures = 0;
    for (const auto& o : outcomes)
      if (o.status == harness::ExecStatus::extraction_failure) ++extraction_failures;

    report.body = json{
        {"task", task_name},
        {"pass_at_1",
         ratio_entry(metrics::pass_at_1(outcomes), static_cast<long>(outcomes.size()))},
        {"extraction_failures", extraction_failures},
        {"failure_types", failures},
        {"languages", {{"src", config.src_language}, {"dst", config.dst_language}}}};
    return report;
  } catch (const std::exception& e) {
    throw StageError("score", kExitScore, e.what());
  }
}

std::unordered_map<std::string, const corpus::CodeObject*> index_by_key(
    const std::vector<corpus::CodeObject>& objects) {
  std::unordered_map<std::string, const corpus::CodeObject*> map;
  for (const auto& obj : objects) map.emplace(problem_key(obj.task_id), &obj);
  return map;
}

}  // namespace

metrics::MetricsReport run_pipeline(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  {
    std::ofstream cfg(config.out_dir / "config.json");
    cfg << config.to_json().dump(2) << "\n";
  }

  std::vector<NamedCorpus> corpora = stage_ingest(config);
  std::vector<corpus::CodeObject> all_objects;
  for (const auto& nc : corpora)
    all_objects.insert(all_objects.end(), nc.objects.begin(), nc.objects.end());

  std::vector<corpus::CodeObject> target_objects;
  if (config.target_corpus) {
    auto loaded = corpus::load_dataset(config.target_corpus->descriptor,
                                       config.target_corpus->path,
                                       config.target_corpus->fields);
    target_objects = std::move(loaded.objects);
  }

  metrics::MetricsReport report;

  switch (config.task) {
    case taskgen::TaskKind::MorphismIdentification: {
      auto pairs = stage_pairs(config, corpora);
      taskgen::PromptTemplate tpl =
          template_for(config, taskgen::TaskKind::MorphismIdentification, config.template_id);
      std::vector<taskgen::TaskInstance> tasks;
      try {
        tasks = taskgen::build_identification_tasks(pairs, tpl);
        taskgen::write_tasks(config.out_dir / "tasks.jsonl", tasks,
                             artifact_meta("tasks", config));
      } catch (const std::exception& e) {
        throw StageError("tasks", kExitTasks, e.what());
      }
      auto responses = stage_run(config, tasks, "responses", nullptr,
                                 target_objects.empty() ? nullptr : &target_objects);
      report = score_identification(config, tasks, responses, pairs);
      break;
    }

    case taskgen::TaskKind::Translation: {
      taskgen::PromptTemplate tpl =
          template_for(config, taskgen::TaskKind::Translation, config.template_id);
      std::vector<taskgen::TaskInstance> tasks;
      try {
        tasks = taskgen::build_translation_tasks(all_objects, config.src_language,
                                                 config.dst_language, tpl);
        taskgen::write_tasks(config.out_dir / "tasks.jsonl", tasks,
                             artifact_meta("tasks", config));
      } catch (const std::exception& e) {
        throw StageError("tasks", kExitTasks, e.what());
      }
      auto responses = stage_run(config, tasks, "responses", nullptr,
                                 target_objects.empty() ? nullptr : &target_objects);

      // suites come from the target-language corpus; same-language runs
      // fall back to the sources' own suites
      auto suites = target_objects.empty() ? index_by_key(all_objects)
                                           : index_by_key(target_objects);
      auto outcomes = stage_exec(config, tasks, responses, suites, "outcomes");
      report = score_execution(config, "translation", outcomes);
      break;
    }

    case taskgen::TaskKind::Explanation:
    case taskgen::TaskKind::Reproduction: {
      taskgen::PromptTemplate explain_tpl = template_for(
          config, taskgen::TaskKind::Explanation,
          config.explain_template_id.empty() ? "" : config.explain_template_id);
      taskgen::PromptTemplate reproduce_tpl =
          template_for(config, taskgen::TaskKind::Reproduction, config.template_id);

      std::vector<taskgen::TaskInstance> explain_tasks;
      try {
        explain_tasks = taskgen::build_explanation_tasks(all_objects, explain_tpl);
        taskgen::write_tasks(config.out_dir / "tasks_explain.jsonl", explain_tasks,
                             artifact_meta("tasks_explain", config));
      } catch (const std::exception& e) {
        throw StageError("tasks", kExitTasks, e.what());
      }
      auto explain_responses =
          stage_run(config, explain_tasks, "responses_explain", nullptr, nullptr);

      std::vector<taskgen::ExplanationText> explanations;
      for (std::size_t i = 0; i < explain_tasks.size(); ++i) {
        if (explain_responses[i].status != modelgw::ResponseStatus::ok) continue;
        explanations.push_back({explain_tasks[i].payload.value("task_id", ""),
                                explain_responses[i].raw_text});
      }

      taskgen::ReproductionBuild build;
      try {
        build = taskgen::build_reproduction_tasks(explanations, config.dst_language,
                                                  reproduce_tpl);
        taskgen::write_tasks(config.out_dir / "tasks_reproduce.jsonl", build.tasks,
                             artifact_meta("tasks_reproduce", config));
      } catch (const std::exception& e) {
        throw StageError("tasks", kExitTasks, e.what());
      }
      auto reproduce_responses =
          stage_run(config, build.tasks, "responses_reproduce", nullptr, nullptr);

      auto suites = target_objects.empty() ? index_by_key(all_objects)
                                           : index_by_key(target_objects);
      auto outcomes =
          stage_exec(config, build.tasks, reproduce_responses, suites, "outcomes");
      report = score_execution(config, "explain_reproduce", outcomes);
      report.body["explain_skipped"] = build.skipped.size();
      break;
    }
  }

  try {
    metrics::write_report(config.out_dir / "report.json", report);
  } catch (const std::exception& e) {
    throw StageError("report", kExitReport, e.what());
  }
  return report;
}

}  // namespace cateval::pipeline
