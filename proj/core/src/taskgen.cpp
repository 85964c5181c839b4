#include "cateval/taskgen.hpp"

#include <algorithm>
#include <set>

#include "cateval/errors.hpp"

namespace cateval::taskgen {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::MorphismIdentification: return "identification";
    case TaskKind::Translation: return "translation";
    case TaskKind::Explanation: return "explanation";
    case TaskKind::Reproduction: return "reproduction";
  }
  return "?";
}

std::string to_string(AnswerProtocol protocol) {
  switch (protocol) {
    case AnswerProtocol::boolean_verdict: return "boolean_verdict";
    case AnswerProtocol::code_block: return "code_block";
    case AnswerProtocol::free_text: return "free_text";
  }
  return "?";
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::single: return "single";
    case Phase::explain_phase: return "explain_phase";
    case Phase::reproduce_phase: return "reproduce_phase";
  }
  return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "identification" || s == "identify") return TaskKind::MorphismIdentification;
  if (s == "translation" || s == "translate") return TaskKind::Translation;
  if (s == "explanation" || s == "explain") return TaskKind::Explanation;
  if (s == "reproduction" || s == "reproduce") return TaskKind::Reproduction;
  throw ConfigError("unknown task kind: " + s);
}

namespace {

AnswerProtocol protocol_from_string(const std::string& s) {
  if (s == "boolean_verdict") return AnswerProtocol::boolean_verdict;
  if (s == "code_block") return AnswerProtocol::code_block;
  if (s == "free_text") return AnswerProtocol::free_text;
  throw ConfigError("unknown answer protocol: " + s);
}

Phase phase_from_string(const std::string& s) {
  if (s == "explain_phase") return Phase::explain_phase;
  if (s == "reproduce_phase") return Phase::reproduce_phase;
  return Phase::single;
}

const std::set<std::string>& required_placeholders(TaskKind kind) {
  static const std::set<std::string> identification = {"code_a", "code_b"};
  static const std::set<std::string> translation = {"source_language", "target_language",
                                                    "code"};
  static const std::set<std::string> explanation = {"code"};
  static const std::set<std::string> reproduction = {"target_language", "explanation"};
  switch (kind) {
    case TaskKind::MorphismIdentification: return identification;
    case TaskKind::Translation: return translation;
    case TaskKind::Explanation: return explanation;
    case TaskKind::Reproduction: return reproduction;
  }
  return identification;
}

std::set<std::string> placeholders_in(const std::string& text) {
  static const char* kKnown[] = {"source_language", "target_language", "code",
                                 "code_a", "code_b", "explanation"};
  std::set<std::string> used;
  for (const char* p : kKnown)
    if (text.find("{" + std::string(p) + "}") != std::string::npos) used.insert(p);
  return used;
}

std::string render(const std::string& tpl,
                   const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out = tpl;
  for (const auto& [key, value] : values) {
    std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return out;
}

}  // namespace

void validate_template(const PromptTemplate& tpl) {
  const auto& required = required_placeholders(tpl.task_kind);
  std::set<std::string> used = placeholders_in(tpl.text);
  if (used != required) {
    std::string msg = "template '" + tpl.id + "' placeholder mismatch; requires {";
    for (const auto& r : required) msg += r + " ";
    msg += "} but uses {";
    for (const auto& u : used) msg += u + " ";
    msg += "}";
    throw ConfigError(msg);
  }
}

const std::vector<PromptTemplate>& builtin_templates() {
  static const std::vector<PromptTemplate> templates = {
      {"default-identify-v1", TaskKind::MorphismIdentification,
       "Here are two code snippets.\n"
       "Code A:\n{code_a}\n\nCode B:\n{code_b}\n\n"
       "Are the two code snippets functionally equivalent, producing the same "
       "output for every valid input? Compare them and explicitly answer "
       "\"True\" or \"False\".",
       AnswerProtocol::boolean_verdict},
      {"default-translate-v1", TaskKind::Translation,
       "Translate the below {source_language} code to {target_language} code.\n\n"
       "{code}\n",
       AnswerProtocol::code_block},
      {"default-explain-v1", TaskKind::Explanation,
       "Describe the following code using natural language, including the "
       "precise function name, arguments, and return type. Provide sufficient "
       "information to reproduce the code.\n\n{code}\n",
       AnswerProtocol::free_text},
      {"default-reproduce-v1", TaskKind::Reproduction,
       "Below is a description of a function. Translate the description back "
       "into {target_language} code.\n\nDescription:\n{explanation}\n",
       AnswerProtocol::code_block},
  };
  return templates;
}

std::vector<PromptTemplate> load_prompt_file(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  if (!raw.errors.empty())
    throw ConfigError("prompt file has malformed records: " + path.string());
  std::vector<PromptTemplate> out;
  for (const auto& rec : raw.records) {
    PromptTemplate tpl;
    tpl.id = rec.at("id").get<std::string>();
    tpl.task_kind = task_kind_from_string(rec.at("kind").get<std::string>());
    tpl.text = rec.at("template").get<std::string>();
    tpl.answer_protocol = protocol_from_string(rec.at("protocol").get<std::string>());
    validate_template(tpl);
    out.push_back(std::move(tpl));
  }
  return out;
}

PromptTemplate find_template(const std::vector<PromptTemplate>& templates,
                             const std::string& id) {
  for (const auto& tpl : templates)
    if (tpl.id == id) return tpl;
  throw ConfigError("template id not found: " + id);
}

json to_json(const TaskInstance& t) {
  json rec{{"id", t.id},
           {"kind", to_string(t.kind)},
           {"rendered_input", t.rendered_input},
           {"source_refs", t.source_refs},
           {"expected", to_string(t.expected)},
           {"phase", to_string(t.phase)},
           {"template_id", t.template_id},
           {"payload", t.payload}};
  if (t.target_language) rec["target_language"] = *t.target_language;
  return rec;
}

TaskInstance task_from_json(const json& rec) {
  TaskInstance t;
  t.id = rec.value("id", "");
  t.kind = task_kind_from_string(rec.value("kind", "identification"));
  t.rendered_input = rec.value("rendered_input", "");
  if (rec.contains("source_refs"))
    t.source_refs = rec["source_refs"].get<std::vector<std::string>>();
  if (rec.contains("target_language"))
    t.target_language = rec["target_language"].get<std::string>();
  t.expected = protocol_from_string(rec.value("expected", "boolean_verdict"));
  t.phase = phase_from_string(rec.value("phase", "single"));
  t.template_id = rec.value("template_id", "");
  if (rec.contains("payload")) t.payload = rec["payload"];
  return t;
}

void write_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& tasks,
                 const json& meta) {
  std::vector<json> records;
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& t : tasks) records.push_back(to_json(t));
  write_jsonl(path, records);
}

std::vector<TaskInstance> read_tasks(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<TaskInstance> tasks;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    tasks.push_back(task_from_json(rec));
  }
  return tasks;
}

std::vector<TaskInstance> build_identification_tasks(
    const std::vector<pairgen::EvalPair>& pairs, const PromptTemplate& tpl) {
  if (tpl.task_kind != TaskKind::MorphismIdentification)
    throw ConfigError("template '" + tpl.id + "' is not an identification template");
  validate_template(tpl);

  std::vector<TaskInstance> tasks;
  tasks.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    TaskInstance t;
    t.id = "identify:" + std::to_string(i) + ":" + pair.left.task_id + "|" +
           pair.right.task_id;
    t.kind = TaskKind::MorphismIdentification;
    t.rendered_input = render(tpl.text, {{"code_a", pair.left.source},
                                         {"code_b", pair.right.source}});
    t.source_refs = {pair.left.task_id, pair.right.task_id};
    t.expected = tpl.answer_protocol;
    t.template_id = tpl.id;
    t.payload = json{{"pair", pairgen::to_json(pair)}, {"pair_index", i}};
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<TaskInstance> build_translation_tasks(
    const std::vector<corpus::CodeObject>& corpus, const std::string& src,
    const std::string& dst, const PromptTemplate& tpl) {
  if (tpl.task_kind != TaskKind::Translation)
    throw ConfigError("template '" + tpl.id + "' is not a translation template");
  validate_template(tpl);

  std::vector<TaskInstance> tasks;
  tasks.reserve(corpus.size());
  for (const auto& obj : corpus) {
    if (obj.language != src)
      throw ConfigError("translation input " + obj.task_id + " is not in " + src);
    TaskInstance t;
    t.id = "translate:" + src + "->" + dst + ":" + obj.task_id;
    t.kind = TaskKind::Translation;
    t.rendered_input = render(tpl.text, {{"source_language", src},
                                         {"target_language", dst},
                                         {"code", obj.source}});
    t.source_refs = {obj.task_id};
    t.target_language = dst;
    t.expected = tpl.answer_protocol;
    t.template_id = tpl.id;
    t.payload = json{{"code", obj.source},
                     {"task_id", obj.task_id},
                     {"entry_point", obj.entry_point},
                     {"source_language", src}};
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<TaskInstance> build_explanation_tasks(
    const std::vector<corpus::CodeObject>& corpus, const PromptTemplate& tpl) {
  if (tpl.task_kind != TaskKind::Explanation)
    throw ConfigError("template '" + tpl.id + "' is not an explanation template");
  validate_template(tpl);

  std::vector<TaskInstance> tasks;
  tasks.reserve(corpus.size());
  for (const auto& obj : corpus) {
    TaskInstance t;
    t.id = "explain:" + obj.task_id;
    t.kind = TaskKind::Explanation;
    t.rendered_input = render(tpl.text, {{"code", obj.source}});
    t.source_refs = {obj.task_id};
    t.expected = tpl.answer_protocol;
    t.phase = Phase::explain_phase;
    t.template_id = tpl.id;
    t.payload = json{{"code", obj.source},
                     {"task_id", obj.task_id},
                     {"entry_point", obj.entry_point}};
    tasks.push_back(std::move(t));
  }
  return tasks;
}

ReproductionBuild build_reproduction_tasks(const std::vector<ExplanationText>& explanations,
                                           const std::string& dst,
                                           const PromptTemplate& tpl) {
  if (tpl.task_kind != TaskKind::Reproduction)
    throw ConfigError("template '" + tpl.id + "' is not a reproduction template");
  validate_template(tpl);

  ReproductionBuild build;
  for (const auto& exp : explanations) {
    if (exp.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      build.skipped.push_back(exp.task_id);
      continue;
    }
    TaskInstance t;
    t.id = "reproduce:" + dst + ":" + exp.task_id;
    t.kind = TaskKind::Reproduction;
    t.rendered_input = render(tpl.text, {{"target_language", dst},
                                         {"explanation", exp.text}});
    t.source_refs = {exp.task_id, "explain:" + exp.task_id};
    t.target_language = dst;
    t.expected = tpl.answer_protocol;
    t.phase = Phase::reproduce_phase;
    t.template_id = tpl.id;
    t.payload = json{{"explanation", exp.text}, {"task_id", exp.task_id}};
    build.tasks.push_back(std::move(t));
  }
  return build;
}

}  // namespace cateval::taskgen
