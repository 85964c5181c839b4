#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/pairgen.hpp"

namespace cateval::taskgen {

enum class TaskKind { MorphismIdentification, Translation, Explanation, Reproduction };
enum class AnswerProtocol { boolean_verdict, code_block, free_text };
enum class Phase { single, explain_phase, reproduce_phase };

std::string to_string(TaskKind kind);
std::string to_string(AnswerProtocol protocol);
std::string to_string(Phase phase);
TaskKind task_kind_from_string(const std::string& s);  // throws ConfigError

struct PromptTemplate {
  std::string id;
  TaskKind task_kind = TaskKind::MorphismIdentification;
  std::string text;  // with {placeholder}s
  AnswerProtocol answer_protocol = AnswerProtocol::boolean_verdict;
};

/// The placeholders each task kind requires; a template must use exactly
/// this set. Throws ConfigError on mismatch.
void validate_template(const PromptTemplate& tpl);

/// Versioned default templates; the same records ship as a prompt file.
const std::vector<PromptTemplate>& builtin_templates();

std::vector<PromptTemplate> load_prompt_file(const std::filesystem::path& path);
PromptTemplate find_template(const std::vector<PromptTemplate>& templates,
                             const std::string& id);  // throws ConfigError

struct TaskInstance {
  std::string id;
  TaskKind kind = TaskKind::MorphismIdentification;
  std::string rendered_input;
  std::vector<std::string> source_refs;
  std::optional<std::string> target_language;
  AnswerProtocol expected = AnswerProtocol::boolean_verdict;
  Phase phase = Phase::single;
  std::string template_id;
  /// Structured inputs for stub adapters and downstream stages; never shown
  /// to the model beyond what the template renders.
  json payload = json::object();
};

json to_json(const TaskInstance& t);
TaskInstance task_from_json(const json& rec);
void write_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& tasks,
                 const json& meta = json::object());
std::vector<TaskInstance> read_tasks(const std::filesystem::path& path);

std::vector<TaskInstance> build_identification_tasks(
    const std::vector<pairgen::EvalPair>& pairs, const PromptTemplate& tpl);

std::vector<TaskInstance> build_translation_tasks(
    const std::vector<corpus::CodeObject>& corpus, const std::string& src,
    const std::string& dst, const PromptTemplate& tpl);

std::vector<TaskInstance> build_explanation_tasks(
    const std::vector<corpus::CodeObject>& corpus, const PromptTemplate& tpl);

struct ExplanationText {
  std::string task_id;  // the explain-phase source object
  std::string text;     // the model's explanation, embedded verbatim
};

struct ReproductionBuild {
  std::vector<TaskInstance> tasks;
  std::vector<std::string> skipped;  // task ids without usable explanations
};

ReproductionBuild build_reproduction_tasks(const std::vector<ExplanationText>& explanations,
                                           const std::string& dst,
                                           const PromptTemplate& tpl);

}  // namespace cateval::taskgen
