#include <benchmark/benchmark.h>

#include <filesystem>

#include "cateval/corpus.hpp"
#include "cateval/java_lexer.hpp"
#include "cateval/java_tree.hpp"

using namespace cateval;

namespace {

std::string big_source() {
  corpus::DatasetDescriptor desc;
  desc.name = corpus::DatasetName::HumanEvalX;
  desc.language = "java";
  auto loaded = corpus::load_dataset(
      desc, std::filesystem::path(CATEVAL_FIXTURE_DIR) / "humaneval_java_mini.jsonl");
  std::string all;
  for (const auto& obj : loaded.objects) all += obj.source + "\n";
  return all;
}

}  // namespace

static void BM_Lex(benchmark::State& state) {
  std::string src = big_source();
  for (auto _ : state) {
    auto toks = java::lex_code(src);
    benchmark::DoNotOptimize(toks);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Lex);

static void BM_StripComments(benchmark::State& state) {
  std::string src = "/** doc */\n" + big_source() + "// tail\n";
  for (auto _ : state) {
    auto stripped = java::strip_comments(src);
    benchmark::DoNotOptimize(stripped);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_StripComments);

static void BM_ParseUnit(benchmark::State& state) {
  std::string src = big_source();
  for (auto _ : state) {
    auto unit = java::parse_unit(src);
    benchmark::DoNotOptimize(unit);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_ParseUnit);
