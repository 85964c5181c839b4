#include <benchmark/benchmark.h>

#include <filesystem>

#include "cateval/corpus.hpp"
#include "cateval/morphism.hpp"
#include "cateval/pairgen.hpp"

using namespace cateval;

namespace {

std::vector<corpus::CodeObject> mini_corpus() {
  corpus::DatasetDescriptor desc;
  desc.name = corpus::DatasetName::HumanEvalX;
  desc.language = "java";
  auto loaded = corpus::load_dataset(
      desc, std::filesystem::path(CATEVAL_FIXTURE_DIR) / "humaneval_java_mini.jsonl");
  return loaded.objects;
}

}  // namespace

static void BM_EnumerateSitesAllKinds(benchmark::State& state) {
  auto objects = mini_corpus();
  for (auto _ : state) {
    std::size_t sites = 0;
    for (const auto& obj : objects)
      for (morphism::Kind kind : morphism::all_kinds())
        sites += morphism::enumerate_sites(obj.source, obj.language, kind).size();
    benchmark::DoNotOptimize(sites);
  }
}
BENCHMARK(BM_EnumerateSitesAllKinds);

static void BM_ApplyChain(benchmark::State& state) {
  auto objects = mini_corpus();
  const auto& obj = objects.front();
  std::vector<morphism::Kind> kinds = {morphism::Kind::UnusedStatement,
                                       morphism::Kind::ReorderCondition,
                                       morphism::Kind::VariableRenaming};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto [text, chain] = morphism::apply_chain(obj.source, obj.language, kinds, seed++);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(BM_ApplyChain);

static void BM_SampleMorphismOutputs(benchmark::State& state) {
  auto objects = mini_corpus();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    for (const auto& obj : objects) {
      auto sampled = morphism::sample_morphism_outputs(obj, 2, 1, seed);
      benchmark::DoNotOptimize(sampled);
    }
    ++seed;
  }
}
BENCHMARK(BM_SampleMorphismOutputs);

static void BM_BuildLocalPairs(benchmark::State& state) {
  auto objects = mini_corpus();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto built = pairgen::build_local_pairs(objects, seed++);
    benchmark::DoNotOptimize(built);
  }
}
BENCHMARK(BM_BuildLocalPairs);
