#include <benchmark/benchmark.h>

#include "specforge/collation.hpp"
#include "specforge/pipeline.hpp"
#include "specforge/session.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/table_gen.hpp"

using namespace specforge;
using namespace tablegen;

static void BM_SortDesignations(benchmark::State& state) {
  gen::Rng rng(1);
  const auto corpus = gen::designation_pool(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto copy = corpus;
    po::sort_designations(copy);
    benchmark::DoNotOptimize(copy.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SortDesignations)->Range(1 << 8, 1 << 14);

static void BM_Tokenize(benchmark::State& state) {
  gen::Rng rng(2);
  const auto corpus = gen::designation_pool(rng, 1024);
  for (auto _ : state) {
    for (const auto& s : corpus) benchmark::DoNotOptimize(po::tokenize(s));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Tokenize);

static void BM_Layout(benchmark::State& state) {
  gen::Rng rng(3);
  auto t = random_table(rng, fixtures::kind("assembly_sheet"), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(layout(t));
}
BENCHMARK(BM_Layout)->Range(8, 512);

static void BM_Autofill(benchmark::State& state) {
  gen::Rng rng(4);
  const auto doc = random_po_document(rng, static_cast<std::size_t>(state.range(0)));
  const auto kind = fixtures::kind("specification");
  for (auto _ : state) benchmark::DoNotOptimize(autofill(doc, kind));
}
BENCHMARK(BM_Autofill)->Range(8, 512);

static void BM_SessionReplay(benchmark::State& state) {
  const auto& set = fixtures::catalog();
  for (auto _ : state) {
    auto s = rules::SelectionSession::replay(set, "pipes_10704", 2, {2, 1});
    benchmark::DoNotOptimize(s.finish());
  }
}
BENCHMARK(BM_SessionReplay);
BENCHMARK_MAIN();
