#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "proofagent/similarity.hpp"

using namespace proofagent;

namespace {

std::vector<TokenSet> make_corpus(std::size_t n) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> word(0, 400), len(4, 40);
  std::vector<TokenSet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    for (int j = len(rng); j > 0; --j) text += "t" + std::to_string(word(rng)) + " ";
    out.push_back(make_token_set(text));
  }
  return out;
}

const TokenSet& query() {
  static const TokenSet q = make_token_set("t1 t2 t3 t5 t8 t13 t21 t34 t55 t89 t144 t233 t377 Z.abs Z.le");
  return q;
}

void BM_overlap_serial(benchmark::State& state) {
  auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlap_scores_serial(query(), corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_overlap_parallel(benchmark::State& state) {
  auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlap_scores(query(), corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_overlap_serial)->Arg(100)->Arg(10000)->Arg(100000);
BENCHMARK(BM_overlap_parallel)->Arg(100)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
