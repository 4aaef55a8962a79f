#include <benchmark/benchmark.h>

#include <random>

#include "rwiso/canonical.hpp"
#include "rwiso/isodp.hpp"

using namespace rwiso;

namespace {

Graph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (int v = 0; v < n; ++v)
    for (int w = v + 1; w < n; ++w)
      if (coin(rng)) g.add_edge(v, w);
  return g;
}

// Caterpillar-like distance-hereditary graph: rank width 1.
Graph caterpillar(int n) {
  Graph g(n);
  for (int v = 1; v < n; ++v) g.add_edge(v, v % 3 == 0 ? v - 3 < 0 ? 0 : v - 3 : v - 1);
  return g;
}

Graph cycle(int n) {
  Graph g(n);
  for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

Perm shuffled(std::mt19937_64& rng, int n) {
  Perm p = identity_perm(n);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

void BM_CutRank(benchmark::State& st) {
  std::mt19937_64 rng(1);
  const int n = int(st.range(0));
  Graph g = random_graph(rng, n, 0.5);
  std::vector<Mask> xs;
  for (int i = 0; i < 256; ++i) xs.push_back(rng() & g.all());
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(cut_rank(g, xs[i++ & 255]));
}
BENCHMARK(BM_CutRank)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_EnumerateTangles(benchmark::State& st) {
  Graph g = cycle(int(st.range(0)));
  ConnFn k = ConnFn::cut_rank(g);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_tangles(k, 3).size());
}
BENCHMARK(BM_EnumerateTangles)->Arg(6)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CanonicalDecomposition(benchmark::State& st) {
  Graph g = caterpillar(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(canonical_decomposition(g, 1).size());
}
BENCHMARK(BM_CanonicalDecomposition)->Arg(6)->Arg(9)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Isomorphisms(benchmark::State& st) {
  std::mt19937_64 rng(2);
  const int n = int(st.range(0));
  Graph g = cycle(n);
  Graph h = g.permuted(shuffled(rng, n));
  for (auto _ : st) benchmark::DoNotOptimize(isomorphisms(g, h, 2).empty());
}
BENCHMARK(BM_Isomorphisms)->Arg(5)->Arg(6)->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& st) {
  std::mt19937_64 rng(3);
  const int n = int(st.range(0));
  Graph g = cycle(n);
  Graph h = g.permuted(shuffled(rng, n));
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_iso(g, h).empty());
}
BENCHMARK(BM_BruteForce)->Arg(5)->Arg(6)->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
