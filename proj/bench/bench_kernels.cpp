// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary workers.

#include <random>

#include <benchmark/benchmark.h>

#include "swdist/kernels.hpp"
#include "swdist/sliced_ot.hpp"

using namespace swdist;

namespace {

RowMatrix normal_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RowMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

MatrixView view_of(const RowMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}

constexpr std::size_t kDim = 64;

template <bool Parallel>
void BM_SlicedW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RowMatrix a = normal_matrix(n, kDim, 1), b = normal_matrix(n, kDim, 2);
  const RowMatrix dirs = sample_directions({500, kDim, 3});
  for (auto _ : state) {
    auto v = Parallel ? kernels::parallel::sliced_w2(view_of(a), view_of(b), view_of(dirs))
                      : kernels::serial::sliced_w2(view_of(a), view_of(b), view_of(dirs));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void BM_GramSums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RowMatrix x = normal_matrix(n, kDim, 1), y = normal_matrix(n, kDim, 2);
  const std::vector<kernels::PairKernel> ks{kernels::PairKernel::rbf(10.0)};
  for (auto _ : state) {
    auto v = Parallel ? kernels::parallel::gram_sums(view_of(x), view_of(y), ks)
                      : kernels::serial::gram_sums(view_of(x), view_of(y), ks);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void BM_Covariance(benchmark::State& state) {
  const RowMatrix x = normal_matrix(static_cast<std::size_t>(state.range(0)), 256, 1);
  for (auto _ : state) {
    RowMatrix c = Parallel ? kernels::parallel::covariance(view_of(x)) : kernels::serial::covariance(view_of(x));
    benchmark::DoNotOptimize(c.data());
  }
}

}  // namespace

BENCHMARK(BM_SlicedW2<false>)->Name("sliced_w2/serial")->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_SlicedW2<true>)->Name("sliced_w2/parallel")->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_GramSums<false>)->Name("gram_sums/serial")->RangeMultiplier(2)->Range(256, 2048)->Complexity();
BENCHMARK(BM_GramSums<true>)->Name("gram_sums/parallel")->RangeMultiplier(2)->Range(256, 2048)->Complexity();
BENCHMARK(BM_Covariance<false>)->Name("covariance/serial")->Arg(2000)->Arg(8000);
BENCHMARK(BM_Covariance<true>)->Name("covariance/parallel")->Arg(2000)->Arg(8000);

BENCHMARK_MAIN();
