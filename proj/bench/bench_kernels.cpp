// Serial vs OpenMP kernels on pipeline-sized inputs.
#include <benchmark/benchmark.h>

#include <random>

#include "tomo/kernels.hpp"

namespace {

struct Inputs {
  tomo::Matrix drop;
  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::string> keys;
};

Inputs make_inputs(int windows, int npaths) {
  Inputs in;
  const int edges = 60;
  std::mt19937_64 gen(7);
  std::bernoulli_distribution lossy(0.5);
  in.drop = tomo::Matrix::Zero(windows, edges);
  for (int k = 0; k < windows; ++k)
    for (int e = 0; e < edges; ++e) in.drop(k, e) = lossy(gen) ? 0.05 : 0.0;
  std::uniform_int_distribution<std::size_t> pick(0, edges - 1);
  for (int p = 0; p < npaths; ++p) {
    std::vector<std::size_t> path;
    for (int h = 0; h < 6; ++h) path.push_back(pick(gen));
    in.paths.push_back(path);
    in.keys.push_back("p" + std::to_string(p));
  }
  return in;
}

void BM_Simulate(benchmark::State& state, tomo::Backend backend) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(tomo::simulate_received(in.drop, in.paths, in.keys, 1000, 1, backend));
}

void BM_Covariance(benchmark::State& state, tomo::Backend backend) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  tomo::Matrix x(state.range(0), 64);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(gen);
  for (auto _ : state) benchmark::DoNotOptimize(tomo::covariance_matrix(x, backend));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Simulate, serial, tomo::Backend::Serial)->Arg(200)->Arg(800);
BENCHMARK_CAPTURE(BM_Simulate, parallel, tomo::Backend::Parallel)->Arg(200)->Arg(800);
BENCHMARK_CAPTURE(BM_Covariance, serial, tomo::Backend::Serial)->Arg(800)->Arg(4000);
BENCHMARK_CAPTURE(BM_Covariance, parallel, tomo::Backend::Parallel)->Arg(800)->Arg(4000);

BENCHMARK_MAIN();
