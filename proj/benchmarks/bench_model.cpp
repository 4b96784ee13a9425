#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cvae/evaluator.hpp"
#include "cvae/mlp.hpp"
#include "cvae/vae.hpp"

using namespace cvae;

namespace {

std::vector<double> binary_row(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  std::vector<double> r(n);
  for (double& v : r) v = on(rng) ? 1.0 : 0.0;
  return r;
}

void BM_MlpForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  auto p = MlpParams::init_uniform(n, std::vector<std::size_t>{200, 40}, rng);
  std::mt19937_64 data_rng(2);
  const auto x = binary_row(n, 0.02, data_rng);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(p, x));
}
BENCHMARK(BM_MlpForward)->Arg(500)->Arg(5000);

void BM_MlpBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  auto p = MlpParams::init_uniform(n, std::vector<std::size_t>{200, 40}, rng);
  std::mt19937_64 data_rng(2);
  const auto x = binary_row(n, 0.02, data_rng);
  const auto cache = mlp_forward(p, x);
  const std::vector<double> g(40, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_backward(p, cache, g));
}
BENCHMARK(BM_MlpBackward)->Arg(500)->Arg(5000);

void BM_ElboBatch(benchmark::State& state) {
  const std::size_t n = 2000;
  ModelConfig c;
  c.k = 50;
  c.encoder_widths = {200};
  c.decoder_widths = {200};
  const auto p = VaeParams::init(n, c, 3);
  std::mt19937_64 data_rng(4);
  std::vector<std::vector<double>> rows;
  std::vector<Datapoint> batch;
  for (int i = 0; i < state.range(0); ++i) rows.push_back(binary_row(n, 0.01, data_rng));
  for (const auto& r : rows) batch.push_back({r, Head::bernoulli});
  Rng eps_rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(elbo_batch(p, batch, c, normal_eps(eps_rng)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ElboBatch)->Arg(10)->Arg(100);

void BM_TopN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u;
  std::vector<double> scores(n);
  for (double& s : scores) s = u(rng);
  const std::vector<ItemIndex> train{1, 5, 9, 40};
  for (auto _ : state) benchmark::DoNotOptimize(top_n(scores, train, 20));
}
BENCHMARK(BM_TopN)->Arg(1000)->Arg(20000);

}  // namespace
BENCHMARK_MAIN();
