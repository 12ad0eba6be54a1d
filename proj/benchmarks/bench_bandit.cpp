#include <benchmark/benchmark.h>

#include "hetbandit/bandit.hpp"
#include "hetbandit/rng.hpp"

namespace {

using namespace hetbandit;

void bm_policy_update(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  PolicyState policy = PolicyState::uniform(k);
  std::vector<double> reward(static_cast<std::size_t>(k));
  Rng rng(3);
  for (auto& r : reward) r = rng.uniform01();
  reward = normalize_rewards(reward);
  const double eta = step_size(0.5 / k, 20, k, 60);
  for (auto _ : state) {
    const auto p = policy_distribution(policy.w, 0.5 / k);
    benchmark::DoNotOptimize(update_weights(policy.w, reward, p, eta));
  }
}
BENCHMARK(bm_policy_update)->Arg(3)->Arg(8)->Arg(32);

void bm_sample_representatives(benchmark::State& state) {
  const int pool = static_cast<int>(state.range(0));
  std::vector<double> norms(static_cast<std::size_t>(pool));
  Rng init(5);
  for (auto& x : norms) x = init.uniform01() + 0.1;
  Rng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_representatives(pool, pool / 10, SampleMode::norm_proportional, norms, rng));
  }
}
BENCHMARK(bm_sample_representatives)->Arg(1000)->Arg(10000);

}  // namespace
