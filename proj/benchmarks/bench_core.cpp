// Microbenchmarks for the hot paths: single game evaluation, the compiled
// payoff kernel used inside fitness tables, one GA generation, and a grid
// certificate.

#include "pennyflip/evolve.hpp"
#include "pennyflip/experiments.hpp"
#include "pennyflip/game.hpp"
#include "pennyflip/verify.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace pennyflip;

namespace {

constexpr double pi = std::numbers::pi;

const GameProfile kProfile{
    PureQuantum{StrategyParams(pi / 4, 0.9)},
    MixedTwoUnitary{0.4, StrategyParams(0.3, 1.2), StrategyParams(1.1, 2.0)},
    PureQuantum{StrategyParams(0.7, pi / 2)}};

void BM_play_profile(benchmark::State& state) {
  for (auto _ : state) {
    const GameOutcome g = play(kProfile);
    benchmark::DoNotOptimize(g.payoff_q);
  }
}
BENCHMARK(BM_play_profile);

void BM_payoff_kernel(benchmark::State& state) {
  const QKernel k = compile_q(kProfile.q_move1, kProfile.q_move2);
  const BlochMap p = compile_picard(kProfile.picard_move);
  for (auto _ : state) {
    benchmark::DoNotOptimize(payoff_q_fast(k, p));
  }
}
BENCHMARK(BM_payoff_kernel);

void BM_evaluate_fitness(benchmark::State& state) {
  std::mt19937_64 rng(5);
  auto [pop_p, pop_k] = seed_sim3(rng);
  for (auto _ : state) {
    const FitnessTable table = evaluate_fitness(pop_p, pop_k);
    benchmark::DoNotOptimize(table.fit_k[0]);
  }
}
BENCHMARK(BM_evaluate_fitness);

void BM_next_generation(benchmark::State& state) {
  GaConfig cfg;
  std::mt19937_64 rng(5);
  auto [seed_p, seed_k] = seed_sim3(rng);
  const FitnessTable table = evaluate_fitness(seed_p, seed_k);
  for (auto _ : state) {
    state.PauseTiming();
    Population pop_p = seed_p;
    Population pop_k = seed_k;
    state.ResumeTiming();
    next_generation(pop_p, pop_k, table, cfg, 1);
    benchmark::DoNotOptimize(pop_k.members[0].genes[0]);
  }
}
BENCHMARK(BM_next_generation);

void BM_evolution_10_generations(benchmark::State& state) {
  GaConfig cfg;
  cfg.max_gen = 10;
  cfg.rng_seed = 5;
  for (auto _ : state) {
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, 0));
    auto [pop_p, pop_k] = seed_sim1(rng);
    const EvolutionResult r = run_evolution(pop_p, pop_k, cfg);
    benchmark::DoNotOptimize(r.history.back().mean_fit_k);
  }
}
BENCHMARK(BM_evolution_10_generations);

void BM_certify_winning_profile(benchmark::State& state) {
  for (auto _ : state) {
    const NeCertificate cert =
        certify_ne({PureQuantum{StrategyParams(pi / 4, 0.0)},
                    PureQuantum{StrategyParams(pi / 4, pi)}},
                   ClassicalMixed{0.5});
    benchmark::DoNotOptimize(cert.max_gain_q);
  }
}
BENCHMARK(BM_certify_winning_profile);

}  // namespace

BENCHMARK_MAIN();
