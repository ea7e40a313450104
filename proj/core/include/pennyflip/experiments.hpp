#pragma once

#include "pennyflip/evolve.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace pennyflip {

// The three invasion experiments. sim1: quantum K invades a classical P;
// sim2: classical K invades a quantum P stuck state; sim3: quantum K against
// a mixed-two-unitary P.
enum class Scenario { sim1, sim2, sim3 };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

struct ScenarioSpec {
  Scenario id = Scenario::sim1;
  GaConfig ga;
  std::size_t n_runs = 20;
};

// Table defaults per scenario: pop 50, mutation 0.2/0.2, 500 generations for
// sim1/sim2 and 10,000 for sim3.
ScenarioSpec make_scenario(Scenario id);

// Seeding rules. All return (P, K).
std::pair<Population, Population> seed_sim1(std::mt19937_64& rng, std::size_t pop_size = 50);
std::pair<Population, Population> seed_sim2(std::mt19937_64& rng, std::size_t pop_size = 50);
std::pair<Population, Population> seed_sim3(std::mt19937_64& rng, std::size_t pop_size = 50);
std::pair<Population, Population> seed_scenario(Scenario id, std::mt19937_64& rng,
                                                std::size_t pop_size = 50);

enum class CategoryLabel { cat1, cat2, cat3, cat4, unclassified };

std::string_view to_string(CategoryLabel label);

// Match a (K, P) pair of a finished sim3 run against the four equilibrium
// templates. Wildcard slots are unconstrained; constrained angles must land
// within tol; Picard's two unitaries must match the template operators within
// 0.1 elementwise (either branch order). K must decode to two pure quantum
// moves and P to one mixed-two-unitary move.
CategoryLabel classify_final(const Chromosome& k_member, const Chromosome& p_member,
                             double tol = 0.15);

struct MeanSem {
  double mean;
  double sem;
};

// Mean and standard error (population std over n, divided by sqrt(n)).
MeanSem aggregate(std::span<const double> values);

// A run converges when both populations' |mean fitness|, averaged over the
// last kConvergenceTailFrac of generations, stays below kConvergenceLevel.
inline constexpr double kConvergenceTailFrac = 0.05;
inline constexpr double kConvergenceLevel = 0.05;

// Classification reads each run's tail-averaged population mean genes rather
// than the final snapshot; payoff-neutral genes orbit their centre value and a
// single generation can sit anywhere on that orbit.
inline constexpr double kRepresentativeTailFrac = 0.50;

struct RunResult {
  std::size_t run_index = 0;
  std::uint64_t run_seed = 0;
  EvolutionResult evo;
  bool converged = false;
  std::vector<double> rep_p;  // tail-averaged mean genes of P
  std::vector<double> rep_k;  // tail-averaged mean genes of K
  CategoryLabel category = CategoryLabel::unclassified;  // sim3, converged runs only
};

struct BatchResult {
  ScenarioSpec spec;
  std::vector<RunResult> runs;
  // Cross-run aggregation of per-run mean fitness, aligned by generation.
  std::vector<double> x_mean_fit_p;
  std::vector<double> x_sem_fit_p;
  std::vector<double> x_mean_fit_k;
  std::vector<double> x_sem_fit_k;
};

BatchResult run_batch(const ScenarioSpec& spec, unsigned workers = 1);

// Counts per category over the converged runs only, in enum order
// (cat1, cat2, cat3, cat4, unclassified).
std::array<std::size_t, 5> category_histogram(std::span<const RunResult> runs);

// Per-generation CSV: scenario, run, generation, fitness mean/SEM of both
// populations, then per-gene mean/SEM columns named by schema.
void write_runs_csv(std::ostream& os, const BatchResult& batch);

// Batch summary: config echo, per-run outcomes, category histogram,
// cross-run fitness aggregates.
void write_batch_summary_json(std::ostream& os, const BatchResult& batch);

// Full final populations plus representatives, enough to re-classify offline.
void write_populations_json(std::ostream& os, const BatchResult& batch);

}  // namespace pennyflip
