#pragma once

#include "pennyflip/game.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace pennyflip {

enum class PopLabel { picard, q };

struct Population {
  PopLabel label;
  const Schema* schema;
  std::vector<Chromosome> members;
};

// How an offspring is produced from the mating pool.
//   crossover_then_mutate: average two tournament winners, then the per-gene
//       mutation pass runs on every offspring.
//   gated_mutation: as above, but the mutation pass itself runs only on a
//       mutant_fraction share of offspring.
//   either_or: with probability mutant_fraction the offspring is a mutated
//       copy of a single tournament winner, otherwise a plain crossover child.
enum class ReproductionRule { crossover_then_mutate, gated_mutation, either_or };

// Whether both populations reproduce against the same evaluation (parallel) or
// K reproduces first and P then reproduces against the updated K (sequential).
enum class UpdateOrder { parallel, sequential };

std::string_view to_string(ReproductionRule rule);
std::string_view to_string(UpdateOrder update);

struct GaConfig {
  std::size_t pop_size = 50;
  std::size_t max_gen = 500;
  double mutation_rate = 0.2;  // per-gene mutation probability within a mutation pass
  double mutation_std = 0.2;   // kick std in radians for a quarter-turn gene; wider
                               // genes scale up so every gene explores its range
                               // at the same relative rate
  double mutant_fraction = 0.2;  // share of offspring that get a mutation pass
  std::uint64_t rng_seed = 0;
  ReproductionRule rule = ReproductionRule::either_or;
  UpdateOrder update = UpdateOrder::sequential;
};

// Round-robin evaluation of one generation. payoff_q holds the payoff to K's
// member ik against P's member ip at [ip * n_k + ik]; fitness is the row or
// column mean (payoff_picard for P, payoff_q for K).
struct FitnessTable {
  std::size_t n_p = 0;
  std::size_t n_k = 0;
  std::vector<double> payoff_q;
  std::vector<double> fit_p;
  std::vector<double> fit_k;
};

FitnessTable evaluate_fitness(const Population& pop_p, const Population& pop_k);

// One deterministic RNG substream per population per generation.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t generation, PopLabel pop);

// Deterministic child seed for independent streams (batch seed -> run seed).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Binary tournament: two uniform draws with replacement, higher fitness wins,
// ties decided by a coin flip. Returns the winner's index.
std::size_t tournament_select(std::span<const double> fitness, std::mt19937_64& rng);

// Gene-wise arithmetic mean of two parents.
Chromosome average_crossover(const Chromosome& a, const Chromosome& b);

// Each gene independently gains a Gaussian kick with probability
// mutation_rate; the result is clamped to the gene's bounds. The kick std is
// mutation_std scaled by the gene's range relative to a quarter turn, so a
// [0, pi/2] gene gets exactly mutation_std and wider genes get
// proportionally more.
Chromosome gaussian_mutate(const Chromosome& c, const GaConfig& cfg, std::mt19937_64& rng);

// Full generational replacement of one population from its fitness vector.
Population reproduce(const Population& pop, std::span<const double> fitness,
                     const GaConfig& cfg, std::mt19937_64& rng);

// Advance both populations one generation in place. `table` must be the
// evaluation of the populations as passed in.
void next_generation(Population& pop_p, Population& pop_k, const FitnessTable& table,
                     const GaConfig& cfg, std::uint64_t generation);

// Per-generation snapshot taken before reproduction. SEMs use the population
// standard deviation over n members divided by sqrt(n).
struct GenStats {
  std::uint64_t generation;
  double mean_fit_p;
  double sem_fit_p;
  double mean_fit_k;
  double sem_fit_k;
  std::vector<double> gene_mean_p;
  std::vector<double> gene_sem_p;
  std::vector<double> gene_mean_k;
  std::vector<double> gene_sem_k;
};

struct EvolutionResult {
  std::vector<GenStats> history;  // generations 0 .. max_gen inclusive
  Population final_p;
  Population final_k;
};

// Evaluate-record-reproduce loop. Bit-for-bit deterministic in cfg.rng_seed.
EvolutionResult run_evolution(Population seed_p, Population seed_k, const GaConfig& cfg);

}  // namespace pennyflip
