#include "pennyflip/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pennyflip {

namespace {

// Reference gene range for mutation kicks: a gene spanning a quarter turn gets
// exactly mutation_std as its kick std.
constexpr double kQuarterTurn = std::numbers::pi / 2.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct MeanSemPair {
  double mean;
  double sem;
};

MeanSemPair mean_sem(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n;
  return {mean, std::sqrt(var) / std::sqrt(n)};
}

std::vector<MoveSpec> split_q_moves(const Chromosome& k) {
  std::vector<MoveSpec> moves = k.decode();
  if (moves.size() != 2) {
    throw std::invalid_argument("evaluate_fitness: K chromosome must decode to two moves");
  }
  return moves;
}

MoveSpec single_p_move(const Chromosome& p) {
  std::vector<MoveSpec> moves = p.decode();
  if (moves.size() != 1) {
    throw std::invalid_argument("evaluate_fitness: P chromosome must decode to one move");
  }
  return moves[0];
}

}  // namespace

FitnessTable evaluate_fitness(const Population& pop_p, const Population& pop_k) {
  const std::size_t n_p = pop_p.members.size();
  const std::size_t n_k = pop_k.members.size();
  if (n_p == 0 || n_k == 0) {
    throw std::invalid_argument("evaluate_fitness: empty population");
  }

  std::vector<BlochMap> p_maps;
  p_maps.reserve(n_p);
  for (const Chromosome& p : pop_p.members) {
    p_maps.push_back(compile_picard(single_p_move(p)));
  }
  std::vector<QKernel> k_kernels;
  k_kernels.reserve(n_k);
  for (const Chromosome& k : pop_k.members) {
    const std::vector<MoveSpec> moves = split_q_moves(k);
    k_kernels.push_back(compile_q(moves[0], moves[1]));
  }

  FitnessTable table;
  table.n_p = n_p;
  table.n_k = n_k;
  table.payoff_q.resize(n_p * n_k);
  table.fit_p.assign(n_p, 0.0);
  table.fit_k.assign(n_k, 0.0);
  for (std::size_t ip = 0; ip < n_p; ++ip) {
    double row_sum = 0.0;
    for (std::size_t ik = 0; ik < n_k; ++ik) {
      const double pq = payoff_q_fast(k_kernels[ik], p_maps[ip]);
      table.payoff_q[ip * n_k + ik] = pq;
      row_sum += pq;
      table.fit_k[ik] += pq;
    }
    table.fit_p[ip] = -row_sum / static_cast<double>(n_k);
  }
  for (double& f : table.fit_k) f /= static_cast<double>(n_p);
  return table;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t generation, PopLabel pop) {
  const std::uint64_t tag = pop == PopLabel::picard ? 1 : 2;
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ generation) ^ tag));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x9e37));
}

std::string_view to_string(ReproductionRule rule) {
  switch (rule) {
    case ReproductionRule::crossover_then_mutate: return "crossover_then_mutate";
    case ReproductionRule::gated_mutation: return "gated_mutation";
    case ReproductionRule::either_or: return "either_or";
  }
  return "unknown";
}

std::string_view to_string(UpdateOrder update) {
  switch (update) {
    case UpdateOrder::parallel: return "parallel";
    case UpdateOrder::sequential: return "sequential";
  }
  return "unknown";
}

std::size_t tournament_select(std::span<const double> fitness, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
  const std::size_t i = pick(rng);
  const std::size_t j = pick(rng);
  if (fitness[i] > fitness[j]) return i;
  if (fitness[j] > fitness[i]) return j;
  return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? i : j;
}

Chromosome average_crossover(const Chromosome& a, const Chromosome& b) {
  if (a.schema != b.schema) {
    throw std::invalid_argument("average_crossover: schema mismatch");
  }
  Chromosome child = a;
  for (std::size_t g = 0; g < child.genes.size(); ++g) {
    child.genes[g] = 0.5 * (a.genes[g] + b.genes[g]);
  }
  return child;
}

Chromosome gaussian_mutate(const Chromosome& c, const GaConfig& cfg, std::mt19937_64& rng) {
  Chromosome out = c;
  std::uniform_real_distribution<double> gate(0.0, 1.0);
  std::normal_distribution<double> unit_kick(0.0, 1.0);
  for (std::size_t g = 0; g < out.genes.size(); ++g) {
    if (gate(rng) < cfg.mutation_rate) {
      const GeneBounds b = c.schema->bounds(g);
      const double sigma = cfg.mutation_std * (b.hi - b.lo) / kQuarterTurn;
      out.genes[g] = std::clamp(out.genes[g] + sigma * unit_kick(rng), b.lo, b.hi);
    }
  }
  return out;
}

Population reproduce(const Population& pop, std::span<const double> fitness,
                     const GaConfig& cfg, std::mt19937_64& rng) {
  if (fitness.size() != pop.members.size()) {
    throw std::invalid_argument("reproduce: fitness size mismatch");
  }
  std::uniform_real_distribution<double> gate(0.0, 1.0);
  Population next{pop.label, pop.schema, {}};
  next.members.reserve(pop.members.size());
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    switch (cfg.rule) {
      case ReproductionRule::crossover_then_mutate: {
        const Chromosome& a = pop.members[tournament_select(fitness, rng)];
        const Chromosome& b = pop.members[tournament_select(fitness, rng)];
        next.members.push_back(gaussian_mutate(average_crossover(a, b), cfg, rng));
        break;
      }
      case ReproductionRule::gated_mutation: {
        const Chromosome& a = pop.members[tournament_select(fitness, rng)];
        const Chromosome& b = pop.members[tournament_select(fitness, rng)];
        Chromosome child = average_crossover(a, b);
        if (gate(rng) < cfg.mutant_fraction) {
          child = gaussian_mutate(child, cfg, rng);
        }
        next.members.push_back(std::move(child));
        break;
      }
      case ReproductionRule::either_or: {
        if (gate(rng) < cfg.mutant_fraction) {
          const Chromosome& a = pop.members[tournament_select(fitness, rng)];
          next.members.push_back(gaussian_mutate(a, cfg, rng));
        } else {
          const Chromosome& a = pop.members[tournament_select(fitness, rng)];
          const Chromosome& b = pop.members[tournament_select(fitness, rng)];
          next.members.push_back(average_crossover(a, b));
        }
        break;
      }
    }
  }
  return next;
}

void next_generation(Population& pop_p, Population& pop_k, const FitnessTable& table,
                     const GaConfig& cfg, std::uint64_t generation) {
  std::mt19937_64 rng_p = substream(cfg.rng_seed, generation, PopLabel::picard);
  std::mt19937_64 rng_k = substream(cfg.rng_seed, generation, PopLabel::q);
  if (cfg.update == UpdateOrder::parallel) {
    Population next_p = reproduce(pop_p, table.fit_p, cfg, rng_p);
    Population next_k = reproduce(pop_k, table.fit_k, cfg, rng_k);
    pop_p = std::move(next_p);
    pop_k = std::move(next_k);
  } else {
    // K reproduces against the current P; P then reproduces against the new K.
    Population next_k = reproduce(pop_k, table.fit_k, cfg, rng_k);
    const FitnessTable refreshed = evaluate_fitness(pop_p, next_k);
    Population next_p = reproduce(pop_p, refreshed.fit_p, cfg, rng_p);
    pop_p = std::move(next_p);
    pop_k = std::move(next_k);
  }
}

namespace {

GenStats snapshot(std::uint64_t generation, const FitnessTable& table,
                  const Population& pop_p, const Population& pop_k) {
  GenStats s;
  s.generation = generation;
  const MeanSemPair fp = mean_sem(table.fit_p);
  const MeanSemPair fk = mean_sem(table.fit_k);
  s.mean_fit_p = fp.mean;
  s.sem_fit_p = fp.sem;
  s.mean_fit_k = fk.mean;
  s.sem_fit_k = fk.sem;
  auto gene_stats = [](const Population& pop, std::vector<double>& means,
                       std::vector<double>& sems) {
    const std::size_t n_genes = pop.schema->gene_count();
    std::vector<double> column(pop.members.size());
    for (std::size_t g = 0; g < n_genes; ++g) {
      for (std::size_t i = 0; i < pop.members.size(); ++i) {
        column[i] = pop.members[i].genes[g];
      }
      const MeanSemPair ms = mean_sem(column);
      means.push_back(ms.mean);
      sems.push_back(ms.sem);
    }
  };
  gene_stats(pop_p, s.gene_mean_p, s.gene_sem_p);
  gene_stats(pop_k, s.gene_mean_k, s.gene_sem_k);
  return s;
}

}  // namespace

EvolutionResult run_evolution(Population seed_p, Population seed_k, const GaConfig& cfg) {
  EvolutionResult result;
  result.history.reserve(cfg.max_gen + 1);
  Population pop_p = std::move(seed_p);
  Population pop_k = std::move(seed_k);
  for (std::uint64_t gen = 0;; ++gen) {
    const FitnessTable table = evaluate_fitness(pop_p, pop_k);
    result.history.push_back(snapshot(gen, table, pop_p, pop_k));
    if (gen == cfg.max_gen) break;
    next_generation(pop_p, pop_k, table, cfg, gen);
  }
  result.final_p = std::move(pop_p);
  result.final_k = std::move(pop_k);
  return result;
}

}  // namespace pennyflip
