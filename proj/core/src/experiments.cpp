#include "pennyflip/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pennyflip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kQuarterPi = std::numbers::pi / 4.0;

// Elementwise tolerance when matching Picard's branch unitaries to the named
// template operators.
constexpr double kOperatorTol = 0.1;

Population make_population(PopLabel label, SchemaKind kind, std::size_t n) {
  const Schema& schema = Schema::of(kind);
  Population pop{label, &schema, {}};
  pop.members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop.members.push_back(Chromosome{&schema, std::vector<double>(schema.gene_count(), 0.0)});
  }
  return pop;
}

// K's seed in sim1 and sim3: one move pinned to theta = pi/4 with a random
// phi, the other fully random; the pinned slot alternates by member parity.
void fill_k_invader(Population& pop, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phi(0.0, kPi);
  std::uniform_real_distribution<double> theta(0.0, kHalfPi);
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    const double u = phi(rng);
    const double r = theta(rng);
    const double s = phi(rng);
    std::vector<double>& g = pop.members[i].genes;
    if (i % 2 == 0) {
      g = {kQuarterPi, u, r, s};
    } else {
      g = {r, s, kQuarterPi, u};
    }
  }
}

std::size_t tail_window(std::size_t n, double frac) {
  const auto w = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));
  return std::clamp<std::size_t>(w, 1, n);
}

double tail_mean_abs(const std::vector<GenStats>& history, std::size_t window,
                     double GenStats::* field) {
  double acc = 0.0;
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    acc += std::abs(history[i].*field);
  }
  return acc / static_cast<double>(window);
}

std::vector<double> tail_mean_genes(const std::vector<GenStats>& history, std::size_t window,
                                    std::vector<double> GenStats::* field) {
  const std::size_t n_genes = (history.back().*field).size();
  std::vector<double> out(n_genes, 0.0);
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    const std::vector<double>& v = history[i].*field;
    for (std::size_t g = 0; g < n_genes; ++g) out[g] += v[g];
  }
  for (double& x : out) x /= static_cast<double>(window);
  return out;
}

RunResult run_single(const ScenarioSpec& spec, std::size_t run_index) {
  RunResult r;
  r.run_index = run_index;
  r.run_seed = derive_seed(spec.ga.rng_seed, run_index);

  std::mt19937_64 seed_rng(r.run_seed);
  auto [pop_p, pop_k] = seed_scenario(spec.id, seed_rng, spec.ga.pop_size);

  GaConfig cfg = spec.ga;
  cfg.rng_seed = r.run_seed;
  r.evo = run_evolution(std::move(pop_p), std::move(pop_k), cfg);

  const std::vector<GenStats>& history = r.evo.history;
  const std::size_t w_conv = tail_window(history.size(), kConvergenceTailFrac);
  r.converged = tail_mean_abs(history, w_conv, &GenStats::mean_fit_p) < kConvergenceLevel &&
                tail_mean_abs(history, w_conv, &GenStats::mean_fit_k) < kConvergenceLevel;

  const std::size_t w_rep = tail_window(history.size(), kRepresentativeTailFrac);
  r.rep_p = tail_mean_genes(history, w_rep, &GenStats::gene_mean_p);
  r.rep_k = tail_mean_genes(history, w_rep, &GenStats::gene_mean_k);

  if (spec.id == Scenario::sim3 && r.converged) {
    const Chromosome rep_k{r.evo.final_k.schema, r.rep_k};
    const Chromosome rep_p{r.evo.final_p.schema, r.rep_p};
    r.category = classify_final(rep_k, rep_p);
  }
  return r;
}

nlohmann::json genes_json(const std::vector<double>& genes) {
  return nlohmann::json(genes);
}

nlohmann::json config_json(const ScenarioSpec& spec) {
  return nlohmann::json{{"scenario", to_string(spec.id)},
                        {"n_runs", spec.n_runs},
                        {"pop_size", spec.ga.pop_size},
                        {"max_gen", spec.ga.max_gen},
                        {"mutation_rate", spec.ga.mutation_rate},
                        {"mutation_std", spec.ga.mutation_std},
                        {"mutant_fraction", spec.ga.mutant_fraction},
                        {"rng_seed", spec.ga.rng_seed},
                        {"rule", to_string(spec.ga.rule)},
                        {"update", to_string(spec.ga.update)}};
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::sim1: return "sim1";
    case Scenario::sim2: return "sim2";
    case Scenario::sim3: return "sim3";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  if (name == "sim1") return Scenario::sim1;
  if (name == "sim2") return Scenario::sim2;
  if (name == "sim3") return Scenario::sim3;
  return std::nullopt;
}

std::string_view to_string(CategoryLabel label) {
  switch (label) {
    case CategoryLabel::cat1: return "cat1";
    case CategoryLabel::cat2: return "cat2";
    case CategoryLabel::cat3: return "cat3";
    case CategoryLabel::cat4: return "cat4";
    case CategoryLabel::unclassified: return "unclassified";
  }
  return "unknown";
}

ScenarioSpec make_scenario(Scenario id) {
  ScenarioSpec spec;
  spec.id = id;
  spec.ga.max_gen = id == Scenario::sim3 ? 10000 : 500;
  return spec;
}

std::pair<Population, Population> seed_sim1(std::mt19937_64& rng, std::size_t pop_size) {
  Population pop_p = make_population(PopLabel::picard, SchemaKind::classical_one, pop_size);
  for (Chromosome& c : pop_p.members) c.genes = {0.5};
  Population pop_k = make_population(PopLabel::q, SchemaKind::pure_pair, pop_size);
  fill_k_invader(pop_k, rng);
  return {std::move(pop_p), std::move(pop_k)};
}

std::pair<Population, Population> seed_sim2(std::mt19937_64& rng, std::size_t pop_size) {
  std::uniform_real_distribution<double> phi(0.0, kPi);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  Population pop_p = make_population(PopLabel::picard, SchemaKind::pure_one, pop_size);
  for (Chromosome& c : pop_p.members) c.genes = {kQuarterPi, phi(rng)};
  Population pop_k = make_population(PopLabel::q, SchemaKind::classical_pair, pop_size);
  for (std::size_t i = 0; i < pop_k.members.size(); ++i) {
    const double x = prob(rng);
    pop_k.members[i].genes = i % 2 == 0 ? std::vector<double>{0.5, x}
                                        : std::vector<double>{x, 0.5};
  }
  return {std::move(pop_p), std::move(pop_k)};
}

std::pair<Population, Population> seed_sim3(std::mt19937_64& rng, std::size_t pop_size) {
  Population pop_p = make_population(PopLabel::picard, SchemaKind::mixed_one, pop_size);
  for (Chromosome& c : pop_p.members) c.genes = {0.5, kHalfPi, kPi, 0.0, 0.0};
  Population pop_k = make_population(PopLabel::q, SchemaKind::pure_pair, pop_size);
  fill_k_invader(pop_k, rng);
  return {std::move(pop_p), std::move(pop_k)};
}

std::pair<Population, Population> seed_scenario(Scenario id, std::mt19937_64& rng,
                                                std::size_t pop_size) {
  switch (id) {
    case Scenario::sim1: return seed_sim1(rng, pop_size);
    case Scenario::sim2: return seed_sim2(rng, pop_size);
    case Scenario::sim3: return seed_sim3(rng, pop_size);
  }
  throw std::invalid_argument("seed_scenario: unknown scenario");
}

namespace {

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

bool op_near(double theta, double phi, NamedOp op) {
  return max_abs_diff(make_unitary(StrategyParams(theta, phi)).mat(),
                      named_operator(op).mat()) <= kOperatorTol;
}

}  // namespace

CategoryLabel classify_final(const Chromosome& k_member, const Chromosome& p_member,
                             double tol) {
  if (k_member.schema->kind() != SchemaKind::pure_pair ||
      p_member.schema->kind() != SchemaKind::mixed_one) {
    throw std::invalid_argument("classify_final: expected pure-pair K and mixed-one P");
  }
  const double t1 = k_member.genes[0];
  const double t2 = k_member.genes[2];
  const double f2 = k_member.genes[3];
  const double ta = p_member.genes[1];
  const double fa = p_member.genes[2];
  const double tb = p_member.genes[3];
  const double fb = p_member.genes[4];
  auto pair_is = [&](NamedOp x, NamedOp y) {
    return (op_near(ta, fa, x) && op_near(tb, fb, y)) ||
           (op_near(ta, fa, y) && op_near(tb, fb, x));
  };
  if (near(t1, kQuarterPi, tol) && near(f2, kHalfPi, tol)) {
    if (pair_is(NamedOp::sigma1, NamedOp::sigma3)) return CategoryLabel::cat1;
    if (pair_is(NamedOp::sigma2, NamedOp::identity)) return CategoryLabel::cat2;
  }
  if (near(t1, 0.0, tol) && near(t2, kQuarterPi, tol) && near(f2, kPi, tol) &&
      pair_is(NamedOp::sigma3, NamedOp::sigma2)) {
    return CategoryLabel::cat3;
  }
  if (near(t1, kHalfPi, tol) && near(t2, kQuarterPi, tol) && near(f2, 0.0, tol) &&
      pair_is(NamedOp::identity, NamedOp::sigma1)) {
    return CategoryLabel::cat4;
  }
  return CategoryLabel::unclassified;
}

MeanSem aggregate(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("aggregate: empty input");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  return MeanSem{mean, std::sqrt(var) / std::sqrt(n)};
}

BatchResult run_batch(const ScenarioSpec& spec, unsigned workers) {
  BatchResult batch;
  batch.spec = spec;
  batch.runs.resize(spec.n_runs);

  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.n_runs) return;
      batch.runs[i] = run_single(spec, i);
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    const unsigned n_threads = std::min<unsigned>(workers, spec.n_runs);
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }

  if (!batch.runs.empty()) {
    const std::size_t n_gens = batch.runs.front().evo.history.size();
    std::vector<double> column(batch.runs.size());
    auto collect = [&](std::size_t gen, double GenStats::* field) {
      for (std::size_t r = 0; r < batch.runs.size(); ++r) {
        column[r] = batch.runs[r].evo.history[gen].*field;
      }
      return aggregate(column);
    };
    for (std::size_t gen = 0; gen < n_gens; ++gen) {
      const MeanSem p = collect(gen, &GenStats::mean_fit_p);
      const MeanSem k = collect(gen, &GenStats::mean_fit_k);
      batch.x_mean_fit_p.push_back(p.mean);
      batch.x_sem_fit_p.push_back(p.sem);
      batch.x_mean_fit_k.push_back(k.mean);
      batch.x_sem_fit_k.push_back(k.sem);
    }
  }
  return batch;
}

std::array<std::size_t, 5> category_histogram(std::span<const RunResult> runs) {
  std::array<std::size_t, 5> counts{};
  for (const RunResult& r : runs) {
    if (!r.converged) continue;
    counts[static_cast<std::size_t>(r.category)] += 1;
  }
  return counts;
}

void write_runs_csv(std::ostream& os, const BatchResult& batch) {
  char buf[40];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string_view(buf);
  };

  const std::string_view scenario = to_string(batch.spec.id);
  std::string header = "scenario,run,generation,meanFitP,semFitP,meanFitK,semFitK";
  if (!batch.runs.empty()) {
    const Population& pop_p = batch.runs.front().evo.final_p;
    const Population& pop_k = batch.runs.front().evo.final_k;
    for (const std::string& g : pop_p.schema->gene_names()) {
      header += ",p_" + g + "_mean,p_" + g + "_sem";
    }
    for (const std::string& g : pop_k.schema->gene_names()) {
      header += ",k_" + g + "_mean,k_" + g + "_sem";
    }
  }
  os << header << '\n';

  std::string line;
  for (const RunResult& run : batch.runs) {
    for (const GenStats& s : run.evo.history) {
      line.clear();
      line += scenario;
      line += ',';
      line += std::to_string(run.run_index);
      line += ',';
      line += std::to_string(s.generation);
      for (double v : {s.mean_fit_p, s.sem_fit_p, s.mean_fit_k, s.sem_fit_k}) {
        line += ',';
        line += fmt(v);
      }
      auto append_genes = [&](const std::vector<double>& means,
                              const std::vector<double>& sems) {
        for (std::size_t g = 0; g < means.size(); ++g) {
          line += ',';
          line += fmt(means[g]);
          line += ',';
          line += fmt(sems[g]);
        }
      };
      append_genes(s.gene_mean_p, s.gene_sem_p);
      append_genes(s.gene_mean_k, s.gene_sem_k);
      line += '\n';
      os << line;
    }
  }
}

void write_batch_summary_json(std::ostream& os, const BatchResult& batch) {
  nlohmann::json j;
  j["config"] = config_json(batch.spec);

  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : batch.runs) {
    const GenStats& last = r.evo.history.back();
    runs.push_back({{"run", r.run_index},
                    {"seed", r.run_seed},
                    {"converged", r.converged},
                    {"category", to_string(r.category)},
                    {"final_fit_p", last.mean_fit_p},
                    {"final_fit_k", last.mean_fit_k},
                    {"final_gene_mean_p", genes_json(last.gene_mean_p)},
                    {"final_gene_mean_k", genes_json(last.gene_mean_k)},
                    {"rep_p", genes_json(r.rep_p)},
                    {"rep_k", genes_json(r.rep_k)}});
  }
  j["runs"] = std::move(runs);

  const std::array<std::size_t, 5> hist = category_histogram(batch.runs);
  j["category_histogram"] = {{"cat1", hist[0]},
                             {"cat2", hist[1]},
                             {"cat3", hist[2]},
                             {"cat4", hist[3]},
                             {"unclassified", hist[4]}};
  std::size_t converged = 0;
  for (const RunResult& r : batch.runs) converged += r.converged ? 1 : 0;
  j["converged_runs"] = converged;

  if (!batch.x_mean_fit_p.empty()) {
    double max_p = 0.0;
    double max_k = 0.0;
    for (double v : batch.x_mean_fit_p) max_p = std::max(max_p, std::abs(v));
    for (double v : batch.x_mean_fit_k) max_k = std::max(max_k, std::abs(v));
    j["cross_run"] = {{"final_mean_fit_p", batch.x_mean_fit_p.back()},
                      {"final_sem_fit_p", batch.x_sem_fit_p.back()},
                      {"final_mean_fit_k", batch.x_mean_fit_k.back()},
                      {"final_sem_fit_k", batch.x_sem_fit_k.back()},
                      {"max_abs_mean_fit_p", max_p},
                      {"max_abs_mean_fit_k", max_k}};
  }
  os << j.dump(2) << '\n';
}

void write_populations_json(std::ostream& os, const BatchResult& batch) {
  nlohmann::json j;
  j["scenario"] = to_string(batch.spec.id);
  if (!batch.runs.empty()) {
    j["schema_p"] = batch.runs.front().evo.final_p.schema->gene_names();
    j["schema_k"] = batch.runs.front().evo.final_k.schema->gene_names();
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : batch.runs) {
    auto members = [](const Population& pop) {
      nlohmann::json out = nlohmann::json::array();
      for (const Chromosome& c : pop.members) out.push_back(c.genes);
      return out;
    };
    runs.push_back({{"run", r.run_index},
                    {"seed", r.run_seed},
                    {"converged", r.converged},
                    {"category", to_string(r.category)},
                    {"rep_p", genes_json(r.rep_p)},
                    {"rep_k", genes_json(r.rep_k)},
                    {"final_p", members(r.evo.final_p)},
                    {"final_k", members(r.evo.final_k)}});
  }
  j["runs"] = std::move(runs);
  os << j.dump(2) << '\n';
}

}  // namespace pennyflip
