// Command line driver. Three subcommands:
//   run       simulate a scenario batch and write CSV/JSON artifacts
//   verify    check the closed-form oracles, equilibrium certificates, or
//             the cyclic dominance chain, printing a JSON report
//   classify  reload a finished batch and summarise its final populations

#include "pennyflip/experiments.hpp"
#include "pennyflip/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pennyflip;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, last - first + 1);
}

// Flat key=value config file; '#' starts a comment. Keys match the run
// subcommand's flag names without the leading dashes.
std::map<std::string, std::string> read_kv_config(const std::string& path) {
  static const std::set<std::string> known{
      "scenario", "runs",   "max-gen", "pop-size", "mutation-rate",
      "mutation-std", "seed", "out",   "workers",  "format"};
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!known.contains(key))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown config key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::uint64_t parse_u64(const std::string& value, const std::string& field) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("invalid value '" + value + "' for " + field);
  }
}

double parse_real(const std::string& value, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("invalid value '" + value + "' for " + field);
  }
}

void check_range(double value, double lo, double hi, const std::string& field) {
  if (value < lo || value > hi) {
    std::ostringstream os;
    os << field << " must be in [" << lo << ", " << hi << "], got " << value;
    throw std::runtime_error(os.str());
  }
}

std::string rule_name(ReproductionRule rule) {
  switch (rule) {
    case ReproductionRule::crossover_then_mutate: return "crossover_then_mutate";
    case ReproductionRule::gated_mutation: return "gated_mutation";
    case ReproductionRule::either_or: return "either_or";
  }
  return "unknown";
}

std::string update_name(UpdateOrder update) {
  return update == UpdateOrder::sequential ? "sequential" : "parallel";
}

nlohmann::json spec_json(const ScenarioSpec& spec) {
  return nlohmann::json{{"scenario", std::string(to_string(spec.id))},
                        {"n_runs", spec.n_runs},
                        {"pop_size", spec.ga.pop_size},
                        {"max_gen", spec.ga.max_gen},
                        {"mutation_rate", spec.ga.mutation_rate},
                        {"mutation_std", spec.ga.mutation_std},
                        {"mutant_fraction", spec.ga.mutant_fraction},
                        {"rng_seed", spec.ga.rng_seed},
                        {"rule", rule_name(spec.ga.rule)},
                        {"update", update_name(spec.ga.update)}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

int cmd_run(const ScenarioSpec& spec, const std::string& out_dir, unsigned workers,
            const std::vector<std::string>& formats) {
  const bool want_csv =
      std::find(formats.begin(), formats.end(), "csv") != formats.end();
  const bool want_json =
      std::find(formats.begin(), formats.end(), "json") != formats.end();

  fs::create_directories(out_dir);
  const BatchResult batch = run_batch(spec, workers);

  std::vector<std::string> written;
  if (want_csv) {
    std::ostringstream os;
    write_runs_csv(os, batch);
    write_text_file(fs::path(out_dir) / "runs.csv", os.str());
    written.push_back("runs.csv");
  }
  if (want_json) {
    std::ostringstream summary, pops;
    write_batch_summary_json(summary, batch);
    write_populations_json(pops, batch);
    write_text_file(fs::path(out_dir) / "summary.json", summary.str());
    write_text_file(fs::path(out_dir) / "populations.json", pops.str());
    written.push_back("summary.json");
    written.push_back("populations.json");
  }

  // Everything needed to reproduce the batch byte for byte, plus the build
  // that produced it.
  const nlohmann::json manifest{{"tool", "pennyflip"},
                                {"version", PENNYFLIP_VERSION},
                                {"compiler", __VERSION__},
                                {"command", "run"},
                                {"workers", workers},
                                {"formats", formats},
                                {"config", spec_json(spec)}};
  write_text_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  written.push_back("manifest.json");

  std::size_t converged = 0;
  for (const RunResult& r : batch.runs)
    if (r.converged) ++converged;
  std::cout << "ran " << std::string(to_string(spec.id)) << ": " << spec.n_runs
            << " runs x " << spec.ga.max_gen << " generations, " << converged
            << " converged, final mean fitness K=" << batch.x_mean_fit_k.back()
            << " P=" << batch.x_mean_fit_p.back() << "\n";
  std::cout << "wrote";
  for (const std::string& name : written) std::cout << ' ' << name;
  std::cout << " to " << out_dir << "\n";
  return 0;
}

GameProfile draw_family(OracleFamily family, std::mt19937_64& rng) {
  const StrategyParams s1 = named_operator_params(NamedOp::sigma1);
  const StrategyParams s2 = named_operator_params(NamedOp::sigma2);
  const StrategyParams s3 = named_operator_params(NamedOp::sigma3);
  const StrategyParams id = named_operator_params(NamedOp::identity);
  std::uniform_real_distribution<double> th(0.0, pi / 2), ph(0.0, pi), pr(0.0, 1.0);
  switch (family) {
    case OracleFamily::classical:
      return {ClassicalMixed{pr(rng)}, ClassicalMixed{pr(rng)},
              ClassicalMixed{pr(rng)}};
    case OracleFamily::winning_q:
      return {PureQuantum{StrategyParams(pi / 4, ph(rng))}, ClassicalMixed{pr(rng)},
              PureQuantum{StrategyParams(pi / 4, pi)}};
    case OracleFamily::stuck_pair:
      return {ClassicalMixed{pr(rng)}, PureQuantum{StrategyParams(pi / 4, ph(rng))},
              ClassicalMixed{pr(rng)}};
    case OracleFamily::cat1:
      return {PureQuantum{StrategyParams(pi / 4, ph(rng))},
              MixedTwoUnitary{pr(rng), s1, s3},
              PureQuantum{StrategyParams(th(rng), pi / 2)}};
    case OracleFamily::cat2:
      return {PureQuantum{StrategyParams(pi / 4, ph(rng))},
              MixedTwoUnitary{pr(rng), s2, id},
              PureQuantum{StrategyParams(th(rng), pi / 2)}};
    case OracleFamily::cat3:
      return {PureQuantum{StrategyParams(0.0, ph(rng))},
              MixedTwoUnitary{pr(rng), s3, s2},
              PureQuantum{StrategyParams(pi / 4, pi)}};
    default:
      return {PureQuantum{StrategyParams(pi / 2, ph(rng))},
              MixedTwoUnitary{pr(rng), id, s1},
              PureQuantum{StrategyParams(th(rng), 0.0)}};
  }
}

int verify_oracles() {
  constexpr OracleFamily families[] = {
      OracleFamily::classical, OracleFamily::winning_q, OracleFamily::stuck_pair,
      OracleFamily::cat1,      OracleFamily::cat2,      OracleFamily::cat3,
      OracleFamily::cat4};
  constexpr double tol = 1e-12;
  std::mt19937_64 rng(20240);
  nlohmann::json per_family = nlohmann::json::object();
  bool ok = true;
  for (OracleFamily family : families) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
      worst = std::max(worst, check_oracle_agreement(draw_family(family, rng)));
    per_family[std::string(to_string(family))] = worst;
    ok = ok && worst < tol;
  }
  const nlohmann::json report{{"target", "oracles"},
                              {"draws_per_family", 100},
                              {"tolerance", tol},
                              {"worst_deviation", per_family},
                              {"pass", ok}};
  std::cout << report.dump(2) << "\n";
  return ok ? 0 : 1;
}

int verify_ne() {
  const StrategyParams s1 = named_operator_params(NamedOp::sigma1);
  const StrategyParams s2 = named_operator_params(NamedOp::sigma2);
  const StrategyParams s3 = named_operator_params(NamedOp::sigma3);
  const StrategyParams id = named_operator_params(NamedOp::identity);

  struct Case {
    std::string name;
    NeCertificate cert;
    NeVerdict expected;
  };
  const std::vector<std::size_t> free_axis{1};
  std::vector<Case> cases;
  cases.push_back({"classical_es",
                   certify_ne({ClassicalMixed{0.5}, ClassicalMixed{0.3}},
                              ClassicalMixed{0.5}, {}, 1e-9, free_axis),
                   NeVerdict::ne_pair});
  cases.push_back({"cat1",
                   certify_ne({PureQuantum{StrategyParams(pi / 4, 1.1)},
                               PureQuantum{StrategyParams(pi / 4, pi / 2)}},
                              MixedTwoUnitary{0.5, s1, s3}),
                   NeVerdict::ne_pair});
  cases.push_back({"cat2",
                   certify_ne({PureQuantum{StrategyParams(pi / 4, 2.0)},
                               PureQuantum{StrategyParams(pi / 4, pi / 2)}},
                              MixedTwoUnitary{0.5, s2, id}),
                   NeVerdict::ne_pair});
  cases.push_back({"cat3",
                   certify_ne({PureQuantum{StrategyParams(0.0, 0.3)},
                               PureQuantum{StrategyParams(pi / 4, pi)}},
                              MixedTwoUnitary{0.5, s3, s2}),
                   NeVerdict::refuted});
  cases.push_back({"cat4",
                   certify_ne({PureQuantum{StrategyParams(pi / 2, 0.7)},
                               PureQuantum{StrategyParams(pi / 4, 0.0)}},
                              MixedTwoUnitary{0.5, id, s1}),
                   NeVerdict::refuted});

  bool ok = true;
  nlohmann::json certs = nlohmann::json::array();
  for (const Case& c : cases) {
    const bool expects_witness = c.expected == NeVerdict::refuted;
    const bool pass = c.cert.verdict == c.expected &&
                      c.cert.witness.has_value() == expects_witness;
    nlohmann::json entry = nlohmann::json::parse(c.cert.to_json());
    entry["name"] = c.name;
    entry["expected"] = std::string(to_string(c.expected));
    entry["pass"] = pass;
    certs.push_back(entry);
    if (!pass && ok) {
      std::cerr << "first failing certificate:\n" << c.cert.to_json() << "\n";
      ok = false;
    }
  }
  const nlohmann::json report{
      {"target", "ne"}, {"certificates", certs}, {"pass", ok}};
  std::cout << report.dump(2) << "\n";
  return ok ? 0 : 1;
}

int verify_cycle() {
  const std::vector<DominanceLink> links = cyclic_dominance_table();
  nlohmann::json arr = nlohmann::json::array();
  for (const DominanceLink& link : links)
    arr.push_back({{"winner", link.winner},
                   {"loser", link.loser},
                   {"winner_payoff", link.winner_payoff}});
  bool ok = links.size() == 4;
  for (const DominanceLink& link : links) ok = ok && link.winner_payoff > 0.0;
  // Each link's loser must be the winner of the preceding link, and the last
  // winner must be the first loser, closing the cycle.
  if (ok)
    for (std::size_t i = 0; i < 4; ++i)
      ok = ok && links[(i + 1) % 4].loser == links[i].winner;
  const nlohmann::json report{{"target", "cycle"},
                              {"links", arr},
                              {"closed", ok},
                              {"pass", ok}};
  std::cout << report.dump(2) << "\n";
  return ok ? 0 : 1;
}

// Batches store tail-averaged representative genes per run; classification
// reapplies the category templates to those representatives so the stored
// labels are not simply echoed back.
int cmd_classify(const std::string& batch_dir) {
  const fs::path pops_path = fs::path(batch_dir) / "populations.json";
  if (!fs::exists(pops_path)) {
    std::cerr << "error: " << pops_path.string()
              << " not found (is this a batch output directory?)\n";
    return 1;
  }
  nlohmann::json pops;
  try {
    std::ifstream is(pops_path);
    pops = nlohmann::json::parse(is);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot parse " << pops_path.string() << ": " << e.what()
              << "\n";
    return 1;
  }

  const auto scenario = parse_scenario(pops.value("scenario", ""));
  if (!scenario) {
    std::cerr << "error: " << pops_path.string()
              << " has no valid scenario field\n";
    return 1;
  }

  std::map<std::string, std::size_t> counts;
  std::size_t converged = 0, total = 0;
  try {
    for (const nlohmann::json& run : pops.at("runs")) {
      ++total;
      if (run.at("converged").get<bool>()) ++converged;
      const auto rep_k = run.at("rep_k").get<std::vector<double>>();
      const auto rep_p = run.at("rep_p").get<std::vector<double>>();
      switch (*scenario) {
        case Scenario::sim1: {
          // The winning template fixes both K thetas and the closing phi.
          const bool winning = std::abs(rep_k.at(0) - pi / 4) <= 0.15 &&
                               std::abs(rep_k.at(2) - pi / 4) <= 0.15 &&
                               std::abs(rep_k.at(3) - pi) <= 0.3;
          ++counts[winning ? "winning_template" : "other"];
          break;
        }
        case Scenario::sim2: {
          // Picard's tie-holding template fixes only theta.
          const bool half = std::abs(rep_p.at(0) - pi / 4) <= 0.15;
          ++counts[half ? "half_half_template" : "other"];
          break;
        }
        case Scenario::sim3: {
          // Categories are defined over tie-converged runs only.
          if (!run.at("converged").get<bool>()) {
            ++counts["unconverged"];
            break;
          }
          const Chromosome k{&Schema::of(SchemaKind::pure_pair), rep_k};
          const Chromosome p{&Schema::of(SchemaKind::mixed_one), rep_p};
          ++counts[std::string(to_string(classify_final(k, p)))];
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: malformed run record in " << pops_path.string() << ": "
              << e.what() << "\n";
    return 1;
  }

  const nlohmann::json report{{"scenario", std::string(to_string(*scenario))},
                              {"total_runs", total},
                              {"converged", converged},
                              {"histogram", counts}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum penny flip coevolution toolkit"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand(
      "run", "Run a scenario batch and write artifacts to a directory");
  std::string config_path;
  run->add_option("--config", config_path,
                  "Read defaults from a flat key=value file")
      ->check(CLI::ExistingFile);
  std::string scenario_name = "sim1";
  std::size_t n_runs = 0;
  long long max_gen = -1;
  std::size_t pop_size = 0;
  double mutation_rate = -1.0, mutation_std = -1.0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  unsigned workers = 1;
  std::vector<std::string> formats{"csv", "json"};
  run->add_option("--scenario", scenario_name, "Scenario id (sim1, sim2, sim3)")
      ->check(CLI::IsMember({"sim1", "sim2", "sim3"}))
      ->capture_default_str();
  run->add_option("--runs", n_runs, "Number of runs in the batch (default 20)")
      ->check(CLI::PositiveNumber);
  run->add_option("--max-gen", max_gen,
                  "Generations per run (default 500; 10000 for sim3)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--pop-size", pop_size, "Members per population (default 50)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  run->add_option("--mutation-rate", mutation_rate,
                  "Per-gene mutation probability (default 0.2)")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--mutation-std", mutation_std,
                  "Mutation kick scale (default 0.2)")
      ->check(CLI::Range(0.0, 10.0));
  run->add_option("--seed", seed, "Master RNG seed (default 0)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads for the batch")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--format", formats, "Artifact formats (csv, json)")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json"}));

  // verify
  CLI::App* verify = app.add_subcommand(
      "verify", "Check oracles, equilibrium certificates, or the dominance cycle");
  std::string target;
  verify->add_option("target", target, "One of: oracles, ne, cycle")
      ->required()
      ->check(CLI::IsMember({"oracles", "ne", "cycle"}));

  // classify
  CLI::App* classify = app.add_subcommand(
      "classify", "Summarise the final populations of a finished batch");
  std::string batch_dir;
  classify->add_option("batch_dir", batch_dir, "Directory written by `run`")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      // Precedence: command line beats config file beats scenario defaults.
      std::map<std::string, std::string> file;
      if (!config_path.empty()) file = read_kv_config(config_path);
      const auto cli_set = [&](const char* flag) { return run->count(flag) > 0; };

      if (!cli_set("--scenario") && file.contains("scenario"))
        scenario_name = file["scenario"];
      const auto scenario = parse_scenario(scenario_name);
      if (!scenario)
        throw std::runtime_error("invalid value '" + scenario_name +
                                 "' for scenario");
      ScenarioSpec spec = make_scenario(*scenario);

      if (cli_set("--runs"))
        spec.n_runs = n_runs;
      else if (file.contains("runs"))
        spec.n_runs = parse_u64(file["runs"], "runs");
      if (cli_set("--max-gen"))
        spec.ga.max_gen = std::size_t(max_gen);
      else if (file.contains("max-gen"))
        spec.ga.max_gen = parse_u64(file["max-gen"], "max-gen");
      if (cli_set("--pop-size"))
        spec.ga.pop_size = pop_size;
      else if (file.contains("pop-size"))
        spec.ga.pop_size = parse_u64(file["pop-size"], "pop-size");
      if (cli_set("--mutation-rate"))
        spec.ga.mutation_rate = mutation_rate;
      else if (file.contains("mutation-rate"))
        spec.ga.mutation_rate = parse_real(file["mutation-rate"], "mutation-rate");
      if (cli_set("--mutation-std"))
        spec.ga.mutation_std = mutation_std;
      else if (file.contains("mutation-std"))
        spec.ga.mutation_std = parse_real(file["mutation-std"], "mutation-std");
      if (cli_set("--seed"))
        spec.ga.rng_seed = seed;
      else if (file.contains("seed"))
        spec.ga.rng_seed = parse_u64(file["seed"], "seed");
      if (!cli_set("--out") && file.contains("out")) out_dir = file["out"];
      if (cli_set("--workers"))
        ;  // already bound
      else if (file.contains("workers"))
        workers = unsigned(parse_u64(file["workers"], "workers"));
      if (!cli_set("--format") && file.contains("format")) {
        formats.clear();
        std::stringstream ss(file["format"]);
        std::string item;
        while (std::getline(ss, item, ',')) formats.push_back(trim(item));
      }

      if (spec.n_runs == 0) throw std::runtime_error("runs must be at least 1");
      if (spec.ga.pop_size < 2)
        throw std::runtime_error("pop-size must be at least 2");
      if (workers == 0) throw std::runtime_error("workers must be at least 1");
      check_range(spec.ga.mutation_rate, 0.0, 1.0, "mutation-rate");
      check_range(spec.ga.mutation_std, 0.0, 10.0, "mutation-std");
      for (const std::string& f : formats)
        if (f != "csv" && f != "json")
          throw std::runtime_error("invalid value '" + f + "' for format");
      return cmd_run(spec, out_dir, workers, formats);
    }
    if (verify->parsed()) {
      if (target == "oracles") return verify_oracles();
      if (target == "ne") return verify_ne();
      return verify_cycle();
    }
    return cmd_classify(batch_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
