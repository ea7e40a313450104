#include "pennyflip/strategy.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace pennyflip;

namespace {

constexpr double pi = std::numbers::pi;
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

Mat2 mat(Complex a, Complex b, Complex c, Complex d) { return Mat2{{a, b, c, d}}; }

std::vector<double> random_genes(const Schema& schema, std::mt19937_64& rng) {
  std::vector<double> genes(schema.gene_count());
  for (std::size_t g = 0; g < genes.size(); ++g) {
    const GeneBounds b = schema.bounds(g);
    genes[g] = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
  }
  return genes;
}

}  // namespace

TEST_CASE("StrategyParams enforces the angle ranges") {
  CHECK_NOTHROW(StrategyParams(0.0, 0.0));
  CHECK_NOTHROW(StrategyParams(pi / 2, pi));
  CHECK_THROWS_AS(StrategyParams(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StrategyParams(pi / 2 + 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StrategyParams(0.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(StrategyParams(0.0, pi + 0.1), std::invalid_argument);
}

TEST_CASE("make_unitary reproduces the named gates") {
  CHECK(max_abs_diff(make_unitary(StrategyParams(pi / 2, pi)).mat(),
                     mat(0, 1, 1, 0)) < 1e-12);
  CHECK(max_abs_diff(make_unitary(StrategyParams(0, 0)).mat(),
                     Mat2::identity()) < 1e-12);
  CHECK(max_abs_diff(make_unitary(StrategyParams(pi / 4, pi)).mat(),
                     mat(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2)) < 1e-12);
}

TEST_CASE("make_unitary output is unitary across the parameter space") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, pi / 2), ph(0.0, pi);
  for (int i = 0; i < 1000; ++i) {
    const Mat2 u = make_unitary(StrategyParams(th(rng), ph(rng))).mat();
    CHECK(max_abs_diff(mat_mul(u, conjugate_transpose(u)), Mat2::identity()) < 1e-12);
  }
}

TEST_CASE("move_to_branches on the three move kinds") {
  SUBCASE("classical mixed splits into flip and no-flip") {
    const auto branches = move_to_branches(ClassicalMixed{0.5});
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].prob == 0.5);
    CHECK(max_abs_diff(branches[0].u.mat(), mat(0, 1, 1, 0)) < 1e-12);
    CHECK(branches[1].prob == 0.5);
    CHECK(max_abs_diff(branches[1].u.mat(), Mat2::identity()) < 1e-12);
  }

  SUBCASE("pure quantum is a single branch") {
    const auto branches = move_to_branches(PureQuantum{StrategyParams(pi / 4, pi)});
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].prob == 1.0);
    CHECK(max_abs_diff(branches[0].u.mat(),
                       mat(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2)) < 1e-12);
  }

  SUBCASE("mixed two-unitary keeps its operators and weight") {
    const MixedTwoUnitary move{0.3, StrategyParams(pi / 2, 0), StrategyParams(0, 0)};
    const auto branches = move_to_branches(move);
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].prob == 0.3);
    CHECK(max_abs_diff(branches[0].u.mat(), mat(0, -1, 1, 0)) < 1e-12);
    CHECK(branches[1].prob == doctest::Approx(0.7));
    CHECK(max_abs_diff(branches[1].u.mat(), Mat2::identity()) < 1e-12);
  }

  SUBCASE("branch probabilities always sum to one") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pr(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const auto branches = move_to_branches(ClassicalMixed{pr(rng)});
      double total = 0;
      for (const WeightedUnitary& b : branches) total += b.prob;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("validate_move rejects out-of-range probabilities") {
  CHECK_NOTHROW(validate_move(ClassicalMixed{0.0}));
  CHECK_NOTHROW(validate_move(ClassicalMixed{1.0}));
  CHECK_THROWS_AS(validate_move(ClassicalMixed{-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate_move(ClassicalMixed{1.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate_move(MixedTwoUnitary{1.5, StrategyParams(0, 0),
                                                StrategyParams(0, 0)}),
                  std::invalid_argument);
}

TEST_CASE("named operators match their matrices") {
  CHECK(max_abs_diff(named_operator(NamedOp::sigma1).mat(), mat(0, 1, 1, 0)) < 1e-12);
  CHECK(max_abs_diff(named_operator(NamedOp::sigma2).mat(), mat(0, -1, 1, 0)) < 1e-12);
  CHECK(max_abs_diff(named_operator(NamedOp::sigma3).mat(), mat(1, 0, 0, -1)) < 1e-12);
  CHECK(max_abs_diff(named_operator(NamedOp::identity).mat(), Mat2::identity()) < 1e-12);
  CHECK(max_abs_diff(named_operator(NamedOp::hadamard).mat(),
                     mat(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2)) < 1e-12);

  // sigma1 sits at U(pi/2, pi) inside the two-parameter family.
  const StrategyParams s1 = named_operator_params(NamedOp::sigma1);
  CHECK(s1.theta() == doctest::Approx(pi / 2));
  CHECK(s1.phi() == doctest::Approx(pi));

  for (NamedOp op : {NamedOp::identity, NamedOp::sigma1, NamedOp::sigma2,
                     NamedOp::sigma3, NamedOp::hadamard}) {
    CHECK(max_abs_diff(make_unitary(named_operator_params(op)).mat(),
                       named_operator(op).mat()) < 1e-12);
  }
}

TEST_CASE("schemas expose counts, names and bounds") {
  const Schema& classical_one = Schema::of(SchemaKind::classical_one);
  CHECK(classical_one.gene_count() == 1);
  CHECK(classical_one.gene_names() == std::vector<std::string>{"p_flip"});
  CHECK(classical_one.bounds(0).lo == 0.0);
  CHECK(classical_one.bounds(0).hi == 1.0);

  const Schema& pure_pair = Schema::of(SchemaKind::pure_pair);
  CHECK(pure_pair.gene_count() == 4);
  CHECK(pure_pair.gene_names() ==
        std::vector<std::string>{"theta1", "phi1", "theta2", "phi2"});
  CHECK(pure_pair.bounds(0).hi == doctest::Approx(pi / 2));
  CHECK(pure_pair.bounds(1).hi == doctest::Approx(pi));

  const Schema& mixed_one = Schema::of(SchemaKind::mixed_one);
  CHECK(mixed_one.gene_count() == 5);
  CHECK(mixed_one.gene_names() ==
        std::vector<std::string>{"pro", "theta_a", "phi_a", "theta_b", "phi_b"});
  CHECK(mixed_one.bounds(0).hi == 1.0);
  CHECK(mixed_one.bounds(1).hi == doctest::Approx(pi / 2));

  CHECK(Schema::of(SchemaKind::classical_pair).gene_count() == 2);
  CHECK(Schema::of(SchemaKind::pure_one).gene_count() == 2);
}

TEST_CASE("decode on hand examples") {
  SUBCASE("one classical gene") {
    const auto moves = Schema::of(SchemaKind::classical_one).decode(
        std::vector<double>{0.5});
    REQUIRE(moves.size() == 1);
    CHECK(std::get<ClassicalMixed>(moves[0]).p_flip == 0.5);
  }

  SUBCASE("two pure quantum moves") {
    const auto moves = Schema::of(SchemaKind::pure_pair)
                           .decode(std::vector<double>{pi / 4, pi / 2, pi / 4, pi});
    REQUIRE(moves.size() == 2);
    const auto& m0 = std::get<PureQuantum>(moves[0]);
    const auto& m1 = std::get<PureQuantum>(moves[1]);
    CHECK(m0.u.theta() == doctest::Approx(pi / 4));
    CHECK(m0.u.phi() == doctest::Approx(pi / 2));
    CHECK(m1.u.theta() == doctest::Approx(pi / 4));
    CHECK(m1.u.phi() == doctest::Approx(pi));
  }

  SUBCASE("one mixed-two-unitary move") {
    const auto moves = Schema::of(SchemaKind::mixed_one)
                           .decode(std::vector<double>{0.5, pi / 2, pi, 0, 0});
    REQUIRE(moves.size() == 1);
    const auto& m = std::get<MixedTwoUnitary>(moves[0]);
    CHECK(m.pro == 0.5);
    CHECK(m.a.theta() == doctest::Approx(pi / 2));
    CHECK(m.a.phi() == doctest::Approx(pi));
    CHECK(m.b.theta() == 0.0);
    CHECK(m.b.phi() == 0.0);
  }
}

TEST_CASE("decode rejects malformed gene vectors") {
  const Schema& schema = Schema::of(SchemaKind::pure_one);
  CHECK_THROWS_AS(schema.decode(std::vector<double>{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(schema.decode(std::vector<double>{0.1, 0.2, 0.3}),
                  std::invalid_argument);
  // theta above pi/2.
  CHECK_THROWS_AS(schema.decode(std::vector<double>{2.0, 0.5}), std::invalid_argument);
  // phi below 0.
  CHECK_THROWS_AS(schema.decode(std::vector<double>{0.5, -0.5}), std::invalid_argument);
}

TEST_CASE("encode and decode are inverse on every schema") {
  std::mt19937_64 rng(13);
  for (SchemaKind kind : {SchemaKind::classical_one, SchemaKind::classical_pair,
                          SchemaKind::pure_one, SchemaKind::pure_pair,
                          SchemaKind::mixed_one}) {
    const Schema& schema = Schema::of(kind);
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> genes = random_genes(schema, rng);
      const std::vector<double> back = schema.encode(schema.decode(genes));
      REQUIRE(back.size() == genes.size());
      for (std::size_t g = 0; g < genes.size(); ++g)
        CHECK(back[g] == doctest::Approx(genes[g]).epsilon(1e-12));
    }
  }
}

TEST_CASE("phi never affects the evolution of a diagonal state") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> th(0.0, pi / 2), ph(0.0, pi),
      pr(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double s = pr(rng);
    const double theta = th(rng);
    const DensityMatrix rho(Mat2{{Complex{s}, {}, {}, Complex{1 - s}}});
    const Mat2 with_phi =
        evolve_pure(rho, make_unitary(StrategyParams(theta, ph(rng)))).mat();
    const Mat2 phi_zero =
        evolve_pure(rho, make_unitary(StrategyParams(theta, 0.0))).mat();
    CHECK(std::abs(with_phi.at(0, 0) - phi_zero.at(0, 0)) < 1e-12);
    CHECK(std::abs(with_phi.at(1, 1) - phi_zero.at(1, 1)) < 1e-12);
    CHECK(std::abs(std::abs(with_phi.at(0, 1)) - std::abs(phi_zero.at(0, 1))) < 1e-12);
    CHECK(std::abs(std::abs(with_phi.at(1, 0)) - std::abs(phi_zero.at(1, 0))) < 1e-12);
  }
}

TEST_CASE("theta = pi/4 acts like the half-half classical mix on diagonals") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ph(0.0, pi), pr(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double s = pr(rng);
    const DensityMatrix rho(Mat2{{Complex{s}, {}, {}, Complex{1 - s}}});
    const Mat2 out = evolve_pure(rho, make_unitary(StrategyParams(pi / 4, ph(rng)))).mat();
    CHECK(std::abs(out.at(0, 0) - Complex{0.5}) < 1e-12);
    CHECK(std::abs(out.at(1, 1) - Complex{0.5}) < 1e-12);
  }
}
