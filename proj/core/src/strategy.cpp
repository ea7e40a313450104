#include "pennyflip/strategy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pennyflip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability outside [0, 1]");
  }
}

}  // namespace

StrategyParams::StrategyParams(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!(theta >= 0.0 && theta <= kHalfPi)) {
    throw std::invalid_argument("StrategyParams: theta outside [0, pi/2]");
  }
  if (!(phi >= 0.0 && phi <= kPi)) {
    throw std::invalid_argument("StrategyParams: phi outside [0, pi]");
  }
}

Unitary2 make_unitary(const StrategyParams& p) {
  const double c = std::cos(p.theta());
  const double s = std::sin(p.theta());
  const Complex phase = std::polar(1.0, p.phi());
  return Unitary2(Mat2{{Complex{c}, -phase * s, Complex{s}, phase * c}});
}

void validate_move(const MoveSpec& move) {
  if (const auto* cm = std::get_if<ClassicalMixed>(&move)) {
    check_prob(cm->p_flip, "ClassicalMixed");
  } else if (const auto* mx = std::get_if<MixedTwoUnitary>(&move)) {
    check_prob(mx->pro, "MixedTwoUnitary");
  }
}

std::vector<WeightedUnitary> move_to_branches(const MoveSpec& move) {
  validate_move(move);
  struct Visitor {
    std::vector<WeightedUnitary> operator()(const ClassicalMixed& m) const {
      return {{m.p_flip, named_operator(NamedOp::sigma1)},
              {1.0 - m.p_flip, named_operator(NamedOp::identity)}};
    }
    std::vector<WeightedUnitary> operator()(const PureQuantum& m) const {
      return {{1.0, make_unitary(m.u)}};
    }
    std::vector<WeightedUnitary> operator()(const MixedTwoUnitary& m) const {
      return {{m.pro, make_unitary(m.a)}, {1.0 - m.pro, make_unitary(m.b)}};
    }
  };
  return std::visit(Visitor{}, move);
}

Unitary2 named_operator(NamedOp op) {
  switch (op) {
    case NamedOp::identity:
      return Unitary2(Mat2::identity());
    case NamedOp::sigma1:
      return Unitary2(Mat2{{Complex{0.0}, Complex{1.0}, Complex{1.0}, Complex{0.0}}});
    case NamedOp::sigma2:
      // Real representation: [[0, -1], [1, 0]].
      return Unitary2(Mat2{{Complex{0.0}, Complex{-1.0}, Complex{1.0}, Complex{0.0}}});
    case NamedOp::sigma3:
      return Unitary2(Mat2{{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{-1.0}}});
    case NamedOp::hadamard: {
      const double r = 1.0 / std::numbers::sqrt2;
      return Unitary2(Mat2{{Complex{r}, Complex{r}, Complex{r}, Complex{-r}}});
    }
  }
  throw std::invalid_argument("named_operator: unknown operator");
}

StrategyParams named_operator_params(NamedOp op) {
  switch (op) {
    case NamedOp::identity:
      return StrategyParams(0.0, 0.0);
    case NamedOp::sigma1:
      return StrategyParams(kHalfPi, kPi);
    case NamedOp::sigma2:
      return StrategyParams(kHalfPi, 0.0);
    case NamedOp::sigma3:
      return StrategyParams(0.0, kPi);
    case NamedOp::hadamard:
      return StrategyParams(kPi / 4.0, kPi);
  }
  throw std::invalid_argument("named_operator_params: unknown operator");
}

const Schema& Schema::of(SchemaKind kind) {
  static const Schema classical_one(SchemaKind::classical_one, {"p_flip"});
  static const Schema classical_pair(SchemaKind::classical_pair, {"p1", "p2"});
  static const Schema pure_one(SchemaKind::pure_one, {"theta", "phi"});
  static const Schema pure_pair(SchemaKind::pure_pair,
                                {"theta1", "phi1", "theta2", "phi2"});
  static const Schema mixed_one(SchemaKind::mixed_one,
                                {"pro", "theta_a", "phi_a", "theta_b", "phi_b"});
  switch (kind) {
    case SchemaKind::classical_one: return classical_one;
    case SchemaKind::classical_pair: return classical_pair;
    case SchemaKind::pure_one: return pure_one;
    case SchemaKind::pure_pair: return pure_pair;
    case SchemaKind::mixed_one: return mixed_one;
  }
  throw std::invalid_argument("Schema::of: unknown kind");
}

Schema::Schema(SchemaKind kind, std::vector<std::string> names)
    : kind_(kind), names_(std::move(names)) {}

GeneBounds Schema::bounds(std::size_t gene) const {
  if (gene >= gene_count()) {
    throw std::invalid_argument("Schema::bounds: gene index out of range");
  }
  const std::string& name = names_[gene];
  if (name.starts_with("theta")) return {0.0, kHalfPi};
  if (name.starts_with("phi")) return {0.0, kPi};
  return {0.0, 1.0};  // probabilities: pro, p_flip, p1, p2
}

std::vector<MoveSpec> Schema::decode(std::span<const double> genes) const {
  if (genes.size() != gene_count()) {
    throw std::invalid_argument("Schema::decode: gene count mismatch");
  }
  for (std::size_t i = 0; i < genes.size(); ++i) {
    const GeneBounds b = bounds(i);
    if (!(genes[i] >= b.lo && genes[i] <= b.hi)) {
      throw std::invalid_argument("Schema::decode: gene '" + names_[i] +
                                  "' outside its bounds");
    }
  }
  switch (kind_) {
    case SchemaKind::classical_one:
      return {ClassicalMixed{genes[0]}};
    case SchemaKind::classical_pair:
      return {ClassicalMixed{genes[0]}, ClassicalMixed{genes[1]}};
    case SchemaKind::pure_one:
      return {PureQuantum{StrategyParams(genes[0], genes[1])}};
    case SchemaKind::pure_pair:
      return {PureQuantum{StrategyParams(genes[0], genes[1])},
              PureQuantum{StrategyParams(genes[2], genes[3])}};
    case SchemaKind::mixed_one:
      return {MixedTwoUnitary{genes[0], StrategyParams(genes[1], genes[2]),
                              StrategyParams(genes[3], genes[4])}};
  }
  throw std::invalid_argument("Schema::decode: unknown kind");
}

std::vector<double> Schema::encode(std::span<const MoveSpec> moves) const {
  const char* mismatch = "Schema::encode: moves do not fit this schema";
  auto as_classical = [&](const MoveSpec& m) {
    const auto* cm = std::get_if<ClassicalMixed>(&m);
    if (!cm) throw std::invalid_argument(mismatch);
    return cm->p_flip;
  };
  auto as_pure = [&](const MoveSpec& m) {
    const auto* pq = std::get_if<PureQuantum>(&m);
    if (!pq) throw std::invalid_argument(mismatch);
    return pq->u;
  };
  auto expect_count = [&](std::size_t n) {
    if (moves.size() != n) throw std::invalid_argument(mismatch);
  };
  switch (kind_) {
    case SchemaKind::classical_one:
      expect_count(1);
      return {as_classical(moves[0])};
    case SchemaKind::classical_pair:
      expect_count(2);
      return {as_classical(moves[0]), as_classical(moves[1])};
    case SchemaKind::pure_one: {
      expect_count(1);
      const StrategyParams u = as_pure(moves[0]);
      return {u.theta(), u.phi()};
    }
    case SchemaKind::pure_pair: {
      expect_count(2);
      const StrategyParams u1 = as_pure(moves[0]);
      const StrategyParams u2 = as_pure(moves[1]);
      return {u1.theta(), u1.phi(), u2.theta(), u2.phi()};
    }
    case SchemaKind::mixed_one: {
      expect_count(1);
      const auto* mx = std::get_if<MixedTwoUnitary>(&moves[0]);
      if (!mx) throw std::invalid_argument(mismatch);
      return {mx->pro, mx->a.theta(), mx->a.phi(), mx->b.theta(), mx->b.phi()};
    }
  }
  throw std::invalid_argument("Schema::encode: unknown kind");
}

}  // namespace pennyflip
