#pragma once

#include "pennyflip/qmat.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pennyflip {

// Angles of the two-parameter unitary family
//   U(theta, phi) = [[cos t, -e^{i f} sin t], [sin t, e^{i f} cos t]]
// with theta in [0, pi/2] and phi in [0, pi]. Construction enforces the ranges.
class StrategyParams {
 public:
  StrategyParams(double theta, double phi);
  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double theta_;
  double phi_;
};

Unitary2 make_unitary(const StrategyParams& p);

// Flip the penny with probability p_flip, leave it with probability 1 - p_flip.
struct ClassicalMixed {
  double p_flip;
};

// Apply one unitary of the U(theta, phi) family.
struct PureQuantum {
  StrategyParams u;
};

// Apply unitary a with probability pro, unitary b with probability 1 - pro.
struct MixedTwoUnitary {
  double pro;
  StrategyParams a;
  StrategyParams b;
};

using MoveSpec = std::variant<ClassicalMixed, PureQuantum, MixedTwoUnitary>;

// Throws std::invalid_argument when a probability is outside [0, 1].
// (Angle ranges are already enforced by StrategyParams.)
void validate_move(const MoveSpec& move);

// Every move as a probabilistic mixture of unitaries, the common currency of
// state evolution. Branch probabilities sum to 1.
std::vector<WeightedUnitary> move_to_branches(const MoveSpec& move);

enum class NamedOp { identity, sigma1, sigma2, sigma3, hadamard };

// The fixed operators referenced throughout: I, the Pauli matrices (sigma2 in
// its real form [[0,-1],[1,0]]) and the Hadamard gate.
Unitary2 named_operator(NamedOp op);

// The (theta, phi) pair realising the named operator within the U family.
StrategyParams named_operator_params(NamedOp op);

// Gene layouts used by the three experiment encodings. A chromosome is a flat
// vector of reals in natural units (radians or probabilities); the schema
// fixes gene count, bounds, names, and the decoding into moves.
enum class SchemaKind {
  classical_one,   // [p_flip]                              one classical mixed move
  classical_pair,  // [p1, p2]                              two classical mixed moves
  pure_one,        // [theta, phi]                          one pure quantum move
  pure_pair,       // [theta1, phi1, theta2, phi2]          two pure quantum moves
  mixed_one,       // [pro, theta_a, phi_a, theta_b, phi_b] one mixed-two-unitary move
};

struct GeneBounds {
  double lo;
  double hi;
};

class Schema {
 public:
  static const Schema& of(SchemaKind kind);

  SchemaKind kind() const { return kind_; }
  std::size_t gene_count() const { return names_.size(); }
  GeneBounds bounds(std::size_t gene) const;
  const std::vector<std::string>& gene_names() const { return names_; }

  std::vector<MoveSpec> decode(std::span<const double> genes) const;
  std::vector<double> encode(std::span<const MoveSpec> moves) const;

 private:
  Schema(SchemaKind kind, std::vector<std::string> names);

  SchemaKind kind_;
  std::vector<std::string> names_;
};

struct Chromosome {
  const Schema* schema;
  std::vector<double> genes;

  std::vector<MoveSpec> decode() const { return schema->decode(genes); }
};

}  // namespace pennyflip
