#include "pennyflip/game.hpp"

#include <cmath>

namespace pennyflip {

DensityMatrix initial_state() {
  return DensityMatrix(Mat2{{Complex{1.0}, {}, {}, Complex{0.0}}});
}

namespace {

DensityMatrix apply_move(const DensityMatrix& rho, const MoveSpec& move) {
  const std::vector<WeightedUnitary> branches = move_to_branches(move);
  return evolve_mixed(rho, branches);
}

// Bloch rotation of U(theta, phi): columns are the images of x, y, z.
BlochMap pure_bloch_map(const StrategyParams& p) {
  const double c2 = std::cos(2.0 * p.theta());
  const double s2 = std::sin(2.0 * p.theta());
  const double cf = std::cos(p.phi());
  const double sf = std::sin(p.phi());
  return BlochMap{{c2 * cf, -c2 * sf, s2,
                   sf,      cf,       0.0,
                   -s2 * cf, s2 * sf, c2}};
}

BlochMap mix_maps(double w1, const BlochMap& a, const BlochMap& b) {
  BlochMap m;
  for (std::size_t i = 0; i < 9; ++i) m.r[i] = w1 * a.r[i] + (1.0 - w1) * b.r[i];
  return m;
}

}  // namespace

GameOutcome play(const GameProfile& profile) {
  DensityMatrix rho = initial_state();
  rho = apply_move(rho, profile.q_move1);
  rho = apply_move(rho, profile.picard_move);
  rho = apply_move(rho, profile.q_move2);
  const MeasureProbs probs = measure_probs(rho);
  const double payoff_q = probs.p0 - probs.p1;
  return GameOutcome{rho, payoff_q, -payoff_q};
}

StateTrace play_trace(const GameProfile& profile) {
  const DensityMatrix rho0 = initial_state();
  const DensityMatrix rho1 = apply_move(rho0, profile.q_move1);
  const DensityMatrix rho2 = apply_move(rho1, profile.picard_move);
  const DensityMatrix rho3 = apply_move(rho2, profile.q_move2);
  return StateTrace{rho0, rho1, rho2, rho3};
}

BlochMap bloch_map(const MoveSpec& move) {
  validate_move(move);
  struct Visitor {
    BlochMap operator()(const ClassicalMixed& m) const {
      // p sigma1 + (1-p) I on the Bloch sphere.
      const double d = 1.0 - 2.0 * m.p_flip;
      return BlochMap{{1.0, 0.0, 0.0, 0.0, d, 0.0, 0.0, 0.0, d}};
    }
    BlochMap operator()(const PureQuantum& m) const { return pure_bloch_map(m.u); }
    BlochMap operator()(const MixedTwoUnitary& m) const {
      return mix_maps(m.pro, pure_bloch_map(m.a), pure_bloch_map(m.b));
    }
  };
  return std::visit(Visitor{}, move);
}

QKernel compile_q(const MoveSpec& move1, const MoveSpec& move2) {
  const BlochMap m1 = bloch_map(move1);
  const BlochMap m2 = bloch_map(move2);
  // n1 = M1 z; meas = z-row of M2. The initial Bloch vector is z.
  return QKernel{{m1.r[2], m1.r[5], m1.r[8]}, {m2.r[6], m2.r[7], m2.r[8]}};
}

BlochMap compile_picard(const MoveSpec& move) { return bloch_map(move); }

double payoff_q_fast(const QKernel& q, const BlochMap& picard) {
  const auto& r = picard.r;
  const double mx = r[0] * q.n1[0] + r[1] * q.n1[1] + r[2] * q.n1[2];
  const double my = r[3] * q.n1[0] + r[4] * q.n1[1] + r[5] * q.n1[2];
  const double mz = r[6] * q.n1[0] + r[7] * q.n1[1] + r[8] * q.n1[2];
  return q.meas[0] * mx + q.meas[1] * my + q.meas[2] * mz;
}

}  // namespace pennyflip
