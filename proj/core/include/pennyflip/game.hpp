#pragma once

#include "pennyflip/strategy.hpp"

namespace pennyflip {

// Three-move protocol: Q acts, Picard acts, Q acts again, then the penny is
// measured. Payoff to Q is P(|0>) - P(|1>) of the final state; Picard gets the
// negative (zero-sum).
struct GameProfile {
  MoveSpec q_move1;
  MoveSpec picard_move;
  MoveSpec q_move2;
};

struct GameOutcome {
  DensityMatrix rho_final;
  double payoff_q;
  double payoff_picard;
};

// The four protocol states rho0 (initial) through rho3 (after Q's second move).
struct StateTrace {
  DensityMatrix rho0;
  DensityMatrix rho1;
  DensityMatrix rho2;
  DensityMatrix rho3;
};

// |0><0|: the penny starts head up.
DensityMatrix initial_state();

GameOutcome play(const GameProfile& profile);
StateTrace play_trace(const GameProfile& profile);

// Bloch-picture fast path. Every move acts linearly on the Bloch vector, so a
// full game reduces to a handful of real multiplications:
//   payoff_q = meas . (M_picard n1)
// where n1 is the state after Q's first move and meas is the z-row of Q's
// second move's map. Exact for this game; the evolutionary loop runs on it and
// tests pin it to play() elementwise.
struct BlochMap {
  std::array<double, 9> r;  // row-major 3x3 acting on (x, y, z)
};

BlochMap bloch_map(const MoveSpec& move);

// Per-player precomputation for round-robin evaluation.
struct QKernel {
  std::array<double, 3> n1;    // Bloch vector after Q's first move on |0><0|
  std::array<double, 3> meas;  // z-row of Q's second move's Bloch map
};

QKernel compile_q(const MoveSpec& move1, const MoveSpec& move2);
BlochMap compile_picard(const MoveSpec& move);
double payoff_q_fast(const QKernel& q, const BlochMap& picard);

}  // namespace pennyflip
