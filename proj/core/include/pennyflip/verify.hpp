#pragma once

#include "pennyflip/game.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pennyflip {

// Profile families with hand-derived closed-form state traces, used to
// cross-check the generic pipeline against independent formulas.
enum class OracleFamily {
  classical,   // [flip p1, flip p, flip p2]
  winning_q,   // [U(pi/4, phi1), flip p, U(pi/4, pi)]
  stuck_pair,  // [flip p1, U(pi/4, phi), flip p2]
  cat1,        // [U(pi/4, phi1), mix{pro, sigma1, sigma3}, U(theta2, pi/2)]
  cat2,        // [U(pi/4, phi1), mix{pro, sigma2, I}, U(theta2, pi/2)]
  cat3,        // [U(0, phi1), mix{pro, sigma3, sigma2}, H]
  cat4,        // [U(pi/2, phi1), mix{pro, I, sigma1}, U(theta2, 0)]
};

std::string_view to_string(OracleFamily family);

// Structural family detection. Fixed angles and operators must match to 1e-9;
// free parameters are unrestricted.
std::optional<OracleFamily> match_family(const GameProfile& profile);

// Closed-form rho0..rho3 for a profile in a known family, computed from the
// hand-derived formulas without touching the game pipeline. Throws
// std::invalid_argument for profiles outside the known families.
StateTrace oracle_trace(const GameProfile& profile);

// Max elementwise |oracle - play_trace()| across rho1..rho3.
double check_oracle_agreement(const GameProfile& profile);

enum class NeVerdict { ne_pair, strict_ne_pair, refuted };

std::string_view to_string(NeVerdict v);

struct GridSpec {
  std::size_t points_per_axis = 21;
};

struct DeviationWitness {
  std::string player;          // "q" or "picard"
  std::vector<double> params;  // the deviating player's full parameter vector
  double payoff_gain;
};

struct NeCertificate {
  std::string profile_desc;
  GridSpec grid;
  double max_gain_q = 0.0;
  double max_gain_picard = 0.0;
  NeVerdict verdict = NeVerdict::refuted;
  std::optional<DeviationWitness> witness;  // present when refuted

  std::string to_json() const;
};

// Grid search over unilateral deviations: Q varies both his moves' parameters
// jointly, Picard varies his move's. A gain above eps refutes the profile; the
// witness is the first maximal deviation in lexicographic grid order. For the
// strict verdict every deviation that differs from the profile along at least
// one axis not listed in payoff_equivalent_axes must score strictly below the
// profile. Axes index the concatenated parameter vector, Q's axes first.
NeCertificate certify_ne(const std::vector<MoveSpec>& q_strategy,
                         const MoveSpec& picard_strategy, const GridSpec& grid = {},
                         double eps = 1e-9,
                         std::span<const std::size_t> payoff_equivalent_axes = {});

// One link of the circular dominance chain among the sim3 equilibrium
// neighbourhood strategies: winner beats loser with the given payoff.
struct DominanceLink {
  std::string winner;
  std::string loser;
  double winner_payoff;
};

// The four-link cycle showing that no strategy in the loop dominates all
// others; the last link's winner is the first link's loser.
std::vector<DominanceLink> cyclic_dominance_table();

}  // namespace pennyflip
