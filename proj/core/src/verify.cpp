#include "pennyflip/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace pennyflip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kExactTol = 1e-9;  // tolerance for family detection of fixed angles

bool is(double x, double target) { return std::abs(x - target) <= kExactTol; }

bool params_are(const StrategyParams& p, NamedOp op) {
  const StrategyParams want = named_operator_params(op);
  return is(p.theta(), want.theta()) && is(p.phi(), want.phi());
}

// Accessors that return nullptr when the move has a different kind.
const ClassicalMixed* as_cm(const MoveSpec& m) { return std::get_if<ClassicalMixed>(&m); }
const PureQuantum* as_pq(const MoveSpec& m) { return std::get_if<PureQuantum>(&m); }
const MixedTwoUnitary* as_mx(const MoveSpec& m) { return std::get_if<MixedTwoUnitary>(&m); }

Mat2 diag(double d0, double d1) {
  return Mat2{{Complex{d0}, {}, {}, Complex{d1}}};
}

Mat2 half_with_offdiag(Complex x) {
  return Mat2{{Complex{0.5}, 0.5 * x, 0.5 * std::conj(x), Complex{0.5}}};
}

}  // namespace

std::string_view to_string(OracleFamily family) {
  switch (family) {
    case OracleFamily::classical: return "classical";
    case OracleFamily::winning_q: return "winning_q";
    case OracleFamily::stuck_pair: return "stuck_pair";
    case OracleFamily::cat1: return "cat1";
    case OracleFamily::cat2: return "cat2";
    case OracleFamily::cat3: return "cat3";
    case OracleFamily::cat4: return "cat4";
  }
  return "unknown";
}

std::optional<OracleFamily> match_family(const GameProfile& profile) {
  const auto* q1_cm = as_cm(profile.q_move1);
  const auto* q1_pq = as_pq(profile.q_move1);
  const auto* p_cm = as_cm(profile.picard_move);
  const auto* p_pq = as_pq(profile.picard_move);
  const auto* p_mx = as_mx(profile.picard_move);
  const auto* q2_cm = as_cm(profile.q_move2);
  const auto* q2_pq = as_pq(profile.q_move2);

  if (q1_cm && p_cm && q2_cm) return OracleFamily::classical;
  if (q1_pq && p_cm && q2_pq && is(q1_pq->u.theta(), kQuarterPi) &&
      is(q2_pq->u.theta(), kQuarterPi) && is(q2_pq->u.phi(), kPi)) {
    return OracleFamily::winning_q;
  }
  if (q1_cm && p_pq && q2_cm && is(p_pq->u.theta(), kQuarterPi)) {
    return OracleFamily::stuck_pair;
  }
  if (q1_pq && p_mx && q2_pq) {
    const StrategyParams& u1 = q1_pq->u;
    const StrategyParams& u2 = q2_pq->u;
    if (is(u1.theta(), kQuarterPi) && is(u2.phi(), kHalfPi)) {
      if (params_are(p_mx->a, NamedOp::sigma1) && params_are(p_mx->b, NamedOp::sigma3)) {
        return OracleFamily::cat1;
      }
      if (params_are(p_mx->a, NamedOp::sigma2) && params_are(p_mx->b, NamedOp::identity)) {
        return OracleFamily::cat2;
      }
    }
    if (is(u1.theta(), 0.0) && is(u2.theta(), kQuarterPi) && is(u2.phi(), kPi) &&
        params_are(p_mx->a, NamedOp::sigma3) && params_are(p_mx->b, NamedOp::sigma2)) {
      return OracleFamily::cat3;
    }
    if (is(u1.theta(), kHalfPi) && is(u2.phi(), 0.0) &&
        params_are(p_mx->a, NamedOp::identity) && params_are(p_mx->b, NamedOp::sigma1)) {
      return OracleFamily::cat4;
    }
  }
  return std::nullopt;
}

StateTrace oracle_trace(const GameProfile& profile) {
  const std::optional<OracleFamily> family = match_family(profile);
  if (!family) {
    throw std::invalid_argument("oracle_trace: profile outside the analyzed families");
  }
  const DensityMatrix rho0 = initial_state();
  switch (*family) {
    case OracleFamily::classical: {
      const double p1 = as_cm(profile.q_move1)->p_flip;
      const double p = as_cm(profile.picard_move)->p_flip;
      const double p2 = as_cm(profile.q_move2)->p_flip;
      const double a1 = 1.0 - p1;  // P(|0>) after Q's first flip choice
      const double a2 = (1.0 - p) * a1 + p * (1.0 - a1);
      const double a3 = (1.0 - p2) * a2 + p2 * (1.0 - a2);
      return StateTrace{rho0, DensityMatrix(diag(a1, 1.0 - a1)),
                        DensityMatrix(diag(a2, 1.0 - a2)),
                        DensityMatrix(diag(a3, 1.0 - a3))};
    }
    case OracleFamily::winning_q: {
      // U(pi/4, *) sends |0><0| to the uniform superposition, which every
      // classical flip mixture fixes; the Hadamard-like U(pi/4, pi) closes it
      // back to |0><0|.
      const DensityMatrix even(half_with_offdiag(Complex{1.0}));
      return StateTrace{rho0, even, even, DensityMatrix(diag(1.0, 0.0))};
    }
    case OracleFamily::stuck_pair: {
      const double p1 = as_cm(profile.q_move1)->p_flip;
      const DensityMatrix stuck(half_with_offdiag(Complex{1.0 - 2.0 * p1}));
      return StateTrace{rho0, DensityMatrix(diag(1.0 - p1, p1)), stuck, stuck};
    }
    case OracleFamily::cat1: {
      const double pro = as_mx(profile.picard_move)->pro;
      const double d = 2.0 * pro - 1.0;
      return StateTrace{rho0, DensityMatrix(half_with_offdiag(Complex{1.0})),
                        DensityMatrix(half_with_offdiag(Complex{d})),
                        DensityMatrix(half_with_offdiag(Complex{0.0, -d}))};
    }
    case OracleFamily::cat2: {
      const double pro = as_mx(profile.picard_move)->pro;
      const double d = 1.0 - 2.0 * pro;
      return StateTrace{rho0, DensityMatrix(half_with_offdiag(Complex{1.0})),
                        DensityMatrix(half_with_offdiag(Complex{d})),
                        DensityMatrix(half_with_offdiag(Complex{0.0, -d}))};
    }
    case OracleFamily::cat3: {
      const double pro = as_mx(profile.picard_move)->pro;
      return StateTrace{rho0, DensityMatrix(diag(1.0, 0.0)),
                        DensityMatrix(diag(pro, 1.0 - pro)),
                        DensityMatrix(half_with_offdiag(Complex{2.0 * pro - 1.0}))};
    }
    case OracleFamily::cat4: {
      const double pro = as_mx(profile.picard_move)->pro;
      const double theta2 = as_pq(profile.q_move2)->u.theta();
      const double c = std::cos(theta2);
      const double s = std::sin(theta2);
      const double off = c * s * (1.0 - 2.0 * pro);
      const Mat2 rho3{{Complex{c * c * (1.0 - pro) + s * s * pro}, Complex{off},
                       Complex{off}, Complex{s * s * (1.0 - pro) + c * c * pro}}};
      return StateTrace{rho0, DensityMatrix(diag(0.0, 1.0)),
                        DensityMatrix(diag(1.0 - pro, pro)), DensityMatrix(rho3)};
    }
  }
  throw std::invalid_argument("oracle_trace: unknown family");
}

double check_oracle_agreement(const GameProfile& profile) {
  const StateTrace oracle = oracle_trace(profile);
  const StateTrace generic = play_trace(profile);
  double d = max_abs_diff(oracle.rho1.mat(), generic.rho1.mat());
  d = std::max(d, max_abs_diff(oracle.rho2.mat(), generic.rho2.mat()));
  d = std::max(d, max_abs_diff(oracle.rho3.mat(), generic.rho3.mat()));
  return d;
}

std::string_view to_string(NeVerdict v) {
  switch (v) {
    case NeVerdict::ne_pair: return "ne_pair";
    case NeVerdict::strict_ne_pair: return "strict_ne_pair";
    case NeVerdict::refuted: return "refuted";
  }
  return "unknown";
}

namespace {

std::vector<GeneBounds> move_axes(const MoveSpec& move) {
  struct Visitor {
    std::vector<GeneBounds> operator()(const ClassicalMixed&) const {
      return {{0.0, 1.0}};
    }
    std::vector<GeneBounds> operator()(const PureQuantum&) const {
      return {{0.0, kHalfPi}, {0.0, kPi}};
    }
    std::vector<GeneBounds> operator()(const MixedTwoUnitary&) const {
      return {{0.0, 1.0}, {0.0, kHalfPi}, {0.0, kPi}, {0.0, kHalfPi}, {0.0, kPi}};
    }
  };
  return std::visit(Visitor{}, move);
}

std::vector<double> move_params(const MoveSpec& move) {
  struct Visitor {
    std::vector<double> operator()(const ClassicalMixed& m) const { return {m.p_flip}; }
    std::vector<double> operator()(const PureQuantum& m) const {
      return {m.u.theta(), m.u.phi()};
    }
    std::vector<double> operator()(const MixedTwoUnitary& m) const {
      return {m.pro, m.a.theta(), m.a.phi(), m.b.theta(), m.b.phi()};
    }
  };
  return std::visit(Visitor{}, move);
}

MoveSpec move_from_params(const MoveSpec& like, std::span<const double> v) {
  struct Visitor {
    std::span<const double> v;
    MoveSpec operator()(const ClassicalMixed&) const { return ClassicalMixed{v[0]}; }
    MoveSpec operator()(const PureQuantum&) const {
      return PureQuantum{StrategyParams(v[0], v[1])};
    }
    MoveSpec operator()(const MixedTwoUnitary&) const {
      return MixedTwoUnitary{v[0], StrategyParams(v[1], v[2]), StrategyParams(v[3], v[4])};
    }
  };
  return std::visit(Visitor{v}, like);
}

std::string describe_move(const MoveSpec& move) {
  char buf[96];
  struct Visitor {
    char* buf;
    std::size_t n;
    std::string operator()(const ClassicalMixed& m) const {
      std::snprintf(buf, n, "flip(%.4g)", m.p_flip);
      return buf;
    }
    std::string operator()(const PureQuantum& m) const {
      std::snprintf(buf, n, "U(%.4g,%.4g)", m.u.theta(), m.u.phi());
      return buf;
    }
    std::string operator()(const MixedTwoUnitary& m) const {
      std::snprintf(buf, n, "mix(%.4g; U(%.4g,%.4g), U(%.4g,%.4g))", m.pro,
                    m.a.theta(), m.a.phi(), m.b.theta(), m.b.phi());
      return buf;
    }
  };
  return std::visit(Visitor{buf, sizeof buf}, move);
}

struct PlayerScan {
  double max_gain = 0.0;
  std::vector<double> best_params;
  // Smallest margin by which a deviation distinct along non-equivalent axes
  // scores below the profile; +inf when no such deviation exists.
  double strict_margin = std::numeric_limits<double>::infinity();
};

}  // namespace

NeCertificate certify_ne(const std::vector<MoveSpec>& q_strategy,
                         const MoveSpec& picard_strategy, const GridSpec& grid,
                         double eps, std::span<const std::size_t> payoff_equivalent_axes) {
  if (q_strategy.size() != 2) {
    throw std::invalid_argument("certify_ne: Q strategy must hold exactly two moves");
  }
  if (grid.points_per_axis < 2) {
    throw std::invalid_argument("certify_ne: grid needs at least two points per axis");
  }

  const GameProfile base{q_strategy[0], picard_strategy, q_strategy[1]};
  const double base_q = play(base).payoff_q;

  const std::vector<double> q_base_params = [&] {
    std::vector<double> v = move_params(q_strategy[0]);
    const std::vector<double> v2 = move_params(q_strategy[1]);
    v.insert(v.end(), v2.begin(), v2.end());
    return v;
  }();
  const std::size_t n_q_axes = q_base_params.size();
  const std::vector<double> p_base_params = move_params(picard_strategy);

  auto axis_equivalent = [&](std::size_t global_axis) {
    for (std::size_t a : payoff_equivalent_axes) {
      if (a == global_axis) return true;
    }
    return false;
  };

  // Lexicographic odometer over the grid of one player's parameter space.
  auto scan = [&](bool scanning_q) {
    const std::vector<GeneBounds> axes = [&] {
      if (!scanning_q) return move_axes(picard_strategy);
      std::vector<GeneBounds> a = move_axes(q_strategy[0]);
      const std::vector<GeneBounds> a2 = move_axes(q_strategy[1]);
      a.insert(a.end(), a2.begin(), a2.end());
      return a;
    }();
    const std::vector<double>& base_params = scanning_q ? q_base_params : p_base_params;
    const std::size_t axis_offset = scanning_q ? 0 : n_q_axes;
    const std::size_t n_axes = axes.size();
    const std::size_t n_pts = grid.points_per_axis;

    PlayerScan result;
    std::vector<std::size_t> idx(n_axes, 0);
    std::vector<double> params(n_axes);
    const std::size_t n_q1 = scanning_q ? move_params(q_strategy[0]).size() : 0;
    for (;;) {
      bool transverse_distinct = false;
      for (std::size_t a = 0; a < n_axes; ++a) {
        const GeneBounds b = axes[a];
        params[a] = b.lo + static_cast<double>(idx[a]) * (b.hi - b.lo) /
                              static_cast<double>(n_pts - 1);
        if (!axis_equivalent(axis_offset + a) &&
            std::abs(params[a] - base_params[a]) > 1e-12) {
          transverse_distinct = true;
        }
      }

      GameProfile dev = base;
      if (scanning_q) {
        dev.q_move1 = move_from_params(q_strategy[0], {params.data(), n_q1});
        dev.q_move2 =
            move_from_params(q_strategy[1], {params.data() + n_q1, n_axes - n_q1});
      } else {
        dev.picard_move = move_from_params(picard_strategy, params);
      }
      const double payoff_q_dev = play(dev).payoff_q;
      const double gain = scanning_q ? payoff_q_dev - base_q : base_q - payoff_q_dev;
      if (result.best_params.empty() || gain > result.max_gain) {
        result.max_gain = gain;
        result.best_params = params;
      }
      if (transverse_distinct) {
        result.strict_margin = std::min(result.strict_margin, -gain);
      }

      std::size_t a = n_axes;
      while (a > 0) {
        --a;
        if (++idx[a] < n_pts) break;
        idx[a] = 0;
        if (a == 0) return result;
      }
    }
  };

  const PlayerScan q_scan = scan(true);
  const PlayerScan p_scan = scan(false);

  NeCertificate cert;
  cert.profile_desc = "Q=[" + describe_move(q_strategy[0]) + ", " +
                      describe_move(q_strategy[1]) +
                      "] Picard=" + describe_move(picard_strategy);
  cert.grid = grid;
  cert.max_gain_q = q_scan.max_gain;
  cert.max_gain_picard = p_scan.max_gain;
  if (q_scan.max_gain > eps || p_scan.max_gain > eps) {
    cert.verdict = NeVerdict::refuted;
    const bool q_worse = q_scan.max_gain >= p_scan.max_gain;
    cert.witness = DeviationWitness{q_worse ? "q" : "picard",
                                    q_worse ? q_scan.best_params : p_scan.best_params,
                                    q_worse ? q_scan.max_gain : p_scan.max_gain};
  } else if (q_scan.strict_margin > 0.0 && p_scan.strict_margin > 0.0) {
    cert.verdict = NeVerdict::strict_ne_pair;
  } else {
    cert.verdict = NeVerdict::ne_pair;
  }
  return cert;
}

std::string NeCertificate::to_json() const {
  nlohmann::json j{{"profile", profile_desc},
                   {"grid_points_per_axis", grid.points_per_axis},
                   {"max_gain_q", max_gain_q},
                   {"max_gain_picard", max_gain_picard},
                   {"verdict", to_string(verdict)}};
  if (witness) {
    j["witness"] = {{"player", witness->player},
                    {"params", witness->params},
                    {"payoff_gain", witness->payoff_gain}};
  } else {
    j["witness"] = nullptr;
  }
  return j.dump(2);
}

std::vector<DominanceLink> cyclic_dominance_table() {
  const StrategyParams u_a(kQuarterPi, 0.0);          // U(pi/4, 0)
  const StrategyParams u_h = named_operator_params(NamedOp::hadamard);
  const MoveSpec q_flat = PureQuantum{u_a};

  const MixedTwoUnitary mix_s3_s2{0.5, named_operator_params(NamedOp::sigma3),
                                  named_operator_params(NamedOp::sigma2)};
  const MixedTwoUnitary mix_i_s1{0.5, named_operator_params(NamedOp::identity),
                                 named_operator_params(NamedOp::sigma1)};

  const std::string q_a_desc = "Q [U(pi/4,*), U(pi/4,0)]";
  const std::string q_h_desc = "Q [U(pi/4,*), H]";
  const std::string p_32_desc = "Picard mix(sigma3, sigma2)";
  const std::string p_i1_desc = "Picard mix(I, sigma1)";

  const GameOutcome g1 = play({q_flat, mix_s3_s2, PureQuantum{u_a}});
  const GameOutcome g2 = play({q_flat, mix_i_s1, PureQuantum{u_a}});
  const GameOutcome g3 = play({q_flat, mix_i_s1, PureQuantum{u_h}});
  const GameOutcome g4 = play({q_flat, mix_s3_s2, PureQuantum{u_h}});

  return {{q_a_desc, p_32_desc, g1.payoff_q},
          {p_i1_desc, q_a_desc, g2.payoff_picard},
          {q_h_desc, p_i1_desc, g3.payoff_q},
          {p_32_desc, q_h_desc, g4.payoff_picard}};
}

}  // namespace pennyflip
