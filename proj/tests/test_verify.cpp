#include "pennyflip/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace pennyflip;

namespace {

constexpr double pi = std::numbers::pi;

const StrategyParams kSigma1 = named_operator_params(NamedOp::sigma1);
const StrategyParams kSigma2 = named_operator_params(NamedOp::sigma2);
const StrategyParams kSigma3 = named_operator_params(NamedOp::sigma3);
const StrategyParams kIdentity = named_operator_params(NamedOp::identity);

// One random profile per family, matching the oracle preconditions.
GameProfile draw_family(OracleFamily family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(0.0, pi / 2), ph(0.0, pi),
      pr(0.0, 1.0);
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
              MixedTwoUnitary{pr(rng), kSigma1, kSigma3},
              PureQuantum{StrategyParams(th(rng), pi / 2)}};
    case OracleFamily::cat2:
      return {PureQuantum{StrategyParams(pi / 4, ph(rng))},
              MixedTwoUnitary{pr(rng), kSigma2, kIdentity},
              PureQuantum{StrategyParams(th(rng), pi / 2)}};
    case OracleFamily::cat3:
      return {PureQuantum{StrategyParams(0.0, ph(rng))},
              MixedTwoUnitary{pr(rng), kSigma3, kSigma2},
              PureQuantum{StrategyParams(pi / 4, pi)}};
    default:
      return {PureQuantum{StrategyParams(pi / 2, ph(rng))},
              MixedTwoUnitary{pr(rng), kIdentity, kSigma1},
              PureQuantum{StrategyParams(th(rng), 0.0)}};
  }
}

constexpr OracleFamily kAllFamilies[] = {
    OracleFamily::classical, OracleFamily::winning_q, OracleFamily::stuck_pair,
    OracleFamily::cat1,      OracleFamily::cat2,      OracleFamily::cat3,
    OracleFamily::cat4};

}  // namespace

TEST_CASE("match_family recognises each analyzed profile shape") {
  std::mt19937_64 rng(111);
  for (OracleFamily family : kAllFamilies)
    for (int i = 0; i < 20; ++i)
      CHECK(match_family(draw_family(family, rng)) == family);
}

TEST_CASE("match_family rejects profiles outside the analyzed families") {
  // The pincer with the wrong closing phase.
  CHECK_FALSE(match_family({PureQuantum{StrategyParams(pi / 4, 0.0)},
                            ClassicalMixed{0.5},
                            PureQuantum{StrategyParams(pi / 4, 2.0)}})
                  .has_value());
  // An unanchored opening angle.
  CHECK_FALSE(match_family({PureQuantum{StrategyParams(0.3, 0.0)},
                            ClassicalMixed{0.5},
                            PureQuantum{StrategyParams(pi / 4, pi)}})
                  .has_value());
  // A Picard mix that is not one of the template operator pairs.
  CHECK_FALSE(match_family({PureQuantum{StrategyParams(pi / 4, 0.0)},
                            MixedTwoUnitary{0.5, StrategyParams(0.4, 0.4),
                                            StrategyParams(1.0, 2.0)},
                            PureQuantum{StrategyParams(0.3, pi / 2)}})
                  .has_value());
}

TEST_CASE("oracle_trace closed forms") {
  SUBCASE("the winning pincer always returns the penny to head") {
    for (double p : {0.0, 0.4, 1.0}) {
      const StateTrace t = oracle_trace({PureQuantum{StrategyParams(pi / 4, 1.3)},
                                         ClassicalMixed{p},
                                         PureQuantum{StrategyParams(pi / 4, pi)}});
      CHECK(std::abs(t.rho3.mat().at(0, 0) - Complex{1.0}) < 1e-12);
      CHECK(std::abs(t.rho3.mat().at(1, 1)) < 1e-12);
    }
  }

  SUBCASE("the stuck pair freezes after Picard's move") {
    for (double p1 : {0.0, 0.3, 0.7}) {
      const StateTrace t = oracle_trace({ClassicalMixed{p1},
                                         PureQuantum{StrategyParams(pi / 4, 0.9)},
                                         ClassicalMixed{0.6}});
      const double off = (1.0 - 2.0 * p1) / 2.0;
      CHECK(std::abs(t.rho2.mat().at(0, 0) - Complex{0.5}) < 1e-12);
      CHECK(std::abs(t.rho2.mat().at(0, 1) - Complex{off}) < 1e-12);
      CHECK(std::abs(t.rho2.mat().at(1, 0) - Complex{off}) < 1e-12);
      CHECK(max_abs_diff(t.rho3.mat(), t.rho2.mat()) < 1e-12);
    }
  }

  SUBCASE("the idle-opening equilibrium runs through a diagonal mix") {
    for (double pro : {0.0, 0.25, 0.8}) {
      const StateTrace t = oracle_trace({PureQuantum{StrategyParams(0.0, 0.4)},
                                         MixedTwoUnitary{pro, kSigma3, kSigma2},
                                         PureQuantum{StrategyParams(pi / 4, pi)}});
      CHECK(std::abs(t.rho2.mat().at(0, 0) - Complex{pro}) < 1e-12);
      CHECK(std::abs(t.rho2.mat().at(1, 1) - Complex{1 - pro}) < 1e-12);
      CHECK(std::abs(t.rho2.mat().at(0, 1)) < 1e-12);
      const double off = (2.0 * pro - 1.0) / 2.0;
      CHECK(std::abs(t.rho3.mat().at(0, 1) - Complex{off}) < 1e-12);
      CHECK(std::abs(t.rho3.mat().at(0, 0) - Complex{0.5}) < 1e-12);
    }
  }

  SUBCASE("profiles outside the families are refused") {
    CHECK_THROWS_AS(oracle_trace({PureQuantum{StrategyParams(0.3, 0.0)},
                                  ClassicalMixed{0.5},
                                  PureQuantum{StrategyParams(pi / 4, pi)}}),
                    std::invalid_argument);
  }
}

TEST_CASE("oracle and game pipeline agree on every family") {
  std::mt19937_64 rng(113);
  for (OracleFamily family : kAllFamilies)
    for (int i = 0; i < 100; ++i)
      CHECK(check_oracle_agreement(draw_family(family, rng)) < 1e-12);
}

TEST_CASE("the agreement harness would catch a wrong constant") {
  // Recompute the stuck-pair rho2 with a deliberately offset off-diagonal and
  // confirm the comparison flags it, so a silent oracle typo cannot pass.
  const GameProfile profile{ClassicalMixed{0.2},
                            PureQuantum{StrategyParams(pi / 4, 1.1)},
                            ClassicalMixed{0.5}};
  const StateTrace played = play_trace(profile);
  const double wrong_off = (1.0 - 2.0 * 0.2) / 2.0 + 0.01;
  const Mat2 wrong{{Complex{0.5}, Complex{wrong_off}, Complex{wrong_off},
                    Complex{0.5}}};
  CHECK(max_abs_diff(played.rho2.mat(), wrong) > 1e-3);
  CHECK(check_oracle_agreement(profile) < 1e-12);
}

TEST_CASE("the winning profile is a grid equilibrium pair") {
  const NeCertificate cert =
      certify_ne({PureQuantum{StrategyParams(pi / 4, 0.0)},
                  PureQuantum{StrategyParams(pi / 4, pi)}},
                 ClassicalMixed{0.5});
  CHECK(cert.grid.points_per_axis == 21);
  CHECK(cert.verdict == NeVerdict::ne_pair);
  CHECK(cert.max_gain_q <= 1e-9);
  CHECK(cert.max_gain_picard <= 1e-9);
  CHECK_FALSE(cert.witness.has_value());

  // Against the pincer every classical reply scores the same losing payoff.
  for (int i = 0; i <= 20; ++i) {
    const GameOutcome g = play({PureQuantum{StrategyParams(pi / 4, 0.0)},
                                ClassicalMixed{i / 20.0},
                                PureQuantum{StrategyParams(pi / 4, pi)}});
    CHECK(g.payoff_q == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the classical core is an equilibrium pair but not strict") {
  SUBCASE("free second move") {
    const std::vector<std::size_t> axes{1};
    const NeCertificate cert = certify_ne(
        {ClassicalMixed{0.5}, ClassicalMixed{0.3}}, ClassicalMixed{0.5}, {}, 1e-9,
        axes);
    CHECK(cert.verdict == NeVerdict::ne_pair);
    CHECK(cert.max_gain_q <= 1e-9);
    CHECK(cert.max_gain_picard <= 1e-9);
  }
  SUBCASE("free first move") {
    const std::vector<std::size_t> axes{0};
    const NeCertificate cert = certify_ne(
        {ClassicalMixed{0.8}, ClassicalMixed{0.5}}, ClassicalMixed{0.5}, {}, 1e-9,
        axes);
    CHECK(cert.verdict == NeVerdict::ne_pair);
  }
}

TEST_CASE("deviating the closing angle is punished monotonically") {
  double previous = 1.0;
  for (double delta : {0.1, 0.2, 0.3}) {
    double best_response = 1.0;
    for (int i = 0; i <= 20; ++i) {
      const GameOutcome g =
          play({PureQuantum{StrategyParams(pi / 4, 0.0)}, ClassicalMixed{i / 20.0},
                PureQuantum{StrategyParams(pi / 4 + delta, pi)}});
      best_response = std::min(best_response, g.payoff_q);
    }
    CHECK(best_response < previous);
    previous = best_response;
  }
  CHECK(previous < 1.0);
}

TEST_CASE("category 1 and 2 profiles certify as equilibrium pairs") {
  const NeCertificate cat1 =
      certify_ne({PureQuantum{StrategyParams(pi / 4, 1.1)},
                  PureQuantum{StrategyParams(pi / 4, pi / 2)}},
                 MixedTwoUnitary{0.5, kSigma1, kSigma3});
  CHECK(cat1.verdict == NeVerdict::ne_pair);
  CHECK(cat1.max_gain_q <= 1e-9);
  CHECK(cat1.max_gain_picard <= 1e-9);

  const NeCertificate cat2 =
      certify_ne({PureQuantum{StrategyParams(pi / 4, 2.0)},
                  PureQuantum{StrategyParams(pi / 4, pi / 2)}},
                 MixedTwoUnitary{0.5, kSigma2, kIdentity});
  CHECK(cat2.verdict == NeVerdict::ne_pair);
  CHECK(cat2.max_gain_q <= 1e-9);
  CHECK(cat2.max_gain_picard <= 1e-9);
}

TEST_CASE("category 3 and 4 profiles are refuted with a live witness") {
  const MixedTwoUnitary picard3{0.5, kSigma3, kSigma2};
  const NeCertificate cat3 = certify_ne(
      {PureQuantum{StrategyParams(0.0, 0.3)}, PureQuantum{StrategyParams(pi / 4, pi)}},
      picard3);
  CHECK(cat3.verdict == NeVerdict::refuted);
  CHECK(cat3.max_gain_q > 0.9);
  REQUIRE(cat3.witness.has_value());
  CHECK(cat3.witness->player == "q");
  REQUIRE(cat3.witness->params.size() == 4);
  {
    // Replaying the witness deviation must realise the reported gain.
    const auto& w = cat3.witness->params;
    const GameOutcome g = play({PureQuantum{StrategyParams(w[0], w[1])}, picard3,
                                PureQuantum{StrategyParams(w[2], w[3])}});
    const GameOutcome base = play({PureQuantum{StrategyParams(0.0, 0.3)}, picard3,
                                   PureQuantum{StrategyParams(pi / 4, pi)}});
    CHECK(g.payoff_q - base.payoff_q ==
          doctest::Approx(cat3.witness->payoff_gain).epsilon(1e-12));
  }

  const MixedTwoUnitary picard4{0.5, kIdentity, kSigma1};
  const NeCertificate cat4 = certify_ne({PureQuantum{StrategyParams(pi / 2, 0.7)},
                                         PureQuantum{StrategyParams(pi / 4, 0.0)}},
                                        picard4);
  CHECK(cat4.verdict == NeVerdict::refuted);
  CHECK(cat4.max_gain_q > 0.9);
  REQUIRE(cat4.witness.has_value());
  CHECK(cat4.witness->player == "q");
  {
    const auto& w = cat4.witness->params;
    const GameOutcome g = play({PureQuantum{StrategyParams(w[0], w[1])}, picard4,
                                PureQuantum{StrategyParams(w[2], w[3])}});
    const GameOutcome base = play({PureQuantum{StrategyParams(pi / 2, 0.7)},
                                   picard4,
                                   PureQuantum{StrategyParams(pi / 4, 0.0)}});
    CHECK(g.payoff_q - base.payoff_q ==
          doctest::Approx(cat4.witness->payoff_gain).epsilon(1e-12));
  }
}

TEST_CASE("certificates serialise to parseable JSON") {
  const NeCertificate cert = certify_ne(
      {PureQuantum{StrategyParams(0.0, 0.3)}, PureQuantum{StrategyParams(pi / 4, pi)}},
      MixedTwoUnitary{0.5, kSigma3, kSigma2});
  const nlohmann::json j = nlohmann::json::parse(cert.to_json());
  CHECK(j["verdict"] == "refuted");
  CHECK(j["grid_points_per_axis"] == 21);
  CHECK(j["max_gain_q"].get<double>() > 0.9);
  CHECK(j.contains("profile"));
  CHECK(j.contains("max_gain_picard"));
  REQUIRE_FALSE(j["witness"].is_null());
  CHECK(j["witness"]["player"] == "q");
  CHECK(j["witness"]["params"].size() == 4);
  CHECK(j["witness"]["payoff_gain"].get<double>() > 0.9);

  const NeCertificate pass = certify_ne({ClassicalMixed{0.5}, ClassicalMixed{0.5}},
                                        ClassicalMixed{0.5});
  const nlohmann::json jp = nlohmann::json::parse(pass.to_json());
  CHECK(jp["verdict"] == "ne_pair");
  CHECK(jp["witness"].is_null());
}

TEST_CASE("the discussion strategies beat each other in a closed cycle") {
  // Anchor the first link directly: the pincer variant with phi2 = 0 wins
  // against the sigma3/sigma2 mix at any mixing probability.
  for (double p : {0.0, 0.5, 1.0}) {
    const GameOutcome g = play({PureQuantum{StrategyParams(pi / 4, 0.0)},
                                MixedTwoUnitary{p, kSigma3, kSigma2},
                                PureQuantum{StrategyParams(pi / 4, 0.0)}});
    CHECK(g.payoff_q > 0.0);
  }

  const std::vector<DominanceLink> links = cyclic_dominance_table();
  REQUIRE(links.size() == 4);
  for (const DominanceLink& link : links)
    CHECK(link.winner_payoff == doctest::Approx(1.0).epsilon(1e-9));
  // Each loser is the winner of the previous link; the chain closes.
  CHECK(links[1].loser == links[0].winner);
  CHECK(links[2].loser == links[1].winner);
  CHECK(links[3].loser == links[2].winner);
  CHECK(links[0].loser == links[3].winner);
}
