// Copyright 2026 The vibcoh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <map>
#include <string>

#include <gtest/gtest.h>

#include "vibcoh/bell_measure.hpp"

namespace vibcoh {
namespace {

constexpr double kAlpha = 2.0;

std::map<std::string, double> outcome_probs(const MeasurementRecord& r) {
  std::map<std::string, double> m;
  for (const auto& b : r.branches) m[outcome_string(b.outcomes)] += b.probability;
  return m;
}

TEST(Carrier, MatchesFockOperator) {
  ModeSpace sp({16, 16}, true);
  CoherentSuperposition s(2, true);
  s.add(0.6, {0.4, -0.3}, Electronic::g).add(cplx(0, 0.8), {-0.2, 0.5}, Electronic::e);
  for (double a : {kPi / 4, -kPi / 4, kPi / 2, 0.3}) {
    const auto sym = to_fock(carrier_pulse(s, a), sp);
    const auto num = carrier_operator(sp, a) * to_fock(s, sp);
    EXPECT_LT((sym.amps() - num.amps()).norm(), 1e-12) << a;
  }
}

TEST(Carrier, PiHalfFlipsWithPhase) {
  const auto s = carrier_pulse(CoherentSuperposition::ket({0.0}, Electronic::g), kPi / 2);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.terms()[0].elec, Electronic::e);
  EXPECT_NEAR(std::abs(s.terms()[0].weight - cplx(0, -1)), 0.0, 1e-15);
}

TEST(Qnd, MatchesFockOperator) {
  ModeSpace sp({16, 16}, true);
  CoherentSuperposition s(2, true);
  s.add(0.6, {0.4, -0.3}, Electronic::g).add(cplx(0.3, 0.5), {-0.2, 0.5}, Electronic::e);
  for (std::size_t mode : {0u, 1u}) {
    const auto sym = to_fock(qnd_evolution(s, mode, kPi / 2), sp);
    const auto num = qnd_operator(sp, mode, kPi / 2) * to_fock(s, sp);
    EXPECT_LT((sym.amps() - num.amps()).norm(), 1e-12);
  }
}

TEST(ParityReadout, EvenGivesGroundOddGivesExcited) {
  for (int sign : {1, -1}) {
    const auto in = with_electronic(cat_ket(2.0, sign), Electronic::g);
    const auto out = parity_to_electronic(in, 0);
    const double pe = std::pow(norm(electronic_component(out, Electronic::e)), 2);
    EXPECT_NEAR(pe, sign == 1 ? 0.0 : 1.0, 1e-12);
  }
}

TEST(ParityReadout, OddOutcomeCarriesPlusI) {
  const auto out = parity_to_electronic(with_electronic(cat_ket(1.5, -1), Electronic::g), 0);
  // (|g> + i|e>)/sqrt2 -> i|e>: motional part is the rotated odd cat times i.
  const auto expect = cplx(0, 1) * with_electronic(apply_phase_rotation(cat_ket(1.5, -1), 0, kPi / 2), Electronic::e);
  EXPECT_NEAR(std::abs(inner(expect, out) - 1.0), 0.0, 1e-12);
}

TEST(ParityReadout, NondemolitionOnParityEigenstates) {
  for (int sign : {1, -1}) {
    const auto rec = electronic_measure(parity_to_electronic(with_electronic(cat_ket(2.0, sign), Electronic::g), 0));
    ASSERT_EQ(rec.branches.size(), 1u);
    const auto post = with_electronic(rec.branches[0].state, Electronic::none);
    // still a parity eigenstate with the same eigenvalue
    EXPECT_NEAR(inner(post, apply_parity(post, 0)).real(), double(sign), 1e-12);
    const auto reset = reset_if_excited(rec.branches[0].state, rec.branches[0].outcomes.back());
    EXPECT_NEAR(norm(electronic_component(reset, Electronic::g)), 1.0, 1e-12);
  }
}

TEST(Discrimination, FirstTwoOutcomesDeterministic) {
  DiscriminationOptions opt;
  opt.disambiguate = false;
  const std::map<EcsKind, std::string> table{{EcsKind::phi_plus, "gg"},
                                             {EcsKind::phi_minus, "eg"},
                                             {EcsKind::psi_plus, "gg"},
                                             {EcsKind::psi_minus, "ge"}};
  for (double a : {1.0, 1.5, 2.0, 3.0}) {
    for (EcsKind k : kAllEcsKinds) {
      auto p = outcome_probs(discriminate_ecs(ecs_ket(k, a), a, MeasurementPolicy::enumerate(), opt));
      EXPECT_NEAR(p[table.at(k)], 1.0, 1e-12) << to_string(k) << " alpha " << a;
    }
  }
}

TEST(Discrimination, MinusStatesLabelledExactly) {
  for (EcsKind k : {EcsKind::phi_minus, EcsKind::psi_minus}) {
    const auto rec = discriminate_ecs(ecs_ket(k, kAlpha), kAlpha);
    EXPECT_NEAR(rec.label_probability(label_of(k)), 1.0, 1e-12) << to_string(k);
  }
}

TEST(Discrimination, PsiPlusFalseExcitation) {
  const double eps = disambiguation_epsilon(kAlpha);
  EXPECT_NEAR(2 * std::sqrt(2.0) * kAlpha * eps, kPi / 2, 1e-15);
  auto p = outcome_probs(discriminate_ecs(ecs_ket(EcsKind::psi_plus, kAlpha), kAlpha));
  // D(-eps)|0>: odd weight of a coherent state
  const double oracle = 0.5 * (1.0 - std::exp(-2 * eps * eps));
  EXPECT_NEAR(p["gge"], oracle, 1e-12);
  EXPECT_NEAR(p["gge"], 0.073, 0.005);
  EXPECT_NEAR(p["ggg"] + p["gge"], 1.0, 1e-12);
}

// Independent single-mode Fock chain for the phi+ branch after the splitter.
TEST(Discrimination, PhiPlusMatchesFockChain) {
  const double a2 = std::sqrt(2.0) * kAlpha;
  ModeSpace sp({48}, true);
  CVector cat = coherent_amplitudes(48, a2) + coherent_amplitudes(48, -a2);
  std::vector<CVector> f{cat};
  StateVector psi = product_state(sp, f, 0).normalized();
  const auto c1 = carrier_operator(sp, kPi / 4), c2 = carrier_operator(sp, -kPi / 4);
  const auto q = qnd_operator(sp, 0, kPi / 2);
  auto chain = [&](const StateVector& s) { return c2 * (q * (c1 * s)); };
  psi = chain(psi);
  const auto g_only = electronic_measure(psi).branches;
  double pg1 = 0.0;
  StateVector post = psi;
  for (const auto& b : g_only) {
    if (b.outcomes[0] == Outcome::g) {
      pg1 = b.probability;
      post = b.state;
    }
  }
  EXPECT_NEAR(pg1, 1.0, 1e-10);
  const auto d = displacement_operator(sp, 0, -disambiguation_epsilon(kAlpha));
  const auto rec = electronic_measure(chain(d * post));
  double pe = 0.0;
  for (const auto& b : rec.branches) {
    if (b.outcomes[0] == Outcome::e) pe = b.probability;
  }
  auto sym = outcome_probs(discriminate_ecs(ecs_ket(EcsKind::phi_plus, kAlpha), kAlpha));
  EXPECT_NEAR(sym["gge"], pe, 1e-8);
  EXPECT_GT(sym["gge"], 0.9);
}

TEST(Discrimination, EfficiencyNearPointNineThree) {
  const double eff = efficiency_estimate(kAlpha);
  EXPECT_NEAR(eff, 0.93, 0.01);
  const double eps = disambiguation_epsilon(kAlpha);
  EXPECT_LE(eff, 0.5 * (1.0 + std::exp(-2 * eps * eps)) + 1e-12);
}

TEST(Discrimination, ProbabilitiesSumToOne) {
  CoherentSuperposition mix(2, false);
  for (EcsKind k : kAllEcsKinds) mix = mix + ecs_ket(k, kAlpha);
  DiscriminationOptions noisy;
  noisy.detector = {0.03, 0.05};
  for (const auto& in : {mix, ecs_ket(EcsKind::psi_plus, kAlpha), CoherentSuperposition::ket({0.7, -1.1})}) {
    EXPECT_NEAR(discriminate_ecs(in, kAlpha).total_probability(), 1.0, 1e-12);
    EXPECT_NEAR(discriminate_ecs(in, kAlpha, MeasurementPolicy::enumerate(), noisy).total_probability(), 1.0, 1e-12);
  }
}

TEST(Discrimination, DetectorErrorsOracle) {
  DiscriminationOptions opt;
  opt.detector = {0.02, 0.07};
  const auto rec = discriminate_ecs(ecs_ket(EcsKind::phi_minus, kAlpha), kAlpha, MeasurementPolicy::enumerate(), opt);
  EXPECT_NEAR(rec.label_probability(EcsLabel::phi_minus), (1 - 0.07) * (1 - 0.02), 1e-12);
  EXPECT_LT(efficiency_estimate(kAlpha, opt), efficiency_estimate(kAlpha));
}

TEST(Discrimination, ConfusionRowsNormalized) {
  const auto m = confusion_matrix(kAlpha);
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_NEAR(m[2][0], 0.5 * (1.0 - std::exp(-2 * std::pow(disambiguation_epsilon(kAlpha), 2))), 1e-12);
}

// Pearson chi-square of sampled counts against enumerated probabilities.
TEST(Sampling, ChiSquareAgainstEnumeration) {
  CoherentSuperposition mix(2, false);
  for (EcsKind k : kAllEcsKinds) mix = mix + ecs_ket(k, kAlpha);
  mix = mix.normalized();
  const auto probs = outcome_probs(discriminate_ecs(mix, kAlpha));
  const std::size_t n = 100000;
  const auto counts = sample_outcomes(mix, kAlpha, n, 20261016);
  double chi2 = 0.0;
  int cells = 0;
  std::size_t seen = 0;
  for (const auto& [key, p] : probs) {
    const double expct = p * double(n);
    const double obs = counts.count(key) ? double(counts.at(key)) : 0.0;
    seen += static_cast<std::size_t>(obs);
    if (expct < 5.0) continue;
    chi2 += (obs - expct) * (obs - expct) / expct;
    ++cells;
  }
  EXPECT_EQ(seen, n);
  ASSERT_GE(cells, 3);
  // 0.999 quantiles for df = 1..6
  const double crit[] = {10.83, 13.82, 16.27, 18.47, 20.52, 22.46};
  EXPECT_LT(chi2, crit[cells - 2]) << "cells " << cells;
}

TEST(Sampling, SeedDeterministic) {
  const auto in = ecs_ket(EcsKind::psi_plus, kAlpha);
  EXPECT_EQ(sample_outcomes(in, kAlpha, 500, 7), sample_outcomes(in, kAlpha, 500, 7));
  const auto a = discriminate_ecs(in, kAlpha, MeasurementPolicy::sample(3));
  EXPECT_TRUE(a.sampled);
  EXPECT_EQ(a.branches.size(), 1u);
}

TEST(FockReadout, TruncatedDisplacedVacuum) {
  ModeSpace sp({2}, true);
  CVector v = CVector::Zero(4);
  v(sp.index({0}, 0)) = 0.96;
  v(sp.index({1}, 1)) = cplx(0, -0.27);
  const auto rec = electronic_measure(StateVector(sp, v).normalized());
  double pe = 0.0, total = 0.0;
  for (const auto& b : rec.branches) {
    total += b.probability;
    if (b.outcomes[0] == Outcome::e) pe = b.probability;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(pe, 0.27 * 0.27 / (0.96 * 0.96 + 0.27 * 0.27), 1e-14);
  EXPECT_NEAR(pe, 0.073, 0.005);
}

TEST(FockReadout, DisplacedVacuumTwoLevelWeight) {
  const double eps = disambiguation_epsilon(kAlpha);
  const CVector c = coherent_amplitudes(30, -eps);
  EXPECT_GE(std::norm(c(0)) + std::norm(c(1)), 0.995);
  EXPECT_NEAR(std::abs(c(0)), 0.96, 0.005);
  EXPECT_NEAR(std::abs(c(1)), 0.27, 0.005);
}

TEST(Discrimination, RejectsBadInput) {
  EXPECT_THROW(discriminate_ecs(CoherentSuperposition::ket({1.0, 1.0, 1.0}), kAlpha), std::invalid_argument);
  EXPECT_THROW(discriminate_ecs(CoherentSuperposition::ket({1.0, 1.0}, Electronic::e), kAlpha), std::invalid_argument);
  EXPECT_THROW(discriminate_ecs(ecs_ket(EcsKind::phi_plus, kAlpha), 0.0), std::invalid_argument);
  EXPECT_THROW(carrier_pulse(coherent_ket(1.0), 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace vibcoh
