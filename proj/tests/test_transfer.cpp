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
#include <random>

#include <gtest/gtest.h>

#include "vibcoh/transfer.hpp"

namespace vibcoh {
namespace {

StateVector reference_input() {
  ModeSpace sp({3});
  CVector v(3);
  v << std::sqrt(0.4), -std::sqrt(0.4), std::sqrt(0.2);
  return StateVector(sp, v);
}

TEST(PulseGamma, ProductClosedFormAndSymmetry) {
  const double gt = 0.03;
  for (double t : {-150.0, -20.0, 0.0, 3.3, 90.0}) {
    const auto [g1, g2] = pulse_gamma(t, gt);
    EXPECT_NEAR(std::sqrt(g1 * g2), gt / (2 * std::cosh(gt * t)), 1e-16);
    EXPECT_NEAR(pulse_gamma(-t, gt).first, g2, 1e-16);
    EXPECT_GE(g1, 0.0);
    EXPECT_GE(g2, 0.0);
  }
  EXPECT_NEAR(std::sqrt(pulse_gamma(0.0, gt).first * pulse_gamma(0.0, gt).second), gt / 2, 1e-16);
  EXPECT_EQ(PulseSchedule{}.gamma_tilde, 0.03);
  EXPECT_THROW(pulse_gamma(0.0, 0.0), std::invalid_argument);
}

TEST(PulseGamma, CounterIntuitiveOrder) {
  // Transmitter coupling rises, receiver coupling falls.
  const auto early = pulse_gamma(-100.0, 0.03), late = pulse_gamma(100.0, 0.03);
  EXPECT_LT(early.first, late.first);
  EXPECT_GT(early.second, late.second);
  const auto w = pulse_gamma(-100.0, 0.03, PulseOrder::as_written);
  EXPECT_NEAR(w.first, early.second, 1e-16);
}

TEST(PulseGamma, NoOverflowFarOut) {
  const auto [g1, g2] = pulse_gamma(1e5, 0.03);
  EXPECT_TRUE(std::isfinite(g1));
  EXPECT_TRUE(std::isfinite(g2));
}

TEST(PulseArea, InfiniteAndFiniteWindow) {
  PulseSchedule wide;
  wide.t_open = -3000;
  wide.t_close = 3000;
  EXPECT_NEAR(pulse_area(wide, 200000), kPi / 2, 1e-8);
  const double a = pulse_area(PulseSchedule{});
  EXPECT_NEAR(a, 2 * std::atan(std::tanh(3.0)), 1e-9);
  EXPECT_LT(std::abs(a - kPi / 2) / (kPi / 2), 0.02);
}

TEST(Generator, DecoupledLimitIsSingleModeDamping) {
  ModeSpace sp({3, 3});
  const CMatrix j = collective_jump(sp, 0.2, 0.0, 0.7);
  EXPECT_LT((j - std::sqrt(0.2) * annihilation(sp, 0).mat()).norm(), 1e-15);
}

TEST(Generator, ExpandsToLiteralMasterEquation) {
  ModeSpace sp({4, 4});
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0, 1);
  CMatrix a(16, 16);
  for (Eigen::Index i = 0; i < 16; ++i)
    for (Eigen::Index k = 0; k < 16; ++k) a(i, k) = cplx(n(rng), n(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  const CMatrix b1 = annihilation(sp, 0).mat(), b2 = annihilation(sp, 1).mat();
  PulseSchedule s;
  for (double t : {-50.0, 0.0, 37.0}) {
    const auto [g1, g2] = s.rates(t);
    auto d = [&](const CMatrix& b) { return (2.0 * b * rho * b.adjoint() - b.adjoint() * b * rho - rho * b.adjoint() * b).eval(); };
    const double c = std::sqrt(g1 * g2);
    const CMatrix literal = g1 * d(b1) + g2 * d(b2) +
                            c * (2.0 * b1 * rho * b2.adjoint() + 2.0 * b2 * rho * b1.adjoint() -
                                 b1.adjoint() * b2 * rho - b2.adjoint() * b1 * rho - rho * b1.adjoint() * b2 -
                                 rho * b2.adjoint() * b1);
    const CMatrix gen = lindblad_rhs(CMatrix::Zero(16, 16), reduced_me_generator(s, 0.0, sp)(t), rho);
    EXPECT_LT((gen - literal).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Generator, VibrationalDecayAddsTwoJumps) {
  ModeSpace sp({3, 3});
  EXPECT_EQ(reduced_me_generator(PulseSchedule{}, 0.0, sp)(0.0).size(), 1u);
  EXPECT_EQ(reduced_me_generator(PulseSchedule{}, 0.0, sp, 0.01)(0.0).size(), 3u);
}

class TransferRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { report_ = new TransferReport(run_transfer(reference_input(), PulseSchedule{})); }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static TransferReport* report_;
};
TransferReport* TransferRun::report_ = nullptr;

TEST_F(TransferRun, InitialFidelityAndGrid) {
  EXPECT_EQ(report_->times.front(), -200.0);
  EXPECT_EQ(report_->times.back(), 300.0);
  EXPECT_NEAR(report_->fidelity.front(), 0.16, 1e-6);
  EXPECT_LE(report_->s_lin.front(), 1e-10);
}

TEST_F(TransferRun, SeriesBoundsAndTrace) {
  for (std::size_t i = 0; i < report_->times.size(); ++i) {
    EXPECT_GE(report_->fidelity[i], 0.0);
    EXPECT_LE(report_->fidelity[i], 1.0);
    EXPECT_GE(report_->quasi_norm[i], 0.0);
    EXPECT_LE(report_->quasi_norm[i], 1.0 + 1e-6);
    EXPECT_GE(report_->s_lin[i], 0.0);
    EXPECT_LE(report_->s_lin[i], 1.0);
    EXPECT_NEAR(report_->trace[i], 1.0, 1e-6);
  }
  EXPECT_GE(report_->final_state.min_eigenvalue(), -1e-7);
}

TEST_F(TransferRun, ChannelClosureFreezesObservables) {
  std::size_t i200 = 0;
  while (report_->times[i200] < 200.0) ++i200;
  for (std::size_t i = i200 + 1; i < report_->times.size(); ++i) {
    const double dt = report_->times[i] - report_->times[i - 1];
    EXPECT_LT(std::abs(report_->fidelity[i] - report_->fidelity[i - 1]), 1e-8 * dt);
    EXPECT_LT(std::abs(report_->quasi_norm[i] - report_->quasi_norm[i - 1]), 1e-8 * dt);
    EXPECT_LT(std::abs(report_->s_lin[i] - report_->s_lin[i - 1]), 1e-8 * dt);
  }
}

TEST_F(TransferRun, SteadyStateNormalizedAndPure) {
  EXPECT_NEAR(report_->quasi_norm.back(), 1.0, 1e-2);
  const double peak = *std::max_element(report_->s_lin.begin(), report_->s_lin.end());
  EXPECT_LT(report_->s_lin.back(), peak);
  EXPECT_LT(report_->s_lin.back(), 0.25);
  // Regression anchor for the collective-jump model (see README).
  EXPECT_NEAR(report_->fidelity.back(), 0.8243, 5e-4);
}

TEST(Transfer, VacuumInputIsFixed) {
  ModeSpace sp({4});
  TransferOptions o;
  o.dt = 25.0;
  const auto rep = run_transfer(vacuum(sp), PulseSchedule{}, o);
  for (double f : rep.fidelity) EXPECT_NEAR(f, 1.0, 1e-12);
}

TEST(Transfer, RateScaleOnlyRescalesTime) {
  TransferOptions o;
  o.dt = 10.0;
  const auto a = run_transfer(reference_input(), PulseSchedule{}, o);
  PulseSchedule fast;
  fast.gamma_tilde = 0.06;
  fast.t_open = -100;
  fast.t_close = 100;
  TransferOptions o2 = o;
  o2.t_end = 150;
  o2.dt = 5.0;
  const auto b = run_transfer(reference_input(), fast, o2);
  EXPECT_NEAR(a.fidelity.back(), b.fidelity.back(), 1e-7);
}

TEST(Transfer, OrderAndPhaseMatter) {
  TransferOptions o;
  o.dt = 50.0;
  const double best = run_transfer(reference_input(), PulseSchedule{}, o).fidelity.back();
  PulseSchedule written;
  written.order = PulseOrder::as_written;
  EXPECT_LT(run_transfer(reference_input(), written, o).fidelity.back(), best - 0.2);
  TransferOptions zero_phase = o;
  zero_phase.phi = 0.0;
  EXPECT_LT(run_transfer(reference_input(), PulseSchedule{}, zero_phase).fidelity.back(), best - 0.5);
}

TEST(Transfer, TruncationGuard) {
  ModeSpace sp({6});
  EXPECT_THROW(run_transfer(fock_state(sp, {5}), PulseSchedule{}), TruncationError);
}

TEST(RwaBeamSplitter, IdentitySwapAndHalfSplit) {
  const StateVector psi = reference_input();
  const StateVector same = rwa_bs_transfer(psi, 0.0);
  const ModeSpace sp({4, 4});
  const CVector p4 = pad_single_mode(psi, 4);
  const StateVector in = product_state(sp, {p4, fock_vector(4, 0)});
  EXPECT_LT((same.amps() - in.amps()).norm(), 1e-14);

  const StateVector swapped = swap_phase_corrected(rwa_bs_transfer(psi, kPi / 2));
  const StateVector target = product_state(sp, {fock_vector(4, 0), p4});
  EXPECT_GE(fidelity(swapped, target), 1 - 1e-8);

  ModeSpace one({2});
  const StateVector split = rwa_bs_transfer(fock_state(one, {1}), kPi / 4);
  EXPECT_NEAR(std::norm(split.amps()(sp.index({1, 0}))), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(split.amps()(sp.index({0, 1}))), 0.5, 1e-12);
}

}  // namespace
}  // namespace vibcoh
