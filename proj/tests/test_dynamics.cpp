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
#include <vector>

#include <gtest/gtest.h>

#include "vibcoh/dynamics.hpp"
#include "vibcoh/hamiltonian.hpp"

namespace vibcoh {
namespace {

// Classical fixed-step RK4, used only as an independent reference.
std::vector<CVector> rk4_reference(const TimeDependentHamiltonian& h, const CVector& y0,
                                   const std::vector<double>& grid, int substeps) {
  std::vector<CVector> out{y0};
  CVector y = y0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = (grid[i] - grid[i - 1]) / substeps;
    double t = grid[i - 1];
    for (int s = 0; s < substeps; ++s) {
      const CVector k1 = -kI * h.apply(t, y);
      const CVector k2 = -kI * h.apply(t + dt / 2, y + dt / 2 * k1);
      const CVector k3 = -kI * h.apply(t + dt / 2, y + dt / 2 * k2);
      const CVector k4 = -kI * h.apply(t + dt, y + dt * k3);
      y += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
    }
    out.push_back(y);
  }
  return out;
}

TEST(Dopri5, ExponentialDecayExact) {
  using V = Eigen::VectorXd;
  auto f = [](double, const V& y) -> V { return -0.7 * y; };
  const V y0 = V::Constant(1, 2.0);
  const auto ys = integrate_dopri5<V>(f, y0, {0.0, 1.0, 5.0});
  EXPECT_NEAR(ys[2](0), 2.0 * std::exp(-3.5), 1e-10);
}

TEST(Dopri5, RejectsDecreasingGrid) {
  using V = Eigen::VectorXd;
  auto f = [](double, const V& y) -> V { return y; };
  EXPECT_THROW(integrate_dopri5<V>(f, V::Ones(1), {1.0, 0.0}), std::invalid_argument);
}

TEST(Schrodinger, ZeroHamiltonianIsIdentity) {
  ModeSpace sp({4, 3});
  const StateVector psi = coherent_state(sp, 0, 0.5);
  const auto tr = evolve_schrodinger([&](double) { return CMatrix::Zero(12, 12).eval(); }, psi, {0.0, 1.0, 2.0});
  for (const auto& s : tr.states) EXPECT_LT((s.amps() - psi.amps()).norm(), 1e-15);
}

TEST(Schrodinger, NonHermitianRejected) {
  ModeSpace sp({3});
  const StateVector psi = vacuum(sp);
  const CMatrix b = annihilation(sp, 0).mat();
  EXPECT_THROW(evolve_schrodinger([&](double) { return b; }, psi, {0.0, 1.0}), NumericalError);
  EXPECT_THROW(evolve_schrodinger([&](double) { return CMatrix::Zero(2, 2).eval(); }, psi, {0.0, 1.0}),
               std::invalid_argument);
}

TEST(Schrodinger, StationaryDisplacementReachesUnitOverlap) {
  const Preset p = preset(PresetKind::displacement);
  ModeSpace sp({12});
  const TimeDependentHamiltonian h(ideal_terms(p), sp);
  const StateVector target = coherent_state(sp, 0, 1.0);
  // Exact propagator path and the adaptive path must both hit the target.
  const auto exact = evolve_schrodinger(h, vacuum(sp), {0.0, 6.25});
  EXPECT_GE(std::abs(overlap(target, exact.states.back())), 1 - 1e-6);
  const auto adaptive = evolve_schrodinger([&](double t) { return h.at(t); }, vacuum(sp), {0.0, 6.25});
  EXPECT_GE(std::abs(overlap(target, adaptive.states.back())), 1 - 1e-6);
}

TEST(Schrodinger, TrueDisplacementAgainstRk4Reference) {
  PresetParams pp;
  pp.eta = 0.4;
  pp.gamma = 20.0;
  const Preset p = preset(PresetKind::displacement, pp);
  ModeSpace sp({6, 2});
  const TimeDependentHamiltonian h(true_terms(p), sp);
  const auto grid = arange(0.0, 10.0, 0.05);
  const StateVector psi0 = vacuum(sp);
  const auto tr = evolve_schrodinger(h, psi0, grid);
  const auto ref = rk4_reference(h, psi0.amps(), grid, 40);
  const StateVector target = coherent_state(sp, 0, 1.0);
  double sup = 0.0, norm_drift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = std::abs(overlap(target, tr.states[i]));
    const double b = std::abs(target.amps().dot(ref[i]));
    sup = std::max(sup, std::abs(a - b));
    norm_drift = std::max(norm_drift, std::abs(tr.states[i].norm() - 1.0));
  }
  EXPECT_LT(sup, 1e-4);
  EXPECT_LT(norm_drift, 1e-8);
  const StateVector at = evolve_schrodinger(h, psi0, {0.0, 6.25}).states.back();
  EXPECT_GE(std::abs(overlap(target, at)), 0.98);
}

TEST(Schrodinger, ToleranceConvergence) {
  const Preset p = preset(PresetKind::kerr);
  ModeSpace sp({6, 3});
  const TimeDependentHamiltonian h(true_terms(p), sp);
  const StateVector psi0 = coherent_state(sp, 0, cplx(0, -1));
  const auto grid = arange(0.0, 40.0, 1.0);
  EvolveOptions loose;
  loose.rtol = 1e-8;
  loose.atol = 1e-10;
  EvolveOptions tight;
  tight.rtol = 1e-10;
  tight.atol = 1e-12;
  const auto a = evolve_schrodinger(h, psi0, grid, loose);
  const auto b = evolve_schrodinger(h, psi0, grid, tight);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT((a.states[i].amps() - b.states[i].amps()).norm(), 1e-5);
  }
}

TEST(Schrodinger, EnergyConservedForConstantHamiltonian) {
  const Preset p = preset(PresetKind::crossphase);
  ModeSpace sp({5, 5});
  const TimeDependentHamiltonian h(p.terms.stationary(), sp);
  const CMatrix hm = h.at(0.0) + 0.3 * annihilation(sp, 0).mat() + 0.3 * creation(sp, 0).mat();
  const StateVector psi0 = coherent_state(sp, 0, 0.8);
  const auto tr = evolve_schrodinger([&](double) { return hm; }, psi0, arange(0.0, 20.0, 2.0));
  const double e0 = psi0.amps().dot(hm * psi0.amps()).real();
  for (const auto& s : tr.states) {
    EXPECT_NEAR(s.amps().dot(hm * s.amps()).real(), e0, 1e-7 * std::max(1.0, std::abs(e0)));
  }
}

TEST(Lindblad, UnitaryLimitMatchesSchrodinger) {
  ModeSpace sp({4, 4});
  const CMatrix bx = annihilation(sp, 0).mat(), by = annihilation(sp, 1).mat();
  const CMatrix h = 0.4 * (bx.adjoint() * by + by.adjoint() * bx) + 0.1 * bx.adjoint() * bx;
  const StateVector psi0 = coherent_state(sp, 0, 0.7);
  const auto grid = arange(0.0, 5.0, 0.5);
  const auto s = evolve_schrodinger([&](double) { return h; }, psi0, grid);
  const auto l = evolve_lindblad([&](double) { return h; }, [](double) { return std::vector<CMatrix>{}; },
                                 DensityMatrix::pure(psi0), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(fidelity(l.states[i], s.states[i]), 1.0, 1e-6);
}

TEST(Lindblad, DampingWithoutHalfConvention) {
  ModeSpace sp({3});
  const double gamma = 0.3;
  const CMatrix j = std::sqrt(gamma) * annihilation(sp, 0).mat();
  const auto grid = arange(0.0, 6.0, 0.5);
  const auto tr = evolve_lindblad([&](double) { return CMatrix::Zero(3, 3).eval(); },
                                  [&](double) { return std::vector<CMatrix>{j}; },
                                  DensityMatrix::pure(fock_state(sp, {1})), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(tr.states[i].mat()(1, 1).real(), std::exp(-2 * gamma * grid[i]), 1e-9);
    EXPECT_NEAR(tr.states[i].trace(), 1.0, 1e-10);
    EXPECT_GE(tr.states[i].min_eigenvalue(), -1e-7);
  }
}

TEST(Lindblad, VacuumIsFixedPoint) {
  ModeSpace sp({3, 3});
  const CMatrix j = annihilation(sp, 0).mat() + 0.5 * annihilation(sp, 1).mat();
  const auto tr = evolve_lindblad([&](double) { return CMatrix::Zero(9, 9).eval(); },
                                  [&](double) { return std::vector<CMatrix>{j}; },
                                  DensityMatrix::pure(vacuum(sp)), {0.0, 10.0});
  EXPECT_NEAR(fidelity(tr.states.back(), vacuum(sp)), 1.0, 1e-14);
}

TEST(Lindblad, DimensionMismatch) {
  ModeSpace sp({3});
  EXPECT_THROW(evolve_lindblad([](double) { return CMatrix::Zero(3, 3).eval(); },
                               [](double) { return std::vector<CMatrix>{CMatrix::Zero(4, 4)}; },
                               DensityMatrix::pure(vacuum(sp)), {0.0, 1.0}),
               std::invalid_argument);
}

TEST(Observables, OverlapStartsAtCoherentVacuumValueAndTraceIsOne) {
  const Preset p = preset(PresetKind::displacement);
  ModeSpace sp({6, 2});
  const TimeDependentHamiltonian h(true_terms(p), sp);
  const auto tr = evolve_schrodinger(h, vacuum(sp), arange(0.0, 8.0, 0.5));
  const StateVector target = coherent_state(sp, 0, 1.0);
  std::map<std::string, Functional<StateVector>> fs;
  fs["overlap"] = [&](const StateVector& s) { return std::abs(overlap(target, s)); };
  fs["fidelity"] = [&](const StateVector& s) { return fidelity(s, target); };
  const auto obs = observable_series(tr, fs);
  // Truncated normalization at dim 6 lifts e^{-1/2} by 1/sqrt(retained mass).
  double mass = 0.0, fact = 1.0;
  for (int n = 0; n < 6; ++n) {
    if (n > 0) fact *= n;
    mass += std::exp(-1.0) / fact;
  }
  EXPECT_NEAR(obs.at("overlap").front(), std::exp(-0.5) / std::sqrt(mass), 1e-12);
  EXPECT_NEAR(obs.at("overlap").front(), 0.6065, 1e-3);
  for (double f : obs.at("fidelity")) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-12);
  }
  ModeSpace sp2({3});
  const auto lt = evolve_lindblad([](double) { return CMatrix::Zero(3, 3).eval(); },
                                  [&](double) { return std::vector<CMatrix>{annihilation(sp2, 0).mat()}; },
                                  DensityMatrix::pure(fock_state(sp2, {2})), arange(0.0, 3.0, 0.25));
  std::map<std::string, Functional<DensityMatrix>> lf;
  lf["trace"] = [](const DensityMatrix& r) { return r.trace(); };
  const auto traces = observable_series(lt, lf);
  for (double tr_v : traces.at("trace")) EXPECT_NEAR(tr_v, 1.0, 1e-6);
}

TEST(Grid, ArangeIncludesEnd) {
  const auto g = arange(-200.0, 300.0, 1.0);
  EXPECT_EQ(g.size(), 501u);
  EXPECT_EQ(g.back(), 300.0);
  const auto h = arange(0.0, 1.0, 0.3);
  EXPECT_EQ(h.back(), 1.0);
}

}  // namespace
}  // namespace vibcoh
