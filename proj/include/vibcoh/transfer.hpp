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

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "vibcoh/dynamics.hpp"
#include "vibcoh/hilbert.hpp"

namespace vibcoh {

// counter_intuitive: the transmitter rate Gamma1 rises while the receiver's
// Gamma2 falls. as_written keeps the literal shape with the opposite order.
enum class PulseOrder { counter_intuitive, as_written };

inline const char* to_string(PulseOrder o) {
  return o == PulseOrder::counter_intuitive ? "counter_intuitive" : "as_written";
}

// (Gamma1, Gamma2) with Gamma2(t) = Gamma1(-t) and sqrt(Gamma1 Gamma2) =
// gamma_tilde / (2 cosh(gamma_tilde t)).
inline std::pair<double, double> pulse_gamma(double t, double gamma_tilde,
                                             PulseOrder order = PulseOrder::counter_intuitive) {
  if (!(gamma_tilde > 0)) throw std::invalid_argument("pulse_gamma: gamma_tilde must be positive");
  const double x = gamma_tilde * t;
  // Gamma e^{x} / (2 cosh x) = Gamma / (1 + e^{-2x}), written to avoid overflow.
  const double rising = gamma_tilde / (1.0 + std::exp(-2.0 * x));
  const double falling = gamma_tilde / (1.0 + std::exp(2.0 * x));
  return order == PulseOrder::counter_intuitive ? std::make_pair(rising, falling) : std::make_pair(falling, rising);
}

struct PulseSchedule {
  double gamma_tilde = 0.03;
  double t_open = -200.0;
  double t_close = 200.0;
  PulseOrder order = PulseOrder::counter_intuitive;

  // Rates vanish outside the window (lasers off).
  std::pair<double, double> rates(double t) const {
    if (t < t_open || t > t_close) return {0.0, 0.0};
    return pulse_gamma(t, gamma_tilde, order);
  }
};

// Composite Simpson estimate of the integral of sqrt(Gamma1 Gamma2) over the window.
inline double pulse_area(const PulseSchedule& s, int intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double h = (s.t_close - s.t_open) / intervals;
  auto f = [&](double t) {
    const auto [g1, g2] = s.rates(t);
    return std::sqrt(g1 * g2);
  };
  double acc = f(s.t_open) + f(s.t_close);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(s.t_open + i * h);
  return acc * h / 3.0;
}

// sqrt(G1) b_1 + e^{i phi} sqrt(G2) b_2 on modes (0, 1).
inline CMatrix collective_jump(const ModeSpace& space, double g1, double g2, double phi) {
  if (space.num_modes() < 2) throw std::invalid_argument("transfer needs two modes");
  return std::sqrt(g1) * annihilation(space, 0).mat() + std::exp(kI * phi) * std::sqrt(g2) * annihilation(space, 1).mat();
}

// Time-dependent collective jump plus optional independent vibrational decay
// sqrt(gamma_v) b_i.
inline JumpFn reduced_me_generator(const PulseSchedule& schedule, double phi, const ModeSpace& space,
                                   double gamma_v = 0.0) {
  if (space.num_modes() < 2) throw std::invalid_argument("transfer needs two modes");
  const CMatrix b1 = annihilation(space, 0).mat();
  const CMatrix b2 = annihilation(space, 1).mat();
  const cplx ph = std::exp(kI * phi);
  return [=](double t) {
    const auto [g1, g2] = schedule.rates(t);
    std::vector<CMatrix> jumps{std::sqrt(g1) * b1 + ph * std::sqrt(g2) * b2};
    if (gamma_v > 0.0) {
      jumps.push_back(std::sqrt(gamma_v) * b1);
      jumps.push_back(std::sqrt(gamma_v) * b2);
    }
    return jumps;
  };
}

struct TransferOptions {
  int dim = 4;
  double phi = kPi;
  double gamma_v = 0.0;
  double t_end = 300.0;
  double dt = 1.0;
  int quasi_norm_levels = 3;  // sum over |0,i>, i < levels
  double rtol = 1e-10;
  double atol = 1e-12;
};

struct TransferReport {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> quasi_norm;
  std::vector<double> s_lin;
  std::vector<double> trace;
  StateVector target;
  DensityMatrix final_state;
};

// Embeds a single-mode state into dim levels.
inline CVector pad_single_mode(const StateVector& psi, int dim) {
  if (psi.space().num_modes() != 1 || psi.space().electronic()) {
    throw std::invalid_argument("transfer input must be a single-mode state");
  }
  if (psi.space().dims()[0] > dim) {
    // Allowed only if the extra levels are empty.
    if (psi.amps().tail(psi.space().dims()[0] - dim).norm() > 1e-12) {
      throw TruncationError("transfer input populates levels beyond the truncation");
    }
  }
  CVector v = CVector::Zero(dim);
  const int n = std::min<int>(dim, psi.space().dims()[0]);
  v.head(n) = psi.amps().head(n);
  return v;
}

inline TransferReport run_transfer(const StateVector& psi_in, const PulseSchedule& schedule,
                                   const TransferOptions& opt = {}) {
  if (opt.dim < 2) throw std::invalid_argument("transfer dimension must be >= 2");
  const ModeSpace space({opt.dim, opt.dim});
  const CVector psi = pad_single_mode(psi_in, opt.dim).normalized();
  const CVector vac = fock_vector(opt.dim, 0);
  const StateVector in = product_state(space, {psi, vac});
  const StateVector target = product_state(space, {vac, psi});

  const auto grid = arange(schedule.t_open, opt.t_end, opt.dt);
  const JumpFn jumps = reduced_me_generator(schedule, opt.phi, space, opt.gamma_v);
  const CMatrix zero = CMatrix::Zero(space.total_dim(), space.total_dim());
  EvolveOptions eo;
  eo.rtol = opt.rtol;
  eo.atol = opt.atol;
  eo.check_hermitian = false;
  const auto tr = evolve_lindblad([&](double) { return zero; }, jumps, DensityMatrix::pure(in), grid, eo);

  TransferReport rep{grid, {}, {}, {}, {}, target, tr.states.back()};
  const int levels = std::min(opt.quasi_norm_levels, opt.dim);
  for (const auto& rho : tr.states) {
    rep.fidelity.push_back(fidelity(rho, target));
    double qn = 0.0;
    for (int i = 0; i < levels; ++i) {
      const Eigen::Index k = space.index({0, i});
      qn += rho.mat()(k, k).real();
    }
    rep.quasi_norm.push_back(qn);
    rep.s_lin.push_back(linearized_entropy(rho));
    rep.trace.push_back(rho.trace());
  }
  return rep;
}

// Ideal beam-splitter exchange exp(-i theta (b1^dag b2 + b2^dag b1)) on
// |psi>|0>. theta = pi/2 swaps the modes with a (-i)^n phase on the receiver.
inline StateVector rwa_bs_transfer(const StateVector& psi_in, double theta, int dim = 4) {
  const ModeSpace space({dim, dim});
  const CVector psi = pad_single_mode(psi_in, dim);
  const StateVector in = product_state(space, {psi, fock_vector(dim, 0)});
  const CMatrix b1 = annihilation(space, 0).mat(), b2 = annihilation(space, 1).mat();
  const CMatrix h = b1.adjoint() * b2 + b2.adjoint() * b1;
  return StateVector(space, unitary_from_hermitian(h, theta) * in.amps());
}

// Removes the (-i)^n receiver phase left by a full swap.
inline StateVector swap_phase_corrected(const StateVector& swapped) {
  return phase_rotation_operator(swapped.space(), 1, kPi / 2) * swapped;
}

}  // namespace vibcoh
