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

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibcoh/bell_measure.hpp"
#include "vibcoh/coherent.hpp"
#include "vibcoh/errors.hpp"
#include "vibcoh/linalg.hpp"

namespace vibcoh {

// ---------------------------------------------------------------------------
// Logical frame. Qubit basis |0> = |alpha>, |1> = |-alpha> per mode; register
// index has the first mode most significant.

inline double code_overlap(cplx alpha) { return std::exp(-2.0 * std::norm(alpha)); }

// G^{-1/2} for the single-mode Gram matrix [[1,c],[c,1]].
inline CMatrix lowdin_matrix(cplx alpha) {
  const double c = code_overlap(alpha);
  if (c > 1.0 - 1e-12) throw std::invalid_argument("logical frame undefined for alpha ~ 0");
  const double p = 1.0 / std::sqrt(1.0 + c), q = 1.0 / std::sqrt(1.0 - c);
  CMatrix m(2, 2);
  m << 0.5 * (p + q), 0.5 * (p - q), 0.5 * (p - q), 0.5 * (p + q);
  return m;
}

inline CMatrix gram_sqrt_matrix(cplx alpha) {
  const double c = code_overlap(alpha);
  const double p = std::sqrt(1.0 + c), q = std::sqrt(1.0 - c);
  CMatrix m(2, 2);
  m << 0.5 * (p + q), 0.5 * (p - q), 0.5 * (p - q), 0.5 * (p + q);
  return m;
}

inline CMatrix kron_power(const CMatrix& m, std::size_t n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = kron(out, m);
  return out;
}

inline std::vector<cplx> code_ket(std::size_t index, std::size_t n, cplx alpha) {
  std::vector<cplx> amps(n);
  for (std::size_t m = 0; m < n; ++m) amps[m] = (index >> (n - 1 - m)) & 1u ? -alpha : alpha;
  return amps;
}

// Coordinates in the Loewdin-orthonormalized code basis. For states leaving
// the code space this is the orthogonal projection onto it.
inline CVector logical_coordinates(const CoherentSuperposition& s, cplx alpha) {
  if (s.electronic()) throw std::invalid_argument("logical_coordinates: electronic states not supported");
  const std::size_t n = s.n_modes();
  const std::size_t d = std::size_t{1} << n;
  CVector o = CVector::Zero(Eigen::Index(d));
  for (std::size_t x = 0; x < d; ++x) {
    const auto k = code_ket(x, n, alpha);
    for (const auto& t : s.terms()) o(Eigen::Index(x)) += t.weight * product_overlap(k, t.amps);
  }
  return kron_power(lowdin_matrix(alpha), n) * o;
}

inline CoherentSuperposition logical_state(const CVector& v, cplx alpha) {
  std::size_t n = 0;
  while ((Eigen::Index(1) << n) < v.size()) ++n;
  if ((Eigen::Index(1) << n) != v.size()) throw std::invalid_argument("logical vector size must be a power of two");
  const CVector a = kron_power(lowdin_matrix(alpha), n) * v;
  CoherentSuperposition s(n, false);
  for (std::size_t x = 0; x < std::size_t(v.size()); ++x) {
    if (a(Eigen::Index(x)) != cplx(0.0)) s.add(a(Eigen::Index(x)), code_ket(x, n, alpha));
  }
  if (s.size() == 0) s.add(0.0, code_ket(0, n, alpha));
  return s.merged();
}

// Applies a logical 2x2 unitary (given in the Loewdin frame) to one mode.
// Every term must sit at +-alpha on that mode.
inline CoherentSuperposition apply_logical(const CoherentSuperposition& s, std::size_t mode, cplx alpha,
                                           const CMatrix& u) {
  if (mode >= s.n_modes()) throw std::out_of_range("mode index out of range");
  const CMatrix k = lowdin_matrix(alpha) * u * gram_sqrt_matrix(alpha);
  CoherentSuperposition out(s.n_modes(), s.electronic());
  for (const auto& t : s.terms()) {
    int x = -1;
    if (std::abs(t.amps[mode] - alpha) < 1e-9) x = 0;
    if (std::abs(t.amps[mode] + alpha) < 1e-9) x = 1;
    if (x < 0) throw std::invalid_argument("apply_logical: term outside the code space");
    for (int y = 0; y < 2; ++y) {
      if (k(y, x) == cplx(0.0)) continue;
      auto amps = t.amps;
      amps[mode] = y == 0 ? alpha : -alpha;
      out.add(t.weight * k(y, x), std::move(amps), t.elec);
    }
  }
  return out.merged();
}

// ---------------------------------------------------------------------------
// Logical matrices

enum class Pauli : std::uint8_t { I, X, Z, XZ };  // XZ: Z first, then X

inline const char* to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Z: return "Z";
    case Pauli::XZ: return "XZ";
  }
  return "?";
}

inline constexpr Pauli kAllPaulis[] = {Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ};

inline CMatrix pauli_matrix(Pauli p) {
  CMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  switch (p) {
    case Pauli::I: return CMatrix::Identity(2, 2);
    case Pauli::X: return x;
    case Pauli::Z: return z;
    case Pauli::XZ: return x * z;
  }
  return CMatrix::Identity(2, 2);
}

namespace logical {

inline CMatrix rz(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(kI * (theta / 2));
  m(1, 1) = std::exp(-kI * (theta / 2));
  return m;
}

inline CMatrix rx_pi4() {
  CMatrix m(2, 2);
  m << 1.0, kI, kI, 1.0;
  return m / std::sqrt(2.0);
}

inline CMatrix hadamard() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline CMatrix s_gate() {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = kI;
  return m;
}

inline CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// diag[1, i sigma_y]
inline CMatrix c_isigma_y() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = -1.0;
  return m;
}

// Logical action of the symmetric beam splitter at theta = pi/(4 alpha^2):
// (S x S) CZ.
inline CMatrix bs_phase() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 1) = m(2, 2) = kI;
  return m;
}

}  // namespace logical

// ---------------------------------------------------------------------------
// Reports and fidelity metrics

struct GateBranch {
  std::array<EcsLabel, 2> projected{EcsLabel::undetermined, EcsLabel::undetermined};
  std::array<EcsLabel, 2> reported{EcsLabel::undetermined, EcsLabel::undetermined};
  double probability = 0.0;
  bool correctable = true;
  std::string correction;
  CoherentSuperposition state{1, false};
};

struct GateReport {
  CoherentSuperposition output{1, false};
  std::vector<CMatrix> kraus;  // Loewdin-frame operators, correctable branches
  CMatrix target;
  double process_fidelity = 0.0;  // sum_k |Tr(U^+ M_k)|^2 / d^2
  double code_fidelity = 0.0;     // process fidelity conditioned on staying in the code
  double code_weight = 0.0;       // sum_k Tr(M_k^+ M_k) / d
  double success_probability = 1.0;
  double uncorrectable_probability = 0.0;
  std::vector<GateBranch> branches;
  std::vector<std::string> warnings;
};

inline double process_fidelity(const std::vector<CMatrix>& kraus, const CMatrix& u) {
  const double d = double(u.rows());
  double f = 0.0;
  for (const auto& m : kraus) f += std::norm((u.adjoint() * m).trace());
  return std::clamp(f / (d * d), 0.0, 1.0);
}

inline double kraus_weight(const std::vector<CMatrix>& kraus) {
  double w = 0.0;
  for (const auto& m : kraus) w += (m.adjoint() * m).trace().real();
  return kraus.empty() ? 0.0 : w / double(kraus.front().cols());
}

inline void fill_metrics(GateReport& r) {
  r.process_fidelity = process_fidelity(r.kraus, r.target);
  r.code_weight = kraus_weight(r.kraus);
  r.code_fidelity = r.code_weight > 0 ? std::clamp(r.process_fidelity / r.code_weight, 0.0, 1.0) : 0.0;
}

// Per basis input j: post-selected fidelity of the output with U e_j.
inline std::vector<double> truth_table(const std::vector<CMatrix>& kraus, const CMatrix& u) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    double hit = 0.0, tot = 0.0;
    for (const auto& m : kraus) {
      const CVector o = m.col(j);
      hit += std::norm(u.col(j).dot(o));
      tot += o.squaredNorm();
    }
    out.push_back(tot > 0 ? std::clamp(hit / tot, 0.0, 1.0) : 0.0);
  }
  return out;
}

inline std::vector<CMatrix> dress(const std::vector<CMatrix>& kraus, const CMatrix& pre, const CMatrix& post) {
  std::vector<CMatrix> out;
  for (const auto& m : kraus) out.push_back(post * m * pre);
  return out;
}

// Post-selected fidelity of two states restricted to the code space.
inline double code_state_fidelity(const CoherentSuperposition& s, const CoherentSuperposition& target, cplx alpha) {
  const CVector a = logical_coordinates(s, alpha), b = logical_coordinates(target, alpha);
  const double na = a.squaredNorm(), nb = b.squaredNorm();
  if (na <= 0 || nb <= 0) return 0.0;
  return std::clamp(std::norm(b.dot(a)) / (na * nb), 0.0, 1.0);
}

inline double code_weight(const CoherentSuperposition& s, cplx alpha) {
  const double n2 = std::pow(norm(s), 2);
  return n2 > 0 ? logical_coordinates(s, alpha).squaredNorm() / n2 : 0.0;
}

using StateMap = std::function<CoherentSuperposition(const CoherentSuperposition&)>;

// Loewdin-frame matrix of a linear map on one qubit mode.
inline CMatrix single_qubit_process(const StateMap& f, cplx alpha) {
  CMatrix m(2, 2);
  for (int j = 0; j < 2; ++j) {
    const CVector e = CVector::Unit(2, j);
    m.col(j) = logical_coordinates(f(logical_state(e, alpha)), alpha);
  }
  return m;
}

// Reduced logical density matrix of the kept modes (code projection, trace 1).
inline CMatrix reduced_logical_density(const CoherentSuperposition& s, const std::vector<std::size_t>& keep,
                                       cplx alpha) {
  std::vector<char> kept(s.n_modes(), 0);
  for (std::size_t m : keep) {
    if (m >= s.n_modes()) throw std::out_of_range("mode index out of range");
    kept[m] = 1;
  }
  const auto& ts = s.terms();
  std::vector<CVector> coords;
  std::vector<std::vector<cplx>> rest;
  for (const auto& t : ts) {
    CoherentSuperposition k(keep.size(), false);
    std::vector<cplx> a;
    for (std::size_t m : keep) a.push_back(t.amps[m]);
    k.add(1.0, a);
    coords.push_back(logical_coordinates(k, alpha));
    std::vector<cplx> r;
    for (std::size_t m = 0; m < s.n_modes(); ++m) {
      if (!kept[m]) r.push_back(t.amps[m]);
    }
    rest.push_back(std::move(r));
  }
  const Eigen::Index d = Eigen::Index(1) << keep.size();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (ts[i].elec != ts[j].elec) continue;
      const cplx w = ts[i].weight * std::conj(ts[j].weight) * product_overlap(rest[j], rest[i]);
      rho += w * coords[i] * coords[j].adjoint();
    }
  }
  const cplx tr = rho.trace();
  if (std::abs(tr) <= 0) throw std::invalid_argument("state has no code-space support on the kept modes");
  return rho / tr;
}

inline double qubit_linearized_entropy(const CMatrix& rho) {
  const double d = double(rho.rows());
  return d / (d - 1.0) * (1.0 - (rho * rho).trace().real());
}

// ---------------------------------------------------------------------------
// Single-qubit gates

inline double rot_z_epsilon(double theta, double alpha) { return theta / (4.0 * alpha); }

inline void require_rotation_regime(double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("rotation by displacement needs alpha >= 1");
}

// U^z(theta/2) = diag(e^{i theta/2}, e^{-i theta/2}) via D(i eps), eps = theta/(4 alpha).
inline GateReport rot_z(const CoherentSuperposition& state, std::size_t qubit, double alpha, double theta) {
  require_rotation_regime(alpha);
  const double eps = rot_z_epsilon(theta, alpha);
  const StateMap f = [&](const CoherentSuperposition& s) { return apply_displacement(s, qubit, cplx(0, eps)); };
  const StateMap f1 = [&](const CoherentSuperposition& s) { return apply_displacement(s, 0, cplx(0, eps)); };
  GateReport r;
  r.output = f(state);
  r.target = logical::rz(theta);
  r.kraus = {single_qubit_process(f1, alpha)};
  fill_metrics(r);
  return r;
}

// Exact phase picked up by each branch: <+-a| D(i eps) |+-a>.
inline std::array<cplx, 2> rot_z_branch_amplitudes(double alpha, double theta) {
  const double eps = rot_z_epsilon(theta, alpha);
  std::array<cplx, 2> out{};
  for (int b = 0; b < 2; ++b) {
    const double a = b == 0 ? alpha : -alpha;
    const auto moved = apply_displacement(coherent_ket(a), 0, cplx(0, eps));
    out[b] = inner(coherent_ket(a), moved);
  }
  return out;
}

// e^{i pi X/4} up to a global phase; exact on the code space.
inline GateReport rot_x_pi4(const CoherentSuperposition& state, std::size_t qubit, double alpha) {
  const StateMap f1 = [](const CoherentSuperposition& s) { return apply_kerr_pi_half(s, 0); };
  GateReport r;
  r.output = apply_kerr_pi_half(state, qubit);
  r.target = logical::rx_pi4();
  r.kraus = {single_qubit_process(f1, alpha)};
  fill_metrics(r);
  return r;
}

// U^z(pi/4) U^x(pi/4) U^z(pi/4)
inline GateReport hadamard(const CoherentSuperposition& state, std::size_t qubit, double alpha) {
  require_rotation_regime(alpha);
  const double eps = rot_z_epsilon(kPi / 2, alpha);
  auto seq = [eps](const CoherentSuperposition& s, std::size_t q) {
    auto o = apply_displacement(s, q, cplx(0, eps));
    o = apply_kerr_pi_half(o, q);
    return apply_displacement(o, q, cplx(0, eps));
  };
  GateReport r;
  r.output = seq(state, qubit);
  r.target = logical::hadamard();
  r.kraus = {single_qubit_process([&](const CoherentSuperposition& s) { return seq(s, 0); }, alpha)};
  fill_metrics(r);
  return r;
}

// ---------------------------------------------------------------------------
// Bell basis and teleportation

// Four ECS states on two modes, Loewdin-orthonormalized as a set.
inline std::array<CoherentSuperposition, 4> bell_basis(double alpha) {
  std::array<CoherentSuperposition, 4> raw{ecs_ket(EcsKind::phi_plus, alpha), ecs_ket(EcsKind::phi_minus, alpha),
                                           ecs_ket(EcsKind::psi_plus, alpha), ecs_ket(EcsKind::psi_minus, alpha)};
  CMatrix g(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) g(i, j) = inner(raw[i], raw[j]);
  }
  const CMatrix f = inverse_sqrt_hermitian(g);
  std::array<CoherentSuperposition, 4> out{raw[0], raw[0], raw[0], raw[0]};
  for (int j = 0; j < 4; ++j) {
    CoherentSuperposition s(2, false);
    for (int i = 0; i < 4; ++i) s = s + f(i, j) * raw[i];
    out[j] = s.merged();
  }
  return out;
}

// Teleportation byproduct on the output mode for each Bell label.
inline constexpr Pauli kTeleportByproduct[4] = {Pauli::I, Pauli::Z, Pauli::X, Pauli::XZ};

inline CoherentSuperposition apply_pauli(const CoherentSuperposition& s, std::size_t mode, cplx alpha, Pauli p) {
  if (p == Pauli::I) return s;
  if (p == Pauli::X) return apply_parity(s, mode);
  return apply_logical(s, mode, alpha, pauli_matrix(p));
}

// Inverse of a Pauli up to phase is itself.
inline CoherentSuperposition undo_pauli(const CoherentSuperposition& s, std::size_t mode, cplx alpha, Pauli p) {
  return apply_pauli(s, mode, alpha, p);
}

// Single-qubit teleportation of mode 0 through phi+ on (1, 2).
inline GateReport teleport(const CoherentSuperposition& input, double alpha) {
  if (input.n_modes() != 1 || input.electronic()) throw std::invalid_argument("teleport expects one motional mode");
  const auto basis = bell_basis(alpha);
  const auto channel = ecs_ket(EcsKind::phi_plus, alpha);
  auto run = [&](const CoherentSuperposition& in, int k) {
    const auto joint = tensor(in, channel);
    const auto out = project_modes(joint, {0, 1}, basis[k]);
    return undo_pauli(out, 0, alpha, kTeleportByproduct[k]);
  };
  GateReport r;
  r.target = CMatrix::Identity(2, 2);
  const auto in = input.normalized();
  double best = -1.0;
  for (int k = 0; k < 4; ++k) {
    const StateMap f = [&](const CoherentSuperposition& s) { return run(s, k); };
    r.kraus.push_back(single_qubit_process(f, alpha));
    GateBranch b;
    b.projected = b.reported = {static_cast<EcsLabel>(k), EcsLabel::undetermined};
    b.state = run(in, k);
    b.probability = std::pow(norm(b.state), 2);
    b.correction = to_string(kTeleportByproduct[k]);
    if (b.probability > best) {
      best = b.probability;
      r.output = b.state.normalized();
    }
    r.branches.push_back(std::move(b));
  }
  fill_metrics(r);
  r.success_probability = r.code_weight;
  return r;
}

// ---------------------------------------------------------------------------
// Ancilla channels

// Modes (a1, a2, a3, a4); result is |a,a>|phi+> + |-a,-a>|psi-> normalized.
inline CoherentSuperposition prepare_anc_channel(double alpha) {
  const double b = std::sqrt(2.0) * alpha;
  auto s = CoherentSuperposition::ket({b, 0.0, b, 0.0});
  s = apply_cross_parity(s, 0, 2);
  s = apply_beamsplitter(s, 1, 0, kPi / 2);
  s = apply_beamsplitter(s, 3, 2, kPi / 2);
  s = apply_cross_parity(s, 2, 3);
  s = apply_parity(s, 3);
  return s.merged().normalized();
}

// |a,a,a> + |-a,-a,-a> from a cat on mode 0 and two beam splitters.
inline CoherentSuperposition ghz_state(double alpha) {
  CoherentSuperposition s = tensor(cat_ket(std::sqrt(3.0) * alpha, 1), CoherentSuperposition::ket({0.0, 0.0}));
  s = apply_beamsplitter(s, 1, 0, 2.0 * std::asin(1.0 / std::sqrt(3.0)));
  s = apply_beamsplitter(s, 2, 0, kPi / 2);
  return s.merged().normalized();
}

// ---------------------------------------------------------------------------
// Two-qubit teleportation gates

enum class BellPolicy { ideal_projector, full_protocol };

inline const char* to_string(BellPolicy p) {
  return p == BellPolicy::ideal_projector ? "ideal-projector" : "full-protocol";
}

struct PauliPair {
  Pauli control;
  Pauli target;
  bool operator==(const PauliPair&) const = default;
};

namespace detail {

// Phase-insensitive equality of two matrices.
inline bool proportional(const CMatrix& a, const CMatrix& b, double tol = 1e-12) {
  const cplx t = (b.adjoint() * a).trace();
  const double na = a.norm(), nb = b.norm();
  return std::abs(std::abs(t) - na * nb) < tol * na * nb;
}

}  // namespace detail

// Channel modes (a2, a4) receive C-V (V = XZ on the target) applied to two
// phi+ pairs; with teleportation byproducts B1 x B2 the raw action is
// CV (B1 x B2). The correction K satisfies K CV (B1 x B2) ~ C_{i sigma_y}.
inline PauliPair derive_cisy_correction(EcsKind k1, EcsKind k2) {
  CMatrix cv = CMatrix::Zero(4, 4);
  cv.topLeftCorner(2, 2) = CMatrix::Identity(2, 2);
  cv.bottomRightCorner(2, 2) = pauli_matrix(Pauli::XZ);
  const CMatrix raw =
      cv * kron(pauli_matrix(kTeleportByproduct[int(k1)]), pauli_matrix(kTeleportByproduct[int(k2)]));
  for (Pauli pc : kAllPaulis) {
    for (Pauli pt : kAllPaulis) {
      if (detail::proportional(kron(pauli_matrix(pc), pauli_matrix(pt)) * raw, logical::c_isigma_y())) return {pc, pt};
    }
  }
  throw std::logic_error("no Pauli correction found");
}

// Shipped table, rows: control-pair label, columns: target-pair label, both
// in phi+, phi-, psi+, psi- order.
inline constexpr PauliPair kCisyCorrections[4][4] = {
    {{Pauli::Z, Pauli::I}, {Pauli::I, Pauli::Z}, {Pauli::I, Pauli::X}, {Pauli::Z, Pauli::XZ}},
    {{Pauli::I, Pauli::I}, {Pauli::Z, Pauli::Z}, {Pauli::Z, Pauli::X}, {Pauli::I, Pauli::XZ}},
    {{Pauli::X, Pauli::XZ}, {Pauli::XZ, Pauli::X}, {Pauli::XZ, Pauli::Z}, {Pauli::X, Pauli::I}},
    {{Pauli::XZ, Pauli::XZ}, {Pauli::X, Pauli::X}, {Pauli::X, Pauli::Z}, {Pauli::XZ, Pauli::I}},
};

namespace detail {

using JointFn = std::function<CoherentSuperposition(const CoherentSuperposition&)>;
using CorrectFn = std::function<CoherentSuperposition(const CoherentSuperposition&, EcsKind, EcsKind)>;
using LabelFn = std::function<std::string(EcsKind, EcsKind)>;

// Joint layout: 0 input c, 1 input t, (2,3) first channel pair, (4,5) second.
// Bell projections on (0,2) and (1,4); outputs on (3,5).
inline GateReport run_two_pair_protocol(const CoherentSuperposition& input, double alpha, const JointFn& joint,
                                        const CorrectFn& correct, const LabelFn& describe, const CMatrix& target,
                                        BellPolicy policy) {
  if (input.n_modes() != 2 || input.electronic()) throw std::invalid_argument("two-qubit gates expect two modes");
  const auto basis = bell_basis(alpha);
  std::array<std::array<double, 5>, 4> conf{};
  if (policy == BellPolicy::full_protocol) {
    conf = confusion_matrix(alpha);
  } else {
    for (int k = 0; k < 4; ++k) conf[k][k] = 1.0;
  }
  auto project = [&](const CoherentSuperposition& in, int k1, int k2) {
    const auto s1 = project_modes(joint(in), {0, 2}, basis[k1]);
    return project_modes(s1, {0, 2}, basis[k2]);
  };

  // raw[j][k1][k2]: Loewdin coordinates of the uncorrected output for basis input j
  std::vector<CoherentSuperposition> basis_in;
  for (int j = 0; j < 4; ++j) basis_in.push_back(logical_state(CVector::Unit(4, j), alpha));
  std::array<std::array<std::vector<CoherentSuperposition>, 4>, 4> raw;
  for (int k1 = 0; k1 < 4; ++k1) {
    for (int k2 = 0; k2 < 4; ++k2) {
      for (int j = 0; j < 4; ++j) raw[k1][k2].push_back(project(basis_in[j], k1, k2));
    }
  }

  GateReport r;
  r.target = target;
  const auto in = input.normalized();
  double best = -1.0;
  std::vector<CMatrix> bad;
  for (int k1 = 0; k1 < 4; ++k1) {
    for (int k2 = 0; k2 < 4; ++k2) {
      const auto out = project(in, k1, k2);
      const double p_proj = std::pow(norm(out), 2);
      for (int l1 = 0; l1 < 5; ++l1) {
        for (int l2 = 0; l2 < 5; ++l2) {
          const double w = conf[k1][l1] * conf[k2][l2];
          if (w <= 0.0) continue;
          const bool ok = l1 < 4 && l2 < 4;
          CMatrix m(4, 4);
          for (int j = 0; j < 4; ++j) {
            const auto o = ok ? correct(raw[k1][k2][j], EcsKind(l1), EcsKind(l2)) : raw[k1][k2][j];
            m.col(j) = std::sqrt(w) * logical_coordinates(o, alpha);
          }
          (ok ? r.kraus : bad).push_back(std::move(m));

          GateBranch b;
          b.projected = {EcsLabel(k1), EcsLabel(k2)};
          b.reported = {EcsLabel(l1), EcsLabel(l2)};
          b.probability = p_proj * w;
          b.correctable = ok;
          b.correction = ok ? describe(EcsKind(l1), EcsKind(l2)) : "flagged";
          b.state = ok ? correct(out, EcsKind(l1), EcsKind(l2)) : out;
          if (ok) {
            if (b.probability > best) {
              best = b.probability;
              r.output = b.state.normalized();
            }
          }
          r.branches.push_back(std::move(b));
        }
      }
    }
  }
  fill_metrics(r);
  r.success_probability = r.code_weight;
  r.uncorrectable_probability = kraus_weight(bad);
  return r;
}

}  // namespace detail

// Teleportation-based C_{i sigma_y} through |eta'>_anc.
inline GateReport c_isigma_y(const CoherentSuperposition& input, double alpha,
                             BellPolicy policy = BellPolicy::ideal_projector) {
  const auto anc = prepare_anc_channel(alpha);
  const detail::JointFn joint = [&](const CoherentSuperposition& s) { return tensor(s, anc); };
  const detail::CorrectFn correct = [alpha](const CoherentSuperposition& s, EcsKind l1, EcsKind l2) {
    const PauliPair p = kCisyCorrections[int(l1)][int(l2)];
    return apply_pauli(apply_pauli(s, 0, alpha, p.control), 1, alpha, p.target);
  };
  const detail::LabelFn describe = [](EcsKind l1, EcsKind l2) {
    const PauliPair p = kCisyCorrections[int(l1)][int(l2)];
    return std::string(to_string(p.control)) + "," + to_string(p.target);
  };
  return detail::run_two_pair_protocol(input, alpha, joint, correct, describe, logical::c_isigma_y(), policy);
}

struct BsCnotReport : GateReport {
  double theta = 0.0;
  double cnot_fidelity = 0.0;       // after the recorded local corrections
  double cnot_code_fidelity = 0.0;
  std::vector<double> cnot_truth;   // per basis input
  CMatrix local_pre;                // applied to the inputs
  CMatrix local_post;               // applied to the outputs
};

inline double bs_cnot_theta(double alpha) { return kPi / (4.0 * alpha * alpha); }

// Symmetric beam splitter R_t(pi/2) B(theta) R_t(-pi/2) on (c, t), then each
// output teleported through its own phi+ channel. The logical action at
// theta = pi/(4 alpha^2) is (S x S) CZ; CNOT follows with H on the target
// before and after and S^+ on both outputs.
inline BsCnotReport bs_cnot(const CoherentSuperposition& input, double alpha, double theta,
                            BellPolicy policy = BellPolicy::ideal_projector) {
  const double g = theta * theta * alpha * alpha;
  if (g >= 1.0) throw GuardError("bs_cnot: theta^2 alpha^2 >= 1 leaves the small-angle regime");
  const auto channel = ecs_ket(EcsKind::phi_plus, alpha);
  const detail::JointFn joint = [&](const CoherentSuperposition& s) {
    auto o = apply_phase_rotation(s, 1, -kPi / 2);
    o = apply_beamsplitter(o, 0, 1, theta);
    o = apply_phase_rotation(o, 1, kPi / 2);
    return tensor(tensor(o, channel), channel);
  };
  const detail::CorrectFn correct = [alpha](const CoherentSuperposition& s, EcsKind l1, EcsKind l2) {
    return undo_pauli(undo_pauli(s, 0, alpha, kTeleportByproduct[int(l1)]), 1, alpha, kTeleportByproduct[int(l2)]);
  };
  const detail::LabelFn describe = [](EcsKind l1, EcsKind l2) {
    return std::string(to_string(kTeleportByproduct[int(l1)])) + "," + to_string(kTeleportByproduct[int(l2)]);
  };
  BsCnotReport r;
  static_cast<GateReport&>(r) =
      detail::run_two_pair_protocol(input, alpha, joint, correct, describe, logical::bs_phase(), policy);
  r.theta = theta;
  if (g > 0.1) r.warnings.push_back("theta^2 alpha^2 = " + std::to_string(g) + " exceeds 0.1");
  const CMatrix h = logical::hadamard(), sd = logical::s_gate().adjoint();
  r.local_pre = kron(CMatrix::Identity(2, 2), h);
  r.local_post = kron(CMatrix::Identity(2, 2), h) * kron(sd, sd);
  const auto dressed = dress(r.kraus, r.local_pre, r.local_post);
  r.cnot_fidelity = process_fidelity(dressed, logical::cnot());
  r.cnot_code_fidelity = r.code_weight > 0 ? std::clamp(r.cnot_fidelity / r.code_weight, 0.0, 1.0) : 0.0;
  r.cnot_truth = truth_table(dressed, logical::cnot());
  return r;
}

}  // namespace vibcoh
