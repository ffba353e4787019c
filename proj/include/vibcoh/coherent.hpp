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
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vibcoh/hilbert.hpp"
#include "vibcoh/linalg.hpp"

namespace vibcoh {

enum class Electronic : std::uint8_t { none, g, e };

// One weighted multimode coherent product ket.
struct CoherentKet {
  cplx weight;
  std::vector<cplx> amps;
  Electronic elec = Electronic::none;
};

// <beta|gamma> for single-mode coherent states.
inline cplx ket_overlap(cplx beta, cplx gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

inline cplx product_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  // Summing exponents avoids underflow of individual factors at large amplitude.
  cplx expo = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    expo += -0.5 * std::norm(a[k]) - 0.5 * std::norm(b[k]) + std::conj(a[k]) * b[k];
  }
  return std::exp(expo);
}

// Finite superposition of coherent product kets. Inner products are exact via
// the Gram kernel. An electronic tag per term (g/e) lets internal and motional
// states entangle without a tensor factor.
class CoherentSuperposition {
 public:
  static constexpr double kMergeTol = 1e-9;

  CoherentSuperposition(std::size_t n_modes, bool electronic) : n_modes_(n_modes), electronic_(electronic) {}

  static CoherentSuperposition ket(std::vector<cplx> amps, Electronic elec = Electronic::none) {
    CoherentSuperposition s(amps.size(), elec != Electronic::none);
    s.add(1.0, std::move(amps), elec);
    return s;
  }

  std::size_t n_modes() const { return n_modes_; }
  bool electronic() const { return electronic_; }
  const std::vector<CoherentKet>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // Appends a term without merging.
  CoherentSuperposition& add(cplx weight, std::vector<cplx> amps, Electronic elec = Electronic::none) {
    if (amps.size() != n_modes_) throw std::invalid_argument("ket has wrong number of modes");
    if ((elec != Electronic::none) != electronic_) {
      throw std::invalid_argument("electronic tag does not match superposition structure");
    }
    terms_.push_back({weight, std::move(amps), elec});
    return *this;
  }

  // Combines kets closer than tol in every mode and drops weights that
  // cancelled to rounding level.
  CoherentSuperposition merged(double tol = kMergeTol) const {
    CoherentSuperposition out(n_modes_, electronic_);
    for (const auto& t : terms_) {
      bool found = false;
      for (auto& o : out.terms_) {
        if (o.elec != t.elec) continue;
        bool same = true;
        for (std::size_t k = 0; k < n_modes_ && same; ++k) same = std::abs(o.amps[k] - t.amps[k]) < tol;
        if (same) {
          o.weight += t.weight;
          found = true;
          break;
        }
      }
      if (!found) out.terms_.push_back(t);
    }
    double wmax = 0.0;
    for (const auto& t : out.terms_) wmax = std::max(wmax, std::abs(t.weight));
    std::erase_if(out.terms_, [wmax](const CoherentKet& t) { return std::abs(t.weight) <= 1e-14 * wmax; });
    return out;
  }

  CoherentSuperposition pruned(double tau) const {
    CoherentSuperposition out = merged();
    std::erase_if(out.terms_, [tau](const CoherentKet& t) { return std::abs(t.weight) < tau; });
    return out;
  }

  CoherentSuperposition normalized() const;

  friend CoherentSuperposition operator+(const CoherentSuperposition& a, const CoherentSuperposition& b) {
    a.require_compatible(b);
    CoherentSuperposition out = a;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    return out.merged();
  }
  friend CoherentSuperposition operator*(cplx s, const CoherentSuperposition& a) {
    CoherentSuperposition out = a;
    for (auto& t : out.terms_) t.weight *= s;
    return out;
  }
  friend CoherentSuperposition operator-(const CoherentSuperposition& a, const CoherentSuperposition& b) {
    return a + cplx(-1.0) * b;
  }

  void require_compatible(const CoherentSuperposition& o) const {
    if (o.n_modes_ != n_modes_ || o.electronic_ != electronic_) {
      throw std::invalid_argument("superpositions have different mode/electronic structure");
    }
  }

 private:
  std::size_t n_modes_;
  bool electronic_;
  std::vector<CoherentKet> terms_;
};

inline cplx inner(const CoherentSuperposition& a, const CoherentSuperposition& b) {
  a.require_compatible(b);
  cplx acc = 0.0;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (ta.elec != tb.elec) continue;
      acc += std::conj(ta.weight) * tb.weight * product_overlap(ta.amps, tb.amps);
    }
  }
  return acc;
}

inline double norm(const CoherentSuperposition& s) { return std::sqrt(std::max(0.0, inner(s, s).real())); }

inline CoherentSuperposition CoherentSuperposition::normalized() const {
  const double n = norm(*this);
  if (n == 0.0) throw std::invalid_argument("cannot normalize a zero superposition");
  return cplx(1.0 / n) * *this;
}

// Normalized |<a|b>|^2.
inline double state_fidelity(const CoherentSuperposition& a, const CoherentSuperposition& b) {
  return std::norm(inner(a, b)) / (inner(a, a).real() * inner(b, b).real());
}

// Gram matrix of multimode kets (no weights).
inline CMatrix gram_matrix(const std::vector<std::vector<cplx>>& kets) {
  const auto n = static_cast<Eigen::Index>(kets.size());
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = product_overlap(kets[i], kets[j]);
  }
  return g;
}

namespace detail {

inline void check_mode(const CoherentSuperposition& s, std::size_t mode) {
  if (mode >= s.n_modes()) throw std::out_of_range("mode index out of range");
}

inline void check_pair(const CoherentSuperposition& s, std::size_t i, std::size_t j) {
  check_mode(s, i);
  check_mode(s, j);
  if (i == j) throw std::invalid_argument("two-mode rule needs distinct modes");
}

template <class F>
CoherentSuperposition map_terms(const CoherentSuperposition& s, F&& f) {
  CoherentSuperposition out(s.n_modes(), s.electronic());
  for (const auto& t : s.terms()) f(t, out);
  return out.merged();
}

}  // namespace detail

// D(delta)|beta> = e^{(delta conj(beta) - conj(delta) beta)/2} |beta + delta>
inline CoherentSuperposition apply_displacement(const CoherentSuperposition& s, std::size_t mode, cplx delta) {
  detail::check_mode(s, mode);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    const cplx b = t.amps[mode];
    auto amps = t.amps;
    amps[mode] = b + delta;
    out.add(t.weight * std::exp(0.5 * (delta * std::conj(b) - std::conj(delta) * b)), std::move(amps), t.elec);
  });
}

// |beta>_i |gamma>_j -> |beta c + gamma s>_i |-beta s + gamma c>_j, c = cos(theta/2).
inline CoherentSuperposition apply_beamsplitter(const CoherentSuperposition& s, std::size_t i, std::size_t j,
                                                double theta) {
  detail::check_pair(s, i, j);
  const double c = std::cos(theta / 2.0), sn = std::sin(theta / 2.0);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    auto amps = t.amps;
    amps[i] = t.amps[i] * c + t.amps[j] * sn;
    amps[j] = -t.amps[i] * sn + t.amps[j] * c;
    out.add(t.weight, std::move(amps), t.elec);
  });
}

// e^{i theta n}|beta> = |e^{i theta} beta>
inline CoherentSuperposition apply_phase_rotation(const CoherentSuperposition& s, std::size_t mode, double theta) {
  detail::check_mode(s, mode);
  const cplx ph = std::exp(kI * theta);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    auto amps = t.amps;
    amps[mode] *= ph;
    out.add(t.weight, std::move(amps), t.elec);
  });
}

// (-1)^n exactly: |beta> -> |-beta>.
inline CoherentSuperposition apply_parity(const CoherentSuperposition& s, std::size_t mode) {
  detail::check_mode(s, mode);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    auto amps = t.amps;
    amps[mode] = -amps[mode];
    out.add(t.weight, std::move(amps), t.elec);
  });
}

// e^{-i pi n^2 / 2}: |beta> -> (e^{-i pi/4}|beta> + e^{i pi/4}|-beta>)/sqrt(2).
inline CoherentSuperposition apply_kerr_pi_half(const CoherentSuperposition& s, std::size_t mode) {
  detail::check_mode(s, mode);
  const cplx w1 = std::exp(-kI * kPi / 4.0) / std::sqrt(2.0);
  const cplx w2 = std::exp(kI * kPi / 4.0) / std::sqrt(2.0);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    auto flipped = t.amps;
    flipped[mode] = -flipped[mode];
    out.add(t.weight * w1, t.amps, t.elec);
    out.add(t.weight * w2, std::move(flipped), t.elec);
  });
}

// (-1)^{n_i n_j}: |b>|c> -> (|b>+|-b>)|c>/2 + (|b>-|-b>)|-c>/2.
inline CoherentSuperposition apply_cross_parity(const CoherentSuperposition& s, std::size_t i, std::size_t j) {
  detail::check_pair(s, i, j);
  return detail::map_terms(s, [&](const CoherentKet& t, CoherentSuperposition& out) {
    auto a_pp = t.amps;  // (b, c)
    auto a_mp = t.amps;  // (-b, c)
    a_mp[i] = -a_mp[i];
    auto a_pm = t.amps;  // (b, -c)
    a_pm[j] = -a_pm[j];
    auto a_mm = a_mp;    // (-b, -c)
    a_mm[j] = -a_mm[j];
    out.add(0.5 * t.weight, std::move(a_pp), t.elec);
    out.add(0.5 * t.weight, std::move(a_mp), t.elec);
    out.add(0.5 * t.weight, std::move(a_pm), t.elec);
    out.add(-0.5 * t.weight, std::move(a_mm), t.elec);
  });
}

// Replaces every electronic tag (turns a motional superposition into an
// ion-vibration state, or strips the tag with Electronic::none).
inline CoherentSuperposition with_electronic(const CoherentSuperposition& s, Electronic elec) {
  CoherentSuperposition out(s.n_modes(), elec != Electronic::none);
  for (const auto& t : s.terms()) out.add(t.weight, t.amps, elec);
  return out.merged();
}

// Tensor product; at most one factor may carry an electronic tag.
inline CoherentSuperposition tensor(const CoherentSuperposition& a, const CoherentSuperposition& b) {
  if (a.electronic() && b.electronic()) throw std::invalid_argument("only one factor may be electronic");
  CoherentSuperposition out(a.n_modes() + b.n_modes(), a.electronic() || b.electronic());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      auto amps = ta.amps;
      amps.insert(amps.end(), tb.amps.begin(), tb.amps.end());
      out.add(ta.weight * tb.weight, std::move(amps), a.electronic() ? ta.elec : tb.elec);
    }
  }
  return out.merged();
}

// Partial inner product <bra|_modes |s>: contracts the listed modes with a
// (non-electronic) bra over exactly those modes; the result lives on the
// remaining modes in their original order.
inline CoherentSuperposition project_modes(const CoherentSuperposition& s, const std::vector<std::size_t>& modes,
                                           const CoherentSuperposition& bra) {
  if (bra.electronic()) throw std::invalid_argument("projection bra must not carry an electronic tag");
  if (bra.n_modes() != modes.size()) throw std::invalid_argument("bra must cover exactly the projected modes");
  std::vector<char> hit(s.n_modes(), 0);
  for (std::size_t m : modes) {
    detail::check_mode(s, m);
    if (hit[m]) throw std::invalid_argument("repeated mode in projection");
    hit[m] = 1;
  }
  CoherentSuperposition out(s.n_modes() - modes.size(), s.electronic());
  for (const auto& t : s.terms()) {
    std::vector<cplx> sub;
    for (std::size_t m : modes) sub.push_back(t.amps[m]);
    cplx w = 0.0;
    for (const auto& tb : bra.terms()) w += std::conj(tb.weight) * product_overlap(tb.amps, sub);
    std::vector<cplx> rest;
    for (std::size_t m = 0; m < s.n_modes(); ++m) {
      if (!hit[m]) rest.push_back(t.amps[m]);
    }
    out.add(t.weight * w, std::move(rest), t.elec);
  }
  return out.merged();
}

// Keeps only terms with the given electronic tag (unnormalized projection).
inline CoherentSuperposition electronic_component(const CoherentSuperposition& s, Electronic elec) {
  CoherentSuperposition out(s.n_modes(), s.electronic());
  for (const auto& t : s.terms()) {
    if (t.elec == elec) out.add(t.weight, t.amps, t.elec);
  }
  return out;
}

// Numeric expansion on a truncated Fock space. Every ket amplitude must pass
// the truncation guard of its mode.
inline StateVector to_fock(const CoherentSuperposition& s, const ModeSpace& space) {
  if (space.num_modes() != s.n_modes()) throw std::invalid_argument("to_fock: mode count mismatch");
  if (space.electronic() != s.electronic()) throw std::invalid_argument("to_fock: electronic structure mismatch");
  CVector amps = CVector::Zero(space.total_dim());
  for (const auto& t : s.terms()) {
    std::vector<CVector> f;
    for (std::size_t k = 0; k < s.n_modes(); ++k) {
      require_truncation(t.amps[k], space.dims()[k]);
      f.push_back(coherent_amplitudes(space.dims()[k], t.amps[k]));
    }
    amps += t.weight * product_state(space, f, t.elec == Electronic::e ? 1 : 0).amps();
  }
  return StateVector(space, amps);
}

// Canonical symbolic states.
inline CoherentSuperposition coherent_ket(cplx alpha) { return CoherentSuperposition::ket({alpha}); }

inline CoherentSuperposition cat_ket(cplx alpha, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("cat sign must be +1 or -1");
  CoherentSuperposition s(1, false);
  s.add(1.0, {alpha}).add(double(sign), {-alpha});
  return s.merged().normalized();
}

inline CoherentSuperposition ecs_ket(EcsKind kind, cplx alpha) {
  const cplx b = ecs_is_psi(kind) ? -alpha : alpha;
  CoherentSuperposition s(2, false);
  s.add(1.0, {alpha, b}).add(double(ecs_sign(kind)), {-alpha, -b});
  return s.merged().normalized();
}

}  // namespace vibcoh
