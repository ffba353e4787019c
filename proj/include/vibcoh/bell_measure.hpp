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
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "vibcoh/coherent.hpp"
#include "vibcoh/hilbert.hpp"

namespace vibcoh {

enum class Outcome : std::uint8_t { g, e };

inline char to_char(Outcome o) { return o == Outcome::g ? 'g' : 'e'; }

enum class EcsLabel : std::uint8_t { phi_plus, phi_minus, psi_plus, psi_minus, undetermined };

inline const char* to_string(EcsLabel l) {
  switch (l) {
    case EcsLabel::phi_plus: return "phi+";
    case EcsLabel::phi_minus: return "phi-";
    case EcsLabel::psi_plus: return "psi+";
    case EcsLabel::psi_minus: return "psi-";
    case EcsLabel::undetermined: return "undetermined";
  }
  return "?";
}

inline EcsLabel label_of(EcsKind k) { return static_cast<EcsLabel>(static_cast<int>(k)); }

// Readout imperfections: dark = P(report e | true g), bright = P(report g | true e).
struct DetectorModel {
  double dark = 0.0;
  double bright = 0.0;
};

class MeasurementPolicy {
 public:
  enum class Kind { enumerate, sample };

  static MeasurementPolicy enumerate() { return MeasurementPolicy(Kind::enumerate, 0); }
  static MeasurementPolicy sample(std::uint64_t seed) { return MeasurementPolicy(Kind::sample, seed); }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

 private:
  MeasurementPolicy(Kind k, std::uint64_t s) : kind_(k), seed_(s) {}
  Kind kind_;
  std::uint64_t seed_;
};

// One measurement history. Under the enumerate policy probabilities of all
// branches sum to one; a sampled record holds the single realized path with
// its model probability.
template <class S>
struct Branch {
  std::vector<Outcome> outcomes;
  double probability;
  S state;
  EcsLabel label = EcsLabel::undetermined;
};

template <class S>
struct BasicMeasurementRecord {
  std::vector<Branch<S>> branches;
  bool sampled = false;

  double total_probability() const {
    double p = 0.0;
    for (const auto& b : branches) p += b.probability;
    return p;
  }
  double label_probability(EcsLabel l) const {
    double p = 0.0;
    for (const auto& b : branches) {
      if (b.label == l) p += b.probability;
    }
    return p;
  }
};

using MeasurementRecord = BasicMeasurementRecord<CoherentSuperposition>;
using FockMeasurementRecord = BasicMeasurementRecord<StateVector>;

// ---------------------------------------------------------------------------
// Carrier and QND steps

inline void require_electronic(const CoherentSuperposition& s) {
  if (!s.electronic()) throw std::invalid_argument("state has no electronic factor");
}

// e^{-i angle (sigma+ + sigma-)}: |g> -> cos|g> - i sin|e>, |e> -> -i sin|g> + cos|e>.
inline CoherentSuperposition carrier_pulse(const CoherentSuperposition& s, double angle) {
  require_electronic(s);
  const double c = std::cos(angle), sn = std::sin(angle);
  CoherentSuperposition out(s.n_modes(), true);
  for (const auto& t : s.terms()) {
    const Electronic other = t.elec == Electronic::g ? Electronic::e : Electronic::g;
    out.add(t.weight * c, t.amps, t.elec);
    out.add(t.weight * cplx(0, -sn), t.amps, other);
  }
  return out.merged();
}

// |g> branch kets rotate by +chi_t, |e> branch kets by -chi_t.
inline CoherentSuperposition qnd_evolution(const CoherentSuperposition& s, std::size_t mode, double chi_t) {
  require_electronic(s);
  if (mode >= s.n_modes()) throw std::out_of_range("mode index out of range");
  const cplx pg = std::exp(kI * chi_t), pe = std::exp(-kI * chi_t);
  CoherentSuperposition out(s.n_modes(), true);
  for (const auto& t : s.terms()) {
    auto amps = t.amps;
    amps[mode] *= t.elec == Electronic::g ? pg : pe;
    out.add(t.weight, std::move(amps), t.elec);
  }
  return out.merged();
}

inline Operator carrier_operator(const ModeSpace& space, double angle) {
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return embed_electronic_operator(space, unitary_from_hermitian(x, angle));
}

// e^{i chi_t n}|g><g| + e^{-i chi_t n}|e><e|
inline Operator qnd_operator(const ModeSpace& space, std::size_t mode, double chi_t) {
  if (!space.electronic()) throw std::invalid_argument("space has no electronic factor");
  space.check_mode(mode);
  const Eigen::Index n = space.total_dim();
  CVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = space.electronic_index(i) == 0 ? 1.0 : -1.0;
    d(i) = std::exp(kI * sign * chi_t * double(space.fock_index(i, mode)));
  }
  return Operator(space, d.asDiagonal());
}

// ---------------------------------------------------------------------------
// Projective electronic readout

namespace detail {

inline CoherentSuperposition electronic_projection(const CoherentSuperposition& s, Outcome o) {
  return electronic_component(s, o == Outcome::g ? Electronic::g : Electronic::e);
}

inline StateVector electronic_projection(const StateVector& s, Outcome o) {
  if (!s.space().electronic()) throw std::invalid_argument("state has no electronic factor");
  CVector a = s.amps();
  const Eigen::Index md = s.space().motional_dim();
  a.segment(o == Outcome::g ? md : 0, md).setZero();
  return StateVector(s.space(), a);
}

inline double squared_norm(const CoherentSuperposition& s) { return std::max(0.0, inner(s, s).real()); }
inline double squared_norm(const StateVector& s) { return s.amps().squaredNorm(); }

template <class S>
S scaled(const S& s, double f) {
  if constexpr (std::is_same_v<S, StateVector>) {
    return StateVector(s.space(), s.amps() * f);
  } else {
    return cplx(f) * s;
  }
}

// Children of one branch: true collapse x reported outcome.
template <class S>
std::vector<Branch<S>> split(const Branch<S>& b, const DetectorModel& det) {
  std::vector<Branch<S>> out;
  for (Outcome truth : {Outcome::g, Outcome::e}) {
    const S proj = electronic_projection(b.state, truth);
    const double p = squared_norm(proj);
    if (p <= 1e-30) continue;
    const S collapsed = scaled(proj, 1.0 / std::sqrt(p));
    const double flip = truth == Outcome::g ? det.dark : det.bright;
    for (Outcome reported : {Outcome::g, Outcome::e}) {
      const double pr = reported == truth ? 1.0 - flip : flip;
      if (pr <= 0.0) continue;
      Branch<S> child{b.outcomes, b.probability * p * pr, collapsed, b.label};
      child.outcomes.push_back(reported);
      out.push_back(std::move(child));
    }
  }
  return out;
}

}  // namespace detail

// Stateful measurement driver; sample mode owns its generator.
template <class S>
class Measurer {
 public:
  Measurer(MeasurementPolicy policy, DetectorModel det) : policy_(policy), det_(det), rng_(policy.seed()) {}

  bool sampling() const { return policy_.kind() == MeasurementPolicy::Kind::sample; }

  std::vector<Branch<S>> measure(const std::vector<Branch<S>>& in) {
    std::vector<Branch<S>> out;
    for (const auto& b : in) {
      auto children = detail::split(b, det_);
      if (!sampling()) {
        for (auto& c : children) out.push_back(std::move(c));
        continue;
      }
      double total = 0.0;
      for (const auto& c : children) total += c.probability;
      std::uniform_real_distribution<double> u(0.0, total);
      const double r = u(rng_);
      double acc = 0.0;
      std::size_t pick = children.size() - 1;
      for (std::size_t k = 0; k < children.size(); ++k) {
        acc += children[k].probability;
        if (r < acc) {
          pick = k;
          break;
        }
      }
      out.push_back(std::move(children[pick]));
    }
    return out;
  }

 private:
  MeasurementPolicy policy_;
  DetectorModel det_;
  std::mt19937_64 rng_;
};

template <class S>
BasicMeasurementRecord<S> electronic_measure(const S& state, MeasurementPolicy policy = MeasurementPolicy::enumerate(),
                                             DetectorModel det = {}) {
  Measurer<S> m(policy, det);
  BasicMeasurementRecord<S> rec;
  rec.sampled = m.sampling();
  rec.branches = m.measure({Branch<S>{{}, 1.0, state}});
  return rec;
}

// ---------------------------------------------------------------------------
// Quasi-Bell discrimination pipeline

inline std::string outcome_string(const std::vector<Outcome>& o) {
  std::string s;
  for (Outcome x : o) s.push_back(to_char(x));
  return s;
}

// Displacement used to separate phi+ from psi+: 2 sqrt(2) alpha eps = pi/2.
inline double disambiguation_epsilon(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  return kPi / (4.0 * std::sqrt(2.0) * alpha);
}

// pi/2 carrier, U_qnd(pi/2), opposite-phase pi/2 carrier: even parity -> g,
// odd parity -> e.
inline CoherentSuperposition parity_to_electronic(const CoherentSuperposition& s, std::size_t mode) {
  auto out = carrier_pulse(s, kPi / 4);
  out = qnd_evolution(out, mode, kPi / 2);
  return carrier_pulse(out, -kPi / 4);
}

inline CoherentSuperposition reset_if_excited(const CoherentSuperposition& s, Outcome last) {
  return last == Outcome::e ? carrier_pulse(s, kPi / 2) : s;
}

inline EcsLabel decide_label(const std::vector<Outcome>& r) {
  using O = Outcome;
  if (r.size() < 2) return EcsLabel::undetermined;
  if (r[0] == O::e && r[1] == O::g) return EcsLabel::phi_minus;
  if (r[0] == O::g && r[1] == O::e) return EcsLabel::psi_minus;
  if (r[0] == O::g && r[1] == O::g && r.size() >= 3) return r[2] == O::e ? EcsLabel::phi_plus : EcsLabel::psi_plus;
  return EcsLabel::undetermined;
}

struct DiscriminationOptions {
  bool disambiguate = true;
  DetectorModel detector{};
};

namespace detail {

inline MeasurementRecord run_discrimination(const CoherentSuperposition& input, double alpha,
                                            Measurer<CoherentSuperposition>& m, const DiscriminationOptions& opt) {
  if (input.n_modes() != 2) throw std::invalid_argument("discriminate_ecs expects a two-mode state");
  CoherentSuperposition s = input;
  if (!s.electronic()) {
    s = with_electronic(s, Electronic::g);
  } else if (norm(electronic_component(s, Electronic::e)) > 1e-12) {
    throw std::invalid_argument("discriminate_ecs expects the ion in |g>");
  }
  const double eps = disambiguation_epsilon(alpha);
  s = apply_beamsplitter(s.normalized(), 0, 1, kPi / 2);

  using B = Branch<CoherentSuperposition>;
  std::vector<B> branches{B{{}, 1.0, s}};

  auto detect = [&](std::vector<B>& bs, std::size_t mode) {
    if (bs.empty()) return;
    for (auto& b : bs) b.state = parity_to_electronic(b.state, mode);
    bs = m.measure(bs);
    for (auto& b : bs) b.state = reset_if_excited(b.state, b.outcomes.back());
  };
  detect(branches, 0);
  detect(branches, 1);
  if (opt.disambiguate) {
    std::vector<B> gg, rest;
    for (auto& b : branches) {
      (b.outcomes[0] == Outcome::g && b.outcomes[1] == Outcome::g ? gg : rest).push_back(std::move(b));
    }
    for (auto& b : gg) b.state = apply_displacement(b.state, 0, -eps);
    detect(gg, 0);
    branches = std::move(gg);
    for (auto& b : rest) branches.push_back(std::move(b));
  }
  MeasurementRecord rec;
  rec.sampled = m.sampling();
  for (auto& b : branches) b.label = decide_label(b.outcomes);
  rec.branches = std::move(branches);
  return rec;
}

}  // namespace detail

// Full pipeline on a two-mode input (electronic |g> attached if absent).
inline MeasurementRecord discriminate_ecs(const CoherentSuperposition& input, double alpha,
                                          MeasurementPolicy policy = MeasurementPolicy::enumerate(),
                                          const DiscriminationOptions& opt = {}) {
  Measurer<CoherentSuperposition> m(policy, opt.detector);
  return detail::run_discrimination(input, alpha, m, opt);
}

// Repeated single-shot runs from one seeded generator; counts per outcome string.
inline std::map<std::string, std::size_t> sample_outcomes(const CoherentSuperposition& input, double alpha,
                                                          std::size_t shots, std::uint64_t seed,
                                                          const DiscriminationOptions& opt = {}) {
  Measurer<CoherentSuperposition> m(MeasurementPolicy::sample(seed), opt.detector);
  std::map<std::string, std::size_t> counts;
  for (std::size_t k = 0; k < shots; ++k) {
    const auto rec = detail::run_discrimination(input, alpha, m, opt);
    ++counts[outcome_string(rec.branches.front().outcomes)];
  }
  return counts;
}

// Worst-case probability of the correct label over the four ECS inputs.
inline double efficiency_estimate(double alpha, const DiscriminationOptions& opt = {}) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  double worst = 1.0;
  for (EcsKind k : kAllEcsKinds) {
    const auto rec = discriminate_ecs(ecs_ket(k, alpha), alpha, MeasurementPolicy::enumerate(), opt);
    worst = std::min(worst, rec.label_probability(label_of(k)));
  }
  return worst;
}

// Label confusion P(reported | true) with rows indexed by the true kind and
// columns by EcsLabel (undetermined last).
inline std::array<std::array<double, 5>, 4> confusion_matrix(double alpha, const DiscriminationOptions& opt = {}) {
  std::array<std::array<double, 5>, 4> m{};
  for (int k = 0; k < 4; ++k) {
    const auto rec = discriminate_ecs(ecs_ket(kAllEcsKinds[k], alpha), alpha, MeasurementPolicy::enumerate(), opt);
    for (const auto& b : rec.branches) m[k][static_cast<int>(b.label)] += b.probability;
  }
  return m;
}


}  // namespace vibcoh
