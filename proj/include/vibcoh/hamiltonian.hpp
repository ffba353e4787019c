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

#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibcoh/hilbert.hpp"
#include "vibcoh/linalg.hpp"

namespace vibcoh {

// Bichromatic Raman configuration, all rates in units of g.
// eta_x, eta_y are the effective Lamb-Dicke projections.
struct LaserConfig {
  double g1 = 1.0;
  double g2 = 1.0;
  double delta1 = 5.0;
  double delta12 = 0.0;
  double eta_x = 0.8;
  double eta_y = 0.0;
  double phi = 0.0;
  double omega_x = 20.0;
  double omega_y = 5.0;

  // Throws on broken invariants, returns soft warnings.
  std::vector<std::string> validate() const {
    if (!(omega_x > omega_y)) throw std::invalid_argument("LaserConfig: omega_x must exceed omega_y");
    if (delta1 <= 0.0) throw std::invalid_argument("LaserConfig: delta1 must be positive");
    std::vector<std::string> warnings;
    if (delta1 < 5.0 * std::max(g1, g2)) {
      warnings.push_back("delta1 < 5 max(g1, g2): far-detuned elimination is questionable");
    }
    return warnings;
  }
};

// Powers of (b_x^dag, b_x, b_y^dag, b_y).
using Exponents = std::array<int, 4>;

struct HamiltonianTerm {
  cplx coeff;
  Exponents exps;
  double freq;
};

inline double term_frequency(const Exponents& e, double omega_x, double omega_y, double delta12) {
  return (e[0] - e[1]) * omega_x + (e[2] - e[3]) * omega_y - delta12;
}

namespace detail {
inline cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}
inline double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }
}  // namespace detail

inline cplx term_coefficient(const LaserConfig& c, const Exponents& e) {
  return -(c.g1 * c.g2 / c.delta1) * detail::ipow(kI * c.eta_x, e[0] + e[1]) *
         detail::ipow(kI * c.eta_y, e[2] + e[3]) * std::exp(-kI * c.phi) /
         (detail::fact(e[0]) * detail::fact(e[1]) * detail::fact(e[2]) * detail::fact(e[3]));
}

struct TermList {
  static constexpr double kStationaryTol = 1e-9;

  std::vector<HamiltonianTerm> terms;
  int max_order = 0;
  double delta12 = 0.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  double freq_cutoff = std::numeric_limits<double>::infinity();

  static bool is_stationary(const HamiltonianTerm& t) { return std::abs(t.freq) < kStationaryTol; }

  std::vector<HamiltonianTerm> stationary() const {
    std::vector<HamiltonianTerm> out;
    for (const auto& t : terms) {
      if (is_stationary(t)) out.push_back(t);
    }
    return out;
  }
  std::vector<HamiltonianTerm> nonstationary() const {
    std::vector<HamiltonianTerm> out;
    for (const auto& t : terms) {
      if (!is_stationary(t) && std::abs(t.freq) <= freq_cutoff) out.push_back(t);
    }
    return out;
  }
  const HamiltonianTerm* find(const Exponents& e) const {
    for (const auto& t : terms) {
      if (t.exps == e) return &t;
    }
    return nullptr;
  }
};

// All (n,m,p,q) != 0 with n+m+p+q <= max_order and nonzero coefficient.
inline TermList expand(const LaserConfig& config, int max_order) {
  if (max_order < 1) throw std::invalid_argument("expand: max_order must be >= 1");
  TermList out;
  out.max_order = max_order;
  out.delta12 = config.delta12;
  out.omega_x = config.omega_x;
  out.omega_y = config.omega_y;
  for (int n = 0; n <= max_order; ++n) {
    for (int m = 0; n + m <= max_order; ++m) {
      for (int p = 0; n + m + p <= max_order; ++p) {
        for (int q = 0; n + m + p + q <= max_order; ++q) {
          if (n + m + p + q == 0) continue;
          const Exponents e{n, m, p, q};
          const cplx c = term_coefficient(config, e);
          if (c == cplx(0.0)) continue;
          out.terms.push_back({c, e, term_frequency(e, config.omega_x, config.omega_y, config.delta12)});
        }
      }
    }
  }
  return out;
}

// Recomputes frequencies for a new beat note and drops oscillating terms
// faster than the cutoff.
inline TermList classify(const TermList& in, double delta12, double freq_cutoff) {
  if (freq_cutoff < 0.0) throw std::invalid_argument("classify: cutoff must be >= 0");
  TermList out = in;
  out.delta12 = delta12;
  out.freq_cutoff = freq_cutoff;
  out.terms.clear();
  for (auto t : in.terms) {
    t.freq = term_frequency(t.exps, in.omega_x, in.omega_y, delta12);
    if (TermList::is_stationary(t) || std::abs(t.freq) <= freq_cutoff) out.terms.push_back(t);
  }
  return out;
}

// Normal-ordered b_x^dag^n b_x^m b_y^dag^p b_y^q. Mode 0 is x, mode 1 is y.
inline CMatrix term_operator(const ModeSpace& space, const Exponents& e) {
  const bool needs_y = e[2] + e[3] > 0;
  if (space.num_modes() < (needs_y ? 2u : 1u)) {
    throw std::invalid_argument("term_operator: space lacks a mode referenced by the term");
  }
  const Eigen::Index n = space.total_dim();
  CMatrix out = CMatrix::Identity(n, n);
  const CMatrix bx = annihilation(space, 0).mat();
  for (int k = 0; k < e[0]; ++k) out = out * bx.adjoint();
  for (int k = 0; k < e[1]; ++k) out = out * bx;
  if (needs_y) {
    const CMatrix by = annihilation(space, 1).mat();
    for (int k = 0; k < e[2]; ++k) out = out * by.adjoint();
    for (int k = 0; k < e[3]; ++k) out = out * by;
  }
  return out;
}

// H(t) = sum_terms coeff e^{i freq t} O + h.c. Terms are grouped by frequency
// so repeated evaluation costs one matrix sum per distinct frequency.
class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian(const std::vector<HamiltonianTerm>& terms, const ModeSpace& space) : space_(space) {
    const Eigen::Index n = space.total_dim();
    static_ = CMatrix::Zero(n, n);
    std::map<double, CMatrix> groups;
    for (const auto& t : terms) {
      const CMatrix op = t.coeff * term_operator(space, t.exps);
      if (TermList::is_stationary(t)) {
        static_ += op + op.adjoint();
      } else {
        auto it = groups.find(t.freq);
        if (it == groups.end()) it = groups.emplace(t.freq, CMatrix::Zero(n, n)).first;
        it->second += op;
      }
    }
    for (auto& [f, a] : groups) osc_.push_back({f, std::move(a)});
  }
  TimeDependentHamiltonian(const TermList& list, const ModeSpace& space)
      : TimeDependentHamiltonian(list.terms, space) {}

  const ModeSpace& space() const { return space_; }
  bool constant() const { return osc_.empty(); }
  const CMatrix& static_part() const { return static_; }

  double max_frequency() const {
    double m = 0.0;
    for (const auto& o : osc_) m = std::max(m, std::abs(o.freq));
    return m;
  }

  CMatrix at(double t) const {
    CMatrix h = static_;
    for (const auto& o : osc_) {
      const CMatrix a = std::exp(kI * o.freq * t) * o.mat;
      h += a + a.adjoint();
    }
    return h;
  }

  CVector apply(double t, const CVector& psi) const {
    CVector out = static_ * psi;
    for (const auto& o : osc_) {
      const cplx ph = std::exp(kI * o.freq * t);
      out += ph * (o.mat * psi) + std::conj(ph) * (o.mat.adjoint() * psi);
    }
    return out;
  }

 private:
  struct Osc {
    double freq;
    CMatrix mat;
  };
  ModeSpace space_;
  CMatrix static_;
  std::vector<Osc> osc_;
};

inline Operator operator_at(const TermList& terms, double t, const ModeSpace& space) {
  return Operator(space, TimeDependentHamiltonian(terms, space).at(t));
}

// ---------------------------------------------------------------------------
// Presets

enum class PresetKind { displacement, kerr, crossphase };

inline const char* to_string(PresetKind k) {
  switch (k) {
    case PresetKind::displacement: return "displacement";
    case PresetKind::kerr: return "kerr";
    case PresetKind::crossphase: return "crossphase";
  }
  return "?";
}

inline PresetKind preset_kind_from_string(const std::string& s) {
  if (s == "displacement") return PresetKind::displacement;
  if (s == "kerr") return PresetKind::kerr;
  if (s == "crossphase") return PresetKind::crossphase;
  throw std::invalid_argument("unknown preset kind: " + s);
}

// eta is the bare Lamb-Dicke parameter; the effective projection is 2 eta for
// counter-propagating beams. gamma = omega_x / g.
struct PresetParams {
  double eta = 0.4;
  double gamma = 20.0;
  double omega_ratio = 4.0;
  double delta1 = 5.0;
  double g = 1.0;
  int max_order = 0;         // 0 selects the preset default
  double freq_cutoff = -1.0;  // < 0 selects omega_x + omega_y
};

struct Preset {
  PresetKind kind;
  LaserConfig config;
  TermList terms;
  std::vector<Exponents> targets;
};

inline Preset preset(PresetKind kind, const PresetParams& p = {}) {
  LaserConfig c;
  c.g1 = c.g2 = p.g;
  c.delta1 = p.delta1;
  c.eta_x = 2.0 * p.eta;
  c.omega_x = p.gamma;
  c.omega_y = p.gamma / p.omega_ratio;
  int order = 4;
  std::vector<Exponents> targets;
  switch (kind) {
    case PresetKind::displacement:
      c.delta12 = c.omega_x;
      c.eta_y = 0.0;
      c.phi = kPi;
      order = 2;
      targets = {{1, 0, 0, 0}};
      break;
    case PresetKind::kerr:
      c.delta12 = 0.0;
      c.eta_y = 0.0;
      targets = {{2, 2, 0, 0}};
      break;
    case PresetKind::crossphase:
      c.delta12 = 0.0;
      c.eta_y = c.eta_x;
      targets = {{1, 1, 1, 1}};
      break;
  }
  c.validate();
  if (p.max_order > 0) order = p.max_order;
  const double cutoff = p.freq_cutoff >= 0.0 ? p.freq_cutoff : c.omega_x + c.omega_y;
  return {kind, c, classify(expand(c, order), c.delta12, cutoff), targets};
}

inline bool is_target(const Preset& p, const Exponents& e) {
  for (const auto& t : p.targets) {
    if (t == e) return true;
  }
  return false;
}

// The engineered stationary interaction alone.
inline std::vector<HamiltonianTerm> ideal_terms(const Preset& p) {
  std::vector<HamiltonianTerm> out;
  for (const auto& t : p.terms.stationary()) {
    if (is_target(p, t.exps)) out.push_back(t);
  }
  if (out.size() != p.targets.size()) throw std::logic_error("preset target term is not stationary");
  return out;
}

// Target plus the retained oscillating terms; other stationary terms only on
// request.
inline std::vector<HamiltonianTerm> true_terms(const Preset& p, bool include_spectator_stationary = false) {
  std::vector<HamiltonianTerm> out;
  for (const auto& t : p.terms.terms) {
    const bool stat = TermList::is_stationary(t);
    if (stat && !is_target(p, t.exps) && !include_spectator_stationary) continue;
    if (!stat && std::abs(t.freq) > p.terms.freq_cutoff) continue;
    out.push_back(t);
  }
  return out;
}

// Self-consistent rate of the target interaction from the expansion itself:
// |c| for the displacement drift, 2|c| for the Hermitian-doubled diagonal terms.
inline double effective_rate(const Preset& p) {
  const HamiltonianTerm* t = p.terms.find(p.targets.front());
  if (!t) throw std::logic_error("target term missing from expansion");
  return p.kind == PresetKind::displacement ? std::abs(t->coeff) : 2.0 * std::abs(t->coeff);
}

// Alternate convention g1 g2 eta^4 / (2 Delta1) used for the figure anchors.
inline double alternate_rate(const Preset& p) {
  const LaserConfig& c = p.config;
  switch (p.kind) {
    case PresetKind::displacement: return c.g1 * c.g2 * c.eta_x / c.delta1;
    case PresetKind::kerr: return c.g1 * c.g2 * std::pow(c.eta_x, 4) / (2 * c.delta1);
    case PresetKind::crossphase: return c.g1 * c.g2 * c.eta_x * c.eta_x * c.eta_y * c.eta_y / (2 * c.delta1);
  }
  return 0.0;
}

// Phase accumulated at the reference point: |alpha| = 1, chi t = pi/2, chi t = pi.
inline double target_phase(PresetKind k) {
  switch (k) {
    case PresetKind::displacement: return 1.0;
    case PresetKind::kerr: return kPi / 2;
    case PresetKind::crossphase: return kPi;
  }
  return 0.0;
}

inline double target_time(const Preset& p) { return target_phase(p.kind) / effective_rate(p); }
inline double alternate_target_time(const Preset& p) { return target_phase(p.kind) / alternate_rate(p); }

// ---------------------------------------------------------------------------
// Plain-text table: coeff_re,coeff_im,n,m,p,q,freq

inline void write_term_table(std::ostream& os, const TermList& list) {
  std::ostringstream s;
  s.precision(17);
  s << "# max_order=" << list.max_order << " delta12=" << list.delta12 << " omega_x=" << list.omega_x
    << " omega_y=" << list.omega_y << " freq_cutoff=" << list.freq_cutoff << "\n";
  s << "coeff_re,coeff_im,n,m,p,q,freq\n";
  for (const auto& t : list.terms) {
    s << t.coeff.real() << "," << t.coeff.imag() << "," << t.exps[0] << "," << t.exps[1] << "," << t.exps[2]
      << "," << t.exps[3] << "," << t.freq << "\n";
  }
  os << s.str();
}

inline TermList read_term_table(std::istream& is) {
  TermList out;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = kv.substr(0, eq);
        const double v = std::stod(kv.substr(eq + 1));
        if (k == "max_order") out.max_order = static_cast<int>(v);
        else if (k == "delta12") out.delta12 = v;
        else if (k == "omega_x") out.omega_x = v;
        else if (k == "omega_y") out.omega_y = v;
        else if (k == "freq_cutoff") out.freq_cutoff = v;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "coeff_re,coeff_im,n,m,p,q,freq") throw std::invalid_argument("term table: bad header");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::invalid_argument("term table: expected 7 columns");
    HamiltonianTerm t;
    t.coeff = cplx(std::stod(cells[0]), std::stod(cells[1]));
    for (int k = 0; k < 4; ++k) t.exps[k] = std::stoi(cells[2 + k]);
    t.freq = std::stod(cells[6]);
    out.terms.push_back(t);
  }
  return out;
}

}  // namespace vibcoh
