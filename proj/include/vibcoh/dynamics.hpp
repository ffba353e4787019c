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
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vibcoh/hamiltonian.hpp"
#include "vibcoh/hilbert.hpp"
#include "vibcoh/ode.hpp"

namespace vibcoh {

template <class S>
struct Trajectory {
  std::vector<double> times;
  std::vector<S> states;
  std::map<std::string, std::vector<double>> observables;
};

using HamiltonianFn = std::function<CMatrix(double)>;
using JumpFn = std::function<std::vector<CMatrix>(double)>;

struct EvolveOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  bool check_hermitian = true;
};

inline OdeOptions to_ode(const EvolveOptions& o) {
  OdeOptions r;
  r.rtol = o.rtol;
  r.atol = o.atol;
  r.max_step = o.max_step;
  return r;
}

inline void require_hermitian(const CMatrix& h, double t) {
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
  if (hermiticity_defect(h) > 1e-10 * scale) {
    std::ostringstream os;
    os << "Hamiltonian is not Hermitian at t = " << t;
    throw NumericalError(os.str());
  }
}

inline void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("time grid is empty");
}

// i psi' = H(t) psi with a generic matrix-valued Hamiltonian.
inline Trajectory<StateVector> evolve_schrodinger(const HamiltonianFn& h, const StateVector& psi0,
                                                  const std::vector<double>& t_grid, const EvolveOptions& opt = {}) {
  require_grid(t_grid);
  const Eigen::Index n = psi0.space().total_dim();
  if (opt.check_hermitian) {
    for (double t : t_grid) {
      const CMatrix ht = h(t);
      if (ht.rows() != n || ht.cols() != n) throw std::invalid_argument("Hamiltonian dimension mismatch");
      require_hermitian(ht, t);
    }
  }
  auto rhs = [&](double t, const CVector& y) -> CVector { return -kI * (h(t) * y); };
  const auto ys = integrate_dopri5<CVector>(rhs, psi0.amps(), t_grid, to_ode(opt));
  Trajectory<StateVector> tr;
  tr.times = t_grid;
  for (const auto& y : ys) tr.states.emplace_back(psi0.space(), y);
  return tr;
}

// Same, for an assembled term Hamiltonian. Time-independent generators are
// propagated exactly by eigendecomposition.
inline Trajectory<StateVector> evolve_schrodinger(const TimeDependentHamiltonian& h, const StateVector& psi0,
                                                  const std::vector<double>& t_grid, const EvolveOptions& opt = {}) {
  require_grid(t_grid);
  require_same_space(h.space(), psi0.space(), "evolve_schrodinger");
  if (opt.check_hermitian) require_hermitian(h.at(t_grid.front()), t_grid.front());
  Trajectory<StateVector> tr;
  tr.times = t_grid;
  if (h.constant()) {
    const CMatrix& hs = h.static_part();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (hs + hs.adjoint()));
    const CMatrix& v = es.eigenvectors();
    const CVector c0 = v.adjoint() * psi0.amps();
    for (double t : t_grid) {
      CVector c = c0;
      for (Eigen::Index k = 0; k < c.size(); ++k) {
        c(k) *= std::exp(-kI * es.eigenvalues()(k) * (t - t_grid.front()));
      }
      tr.states.emplace_back(psi0.space(), v * c);
    }
    return tr;
  }
  auto rhs = [&](double t, const CVector& y) -> CVector { return -kI * h.apply(t, y); };
  OdeOptions o = to_ode(opt);
  // Resolve the fastest retained oscillation.
  if (!std::isfinite(o.max_step)) o.max_step = 0.25 * (2 * kPi / h.max_frequency());
  const auto ys = integrate_dopri5<CVector>(rhs, psi0.amps(), t_grid, o);
  for (const auto& y : ys) tr.states.emplace_back(psi0.space(), y);
  return tr;
}

inline CMatrix lindblad_rhs(const CMatrix& h, const std::vector<CMatrix>& jumps, const CMatrix& rho) {
  CMatrix out = -kI * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const CMatrix jd = j.adjoint();
    const CMatrix jdj = jd * j;
    out += 2.0 * (j * rho * jd) - jdj * rho - rho * jdj;
  }
  return out;
}

// rho' = -i[H, rho] + sum_k (2 J rho J^dag - {J^dag J, rho}). No 1/2 in front
// of the dissipator.
inline Trajectory<DensityMatrix> evolve_lindblad(const HamiltonianFn& h, const JumpFn& jumps,
                                                 const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                                 const EvolveOptions& opt = {}) {
  require_grid(t_grid);
  const Eigen::Index n = rho0.space().total_dim();
  const CMatrix h0 = h(t_grid.front());
  if (h0.rows() != n || h0.cols() != n) throw std::invalid_argument("evolve_lindblad: Hamiltonian dimension mismatch");
  for (const auto& j : jumps(t_grid.front())) {
    if (j.rows() != n || j.cols() != n) throw std::invalid_argument("evolve_lindblad: jump operator dimension mismatch");
  }
  if (opt.check_hermitian) {
    for (double t : t_grid) require_hermitian(h(t), t);
  }
  auto rhs = [&](double t, const CMatrix& r) -> CMatrix { return lindblad_rhs(h(t), jumps(t), r); };
  const auto rs = integrate_dopri5<CMatrix>(rhs, rho0.mat(), t_grid, to_ode(opt));
  Trajectory<DensityMatrix> tr;
  tr.times = t_grid;
  for (const auto& r : rs) tr.states.emplace_back(rho0.space(), r);
  return tr;
}

template <class S>
using Functional = std::function<double(const S&)>;

template <class S>
std::map<std::string, std::vector<double>> observable_series(const Trajectory<S>& tr,
                                                             const std::map<std::string, Functional<S>>& fs) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, f] : fs) {
    auto& series = out[name];
    series.reserve(tr.states.size());
    for (const auto& s : tr.states) series.push_back(f(s));
  }
  return out;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) return {a};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Grid a, a+step, ... up to b inclusive (b is appended if not hit exactly).
inline std::vector<double> arange(double a, double b, double step) {
  if (!(step > 0)) throw std::invalid_argument("arange: step must be positive");
  std::vector<double> v;
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) v.push_back(a + step * static_cast<double>(i));
  if (std::abs(v.back() - b) > 1e-9 * std::max(1.0, std::abs(b))) v.push_back(b);
  return v;
}

}  // namespace vibcoh
