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
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibcoh/errors.hpp"
#include "vibcoh/linalg.hpp"

namespace vibcoh {

// Ordered list of Fock truncations plus an optional two-level electronic
// factor. Basis index = e * motional_dim + sum_k n_k * stride_k, with the
// electronic factor slowest and the last declared mode fastest. |g> is
// electronic index 0, |e> is 1.
class ModeSpace {
 public:
  explicit ModeSpace(std::vector<int> dims, bool electronic = false)
      : dims_(std::move(dims)), electronic_(electronic) {
    if (dims_.empty() && !electronic_) {
      throw std::invalid_argument("ModeSpace needs at least one factor");
    }
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("every mode dimension must be >= 2");
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t k = dims_.size(); k-- > 1;) {
      strides_[k - 1] = strides_[k] * dims_[k];
    }
    motional_dim_ = 1;
    for (int d : dims_) motional_dim_ *= d;
  }

  const std::vector<int>& dims() const { return dims_; }
  std::size_t num_modes() const { return dims_.size(); }
  bool electronic() const { return electronic_; }
  int dim(std::size_t mode) const {
    check_mode(mode);
    return dims_[mode];
  }
  Eigen::Index motional_dim() const { return motional_dim_; }
  Eigen::Index total_dim() const { return motional_dim_ * (electronic_ ? 2 : 1); }
  Eigen::Index stride(std::size_t mode) const {
    check_mode(mode);
    return strides_[mode];
  }

  void check_mode(std::size_t mode) const {
    if (mode >= dims_.size()) {
      throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                              std::to_string(dims_.size()) + " modes");
    }
  }

  Eigen::Index index(std::span<const int> fock, int elec = 0) const {
    if (fock.size() != dims_.size()) throw std::invalid_argument("Fock label length mismatch");
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (fock[k] < 0 || fock[k] >= dims_[k]) throw std::out_of_range("Fock label out of range");
      idx += fock[k] * strides_[k];
    }
    if (elec != 0 && !electronic_) throw std::invalid_argument("space has no electronic factor");
    return idx + elec * motional_dim_;
  }
  Eigen::Index index(std::initializer_list<int> fock, int elec = 0) const {
    return index(std::span<const int>(fock.begin(), fock.size()), elec);
  }

  int fock_index(Eigen::Index basis, std::size_t mode) const {
    return static_cast<int>((basis % motional_dim_) / strides_[mode] % dims_[mode]);
  }
  int electronic_index(Eigen::Index basis) const {
    return static_cast<int>(basis / motional_dim_);
  }

  std::string describe() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "x" : "") << dims_[k];
    if (electronic_) os << (dims_.empty() ? "" : "x") << "2e";
    return os.str();
  }

  bool operator==(const ModeSpace& o) const {
    return dims_ == o.dims_ && electronic_ == o.electronic_;
  }

 private:
  std::vector<int> dims_;
  bool electronic_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index motional_dim_ = 1;
};

inline void require_same_space(const ModeSpace& a, const ModeSpace& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": space mismatch (" + a.describe() +
                                " vs " + b.describe() + ")");
  }
}

class StateVector {
 public:
  StateVector(ModeSpace space, CVector amps) : space_(std::move(space)), amps_(std::move(amps)) {
    if (amps_.size() != space_.total_dim()) {
      throw std::invalid_argument("StateVector length does not match space dimension");
    }
  }

  const ModeSpace& space() const { return space_; }
  const CVector& amps() const { return amps_; }
  double norm() const { return amps_.norm(); }
  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    return StateVector(space_, amps_ / n);
  }

 private:
  ModeSpace space_;
  CVector amps_;
};

class Operator {
 public:
  Operator(ModeSpace space, CMatrix mat) : space_(std::move(space)), mat_(std::move(mat)) {
    if (mat_.rows() != space_.total_dim() || mat_.cols() != space_.total_dim()) {
      throw std::invalid_argument("Operator shape does not match space dimension");
    }
  }

  const ModeSpace& space() const { return space_; }
  const CMatrix& mat() const { return mat_; }
  Operator adjoint() const { return Operator(space_, mat_.adjoint()); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator product");
    return Operator(a.space_, a.mat_ * b.mat_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator sum");
    return Operator(a.space_, a.mat_ + b.mat_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator difference");
    return Operator(a.space_, a.mat_ - b.mat_);
  }
  friend Operator operator*(cplx s, const Operator& a) { return Operator(a.space_, s * a.mat_); }
  friend StateVector operator*(const Operator& a, const StateVector& v) {
    require_same_space(a.space_, v.space(), "operator application");
    return StateVector(a.space_, a.mat_ * v.amps());
  }

 private:
  ModeSpace space_;
  CMatrix mat_;
};

class DensityMatrix {
 public:
  DensityMatrix(ModeSpace space, CMatrix mat) : space_(std::move(space)), mat_(std::move(mat)) {
    if (mat_.rows() != space_.total_dim() || mat_.cols() != space_.total_dim()) {
      throw std::invalid_argument("DensityMatrix shape does not match space dimension");
    }
    const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
    if (hermiticity_defect(mat_) > 1e-10 * scale) {
      throw NumericalError("density matrix is not Hermitian");
    }
  }

  static DensityMatrix pure(const StateVector& psi) {
    return DensityMatrix(psi.space(), psi.amps() * psi.amps().adjoint());
  }

  const ModeSpace& space() const { return space_; }
  const CMatrix& mat() const { return mat_; }
  double trace() const { return mat_.trace().real(); }
  // Tr rho^2 for Hermitian rho is the squared Frobenius norm.
  double purity() const { return mat_.squaredNorm(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  ModeSpace space_;
  CMatrix mat_;
};

// ---------------------------------------------------------------------------
// Operators

inline Operator identity(const ModeSpace& space) {
  return Operator(space, CMatrix::Identity(space.total_dim(), space.total_dim()));
}

// Embeds a dim(mode) x dim(mode) matrix acting on one mode.
inline Operator embed_mode_operator(const ModeSpace& space, std::size_t mode, const CMatrix& local) {
  space.check_mode(mode);
  const int d = space.dims()[mode];
  if (local.rows() != d || local.cols() != d) {
    throw std::invalid_argument("local operator size does not match mode dimension");
  }
  const Eigen::Index n = space.total_dim();
  const Eigen::Index s = space.stride(mode);
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const int k = space.fock_index(col, mode);
    const Eigen::Index base = col - k * s;
    for (int r = 0; r < d; ++r) {
      const cplx v = local(r, k);
      if (v != cplx(0.0)) m(base + r * s, col) = v;
    }
  }
  return Operator(space, std::move(m));
}

inline Operator embed_electronic_operator(const ModeSpace& space, const CMatrix& local) {
  if (!space.electronic()) throw std::invalid_argument("space has no electronic factor");
  if (local.rows() != 2 || local.cols() != 2) throw std::invalid_argument("electronic operator must be 2x2");
  const Eigen::Index md = space.motional_dim();
  return Operator(space, kron(local, CMatrix::Identity(md, md)));
}

inline CMatrix local_annihilation(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Operator annihilation(const ModeSpace& space, std::size_t mode) {
  return embed_mode_operator(space, mode, local_annihilation(space.dim(mode)));
}

inline Operator creation(const ModeSpace& space, std::size_t mode) {
  return annihilation(space, mode).adjoint();
}

inline Operator diagonal_mode_operator(const ModeSpace& space, std::size_t mode,
                                       const std::function<cplx(int)>& f) {
  space.check_mode(mode);
  const Eigen::Index n = space.total_dim();
  CVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = f(space.fock_index(i, mode));
  return Operator(space, diag.asDiagonal());
}

inline Operator number_operator(const ModeSpace& space, std::size_t mode) {
  return diagonal_mode_operator(space, mode, [](int k) { return cplx(k); });
}

inline Operator parity_operator(const ModeSpace& space, std::size_t mode) {
  return diagonal_mode_operator(space, mode, [](int k) { return cplx(k % 2 ? -1.0 : 1.0); });
}

// e^{i theta n}
inline Operator phase_rotation_operator(const ModeSpace& space, std::size_t mode, double theta) {
  return diagonal_mode_operator(space, mode, [theta](int k) { return std::exp(kI * theta * double(k)); });
}

// e^{-i chi_t n^2}
inline Operator kerr_operator(const ModeSpace& space, std::size_t mode, double chi_t) {
  return diagonal_mode_operator(space, mode,
                                [chi_t](int k) { return std::exp(-kI * chi_t * double(k) * double(k)); });
}

// (-1)^{n_i n_j}
inline Operator cross_parity_operator(const ModeSpace& space, std::size_t i, std::size_t j) {
  space.check_mode(i);
  space.check_mode(j);
  if (i == j) throw std::invalid_argument("cross parity needs two distinct modes");
  const Eigen::Index n = space.total_dim();
  CVector diag(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    diag(k) = ((space.fock_index(k, i) * space.fock_index(k, j)) % 2) ? -1.0 : 1.0;
  }
  return Operator(space, diag.asDiagonal());
}

// exp(alpha b^dag - conj(alpha) b) on the truncated space.
inline Operator displacement_operator(const ModeSpace& space, std::size_t mode, cplx alpha) {
  const CMatrix a = local_annihilation(space.dim(mode));
  const CMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return embed_mode_operator(space, mode, exp_antihermitian(gen));
}

// exp((theta/2)(b_i^dag b_j - b_i b_j^dag)); maps coherent amplitudes
// (beta, gamma) -> (beta c + gamma s, -beta s + gamma c), c = cos(theta/2).
inline Operator beamsplitter_operator(const ModeSpace& space, std::size_t i, std::size_t j, double theta) {
  if (i == j) throw std::invalid_argument("beam splitter needs two distinct modes");
  const CMatrix bi = annihilation(space, i).mat();
  const CMatrix bj = annihilation(space, j).mat();
  const CMatrix gen = (theta / 2.0) * (bi.adjoint() * bj - bi * bj.adjoint());
  return Operator(space, exp_antihermitian(gen));
}

inline CMatrix local_sigma_plus() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(1, 0) = 1.0;  // |e><g|
  return s;
}

inline Operator sigma_plus(const ModeSpace& space) {
  return embed_electronic_operator(space, local_sigma_plus());
}
inline Operator sigma_minus(const ModeSpace& space) {
  return embed_electronic_operator(space, local_sigma_plus().adjoint());
}
inline Operator sigma_z(const ModeSpace& space) {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return embed_electronic_operator(space, z);
}

// ---------------------------------------------------------------------------
// States

// True when |alpha|^2 <= dim/4.
inline bool truncation_ok(cplx alpha, int dim) {
  return std::norm(alpha) <= dim / 4.0 + 1e-12;
}

inline void require_truncation(cplx alpha, int dim) {
  if (!truncation_ok(alpha, dim)) {
    std::ostringstream os;
    os << "truncation guard violated: |alpha|^2 = " << std::norm(alpha) << " > dim/4 = " << dim / 4.0;
    throw TruncationError(os.str());
  }
}

// Unnormalized truncated amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
inline CVector coherent_amplitudes(int dim, cplx alpha) {
  CVector c(dim);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

inline CVector fock_vector(int dim, int n) {
  if (n < 0 || n >= dim) throw std::out_of_range("Fock level outside truncation");
  CVector v = CVector::Zero(dim);
  v(n) = 1.0;
  return v;
}

// Product state from per-mode vectors (shorter vectors are zero padded).
inline StateVector product_state(const ModeSpace& space, const std::vector<CVector>& factors, int elec = 0) {
  if (factors.size() != space.num_modes()) throw std::invalid_argument("one factor per mode required");
  if (elec != 0 && !space.electronic()) throw std::invalid_argument("space has no electronic factor");
  CMatrix acc = CMatrix::Ones(1, 1);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const int d = space.dims()[k];
    if (factors[k].size() > d) throw TruncationError("factor longer than mode truncation");
    CVector f = CVector::Zero(d);
    f.head(factors[k].size()) = factors[k];
    acc = kron(acc, f);
  }
  CVector amps = CVector::Zero(space.total_dim());
  amps.segment(elec * space.motional_dim(), space.motional_dim()) = acc.col(0);
  return StateVector(space, amps);
}

inline StateVector fock_state(const ModeSpace& space, const std::vector<int>& ns, int elec = 0) {
  CVector amps = CVector::Zero(space.total_dim());
  amps(space.index(std::span<const int>(ns), elec)) = 1.0;
  return StateVector(space, amps);
}

inline StateVector vacuum(const ModeSpace& space) {
  return fock_state(space, std::vector<int>(space.num_modes(), 0));
}

inline std::vector<CVector> vacuum_factors(const ModeSpace& space) {
  std::vector<CVector> f;
  for (int d : space.dims()) f.push_back(fock_vector(d, 0));
  return f;
}

inline StateVector coherent_state(const ModeSpace& space, std::size_t mode, cplx alpha) {
  require_truncation(alpha, space.dim(mode));
  auto f = vacuum_factors(space);
  f[mode] = coherent_amplitudes(space.dims()[mode], alpha);
  return product_state(space, f).normalized();
}

inline StateVector cat_state(const ModeSpace& space, std::size_t mode, cplx alpha, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("cat sign must be +1 or -1");
  if (sign == -1 && std::abs(alpha) < 1e-12) throw std::invalid_argument("odd cat with alpha = 0 is undefined");
  require_truncation(alpha, space.dim(mode));
  const int d = space.dims()[mode];
  auto f = vacuum_factors(space);
  f[mode] = coherent_amplitudes(d, alpha) + double(sign) * coherent_amplitudes(d, -alpha);
  return product_state(space, f).normalized();
}

enum class EcsKind { phi_plus, phi_minus, psi_plus, psi_minus };

inline const char* to_string(EcsKind k) {
  switch (k) {
    case EcsKind::phi_plus: return "phi+";
    case EcsKind::phi_minus: return "phi-";
    case EcsKind::psi_plus: return "psi+";
    case EcsKind::psi_minus: return "psi-";
  }
  return "?";
}

inline constexpr EcsKind kAllEcsKinds[] = {EcsKind::phi_plus, EcsKind::phi_minus, EcsKind::psi_plus,
                                          EcsKind::psi_minus};

// Sign in front of the second ket and whether the second mode is flipped:
// phi = |a,a> +/- |-a,-a>, psi = |a,-a> +/- |-a,a>.
inline int ecs_sign(EcsKind k) { return (k == EcsKind::phi_plus || k == EcsKind::psi_plus) ? 1 : -1; }
inline bool ecs_is_psi(EcsKind k) { return k == EcsKind::psi_plus || k == EcsKind::psi_minus; }

inline StateVector ecs_state(const ModeSpace& space, EcsKind kind, cplx alpha, std::size_t mode_a = 0,
                             std::size_t mode_b = 1) {
  if (space.num_modes() < 2) throw std::invalid_argument("ECS needs at least two modes");
  if (mode_a == mode_b) throw std::invalid_argument("ECS needs two distinct modes");
  require_truncation(alpha, space.dim(mode_a));
  require_truncation(alpha, space.dim(mode_b));
  const cplx b = ecs_is_psi(kind) ? -alpha : alpha;
  auto f1 = vacuum_factors(space);
  f1[mode_a] = coherent_amplitudes(space.dims()[mode_a], alpha);
  f1[mode_b] = coherent_amplitudes(space.dims()[mode_b], b);
  auto f2 = vacuum_factors(space);
  f2[mode_a] = coherent_amplitudes(space.dims()[mode_a], -alpha);
  f2[mode_b] = coherent_amplitudes(space.dims()[mode_b], -b);
  CVector amps = product_state(space, f1).amps() + double(ecs_sign(kind)) * product_state(space, f2).amps();
  return StateVector(space, amps).normalized();
}

// ---------------------------------------------------------------------------
// Scalars

inline cplx overlap(const StateVector& a, const StateVector& b) {
  require_same_space(a.space(), b.space(), "overlap");
  return a.amps().dot(b.amps());  // conjugates a
}

inline double fidelity(const DensityMatrix& rho, const StateVector& target) {
  require_same_space(rho.space(), target.space(), "fidelity");
  const double f = target.amps().dot(rho.mat() * target.amps()).real();
  return std::clamp(f, 0.0, 1.0);
}

inline double fidelity(const StateVector& psi, const StateVector& target) {
  return std::norm(overlap(target, psi));
}

inline cplx expectation(const Operator& op, const StateVector& psi) {
  require_same_space(op.space(), psi.space(), "expectation");
  return psi.amps().dot(op.mat() * psi.amps());
}

inline cplx expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space(), "expectation");
  return (op.mat() * rho.mat()).trace();
}

inline double linearized_entropy(const DensityMatrix& rho) {
  const double d = static_cast<double>(rho.space().total_dim());
  if (d < 2) throw std::invalid_argument("linearized entropy needs dimension >= 2");
  return d / (d - 1.0) * (1.0 - rho.purity());
}

// Reduced state on the kept modes (ascending declared order). The electronic
// factor is kept only when keep_electronic is set.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep,
                                   bool keep_electronic = false) {
  const ModeSpace& sp = rho.space();
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw std::invalid_argument("partial_trace: repeated mode in keep set");
  }
  for (std::size_t m : keep) sp.check_mode(m);
  if (keep_electronic && !sp.electronic()) throw std::invalid_argument("partial_trace: no electronic factor");
  const std::size_t n_factors = sp.num_modes() + (sp.electronic() ? 1 : 0);
  const std::size_t n_keep = keep.size() + (keep_electronic ? 1 : 0);
  if (n_keep == 0 || n_keep >= n_factors) {
    throw std::invalid_argument("partial_trace: keep set must be a nonempty proper subset");
  }

  std::vector<int> kept_dims;
  std::vector<char> kept(sp.num_modes(), 0);
  for (std::size_t m : keep) {
    kept_dims.push_back(sp.dims()[m]);
    kept[m] = 1;
  }
  ModeSpace out_space(kept_dims, keep_electronic);

  const Eigen::Index n = sp.total_dim();
  std::vector<Eigen::Index> kidx(n), tidx(n);
  Eigen::Index traced_dim = 1;
  for (std::size_t m = 0; m < sp.num_modes(); ++m) {
    if (!kept[m]) traced_dim *= sp.dims()[m];
  }
  if (sp.electronic() && !keep_electronic) traced_dim *= 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index k = 0, t = 0;
    const int e = sp.electronic_index(i);
    if (sp.electronic()) {
      if (keep_electronic) k = e; else t = e;
    }
    for (std::size_t m = 0; m < sp.num_modes(); ++m) {
      const int f = sp.fock_index(i, m);
      if (kept[m]) k = k * sp.dims()[m] + f; else t = t * sp.dims()[m] + f;
    }
    kidx[i] = k;
    tidx[i] = t;
  }
  std::vector<std::vector<Eigen::Index>> groups(traced_dim);
  for (Eigen::Index i = 0; i < n; ++i) groups[tidx[i]].push_back(i);

  CMatrix out = CMatrix::Zero(out_space.total_dim(), out_space.total_dim());
  for (const auto& g : groups) {
    for (Eigen::Index i : g) {
      for (Eigen::Index j : g) out(kidx[i], kidx[j]) += rho.mat()(i, j);
    }
  }
  return DensityMatrix(out_space, out);
}

}  // namespace vibcoh
