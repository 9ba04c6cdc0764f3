// Copyright 2026 The gkpcav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPCAV_FOCK_HPP
#define GKPCAV_FOCK_HPP

// Truncated Fock-basis states and operators.
//
// Index n of every vector/matrix is the photon number. Quadratures follow
// x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(sqrt(2) i), so [x, p] = i and the
// vacuum has Var(x) = Var(p) = 1/2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gkpcav/errors.hpp"

namespace gkpcav {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

namespace detail {

inline void require_dim(int dim) {
  if (dim < 1) {
    throw InvalidDimension("Fock dimension must be >= 1, got " +
                           std::to_string(dim));
  }
}

// (-i)^n without accumulating rounding.
inline cplx minus_i_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace detail

/// Pure state over |0>, ..., |dim-1>.
class FockVector {
 public:
  explicit FockVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    detail::require_dim(static_cast<int>(amps_.size()));
  }

  static FockVector basis(int n, int dim) {
    detail::require_dim(dim);
    if (n < 0 || n >= dim) {
      throw InvalidArgument("basis index out of range");
    }
    CVector v = CVector::Zero(dim);
    v(n) = 1.0;
    return FockVector(std::move(v));
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](int n) const { return amps_(n); }

  double norm() const { return amps_.norm(); }

  FockVector normalized() const {
    const double nrm = norm();
    if (!(nrm > 0.0)) throw NumericalError("cannot normalize a zero vector");
    return FockVector(amps_ / nrm);
  }

  /// Relative weight |c_{dim-1}|^2 / sum |c_n|^2 on the last retained level.
  double tail_weight() const {
    return std::norm(amps_(dim() - 1)) / amps_.squaredNorm();
  }

  bool well_truncated(double tolerance) const {
    return tail_weight() < tolerance;
  }

 private:
  CVector amps_;
};

/// Mixed state rho_{nm} = <n|rho|m>.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix elements) : rho_(std::move(elements)) {
    if (rho_.rows() != rho_.cols()) {
      throw InvalidDimension("density matrix must be square");
    }
    detail::require_dim(static_cast<int>(rho_.rows()));
  }

  static DensityMatrix pure(const FockVector& psi) {
    const CVector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
  }

  static DensityMatrix maximally_mixed(int dim) {
    detail::require_dim(dim);
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& elements() const { return rho_; }
  cplx operator()(int n, int m) const { return rho_(n, m); }

  double trace() const { return rho_.trace().real(); }

  DensityMatrix normalized() const {
    const double tr = trace();
    if (!(tr > 0.0)) throw NumericalError("density matrix has nonpositive trace");
    return DensityMatrix(rho_ / tr);
  }

  double hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Relative population rho_{d-1,d-1} / tr(rho) of the last retained level.
  double tail_weight() const {
    return rho_(dim() - 1, dim() - 1).real() / trace();
  }

  double mean_photons() const {
    double acc = 0.0;
    for (int n = 1; n < dim(); ++n) acc += n * rho_(n, n).real();
    return acc / trace();
  }

  /// Smallest cutoff that keeps all but `tolerance` of the population.
  int effective_dim(double tolerance = 1e-14) const {
    const double tr = trace();
    double tail = 0.0;
    for (int n = dim() - 1; n > 0; --n) {
      tail += rho_(n, n).real();
      if (tail > tolerance * tr) return n + 1;
    }
    return 1;
  }

  /// Zero-pads or truncates to a new cutoff.
  DensityMatrix resized(int new_dim) const {
    detail::require_dim(new_dim);
    CMatrix out = CMatrix::Zero(new_dim, new_dim);
    const int k = std::min(new_dim, dim());
    out.topLeftCorner(k, k) = rho_.topLeftCorner(k, k);
    return DensityMatrix(std::move(out));
  }

  /// Throws NumericalError unless Hermitian, unit trace and PSD within the
  /// given tolerances.
  void check_physical(double hermitian_tol = 1e-10, double psd_tol = 1e-8) const {
    if (hermiticity_error() > hermitian_tol) {
      throw NumericalError("density matrix is not Hermitian");
    }
    if (std::abs(trace() - 1.0) > hermitian_tol) {
      throw NumericalError("density matrix trace differs from 1");
    }
    if (min_eigenvalue() < -psd_tol) {
      throw NumericalError("density matrix is not positive semidefinite");
    }
  }

 private:
  CMatrix rho_;
};

class FockOperator {
 public:
  /// `unitary_on_truncation` records whether the constructor promises
  /// O O^dag = I on the retained block (exactly or up to tail leakage).
  explicit FockOperator(CMatrix elements, bool unitary_on_truncation = false)
      : op_(std::move(elements)), unitary_(unitary_on_truncation) {
    if (op_.rows() != op_.cols()) {
      throw InvalidDimension("operator must be square");
    }
    detail::require_dim(static_cast<int>(op_.rows()));
  }

  int dim() const { return static_cast<int>(op_.rows()); }
  const CMatrix& elements() const { return op_; }
  cplx operator()(int n, int m) const { return op_(n, m); }
  bool unitary_on_truncation() const { return unitary_; }

  FockOperator adjoint() const { return FockOperator(op_.adjoint(), unitary_); }

  FockOperator operator*(const FockOperator& rhs) const {
    check_dim(rhs.dim());
    return FockOperator(op_ * rhs.op_, unitary_ && rhs.unitary_);
  }

  FockVector apply(const FockVector& psi) const {
    check_dim(psi.dim());
    return FockVector(op_ * psi.amplitudes());
  }

  /// O rho O^dag, unnormalized.
  DensityMatrix conjugate(const DensityMatrix& rho) const {
    check_dim(rho.dim());
    CMatrix tmp = op_ * rho.elements();
    return DensityMatrix(tmp * op_.adjoint());
  }

 private:
  void check_dim(int other) const {
    if (other != dim()) {
      throw InvalidDimension("dimension mismatch: operator " +
                             std::to_string(dim()) + " vs " +
                             std::to_string(other));
    }
  }

  CMatrix op_;
  bool unitary_;
};

// ---------------------------------------------------------------------------
// Elementary operators

inline FockOperator annihilation(int dim) {
  detail::require_dim(dim);
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return FockOperator(std::move(a));
}

inline FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

inline FockOperator number_operator(int dim) {
  detail::require_dim(dim);
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return FockOperator(std::move(n));
}

/// exp(i theta n). Exactly unitary on the truncation.
inline FockOperator rotation_operator(double theta, int dim) {
  detail::require_dim(dim);
  CMatrix u = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) u(k, k) = std::polar(1.0, theta * k);
  return FockOperator(std::move(u), true);
}

/// exp(i pi n), exact +-1 entries.
inline FockOperator parity_operator(int dim) {
  detail::require_dim(dim);
  CMatrix u = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) u(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return FockOperator(std::move(u), true);
}

inline FockOperator position_operator(int dim) {
  const CMatrix a = annihilation(dim).elements();
  return FockOperator((a + a.adjoint()) / std::sqrt(2.0));
}

inline FockOperator momentum_operator(int dim) {
  const CMatrix a = annihilation(dim).elements();
  return FockOperator((a - a.adjoint()) / (std::sqrt(2.0) * kI));
}

/// True when the cutoff comfortably holds D(alpha)|0>: |a|^2 + 5|a| + 10 <= dim.
inline bool displacement_dim_adequate(cplx alpha, int dim) {
  const double amp = std::abs(alpha);
  return amp * amp + 5.0 * amp + 10.0 <= static_cast<double>(dim);
}

/// Truncated displacement operator D(alpha) = exp(alpha a^dag - alpha* a).
///
/// Each retained element equals the corresponding element of the infinite
/// matrix. With x = |alpha|^2 and k >= 0,
///   <m+k|D|m> = f_m^k e^{ik arg(alpha)},   <m|D|m+k> = f_m^k (-e^{-i arg(alpha)})^k,
///   f_m^k = sqrt(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^{(k)}(x),
/// and f obeys the normalized Laguerre recurrence
///   sqrt((m+1)(m+1+k)) f_{m+1} = (2m+1+k-x) f_m - sqrt(m(m+k)) f_{m-1}
/// seeded from f_0 evaluated in log space. |f| <= 1 throughout, so nothing
/// overflows; valid for |alpha|^2 up to ~1400 before e^{-x/2} underflows.
/// Unitary on the truncation up to leakage through the cutoff.
namespace detail {

// Visits every retained element of D(alpha) as fn(row, col, value).
template <typename Fn>
void for_each_displacement_element(cplx alpha, int dim, Fn&& fn) {
  const double x = std::norm(alpha);
  const double amp = std::sqrt(x);
  const cplx u = amp > 0.0 ? alpha / amp : cplx{1.0, 0.0};
  const cplx u_up = -std::conj(u);
  cplx phase_low{1.0, 0.0};
  cplx phase_up{1.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    double f;
    if (x > 0.0) {
      f = std::exp(0.5 * k * std::log(x) - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
    } else {
      f = (k == 0) ? 1.0 : 0.0;
    }
    double f_prev = 0.0;
    for (int m = 0; m + k < dim; ++m) {
      fn(m + k, m, f * phase_low);
      if (k > 0) fn(m, m + k, f * phase_up);
      const double next =
          ((2.0 * m + 1.0 + k - x) * f -
           std::sqrt(static_cast<double>(m) * (m + k)) * f_prev) /
          std::sqrt((m + 1.0) * (m + 1.0 + k));
      f_prev = f;
      f = next;
    }
    phase_low *= u;
    phase_up *= u_up;
  }
}

}  // namespace detail

inline FockOperator displacement_operator(cplx alpha, int dim) {
  detail::require_dim(dim);
  CMatrix d = CMatrix::Zero(dim, dim);
  detail::for_each_displacement_element(alpha, dim,
                                        [&d](int row, int col, cplx v) { d(row, col) = v; });
  return FockOperator(std::move(d), true);
}

// ---------------------------------------------------------------------------
// States

/// S(r)|vac> with S(r) = exp((r a^2 - r a^dag^2)/2); r > 0 squeezes x, giving
/// Var(x) = e^{-2r}/2.
///
/// c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r)), assembled in log
/// space. Throws TruncationError if more than `tail_tolerance` of the norm
/// lies beyond the cutoff.
inline FockVector squeezed_vacuum(double r, int dim, double tail_tolerance = 1e-8) {
  detail::require_dim(dim);
  CVector v = CVector::Zero(dim);
  const double t = std::tanh(r);
  const double log_norm = -0.5 * std::log(std::cosh(r));
  const double sign_step = t > 0.0 ? -1.0 : 1.0;
  double sign = 1.0;
  v(0) = std::exp(log_norm);
  if (t != 0.0) {
    const double log_t = std::log(std::abs(t));
    for (int k = 1; 2 * k < dim; ++k) {
      sign *= sign_step;
      const double lg = 0.5 * std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) -
                        std::lgamma(k + 1.0) + k * log_t + log_norm;
      v(2 * k) = sign * std::exp(lg);
    }
  }
  const double missing = 1.0 - v.squaredNorm();
  if (missing > tail_tolerance) {
    throw TruncationError("squeezed vacuum r=" + std::to_string(r) +
                          " leaks " + std::to_string(missing) +
                          " of its norm beyond dim=" + std::to_string(dim));
  }
  return FockVector(v / v.norm());
}

/// Coherent state |alpha> from its Poisson series, normalized on the truncation.
inline FockVector coherent_state(cplx alpha, int dim) {
  detail::require_dim(dim);
  CVector v = CVector::Zero(dim);
  const double x = std::norm(alpha);
  const double amp = std::sqrt(x);
  const cplx u = amp > 0.0 ? alpha / amp : cplx{1.0, 0.0};
  cplx phase{1.0, 0.0};
  for (int n = 0; n < dim; ++n) {
    if (n == 0) {
      v(0) = std::exp(-0.5 * x);
    } else if (amp > 0.0) {
      v(n) = phase * std::exp(n * std::log(amp) - 0.5 * x - 0.5 * std::lgamma(n + 1.0));
    }
    phase *= u;
  }
  return FockVector(v / v.norm());
}

// ---------------------------------------------------------------------------
// Expectations

inline cplx expectation(const DensityMatrix& rho, const FockOperator& op) {
  if (rho.dim() != op.dim()) {
    throw InvalidDimension("expectation: dimension mismatch");
  }
  // tr(rho O) = sum_{nm} rho_{nm} O_{mn}
  return rho.elements().cwiseProduct(op.elements().transpose()).sum();
}

/// <psi|rho|psi> for a pure reference state.
inline double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  if (rho.dim() != psi.dim()) throw InvalidDimension("fidelity: dimension mismatch");
  const CVector& v = psi.amplitudes();
  return (v.adjoint() * rho.elements() * v)(0, 0).real() /
         (rho.trace() * v.squaredNorm());
}

/// tr(rho sigma) for normalized inputs.
inline double overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw InvalidDimension("overlap: dimension mismatch");
  return rho.elements().cwiseProduct(sigma.elements().transpose()).sum().real() /
         (rho.trace() * sigma.trace());
}

enum class Quadrature { x, p };

/// Var of the x or p quadrature. Uses a^2, a^dag a products, which are exact
/// on the truncation (unlike squaring the truncated quadrature matrix).
inline double quadrature_variance(const DensityMatrix& rho, Quadrature axis) {
  const int dim = rho.dim();
  const CMatrix a = annihilation(dim).elements();
  const CMatrix a2 = a * a;
  const DensityMatrix r = rho.normalized();
  const cplx ea = expectation(r, FockOperator(a));
  const cplx ea2 = expectation(r, FockOperator(a2));
  const double n = r.mean_photons();
  // x^2 = (a^2 + a^dag^2 + 2n + 1)/2, p^2 = (-a^2 - a^dag^2 + 2n + 1)/2
  const double sgn = axis == Quadrature::x ? 1.0 : -1.0;
  const double second = 0.5 * (sgn * 2.0 * ea2.real() + 2.0 * n + 1.0);
  const double first = axis == Quadrature::x ? std::sqrt(2.0) * ea.real()
                                             : std::sqrt(2.0) * ea.imag();
  return second - first * first;
}

// ---------------------------------------------------------------------------
// Position/momentum representations

/// Normalized Hermite functions h_0(q) ... h_{count-1}(q) written into `out`.
///
/// h_n = q sqrt(2/n) h_{n-1} - sqrt((n-1)/n) h_{n-2}, run on e^{q^2/2}-scaled
/// values with a running exponent so neither the Gaussian nor the polynomial
/// growth leaves double range.
inline void hermite_functions(double q, std::span<double> out) {
  const int count = static_cast<int>(out.size());
  if (count == 0) return;
  constexpr double kRescale = 1e150;
  const double log_rescale = std::log(kRescale);
  const double h0 = std::pow(kPi, -0.25);
  double log_scale = -0.5 * q * q;
  double prev = 0.0;
  double cur = h0;
  out[0] = cur * std::exp(log_scale);
  for (int n = 1; n < count; ++n) {
    const double next = q * std::sqrt(2.0 / n) * cur - std::sqrt((n - 1.0) / n) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += log_rescale;
    }
    out[n] = cur * std::exp(log_scale);
  }
}

inline std::vector<double> hermite_functions(double q, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  hermite_functions(q, std::span<double>(out));
  return out;
}

/// Rows are grid points, columns photon numbers: <p_g|n> = (-i)^n h_n(p_g).
inline CMatrix momentum_basis_table(std::span<const double> grid, int dim) {
  CMatrix table(static_cast<Eigen::Index>(grid.size()), dim);
  std::vector<double> h(static_cast<std::size_t>(dim));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    hermite_functions(grid[g], std::span<double>(h));
    for (int n = 0; n < dim; ++n) {
      table(static_cast<Eigen::Index>(g), n) = detail::minus_i_pow(n) * h[n];
    }
  }
  return table;
}

/// P(q) on `grid` for the chosen quadrature, normalized by tr(rho).
///
/// The p distribution is the diagonal <p|rho|p>. The x distribution reuses
/// the same kernel after rotating rho by exp(i pi n / 2), which maps |x=q>
/// onto |p=q>.
inline std::vector<double> quadrature_distribution(const DensityMatrix& rho,
                                                   Quadrature axis,
                                                   std::span<const double> grid) {
  const int dim = rho.dim();
  if (dim > 1000) throw InvalidDimension("quadrature_distribution supports dim <= 1000");
  const double tr = rho.trace();
  CMatrix r = rho.elements() / tr;
  if (axis == Quadrature::x) {
    for (int n = 0; n < dim; ++n) {
      for (int m = 0; m < dim; ++m) {
        r(n, m) *= std::conj(detail::minus_i_pow(n)) * detail::minus_i_pow(m);
      }
    }
  }
  const CMatrix phi = momentum_basis_table(grid, dim);
  const CMatrix t = phi * r;
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    out[g] = t.row(gi).dot(phi.row(gi)).real();
  }
  return out;
}

/// Wigner function W(x, p) on a tensor grid, returned with rows indexed by x
/// and columns by p. Uses W = tr(rho D(2 alpha) Pi) / pi with
/// alpha = (x + ip)/sqrt(2) and Pi the parity operator.
inline RMatrix wigner(const DensityMatrix& rho, std::span<const double> x_grid,
                      std::span<const double> p_grid) {
  const DensityMatrix r = rho.normalized();
  const int dim = r.effective_dim();
  const CMatrix sub = r.elements().topLeftCorner(dim, dim);
  // rho_{mn} (-1)^m, transposed so the sum pairs with D_{nm}.
  CMatrix weighted = sub.transpose();
  for (int m = 0; m < dim; ++m) {
    if (m % 2 == 1) weighted.col(m) *= -1.0;
  }
  RMatrix w(static_cast<Eigen::Index>(x_grid.size()),
            static_cast<Eigen::Index>(p_grid.size()));
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
      const cplx beta = std::sqrt(2.0) * cplx{x_grid[i], p_grid[j]};
      double acc = 0.0;
      detail::for_each_displacement_element(beta, dim, [&](int row, int col, cplx v) {
        acc += (v * weighted(row, col)).real();
      });
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc / kPi;
    }
  }
  return w;
}

/// Cutoff rule for displaced squeezed states:
/// ceil((alpha_max + 4 e^{r_max})^2 / 2) + 20, clamped to [64, cap].
inline int recommended_dim(double alpha_max, double r_max, int cap = 256) {
  const double reach = std::abs(alpha_max) + 4.0 * std::exp(std::abs(r_max));
  const int raw = static_cast<int>(std::ceil(reach * reach / 2.0)) + 20;
  return std::clamp(raw, std::min(64, cap), cap);
}

}  // namespace gkpcav

#endif  // GKPCAV_FOCK_HPP
