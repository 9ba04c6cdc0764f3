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

#ifndef GKPCAV_CAVITY_HPP
#define GKPCAV_CAVITY_HPP

// Reflection of a field mode off a single-sided cavity holding a three-level
// emitter, treated as a Kraus channel on the field conditioned on the emitter
// being prepared in a|0> + b|1> and projected onto <m| afterwards.
//
// On resonance, with cooperativity C and escape efficiency eta, the input
// field splits per emitter branch as
//   |0>:  a_in -> r0 a_out + t0 a_l,
//   |1>:  a_in -> r1 a_out + t1 a_l + Gamma a_gamma,
// and losing (m_l, m_gamma) photons to (cavity loss, emitter scattering) gives
//   K = delta_{m_gamma,0} (t0/r0)^{m_l} a^{m_l}/sqrt(m_l!) r0^n (x) |0><0|
//     + (t1/r1)^{m_l} (Gamma/r1)^{m_gamma} a^{m_l+m_gamma}/sqrt(m_l! m_gamma!) r1^n (x) |1><1|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "gkpcav/errors.hpp"
#include "gkpcav/fock.hpp"

namespace gkpcav {

/// Cavity described by cooperativity C and escape efficiency eta;
/// the internal cooperativity C0 = C / (1 - eta) >= C.
class CavityParams {
 public:
  static CavityParams from_c_eta(double cooperativity, double escape_efficiency) {
    if (!(cooperativity >= 0.0) || !std::isfinite(cooperativity)) {
      throw InvalidArgument("cooperativity must be finite and >= 0");
    }
    if (!(escape_efficiency >= 0.0 && escape_efficiency <= 1.0)) {
      throw InvalidArgument("escape efficiency must lie in [0, 1]");
    }
    return CavityParams(cooperativity, escape_efficiency);
  }

  static CavityParams from_c0_eta(double internal_cooperativity, double escape_efficiency) {
    if (!(internal_cooperativity >= 0.0) || !std::isfinite(internal_cooperativity)) {
      throw InvalidArgument("internal cooperativity must be finite and >= 0");
    }
    if (!(escape_efficiency >= 0.0 && escape_efficiency < 1.0)) {
      throw InvalidArgument("escape efficiency must lie in [0, 1) when fixing C0");
    }
    return CavityParams(internal_cooperativity * (1.0 - escape_efficiency),
                        escape_efficiency);
  }

  /// Stand-in for the lossless, infinitely strong limit: C = 1e9, eta = 1.
  static CavityParams ideal() { return CavityParams(1e9, 1.0); }

  double cooperativity() const { return c_; }
  double escape_efficiency() const { return eta_; }
  double internal_cooperativity() const {
    return eta_ >= 1.0 ? std::numeric_limits<double>::infinity() : c_ / (1.0 - eta_);
  }

 private:
  CavityParams(double c, double eta) : c_(c), eta_(eta) {}
  double c_;
  double eta_;
};

struct ReflectionCoefficients {
  double r0;
  double t0;
  double r1;
  double t1;
  cplx gamma;  // purely imaginary
};

inline ReflectionCoefficients reflection_coefficients(const CavityParams& params) {
  const double c = params.cooperativity();
  const double eta = params.escape_efficiency();
  const double denom = 2.0 * c + 1.0;
  const double leak = std::sqrt(eta * (1.0 - eta));
  ReflectionCoefficients k{};
  k.r0 = 1.0 - 2.0 * eta;
  k.t0 = -2.0 * leak;
  k.r1 = (2.0 * c + 1.0 - 2.0 * eta) / denom;
  k.t1 = -2.0 * leak / denom;
  k.gamma = cplx{0.0, -2.0 * std::sqrt(2.0 * eta * c) / denom};
  return k;
}

/// Emitter preparation a|0> + b|1> and the projection <m| = (m0, m1)^dag
/// applied after the reflection. Both pairs are normalized at construction.
class AtomConfig {
 public:
  AtomConfig(cplx prep_a, cplx prep_b, cplx m0, cplx m1)
      : a_(prep_a), b_(prep_b), m0_(m0), m1_(m1) {
    constexpr double kTol = 1e-10;
    if (std::abs(std::norm(a_) + std::norm(b_) - 1.0) > kTol) {
      throw InvalidArgument("atom preparation must satisfy |a|^2 + |b|^2 = 1");
    }
    if (std::abs(std::norm(m0_) + std::norm(m1_) - 1.0) > kTol) {
      throw InvalidArgument("atom measurement must satisfy |m0|^2 + |m1|^2 = 1");
    }
  }

  /// |+> preparation, <+| projection.
  static AtomConfig plus() {
    const double h = 1.0 / std::sqrt(2.0);
    return AtomConfig(h, h, h, h);
  }

  /// Unequal preparation a|0> + b|1>, real a, b with a^2 + b^2 = 1, <+| projection.
  static AtomConfig weighted(double a, double b) {
    const double h = 1.0 / std::sqrt(2.0);
    return AtomConfig(a, b, h, h);
  }

  /// Same preparation, projection onto the state orthogonal to <m|.
  AtomConfig complementary_outcome() const {
    return AtomConfig(a_, b_, -std::conj(m1_), std::conj(m0_));
  }

  cplx prep_a() const { return a_; }
  cplx prep_b() const { return b_; }
  cplx m0() const { return m0_; }
  cplx m1() const { return m1_; }

  /// Field weight of the |0> and |1> branches: a conj(m0), b conj(m1).
  cplx branch0_weight() const { return a_ * std::conj(m0_); }
  cplx branch1_weight() const { return b_ * std::conj(m1_); }

 private:
  cplx a_;
  cplx b_;
  cplx m0_;
  cplx m1_;
};

struct KrausTruncation {
  double trace_tolerance = 1e-9;
  int max_ml = 40;
  int max_mgamma = 40;

  void validate() const {
    if (!(trace_tolerance > 0.0 && trace_tolerance < 1.0)) {
      throw InvalidArgument("trace_tolerance must lie in (0, 1)");
    }
    if (max_ml < 1 || max_mgamma < 1) {
      throw InvalidArgument("Kraus index caps must be >= 1");
    }
  }
};

namespace detail {

// log|base^e| and the sign/phase of base^e, with 0^0 = 1.
struct PowerTerm {
  double log_mag;
  double sign;
};

inline PowerTerm real_power(double base, int e) {
  if (e == 0) return {0.0, 1.0};
  if (base == 0.0) return {-std::numeric_limits<double>::infinity(), 1.0};
  return {e * std::log(std::abs(base)), (base < 0.0 && (e % 2 == 1)) ? -1.0 : 1.0};
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Band of the |0>-branch operator for m_l = k lost photons:
//   <n-k|A_k|n> = t0^k r0^{n-k} sqrt(binom(n, k)).
inline std::vector<double> branch0_band(const ReflectionCoefficients& c, int k, int dim) {
  std::vector<double> band(static_cast<std::size_t>(std::max(dim - k, 0)), 0.0);
  const PowerTerm tk = real_power(c.t0, k);
  for (int n = k; n < dim; ++n) {
    const PowerTerm rk = real_power(c.r0, n - k);
    const double lg = tk.log_mag + rk.log_mag + 0.5 * log_binomial(n, k);
    band[static_cast<std::size_t>(n - k)] = tk.sign * rk.sign * std::exp(lg);
  }
  return band;
}

// Shape shared by every |1>-branch operator with k = m_l + m_gamma lost photons:
//   s_n = r1^{n-k} sqrt(n! / (n-k)!).
// The full element is t1^{m_l} Gamma^{m_gamma} / sqrt(m_l! m_gamma!) * s_n; the
// prefactor is returned separately as (log magnitude, phase).
inline std::vector<double> branch1_shape_log(const ReflectionCoefficients& c, int k, int dim,
                                             std::vector<double>& signs) {
  const auto len = static_cast<std::size_t>(std::max(dim - k, 0));
  std::vector<double> log_mag(len);
  signs.assign(len, 1.0);
  for (int n = k; n < dim; ++n) {
    const PowerTerm rk = real_power(c.r1, n - k);
    log_mag[static_cast<std::size_t>(n - k)] =
        rk.log_mag + 0.5 * (std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0));
    signs[static_cast<std::size_t>(n - k)] = rk.sign;
  }
  return log_mag;
}

inline void branch1_prefactor(const ReflectionCoefficients& c, int m_l, int m_gamma,
                              double& log_mag, cplx& phase) {
  const PowerTerm tl = real_power(c.t1, m_l);
  const double g = std::abs(c.gamma);
  double lg_gamma = 0.0;
  cplx ph{tl.sign, 0.0};
  if (m_gamma > 0) {
    if (g == 0.0) {
      lg_gamma = -std::numeric_limits<double>::infinity();
    } else {
      lg_gamma = m_gamma * std::log(g);
      ph *= std::pow(c.gamma / g, m_gamma);
    }
  }
  log_mag = tl.log_mag + lg_gamma - 0.5 * (std::lgamma(m_l + 1.0) + std::lgamma(m_gamma + 1.0));
  phase = ph;
}

// Band E_{j, j+k} of the conditioned Kraus operator, j = 0 .. dim-k-1.
inline CVector kraus_band(const ReflectionCoefficients& c, const AtomConfig& atom,
                          int m_l, int m_gamma, int dim) {
  const int k = m_l + m_gamma;
  CVector band = CVector::Zero(std::max(dim - k, 0));
  if (k >= dim) return band;
  const cplx w0 = atom.branch0_weight();
  const cplx w1 = atom.branch1_weight();
  if (m_gamma == 0 && w0 != cplx{0.0, 0.0}) {
    const std::vector<double> a = branch0_band(c, k, dim);
    for (int j = 0; j < dim - k; ++j) band(j) += w0 * a[static_cast<std::size_t>(j)];
  }
  if (w1 != cplx{0.0, 0.0}) {
    double pre_log = 0.0;
    cplx pre_phase;
    branch1_prefactor(c, m_l, m_gamma, pre_log, pre_phase);
    if (std::isfinite(pre_log)) {
      std::vector<double> signs;
      const std::vector<double> shape = branch1_shape_log(c, k, dim, signs);
      for (int j = 0; j < dim - k; ++j) {
        const auto js = static_cast<std::size_t>(j);
        band(j) += w1 * pre_phase * (signs[js] * std::exp(pre_log + shape[js]));
      }
    }
  }
  return band;
}

// out_{ij} += weight * e_i conj(e_j) rho_{i+k, j+k}
inline void accumulate_band(CMatrix& out, const CMatrix& rho, const CVector& e, int k,
                            double weight = 1.0) {
  const int len = static_cast<int>(e.size());
  for (int j = 0; j < len; ++j) {
    const cplx ej = weight * std::conj(e(j));
    if (ej == cplx{0.0, 0.0}) continue;
    for (int i = 0; i < len; ++i) {
      out(i, j) += e(i) * rho(i + k, j + k) * ej;
    }
  }
}

}  // namespace detail

/// Field operator E = a conj(m0) A_{m_l,m_gamma} + b conj(m1) B_{m_l,m_gamma}
/// for one pair of lost-photon counts. Elements are assembled in log space,
/// so r0 = 0 (eta = 1/2) is handled without 0/0.
inline FockOperator field_kraus_element(const ReflectionCoefficients& coeffs,
                                        const AtomConfig& atom, int m_l, int m_gamma,
                                        int dim, const KrausTruncation& trunc = {}) {
  detail::require_dim(dim);
  if (m_l < 0 || m_gamma < 0) throw InvalidArgument("Kraus indices must be >= 0");
  if (m_l > trunc.max_ml || m_gamma > trunc.max_mgamma) {
    throw TruncationError("Kraus index (" + std::to_string(m_l) + ", " +
                          std::to_string(m_gamma) + ") exceeds caps (" +
                          std::to_string(trunc.max_ml) + ", " +
                          std::to_string(trunc.max_mgamma) + ")");
  }
  const int k = m_l + m_gamma;
  CMatrix e = CMatrix::Zero(dim, dim);
  const CVector band = detail::kraus_band(coeffs, atom, m_l, m_gamma, dim);
  for (int j = 0; j < band.size(); ++j) e(j, j + k) = band(j);
  return FockOperator(std::move(e));
}

struct ReflectionResult {
  DensityMatrix state;          // normalized conditional state
  double probability;           // heralding probability of the projection
  int max_lost_photons;         // largest m_l + m_gamma included
  double truncation_bound;      // upper bound on the discarded probability
  double mean_photons_in;       // photon number hitting the cavity
};

/// Sum over (m_l, m_gamma) of E rho E^dag for the emitter outcome in `atom`.
///
/// Terms are visited by total loss k = m_l + m_gamma. All terms with
/// m_gamma >= 1 at fixed k act only through the |1> branch and share one
/// band shape, so they are accumulated together with their summed weight.
/// The sweep stops once a rigorous bound on the remaining probability
/// (each branch is separately trace preserving) drops below
/// `trace_tolerance`; if the index caps are hit first, TruncationError.
inline ReflectionResult apply_reflection(const DensityMatrix& rho, const CavityParams& params,
                                         const AtomConfig& atom,
                                         const KrausTruncation& trunc = {}) {
  trunc.validate();
  const int dim = rho.dim();
  const ReflectionCoefficients c = reflection_coefficients(params);
  const CMatrix& in = rho.elements();
  const double tr_in = rho.trace();
  const double w0 = std::norm(atom.branch0_weight());
  const double w1 = std::norm(atom.branch1_weight());

  std::vector<double> pop(static_cast<std::size_t>(dim));
  for (int n = 0; n < dim; ++n) pop[static_cast<std::size_t>(n)] = in(n, n).real();

  CMatrix out = CMatrix::Zero(dim, dim);
  double acc0 = 0.0;  // tr(A rho A^dag) summed so far
  double acc1 = 0.0;  // tr(B rho B^dag) summed so far
  double bound = 2.0 * (w0 + w1) * tr_in;
  int k_done = -1;
  const int k_max = std::min(dim - 1, trunc.max_ml + trunc.max_mgamma);

  for (int k = 0; k <= k_max && bound >= trunc.trace_tolerance; ++k) {
    // Coherent term m_l = k, m_gamma = 0 (both branches).
    if (k <= trunc.max_ml) {
      const CVector e = detail::kraus_band(c, atom, k, 0, dim);
      detail::accumulate_band(out, in, e, k);
      const std::vector<double> a = detail::branch0_band(c, k, dim);
      for (int n = k; n < dim; ++n) {
        const double v = a[static_cast<std::size_t>(n - k)];
        acc0 += v * v * pop[static_cast<std::size_t>(n)];
      }
    }
    // |1>-branch shape for this k, and its probability bookkeeping.
    std::vector<double> signs;
    const std::vector<double> shape = detail::branch1_shape_log(c, k, dim, signs);
    double weight_all = 0.0;   // sum over included (m_l, m_gamma) of |prefactor|^2
    double weight_scat = 0.0;  // same, restricted to m_gamma >= 1
    for (int mg = 0; mg <= std::min(k, trunc.max_mgamma); ++mg) {
      const int ml = k - mg;
      if (ml > trunc.max_ml) continue;
      double lg = 0.0;
      cplx ph;
      detail::branch1_prefactor(c, ml, mg, lg, ph);
      const double w = std::exp(2.0 * lg);
      weight_all += w;
      if (mg >= 1) weight_scat += w;
    }
    if (weight_all > 0.0) {
      for (int n = k; n < dim; ++n) {
        const auto j = static_cast<std::size_t>(n - k);
        acc1 += weight_all * std::exp(2.0 * shape[j]) * pop[static_cast<std::size_t>(n)];
      }
    }
    if (weight_scat > 0.0 && w1 > 0.0) {
      CVector s(dim - k);
      for (int j = 0; j < dim - k; ++j) {
        const auto js = static_cast<std::size_t>(j);
        s(j) = signs[js] * std::exp(shape[js]);
      }
      detail::accumulate_band(out, in, s, k, w1 * weight_scat);
    }
    bound = 2.0 * (w0 * std::max(tr_in - acc0, 0.0) + w1 * std::max(tr_in - acc1, 0.0));
    k_done = k;
  }
  if (bound >= trunc.trace_tolerance) {
    throw TruncationError("Kraus sum not converged after m_l + m_gamma = " +
                          std::to_string(k_done) + " (remaining probability bound " +
                          std::to_string(bound) + ", caps " +
                          std::to_string(trunc.max_ml) + "/" +
                          std::to_string(trunc.max_mgamma) + ")");
  }
  const double prob = out.trace().real() / tr_in;
  if (!(prob >= 1e-12)) {
    throw PostselectionError("heralding probability " + std::to_string(prob) +
                             " below 1e-12");
  }
  CMatrix normalized = out / out.trace().real();
  return ReflectionResult{DensityMatrix(std::move(normalized)), prob, k_done, bound,
                          rho.mean_photons()};
}

}  // namespace gkpcav

#endif  // GKPCAV_CAVITY_HPP
