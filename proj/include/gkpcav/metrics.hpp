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

#ifndef GKPCAV_METRICS_HPP
#define GKPCAV_METRICS_HPP

// Effective squeezing of grid states and the ideal states they are compared to.
//
//   Delta_x = sqrt(ln(1/|<D(i sqrt(2 pi))>|^2) / (2 pi))
//   Delta_p = sqrt(ln(1/|<D(sqrt(2 pi))>|^2) / (2 pi))
//   Delta_dB = -10 log10(Delta^2)

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "gkpcav/errors.hpp"
#include "gkpcav/fock.hpp"

namespace gkpcav {

/// Stabilizer displacement lengths: D(sqrt(2 pi)) shifts x, D(i sqrt(2 pi)) shifts p.
inline const cplx kStabilizerP{std::sqrt(2.0 * kPi), 0.0};
inline const cplx kStabilizerX{0.0, std::sqrt(2.0 * kPi)};

struct SqueezingReport {
  double delta_x = 0.0;
  double delta_p = 0.0;
  double db_x = 0.0;
  double db_p = 0.0;
  double min_db = 0.0;
  cplx dx_expect;  // <D(i sqrt(2 pi))>
  cplx dp_expect;  // <D(sqrt(2 pi))>
};

inline double delta_from_expectation(cplx expect) {
  const double mag = std::abs(expect);
  if (mag >= 1.0 - 1e-12) return 0.0;
  if (mag == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(1.0 / (mag * mag)) / (2.0 * kPi));
}

inline double delta_to_db(double delta) {
  if (delta == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(delta)) return -std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(delta * delta);
}

inline double db_to_delta(double db) { return std::pow(10.0, -db / 20.0); }

/// Report from precomputed stabilizer expectations (also used by breeding).
inline SqueezingReport effective_squeezing(cplx dx_expect, cplx dp_expect) {
  SqueezingReport rep;
  rep.dx_expect = dx_expect;
  rep.dp_expect = dp_expect;
  rep.delta_x = delta_from_expectation(dx_expect);
  rep.delta_p = delta_from_expectation(dp_expect);
  rep.db_x = delta_to_db(rep.delta_x);
  rep.db_p = delta_to_db(rep.delta_p);
  rep.min_db = std::min(rep.db_x, rep.db_p);
  return rep;
}

/// tr(rho D(beta)) using the exact truncated displacement elements.
inline cplx displacement_expectation(const DensityMatrix& rho, cplx beta) {
  return expectation(rho, displacement_operator(beta, rho.dim())) / rho.trace();
}

inline SqueezingReport effective_squeezing(const DensityMatrix& rho) {
  return effective_squeezing(displacement_expectation(rho, kStabilizerX),
                             displacement_expectation(rho, kStabilizerP));
}

/// Peak amplitudes c_s of sum_s c_s D(sqrt(pi/2) s) S(r)|vac>.
class PeakWeights {
 public:
  enum class Parity { even, odd };

  /// Coefficients keyed by lattice index s; normalized on construction.
  explicit PeakWeights(std::map<int, cplx> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) throw InvalidArgument("PeakWeights needs at least one peak");
    const bool first_odd = (c_.begin()->first % 2) != 0;
    double norm2 = 0.0;
    for (const auto& [s, v] : c_) {
      if (((s % 2) != 0) != first_odd) {
        throw InvalidArgument("PeakWeights support mixes even and odd s");
      }
      norm2 += std::norm(v);
    }
    if (!(norm2 > 0.0)) throw InvalidArgument("PeakWeights are all zero");
    for (auto& [s, v] : c_) v /= std::sqrt(norm2);
    parity_ = first_odd ? Parity::odd : Parity::even;
  }

  /// n_peaks equal amplitudes at s = -(n-1), -(n-3), ..., n-1.
  static PeakWeights equal(int n_peaks) {
    if (n_peaks < 1) throw InvalidArgument("n_peaks must be >= 1");
    std::map<int, cplx> c;
    for (int j = 0; j < n_peaks; ++j) c[-(n_peaks - 1) + 2 * j] = 1.0;
    return PeakWeights(std::move(c));
  }

  /// Inner half of the peaks weighted a, outer half b; n_peaks a multiple of 4.
  static PeakWeights two_level(int n_peaks, double a, double b) {
    if (n_peaks < 4 || n_peaks % 4 != 0) {
      throw InvalidArgument("two-level weighting needs n_peaks = 4, 8, 16, ...");
    }
    std::map<int, cplx> c;
    const int quarter = n_peaks / 4;
    for (int j = 0; j < n_peaks; ++j) {
      const bool outer = j < quarter || j >= n_peaks - quarter;
      c[-(n_peaks - 1) + 2 * j] = outer ? b : a;
    }
    return PeakWeights(std::move(c));
  }

  /// 2^rounds + 1 peaks with amplitudes binom(2^rounds, j) at even s.
  static PeakWeights binomial(int rounds) {
    if (rounds < 0 || rounds > 20) throw InvalidArgument("binomial rounds out of range");
    const int n = 1 << rounds;
    std::map<int, cplx> c;
    for (int j = 0; j <= n; ++j) {
      const double lb = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
      c[-n + 2 * j] = std::exp(lb - std::lgamma(n / 2 + 1.0));
    }
    return PeakWeights(std::move(c));
  }

  const std::map<int, cplx>& coefficients() const { return c_; }
  Parity parity() const { return parity_; }
  int size() const { return static_cast<int>(c_.size()); }
  int max_abs_index() const {
    return std::max(std::abs(c_.begin()->first), std::abs(c_.rbegin()->first));
  }

 private:
  std::map<int, cplx> c_;
  Parity parity_ = Parity::even;
};

/// Re sum_s conj(c_s) c_{s+2}: <D(sqrt(2 pi))> when neighbouring peaks do not overlap.
inline double analytic_Dp(const PeakWeights& weights) {
  const auto& c = weights.coefficients();
  cplx acc{0.0, 0.0};
  for (const auto& [s, v] : c) {
    const auto it = c.find(s + 2);
    if (it != c.end()) acc += std::conj(v) * it->second;
  }
  return acc.real();
}

/// Normalized sum_s c_s D(sqrt(pi/2) s) S(r)|vac>.
inline FockVector ideal_gkp_state(const PeakWeights& weights, double r, int dim,
                                  double tail_tolerance = 1e-8) {
  const FockVector sq = squeezed_vacuum(r, dim, tail_tolerance);
  CVector acc = CVector::Zero(dim);
  const double step = std::sqrt(kPi / 2.0);
  for (const auto& [s, c] : weights.coefficients()) {
    if (s == 0) {
      acc += c * sq.amplitudes();
    } else {
      acc += c * (displacement_operator(step * s, dim).elements() * sq.amplitudes());
    }
  }
  FockVector out = FockVector(acc).normalized();
  if (!out.well_truncated(tail_tolerance)) {
    throw TruncationError("ideal GKP state leaks through the cutoff dim=" + std::to_string(dim));
  }
  return out;
}

/// Two-level envelope (a, b) maximizing analytic_Dp:
/// a = sqrt(1/2 + 1/sqrt(20)), b = sqrt(1/2 - 1/sqrt(20)).
inline std::pair<double, double> optimal_two_level() {
  const double d = 1.0 / std::sqrt(20.0);
  return {std::sqrt(0.5 + d), std::sqrt(0.5 - d)};
}

/// Closed forms for n_peaks peaks: equal/binomial (n-1)/n, optimal two-level
/// (n - (3 - sqrt 5))/n.
inline double equal_weight_Dp(int n_peaks) { return (n_peaks - 1.0) / n_peaks; }
inline double two_level_Dp(int n_peaks) {
  return (n_peaks - (3.0 - std::sqrt(5.0))) / n_peaks;
}

}  // namespace gkpcav

#endif  // GKPCAV_METRICS_HPP
