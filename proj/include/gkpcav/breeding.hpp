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

#ifndef GKPCAV_BREEDING_HPP
#define GKPCAV_BREEDING_HPP

// Probabilistic cat breeding: 2^M identical squeezed cats are merged pairwise
// on 50:50 beamsplitters, each time keeping one output conditioned on p = 0 in
// the other. In the momentum representation psi(p, p') = <p|rho|p'> one round
// maps psi(p, p') -> psi(p/sqrt2, p'/sqrt2)^2, so M rounds give
// psi(p / sqrt(2)^M, p' / sqrt(2)^M)^(2^M). The stabilizer expectations only
// need that kernel on two lines:
//   <D(sqrt(2 pi))>   = int psi(p, p) exp(-2i sqrt(pi) p) dp / Z
//   <D(i sqrt(2 pi))> = int psi(p - 2 sqrt(pi), p) dp / Z,   Z = int psi(p, p) dp.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gkpcav/cavity.hpp"
#include "gkpcav/errors.hpp"
#include "gkpcav/fock.hpp"
#include "gkpcav/metrics.hpp"
#include "gkpcav/protocol.hpp"

namespace gkpcav {

/// Uniform grid -p_max ... p_max with spacing close to dp.
struct MomentumGrid {
  double p_max = 10.0;
  double dp = 0.005;

  /// p_max = 2 sqrt(pi) (1 + 2^{M/2}) + 6 e^r, dp = 0.005.
  static MomentumGrid defaults(int rounds, double r) {
    return {2.0 * std::sqrt(kPi) * (1.0 + std::pow(2.0, rounds / 2.0)) + 6.0 * std::exp(r),
            0.005};
  }

  std::vector<double> points() const {
    if (!(p_max > 0.0 && dp > 0.0)) throw InvalidArgument("momentum grid needs p_max, dp > 0");
    const int half = static_cast<int>(std::ceil(p_max / dp));
    const double step = p_max / half;
    std::vector<double> pts(static_cast<std::size_t>(2 * half + 1));
    for (int i = -half; i <= half; ++i) pts[static_cast<std::size_t>(i + half)] = i * step;
    return pts;
  }
};

/// Input kernel sampled on the lines needed after `rounds` rounds:
/// diag[k]    = psi(p_k / s, p_k / s),
/// offdiag[k] = psi((p_k - 2 sqrt(pi)) / s, p_k / s),   s = sqrt(2)^rounds.
struct PWavefunction {
  std::vector<double> grid;
  std::vector<cplx> diag;
  std::vector<cplx> offdiag;
  int rounds = 0;
  std::vector<std::string> warnings;
};

inline PWavefunction fock_to_pkernel(const DensityMatrix& rho, int rounds,
                                     const MomentumGrid& grid) {
  if (rounds < 0) throw InvalidArgument("rounds must be >= 0");
  PWavefunction k;
  k.rounds = rounds;
  k.grid = grid.points();
  if (grid.dp > 0.02) {
    k.warnings.push_back("momentum grid spacing " + std::to_string(grid.dp) +
                         " exceeds 0.02; expectations may be inaccurate");
  }
  const DensityMatrix r = rho.normalized();
  const int dim = r.effective_dim(1e-16);
  const CMatrix sub = r.elements().topLeftCorner(dim, dim);
  const CMatrix herm = 0.5 * (sub + sub.adjoint());

  // rho = sum_j lambda_j |v_j><v_j|; tiny eigenvalues of either sign are dropped.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lam_max = lam.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int j = 0; j < lam.size(); ++j) {
    if (std::abs(lam(j)) > 1e-15 * lam_max) keep.push_back(j);
  }
  CMatrix v(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  }

  const double s = std::pow(std::sqrt(2.0), rounds);
  const double shift = 2.0 * std::sqrt(kPi);
  std::vector<double> pa(k.grid.size());
  std::vector<double> pb(k.grid.size());
  for (std::size_t g = 0; g < k.grid.size(); ++g) {
    pa[g] = k.grid[g] / s;
    pb[g] = (k.grid[g] - shift) / s;
  }
  const CMatrix ua = momentum_basis_table(pa, dim) * v;
  const CMatrix ub = momentum_basis_table(pb, dim) * v;

  k.diag.resize(k.grid.size());
  k.offdiag.resize(k.grid.size());
  for (std::size_t g = 0; g < k.grid.size(); ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    cplx d{0.0, 0.0};
    cplx o{0.0, 0.0};
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const auto ji = static_cast<Eigen::Index>(j);
      const double l = lam(keep[j]);
      d += l * std::norm(ua(gi, ji));
      o += l * ub(gi, ji) * std::conj(ua(gi, ji));
    }
    k.diag[g] = d;
    k.offdiag[g] = o;
  }
  return k;
}

namespace detail {

inline cplx power_of_two(cplx z, int rounds) {
  for (int i = 0; i < rounds; ++i) z *= z;
  return z;
}

inline cplx trapezoid(const std::vector<cplx>& f, double h) {
  if (f.empty()) return {0.0, 0.0};
  cplx acc{0.0, 0.0};
  for (const cplx& v : f) acc += v;
  acc -= 0.5 * (f.front() + f.back());
  return acc * h;
}

}  // namespace detail

struct BreedExpectations {
  cplx dx_expect;  // <D(i sqrt(2 pi))>
  cplx dp_expect;  // <D(sqrt(2 pi))>
  double norm;     // Z after rescaling the kernel to unit peak
};

/// Folds `rounds` breeding rounds into the kernel and evaluates the two
/// stabilizer expectations. The kernel is rescaled to unit peak before the
/// power is taken; the normalization Z absorbs the scale.
inline BreedExpectations breed_expectations(const PWavefunction& kernel, int rounds) {
  if (rounds != kernel.rounds) {
    throw InvalidArgument("kernel was sampled for " + std::to_string(kernel.rounds) +
                          " rounds, asked for " + std::to_string(rounds));
  }
  const std::size_t n = kernel.grid.size();
  if (n < 2) throw InvalidArgument("kernel grid too small");
  const double h = kernel.grid[1] - kernel.grid[0];
  double peak = 0.0;
  for (const cplx& v : kernel.diag) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw NumericalError("kernel diagonal vanishes on the grid");

  std::vector<cplx> diag_out(n);
  std::vector<cplx> diag_phase(n);
  std::vector<cplx> off_out(n);
  const double shift = 2.0 * std::sqrt(kPi);
  for (std::size_t g = 0; g < n; ++g) {
    diag_out[g] = detail::power_of_two(kernel.diag[g] / peak, rounds);
    off_out[g] = detail::power_of_two(kernel.offdiag[g] / peak, rounds);
    diag_phase[g] = diag_out[g] * std::polar(1.0, -shift * kernel.grid[g]);
  }
  const double z = detail::trapezoid(diag_out, h).real();
  if (!(z > 1e-300)) {
    throw NumericalError("breeding normalization underflowed (Z = " + std::to_string(z) + ")");
  }
  return {detail::trapezoid(off_out, h) / z, detail::trapezoid(diag_phase, h) / z, z};
}

struct BreedConfig {
  int rounds = 1;
  double input_squeezing = 0.0;
  double amplitude_scale = 1.0;
  CavityParams cavity = CavityParams::ideal();
  KrausTruncation truncation;
  AtomConfig atom = AtomConfig::plus();
  std::optional<MomentumGrid> grid;
  int dim = 0;  // 0 selects recommended_dim()
  int dim_cap = 256;
  double tail_tolerance = 1e-8;

  /// scale * sqrt(pi) * sqrt(2)^{M-1}
  double cat_amplitude() const {
    return amplitude_scale * std::sqrt(kPi) * std::pow(std::sqrt(2.0), rounds - 1);
  }

  MomentumGrid resolved_grid() const {
    return grid.value_or(MomentumGrid::defaults(rounds, input_squeezing));
  }

  int resolved_dim() const {
    return dim > 0 ? dim : recommended_dim(cat_amplitude(), input_squeezing, dim_cap);
  }

  void validate() const {
    if (rounds < 1) throw ConfigError("breeding needs at least one round");
    if (!(input_squeezing >= 0.0) || !std::isfinite(input_squeezing)) {
      throw ConfigError("input squeezing must be finite and >= 0");
    }
    if (!(amplitude_scale > 0.0) || !std::isfinite(amplitude_scale)) {
      throw ConfigError("amplitude_scale must be positive");
    }
    truncation.validate();
  }
};

struct SqueezedCat {
  DensityMatrix state;
  double probability;
  double amplitude;
};

/// One cavity reflection of D(cat_amplitude) S(r)|vac>. This is the first
/// protocol step with its displacement replaced by the breeding amplitude
/// scale * sqrt(pi) * sqrt(2)^{M-1}, i.e. sqrt(2)^M times the protocol's
/// first-step amplitude sqrt(pi/2).
inline SqueezedCat make_squeezed_cat(const BreedConfig& cfg) {
  cfg.validate();
  const int dim = cfg.resolved_dim();
  const DensityMatrix in =
      DensityMatrix::pure(squeezed_vacuum(cfg.input_squeezing, dim, cfg.tail_tolerance));
  const double alpha = cfg.cat_amplitude();
  const StepOutcome out = displace_and_reflect(in, alpha, cfg.cavity, cfg.atom, cfg.truncation);
  return {out.reflection.state, out.reflection.probability, alpha};
}

/// Normalized [D(alpha) + D(-alpha)] S(r)|vac>.
inline FockVector ideal_squeezed_cat(double alpha, double r, int dim,
                                     double tail_tolerance = 1e-8) {
  const FockVector sq = squeezed_vacuum(r, dim, tail_tolerance);
  const CVector plus = displacement_operator(alpha, dim).elements() * sq.amplitudes();
  const CVector minus = displacement_operator(-alpha, dim).elements() * sq.amplitudes();
  return FockVector(plus + minus).normalized();
}

struct BreedResult {
  SqueezingReport squeezing;
  double cat_probability;
  /// Probability that all 2^M cats were heralded.
  double success_probability;
  double cat_mean_photons;
  int dim;
  std::vector<std::string> warnings;
};

inline BreedResult breed(const BreedConfig& cfg) {
  const SqueezedCat cat = make_squeezed_cat(cfg);
  const PWavefunction kernel = fock_to_pkernel(cat.state, cfg.rounds, cfg.resolved_grid());
  const BreedExpectations ex = breed_expectations(kernel, cfg.rounds);
  BreedResult res;
  res.squeezing = effective_squeezing(ex.dx_expect, ex.dp_expect);
  res.cat_probability = cat.probability;
  res.success_probability = std::pow(cat.probability, std::ldexp(1.0, cfg.rounds));
  res.cat_mean_photons = cat.state.mean_photons();
  res.dim = cat.state.dim();
  res.warnings = kernel.warnings;
  return res;
}

/// Phase-space view of the state produced by `rounds` breeding rounds from
/// copies of `cat`. In the p representation the output kernel is
/// rho_out(p, p') = rho(p/s, p'/s)^{2^M} / Z with s = sqrt(2)^M; Z is found by
/// trapezoidal integration on a lattice of spacing h. rounds = 0 reproduces
/// the cat itself.
class BredState {
 public:
  BredState(const DensityMatrix& cat, int rounds, double h = 0.05) : rounds_(rounds), h_(h) {
    if (rounds < 0 || rounds > 8) throw InvalidArgument("rounds must lie in [0, 8]");
    if (!(h > 0.0)) throw InvalidArgument("lattice spacing must be positive");
    const DensityMatrix r = cat.normalized();
    dim_ = r.effective_dim(1e-16);
    const CMatrix sub = r.elements().topLeftCorner(dim_, dim_);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (sub + sub.adjoint()));
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int j = 0; j < dim_; ++j) {
      if (std::abs(es.eigenvalues()(j)) > 1e-15 * lam_max) keep.push_back(j);
    }
    lambda_.resize(static_cast<Eigen::Index>(keep.size()));
    vecs_.resize(dim_, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      lambda_(static_cast<Eigen::Index>(j)) = es.eigenvalues()(keep[j]);
      vecs_.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
    }
    s_ = std::pow(std::sqrt(2.0), rounds);
    // The output p variance equals the cat's, so 10 standard deviations plus
    // a margin covers the support.
    const double var_p = std::max(quadrature_variance(r, Quadrature::p), 0.05);
    const double mean_p2 = var_p + std::pow(expectation(r, momentum_operator(r.dim())).real(), 2);
    q_max_ = 10.0 * std::sqrt(mean_p2) + 2.0;
    lattice_ = MomentumGrid{q_max_, h_}.points();
    h_ = lattice_[1] - lattice_[0];

    const CMatrix psi = amplitudes(lattice_);
    std::vector<double> diag(lattice_.size());
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      diag[i] = raw(psi, static_cast<Eigen::Index>(i), psi, static_cast<Eigen::Index>(i)).real();
      peak_ = std::max(peak_, diag[i]);
    }
    if (!(peak_ > 0.0)) throw NumericalError("cat has no weight on the momentum lattice");
    z_ = 0.0;
    for (double d : diag) z_ += std::pow(d / peak_, std::ldexp(1.0, rounds_));
    z_ *= h_;
    if (!(z_ > 1e-300)) throw NumericalError("bred state normalization underflowed");
  }

  int rounds() const { return rounds_; }
  double support() const { return q_max_; }

  /// Normalized output kernel rho_out(a, b).
  cplx kernel(double a, double b) const {
    const std::vector<double> pts{a, b};
    const CMatrix psi = amplitudes(pts);
    return powered(raw(psi, 0, psi, 1));
  }

  std::vector<double> quadrature_distribution(Quadrature axis, std::span<const double> grid) const {
    std::vector<double> out(grid.size());
    if (axis == Quadrature::p) {
      const CMatrix psi = amplitudes(grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out[i] = powered(raw(psi, ii, psi, ii)).real();
      }
      return out;
    }
    // P(x) = (1/2 pi) sum_ij rho_out(q_i, q_j) e^{i x (q_i - q_j)} h^2.
    const auto n = static_cast<Eigen::Index>(lattice_.size());
    const CMatrix psi = amplitudes(lattice_);
    CMatrix rho(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        rho(i, j) = powered(raw(psi, i, psi, j));
        rho(j, i) = std::conj(rho(i, j));
      }
    }
    CVector u(n);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (Eigen::Index i = 0; i < n; ++i) u(i) = std::polar(1.0, grid[g] * lattice_[static_cast<std::size_t>(i)]);
      out[g] = (u.adjoint() * rho * u)(0, 0).real() * h_ * h_ / (2.0 * kPi);
    }
    return out;
  }

  /// W(x, p) = (1/pi) int rho_out(p + y, p - y) e^{2 i x y} dy, indexed [x][p].
  RMatrix wigner(std::span<const double> x_grid, std::span<const double> p_grid) const {
    RMatrix w(static_cast<Eigen::Index>(x_grid.size()), static_cast<Eigen::Index>(p_grid.size()));
    const int t_max = static_cast<int>(std::ceil(q_max_ / h_));
    const auto nt = static_cast<std::size_t>(2 * t_max + 1);
    std::vector<double> pts(nt);
    std::vector<cplx> k(nt);
    for (std::size_t jp = 0; jp < p_grid.size(); ++jp) {
      for (int t = -t_max; t <= t_max; ++t) pts[static_cast<std::size_t>(t + t_max)] = p_grid[jp] + t * h_;
      const CMatrix psi = amplitudes(pts);
      for (int t = -t_max; t <= t_max; ++t) {
        k[static_cast<std::size_t>(t + t_max)] =
            powered(raw(psi, t + t_max, psi, -t + t_max));
      }
      for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
        cplx acc{0.0, 0.0};
        for (int t = -t_max; t <= t_max; ++t) {
          acc += k[static_cast<std::size_t>(t + t_max)] * std::polar(1.0, 2.0 * x_grid[ix] * t * h_);
        }
        w(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(jp)) = acc.real() * h_ / kPi;
      }
    }
    return w;
  }

 private:
  // Rows: points; columns: eigenvector amplitudes psi_k(q / s).
  CMatrix amplitudes(std::span<const double> pts) const {
    std::vector<double> scaled(pts.begin(), pts.end());
    for (double& q : scaled) q /= s_;
    return momentum_basis_table(scaled, dim_) * vecs_;
  }

  cplx raw(const CMatrix& pa, Eigen::Index ia, const CMatrix& pb, Eigen::Index ib) const {
    cplx acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < lambda_.size(); ++j) acc += lambda_(j) * pa(ia, j) * std::conj(pb(ib, j));
    return acc;
  }

  cplx powered(cplx v) const { return detail::power_of_two(v / peak_, rounds_) / z_; }

  int rounds_;
  double h_;
  int dim_ = 0;
  double s_ = 1.0;
  double q_max_ = 0.0;
  double peak_ = 0.0;
  double z_ = 1.0;
  std::vector<double> lattice_;
  Eigen::VectorXd lambda_;
  CMatrix vecs_;
};

}  // namespace gkpcav

#endif  // GKPCAV_BREEDING_HPP
