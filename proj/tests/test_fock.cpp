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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gkpcav/errors.hpp"
#include "gkpcav/fock.hpp"

namespace gkpcav {
namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double q = lo; q <= hi + 1e-12; q += step) g.push_back(q);
  return g;
}

DensityMatrix random_state(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = cplx(n(rng), n(rng));
  }
  CMatrix r = a * a.adjoint();
  return DensityMatrix(r / r.trace().real());
}

TEST(Annihilation, DimensionOneIsZero) {
  EXPECT_EQ(annihilation(1).elements()(0, 0), cplx(0.0));
}

TEST(Annihilation, DimensionThreeEntries) {
  const CMatrix a = annihilation(3).elements();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double expect = 0.0;
      if (i == 0 && j == 1) expect = 1.0;
      if (i == 1 && j == 2) expect = std::sqrt(2.0);
      EXPECT_DOUBLE_EQ(a(i, j).real(), expect);
      EXPECT_DOUBLE_EQ(a(i, j).imag(), 0.0);
    }
  }
}

TEST(Annihilation, CanonicalCommutatorBelowCutoff) {
  const CMatrix a = annihilation(50).elements();
  const CMatrix c = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < 49; ++n) {
    for (int m = 0; m < 49; ++m) {
      EXPECT_NEAR(std::abs(c(n, m) - (n == m ? 1.0 : 0.0)), 0.0, 1e-12);
    }
  }
}

TEST(Annihilation, RejectsBadDimension) {
  EXPECT_THROW(annihilation(0), InvalidDimension);
}

TEST(Displacement, ZeroIsIdentity) {
  const CMatrix d = displacement_operator(0.0, 30).elements();
  EXPECT_LT((d - CMatrix::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Displacement, VacuumColumnIsCoherentSeries) {
  const CMatrix d = displacement_operator(2.0, 40).elements();
  for (int n = 0; n < 40; ++n) {
    const double expect = std::exp(-2.0 + n * std::log(2.0) - 0.5 * std::lgamma(n + 1.0));
    EXPECT_NEAR(std::abs(d(n, 0) - expect), 0.0, 1e-12) << "n=" << n;
  }
}

TEST(Displacement, InverseProduct) {
  const CMatrix p = (displacement_operator(1.5, 60) * displacement_operator(-1.5, 60)).elements();
  // Compare on the block where truncation does not bite.
  EXPECT_LT((p.topLeftCorner(30, 30) - CMatrix::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Displacement, MatchesMatrixExponentialOnLowBlock) {
  const cplx alpha(1.5, 0.7);
  const int big = 160;
  const CMatrix a = annihilation(big).elements();
  const CMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const CMatrix ref = gen.exp();
  const CMatrix d = displacement_operator(alpha, 60).elements();
  EXPECT_LT((d.topLeftCorner(40, 40) - ref.topLeftCorner(40, 40)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Displacement, LargeAmplitudeElementsStayFinite) {
  const CMatrix d = displacement_operator(cplx(9.0, -4.0), 256).elements();
  EXPECT_TRUE(d.allFinite());
  // Columns far below the cutoff are normalized.
  EXPECT_NEAR(d.col(0).norm(), 1.0, 1e-10);
}

TEST(Displacement, UnitaryOnWellTruncatedBlock) {
  const CMatrix d = displacement_operator(cplx(0.8, 0.3), 80).elements();
  const CMatrix u = d * d.adjoint();
  EXPECT_LT((u.topLeftCorner(40, 40) - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SqueezedVacuum, ZeroSqueezingIsVacuum) {
  const FockVector v = squeezed_vacuum(0.0, 20);
  EXPECT_EQ(v[0], cplx(1.0));
  for (int n = 1; n < 20; ++n) EXPECT_EQ(v[n], cplx(0.0));
}

TEST(SqueezedVacuum, TenDbVarianceInX) {
  const double r = 1.15;
  const DensityMatrix rho = DensityMatrix::pure(squeezed_vacuum(r, 100));
  EXPECT_NEAR(quadrature_variance(rho, Quadrature::x), std::exp(-2.0 * r) / 2.0, 1e-6);
  EXPECT_NEAR(quadrature_variance(rho, Quadrature::p), std::exp(2.0 * r) / 2.0, 1e-4);
}

TEST(SqueezedVacuum, OddAmplitudesVanish) {
  for (double r : {0.1, 0.7, 1.3}) {
    const FockVector v = squeezed_vacuum(r, 120);
    for (int n = 1; n < 120; n += 2) EXPECT_EQ(v[n], cplx(0.0));
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  }
}

TEST(SqueezedVacuum, ThrowsWhenCutoffTooSmall) {
  EXPECT_THROW(squeezed_vacuum(1.5, 20), TruncationError);
}

TEST(Expectation, VacuumNumberIsZero) {
  const DensityMatrix vac = DensityMatrix::pure(FockVector::basis(0, 10));
  EXPECT_EQ(expectation(vac, number_operator(10)), cplx(0.0));
}

TEST(Expectation, VacuumStabilizerOverlap) {
  const DensityMatrix vac = DensityMatrix::pure(FockVector::basis(0, 80));
  const cplx beta(0.0, std::sqrt(2.0 * kPi));
  const cplx v = expectation(vac, displacement_operator(beta, 80));
  EXPECT_NEAR(v.real(), std::exp(-kPi), 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(Expectation, MaximallyMixedNumber) {
  EXPECT_NEAR(expectation(DensityMatrix::maximally_mixed(10), number_operator(10)).real(), 4.5, 1e-12);
}

TEST(DensityMatrixTest, RandomStatesArePhysical) {
  const DensityMatrix rho = random_state(12, 3);
  EXPECT_NO_THROW(rho.check_physical());
  EXPECT_LT(rho.hermiticity_error(), 1e-12);
  EXPECT_GT(rho.min_eigenvalue(), -1e-12);
}

TEST(DensityMatrixTest, NonHermitianRejected) {
  CMatrix m = CMatrix::Identity(3, 3) / 3.0;
  m(0, 1) = cplx(0.2, 0.0);
  EXPECT_THROW(DensityMatrix(m).check_physical(), NumericalError);
}

TEST(FockVectorTest, TailDiagnostic) {
  CVector amps = CVector::Zero(4);
  amps(0) = 1.0;
  amps(3) = 1e-3;
  const FockVector v = FockVector(amps).normalized();
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_NEAR(v.tail_weight(), 1e-6 / (1.0 + 1e-6), 1e-15);
  EXPECT_TRUE(v.well_truncated(1e-5));
  EXPECT_FALSE(v.well_truncated(1e-7));
}

TEST(QuadratureDistribution, VacuumGaussian) {
  const DensityMatrix vac = DensityMatrix::pure(FockVector::basis(0, 20));
  const auto q = grid(-5, 5, 0.05);
  for (Quadrature axis : {Quadrature::x, Quadrature::p}) {
    const auto p = quadrature_distribution(vac, axis, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      EXPECT_NEAR(p[i], std::exp(-q[i] * q[i]) / std::sqrt(kPi), 1e-10);
    }
  }
}

TEST(QuadratureDistribution, FirstFockStateHermiteShape) {
  const DensityMatrix one = DensityMatrix::pure(FockVector::basis(1, 20));
  const auto q = grid(-5, 5, 0.05);
  for (Quadrature axis : {Quadrature::x, Quadrature::p}) {
    const auto p = quadrature_distribution(one, axis, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      EXPECT_NEAR(p[i], 2.0 * q[i] * q[i] * std::exp(-q[i] * q[i]) / std::sqrt(kPi), 1e-10);
    }
  }
}

TEST(QuadratureDistribution, SqueezedVacuumVariance) {
  const double r = 0.5;
  const DensityMatrix rho = DensityMatrix::pure(squeezed_vacuum(r, 80));
  const auto q = grid(-6, 6, 0.01);
  const auto p = quadrature_distribution(rho, Quadrature::x, q);
  const double var = std::exp(-2.0 * r) / 2.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double g = std::exp(-q[i] * q[i] / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
    EXPECT_NEAR(p[i], g, 1e-8);
  }
}

TEST(QuadratureDistribution, NonNegativeForPhysicalStates) {
  const DensityMatrix rho = random_state(15, 11);
  const auto q = grid(-6, 6, 0.1);
  for (Quadrature axis : {Quadrature::x, Quadrature::p}) {
    for (double v : quadrature_distribution(rho, axis, q)) EXPECT_GE(v, -1e-12);
  }
}

TEST(QuadratureDistribution, MeanPhotonBasisConsistency) {
  for (const DensityMatrix& rho :
       {random_state(20, 5), DensityMatrix::pure(coherent_state(cplx(1.0, 0.5), 40)),
        DensityMatrix::pure(squeezed_vacuum(0.6, 60))}) {
    const auto q = grid(-14, 14, 0.01);
    const auto px = quadrature_distribution(rho, Quadrature::x, q);
    const auto pp = quadrature_distribution(rho, Quadrature::p, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) acc += q[i] * q[i] * (px[i] + pp[i]) * 0.01;
    EXPECT_NEAR(acc / 2.0 - 0.5, rho.mean_photons(), 1e-6);
  }
}

TEST(QuadratureDistribution, CoherentStateCentre) {
  // D(alpha)|0> is centred at x = sqrt(2) Re(alpha), p = sqrt(2) Im(alpha).
  const cplx alpha(1.2, -0.4);
  const DensityMatrix rho = DensityMatrix::pure(coherent_state(alpha, 50));
  const auto q = grid(-8, 8, 0.01);
  for (auto [axis, centre] : {std::pair{Quadrature::x, std::sqrt(2.0) * alpha.real()},
                              std::pair{Quadrature::p, std::sqrt(2.0) * alpha.imag()}}) {
    const auto p = quadrature_distribution(rho, axis, q);
    double mean = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) mean += q[i] * p[i] * 0.01;
    EXPECT_NEAR(mean, centre, 1e-8);
  }
}

TEST(Hermite, HighOrdersStayFinite) {
  for (double q : {0.0, 3.0, 20.0, 45.0}) {
    const auto h = hermite_functions(q, 1000);
    for (double v : h) EXPECT_TRUE(std::isfinite(v));
  }
  // h_{2k}(0) = (-1)^k pi^{-1/4} sqrt((2k)!) / (2^k k!)
  const auto h = hermite_functions(0.0, 231);
  for (int k = 0; 2 * k <= 230; ++k) {
    const double log_mag = -0.25 * std::log(kPi) + 0.5 * std::lgamma(2 * k + 1.0) -
                           k * std::log(2.0) - std::lgamma(k + 1.0);
    const double expect = (k % 2 ? -1.0 : 1.0) * std::exp(log_mag);
    EXPECT_NEAR(h[static_cast<std::size_t>(2 * k)], expect, 1e-12);
  }
}

TEST(Wigner, VacuumPeak) {
  const DensityMatrix vac = DensityMatrix::pure(FockVector::basis(0, 10));
  const std::vector<double> z{0.0};
  EXPECT_NEAR(wigner(vac, z, z)(0, 0), 1.0 / kPi, 1e-6);
}

TEST(Wigner, FirstFockStateNegativeAtOrigin) {
  const DensityMatrix one = DensityMatrix::pure(FockVector::basis(1, 10));
  const std::vector<double> z{0.0};
  EXPECT_NEAR(wigner(one, z, z)(0, 0), -1.0 / kPi, 1e-6);
}

TEST(Wigner, CatIsSymmetricInP) {
  const int dim = 50;
  const CVector v = displacement_operator(2.0, dim).elements().col(0) +
                    displacement_operator(-2.0, dim).elements().col(0);
  const DensityMatrix cat = DensityMatrix::pure(FockVector(v).normalized());
  const auto xs = grid(-4, 4, 0.5);
  const auto ps = grid(-3, 3, 0.25);
  const RMatrix w = wigner(cat, xs, ps);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      EXPECT_NEAR(w(i, j), w(i, w.cols() - 1 - j), 1e-10);
    }
  }
}

TEST(Wigner, IntegratesToOneAndMatchesMarginal) {
  const DensityMatrix rho = DensityMatrix::pure(coherent_state(cplx(0.5, 0.5), 30));
  const auto xs = grid(-6, 6, 0.1);
  const auto ps = grid(-6, 6, 0.1);
  const RMatrix w = wigner(rho, xs, ps);
  EXPECT_NEAR(w.sum() * 0.01, 1.0, 1e-6);
  const auto px = quadrature_distribution(rho, Quadrature::x, xs);
  for (Eigen::Index i = 0; i < w.rows(); i += 10) {
    EXPECT_NEAR(w.row(i).sum() * 0.1, px[static_cast<std::size_t>(i)], 1e-6);
  }
}

TEST(RecommendedDim, ClampedRule) {
  EXPECT_EQ(recommended_dim(0.0, 0.0), 64);
  EXPECT_EQ(recommended_dim(50.0, 2.0), 256);
  const double reach = 3.0 + 4.0 * std::exp(1.0);
  EXPECT_EQ(recommended_dim(3.0, 1.0), static_cast<int>(std::ceil(reach * reach / 2.0)) + 20);
}

}  // namespace
}  // namespace gkpcav
