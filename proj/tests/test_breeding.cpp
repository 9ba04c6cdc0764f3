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
#include <vector>

#include "gkpcav/breeding.hpp"
#include "gkpcav/errors.hpp"
#include "gkpcav/metrics.hpp"
#include "gkpcav/verify/oracles.hpp"

namespace gkpcav {
namespace {

double db_from_dp(double dp) { return delta_to_db(delta_from_expectation(cplx{dp, 0.0})); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

double trapezoid(const std::vector<double>& f, double h) {
  double acc = 0.0;
  for (double v : f) acc += v;
  return (acc - 0.5 * (f.front() + f.back())) * h;
}

BreedExpectations breed_ideal_cat(int rounds, double r, double dp = 0.005) {
  BreedConfig cfg;
  cfg.rounds = rounds;
  cfg.input_squeezing = r;
  cfg.dim_cap = 512;
  const FockVector cat = ideal_squeezed_cat(cfg.cat_amplitude(), r, cfg.resolved_dim());
  MomentumGrid grid = cfg.resolved_grid();
  grid.dp = dp;
  return breed_expectations(fock_to_pkernel(DensityMatrix::pure(cat), rounds, grid), rounds);
}

TEST(PKernel, VacuumDiagonalAndShiftedLine) {
  const PWavefunction k = fock_to_pkernel(DensityMatrix::pure(FockVector::basis(0, 8)), 0,
                                          MomentumGrid{6.0, 0.01});
  const double c = 2.0 * std::sqrt(kPi);
  for (std::size_t g = 0; g < k.grid.size(); g += 37) {
    const double p = k.grid[g];
    EXPECT_NEAR(k.diag[g].real(), std::exp(-p * p) / std::sqrt(kPi), 1e-13);
    EXPECT_NEAR(std::abs(k.diag[g].imag()), 0.0, 1e-15);
    const double q = p - c;
    EXPECT_NEAR(std::abs(k.offdiag[g] - std::exp(-(q * q + p * p) / 2.0) / std::sqrt(kPi)), 0.0, 1e-13);
  }
}

TEST(PKernel, SinglePhotonDiagonal) {
  const PWavefunction k = fock_to_pkernel(DensityMatrix::pure(FockVector::basis(1, 8)), 0,
                                          MomentumGrid{6.0, 0.01});
  for (std::size_t g = 0; g < k.grid.size(); g += 41) {
    const double p = k.grid[g];
    EXPECT_NEAR(k.diag[g].real(), 2.0 * p * p * std::exp(-p * p) / std::sqrt(kPi), 1e-13);
  }
}

TEST(PKernel, RescalingForRounds) {
  const DensityMatrix vac = DensityMatrix::pure(FockVector::basis(0, 8));
  const PWavefunction k = fock_to_pkernel(vac, 2, MomentumGrid{6.0, 0.01});
  for (std::size_t g = 0; g < k.grid.size(); g += 53) {
    const double p = k.grid[g] / 2.0;
    EXPECT_NEAR(k.diag[g].real(), std::exp(-p * p) / std::sqrt(kPi), 1e-13);
  }
}

TEST(PKernel, CoarseGridWarns) {
  const PWavefunction k = fock_to_pkernel(DensityMatrix::pure(FockVector::basis(0, 4)), 0,
                                          MomentumGrid{6.0, 0.05});
  EXPECT_EQ(k.warnings.size(), 1u);
  EXPECT_THROW(fock_to_pkernel(DensityMatrix::pure(FockVector::basis(0, 4)), -1, MomentumGrid{}),
               InvalidArgument);
}

TEST(BreedExpectationsTest, ZeroRoundsReproducesFockExpectations) {
  const BreedExpectations vac = breed_expectations(
      fock_to_pkernel(DensityMatrix::pure(FockVector::basis(0, 8)), 0, MomentumGrid{10.0, 0.005}), 0);
  EXPECT_NEAR(std::abs(vac.dp_expect - std::exp(-kPi)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(vac.dx_expect - std::exp(-kPi)), 0.0, 1e-12);

  const DensityMatrix cat = DensityMatrix::pure(ideal_squeezed_cat(2.0, 0.7, 80));
  const SqueezingReport fock = effective_squeezing(cat);
  const BreedExpectations ex =
      breed_expectations(fock_to_pkernel(cat, 0, MomentumGrid{16.0, 0.005}), 0);
  EXPECT_NEAR(std::abs(ex.dp_expect - fock.dp_expect), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(ex.dx_expect - fock.dx_expect), 0.0, 1e-9);
}

TEST(BreedExpectationsTest, RoundMismatchThrows) {
  const PWavefunction k = fock_to_pkernel(DensityMatrix::pure(FockVector::basis(0, 4)), 1,
                                          MomentumGrid{6.0, 0.01});
  EXPECT_THROW(breed_expectations(k, 2), InvalidArgument);
}

TEST(BreedExpectationsTest, OneRoundMatchesFockOracle) {
  for (double r : {0.6, 0.8}) {
    const double alpha = std::sqrt(kPi);
    const DensityMatrix cat = DensityMatrix::pure(ideal_squeezed_cat(alpha, r, 64));
    const SqueezingReport oracle = effective_squeezing(verify::breed_once_fock(cat));
    const BreedExpectations ex = breed_expectations(
        fock_to_pkernel(cat, 1, MomentumGrid::defaults(1, r)), 1);
    EXPECT_NEAR(std::abs(ex.dp_expect - oracle.dp_expect), 0.0, 1e-8) << "r=" << r;
    EXPECT_NEAR(std::abs(ex.dx_expect - oracle.dx_expect), 0.0, 1e-8) << "r=" << r;
  }
}

TEST(BreedExpectationsTest, IdealCatsGiveBinomialEnvelope) {
  for (int m = 1; m <= 3; ++m) {
    const BreedExpectations ex = breed_ideal_cat(m, 1.5);
    const double db = effective_squeezing(ex.dx_expect, ex.dp_expect).db_p;
    EXPECT_NEAR(db, db_from_dp(analytic_Dp(PeakWeights::binomial(m))), 0.1) << "M=" << m;
  }
}

TEST(BreedExpectationsTest, InputSqueezingSetsDeltaX) {
  const BreedExpectations ex = breed_ideal_cat(2, 1.15);
  const SqueezingReport rep = effective_squeezing(ex.dx_expect, ex.dp_expect);
  EXPECT_NEAR(rep.db_x, 10.0, 0.05);
  EXPECT_LE(std::abs(ex.dx_expect), 1.0 + 1e-12);
  EXPECT_LE(std::abs(ex.dp_expect), 1.0 + 1e-12);
}

TEST(BreedExpectationsTest, GridConverged) {
  const BreedExpectations a = breed_ideal_cat(2, 1.0, 0.005);
  const BreedExpectations b = breed_ideal_cat(2, 1.0, 0.0025);
  EXPECT_LT(std::abs(a.dp_expect - b.dp_expect), 1e-7);
  EXPECT_LT(std::abs(a.dx_expect - b.dx_expect), 1e-7);
}

TEST(SqueezedCatTest, IdealCavityGivesEvenCat) {
  BreedConfig cfg;
  cfg.rounds = 1;
  cfg.input_squeezing = 1.0;
  const SqueezedCat cat = make_squeezed_cat(cfg);
  EXPECT_NEAR(cat.amplitude, std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(cat.probability, 0.5, 1e-6);
  EXPECT_GT(fidelity(cat.state, ideal_squeezed_cat(cat.amplitude, 1.0, cat.state.dim())), 0.999);
}

TEST(SqueezedCatTest, NoCouplingGivesDisplacedSqueezedState) {
  BreedConfig cfg;
  cfg.rounds = 2;
  cfg.input_squeezing = 0.7;
  cfg.cavity = CavityParams::from_c_eta(0.0, 0.0);
  const SqueezedCat cat = make_squeezed_cat(cfg);
  const int dim = cat.state.dim();
  EXPECT_NEAR(cat.probability, 1.0, 1e-12);
  const CVector target = displacement_operator(cat.amplitude, dim).elements() *
                         squeezed_vacuum(0.7, dim).amplitudes();
  EXPECT_GT(fidelity(cat.state, FockVector(target)), 1.0 - 1e-9);
}

TEST(SqueezedCatTest, Validation) {
  BreedConfig cfg;
  cfg.rounds = 0;
  EXPECT_THROW(make_squeezed_cat(cfg), ConfigError);
  cfg.rounds = 1;
  cfg.amplitude_scale = 0.0;
  EXPECT_THROW(make_squeezed_cat(cfg), ConfigError);
}

TEST(BreedTest, SuccessProbabilityCountsEveryCat) {
  BreedConfig cfg;
  cfg.rounds = 2;
  cfg.input_squeezing = 0.8;
  cfg.cavity = CavityParams::from_c0_eta(500.0, 0.95);
  const BreedResult res = breed(cfg);
  EXPECT_NEAR(res.success_probability, std::pow(res.cat_probability, 4.0), 1e-15);
  EXPECT_TRUE(res.warnings.empty());
  EXPECT_GT(res.squeezing.db_p, 0.0);
}

TEST(BredStateTest, ZeroRoundsMatchesFockPhaseSpace) {
  const DensityMatrix cat = DensityMatrix::pure(ideal_squeezed_cat(1.8, 0.6, 60));
  const BredState bred(cat, 0);
  const std::vector<double> q = linspace(-5.0, 5.0, 41);
  const auto px = bred.quadrature_distribution(Quadrature::x, q);
  const auto pp = bred.quadrature_distribution(Quadrature::p, q);
  const auto fx = quadrature_distribution(cat, Quadrature::x, q);
  const auto fp = quadrature_distribution(cat, Quadrature::p, q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(px[i], fx[i], 1e-8) << q[i];
    EXPECT_NEAR(pp[i], fp[i], 1e-8) << q[i];
  }
  const std::vector<double> xs = linspace(-4.0, 4.0, 9);
  const std::vector<double> ps = linspace(-3.0, 3.0, 7);
  const RMatrix wb = bred.wigner(xs, ps);
  const RMatrix wf = wigner(cat, xs, ps);
  EXPECT_LT((wb - wf).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BredStateTest, OneRoundMatchesFockOracle) {
  const DensityMatrix cat = DensityMatrix::pure(ideal_squeezed_cat(std::sqrt(kPi), 0.7, 40));
  const DensityMatrix oracle = verify::breed_once_fock(cat);
  const BredState bred(cat, 1);
  const std::vector<double> q = linspace(-6.0, 6.0, 49);
  const auto px = bred.quadrature_distribution(Quadrature::x, q);
  const auto pp = bred.quadrature_distribution(Quadrature::p, q);
  const auto fx = quadrature_distribution(oracle, Quadrature::x, q);
  const auto fp = quadrature_distribution(oracle, Quadrature::p, q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(px[i], fx[i], 1e-7) << q[i];
    EXPECT_NEAR(pp[i], fp[i], 1e-7) << q[i];
  }
}

TEST(BredStateTest, MarginalsNormalized) {
  BreedConfig cfg;
  cfg.rounds = 2;
  cfg.input_squeezing = 0.9;
  cfg.cavity = CavityParams::from_c0_eta(1000.0, 0.97);
  const BredState bred(make_squeezed_cat(cfg).state, 2);
  const std::vector<double> q = linspace(-14.0, 14.0, 1401);
  const double h = q[1] - q[0];
  EXPECT_NEAR(trapezoid(bred.quadrature_distribution(Quadrature::x, q), h), 1.0, 1e-4);
  EXPECT_NEAR(trapezoid(bred.quadrature_distribution(Quadrature::p, q), h), 1.0, 1e-4);
  EXPECT_NEAR(std::abs(bred.kernel(0.3, -0.2) - std::conj(bred.kernel(-0.2, 0.3))), 0.0, 1e-12);
  EXPECT_THROW(BredState(make_squeezed_cat(cfg).state, 9), InvalidArgument);
}

}  // namespace
}  // namespace gkpcav
