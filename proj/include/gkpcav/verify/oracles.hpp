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

#ifndef GKPCAV_VERIFY_ORACLES_HPP
#define GKPCAV_VERIFY_ORACLES_HPP

// Brute-force reference computations used to cross-check the production
// code paths. They share no numerical kernels with the code they check except
// the displacement matrix, which has its own matrix-exponential test.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "gkpcav/fock.hpp"

namespace gkpcav::verify {

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// <p = 0 | m> for m < count, with <p|m> = (-i)^m h_m(p). Uses
/// h_m(0) = -sqrt((m-1)/m) h_{m-2}(0), h_0(0) = pi^{-1/4}.
inline std::vector<cplx> momentum_zero_overlaps(int count) {
  std::vector<double> h(static_cast<std::size_t>(count), 0.0);
  if (count > 0) h[0] = std::pow(kPi, -0.25);
  for (int m = 2; m < count; m += 2) {
    h[static_cast<std::size_t>(m)] = -std::sqrt((m - 1.0) / m) * h[static_cast<std::size_t>(m - 2)];
  }
  std::vector<cplx> out(static_cast<std::size_t>(count));
  const cplx phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (int m = 0; m < count; ++m) {
    out[static_cast<std::size_t>(m)] = phases[m % 4] * h[static_cast<std::size_t>(m)];
  }
  return out;
}

/// Two copies of rho meet on a balanced beamsplitter exp(pi/4 (a^dag b - a b^dag));
/// mode b is projected onto p = 0. Returns the normalized state of mode a in a
/// Fock space of dimension 2 dim - 1, which holds every output exactly.
inline DensityMatrix breed_once_fock(const DensityMatrix& rho, double eig_cutoff = 1e-14) {
  const int d = rho.dim();
  const int dout = 2 * d - 1;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.elements());
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  std::vector<int> keep;
  for (int k = 0; k < d; ++k) {
    if (vals(k) > eig_cutoff) keep.push_back(k);
  }

  // Block unitaries for total photon number n_tot: basis |j, n_tot - j>.
  std::vector<RMatrix> blocks(static_cast<std::size_t>(dout));
  for (int nt = 0; nt < dout; ++nt) {
    RMatrix g = RMatrix::Zero(nt + 1, nt + 1);
    for (int j = 0; j < nt; ++j) {
      // a^dag b |j, nt-j> = sqrt((j+1)(nt-j)) |j+1, nt-j-1>
      const double v = std::sqrt((j + 1.0) * (nt - j));
      g(j + 1, j) += v;
      g(j, j + 1) -= v;
    }
    blocks[static_cast<std::size_t>(nt)] = (0.25 * kPi * g).exp();
  }
  const std::vector<cplx> p0 = momentum_zero_overlaps(dout);

  CMatrix out = CMatrix::Zero(dout, dout);
  CVector in_block, out_block;
  for (int k : keep) {
    for (int l : keep) {
      CVector phi = CVector::Zero(dout);
      for (int nt = 0; nt < dout; ++nt) {
        in_block = CVector::Zero(nt + 1);
        bool any = false;
        for (int j = std::max(0, nt - d + 1); j <= std::min(nt, d - 1); ++j) {
          in_block(j) = vecs(j, k) * vecs(nt - j, l);
          any = true;
        }
        if (!any) continue;
        out_block = blocks[static_cast<std::size_t>(nt)].cast<cplx>() * in_block;
        for (int j = 0; j <= nt; ++j) phi(j) += p0[static_cast<std::size_t>(nt - j)] * out_block(j);
      }
      out += (vals(k) * vals(l)) * (phi * phi.adjoint());
    }
  }
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw NumericalError("oracle breeding output has zero norm");
  return DensityMatrix(out / tr);
}

}  // namespace gkpcav::verify

#endif  // GKPCAV_VERIFY_ORACLES_HPP
