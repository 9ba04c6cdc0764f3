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

#ifndef GKPCAV_PROTOCOL_HPP
#define GKPCAV_PROTOCOL_HPP

// Cavity-only grid-state generation: starting from S(r)|vac>, step n applies
// D(scale * 2^{n-1} sqrt(pi/2)) followed by one reflection with the emitter
// heralded in the configured outcome. Each ideal step doubles the number of
// squeezed peaks along x.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gkpcav/cavity.hpp"
#include "gkpcav/errors.hpp"
#include "gkpcav/fock.hpp"
#include "gkpcav/metrics.hpp"

namespace gkpcav {

/// Correction applied to the "-" branch of the first step when it is made
/// deterministic.
enum class FeedForward {
  /// D(i sqrt(pi) / (2 sqrt 2)), matched to the unit-scale first step.
  nominal,
  /// D(i pi / (4 alpha_1)), which restores the "+" relative phase for the
  /// actual first-step amplitude alpha_1.
  phase_matched,
};

struct ProtocolConfig {
  int steps = 1;
  double input_squeezing = 0.0;
  double displacement_scale = 1.0;
  std::vector<AtomConfig> atoms;
  bool deterministic_first_step = false;
  FeedForward feed_forward = FeedForward::nominal;
  CavityParams cavity = CavityParams::ideal();
  KrausTruncation truncation;
  int dim = 0;  // 0 selects recommended_dim()
  int dim_cap = 256;
  double tail_tolerance = 1e-8;

  /// Every step |+> prepared and <+| heralded.
  static ProtocolConfig equal_weighting(int steps, double r,
                                        CavityParams cavity = CavityParams::ideal()) {
    ProtocolConfig cfg;
    cfg.steps = steps;
    cfg.input_squeezing = r;
    cfg.cavity = cavity;
    cfg.atoms.assign(static_cast<std::size_t>(std::max(steps, 0)), AtomConfig::plus());
    return cfg;
  }

  void validate() const {
    if (steps < 1) throw ConfigError("protocol needs at least one step");
    if (!(input_squeezing >= 0.0) || !std::isfinite(input_squeezing)) {
      throw ConfigError("input squeezing must be finite and >= 0");
    }
    if (!(displacement_scale >= 0.5 && displacement_scale <= 2.0)) {
      throw ConfigError("displacement_scale must lie in [0.5, 2]");
    }
    if (static_cast<int>(atoms.size()) != steps) {
      throw ConfigError("need one AtomConfig per step: got " + std::to_string(atoms.size()) +
                        " for " + std::to_string(steps) + " steps");
    }
    truncation.validate();
  }

  int resolved_dim() const {
    if (dim > 0) return dim;
    const double reach = displacement_scale * (std::ldexp(1.0, steps) - 1.0) *
                         std::sqrt(kPi / 2.0);
    return recommended_dim(reach, input_squeezing, dim_cap);
  }
};

struct ProtocolResult {
  DensityMatrix state;
  double success_probability;
  SqueezingReport squeezing;
  double mean_photons;
  int dim;
  /// Largest population found on the last Fock level along the way.
  double max_tail_weight;
  /// Probability lost through the cutoff by the displacements (summed).
  double displacement_leakage;
  /// Heralding probability of each step on the "+" branch.
  std::vector<double> step_probabilities;
  /// tr(rho_+ rho_-corrected) after the first step; NaN unless the
  /// deterministic first step was used.
  double feed_forward_overlap = std::numeric_limits<double>::quiet_NaN();
  /// -10 log10(2 Var(x)); filled by squeeze_from_vacuum only.
  double quadrature_squeezing_db = std::numeric_limits<double>::quiet_NaN();
};

/// Amplitude of the step-n displacement (n counted from 1).
inline double step_displacement(int n, double scale = 1.0) {
  return scale * std::ldexp(1.0, n - 1) * std::sqrt(kPi / 2.0);
}

struct StepOutcome {
  ReflectionResult reflection;
  double leakage;  // 1 - tr(D rho D^dag) for normalized rho
};

/// Displace then reflect once, heralding the outcome encoded in `atom`.
inline StepOutcome displace_and_reflect(const DensityMatrix& rho, cplx alpha,
                                        const CavityParams& cavity, const AtomConfig& atom,
                                        const KrausTruncation& trunc) {
  DensityMatrix moved = rho;
  double leakage = 0.0;
  if (alpha != cplx{0.0, 0.0}) {
    moved = displacement_operator(alpha, rho.dim()).conjugate(rho);
    leakage = std::max(0.0, 1.0 - moved.trace() / rho.trace());
    moved = moved.normalized();
  }
  return {apply_reflection(moved, cavity, atom, trunc), leakage};
}

namespace detail {

template <typename Fn>
auto annotate_step(int step, Fn&& fn) -> decltype(fn()) {
  const std::string where = "step " + std::to_string(step) + ": ";
  try {
    return fn();
  } catch (const TruncationError& e) {
    throw TruncationError(where + e.what());
  } catch (const PostselectionError& e) {
    throw PostselectionError(where + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  }
}

struct Branch {
  DensityMatrix state;
  double probability;
};

}  // namespace detail

/// Runs the displacement/reflection sequence. With deterministic_first_step,
/// both first-step outcomes are kept: the "-" branch is corrected by the
/// feed-forward displacement, both branches continue, and the result is their
/// probability-weighted mixture.
inline ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  const int dim = cfg.resolved_dim();
  const FockVector input = squeezed_vacuum(cfg.input_squeezing, dim, cfg.tail_tolerance);
  DensityMatrix rho0 = DensityMatrix::pure(input);

  double max_tail = rho0.tail_weight();
  double leakage = 0.0;
  std::vector<double> step_probs;
  double ff_overlap = std::numeric_limits<double>::quiet_NaN();

  std::vector<detail::Branch> branches;
  {
    const cplx alpha1 = step_displacement(1, cfg.displacement_scale);
    const AtomConfig& atom = cfg.atoms.front();
    const StepOutcome plus = detail::annotate_step(1, [&] {
      return displace_and_reflect(rho0, alpha1, cfg.cavity, atom, cfg.truncation);
    });
    leakage += plus.leakage;
    step_probs.push_back(plus.reflection.probability);
    max_tail = std::max(max_tail, plus.reflection.state.tail_weight());
    branches.push_back({plus.reflection.state, plus.reflection.probability});
    if (cfg.deterministic_first_step) {
      const StepOutcome minus = detail::annotate_step(1, [&] {
        return displace_and_reflect(rho0, alpha1, cfg.cavity, atom.complementary_outcome(),
                                    cfg.truncation);
      });
      const double beta = cfg.feed_forward == FeedForward::nominal
                              ? std::sqrt(kPi) / (2.0 * std::sqrt(2.0))
                              : kPi / (4.0 * std::abs(alpha1));
      DensityMatrix corrected =
          displacement_operator(cplx{0.0, beta}, dim).conjugate(minus.reflection.state);
      leakage += std::max(0.0, 1.0 - corrected.trace());
      corrected = corrected.normalized();
      ff_overlap = overlap(plus.reflection.state, corrected);
      branches.push_back({std::move(corrected), minus.reflection.probability});
    }
  }

  for (int n = 2; n <= cfg.steps; ++n) {
    const cplx alpha = step_displacement(n, cfg.displacement_scale);
    const AtomConfig& atom = cfg.atoms[static_cast<std::size_t>(n - 1)];
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const StepOutcome out = detail::annotate_step(n, [&] {
        return displace_and_reflect(branches[b].state, alpha, cfg.cavity, atom, cfg.truncation);
      });
      leakage += out.leakage;
      if (b == 0) step_probs.push_back(out.reflection.probability);
      max_tail = std::max(max_tail, out.reflection.state.tail_weight());
      branches[b].probability *= out.reflection.probability;
      branches[b].state = out.reflection.state;
    }
  }

  double total = 0.0;
  CMatrix mix = CMatrix::Zero(dim, dim);
  for (const auto& br : branches) {
    total += br.probability;
    mix += br.probability * br.state.elements();
  }
  DensityMatrix state(mix / total);
  SqueezingReport rep = effective_squeezing(state);
  const double photons = state.mean_photons();
  return ProtocolResult{std::move(state), total, rep, photons, dim,
                        max_tail, leakage, std::move(step_probs), ff_overlap};
}

/// Equal weighting everywhere except the second-to-last step, whose emitter
/// is prepared in a|0> + b|1> with the optimal two-level amplitudes. Every
/// step heralds <+|.
inline std::vector<AtomConfig> two_level_weighting_config(int steps) {
  if (steps < 2) {
    throw ConfigError("two-level weighting needs at least two steps (no second-to-last step)");
  }
  std::vector<AtomConfig> atoms(static_cast<std::size_t>(steps), AtomConfig::plus());
  const auto [a, b] = optimal_two_level();
  atoms[static_cast<std::size_t>(steps - 2)] = AtomConfig::weighted(a, b);
  return atoms;
}

/// Vacuum input with displacements i * 2^{n-1} * p_displacement along p,
/// approximating a superposition of coherent states on the p axis, which is
/// squeezed in x. Reports -10 log10(2 Var(x)) in quadrature_squeezing_db.
inline ProtocolResult squeeze_from_vacuum(int steps, const CavityParams& cavity,
                                          double p_displacement,
                                          const KrausTruncation& trunc = {}, int dim = 0,
                                          int dim_cap = 256) {
  if (steps < 1) throw ConfigError("squeeze_from_vacuum needs at least one step");
  if (!(p_displacement >= 0.0) || !std::isfinite(p_displacement)) {
    throw ConfigError("p_displacement must be finite and >= 0");
  }
  const int d = dim > 0 ? dim
                        : recommended_dim((std::ldexp(1.0, steps) - 1.0) * p_displacement,
                                          0.0, dim_cap);
  DensityMatrix rho = DensityMatrix::pure(FockVector::basis(0, d));
  double prob = 1.0;
  double leakage = 0.0;
  double max_tail = 0.0;
  std::vector<double> step_probs;
  for (int n = 1; n <= steps; ++n) {
    const cplx alpha{0.0, std::ldexp(1.0, n - 1) * p_displacement};
    const StepOutcome out = detail::annotate_step(n, [&] {
      return displace_and_reflect(rho, alpha, cavity, AtomConfig::plus(), trunc);
    });
    leakage += out.leakage;
    prob *= out.reflection.probability;
    step_probs.push_back(out.reflection.probability);
    max_tail = std::max(max_tail, out.reflection.state.tail_weight());
    rho = out.reflection.state;
  }
  const SqueezingReport rep = effective_squeezing(rho);
  const double var_x = quadrature_variance(rho, Quadrature::x);
  const double photons = rho.mean_photons();
  ProtocolResult res{std::move(rho), prob, rep, photons, d, max_tail, leakage,
                     std::move(step_probs)};
  res.quadrature_squeezing_db = -10.0 * std::log10(2.0 * var_x);
  return res;
}

}  // namespace gkpcav

#endif  // GKPCAV_PROTOCOL_HPP
