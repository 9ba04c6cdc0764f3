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

#ifndef GKPCAV_OPTIMIZE_HPP
#define GKPCAV_OPTIMIZE_HPP

// Derivative-free search over cavity and input settings at fixed internal
// cooperativity C0: a seeded Latin-hypercube scan (about two thirds of the
// evaluation budget) followed by Nelder-Mead refinement from the best scan
// point. The escape efficiency is searched in -log(1 - eta), which spreads the
// high-efficiency region where optima sit at large C0.

#include <algorithm>
#include <array>
#include <cstring>
#include <numbers>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gkpcav/breeding.hpp"
#include "gkpcav/cavity.hpp"
#include "gkpcav/errors.hpp"
#include "gkpcav/metrics.hpp"
#include "gkpcav/protocol.hpp"

namespace gkpcav {

enum class ProtocolKind { cavity, breeding, vacuum_squeezing };

inline const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::cavity: return "cavity";
    case ProtocolKind::breeding: return "breeding";
    case ProtocolKind::vacuum_squeezing: return "vacuum_squeezing";
  }
  return "unknown";
}

/// Protocol family plus its order: reflections N (cavity, vacuum_squeezing)
/// or breeding rounds M.
struct ProtocolChoice {
  ProtocolKind kind = ProtocolKind::cavity;
  int order = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate() const { return lo == hi; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// One point in parameter space. Fields irrelevant to a protocol are ignored.
struct Candidate {
  double eta = 0.95;
  double r = 1.0;
  double scale = 1.0;
  double atom_a = 1.0 / std::numbers::sqrt2;
  double p_displacement = 0.5;
};

struct SearchSpace {
  Interval eta{0.5, 0.9995};
  Interval r{0.4, 1.8};
  Interval scale{0.9, 1.15};
  Interval atom_a{1.0 / std::numbers::sqrt2, 0.95};
  Interval p_displacement{0.05, 1.5};
  bool optimize_eta = true;
  bool optimize_r = true;
  bool optimize_scale = false;
  bool optimize_atom = false;
  bool optimize_p_displacement = true;
  /// Values used for inactive dimensions. eta, r and p_displacement are
  /// clamped into their intervals.
  Candidate nominal{};

  void validate() const {
    auto check = [](const Interval& iv, double lo, double hi, bool lo_open, bool hi_open,
                    const char* name) {
      const bool ok_lo = lo_open ? iv.lo > lo : iv.lo >= lo;
      const bool ok_hi = hi_open ? iv.hi < hi : iv.hi <= hi;
      if (!(iv.lo <= iv.hi) || !ok_lo || !ok_hi) {
        throw ConfigError(std::string("search interval '") + name + "' is empty or out of bounds");
      }
    };
    check(eta, 0.0, 1.0, true, true, "eta");
    check(r, 0.0, 2.0, false, false, "r");
    check(scale, 0.5, 2.0, false, false, "scale");
    check(atom_a, 0.0, 1.0, false, false, "atom_a");
    check(p_displacement, 0.0, 10.0, false, false, "p_displacement");
  }
};

struct Evaluation {
  std::size_t index = 0;
  Candidate params;
  bool ok = false;
  std::string error;
  double objective = -std::numeric_limits<double>::infinity();
  SqueezingReport squeezing;
  double quadrature_db = std::numeric_limits<double>::quiet_NaN();
  double success_probability = 0.0;
  double mean_photons = 0.0;
  int dim = 0;
};

struct OptimizerSettings {
  int budget = 300;
  std::uint64_t seed = 1;
  int dim_cap = 256;
  double scan_fraction = 2.0 / 3.0;
  KrausTruncation truncation{1e-9, 256, 256};
  std::optional<MomentumGrid> breeding_grid;
};

struct PointResult {
  double c0 = 0.0;
  ProtocolChoice protocol;
  bool ok = false;
  std::string error;
  Evaluation best;
  double cooperativity = 0.0;  // implied C = C0 (1 - eta) at the optimum
  std::vector<Evaluation> log;
};

/// Cavity at internal cooperativity c0 (infinite c0 selects the ideal cavity).
inline CavityParams cavity_at(double c0, double eta) {
  if (std::isinf(c0)) return CavityParams::ideal();
  return CavityParams::from_c0_eta(c0, eta);
}

/// Runs one protocol instance and scores it. Objective: min(dB_x, dB_p) for
/// grid states, quadrature squeezing in dB for vacuum_squeezing. Library
/// errors are captured in the record, not thrown.
inline Evaluation evaluate(double c0, const ProtocolChoice& protocol, const Candidate& cand,
                           const OptimizerSettings& settings) {
  Evaluation ev;
  ev.params = cand;
  try {
    const CavityParams cavity = cavity_at(c0, cand.eta);
    switch (protocol.kind) {
      case ProtocolKind::cavity: {
        ProtocolConfig cfg = ProtocolConfig::equal_weighting(protocol.order, cand.r, cavity);
        cfg.displacement_scale = cand.scale;
        if (protocol.order >= 2) {
          const double a = cand.atom_a;
          cfg.atoms[static_cast<std::size_t>(protocol.order - 2)] =
              AtomConfig::weighted(a, std::sqrt(std::max(0.0, 1.0 - a * a)));
        }
        cfg.truncation = settings.truncation;
        cfg.dim_cap = settings.dim_cap;
        const ProtocolResult res = run_protocol(cfg);
        ev.squeezing = res.squeezing;
        ev.objective = res.squeezing.min_db;
        ev.success_probability = res.success_probability;
        ev.mean_photons = res.mean_photons;
        ev.dim = res.dim;
        break;
      }
      case ProtocolKind::breeding: {
        BreedConfig cfg;
        cfg.rounds = protocol.order;
        cfg.input_squeezing = cand.r;
        cfg.amplitude_scale = cand.scale;
        cfg.cavity = cavity;
        cfg.truncation = settings.truncation;
        cfg.grid = settings.breeding_grid;
        cfg.dim_cap = settings.dim_cap;
        const BreedResult res = breed(cfg);
        ev.squeezing = res.squeezing;
        ev.objective = res.squeezing.min_db;
        ev.success_probability = res.success_probability;
        ev.mean_photons = res.cat_mean_photons;
        ev.dim = res.dim;
        break;
      }
      case ProtocolKind::vacuum_squeezing: {
        const ProtocolResult res = squeeze_from_vacuum(protocol.order, cavity, cand.p_displacement,
                                                       settings.truncation, 0, settings.dim_cap);
        ev.squeezing = res.squeezing;
        ev.quadrature_db = res.quadrature_squeezing_db;
        ev.objective = res.quadrature_squeezing_db;
        ev.success_probability = res.success_probability;
        ev.mean_photons = res.mean_photons;
        ev.dim = res.dim;
        break;
      }
    }
    ev.ok = std::isfinite(ev.objective) || ev.objective > 0.0;
    if (!ev.ok) ev.error = "objective is not finite";
  } catch (const Error& e) {
    ev.ok = false;
    ev.error = e.what();
    ev.objective = -std::numeric_limits<double>::infinity();
  }
  return ev;
}

/// Strict ordering: valid beats failed, then higher objective, then higher
/// success probability, then fewer photons, then earlier evaluation.
inline bool better(const Evaluation& a, const Evaluation& b) {
  if (a.ok != b.ok) return a.ok;
  if (std::abs(a.objective - b.objective) > 1e-9) return a.objective > b.objective;
  if (std::abs(a.success_probability - b.success_probability) > 1e-12) {
    return a.success_probability > b.success_probability;
  }
  if (std::abs(a.mean_photons - b.mean_photons) > 1e-12) return a.mean_photons < b.mean_photons;
  return a.index < b.index;
}

namespace detail {

enum class Dim { eta, r, scale, atom_a, p_displacement };

// Maps active dimensions to the unit cube and back.
class ParameterMap {
 public:
  ParameterMap(const SearchSpace& space, const ProtocolChoice& protocol) : space_(space) {
    base_ = space.nominal;
    base_.eta = std::clamp(base_.eta, space.eta.lo, space.eta.hi);
    base_.r = std::clamp(base_.r, space.r.lo, space.r.hi);
    base_.scale = std::clamp(base_.scale, space.scale.lo, space.scale.hi);
    base_.atom_a = std::clamp(base_.atom_a, space.atom_a.lo, space.atom_a.hi);
    base_.p_displacement =
        std::clamp(base_.p_displacement, space.p_displacement.lo, space.p_displacement.hi);
    const bool grid_state = protocol.kind != ProtocolKind::vacuum_squeezing;
    add(Dim::eta, space.optimize_eta, space.eta);
    add(Dim::r, grid_state && space.optimize_r, space.r);
    add(Dim::scale, grid_state && space.optimize_scale, space.scale);
    add(Dim::atom_a,
        protocol.kind == ProtocolKind::cavity && protocol.order >= 2 && space.optimize_atom,
        space.atom_a);
    add(Dim::p_displacement,
        protocol.kind == ProtocolKind::vacuum_squeezing && space.optimize_p_displacement,
        space.p_displacement);
    if (protocol.kind != ProtocolKind::cavity || protocol.order < 2) {
      base_.atom_a = 1.0 / std::numbers::sqrt2;
    }
  }

  std::size_t size() const { return dims_.size(); }

  Candidate to_candidate(const std::vector<double>& u) const {
    Candidate c = base_;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const double t = std::clamp(u[i], 0.0, 1.0);
      switch (dims_[i]) {
        case Dim::eta: {
          const double g = glo_ + t * (ghi_ - glo_);
          c.eta = std::clamp(1.0 - std::exp(-g), space_.eta.lo, space_.eta.hi);
          break;
        }
        case Dim::r: c.r = lerp(space_.r, t); break;
        case Dim::scale: c.scale = lerp(space_.scale, t); break;
        case Dim::atom_a: c.atom_a = lerp(space_.atom_a, t); break;
        case Dim::p_displacement: c.p_displacement = lerp(space_.p_displacement, t); break;
      }
    }
    return c;
  }

  std::vector<double> to_unit(const Candidate& c) const {
    std::vector<double> u(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      switch (dims_[i]) {
        case Dim::eta:
          u[i] = unlerp(glo_, ghi_, -std::log(1.0 - std::clamp(c.eta, space_.eta.lo, space_.eta.hi)));
          break;
        case Dim::r: u[i] = unlerp(space_.r.lo, space_.r.hi, c.r); break;
        case Dim::scale: u[i] = unlerp(space_.scale.lo, space_.scale.hi, c.scale); break;
        case Dim::atom_a: u[i] = unlerp(space_.atom_a.lo, space_.atom_a.hi, c.atom_a); break;
        case Dim::p_displacement:
          u[i] = unlerp(space_.p_displacement.lo, space_.p_displacement.hi, c.p_displacement);
          break;
      }
    }
    return u;
  }

 private:
  void add(Dim d, bool active, const Interval& iv) {
    if (!active || iv.degenerate()) {
      if (iv.degenerate()) set_base(d, iv.lo);
      return;
    }
    dims_.push_back(d);
    if (d == Dim::eta) {
      glo_ = -std::log(1.0 - iv.lo);
      ghi_ = -std::log(1.0 - iv.hi);
    }
  }

  void set_base(Dim d, double v) {
    switch (d) {
      case Dim::eta: base_.eta = v; break;
      case Dim::r: base_.r = v; break;
      case Dim::scale: base_.scale = v; break;
      case Dim::atom_a: base_.atom_a = v; break;
      case Dim::p_displacement: base_.p_displacement = v; break;
    }
  }

  static double lerp(const Interval& iv, double t) { return iv.lo + t * (iv.hi - iv.lo); }
  static double unlerp(double lo, double hi, double v) {
    return hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  }

  SearchSpace space_;
  Candidate base_;
  std::vector<Dim> dims_;
  double glo_ = 0.0;
  double ghi_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t seed, double c0, const ProtocolChoice& p) {
  // splitmix64 over the inputs; deterministic across platforms.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t c0_bits = 0;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&c0_bits, &c0, sizeof c0_bits);
  return mix(mix(mix(seed) ^ c0_bits) ^ (static_cast<std::uint64_t>(p.kind) << 32 |
                                         static_cast<std::uint32_t>(p.order)));
}

}  // namespace detail

/// Maximizes the protocol objective at one C0 within `settings.budget`
/// evaluations. Never throws on failed evaluations; the record's `ok` is
/// false only if every evaluation failed, with the first failure in `error`.
inline PointResult optimize_point(double c0, const ProtocolChoice& protocol,
                                  const SearchSpace& space, const OptimizerSettings& settings,
                                  const std::optional<Candidate>& warm_start = std::nullopt) {
  space.validate();
  if (settings.budget < 1) throw ConfigError("optimizer budget must be >= 1");
  if (protocol.order < 1) throw ConfigError("protocol order must be >= 1");
  const detail::ParameterMap map(space, protocol);
  const std::size_t dims = map.size();

  PointResult out;
  out.c0 = c0;
  out.protocol = protocol;
  auto record = [&](const std::vector<double>& u) {
    Evaluation ev = evaluate(c0, protocol, map.to_candidate(u), settings);
    ev.index = out.log.size();
    out.log.push_back(ev);
    return ev;
  };

  if (dims == 0) {
    record({});
  } else {
    const int budget = settings.budget;
    const int scan = std::clamp(static_cast<int>(std::lround(budget * settings.scan_fraction)),
                                1, budget);
    std::mt19937_64 rng(detail::mix_seed(settings.seed, c0, protocol));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Latin hypercube: one stratum per sample in every dimension.
    int scan_count = scan;
    if (warm_start) {
      record(map.to_unit(*warm_start));
      scan_count = std::max(scan - 1, 0);
    }
    std::vector<std::vector<double>> lhs(static_cast<std::size_t>(scan_count),
                                         std::vector<double>(dims));
    for (std::size_t d = 0; d < dims; ++d) {
      std::vector<int> perm(static_cast<std::size_t>(scan_count));
      for (int i = 0; i < scan_count; ++i) perm[static_cast<std::size_t>(i)] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int i = 0; i < scan_count; ++i) {
        lhs[static_cast<std::size_t>(i)][d] =
            (perm[static_cast<std::size_t>(i)] + unif(rng)) / scan_count;
      }
    }
    for (const auto& u : lhs) record(u);

    // Nelder-Mead on -objective, started from the best scan point.
    const Evaluation* start = &out.log.front();
    for (const auto& ev : out.log) {
      if (better(ev, *start)) start = &ev;
    }
    if (start->ok && static_cast<int>(out.log.size()) < budget) {
      struct Vertex {
        std::vector<double> u;
        double f;
      };
      auto cost = [](const Evaluation& ev) {
        return ev.ok ? -ev.objective : std::numeric_limits<double>::infinity();
      };
      auto clamp_unit = [](std::vector<double> u) {
        for (double& x : u) x = std::clamp(x, 0.0, 1.0);
        return u;
      };
      auto remaining = [&] { return static_cast<int>(out.log.size()) < budget; };

      std::vector<Vertex> simplex;
      const std::vector<double> u0 = map.to_unit(start->params);
      simplex.push_back({u0, cost(*start)});
      const double step = 0.1;
      for (std::size_t d = 0; d < dims && remaining(); ++d) {
        std::vector<double> u = u0;
        u[d] = u[d] + step <= 1.0 ? u[d] + step : u[d] - step;
        simplex.push_back({u, cost(record(u))});
      }
      while (simplex.size() == dims + 1 && remaining()) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        std::vector<double> centroid(dims, 0.0);
        for (std::size_t i = 0; i < dims; ++i) {
          for (std::size_t d = 0; d < dims; ++d) centroid[d] += simplex[i].u[d] / dims;
        }
        auto along = [&](double t) {
          std::vector<double> u(dims);
          for (std::size_t d = 0; d < dims; ++d) {
            u[d] = centroid[d] + t * (simplex.back().u[d] - centroid[d]);
          }
          return clamp_unit(u);
        };
        const auto ur = along(-1.0);
        const double fr = cost(record(ur));
        if (fr < simplex.front().f) {
          if (!remaining()) {
            simplex.back() = {ur, fr};
            break;
          }
          const auto ue = along(-2.0);
          const double fe = cost(record(ue));
          simplex.back() = fe < fr ? Vertex{ue, fe} : Vertex{ur, fr};
        } else if (fr < simplex[dims - 1].f) {
          simplex.back() = {ur, fr};
        } else {
          if (!remaining()) break;
          const bool outside = fr < simplex.back().f;
          const auto uc = along(outside ? -0.5 : 0.5);
          const double fc = cost(record(uc));
          if (fc < std::min(fr, simplex.back().f)) {
            simplex.back() = {uc, fc};
          } else {
            for (std::size_t i = 1; i < simplex.size() && remaining(); ++i) {
              for (std::size_t d = 0; d < dims; ++d) {
                simplex[i].u[d] = simplex.front().u[d] + 0.5 * (simplex[i].u[d] - simplex.front().u[d]);
              }
              simplex[i].f = cost(record(simplex[i].u));
            }
          }
        }
      }
    }
  }

  const Evaluation* best = &out.log.front();
  for (const auto& ev : out.log) {
    if (better(ev, *best)) best = &ev;
  }
  out.best = *best;
  out.ok = best->ok;
  if (!out.ok) out.error = out.log.front().error;
  out.cooperativity =
      std::isinf(c0) ? CavityParams::ideal().cooperativity() : c0 * (1.0 - best->params.eta);
  return out;
}

/// optimize_point over a list of C0 values, each warm-started from the
/// previous point's optimum. Failures are recorded per point.
inline std::vector<PointResult> sweep(const std::vector<double>& c0_list,
                                      const ProtocolChoice& protocol, const SearchSpace& space,
                                      const OptimizerSettings& settings) {
  std::vector<PointResult> out;
  std::optional<Candidate> warm;
  for (double c0 : c0_list) {
    PointResult res;
    try {
      res = optimize_point(c0, protocol, space, settings, warm);
    } catch (const Error& e) {
      res.c0 = c0;
      res.protocol = protocol;
      res.ok = false;
      res.error = e.what();
    }
    if (res.ok) warm = res.best.params;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace gkpcav

#endif  // GKPCAV_OPTIMIZE_HPP
