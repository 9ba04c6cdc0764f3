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

#ifndef GKPCAV_TOOLS_CLI_HPP
#define GKPCAV_TOOLS_CLI_HPP

// Subcommand implementations for the gkpcav executable. Kept in a header so
// the test suite can drive them in-process.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "gkpcav/breeding.hpp"
#include "gkpcav/embedded_schemas.hpp"
#include "gkpcav/errors.hpp"
#include "gkpcav/io/config.hpp"
#include "gkpcav/io/output.hpp"
#include "gkpcav/io/schema.hpp"
#include "gkpcav/optimize.hpp"
#include "gkpcav/protocol.hpp"
#include "gkpcav/verify/acceptance.hpp"

namespace gkpcav::cli {

namespace fs = std::filesystem;
using io::json;

enum ExitCode { kOk = 0, kComputationError = 1, kConfigError = 2 };

/// Command-line values that override the config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<int> dim_cap;
};

inline const json& config_schema() {
  static const json schema = json::parse(schemas::kExperimentConfig);
  return schema;
}

inline io::ExperimentConfig load_config(const std::string& path, const Overrides& ov) {
  io::ExperimentConfig cfg = io::parse_config(io::read_json_file(path), config_schema());
  if (ov.out_dir) cfg.output_dir = *ov.out_dir;
  if (ov.jobs) {
    if (*ov.jobs < 1) throw ConfigError("--jobs must be >= 1");
    cfg.jobs = *ov.jobs;
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.dim_cap) {
    if (*ov.dim_cap < 8 || *ov.dim_cap > 1024) throw ConfigError("--dim-cap must lie in [8, 1024]");
    cfg.dim_cap = *ov.dim_cap;
  }
  return cfg;
}

inline json versions() {
  return {{"gkpcav", schemas::kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

inline json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"C0",   "N_or_M", "eta",  "C",    "r_in",   "scale",
                                             "atom_a", "dB_x", "dB_p", "min_dB", "success_prob"};
  return cols;
}

/// Runs every (variant, order) task; tasks are independent and may run on
/// up to `jobs` threads. Results are stored by task index, so the output
/// does not depend on scheduling.
inline int cmd_sweep(const io::ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("config has no 'sweep' section");
  const io::SweepSpec& sw = *cfg.sweep;
  if (sw.budget < 1) throw ConfigError("sweep.budget must be >= 1");

  struct Task {
    std::size_t variant;
    int order;
  };
  std::vector<Task> tasks;
  for (std::size_t v = 0; v < sw.variants.size(); ++v) {
    for (int order : sw.orders) tasks.push_back({v, order});
  }
  std::vector<std::vector<PointResult>> results(tasks.size());
  std::vector<std::string> task_errors(tasks.size());

  OptimizerSettings settings;
  settings.budget = sw.budget;
  settings.seed = cfg.seed;
  settings.dim_cap = cfg.dim_cap;
  settings.truncation = cfg.truncation;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      SearchSpace space = sw.space;
      space.optimize_scale = sw.variants[tasks[i].variant].optimize_scale;
      space.optimize_atom = sw.variants[tasks[i].variant].optimize_atom;
      try {
        results[i] = sweep(sw.c0, {sw.protocol, tasks[i].order}, space, settings);
      } catch (const Error& e) {
        task_errors[i] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!task_errors[i].empty()) throw ConfigError(task_errors[i]);
  }

  const fs::path out_dir(cfg.output_dir);
  const std::string prefix = cfg.output_prefix();
  json variants = json::array();
  json points = json::array();
  std::vector<std::pair<fs::path, std::string>> files;
  for (std::size_t v = 0; v < sw.variants.size(); ++v) {
    const io::Variant& var = sw.variants[v];
    io::CsvTable table(sweep_columns());
    for (std::size_t c = 0; c < sw.c0.size(); ++c) {
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].variant != v) continue;
        const PointResult& pr = results[i][c];
        const Evaluation& b = pr.best;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const bool vac = sw.protocol == ProtocolKind::vacuum_squeezing;
        if (pr.ok) {
          table.add_row({pr.c0, static_cast<double>(tasks[i].order), b.params.eta, pr.cooperativity,
                         vac ? 0.0 : b.params.r, vac ? nan : b.params.scale, b.params.atom_a,
                         b.squeezing.db_x, b.squeezing.db_p, b.objective, b.success_probability});
        } else {
          table.add_row({pr.c0, static_cast<double>(tasks[i].order), nan, nan, nan, nan, nan, nan,
                         nan, nan, nan});
        }
        std::size_t failed = 0;
        for (const auto& ev : pr.log) failed += ev.ok ? 0 : 1;
        json pt = {{"variant", var.name},
                   {"c0", pr.c0},
                   {"order", tasks[i].order},
                   {"ok", pr.ok},
                   {"error", pr.ok ? json(nullptr) : json(pr.error)},
                   {"evaluations", pr.log.size()},
                   {"failed_evaluations", failed}};
        if (pr.ok) {
          pt["mean_photons"] = io::number_or_null(b.mean_photons);
          pt["dim"] = b.dim;
          if (vac) {
            pt["quadrature_dB"] = io::number_or_null(b.quadrature_db);
            pt["p_displacement"] = b.params.p_displacement;
          }
        }
        points.push_back(pt);
      }
    }
    const std::string csv_name = prefix + "_" + var.name + ".csv";
    files.emplace_back(out_dir / csv_name, table.str());
    variants.push_back({{"name", var.name},
                        {"optimize_scale", var.optimize_scale},
                        {"optimize_atom", var.optimize_atom},
                        {"csv", csv_name}});
  }

  json space = {{"eta", interval_json(sw.space.eta)}, {"r", interval_json(sw.space.r)},
                {"scale", interval_json(sw.space.scale)}, {"atom_a", interval_json(sw.space.atom_a)},
                {"p_displacement", interval_json(sw.space.p_displacement)}};
  json meta = {{"schema_version", 1},
               {"kind", "sweep"},
               {"name", cfg.name},
               {"protocol", to_string(sw.protocol)},
               {"orders", sw.orders},
               {"c0", sw.c0},
               {"seed", cfg.seed},
               {"budget", sw.budget},
               {"dim_cap", cfg.dim_cap},
               {"versions", versions()},
               {"optimizer",
                {{"strategy", "latin_hypercube+nelder_mead"},
                 {"scan_fraction", settings.scan_fraction},
                 {"co_optimization", "joint"},
                 {"objective", sw.protocol == ProtocolKind::vacuum_squeezing
                                   ? "quadrature squeezing dB, -10 log10(2 Var x)"
                                   : "min(dB_x, dB_p)"},
                 {"eta_coordinate", "-log(1 - eta)"}}},
               {"space", space},
               {"truncation",
                {{"trace_tolerance", cfg.truncation.trace_tolerance},
                 {"max_ml", cfg.truncation.max_ml},
                 {"max_mgamma", cfg.truncation.max_mgamma}}},
               {"csv_columns", sweep_columns()},
               {"variants", variants},
               {"points", points}};

  for (const auto& [path, content] : files) io::write_file_atomic(path, content);
  io::write_json_atomic(out_dir / (prefix + ".json"), meta);
  for (const auto& [path, content] : files) log << path.string() << "\n";
  log << (out_dir / (prefix + ".json")).string() << "\n";
  return kOk;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

inline json squeezing_json(const SqueezingReport& s) {
  auto cj = [](cplx z) { return json::array({z.real(), z.imag()}); };
  return {{"delta_x", io::number_or_null(s.delta_x)}, {"delta_p", io::number_or_null(s.delta_p)},
          {"dB_x", io::number_or_null(s.db_x)},       {"dB_p", io::number_or_null(s.db_p)},
          {"min_dB", io::number_or_null(s.min_db)},   {"dx_expect", cj(s.dx_expect)},
          {"dp_expect", cj(s.dp_expect)}};
}

/// Runs one instance (optionally optimized first) and writes the Wigner grid,
/// both quadrature distributions and a report.
inline int cmd_state(const io::ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.state) throw ConfigError("config has no 'state' section");
  const io::StateSpec& st = *cfg.state;
  Candidate params = st.params;
  json optimization;
  if (st.optimize) {
    OptimizerSettings settings;
    settings.budget = st.optimize->budget;
    settings.seed = cfg.seed;
    settings.dim_cap = cfg.dim_cap;
    settings.truncation = cfg.truncation;
    const PointResult pr =
        optimize_point(*st.cavity.c0, {st.protocol, st.order}, st.optimize->space, settings);
    if (!pr.ok) throw NumericalError("optimization failed: " + pr.error);
    params = pr.best.params;
    optimization = {{"budget", settings.budget},
                    {"seed", cfg.seed},
                    {"evaluations", pr.log.size()}};
  }
  io::CavitySpec cav = st.cavity;
  if (st.optimize) cav.eta = params.eta;
  const CavityParams cavity = cav.params();

  const std::vector<double> xs = linspace(st.wigner_x_lo, st.wigner_x_hi, st.wigner_points);
  const std::vector<double> ps = linspace(st.wigner_p_lo, st.wigner_p_hi, st.wigner_points);
  const std::vector<double> qs = linspace(st.quad_lo, st.quad_hi, st.quad_points);

  SqueezingReport squeezing;
  double probability = 0.0, photons = 0.0, quad_db = std::numeric_limits<double>::quiet_NaN();
  double ff_overlap = std::numeric_limits<double>::quiet_NaN();
  int dim = 0;
  RMatrix w;
  std::vector<double> px, pp;
  std::vector<std::string> warnings;

  switch (st.protocol) {
    case ProtocolKind::cavity: {
      ProtocolConfig pc = ProtocolConfig::equal_weighting(st.order, params.r, cavity);
      pc.displacement_scale = params.scale;
      if (st.order >= 2) {
        pc.atoms[static_cast<std::size_t>(st.order - 2)] = AtomConfig::weighted(
            params.atom_a, std::sqrt(std::max(0.0, 1.0 - params.atom_a * params.atom_a)));
      }
      pc.deterministic_first_step = st.deterministic_first_step;
      pc.feed_forward = st.feed_forward;
      pc.truncation = cfg.truncation;
      pc.dim_cap = cfg.dim_cap;
      const ProtocolResult res = run_protocol(pc);
      squeezing = res.squeezing;
      probability = res.success_probability;
      photons = res.mean_photons;
      ff_overlap = res.feed_forward_overlap;
      dim = res.dim;
      w = wigner(res.state, xs, ps);
      px = quadrature_distribution(res.state, Quadrature::x, qs);
      pp = quadrature_distribution(res.state, Quadrature::p, qs);
      break;
    }
    case ProtocolKind::breeding: {
      BreedConfig bc;
      bc.rounds = st.order;
      bc.input_squeezing = params.r;
      bc.amplitude_scale = params.scale;
      bc.cavity = cavity;
      bc.truncation = cfg.truncation;
      bc.dim_cap = cfg.dim_cap;
      const SqueezedCat cat = make_squeezed_cat(bc);
      const PWavefunction kernel = fock_to_pkernel(cat.state, bc.rounds, bc.resolved_grid());
      const BreedExpectations ex = breed_expectations(kernel, bc.rounds);
      squeezing = effective_squeezing(ex.dx_expect, ex.dp_expect);
      probability = std::pow(cat.probability, std::ldexp(1.0, bc.rounds));
      photons = cat.state.mean_photons();
      dim = cat.state.dim();
      warnings = kernel.warnings;
      const BredState bred(cat.state, bc.rounds);
      w = bred.wigner(xs, ps);
      px = bred.quadrature_distribution(Quadrature::x, qs);
      pp = bred.quadrature_distribution(Quadrature::p, qs);
      warnings.push_back("mean_photons refers to each input squeezed cat");
      break;
    }
    case ProtocolKind::vacuum_squeezing: {
      const ProtocolResult res = squeeze_from_vacuum(st.order, cavity, params.p_displacement,
                                                     cfg.truncation, 0, cfg.dim_cap);
      squeezing = res.squeezing;
      quad_db = res.quadrature_squeezing_db;
      probability = res.success_probability;
      photons = res.mean_photons;
      dim = res.dim;
      w = wigner(res.state, xs, ps);
      px = quadrature_distribution(res.state, Quadrature::x, qs);
      pp = quadrature_distribution(res.state, Quadrature::p, qs);
      break;
    }
  }

  double integral = 0.0;
  const double dx = xs.size() > 1 ? xs[1] - xs[0] : 0.0;
  const double dp = ps.size() > 1 ? ps[1] - ps[0] : 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double wx = (i == 0 || i == w.rows() - 1) ? 0.5 : 1.0;
      const double wp = (j == 0 || j == w.cols() - 1) ? 0.5 : 1.0;
      integral += wx * wp * w(i, j) * dx * dp;
    }
  }

  io::CsvTable wt({"x", "p", "W"});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      wt.add_row({xs[i], ps[j], w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  io::CsvTable qx({"q", "P"}), qp({"q", "P"});
  for (std::size_t i = 0; i < qs.size(); ++i) {
    qx.add_row({qs[i], px[i]});
    qp.add_row({qs[i], pp[i]});
  }

  const fs::path out_dir(cfg.output_dir);
  const std::string prefix = cfg.output_prefix();
  const std::string f_w = prefix + "_wigner.csv", f_x = prefix + "_quadrature_x.csv",
                    f_p = prefix + "_quadrature_p.csv";
  json report = {
      {"schema_version", 1},
      {"kind", "state"},
      {"name", cfg.name},
      {"protocol", to_string(st.protocol)},
      {"order", st.order},
      {"cavity",
       {{"C", cavity.cooperativity()},
        {"eta", cavity.escape_efficiency()},
        {"C0", cav.c0 ? json(*cav.c0) : json(nullptr)}}},
      {"parameters",
       {{"r", params.r},
        {"scale", params.scale},
        {"atom_a", params.atom_a},
        {"p_displacement", params.p_displacement},
        {"feed_forward", st.feed_forward == FeedForward::nominal ? "nominal" : "phase_matched"},
        {"deterministic_first_step", st.deterministic_first_step}}},
      {"squeezing", squeezing_json(squeezing)},
      {"quadrature_dB", io::number_or_null(quad_db)},
      {"feed_forward_overlap", io::number_or_null(ff_overlap)},
      {"success_probability", probability},
      {"mean_photons", photons},
      {"dim", dim},
      {"wigner_integral", integral},
      {"files", {{"wigner", f_w}, {"quadrature_x", f_x}, {"quadrature_p", f_p}}},
      {"warnings", warnings}};
  if (!optimization.is_null()) report["optimization"] = optimization;

  io::write_file_atomic(out_dir / f_w, wt.str());
  io::write_file_atomic(out_dir / f_x, qx.str());
  io::write_file_atomic(out_dir / f_p, qp.str());
  io::write_json_atomic(out_dir / (prefix + ".json"), report);
  log << (out_dir / f_w).string() << "\n"
      << (out_dir / f_x).string() << "\n"
      << (out_dir / f_p).string() << "\n"
      << (out_dir / (prefix + ".json")).string() << "\n";
  return kOk;
}

struct VerifyOptions {
  verify::AcceptanceOptions acceptance;
  std::optional<std::string> json_path;
};

/// Prints one line per criterion plus a summary; exit code 0 only if all pass.
inline int cmd_verify(VerifyOptions opt, std::ostream& out) {
  opt.acceptance.on_result = [&out](const verify::CriterionResult& r) {
    out << verify::format_line(r) << std::endl;
  };
  const auto results = verify::run_acceptance(opt.acceptance);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << passed << "/" << results.size() << " criteria passed" << std::endl;
  if (opt.json_path) io::write_json_atomic(*opt.json_path, verify::to_json(results));
  return passed == results.size() && !results.empty() ? kOk : kComputationError;
}

/// Machine-readable error document written to stderr.
inline std::string error_json(const std::string& kind, const std::string& message, int code) {
  return json{{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}}.dump();
}

}  // namespace gkpcav::cli

#endif  // GKPCAV_TOOLS_CLI_HPP
