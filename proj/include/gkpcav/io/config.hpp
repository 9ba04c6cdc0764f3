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

#ifndef GKPCAV_IO_CONFIG_HPP
#define GKPCAV_IO_CONFIG_HPP

// Experiment configuration: a JSON document checked against
// experiment_config.schema.json, then converted to typed settings. Schema
// validation rejects unknown keys; the semantic checks here cover what the
// schema cannot express (interval ordering, cavity specification).

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "gkpcav/errors.hpp"
#include "gkpcav/io/schema.hpp"
#include "gkpcav/optimize.hpp"
#include "gkpcav/protocol.hpp"

namespace gkpcav::io {

struct Variant {
  std::string name = "default";
  bool optimize_scale = false;
  bool optimize_atom = false;
};

struct SweepSpec {
  ProtocolKind protocol = ProtocolKind::cavity;
  std::vector<int> orders;
  std::vector<double> c0;
  int budget = 300;
  SearchSpace space;
  std::vector<Variant> variants{Variant{}};
};

struct CavitySpec {
  bool ideal = false;
  std::optional<double> c0;
  std::optional<double> c;
  double eta = 1.0;

  CavityParams params() const {
    if (ideal) return CavityParams::ideal();
    if (c0) return CavityParams::from_c0_eta(*c0, eta);
    return CavityParams::from_c_eta(*c, eta);
  }
};

struct StateOptimize {
  int budget = 300;
  SearchSpace space;
};

struct StateSpec {
  ProtocolKind protocol = ProtocolKind::cavity;
  int order = 1;
  CavitySpec cavity;
  Candidate params;
  FeedForward feed_forward = FeedForward::nominal;
  bool deterministic_first_step = true;
  std::optional<StateOptimize> optimize;
  double wigner_x_lo = -6.0, wigner_x_hi = 6.0;
  double wigner_p_lo = -6.0, wigner_p_hi = 6.0;
  int wigner_points = 121;
  double quad_lo = -8.0, quad_hi = 8.0;
  int quad_points = 801;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int dim_cap = 256;
  int jobs = 1;
  std::string output_dir = "out";
  std::string prefix;
  KrausTruncation truncation{1e-9, 256, 256};
  std::optional<SweepSpec> sweep;
  std::optional<StateSpec> state;

  std::string output_prefix() const { return prefix.empty() ? name : prefix; }
};

namespace detail {

inline ProtocolKind parse_kind(const std::string& s) {
  if (s == "cavity") return ProtocolKind::cavity;
  if (s == "breeding") return ProtocolKind::breeding;
  if (s == "vacuum_squeezing") return ProtocolKind::vacuum_squeezing;
  throw ConfigError("unknown protocol '" + s + "'");
}

inline Interval parse_interval(const json& j, const char* name) {
  Interval iv{j.at(0).get<double>(), j.at(1).get<double>()};
  if (iv.lo > iv.hi) {
    throw ConfigError(std::string("interval '") + name + "' has lower bound above upper bound");
  }
  return iv;
}

inline SearchSpace parse_space(const json& j, SearchSpace space) {
  if (j.contains("eta")) space.eta = parse_interval(j["eta"], "eta");
  if (j.contains("r")) space.r = parse_interval(j["r"], "r");
  if (j.contains("scale")) space.scale = parse_interval(j["scale"], "scale");
  if (j.contains("atom_a")) space.atom_a = parse_interval(j["atom_a"], "atom_a");
  if (j.contains("p_displacement")) {
    space.p_displacement = parse_interval(j["p_displacement"], "p_displacement");
  }
  space.validate();
  return space;
}

inline std::pair<double, double> parse_range(const json& j, const char* name) {
  const double lo = j.at(0).get<double>();
  const double hi = j.at(1).get<double>();
  if (!(lo < hi)) throw ConfigError(std::string("range '") + name + "' must be increasing");
  return {lo, hi};
}

}  // namespace detail

/// Converts a document to typed settings. `schema` is the parsed
/// experiment_config schema; violations are collected into one ConfigError.
inline ExperimentConfig parse_config(const json& doc, const json& schema) {
  if (const auto errors = validate(doc, schema); !errors.empty()) {
    std::string msg = "config does not match schema:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  ExperimentConfig cfg;
  cfg.name = doc.value("name", cfg.name);
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.dim_cap = doc.value("dim_cap", cfg.dim_cap);
  cfg.jobs = doc.value("jobs", cfg.jobs);
  if (doc.contains("output")) {
    cfg.output_dir = doc["output"].value("directory", cfg.output_dir);
    cfg.prefix = doc["output"].value("prefix", cfg.prefix);
  }
  if (doc.contains("truncation")) {
    const json& t = doc["truncation"];
    cfg.truncation.trace_tolerance = t.value("trace_tolerance", cfg.truncation.trace_tolerance);
    cfg.truncation.max_ml = t.value("max_ml", cfg.truncation.max_ml);
    cfg.truncation.max_mgamma = t.value("max_mgamma", cfg.truncation.max_mgamma);
    cfg.truncation.validate();
  }
  if (!doc.contains("sweep") && !doc.contains("state")) {
    throw ConfigError("config needs a 'sweep' or a 'state' section");
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    SweepSpec sw;
    sw.protocol = detail::parse_kind(s["protocol"].get<std::string>());
    sw.orders = s["orders"].get<std::vector<int>>();
    sw.c0 = s["c0"].get<std::vector<double>>();
    sw.budget = s.value("budget", sw.budget);
    if (s.contains("space")) sw.space = detail::parse_space(s["space"], sw.space);
    if (s.contains("variants")) {
      sw.variants.clear();
      for (const auto& v : s["variants"]) {
        Variant var;
        var.name = v["name"].get<std::string>();
        var.optimize_scale = v.value("optimize_scale", false);
        var.optimize_atom = v.value("optimize_atom", false);
        for (const auto& prev : sw.variants) {
          if (prev.name == var.name) throw ConfigError("duplicate variant name '" + var.name + "'");
        }
        sw.variants.push_back(var);
      }
    }
    cfg.sweep = sw;
  }
  if (doc.contains("state")) {
    const json& s = doc["state"];
    StateSpec st;
    st.protocol = detail::parse_kind(s["protocol"].get<std::string>());
    st.order = s["order"].get<int>();
    const json& c = s["cavity"];
    st.cavity.ideal = c.value("ideal", false);
    if (c.contains("c0")) st.cavity.c0 = c["c0"].get<double>();
    if (c.contains("c")) st.cavity.c = c["c"].get<double>();
    const int given = static_cast<int>(st.cavity.ideal) + static_cast<int>(st.cavity.c0.has_value()) +
                      static_cast<int>(st.cavity.c.has_value());
    if (given != 1) throw ConfigError("state.cavity needs exactly one of 'ideal', 'c0', 'c'");
    if (!st.cavity.ideal && !c.contains("eta")) throw ConfigError("state.cavity.eta is required");
    st.cavity.eta = c.value("eta", 1.0);
    if (st.cavity.c0 && st.cavity.eta >= 1.0) {
      throw ConfigError("state.cavity.eta must be < 1 when c0 is given");
    }
    st.params.r = s.value("r", st.params.r);
    st.params.scale = s.value("scale", st.params.scale);
    st.params.atom_a = s.value("atom_a", st.params.atom_a);
    st.params.p_displacement = s.value("p_displacement", st.params.p_displacement);
    st.params.eta = st.cavity.eta;
    if (st.params.atom_a * st.params.atom_a > 1.0) throw ConfigError("state.atom_a must be <= 1");
    const std::string ff = s.value("feed_forward", std::string("nominal"));
    st.feed_forward = ff == "phase_matched" ? FeedForward::phase_matched : FeedForward::nominal;
    st.deterministic_first_step = s.value("deterministic_first_step", true);
    if (s.contains("optimize")) {
      if (!st.cavity.c0) throw ConfigError("state.optimize requires state.cavity.c0");
      const json& o = s["optimize"];
      StateOptimize opt;
      opt.budget = o.value("budget", opt.budget);
      if (o.contains("space")) opt.space = detail::parse_space(o["space"], opt.space);
      opt.space.optimize_scale = o.value("optimize_scale", false);
      opt.space.optimize_atom = o.value("optimize_atom", false);
      st.optimize = opt;
    }
    if (s.contains("wigner")) {
      const json& w = s["wigner"];
      if (w.contains("x_range")) {
        std::tie(st.wigner_x_lo, st.wigner_x_hi) = detail::parse_range(w["x_range"], "x_range");
      }
      if (w.contains("p_range")) {
        std::tie(st.wigner_p_lo, st.wigner_p_hi) = detail::parse_range(w["p_range"], "p_range");
      }
      st.wigner_points = w.value("points", st.wigner_points);
    }
    if (s.contains("quadrature")) {
      const json& q = s["quadrature"];
      if (q.contains("range")) std::tie(st.quad_lo, st.quad_hi) = detail::parse_range(q["range"], "range");
      st.quad_points = q.value("points", st.quad_points);
    }
    cfg.state = st;
  }
  return cfg;
}

/// Reads and parses a JSON file; syntax errors become ConfigError.
inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace gkpcav::io

#endif  // GKPCAV_IO_CONFIG_HPP
