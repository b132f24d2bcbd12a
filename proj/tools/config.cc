// Copyright 2026 The finsler_ccm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace finsler_ccm::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"name"}},
      {"metric", {"name"}},
      {"rate", {"kind", "lambda"}},
      {"target", {"state", "control"}},
      {"run", {"x0", "horizon", "dt", "path_nodes", "rho", "mode"}},
      {"closed_loop", {"period", "policy", "shorten_iters", "smoothing"}},
      {"tolerances", {"fd_step", "reg_eps", "b_eps", "diss_tol"}},
      {"verify",
       {"state_lower", "state_upper", "control_lower", "control_upper", "samples",
        "kernel_tol", "margin_eps", "delta_min", "delta_max", "ratio_cap"}},
      {"output", {"dir", "seed"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_scalar(const std::string& raw) {
  const std::string token = trim(raw);
  if (token == "pi" || token == "+pi") return std::numbers::pi;
  if (token == "-pi") return -std::numbers::pi;
  if (token.empty()) throw ConfigError("empty number");
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(value)) {
    throw ConfigError("'" + token + "' is not a finite number");
  }
  return value;
}

long long parse_integer(const std::string& raw) {
  const std::string token = trim(raw);
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE) {
    throw ConfigError("'" + token + "' is not an integer");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const std::string* raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return nullptr;
    const auto item = sec->second.find(key);
    if (item == sec->second.not_found()) return nullptr;
    return &item->second.data();
  }

  template <typename Fn>
  void with(const std::string& section, const std::string& key, Fn&& fn) const {
    const std::string* value = raw(section, key);
    if (value == nullptr) return;
    try {
      fn(trim(*value));
    } catch (const ConfigError& e) {
      throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
  }

  void text(const std::string& section, const std::string& key, std::string& out) const {
    with(section, key, [&](const std::string& v) {
      if (v.empty()) throw ConfigError("empty value");
      out = v;
    });
  }
  void number(const std::string& section, const std::string& key, double& out) const {
    with(section, key, [&](const std::string& v) { out = parse_scalar(v); });
  }
  void integer(const std::string& section, const std::string& key, int& out) const {
    with(section, key, [&](const std::string& v) {
      const long long value = parse_integer(v);
      if (value < 0 || value > 100000000) throw ConfigError("out of range");
      out = static_cast<int>(value);
    });
  }
  void vector(const std::string& section, const std::string& key, Vector& out) const {
    with(section, key, [&](const std::string& v) { out = parse_vector(v); });
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RateSpec RunConfig::rate() const {
  if (rate_kind == "linear") return RateSpec::linear(lambda);
  return RateSpec::zero();
}

Vector parse_vector(const std::string& text) {
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream tokens(spaced);
  std::vector<double> values;
  for (std::string token; tokens >> token;) values.push_back(parse_scalar(token));
  if (values.empty()) throw ConfigError("empty vector");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside any [section]");
    }
    if (known == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  const Reader r(tree);
  RunConfig c;
  r.text("system", "name", c.system);
  r.text("metric", "name", c.metric);
  r.text("rate", "kind", c.rate_kind);
  r.number("rate", "lambda", c.lambda);
  r.vector("target", "state", c.target_state);
  r.vector("target", "control", c.target_control);
  r.vector("run", "x0", c.x0);
  r.number("run", "horizon", c.horizon);
  r.number("run", "dt", c.dt);
  r.integer("run", "path_nodes", c.path_nodes);

  std::string rho = variant_name(c.variant);
  r.text("run", "rho", rho);
  if (rho == "sontag") {
    c.variant = RhoVariant::kSontagSmooth;
  } else if (rho == "piecewise") {
    c.variant = RhoVariant::kPaperPiecewise;
  } else {
    throw ConfigError("[run] rho: expected sontag or piecewise, got '" + rho + "'");
  }
  std::string mode = mode_name(c.mode);
  r.text("run", "mode", mode);
  if (mode == "open") {
    c.mode = RunMode::kOpen;
  } else if (mode == "closed") {
    c.mode = RunMode::kClosed;
  } else {
    throw ConfigError("[run] mode: expected open or closed, got '" + mode + "'");
  }

  r.number("closed_loop", "period", c.period);
  std::string policy = "keep";
  r.text("closed_loop", "policy", policy);
  if (policy == "keep") {
    c.policy.kind = PathUpdatePolicy::Kind::kKeepForwardImage;
  } else if (policy == "shorten") {
    c.policy.kind = PathUpdatePolicy::Kind::kLocalShorten;
  } else {
    throw ConfigError("[closed_loop] policy: expected keep or shorten, got '" + policy + "'");
  }
  r.integer("closed_loop", "shorten_iters", c.policy.iters);
  r.number("closed_loop", "smoothing", c.policy.smoothing);

  r.number("tolerances", "fd_step", c.tol.fd_step);
  r.number("tolerances", "reg_eps", c.tol.reg_eps);
  r.number("tolerances", "b_eps", c.tol.b_eps);
  r.number("tolerances", "diss_tol", c.tol.diss_tol);

  r.vector("verify", "state_lower", c.state_lower);
  r.vector("verify", "state_upper", c.state_upper);
  r.vector("verify", "control_lower", c.control_lower);
  r.vector("verify", "control_upper", c.control_upper);
  r.integer("verify", "samples", c.verify_samples);
  r.number("verify", "kernel_tol", c.kernel_tol);
  r.number("verify", "margin_eps", c.margin_eps);
  r.number("verify", "delta_min", c.delta_min);
  r.number("verify", "delta_max", c.delta_max);
  r.number("verify", "ratio_cap", c.ratio_cap);

  r.text("output", "dir", c.out_dir);
  r.with("output", "seed", [&](const std::string& v) {
    const long long seed = parse_integer(v);
    if (seed < 0) throw ConfigError("seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
  });

  require(!c.system.empty(), "[system] name is required");
  require(!c.metric.empty(), "[metric] name is required");
  require(c.rate_kind == "zero" || c.rate_kind == "linear",
          "[rate] kind: expected zero or linear, got '" + c.rate_kind + "'");
  require(c.lambda > 0.0, "[rate] lambda must be > 0");
  require(c.horizon > 0.0, "[run] horizon must be > 0");
  require(c.dt > 0.0, "[run] dt must be > 0");
  require(c.dt <= c.horizon, "[run] dt must not exceed the horizon");
  require(c.path_nodes >= 2, "[run] path_nodes must be >= 2");
  require(c.period > 0.0, "[closed_loop] period must be > 0");
  require(c.policy.smoothing > 0.0 && c.policy.smoothing <= 1.0,
          "[closed_loop] smoothing must lie in (0, 1]");
  require(c.verify_samples >= 1, "[verify] samples must be >= 1");
  require(c.kernel_tol > 0.0 && c.margin_eps >= 0.0,
          "[verify] kernel_tol must be > 0 and margin_eps >= 0");
  require(c.delta_min > 0.0 && c.delta_max >= c.delta_min,
          "[verify] need 0 < delta_min <= delta_max");
  require(c.ratio_cap > 0.0, "[verify] ratio_cap must be > 0");
  require(c.state_lower.size() == c.state_upper.size(),
          "[verify] state_lower and state_upper differ in length");
  require(c.control_lower.size() == c.control_upper.size(),
          "[verify] control_lower and control_upper differ in length");
  require((c.state_lower.array() <= c.state_upper.array()).all() &&
              (c.control_lower.array() <= c.control_upper.array()).all(),
          "[verify] box lower bounds exceed upper bounds");
  try {
    c.tol.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[tolerances] ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in);
}

std::string mode_name(RunMode mode) { return mode == RunMode::kOpen ? "open" : "closed"; }

std::string variant_name(RhoVariant variant) {
  return variant == RhoVariant::kSontagSmooth ? "sontag" : "piecewise";
}

void write_config(const RunConfig& c, std::ostream& out) {
  const bool shorten = c.policy.kind == PathUpdatePolicy::Kind::kLocalShorten;
  // Empty vectors mean "not given" and are left out so the echo re-parses.
  auto vec = [](const char* key, const Vector& v) {
    return v.size() == 0 ? std::string() : std::string(key) + " = " + format_vector(v) + "\n";
  };
  out << "[system]\nname = " << c.system << "\n\n"
      << "[metric]\nname = " << c.metric << "\n\n"
      << "[rate]\nkind = " << c.rate_kind << "\nlambda = " << format_double(c.lambda) << "\n\n"
      << "[target]\n" << vec("state", c.target_state) << vec("control", c.target_control)
      << "\n"
      << "[run]\n" << vec("x0", c.x0) << "horizon = " << format_double(c.horizon)
      << "\ndt = " << format_double(c.dt) << "\npath_nodes = " << c.path_nodes
      << "\nrho = " << variant_name(c.variant) << "\nmode = " << mode_name(c.mode) << "\n\n"
      << "[closed_loop]\nperiod = " << format_double(c.period)
      << "\npolicy = " << (shorten ? "shorten" : "keep")
      << "\nshorten_iters = " << c.policy.iters
      << "\nsmoothing = " << format_double(c.policy.smoothing) << "\n\n"
      << "[tolerances]\nfd_step = " << format_double(c.tol.fd_step)
      << "\nreg_eps = " << format_double(c.tol.reg_eps)
      << "\nb_eps = " << format_double(c.tol.b_eps)
      << "\ndiss_tol = " << format_double(c.tol.diss_tol) << "\n\n"
      << "[verify]\n" << vec("state_lower", c.state_lower) << vec("state_upper", c.state_upper)
      << vec("control_lower", c.control_lower) << vec("control_upper", c.control_upper)
      << "samples = " << c.verify_samples << "\nkernel_tol = " << format_double(c.kernel_tol)
      << "\nmargin_eps = " << format_double(c.margin_eps)
      << "\ndelta_min = " << format_double(c.delta_min)
      << "\ndelta_max = " << format_double(c.delta_max)
      << "\nratio_cap = " << format_double(c.ratio_cap) << "\n\n"
      << "[output]\ndir = " << c.out_dir << "\nseed = " << c.seed << "\n";
}

}  // namespace finsler_ccm::cli
