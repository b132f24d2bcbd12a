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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "finsler_ccm/controller.h"
#include "finsler_ccm/sampled_loop.h"
#include "finsler_ccm/verify.h"

namespace finsler_ccm::cli {

/// Malformed or inconsistent configuration text.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { kOpen, kClosed };

/// Fully resolved run description. Defaults apply to every key the
/// configuration file leaves out.
struct RunConfig {
  std::string system;
  std::string metric;

  std::string rate_kind = "zero";  // zero | linear
  double lambda = 1.0;

  Vector target_state;   // defaults to the origin
  Vector target_control; // defaults to zero

  Vector x0;
  double horizon = 5.0;
  double dt = 0.01;
  int path_nodes = 50;
  RhoVariant variant = RhoVariant::kSontagSmooth;
  RunMode mode = RunMode::kOpen;

  double period = 0.1;
  PathUpdatePolicy policy;

  ToleranceConfig tol;

  Vector state_lower;
  Vector state_upper;
  Vector control_lower;
  Vector control_upper;
  int verify_samples = 1000;
  double kernel_tol = 1e-6;
  double margin_eps = 1e-6;
  double delta_min = 0.1;
  double delta_max = 10.0;
  double ratio_cap = 1e9;

  std::string out_dir = "out";
  std::uint64_t seed = 0;

  RateSpec rate() const;
};

/// Parses `[section]` / `key = value` text. Vectors are whitespace or comma
/// separated; the token `pi` (optionally signed) stands for 3.14159...
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Parses a vector literal such as "1, -2" or "0 pi".
Vector parse_vector(const std::string& text);

/// Writes every resolved field back in the input format.
void write_config(const RunConfig& config, std::ostream& out);

std::string mode_name(RunMode mode);
std::string variant_name(RhoVariant variant);

}  // namespace finsler_ccm::cli
