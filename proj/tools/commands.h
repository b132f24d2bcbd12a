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

#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"
#include "finsler_ccm/geometry.h"
#include "finsler_ccm/metrics.h"

namespace finsler_ccm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitFailure = 3,
  kExitBlowup = 4,
};

/// Runs the configured open- or closed-loop simulation and writes
/// trajectory.csv, report.txt, config.resolved.ini and SVG plots to
/// config.out_dir.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Sampled checks of the controllability implication and the ratio bound.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Prints distance upper bounds in both directions.
int cmd_distance(const std::string& metric, const Vector& x1, const Vector& x2,
                 const DistanceOptions& opts, std::ostream& out, std::ostream& err);

/// Sampled Finsler axiom checks for a named metric.
int cmd_axioms(const std::string& metric, const SampleSpec& spec, std::ostream& out,
               std::ostream& err);

/// Command-line entry point; every exception is mapped to an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finsler_ccm::cli
