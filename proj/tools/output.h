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

#include "finsler_ccm/trajectory.h"

namespace finsler_ccm::cli {

/// Fixed 12-significant-digit formatting used for every CSV field.
std::string format_g12(double value);

/// Columns: t, x1..xn, u1..um, energy, dist_est, V_000..V_{N-1}.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal static SVG line chart: frame, ticks, one polyline per series and a
/// legend.
void write_line_plot(std::ostream& out, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series);

}  // namespace finsler_ccm::cli
