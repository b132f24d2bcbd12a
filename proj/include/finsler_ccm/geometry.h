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

#include <optional>
#include <vector>

#include "finsler_ccm/metrics.h"
#include "finsler_ccm/numerics.h"
#include "finsler_ccm/systems.h"

namespace finsler_ccm {

/// A curve c : [0, 1] -> R^n sampled on a uniform grid, with its tangents
/// c_s at the nodes. Node 0 is the start point, the last node the end point.
class DiscretizedPath {
 public:
  DiscretizedPath(std::vector<Vector> nodes, std::vector<Vector> tangents);

  /// Tangents from second-order finite differences of the nodes.
  static DiscretizedPath from_nodes(std::vector<Vector> nodes);

  const Grid1D& grid() const { return grid_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int dim() const { return static_cast<int>(nodes_.front().size()); }
  const std::vector<Vector>& nodes() const { return nodes_; }
  const std::vector<Vector>& tangents() const { return tangents_; }
  const Vector& node(int j) const { return nodes_[j]; }
  const Vector& tangent(int j) const { return tangents_[j]; }
  const Vector& front() const { return nodes_.front(); }
  const Vector& back() const { return nodes_.back(); }

  double min_tangent_norm() const;
  bool is_regular(double reg_eps) const { return min_tangent_norm() >= reg_eps; }

 private:
  Grid1D grid_;
  std::vector<Vector> nodes_;
  std::vector<Vector> tangents_;
};

/// Central differences in the interior, second-order one-sided stencils at
/// the ends (first order when there are only two nodes).
std::vector<Vector> finite_difference_tangents(const std::vector<Vector>& nodes,
                                               double step);

/// Straight chart line from x_a to x_b with exact tangents x_b - x_a.
/// Throws DegeneratePath if |x_b - x_a| < reg_eps.
DiscretizedPath make_straight_path(const Vector& x_a, const Vector& x_b,
                                   int node_count, double reg_eps = 1e-8);

/// V(c(s_j), c_s(s_j)) at every node.
std::vector<double> node_values(const DiscretizedPath& path,
                                const FinslerMetric& metric);

/// Trapezoid approximation of the integral of V(c, c_s)^(1/p) over [0, 1].
double energy_integral(const DiscretizedPath& path, const FinslerMetric& metric);

/// Trapezoid approximation of the integral of F(c, c_s) over [0, 1].
double length_integral(const DiscretizedPath& path, const FinslerMetric& metric);

struct DistanceOptions {
  int node_count = 50;
  int max_iters = 200;
  double step = 0.1;       // initial gradient step
  double fd_step = 1e-7;   // objective gradient by central differences
  double reg_eps = 1e-8;
  std::optional<Box> domain;  // nodes are projected onto it
};

struct DistanceResult {
  double upper_bound;
  DiscretizedPath path;
  int accepted_iters = 0;
  std::vector<double> history;  // objective after each accepted iteration
};

/// Upper bound on the Finsler distance d(x1, x2): projected gradient descent
/// on the interior nodes of a path from x1 to x2, starting from the straight
/// line, accepting only steps that decrease the length. The objective is the
/// length of the polygon through the nodes (F at segment midpoints), so the
/// optimizer cannot exploit odd/even modes invisible to central differences.
DistanceResult approx_distance(const Vector& x1, const Vector& x2,
                               const FinslerMetric& metric,
                               const DistanceOptions& opts = {});

/// Local shortening: every interior node moves toward the mean of its
/// neighbours by `smoothing`; a candidate is kept only if it stays regular and
/// its energy integral does not increase. Endpoints never move.
DiscretizedPath shorten_path(const DiscretizedPath& path,
                             const FinslerMetric& metric, int iters,
                             double smoothing = 0.5, double reg_eps = 1e-8);

}  // namespace finsler_ccm
