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

#include "finsler_ccm/geometry.h"

#include <cmath>
#include <stdexcept>

namespace finsler_ccm {
namespace {

Grid1D unit_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("a path needs at least 2 nodes");
  return Grid1D(0.0, 1.0, static_cast<int>(count));
}

void check_tangent(const FinslerMetric& metric, const Vector& tangent, int node) {
  if (metric.nonsmooth_at_zero() && tangent.isZero(0.0)) {
    throw NonSmoothAtZero("zero tangent at path node " + std::to_string(node) +
                          " for metric '" + metric.name() + "'");
  }
}

}  // namespace

DiscretizedPath::DiscretizedPath(std::vector<Vector> nodes,
                                 std::vector<Vector> tangents)
    : grid_(unit_grid(nodes.size())),
      nodes_(std::move(nodes)),
      tangents_(std::move(tangents)) {
  if (tangents_.size() != nodes_.size()) {
    throw ShapeError("path needs one tangent per node");
  }
  const Eigen::Index n = nodes_.front().size();
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (nodes_[j].size() != n || tangents_[j].size() != n) {
      throw ShapeError("path nodes and tangents must share one dimension");
    }
  }
}

DiscretizedPath DiscretizedPath::from_nodes(std::vector<Vector> nodes) {
  const Grid1D grid = unit_grid(nodes.size());
  std::vector<Vector> tangents = finite_difference_tangents(nodes, grid.step());
  return DiscretizedPath(std::move(nodes), std::move(tangents));
}

double DiscretizedPath::min_tangent_norm() const {
  double smallest = std::numeric_limits<double>::infinity();
  for (const Vector& t : tangents_) smallest = std::min(smallest, t.norm());
  return smallest;
}

std::vector<Vector> finite_difference_tangents(const std::vector<Vector>& nodes,
                                               double step) {
  const std::size_t count = nodes.size();
  if (count < 2) throw std::invalid_argument("need at least 2 nodes for tangents");
  std::vector<Vector> tangents(count);
  if (count == 2) {
    tangents[0] = tangents[1] = (nodes[1] - nodes[0]) / step;
    return tangents;
  }
  for (std::size_t j = 1; j + 1 < count; ++j) {
    tangents[j] = (nodes[j + 1] - nodes[j - 1]) / (2.0 * step);
  }
  tangents[0] = (-3.0 * nodes[0] + 4.0 * nodes[1] - nodes[2]) / (2.0 * step);
  tangents[count - 1] =
      (3.0 * nodes[count - 1] - 4.0 * nodes[count - 2] + nodes[count - 3]) / (2.0 * step);
  return tangents;
}

DiscretizedPath make_straight_path(const Vector& x_a, const Vector& x_b,
                                   int node_count, double reg_eps) {
  if (x_a.size() != x_b.size()) throw ShapeError("path endpoints differ in dimension");
  if (node_count < 2) throw std::invalid_argument("a path needs at least 2 nodes");
  const Vector chord = x_b - x_a;
  if (chord.norm() < reg_eps) {
    throw DegeneratePath("path endpoints coincide (|x_b - x_a| = " +
                         std::to_string(chord.norm()) + ")");
  }
  const Grid1D grid(0.0, 1.0, node_count);
  std::vector<Vector> nodes(node_count);
  for (int j = 0; j < node_count; ++j) nodes[j] = x_a + grid.node(j) * chord;
  nodes.back() = x_b;
  return DiscretizedPath(std::move(nodes), std::vector<Vector>(node_count, chord));
}

std::vector<double> node_values(const DiscretizedPath& path,
                                const FinslerMetric& metric) {
  std::vector<double> values(path.size());
  for (int j = 0; j < path.size(); ++j) {
    check_tangent(metric, path.tangent(j), j);
    values[j] = metric.value(path.node(j), path.tangent(j));
  }
  return values;
}

double energy_integral(const DiscretizedPath& path, const FinslerMetric& metric) {
  std::vector<double> integrand = node_values(path, metric);
  for (double& v : integrand) {
    if (v < 0.0) throw InvalidMetric("metric '" + metric.name() + "' returned a negative V");
    v = std::pow(v, 1.0 / metric.p());
  }
  return trapezoid_integral(integrand, path.grid().step());
}

double length_integral(const DiscretizedPath& path, const FinslerMetric& metric) {
  std::vector<double> integrand(path.size());
  for (int j = 0; j < path.size(); ++j) {
    check_tangent(metric, path.tangent(j), j);
    integrand[j] = eval_F(metric, path.node(j), path.tangent(j));
  }
  return trapezoid_integral(integrand, path.grid().step());
}

namespace {

// Length of the polygonal curve through the nodes, with F evaluated at each
// segment midpoint. For state-independent F this is the exact length of a
// member of the path family, hence an upper bound on the distance.
double segment_length(const FinslerMetric& metric, const Vector& a, const Vector& b,
                      double step) {
  const Vector chord = b - a;
  return step * eval_F(metric, Vector(0.5 * (a + b)), Vector(chord / step));
}

double polygon_length(const std::vector<Vector>& nodes, const FinslerMetric& metric,
                      double step) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    total += segment_length(metric, nodes[j], nodes[j + 1], step);
  }
  return total;
}

bool polygon_regular(const std::vector<Vector>& nodes, double step, double reg_eps) {
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    if ((nodes[j + 1] - nodes[j]).norm() < reg_eps * step) return false;
  }
  return true;
}

}  // namespace

DistanceResult approx_distance(const Vector& x1, const Vector& x2,
                               const FinslerMetric& metric,
                               const DistanceOptions& opts) {
  const DiscretizedPath straight =
      make_straight_path(x1, x2, opts.node_count, opts.reg_eps);
  const int count = straight.size();
  const int n = straight.dim();
  const double h = straight.grid().step();
  const Box domain = opts.domain.value_or(Box::unbounded(n));

  std::vector<Vector> nodes = straight.nodes();
  double best_value = polygon_length(nodes, metric, h);
  if (!std::isfinite(best_value)) {
    throw NumericalBlowup("approx_distance: non-finite length of the initial path");
  }
  DistanceResult result{best_value, straight, 0, {}};
  if (count <= 2) return result;

  double step = opts.step;
  for (int iter = 0; iter < opts.max_iters && step > 1e-12; ++iter) {
    // Moving node j only changes the two segments that touch it.
    std::vector<Vector> grad(count, Vector::Zero(n));
    double grad_norm2 = 0.0;
    for (int j = 1; j + 1 < count; ++j) {
      for (int i = 0; i < n; ++i) {
        Vector moved = nodes[j];
        auto local = [&](double offset) {
          moved(i) = nodes[j](i) + offset;
          return segment_length(metric, nodes[j - 1], moved, h) +
                 segment_length(metric, moved, nodes[j + 1], h);
        };
        const double plus = local(opts.fd_step);
        const double minus = local(-opts.fd_step);
        grad[j](i) = (plus - minus) / (2.0 * opts.fd_step);
        grad_norm2 += grad[j](i) * grad[j](i);
      }
    }
    if (!std::isfinite(grad_norm2)) {
      throw NumericalBlowup("approx_distance: non-finite objective gradient");
    }
    if (grad_norm2 < 1e-18) break;

    bool accepted = false;
    while (step > 1e-12) {
      std::vector<Vector> trial = nodes;
      for (int j = 1; j + 1 < count; ++j) trial[j] = domain.clamp(nodes[j] - step * grad[j]);
      if (polygon_regular(trial, h, opts.reg_eps)) {
        const double value = polygon_length(trial, metric, h);
        if (std::isnan(value)) {
          throw NumericalBlowup("approx_distance: non-finite objective");
        }
        if (value < best_value) {
          nodes = std::move(trial);
          best_value = value;
          result.history.push_back(value);
          ++result.accepted_iters;
          step *= 1.5;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  result.upper_bound = best_value;
  result.path = DiscretizedPath::from_nodes(std::move(nodes));
  return result;
}

DiscretizedPath shorten_path(const DiscretizedPath& path,
                             const FinslerMetric& metric, int iters,
                             double smoothing, double reg_eps) {
  DiscretizedPath current = path;
  if (path.size() <= 2) return current;
  double current_energy = energy_integral(current, metric);
  double eta = smoothing;
  int halvings = 0;
  for (int iter = 0; iter < iters;) {
    std::vector<Vector> nodes = current.nodes();
    for (int j = 1; j + 1 < current.size(); ++j) {
      const Vector mean = 0.5 * (current.node(j - 1) + current.node(j + 1));
      nodes[j] = current.node(j) + eta * (mean - current.node(j));
    }
    DiscretizedPath candidate = DiscretizedPath::from_nodes(std::move(nodes));
    bool accepted = false;
    if (candidate.is_regular(reg_eps)) {
      const double energy = energy_integral(candidate, metric);
      if (energy <= current_energy) {
        current = std::move(candidate);
        current_energy = energy;
        accepted = true;
      }
    }
    if (accepted) {
      ++iter;
      continue;
    }
    // Retry with a smaller move a few times before giving up.
    if (++halvings > 4) break;
    eta *= 0.5;
  }
  return current;
}

}  // namespace finsler_ccm
