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

#include <span>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finsler_ccm/controller.h"
#include "finsler_ccm/errors.h"
#include "finsler_ccm/geometry.h"
#include "finsler_ccm/metrics.h"
#include "finsler_ccm/numerics.h"
#include "finsler_ccm/sampled_loop.h"
#include "finsler_ccm/systems.h"
#include "finsler_ccm/trajectory.h"
#include "finsler_ccm/verify.h"

namespace py = pybind11;
using namespace py::literals;

namespace finsler_ccm {
namespace {

// Exception types, most specific first so the translator can walk them in order.
struct ErrorTypes {
  py::object base, blowup, insufficient, shape, unknown_example, unknown_metric, nonsmooth,
      invalid_metric, degenerate, not_exponential, violated;
};

ErrorTypes& error_types() {
  static ErrorTypes* types = new ErrorTypes();
  return *types;
}

void register_errors(py::module_& m) {
  ErrorTypes& t = error_types();
  auto make = [&](const char* name, py::handle parent) {
    py::object type = py::reinterpret_steal<py::object>(
        PyErr_NewException((std::string("finsler_ccm._core.") + name).c_str(), parent.ptr(),
                           nullptr));
    m.attr(name) = type;
    return type;
  };
  t.base = make("Error", PyExc_RuntimeError);
  t.blowup = make("NumericalBlowup", t.base);
  t.insufficient = make("InsufficientSamples", t.base);
  t.shape = make("ShapeError", t.base);
  t.unknown_example = make("UnknownExample", t.base);
  t.unknown_metric = make("UnknownMetric", t.base);
  t.nonsmooth = make("NonSmoothAtZero", t.base);
  t.invalid_metric = make("InvalidMetric", t.base);
  t.degenerate = make("DegeneratePath", t.base);
  t.not_exponential = make("RateNotExponential", t.base);
  t.violated = make("ConditionViolated", t.base);

  py::register_exception_translator([](std::exception_ptr p) {
    if (!p) return;
    const ErrorTypes& t = error_types();
    try {
      std::rethrow_exception(p);
    } catch (const ConditionViolated& e) {
      py::object exc = t.violated(e.what());
      exc.attr("state") = py::cast(e.state());
      exc.attr("tangent") = py::cast(e.tangent());
      exc.attr("control") = py::cast(e.control());
      exc.attr("a") = e.a();
      exc.attr("b") = e.b();
      exc.attr("node") = e.node();
      PyErr_SetObject(t.violated.ptr(), exc.ptr());
    } catch (const NumericalBlowup& e) {
      PyErr_SetString(t.blowup.ptr(), e.what());
    } catch (const InsufficientSamples& e) {
      PyErr_SetString(t.insufficient.ptr(), e.what());
    } catch (const ShapeError& e) {
      PyErr_SetString(t.shape.ptr(), e.what());
    } catch (const UnknownExample& e) {
      PyErr_SetString(t.unknown_example.ptr(), e.what());
    } catch (const UnknownMetric& e) {
      PyErr_SetString(t.unknown_metric.ptr(), e.what());
    } catch (const NonSmoothAtZero& e) {
      PyErr_SetString(t.nonsmooth.ptr(), e.what());
    } catch (const InvalidMetric& e) {
      PyErr_SetString(t.invalid_metric.ptr(), e.what());
    } catch (const DegeneratePath& e) {
      PyErr_SetString(t.degenerate.ptr(), e.what());
    } catch (const RateNotExponential& e) {
      PyErr_SetString(t.not_exponential.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(t.base.ptr(), e.what());
    }
  });
}

Matrix stack(const std::vector<TrajectorySample>& samples, bool control) {
  if (samples.empty()) return Matrix(0, 0);
  const auto& first = control ? samples.front().control : samples.front().state;
  Matrix out(static_cast<Eigen::Index>(samples.size()), first.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = control ? samples[k].control : samples[k].state;
  }
  return out;
}

template <typename Fn>
Vector column(const std::vector<TrajectorySample>& samples, Fn&& get) {
  Vector out(static_cast<Eigen::Index>(samples.size()));
  for (size_t k = 0; k < samples.size(); ++k) out(static_cast<Eigen::Index>(k)) = get(samples[k]);
  return out;
}

void bind_numerics(py::module_& m) {
  py::class_<Grid1D>(m, "Grid1D")
      .def(py::init<double, double, int>(), "lower"_a, "upper"_a, "count"_a)
      .def_property_readonly("count", &Grid1D::count)
      .def_property_readonly("lower", &Grid1D::lower)
      .def_property_readonly("upper", &Grid1D::upper)
      .def_property_readonly("step", &Grid1D::step)
      .def("node", &Grid1D::node);

  py::class_<ToleranceConfig>(m, "ToleranceConfig")
      .def(py::init<>())
      .def_readwrite("fd_step", &ToleranceConfig::fd_step)
      .def_readwrite("reg_eps", &ToleranceConfig::reg_eps)
      .def_readwrite("b_eps", &ToleranceConfig::b_eps)
      .def_readwrite("diss_tol", &ToleranceConfig::diss_tol)
      .def("validate", &ToleranceConfig::validate);

  m.def(
      "rk4_step",
      [](const std::function<Vector(const Vector&)>& field, const Vector& state, double dt) {
        return rk4_step(field, state, dt);
      },
      "field"_a, "state"_a, "dt"_a);
  m.def(
      "trapezoid_integral",
      [](const std::vector<double>& samples, double step) {
        return trapezoid_integral(std::span<const double>(samples), step);
      },
      "samples"_a, "step"_a);
  m.def("finite_diff_jacobian", &finite_diff_jacobian, "fn"_a, "point"_a, "step"_a);
}

void bind_systems(py::module_& m) {
  py::class_<Box>(m, "Box")
      .def(py::init([](Vector lower, Vector upper) {
             if (lower.size() != upper.size()) throw ShapeError("box bounds differ in size");
             return Box{std::move(lower), std::move(upper)};
           }),
           "lower"_a, "upper"_a)
      .def_static("unbounded", &Box::unbounded, "dim"_a)
      .def_static("uniform", &Box::uniform, "dim"_a, "lower"_a, "upper"_a)
      .def_readonly("lower", &Box::lower)
      .def_readonly("upper", &Box::upper)
      .def_property_readonly("dim", &Box::dim)
      .def("contains", &Box::contains)
      .def("clamp", &Box::clamp);

  py::class_<ControlAffineSystem>(m, "ControlAffineSystem")
      .def_property_readonly("name", &ControlAffineSystem::name)
      .def_property_readonly("state_dim", &ControlAffineSystem::state_dim)
      .def_property_readonly("input_dim", &ControlAffineSystem::input_dim)
      .def_property_readonly("domain", &ControlAffineSystem::domain)
      .def("drift", &ControlAffineSystem::drift, "x"_a)
      .def("input_matrix", &ControlAffineSystem::input_matrix, "x"_a)
      .def("drift_jacobian", &ControlAffineSystem::drift_jacobian, "x"_a)
      .def("__repr__", [](const ControlAffineSystem& s) {
        return "<ControlAffineSystem '" + s.name() + "' n=" + std::to_string(s.state_dim()) +
               " m=" + std::to_string(s.input_dim()) + ">";
      });

  m.def("load_example", &load_example, "name"_a);
  m.def("example_names", &example_names);
  m.def("eval_dynamics", &eval_dynamics, "sys"_a, "x"_a, "u"_a);
  m.def("eval_A", &eval_A, "sys"_a, "x"_a, "u"_a);
  m.def("eval_differential", &eval_differential, "sys"_a, "x"_a, "u"_a, "dx"_a, "du"_a);

  py::class_<TargetTrajectory>(m, "TargetTrajectory")
      .def(py::init([](std::function<Vector(double)> x_star,
                       std::function<Vector(double)> u_star) {
             return TargetTrajectory{std::move(x_star), std::move(u_star)};
           }),
           "x_star"_a, "u_star"_a)
      .def_static("constant", &TargetTrajectory::constant, "state"_a, "control"_a)
      .def("x_star", [](const TargetTrajectory& t, double time) { return t.x_star(time); })
      .def("u_star", [](const TargetTrajectory& t, double time) { return t.u_star(time); });
  m.def("target_residual", &target_residual, "sys"_a, "target"_a, "t0"_a, "t1"_a,
        "samples"_a = 11, "h"_a = 1e-4);
}

void bind_metrics(py::module_& m) {
  py::class_<FinslerMetric>(m, "FinslerMetric")
      .def_property_readonly("name", &FinslerMetric::name)
      .def_property_readonly("dim", &FinslerMetric::dim)
      .def_property_readonly("p", &FinslerMetric::p)
      .def_property_readonly("c1", &FinslerMetric::c1)
      .def_property_readonly("c2", &FinslerMetric::c2)
      .def("value", &FinslerMetric::value, "x"_a, "delta"_a)
      .def("structure", &FinslerMetric::structure, "x"_a, "delta"_a)
      .def("state_gradient", &FinslerMetric::state_gradient, "x"_a, "delta"_a)
      .def("tangent_gradient", &FinslerMetric::tangent_gradient, "x"_a, "delta"_a)
      .def("__repr__", [](const FinslerMetric& f) {
        return "<FinslerMetric '" + f.name() + "' dim=" + std::to_string(f.dim()) + ">";
      });

  m.def("load_metric", &load_metric, "name"_a);
  m.def("metric_names", &metric_names);
  m.def("eval_F", &eval_F, "metric"_a, "x"_a, "delta"_a);

  py::class_<AxiomResult>(m, "AxiomResult")
      .def_readonly("axiom", &AxiomResult::axiom)
      .def_readonly("passed", &AxiomResult::passed)
      .def_readonly("checked", &AxiomResult::checked)
      .def_readonly("worst", &AxiomResult::worst)
      .def_readonly("x", &AxiomResult::x)
      .def_readonly("delta", &AxiomResult::delta)
      .def_readonly("note", &AxiomResult::note);
  py::class_<AxiomReport>(m, "AxiomReport")
      .def_readonly("metric", &AxiomReport::metric)
      .def_readonly("results", &AxiomReport::results)
      .def("passed", &AxiomReport::passed)
      .def("result", &AxiomReport::result, py::return_value_policy::copy);
  py::class_<SampleSpec>(m, "SampleSpec")
      .def(py::init<>())
      .def_readwrite("box", &SampleSpec::box)
      .def_readwrite("count", &SampleSpec::count)
      .def_readwrite("seed", &SampleSpec::seed)
      .def_readwrite("delta_min", &SampleSpec::delta_min)
      .def_readwrite("delta_max", &SampleSpec::delta_max);
  m.def("check_finsler_axioms", &check_finsler_axioms, "metric"_a, "spec"_a = SampleSpec{});
}

void bind_geometry(py::module_& m) {
  py::class_<DiscretizedPath>(m, "DiscretizedPath")
      .def(py::init<std::vector<Vector>, std::vector<Vector>>(), "nodes"_a, "tangents"_a)
      .def_static("from_nodes", &DiscretizedPath::from_nodes, "nodes"_a)
      .def_property_readonly("grid", &DiscretizedPath::grid)
      .def_property_readonly("nodes", &DiscretizedPath::nodes)
      .def_property_readonly("tangents", &DiscretizedPath::tangents)
      .def_property_readonly("dim", &DiscretizedPath::dim)
      .def("__len__", &DiscretizedPath::size)
      .def("min_tangent_norm", &DiscretizedPath::min_tangent_norm)
      .def("is_regular", &DiscretizedPath::is_regular, "reg_eps"_a);

  m.def("make_straight_path", &make_straight_path, "x_a"_a, "x_b"_a, "node_count"_a,
        "reg_eps"_a = 1e-8);
  m.def("node_values", &node_values, "path"_a, "metric"_a);
  m.def("energy_integral", &energy_integral, "path"_a, "metric"_a);
  m.def("length_integral", &length_integral, "path"_a, "metric"_a);

  py::class_<DistanceOptions>(m, "DistanceOptions")
      .def(py::init<>())
      .def_readwrite("node_count", &DistanceOptions::node_count)
      .def_readwrite("max_iters", &DistanceOptions::max_iters)
      .def_readwrite("step", &DistanceOptions::step)
      .def_readwrite("fd_step", &DistanceOptions::fd_step)
      .def_readwrite("reg_eps", &DistanceOptions::reg_eps)
      .def_readwrite("domain", &DistanceOptions::domain);
  py::class_<DistanceResult>(m, "DistanceResult")
      .def_readonly("upper_bound", &DistanceResult::upper_bound)
      .def_readonly("path", &DistanceResult::path)
      .def_readonly("accepted_iters", &DistanceResult::accepted_iters)
      .def_readonly("history", &DistanceResult::history);
  m.def("approx_distance", &approx_distance, "x1"_a, "x2"_a, "metric"_a,
        "opts"_a = DistanceOptions{});
  m.def("shorten_path", &shorten_path, "path"_a, "metric"_a, "iters"_a, "smoothing"_a = 0.5,
        "reg_eps"_a = 1e-8);
}

void bind_controller(py::module_& m) {
  py::class_<RateSpec> rate(m, "RateSpec");
  py::enum_<RateSpec::Kind>(rate, "Kind")
      .value("ZERO", RateSpec::Kind::kZero)
      .value("LINEAR", RateSpec::Kind::kLinear)
      .value("CLASS_K", RateSpec::Kind::kClassK);
  rate.def_static("zero", &RateSpec::zero)
      .def_static("linear", &RateSpec::linear, "lam"_a)
      .def_static("class_k", &RateSpec::class_k, "fn"_a)
      .def_property_readonly("kind", &RateSpec::kind)
      .def_property_readonly("lam", &RateSpec::lambda)
      .def("__call__", &RateSpec::operator(), "v"_a);

  py::enum_<RhoVariant>(m, "RhoVariant")
      .value("SONTAG_SMOOTH", RhoVariant::kSontagSmooth)
      .value("PAPER_PIECEWISE", RhoVariant::kPaperPiecewise);

  py::class_<ABValues>(m, "ABValues")
      .def_readonly("a", &ABValues::a)
      .def_readonly("b", &ABValues::b)
      .def("__iter__", [](const ABValues& v) {
        return py::iter(py::make_tuple(v.a, v.b));
      });

  m.def("eval_ab", &eval_ab, "sys"_a, "metric"_a, "rate"_a, "x"_a, "delta"_a, "u"_a);
  m.def("eval_rho", &eval_rho, "a"_a, "b"_a, "variant"_a = RhoVariant::kSontagSmooth,
        "b_eps"_a = 1e-12);
  m.def("eval_k_delta", &eval_k_delta, "sys"_a, "metric"_a, "rate"_a, "x"_a, "delta"_a, "u"_a,
        "variant"_a = RhoVariant::kSontagSmooth, "b_eps"_a = 1e-12);

  py::class_<ControlProfile>(m, "ControlProfile")
      .def_readonly("grid", &ControlProfile::grid)
      .def_readonly("values", &ControlProfile::values)
      .def_readonly("slopes", &ControlProfile::slopes);
  m.def("integrate_kp", &integrate_kp, "sys"_a, "metric"_a, "rate"_a, "path"_a, "u_star"_a,
        "variant"_a = RhoVariant::kSontagSmooth, "tol"_a = ToleranceConfig{});

  py::class_<ForwardImage>(m, "ForwardImage")
      .def_readonly("path", &ForwardImage::path)
      .def_readonly("applied_control", &ForwardImage::applied_control)
      .def_readonly("profile", &ForwardImage::profile)
      .def_readonly("regularity_lost", &ForwardImage::regularity_lost)
      .def_readonly("boundary_touched", &ForwardImage::boundary_touched);
  m.def("propagate_forward_image", &propagate_forward_image, "sys"_a, "metric"_a, "rate"_a,
        "path"_a, "u_star_t"_a, "dt"_a, "variant"_a = RhoVariant::kSontagSmooth,
        "tol"_a = ToleranceConfig{});

  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("horizon", &RunOptions::horizon)
      .def_readwrite("dt", &RunOptions::dt)
      .def_readwrite("path_nodes", &RunOptions::path_nodes)
      .def_readwrite("variant", &RunOptions::variant)
      .def_readwrite("tol", &RunOptions::tol);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("state", &TrajectorySample::state)
      .def_readonly("control", &TrajectorySample::control)
      .def_readonly("energy", &TrajectorySample::energy)
      .def_readonly("length", &TrajectorySample::length)
      .def_readonly("node_values", &TrajectorySample::node_values)
      .def_readonly("path_replaced", &TrajectorySample::path_replaced);
  py::class_<SampleEvent>(m, "SampleEvent")
      .def_readonly("t", &SampleEvent::t)
      .def_readonly("forward_energy", &SampleEvent::forward_energy)
      .def_readonly("candidate_energy", &SampleEvent::candidate_energy)
      .def_readonly("adopted", &SampleEvent::adopted);
  py::enum_<Termination>(m, "Termination")
      .value("COMPLETED", Termination::kCompleted)
      .value("CONDITION_VIOLATED", Termination::kConditionViolated);
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("state_dim", &Trajectory::state_dim)
      .def_readonly("input_dim", &Trajectory::input_dim)
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("events", &Trajectory::events)
      .def_readonly("boundary_touched", &Trajectory::boundary_touched)
      .def_readonly("regularity_lost", &Trajectory::regularity_lost)
      .def_readonly("termination", &Trajectory::termination)
      .def_readonly("diagnostic", &Trajectory::diagnostic)
      .def("__len__", [](const Trajectory& t) { return t.samples.size(); })
      .def_property_readonly(
          "times", [](const Trajectory& t) { return column(t.samples, [](auto& s) { return s.t; }); })
      .def_property_readonly("states", [](const Trajectory& t) { return stack(t.samples, false); })
      .def_property_readonly("controls", [](const Trajectory& t) { return stack(t.samples, true); })
      .def_property_readonly("energies", [](const Trajectory& t) {
        return column(t.samples, [](auto& s) { return s.energy; });
      });

  m.def("open_loop_run", &open_loop_run, "sys"_a, "metric"_a, "rate"_a, "target"_a, "x0"_a,
        "opts"_a = RunOptions{});
}

void bind_sampled_loop(py::module_& m) {
  py::class_<SampleSchedule>(m, "SampleSchedule")
      .def(py::init<std::vector<double>>(), "times"_a)
      .def_static("uniform", &SampleSchedule::uniform, "t0"_a, "period"_a, "horizon"_a)
      .def_property_readonly("times", &SampleSchedule::times);

  py::class_<PathUpdatePolicy> policy(m, "PathUpdatePolicy");
  py::enum_<PathUpdatePolicy::Kind>(policy, "Kind")
      .value("KEEP_FORWARD_IMAGE", PathUpdatePolicy::Kind::kKeepForwardImage)
      .value("LOCAL_SHORTEN", PathUpdatePolicy::Kind::kLocalShorten);
  policy.def_static("keep_forward_image", &PathUpdatePolicy::keep_forward_image)
      .def_static("local_shorten", &PathUpdatePolicy::local_shorten, "iters"_a)
      .def_readwrite("kind", &PathUpdatePolicy::kind)
      .def_readwrite("iters", &PathUpdatePolicy::iters)
      .def_readwrite("smoothing", &PathUpdatePolicy::smoothing);

  m.def("closed_loop_run", &closed_loop_run, "sys"_a, "metric"_a, "rate"_a, "target"_a, "x0"_a,
        "schedule"_a, "policy"_a, "opts"_a = RunOptions{});
}

void bind_verify(py::module_& m) {
  py::class_<Violation>(m, "Violation")
      .def_readonly("x", &Violation::x)
      .def_readonly("u", &Violation::u)
      .def_readonly("delta", &Violation::delta)
      .def_readonly("lhs", &Violation::lhs)
      .def_readonly("rhs", &Violation::rhs)
      .def_readonly("t", &Violation::t)
      .def_readonly("node", &Violation::node);
  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("check", &VerificationReport::check)
      .def_readonly("checked_samples", &VerificationReport::checked_samples)
      .def_readonly("violations", &VerificationReport::violations)
      .def_readonly("max_ratio", &VerificationReport::max_ratio)
      .def_readonly("ratio_cap", &VerificationReport::ratio_cap)
      .def_readonly("notes", &VerificationReport::notes)
      .def("ratio_unbounded", &VerificationReport::ratio_unbounded)
      .def("passed", &VerificationReport::passed);

  py::class_<Th1Options>(m, "Th1Options")
      .def(py::init<>())
      .def_readwrite("state_box", &Th1Options::state_box)
      .def_readwrite("control_box", &Th1Options::control_box)
      .def_readwrite("samples", &Th1Options::samples)
      .def_readwrite("kernel_tol", &Th1Options::kernel_tol)
      .def_readwrite("margin_eps", &Th1Options::margin_eps)
      .def_readwrite("seed", &Th1Options::seed)
      .def_readwrite("search_kernel", &Th1Options::search_kernel)
      .def_readwrite("kernel_sampler", &Th1Options::kernel_sampler);
  m.def("check_th1", &check_th1, "sys"_a, "metric"_a, "rate"_a, "opts"_a);

  py::class_<RatioOptions>(m, "RatioOptions")
      .def(py::init<>())
      .def_readwrite("state_box", &RatioOptions::state_box)
      .def_readwrite("delta_min", &RatioOptions::delta_min)
      .def_readwrite("delta_max", &RatioOptions::delta_max)
      .def_readwrite("samples", &RatioOptions::samples)
      .def_readwrite("seed", &RatioOptions::seed)
      .def_readwrite("cap", &RatioOptions::cap);
  m.def("check_ratio_bound", &check_ratio_bound, "sys"_a, "metric"_a, "opts"_a);
  m.def("dissipation_monitor", &dissipation_monitor, "traj"_a, "rate"_a, "diss_tol"_a = 1e-3);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("fitted_rate", &ConvergenceReport::fitted_rate)
      .def_readonly("predicted_rate", &ConvergenceReport::predicted_rate)
      .def_readonly("overshoot_observed", &ConvergenceReport::overshoot_observed)
      .def_readonly("overshoot_bound", &ConvergenceReport::overshoot_bound)
      .def_readonly("envelope_ratio", &ConvergenceReport::envelope_ratio)
      .def("rate_ok", &ConvergenceReport::rate_ok)
      .def("overshoot_ok", &ConvergenceReport::overshoot_ok);
  m.def("convergence_report", &convergence_report, "traj"_a, "metric"_a, "rate"_a);
}

}  // namespace
}  // namespace finsler_ccm

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finsler-Lyapunov control contraction metrics";
  finsler_ccm::register_errors(m);
  finsler_ccm::bind_numerics(m);
  finsler_ccm::bind_systems(m);
  finsler_ccm::bind_metrics(m);
  finsler_ccm::bind_geometry(m);
  finsler_ccm::bind_controller(m);
  finsler_ccm::bind_sampled_loop(m);
  finsler_ccm::bind_verify(m);
}
