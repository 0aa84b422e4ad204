#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"
#include "rfi/merit.hpp"
#include "rfi/operators.hpp"
#include "rfi/registry.hpp"
#include "rfi/runner.hpp"
#include "rfi/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rfi;

namespace {

// wrapper so the stl variant caster does not claim the operator type
struct PyOperator {
  OperatorSpec op;
};

py::dict run(const Scenario& sc, std::optional<std::uint64_t> seed, std::optional<std::string> out_dir, unsigned threads,
             bool write_files) {
  RunOptions opts;
  opts.seed = seed;
  opts.out_dir = std::move(out_dir);
  opts.threads = threads;
  opts.write_files = write_files;
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run_scenario(sc, opts);
  }
  py::list assertions;
  for (const auto& a : r.assertions) assertions.append(py::make_tuple(a.name, a.passed, a.detail));
  py::dict d;
  d["passed"] = r.passed();
  d["exit_code"] = r.exit_code();
  d["report"] = r.report;
  d["files"] = r.files;
  d["out_dir"] = r.out_dir;
  d["assertions"] = assertions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rfi, m) {
  m.doc() = "Random function iterations for stochastic feasibility problems";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<UnsupportedOperatorError>(m, "UnsupportedOperatorError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());

  py::class_<PyOperator>(m, "Operator")
      .def("__call__", [](const PyOperator& o, const Point& x) { return apply(o.op, x); }, py::arg("x"))
      .def("residual", [](const PyOperator& o, const Point& x) { return fixed_point_residual(o.op, x); }, py::arg("x"))
      .def_property_readonly("is_projector", [](const PyOperator& o) { return is_projector(o.op); })
      .def_property_readonly("averaged_constant", [](const PyOperator& o) { return averaged_constant(o.op); })
      .def("__repr__", [](const PyOperator& o) { return describe(o.op); });

  m.def("interval_projector", [](double r) { return PyOperator{ops::IntervalProjector{r}}; }, py::arg("r"));
  m.def("line_projector", [](double alpha) { return PyOperator{ops::LineProjector{alpha}}; }, py::arg("alpha"));
  m.def("ball_projector", [](const Point& c, double radius) { return PyOperator{ops::BallProjector{c, radius}}; },
        py::arg("center"), py::arg("radius"));
  m.def("halfspace_projector", [](const Point& n, double b) { return PyOperator{ops::HalfspaceProjector{n, b}}; },
        py::arg("normal"), py::arg("offset"));
  m.def("hyperplane_projector",
        [](const Point& u, double b) { return PyOperator{ops::AffineHyperplaneProjector{u, b}}; }, py::arg("u"),
        py::arg("b"));
  m.def("rotation", [](double phi) { return PyOperator{ops::Rotation{phi}}; }, py::arg("phi"));
  m.def("huber", [](double alpha) { return PyOperator{ops::Huber{alpha}}; }, py::arg("alpha"));
  m.def("exp_prox", []() { return PyOperator{ops::ExpQuasiconvexProx{}}; });

  m.def("merit_intervals", &merit_closed_intervals, py::arg("eps"), py::arg("x"));
  m.def("grad_intervals", &grad_closed_intervals, py::arg("eps"), py::arg("x"));
  m.def("merit_lines", &merit_closed_lines, py::arg("beta"), py::arg("x"));
  m.def("grad_lines", &grad_closed_lines, py::arg("beta"), py::arg("x"));
  m.def("kappa_lines", &kappa_closed_lines, py::arg("beta"));
  m.def("disk_feasibility", &disk_feasibility_closed, py::arg("rho"), py::arg("lam"));
  m.def("rate_bound", &rate_bound, py::arg("kappa"), py::arg("alpha"));
  m.def("epsilon_budget", &epsilon_fixed_point_budget, py::arg("kappa"), py::arg("alpha"), py::arg("merit_x0"),
        py::arg("eps"), py::arg("beta"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("example", &Scenario::example)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("steps", &Scenario::steps)
      .def_readonly("trajectories", &Scenario::trajectories);
  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("name") = "scenario");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("run_scenario", &run, py::arg("scenario"), py::arg("seed") = py::none(), py::arg("out_dir") = py::none(),
        py::arg("threads") = 1u, py::arg("write_files") = false);
  m.def("list_builtin", &list_builtin);

  m.def(
      "solve_integral_equation",
      [](const std::string& kernel, const std::string& rhs, double a, double b, Eigen::Index nodes, std::size_t iterations,
         std::uint64_t seed) {
        const auto p = discretize(make_kernel(kernel, a, b), make_rhs(rhs), a, b, nodes);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = solve_random_sweep(p, Point::Zero(nodes), iterations, seed);
        }
        py::dict d;
        d["grid"] = p.grid;
        d["solution"] = r.solution;
        d["sup_residual"] = r.history.sup_norm;
        d["l2_residual"] = r.history.l2_norm;
        return d;
      },
      py::arg("kernel"), py::arg("rhs"), py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("nodes") = 201,
      py::arg("iterations") = 200000, py::arg("seed") = 0);
}
