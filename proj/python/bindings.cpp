#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wpflow/constraints.hpp"
#include "wpflow/errors.hpp"
#include "wpflow/flow.hpp"
#include "wpflow/functionals.hpp"
#include "wpflow/grid.hpp"
#include "wpflow/neumann.hpp"
#include "wpflow/stepper.hpp"

namespace py = pybind11;
using namespace wpflow;

namespace {

py::array_t<double> field_to_array(const Field& f) {
    if (f.grid.dim == 1) {
        py::array_t<double> out(static_cast<py::ssize_t>(f.grid.nx));
        std::copy(f.values.begin(), f.values.end(), out.mutable_data());
        return out;
    }
    py::array_t<double> out({static_cast<py::ssize_t>(f.grid.ny), static_cast<py::ssize_t>(f.grid.nx)});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

Field field_from_array(const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    Field f(g);
    if (static_cast<std::size_t>(a.size()) != g.size())
        throw std::invalid_argument("array size does not match the grid");
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constrained Willmore phase-field flow solver";

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Grid>(m, "Grid")
        .def_static("make_1d", &Grid::make_1d, py::arg("Lx"), py::arg("nx"))
        .def_static("make_2d", &Grid::make_2d, py::arg("Lx"), py::arg("Ly"), py::arg("nx"), py::arg("ny"))
        .def_readonly("dim", &Grid::dim)
        .def_readonly("nx", &Grid::nx)
        .def_readonly("ny", &Grid::ny)
        .def_readonly("Lx", &Grid::Lx)
        .def_readonly("Ly", &Grid::Ly)
        .def_readonly("hx", &Grid::hx)
        .def_readonly("hy", &Grid::hy)
        .def("size", &Grid::size)
        .def("measure", &Grid::measure)
        .def("cell_measure", &Grid::cell_measure)
        .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
        .def("__repr__", [](const Grid& g) {
            return g.dim == 1 ? "Grid(1d, Lx=" + std::to_string(g.Lx) + ", nx=" + std::to_string(g.nx) + ")"
                              : "Grid(2d, " + std::to_string(g.nx) + "x" + std::to_string(g.ny) + ")";
        });

    py::class_<Field>(m, "Field")
        .def(py::init([](const Grid& g, double fill) { return Field(g, fill); }),
             py::arg("grid"), py::arg("fill") = 0.0)
        .def(py::init(&field_from_array), py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &Field::grid)
        .def_property_readonly("values", &field_to_array)
        .def("all_finite", &Field::all_finite)
        .def("__len__", &Field::size);

    m.def("integrate", &integrate);
    m.def("mean", &mean);
    m.def("inner", &inner);
    m.def("norm_l2", &norm_l2);
    m.def("laplacian", &laplacian);
    m.def("dirichlet_energy", &dirichlet_energy);
    m.def("h1_norm_sq", &h1_norm_sq);
    m.def("h2_norm_sq", &h2_norm_sq);

    py::class_<PotentialParams>(m, "PotentialParams")
        .def(py::init<double>(), py::arg("a") = 1.0)
        .def_readonly("a", &PotentialParams::a);

    m.def("W", &W);
    m.def("W1", &W1);
    m.def("W2", &W2);
    m.def("W3", &W3);
    m.def("area_F", &area_F);
    m.def("chemical_potential", &chemical_potential);
    m.def("energy_E", &energy_E);
    m.def("grad_E", py::overload_cast<const Field&, const PotentialParams&>(&grad_E));

    py::class_<PhaseState>(m, "PhaseState")
        .def_readonly("v", &PhaseState::v)
        .def_readonly("mu", &PhaseState::mu)
        .def_readonly("energy", &PhaseState::energy)
        .def_readonly("area", &PhaseState::area)
        .def_readonly("mean_v", &PhaseState::mean_v)
        .def_readonly("margin", &PhaseState::margin);

    m.def("make_state", &make_state);

    py::enum_<SolveMethod>(m, "SolveMethod")
        .value("Spectral", SolveMethod::Spectral)
        .value("Iterative", SolveMethod::Iterative);

    py::class_<NeumannSolvePlan>(m, "NeumannSolvePlan")
        .def(py::init<const Grid&, SolveMethod, double>(), py::arg("grid"),
             py::arg("method") = SolveMethod::Spectral, py::arg("tolerance") = 1e-12)
        .def("solve", &NeumannSolvePlan::solve)
        .def("dual_norm_sq", &NeumannSolvePlan::dual_norm_sq)
        .def("eigenvalue", &NeumannSolvePlan::eigenvalue);

    m.def("solve_N", &solve_N);
    m.def("dual_norm_sq", py::overload_cast<const Field&, const NeumannSolvePlan&>(&dual_norm_sq));

    py::class_<ConstraintSpec>(m, "ConstraintSpec")
        .def(py::init<double, double, double, double>(), py::arg("alpha"), py::arg("beta"),
             py::arg("tol_mean") = 1e-12, py::arg("tol_area") = 1e-10)
        .def_readonly("alpha", &ConstraintSpec::alpha)
        .def_readonly("beta", &ConstraintSpec::beta)
        .def_readonly("tol_mean", &ConstraintSpec::tol_mean)
        .def_readonly("tol_area", &ConstraintSpec::tol_area);

    m.def("beta_alpha_estimate", &beta_alpha_estimate);
    m.def("construct_feasible", &construct_feasible);
    m.def("retract_to_manifold", &retract_to_manifold);
    m.def("z_empty_sufficient", &z_empty_sufficient);
    m.def("m_M_probe", &m_M_probe);

    py::class_<StepConfig>(m, "StepConfig")
        .def(py::init<double>(), py::arg("tau"))
        .def_readwrite("tau", &StepConfig::tau)
        .def_readwrite("tol_el", &StepConfig::tol_el)
        .def_readwrite("max_inner", &StepConfig::max_inner)
        .def_readwrite("armijo_shrink", &StepConfig::armijo_shrink)
        .def_readwrite("armijo_slope", &StepConfig::armijo_slope)
        .def_readwrite("sigma0", &StepConfig::sigma0);

    py::enum_<StepStatus>(m, "StepStatus")
        .value("Converged", StepStatus::Converged)
        .value("MaxInnerExceeded", StepStatus::MaxInnerExceeded)
        .value("LineSearchStall", StepStatus::LineSearchStall);

    py::class_<StepReport>(m, "StepReport")
        .def_readonly("status", &StepReport::status)
        .def_readonly("A", &StepReport::A)
        .def_readonly("B", &StepReport::B)
        .def_readonly("el_residual", &StepReport::el_residual)
        .def_readonly("mean_residual", &StepReport::mean_residual)
        .def_readonly("area_residual", &StepReport::area_residual)
        .def_readonly("inner_iters", &StepReport::inner_iters)
        .def_readonly("objective", &StepReport::objective)
        .def_readonly("decrease_ok", &StepReport::decrease_ok)
        .def_readonly("a1_residual", &StepReport::a1_residual)
        .def_readonly("a2_residual", &StepReport::a2_residual)
        .def("ok", &StepReport::ok);

    m.def("proximal_step",
          [](const PhaseState& f, const ConstraintSpec& spec, const StepConfig& cfg,
             const PotentialParams& p, const NeumannSolvePlan& plan) {
              StepResult r = proximal_step(f, spec, cfg, p, plan);
              return py::make_tuple(r.state, r.report);
          });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init([](const ConstraintSpec& spec, const PotentialParams& p, const Grid& g,
                         double tau, double t_end) {
                 RunConfig rc;
                 rc.spec = spec;
                 rc.potential = p;
                 rc.grid = g;
                 rc.tau = tau;
                 rc.t_end = t_end;
                 rc.step_cfg = StepConfig(tau);
                 return rc;
             }),
             py::arg("spec"), py::arg("potential"), py::arg("grid"), py::arg("tau"),
             py::arg("t_end"))
        .def_readwrite("tau", &RunConfig::tau)
        .def_readwrite("t_end", &RunConfig::t_end)
        .def_readwrite("margin_floor", &RunConfig::margin_floor)
        .def_readwrite("snapshot_every", &RunConfig::snapshot_every)
        .def_readwrite("step_cfg", &RunConfig::step_cfg);

    py::enum_<RunStatus>(m, "RunStatus")
        .value("Ok", RunStatus::Ok)
        .value("MarginCollapse", RunStatus::MarginCollapse)
        .value("StepFailure", RunStatus::StepFailure);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("status", &Trajectory::status)
        .def_readonly("failure_step", &Trajectory::failure_step)
        .def_readonly("message", &Trajectory::message)
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("reports", &Trajectory::reports)
        .def_readonly("observed_m_M", &Trajectory::observed_m_M)
        .def_readonly("kappa_fit", &Trajectory::kappa_fit)
        .def_readonly("c1_fit", &Trajectory::c1_fit)
        .def_readonly("holder_worst_ratio", &Trajectory::holder_worst_ratio)
        .def_readonly("d35_sum", &Trajectory::d35_sum)
        .def("ok", &Trajectory::ok);

    m.def("evolve", &evolve);

    py::class_<EstimateCheck>(m, "EstimateCheck")
        .def_readonly("name", &EstimateCheck::name)
        .def_readonly("pass_", &EstimateCheck::pass)
        .def_readonly("worst_ratio", &EstimateCheck::worst_ratio)
        .def_readonly("detail", &EstimateCheck::detail);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("checks", &EstimateReport::checks)
        .def("all_pass", &EstimateReport::all_pass);

    m.def("check_estimates", &check_estimates);

    py::class_<DependenceReport>(m, "DependenceReport")
        .def_readonly("coincident", &DependenceReport::coincident)
        .def_readonly("times", &DependenceReport::times)
        .def_readonly("ratios", &DependenceReport::ratios)
        .def_readonly("max_ratio", &DependenceReport::max_ratio)
        .def_readonly("ok", &DependenceReport::ok);

    m.def("continuous_dependence_harness", &continuous_dependence_harness, py::arg("v0"),
          py::arg("delta"), py::arg("cfg"), py::arg("ratio_cap") = 1e6);
}
