// Python bindings for the jetmech core: expression language, Lagrangian
// models, Euler-Lagrange machinery, integration, action checks and the
// potential family.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jetmech/action.hpp"
#include "jetmech/config.hpp"
#include "jetmech/euler_lagrange.hpp"
#include "jetmech/integrate.hpp"
#include "jetmech/potentials.hpp"
#include "jetmech/selfcheck.hpp"

namespace py = pybind11;
using namespace jetmech;

namespace {

Convention convention_from(const std::string& name) {
    if (name == "standard") return Convention::standard;
    if (name == "literal") return Convention::literal;
    throw Error("convention must be 'standard' or 'literal'");
}

IntegratorSpec spec_from(const std::string& method, double step, double rel_tol, double abs_tol,
                         long max_steps) {
    IntegratorSpec spec = method == "rk4" ? IntegratorSpec::fixed(step)
                                          : IntegratorSpec::adaptive(rel_tol, abs_tol);
    if (method != "rk4" && method != "rk45") throw Error("method must be 'rk4' or 'rk45'");
    spec.max_steps = max_steps;
    return spec;
}

JetPoint jet_from(double t, const std::vector<std::vector<double>>& derivs) {
    if (derivs.empty()) throw Error("derivs must be non-empty");
    const int dim = static_cast<int>(derivs.front().size());
    std::vector<double> data;
    for (const auto& row : derivs) {
        if (static_cast<int>(row.size()) != dim)
            throw Error("all derivative rows must have the same length");
        data.insert(data.end(), row.begin(), row.end());
    }
    return JetPoint(t, dim, std::move(data));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "higher-order variational mechanics engine";
    m.attr("__version__") = JETMECH_VERSION_STRING;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ExpressionParseError", PyExc_ValueError);
    py::register_exception<OrderError>(m, "OrderError", PyExc_ValueError);
    py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    // -- jets -----------------------------------------------------------------
    py::class_<JetPoint>(m, "JetPoint")
        .def(py::init(&jet_from), py::arg("t"), py::arg("derivs"),
             "Phase point: derivs[n] is the dim-component n-th derivative.")
        .def_static(
            "scalar",
            [](double t, const std::vector<double>& orders) { return JetPoint::scalar(t, orders); },
            py::arg("t"), py::arg("orders"))
        .def_property_readonly("t", &JetPoint::t)
        .def_property_readonly("dim", &JetPoint::dim)
        .def_property_readonly("max_order", &JetPoint::max_order)
        .def("deriv", &JetPoint::deriv, py::arg("order"), py::arg("comp") = 0)
        .def("with_deriv", &JetPoint::with_deriv)
        .def("__repr__", [](const JetPoint& j) {
            std::ostringstream ss;
            ss << "JetPoint(t=" << j.t() << ", dim=" << j.dim() << ", M=" << j.max_order() << ")";
            return ss.str();
        });

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("samples", &Trajectory::samples)
        .def_readonly("method", &Trajectory::method)
        .def_readonly("accepted", &Trajectory::accepted)
        .def_readonly("rejected", &Trajectory::rejected)
        .def("times",
             [](const Trajectory& tr) {
                 std::vector<double> ts;
                 for (const auto& s : tr.samples) ts.push_back(s.t());
                 return ts;
             })
        .def("positions",
             [](const Trajectory& tr) {
                 std::vector<std::vector<double>> out;
                 for (const auto& s : tr.samples) {
                     std::vector<double> row;
                     for (int c = 0; c < s.dim(); ++c) row.push_back(s.deriv(0, c));
                     out.push_back(std::move(row));
                 }
                 return out;
             })
        .def("to_csv", [](const Trajectory& tr) {
            std::ostringstream ss;
            write_csv(tr, ss);
            return ss.str();
        });

    m.def("taylor_propagate", &taylor_propagate, py::arg("jet"), py::arg("dt"), py::arg("order"));
    m.def("truncate_jet", &truncate_jet, py::arg("jet"), py::arg("new_max_order"));
    m.def("resample_uniform", &resample_uniform, py::arg("trajectory"), py::arg("n_samples"));

    // -- expressions ------------------------------------------------------------
    py::class_<Expression>(m, "Expression")
        .def("__repr__", [](const Expression& e) { return "Expression(" + render(e) + ")"; })
        .def("__str__", [](const Expression& e) { return render(e); });

    m.def("parse", &parse, py::arg("text"));
    m.def("render", &render, py::arg("expression"));
    m.def(
        "evaluate",
        [](const Expression& e, const std::map<std::string, double>& params,
           const JetPoint* jet) {
            Bindings b;
            b.params = params;
            b.jet = jet;
            return evaluate(e, b);
        },
        py::arg("expression"), py::arg("params") = std::map<std::string, double>{},
        py::arg("jet") = nullptr);
    m.def(
        "partial_derivative",
        [](const Expression& e, const std::string& var) {
            return partial_derivative(e, VarRef::from_string(var));
        },
        py::arg("expression"), py::arg("var"));
    m.def("total_time_derivative", &total_time_derivative, py::arg("expression"),
          py::arg("max_order"));

    // -- Lagrangian models ---------------------------------------------------------
    py::class_<LagrangianModel>(m, "Lagrangian")
        .def_static("quadratic", &LagrangianModel::quadratic, py::arg("coeffs"))
        .def_static(
            "expression",
            [](const std::string& text, const std::map<std::string, double>& params) {
                return LagrangianModel::expression(text, params);
            },
            py::arg("text"), py::arg("params") = std::map<std::string, double>{})
        .def_static("harmonic", &LagrangianModel::harmonic, py::arg("omega"))
        .def_static("pais_uhlenbeck", &LagrangianModel::pais_uhlenbeck, py::arg("omega1"),
                    py::arg("omega2"))
        .def_property_readonly("order", &LagrangianModel::order)
        .def_property_readonly("is_quadratic", &LagrangianModel::is_quadratic)
        .def("as_expression", &LagrangianModel::as_expression, py::arg("dim") = 1);

    m.def("eval_lagrangian", &eval_lagrangian, py::arg("lagrangian"), py::arg("jet"));
    m.def("partial_wrt_order", &partial_wrt_order, py::arg("lagrangian"), py::arg("n"),
          py::arg("comp") = 0, py::arg("dim") = 1);

    py::class_<EnergyRanks>(m, "EnergyRanks")
        .def_readonly("ranks", &EnergyRanks::ranks)
        .def_readonly("per_order", &EnergyRanks::per_order)
        .def_readonly("total", &EnergyRanks::total);
    m.def("energy_ranks", &energy_ranks, py::arg("lagrangian"), py::arg("jet"));

    // -- Euler-Lagrange machinery -----------------------------------------------------
    m.def("el_residual", &el_residual, py::arg("lagrangian"), py::arg("jet"));
    m.def("max_abs_el_residual", &max_abs_el_residual, py::arg("lagrangian"),
          py::arg("trajectory"));

    py::class_<EOMSystem>(m, "EOMSystem")
        .def_property_readonly("order", &EOMSystem::order)
        .def_property_readonly("dim", &EOMSystem::dim)
        .def_property_readonly("state_dim", &EOMSystem::state_dim)
        .def_property_readonly("is_linear", &EOMSystem::is_linear);
    m.def("derive_eom", &derive_eom, py::arg("lagrangian"), py::arg("dim") = 1);

    py::class_<MomentaVector>(m, "MomentaVector")
        .def_readonly("values", &MomentaVector::values);
    m.def(
        "ostrogradsky_momenta",
        [](const LagrangianModel& L, const JetPoint& jet, const std::string& convention) {
            return ostrogradsky_momenta(L, jet, convention_from(convention));
        },
        py::arg("lagrangian"), py::arg("jet"), py::arg("convention") = "standard");
    m.def(
        "generalized_hamiltonian",
        [](const LagrangianModel& L, const JetPoint& jet, const std::string& convention) {
            return generalized_hamiltonian(L, jet, convention_from(convention));
        },
        py::arg("lagrangian"), py::arg("jet"), py::arg("convention") = "standard");

    py::class_<ForceLadder>(m, "ForceLadder")
        .def_readonly("forces", &ForceLadder::forces)
        .def_readonly("momenta", &ForceLadder::momenta);
    m.def("force_ladder", &force_ladder, py::arg("lagrangian"), py::arg("jet"));
    m.def("newton_balance_residual", &newton_balance_residual, py::arg("lagrangian"),
          py::arg("jet"));

    py::class_<EomSymbolic>(m, "EomSymbolic")
        .def_readonly("order", &EomSymbolic::order)
        .def_readonly("eom", &EomSymbolic::eom)
        .def_readonly("momenta", &EomSymbolic::momenta)
        .def_readonly("hamiltonian", &EomSymbolic::hamiltonian);
    m.def("symbolic_eom", &symbolic_eom, py::arg("lagrangian"));

    m.def("extend_jet", &extend_jet, py::arg("system"), py::arg("jet"), py::arg("target_order"));
    m.def("extend_trajectory", &extend_trajectory, py::arg("system"), py::arg("trajectory"),
          py::arg("target_order"));

    // -- integration --------------------------------------------------------------
    m.def(
        "integrate",
        [](const EOMSystem& sys, const JetPoint& init, double t1, const std::string& method,
           double step, double rel_tol, double abs_tol, long max_steps) {
            return integrate_eom(sys, init, t1,
                                 spec_from(method, step, rel_tol, abs_tol, max_steps));
        },
        py::arg("system"), py::arg("init"), py::arg("t1"), py::arg("method") = "rk45",
        py::arg("step") = 1e-2, py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12,
        py::arg("max_steps") = 2'000'000);

    py::class_<ConservationReport>(m, "ConservationReport")
        .def_readonly("quantity", &ConservationReport::quantity)
        .def_readonly("initial", &ConservationReport::initial)
        .def_readonly("max_abs_drift", &ConservationReport::max_abs_drift)
        .def_readonly("drift_per_unit_time", &ConservationReport::drift_per_unit_time)
        .def_readonly("sample_count", &ConservationReport::sample_count)
        .def_readonly("conserved", &ConservationReport::conserved);
    m.def(
        "conservation_report",
        [](const Trajectory& traj, const LagrangianModel& L, const std::string& convention) {
            return conservation_report(traj, L, convention_from(convention));
        },
        py::arg("trajectory"), py::arg("lagrangian"), py::arg("convention") = "standard");

    py::class_<TaylorComparison>(m, "TaylorComparison")
        .def_property_readonly("rows",
                               [](const TaylorComparison& tc) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& r : tc.rows)
                                       out.emplace_back(r.horizon, r.max_error);
                                   return out;
                               })
        .def_readonly("slope", &TaylorComparison::slope)
        .def_readonly("order", &TaylorComparison::order);
    m.def("compare_taylor", &compare_taylor, py::arg("trajectory"), py::arg("order"),
          py::arg("base_horizon"), py::arg("levels") = 6);

    // -- action ------------------------------------------------------------------
    m.def("action_integral", &action_integral, py::arg("lagrangian"), py::arg("trajectory"),
          py::arg("resample_n") = 0);

    py::class_<StationarityReport>(m, "StationarityReport")
        .def_readonly("action", &StationarityReport::action)
        .def_readonly("slope", &StationarityReport::slope)
        .def_readonly("intercept", &StationarityReport::intercept)
        .def_readonly("valid", &StationarityReport::valid)
        .def_readonly("noise_floor_hit", &StationarityReport::noise_floor_hit)
        .def_readonly("max_residual", &StationarityReport::max_residual)
        .def_readonly("epsilons", &StationarityReport::epsilons)
        .def_readonly("delta_s", &StationarityReport::delta_s);
    m.def(
        "stationarity_test",
        [](const LagrangianModel& L, const Trajectory& traj, int exponent, int component,
           const std::vector<double>& epsilons, double residual_threshold) {
            BumpPerturbation bump;
            bump.t0 = traj.samples.front().t();
            bump.t1 = traj.samples.back().t();
            bump.exponent = exponent;
            bump.component = component;
            return stationarity_test(L, traj, bump,
                                     epsilons.empty() ? default_eps_sweep() : epsilons,
                                     residual_threshold);
        },
        py::arg("lagrangian"), py::arg("trajectory"), py::arg("exponent"),
        py::arg("component") = 0, py::arg("epsilons") = std::vector<double>{},
        py::arg("residual_threshold") = 1e-4);
    m.def("pointwise_action", &pointwise_action, py::arg("lagrangian"), py::arg("jet"));

    // -- potentials ----------------------------------------------------------------
    py::class_<PotentialModel>(m, "Potential")
        .def_static("newtonian", &PotentialModel::newtonian, py::arg("G"), py::arg("M"))
        .def_static(
            "exponential",
            [](double G, double M, double k, const std::string& variant) {
                if (variant == "raw")
                    return PotentialModel::exponential(G, M, k, PotentialModel::Variant::raw);
                if (variant == "shifted")
                    return PotentialModel::exponential(G, M, k, PotentialModel::Variant::shifted);
                throw Error("variant must be 'raw' or 'shifted'");
            },
            py::arg("G"), py::arg("M"), py::arg("k"), py::arg("variant") = "shifted")
        .def_static("series", &PotentialModel::series, py::arg("G"), py::arg("M"), py::arg("k"),
                    py::arg("coefficients"))
        .def_static("exponential_series", &PotentialModel::exponential_series, py::arg("G"),
                    py::arg("M"), py::arg("k"), py::arg("terms"))
        .def("value", [](const PotentialModel& p, double r) { return potential_value(p, r); },
             py::arg("r"))
        .def("force", [](const PotentialModel& p, double r) { return potential_force(p, r); },
             py::arg("r"));

    py::class_<ComparisonRow>(m, "ComparisonRow")
        .def_readonly("r", &ComparisonRow::r)
        .def_readonly("phi_model", &ComparisonRow::phi_model)
        .def_readonly("phi_newton", &ComparisonRow::phi_newton)
        .def_readonly("force_model", &ComparisonRow::force_model)
        .def_readonly("force_newton", &ComparisonRow::force_newton)
        .def_readonly("ratio", &ComparisonRow::ratio)
        .def_readonly("ratio_excess", &ComparisonRow::ratio_excess)
        .def_readonly("regime", &ComparisonRow::regime);
    m.def("newtonian_comparison", &newtonian_comparison, py::arg("potential"), py::arg("radii"));

    py::class_<SeriesRadiusDiagnostics>(m, "SeriesRadiusDiagnostics")
        .def_readonly("r", &SeriesRadiusDiagnostics::r)
        .def_readonly("term_magnitudes", &SeriesRadiusDiagnostics::term_magnitudes)
        .def_readonly("partial_sums", &SeriesRadiusDiagnostics::partial_sums)
        .def_readonly("monotone_decreasing", &SeriesRadiusDiagnostics::monotone_decreasing)
        .def_readonly("divergent", &SeriesRadiusDiagnostics::divergent);
    py::class_<SeriesDiagnostics>(m, "SeriesDiagnostics")
        .def_readonly("per_radius", &SeriesDiagnostics::per_radius)
        .def_readonly("threshold_radius", &SeriesDiagnostics::threshold_radius);
    m.def("series_divergence_scan", &series_divergence_scan, py::arg("potential"),
          py::arg("radii"), py::arg("terms"));

    m.def(
        "laplacian_residual",
        [](const std::string& phi, const std::map<std::string, double>& params, double r) {
            return laplacian_residual(phi, params, r);
        },
        py::arg("phi"), py::arg("params") = std::map<std::string, double>{}, py::arg("r"));

    py::class_<OrbitStats>(m, "OrbitStats")
        .def_readonly("periapsis", &OrbitStats::periapsis)
        .def_readonly("apoapsis", &OrbitStats::apoapsis)
        .def_readonly("radial_period", &OrbitStats::radial_period)
        .def_readonly("advance_per_orbit", &OrbitStats::advance_per_orbit)
        .def_readonly("circular", &OrbitStats::circular)
        .def_readonly("aborted", &OrbitStats::aborted)
        .def_readonly("periapsis_passages", &OrbitStats::periapsis_passages)
        .def_readonly("energy_drift", &OrbitStats::energy_drift)
        .def_readonly("angular_momentum_drift", &OrbitStats::angular_momentum_drift);
    py::class_<OrbitResult>(m, "OrbitResult")
        .def_readonly("trajectory", &OrbitResult::trajectory)
        .def_readonly("stats", &OrbitResult::stats);
    m.def(
        "orbit_simulate",
        [](const PotentialModel& p, const std::array<double, 2>& position,
           const std::array<double, 2>& velocity, double t1, const std::string& method,
           double step, double rel_tol, double abs_tol, long max_steps) {
            return orbit_simulate(p, position, velocity, t1,
                                  spec_from(method, step, rel_tol, abs_tol, max_steps));
        },
        py::arg("potential"), py::arg("position"), py::arg("velocity"), py::arg("t1"),
        py::arg("method") = "rk45", py::arg("step") = 1e-2, py::arg("rel_tol") = 1e-10,
        py::arg("abs_tol") = 1e-12, py::arg("max_steps") = 2'000'000);

    // -- selftest -------------------------------------------------------------------
    m.def(
        "selftest",
        [](unsigned long seed) {
            std::vector<std::tuple<std::string, bool, std::string>> out;
            for (const CheckResult& c : run_selfchecks(seed))
                out.emplace_back(c.name, c.pass, c.detail);
            return out;
        },
        py::arg("seed") = 0);
}
