// jetmech command line front end: config ingestion, subcommand dispatch,
// deterministic report emission.  Exit codes: 0 success, 1 computation
// error, 2 configuration error.

#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jetmech/action.hpp"
#include "jetmech/config.hpp"
#include "jetmech/euler_lagrange.hpp"
#include "jetmech/integrate.hpp"
#include "jetmech/potentials.hpp"
#include "jetmech/selfcheck.hpp"

#ifndef JETMECH_VERSION
#define JETMECH_VERSION "0.1.0"
#endif

namespace {

using nlohmann::json;
using namespace jetmech;

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    int jobs = 1;
};

RunConfig load_config(const Options& opt, bool required) {
    RunConfig cfg = (!opt.config_path.empty())
                        ? RunConfig::load_file(opt.config_path)
                        : (required ? throw ConfigError("a config file is required (--config)",
                                                        "--config")
                                    : RunConfig::from_json_text("{}", "<default>"));
    for (const std::string& o : opt.overrides) cfg.apply_override(o);
    cfg.validate_schema();
    return cfg;
}

std::string csv_of_trajectory(const Trajectory& traj) {
    std::ostringstream ss;
    write_csv(traj, ss);
    return ss.str();
}

json momenta_json(const MomentaVector& mv) {
    json rows = json::array();
    for (const auto& per_order : mv.values) rows.push_back(per_order);
    return rows;
}

int cmd_derive_eom(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const EomSymbolic sym = symbolic_eom(cfg.lagrangian());

    json momenta = json::array();
    for (const Expression& p : sym.momenta) momenta.push_back(render(p));
    const json doc = {{"order", sym.order},
                      {"eom", render(sym.eom)},
                      {"momenta", momenta},
                      {"hamiltonian", render(sym.hamiltonian)}};

    std::cout << "order: " << sym.order << "\n";
    std::cout << "eom: " << render(sym.eom) << " = 0\n";
    for (std::size_t a = 0; a < sym.momenta.size(); ++a)
        std::cout << "p" << a << ": " << render(sym.momenta[a]) << "\n";
    std::cout << "hamiltonian: " << render(sym.hamiltonian) << "\n";

    write_file_atomic(cfg.output_path("report", "eom.json"), doc.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const LagrangianModel L = cfg.lagrangian();
    const EOMSystem sys = derive_eom(L, cfg.dim());
    const auto [t0, t1] = cfg.tspan();
    JetPoint init = cfg.initial_jet();
    if (init.t() != t0) init = init.with_time(t0);

    Trajectory traj = integrate_eom(sys, init, t1, cfg.integrator());
    if (cfg.output_jet_order() > traj.samples.front().max_order())
        traj = extend_trajectory(sys, traj, cfg.output_jet_order());

    const ConservationReport cons = conservation_report(traj, L, Convention::standard);
    const json summary = {{"steps", traj.accepted},
                          {"rejects", traj.rejected},
                          {"drift", cons.max_abs_drift}};

    write_file_atomic(cfg.output_path("trajectory", "trajectory.csv"), csv_of_trajectory(traj));
    write_file_atomic(cfg.output_path("summary", "summary.json"), summary.dump(2) + "\n");
    std::cout << "samples: " << traj.samples.size() << ", steps: " << traj.accepted
              << ", rejects: " << traj.rejected << ", hamiltonian drift: " << cons.max_abs_drift
              << "\n";
    return 0;
}

int cmd_momenta(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const LagrangianModel L = cfg.lagrangian();
    const JetPoint jet = cfg.initial_jet();

    json doc = {{"order", L.order()}, {"dim", jet.dim()}};
    doc["standard"] = momenta_json(ostrogradsky_momenta(L, jet, Convention::standard));
    doc["hamiltonianStandard"] = generalized_hamiltonian(L, jet, Convention::standard);
    doc["hamiltonianLiteral"] = generalized_hamiltonian(L, jet, Convention::literal);
    try {
        doc["literal"] = momenta_json(ostrogradsky_momenta(L, jet, Convention::literal));
    } catch (const OrderError&) {
        doc["literal"] = nullptr;   // needs jet orders up to 2N
    }
    doc["note"] = "literal p_0 equals the equation-of-motion expression and vanishes on "
                  "solutions; conservation holds for the standard convention only";

    const ForceLadder ladder = force_ladder(L, jet);
    json ladder_json = {{"forces", json::array()}, {"momenta", json::array()}};
    for (const auto& f : ladder.forces) ladder_json["forces"].push_back(f);
    for (const auto& p : ladder.momenta) ladder_json["momenta"].push_back(p);
    doc["forceLadder"] = ladder_json;

    const std::string text = doc.dump(2) + "\n";
    write_file_atomic(cfg.output_path("report", "momenta.json"), text);
    std::cout << text;
    return 0;
}

int cmd_energy(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const LagrangianModel L = cfg.lagrangian();
    const JetPoint jet = cfg.initial_jet();
    const EnergyRanks ranks = energy_ranks(L, jet);

    const json doc = {{"ranks", ranks.ranks}, {"perOrder", ranks.per_order},
                      {"total", ranks.total}};
    const std::string text = doc.dump(2) + "\n";
    write_file_atomic(cfg.output_path("report", "energy.json"), text);
    std::cout << text;
    return 0;
}

int cmd_action_check(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const LagrangianModel L = cfg.lagrangian();
    const EOMSystem sys = derive_eom(L, cfg.dim());
    const auto [t0, t1] = cfg.tspan();
    JetPoint init = cfg.initial_jet();
    if (init.t() != t0) init = init.with_time(t0);

    Trajectory traj = integrate_eom(sys, init, t1, cfg.integrator());
    traj = resample_uniform(traj, cfg.action_samples());

    BumpPerturbation bump;
    bump.t0 = t0;
    bump.t1 = t1;
    bump.exponent = cfg.action_bump_exponent(L.order() + 1);
    bump.component = cfg.action_component();
    const StationarityReport rep = stationarity_test(L, traj, bump, cfg.action_epsilons(),
                                                     cfg.action_residual_threshold());

    const json doc = {{"S", rep.action},
                      {"slope", rep.slope},
                      {"intercept", rep.intercept},
                      {"valid", rep.valid},
                      {"noiseFloorHit", rep.noise_floor_hit}};
    const std::string text = doc.dump(2) + "\n";
    write_file_atomic(cfg.output_path("report", "action.json"), text);
    std::cout << text;
    return 0;
}

int cmd_potential_table(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const PotentialModel p = cfg.potential();
    const std::vector<double> radii = cfg.potential_radii();

    std::vector<ComparisonRow> rows(radii.size());
    if (opt.jobs > 1) {
        const std::size_t chunk = (radii.size() + opt.jobs - 1) / opt.jobs;
        std::vector<std::future<void>> tasks;
        for (int j = 0; j < opt.jobs; ++j) {
            const std::size_t lo = j * chunk;
            const std::size_t hi = std::min(radii.size(), lo + chunk);
            if (lo >= hi) break;
            tasks.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i)
                    rows[i] = newtonian_comparison(p, {radii[i]}).front();
            }));
        }
        for (auto& t : tasks) t.get();
    } else {
        rows = newtonian_comparison(p, radii);
    }

    std::ostringstream csv;
    csv << "r,phi_model,phi_newton,force_model,force_newton,ratio,regime\n";
    for (const ComparisonRow& row : rows) {
        csv << format_full(row.r) << "," << format_full(row.phi_model) << ","
            << format_full(row.phi_newton) << "," << format_full(row.force_model) << ","
            << format_full(row.force_newton) << "," << format_full(row.ratio) << ","
            << row.regime << "\n";
    }
    write_file_atomic(cfg.output_path("table", "potential_table.csv"), csv.str());
    std::cout << "rows: " << rows.size() << "\n";
    return 0;
}

int cmd_orbit(const Options& opt) {
    const RunConfig cfg = load_config(opt, true);
    const PotentialModel p = cfg.potential();
    const JetPoint init = cfg.initial_jet();
    if (init.dim() != 2 || init.max_order() < 1)
        throw ConfigError("orbit needs initial.dim = 2 with derivs [[x, y], [vx, vy]]",
                          "initial.derivs");
    const auto [t0, t1] = cfg.tspan();
    if (t0 != 0.0)
        throw ConfigError("orbit integration starts at t = 0; set tspan [0, t1]",
                          "integrator.tspan");

    const OrbitResult orbit =
        orbit_simulate(p, {init.deriv(0, 0), init.deriv(0, 1)},
                       {init.deriv(1, 0), init.deriv(1, 1)}, t1, cfg.integrator());

    json doc = {{"periapsis", orbit.stats.periapsis},
                {"apoapsis", orbit.stats.apoapsis},
                {"radialPeriod", orbit.stats.radial_period},
                {"advancePerOrbit", orbit.stats.advance_per_orbit}};
    doc["diagnostics"] = {{"circular", orbit.stats.circular},
                          {"aborted", orbit.stats.aborted},
                          {"periapsisPassages", orbit.stats.periapsis_passages},
                          {"energyDrift", orbit.stats.energy_drift},
                          {"angularMomentumDrift", orbit.stats.angular_momentum_drift}};

    write_file_atomic(cfg.output_path("trajectory", "orbit.csv"),
                      csv_of_trajectory(orbit.trajectory));
    const std::string text = doc.dump(2) + "\n";
    write_file_atomic(cfg.output_path("summary", "orbit.json"), text);
    std::cout << text;
    return orbit.stats.aborted ? 1 : 0;
}

int cmd_selftest(const Options& opt) {
    const RunConfig cfg = load_config(opt, false);
    const auto checks = run_selfchecks(static_cast<unsigned long>(cfg.seed()));

    json rows = json::array();
    int failed = 0;
    for (const CheckResult& c : checks) {
        std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name << " - " << c.detail << "\n";
        rows.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass) ++failed;
    }
    const json doc = {{"checks", rows},
                      {"passed", static_cast<int>(checks.size()) - failed},
                      {"failed", failed},
                      {"seed", cfg.seed()}};
    write_file_atomic(cfg.output_path("report", "selftest_report.json"), doc.dump(2) + "\n");
    std::cout << (failed == 0 ? "all checks passed" : "checks FAILED") << " ("
              << checks.size() - failed << "/" << checks.size() << ")\n";
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"higher-order variational mechanics engine"};
    app.set_version_flag("--version", JETMECH_VERSION);
    app.require_subcommand(1);

    Options opt;
    app.add_option("-c,--config", opt.config_path, "JSON run configuration");
    app.add_option("--set", opt.overrides,
                   "dotted-path override applied after the file, e.g. integrator.relTol=1e-10");
    app.add_option("-j,--jobs", opt.jobs, "parallelize independent sweep points")
        ->check(CLI::PositiveNumber);

    std::map<std::string, std::function<int(const Options&)>> commands = {
        {"derive-eom", cmd_derive_eom},   {"simulate", cmd_simulate},
        {"momenta", cmd_momenta},         {"energy", cmd_energy},
        {"action-check", cmd_action_check}, {"potential-table", cmd_potential_table},
        {"orbit", cmd_orbit},             {"selftest", cmd_selftest},
    };
    const std::map<std::string, std::string> descriptions = {
        {"derive-eom", "emit the symbolic equation of motion, momenta and Hamiltonian"},
        {"simulate", "integrate the equation of motion and export the trajectory"},
        {"momenta", "evaluate generalized momenta and Hamiltonians at the initial jet"},
        {"energy", "evaluate the energy rank decomposition at the initial jet"},
        {"action-check", "measure action stationarity along an integrated trajectory"},
        {"potential-table", "tabulate a potential model against the newtonian baseline"},
        {"orbit", "integrate a planar test-particle orbit and report apsis statistics"},
        {"selftest", "run the deterministic invariant battery"},
    };
    for (auto& [name, fn] : commands)
        app.add_subcommand(name, descriptions.at(name))->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        return commands.at(chosen)(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << " (key: " << e.key
                  << (opt.config_path.empty() ? "" : ", file: " + opt.config_path) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
