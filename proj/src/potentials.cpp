#include "jetmech/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace jetmech {

namespace {

void check_radius(double r) {
    if (!(r > 0.0)) throw DomainError("radius must be positive");
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) throw Error(std::string(name) + " must be positive");
}

double factorial(int n) {
    double acc = 1.0;
    for (int i = 2; i <= n; ++i) acc *= i;
    return acc;
}

} // namespace

PotentialModel PotentialModel::newtonian(double G, double M) {
    check_positive(G, "G");
    check_positive(M, "M");
    PotentialModel p;
    p.kind = Kind::newtonian;
    p.G = G;
    p.M = M;
    return p;
}

PotentialModel PotentialModel::exponential(double G, double M, double k, Variant variant) {
    check_positive(G, "G");
    check_positive(M, "M");
    check_positive(k, "k");
    PotentialModel p;
    p.kind = Kind::exponential;
    p.variant = variant;
    p.G = G;
    p.M = M;
    p.k = k;
    return p;
}

PotentialModel PotentialModel::series(double G, double M, double k,
                                      std::vector<double> coefficients) {
    check_positive(G, "G");
    check_positive(M, "M");
    check_positive(k, "k");
    if (coefficients.empty()) throw Error("series potential needs at least one coefficient");
    PotentialModel p;
    p.kind = Kind::series;
    p.G = G;
    p.M = M;
    p.k = k;
    p.coefficients = std::move(coefficients);
    return p;
}

PotentialModel PotentialModel::exponential_series(double G, double M, double k, int terms) {
    if (terms < 1) throw Error("need at least one series term");
    std::vector<double> c(terms);
    for (int i = 1; i <= terms; ++i) c[i - 1] = 1.0 / (factorial(i) * k);
    return series(G, M, k, std::move(c));
}

double potential_value(const PotentialModel& p, double r) {
    check_radius(r);
    const double gm = p.G * p.M;
    switch (p.kind) {
        case PotentialModel::Kind::newtonian:
            return gm / r;
        case PotentialModel::Kind::exponential:
            return p.variant == PotentialModel::Variant::raw
                       ? gm / p.k * std::exp(p.k / r)
                       : gm / p.k * std::expm1(p.k / r);
        case PotentialModel::Kind::series: {
            const double x = p.k / r;
            double acc = 0.0;
            double xi = 1.0;
            for (double c : p.coefficients) {
                xi *= x;
                acc += c * xi;
            }
            return gm * acc;
        }
    }
    throw Error("unreachable potential kind");
}

double potential_force(const PotentialModel& p, double r) {
    check_radius(r);
    const double gm = p.G * p.M;
    switch (p.kind) {
        case PotentialModel::Kind::newtonian:
            return gm / (r * r);
        case PotentialModel::Kind::exponential:
            return gm / (r * r) * std::exp(p.k / r);
        case PotentialModel::Kind::series: {
            const double x = p.k / r;
            double acc = 0.0;
            double xi = 1.0;
            for (std::size_t i = 0; i < p.coefficients.size(); ++i) {
                xi *= x;
                acc += static_cast<double>(i + 1) * p.coefficients[i] * xi;
            }
            return gm * acc / r;
        }
    }
    throw Error("unreachable potential kind");
}

std::vector<ComparisonRow> newtonian_comparison(const PotentialModel& p,
                                                const std::vector<double>& radii) {
    std::vector<ComparisonRow> rows;
    rows.reserve(radii.size());
    for (double r : radii) {
        check_radius(r);
        ComparisonRow row;
        row.r = r;
        row.phi_model = potential_value(p, r);
        row.phi_newton = p.G * p.M / r;
        row.force_model = potential_force(p, r);
        row.force_newton = p.G * p.M / (r * r);
        row.ratio = row.force_model / row.force_newton;
        // ratio - 1 without cancellation where the model allows it
        row.ratio_excess = p.kind == PotentialModel::Kind::exponential
                               ? std::expm1(p.k / r)
                               : row.ratio - 1.0;
        if (std::abs(row.ratio_excess) < 1e-6) row.regime = "newtonian-limit";
        else if (row.ratio > 10.0) row.regime = "strong";
        else row.regime = "intermediate";
        rows.push_back(std::move(row));
    }
    return rows;
}

SeriesDiagnostics series_divergence_scan(const PotentialModel& p,
                                         const std::vector<double>& radii, int terms) {
    if (p.kind != PotentialModel::Kind::series)
        throw Error("divergence scan needs a series potential");
    if (terms < 2) throw Error("divergence scan needs terms >= 2");

    std::vector<double> coeff = p.coefficients;
    while (static_cast<int>(coeff.size()) < terms) coeff.push_back(coeff.back());

    SeriesDiagnostics diag;
    for (int i = 0; i + 1 < terms; ++i) {
        if (coeff[i] != 0.0)
            diag.threshold_radius =
                std::max(diag.threshold_radius, p.k * std::abs(coeff[i + 1] / coeff[i]));
    }

    for (double r : radii) {
        check_radius(r);
        SeriesRadiusDiagnostics rd;
        rd.r = r;
        const double x = p.k / r;
        double xi = 1.0;
        double sum = 0.0;
        for (int i = 0; i < terms; ++i) {
            xi *= x;
            const double term = coeff[i] * xi;
            sum += term;
            rd.term_magnitudes.push_back(std::abs(term));
            rd.partial_sums.push_back(p.G * p.M * sum);
        }
        rd.monotone_decreasing = true;
        rd.divergent = false;
        for (int i = 0; i + 1 < terms; ++i) {
            const double a = rd.term_magnitudes[i], b = rd.term_magnitudes[i + 1];
            if (!(b < a)) rd.monotone_decreasing = false;
            if (b >= a && a > 0.0) rd.divergent = true;
        }
        diag.per_radius.push_back(std::move(rd));
    }
    return diag;
}

double laplacian_residual(const Expression& phi, const std::map<std::string, double>& params,
                          double r) {
    check_radius(r);
    const Expression dphi = partial_derivative(phi, VarRef::jet(0, 0));
    const Expression d2phi = partial_derivative(dphi, VarRef::jet(0, 0));
    const JetPoint at(0.0, 1, std::vector<double>{r});
    Bindings b;
    b.params = params;
    b.jet = &at;
    return evaluate(d2phi, b) + 2.0 / r * evaluate(dphi, b);
}

double laplacian_residual(const std::string& phi_text,
                          const std::map<std::string, double>& params, double r) {
    return laplacian_residual(parse(phi_text), params, r);
}

namespace {

struct Event {
    double t;
    double theta;
    double r;
};

/// Quadratic Lagrange interpolation of (ts, vs) at t.
double interp3(const double ts[3], const double vs[3], double t) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = vs[i];
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (t - ts[j]) / (ts[i] - ts[j]);
        acc += w;
    }
    return acc;
}

} // namespace

OrbitResult orbit_simulate(const PotentialModel& p, const std::array<double, 2>& position,
                           const std::array<double, 2>& velocity, double t1,
                           const IntegratorSpec& spec) {
    const double r_init = std::hypot(position[0], position[1]);
    if (!(r_init > 0.0)) throw Error("initial position must be off-center");
    if (!(t1 > 0.0)) throw Error("orbit horizon must be positive");

    const OdeRhs rhs = [&p](double, const double* y, double* dydt) {
        const double r = std::hypot(y[0], y[1]);
        const double f_over_r = potential_force(p, r) / r;
        dydt[0] = y[2];
        dydt[1] = y[3];
        dydt[2] = -f_over_r * y[0];
        dydt[3] = -f_over_r * y[1];
    };
    const double r_floor = 1e-12 * r_init;
    const auto guard = [r_floor](double, const double* y) {
        return std::hypot(y[0], y[1]) > r_floor;
    };

    bool aborted = false;
    const OdeSolution sol = integrate_ode(rhs, 4, {position[0], position[1], velocity[0], velocity[1]},
                                          0.0, t1, spec, guard, &aborted);

    OrbitResult out;
    out.stats.aborted = aborted;
    out.trajectory.method = spec.method == IntegratorSpec::Method::rk4 ? "rk4" : "rk45";
    out.trajectory.accepted = sol.accepted;
    out.trajectory.rejected = sol.rejected;

    const std::size_t n = sol.times.size();
    std::vector<double> rs(n), vr(n), theta(n), energy(n), lz(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& y = sol.states[i];
        const double r = std::hypot(y[0], y[1]);
        rs[i] = r;
        vr[i] = (y[0] * y[2] + y[1] * y[3]) / r;
        const double raw = std::atan2(y[1], y[0]);
        theta[i] = i == 0 ? raw : raw + 2 * M_PI * std::round((theta[i - 1] - raw) / (2 * M_PI));
        energy[i] = 0.5 * (y[2] * y[2] + y[3] * y[3]) - potential_value(p, r);
        lz[i] = y[0] * y[3] - y[1] * y[2];

        const double f_over_r = potential_force(p, r) / r;
        out.trajectory.samples.emplace_back(
            sol.times[i], 2,
            std::vector<double>{y[0], y[1], y[2], y[3], -f_over_r * y[0], -f_over_r * y[1]});
    }

    OrbitStats& st = out.stats;
    const double rmin = *std::min_element(rs.begin(), rs.end());
    const double rmax = *std::max_element(rs.begin(), rs.end());
    st.periapsis = rmin;
    st.apoapsis = rmax;
    for (std::size_t i = 0; i < n; ++i) {
        st.energy_drift = std::max(st.energy_drift, std::abs(energy[i] - energy[0]));
        st.angular_momentum_drift =
            std::max(st.angular_momentum_drift, std::abs(lz[i] - lz[0]));
    }

    if (rmax - rmin < 1e-8 * rmax) {
        // degenerate apsides: every point is a periapsis
        st.circular = true;
        st.advance_per_orbit = 0.0;
        const double v0 = std::hypot(velocity[0], velocity[1]);
        st.radial_period = v0 > 0 ? 2 * M_PI * r_init / v0 : 0.0;
        return out;
    }

    // periapsis passages: vr crosses negative -> positive
    std::vector<Event> events;
    std::vector<double> apo_r;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const bool peri = vr[i] < 0.0 && vr[i + 1] >= 0.0;
        const bool apo = vr[i] > 0.0 && vr[i + 1] <= 0.0;
        if (!peri && !apo) continue;
        const double dt = sol.times[i + 1] - sol.times[i];
        const double t_star = sol.times[i] - vr[i] * dt / (vr[i + 1] - vr[i]);
        const double ts[3] = {sol.times[i - 1], sol.times[i], sol.times[i + 1]};
        const double rs3[3] = {rs[i - 1], rs[i], rs[i + 1]};
        const double th3[3] = {theta[i - 1], theta[i], theta[i + 1]};
        if (peri) events.push_back({t_star, interp3(ts, th3, t_star), interp3(ts, rs3, t_star)});
        else apo_r.push_back(interp3(ts, rs3, t_star));
    }
    st.periapsis_passages = static_cast<int>(events.size());
    if (!events.empty()) {
        double r_acc = 0.0;
        for (const Event& e : events) r_acc += e.r;
        st.periapsis = r_acc / events.size();
    }
    if (!apo_r.empty()) {
        double r_acc = 0.0;
        for (double r : apo_r) r_acc += r;
        st.apoapsis = r_acc / apo_r.size();
    }
    if (events.size() >= 2) {
        const double full_turn = lz[0] >= 0 ? 2 * M_PI : -2 * M_PI;
        double period_acc = 0.0, advance_acc = 0.0;
        for (std::size_t j = 1; j < events.size(); ++j) {
            period_acc += events[j].t - events[j - 1].t;
            advance_acc += events[j].theta - events[j - 1].theta - full_turn;
        }
        st.radial_period = period_acc / (events.size() - 1);
        st.advance_per_orbit = advance_acc / (events.size() - 1);
    }
    return out;
}

} // namespace jetmech
