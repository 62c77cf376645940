#pragma once

#include <array>
#include <string>
#include <vector>

#include "jetmech/expr.hpp"
#include "jetmech/integrate.hpp"
#include "jetmech/jet.hpp"

namespace jetmech {

/// Central gravitational potential family.  Values follow the positive
/// magnitude convention (newtonian value is G*M/r); forces are magnitudes of
/// the attractive radial force.
///
///  * newtonian:    phi = G*M/r
///  * exponential:  raw     phi = (G*M/k) exp(k/r)
///                  shifted phi = (G*M/k) (exp(k/r) - 1)
///    The two differ by the constant G*M/k and share the same force
///    (G*M/r^2) exp(k/r).  shifted is the default: it has a clean newtonian
///    limit and expands into the power series below with c_i = 1/(i! k).
///  * series:       phi = G*M * sum_i c_i k^i / r^i  (i starting at 1)
struct PotentialModel {
    enum class Kind { newtonian, exponential, series } kind = Kind::newtonian;
    enum class Variant { raw, shifted } variant = Variant::shifted;
    double G = 1.0;
    double M = 1.0;
    double k = 1.0;                      ///< length scale (exponential/series)
    std::vector<double> coefficients;    ///< series c_1, c_2, ...

    static PotentialModel newtonian(double G, double M);
    static PotentialModel exponential(double G, double M, double k,
                                      Variant variant = Variant::shifted);
    static PotentialModel series(double G, double M, double k, std::vector<double> coefficients);

    /// Series model whose coefficients are the Taylor expansion of the
    /// shifted exponential: c_i = 1/(i! k), i = 1..terms.
    static PotentialModel exponential_series(double G, double M, double k, int terms);
};

/// phi(r).  Throws DomainError for r <= 0.
double potential_value(const PotentialModel& p, double r);

/// Magnitude of the attractive radial force -dphi/dr (closed form).
double potential_force(const PotentialModel& p, double r);

/// One row of the model-vs-newtonian diagnostic table.
struct ComparisonRow {
    double r = 0.0;
    double phi_model = 0.0;
    double phi_newton = 0.0;
    double force_model = 0.0;
    double force_newton = 0.0;
    double ratio = 0.0;            ///< force_model / force_newton
    double ratio_excess = 0.0;     ///< ratio - 1, computed without cancellation
    std::string regime;            ///< newtonian-limit | intermediate | strong
};

/// Per-radius force ratios against the newtonian force with the same G*M.
/// regime: newtonian-limit when ratio-1 < 1e-6, strong when ratio > 10.
std::vector<ComparisonRow> newtonian_comparison(const PotentialModel& p,
                                                const std::vector<double>& radii);

/// Term-magnitude diagnostics of the series potential at one radius.
struct SeriesRadiusDiagnostics {
    double r = 0.0;
    std::vector<double> term_magnitudes;   ///< |c_i k^i / r^i|
    std::vector<double> partial_sums;      ///< signed partial sums (times G*M)
    bool monotone_decreasing = false;
    bool divergent = false;                ///< terms stop decreasing
};

struct SeriesDiagnostics {
    std::vector<SeriesRadiusDiagnostics> per_radius;
    /// Largest radius at which adjacent term magnitudes stop decreasing:
    /// k * max_i |c_{i+1}/c_i|; below it the truncated series grows.
    double threshold_radius = 0.0;
};

/// Scans term magnitudes of the truncated series over the radii; `terms`
/// extends the stored coefficient pattern by repeating the last coefficient
/// ratio when fewer coefficients are stored (unit coefficients stay unit).
SeriesDiagnostics series_divergence_scan(const PotentialModel& p,
                                         const std::vector<double>& radii, int terms);

/// Radial Laplacian (1/r^2) d/dr (r^2 dphi/dr) of a potential expression in
/// the variable r0, by exact symbolic differentiation.  Zero for harmonic
/// potentials (1/r); (k^2/r^4) exp(k/r) for the exponential family.
/// `params` supplies values for named parameters such as k.
double laplacian_residual(const Expression& phi, const std::map<std::string, double>& params,
                          double r);
double laplacian_residual(const std::string& phi_text,
                          const std::map<std::string, double>& params, double r);

/// Planar test-particle orbit statistics.
struct OrbitStats {
    double periapsis = 0.0;
    double apoapsis = 0.0;
    double radial_period = 0.0;        ///< mean time between periapsis passages
    double advance_per_orbit = 0.0;    ///< mean periapsis angle shift per radial period
    bool circular = false;             ///< degenerate apsides; advance reported as 0
    bool aborted = false;              ///< collision guard tripped; stats partial
    int periapsis_passages = 0;
    double energy_drift = 0.0;         ///< max |E - E0|, E = v^2/2 - phi(r)
    double angular_momentum_drift = 0.0;
};

struct OrbitResult {
    Trajectory trajectory;   ///< dim-2 jets: position, velocity, acceleration
    OrbitStats stats;
};

/// Integrates r'' = -F(|r|) r_hat for a unit-mass test particle in the
/// plane.  Aborts (stats.aborted) when the radius falls below 1e-12 of the
/// initial radius.
OrbitResult orbit_simulate(const PotentialModel& p, const std::array<double, 2>& position,
                           const std::array<double, 2>& velocity, double t1,
                           const IntegratorSpec& spec);

} // namespace jetmech
