// Test-side oracles, independent of the library code paths they check:
// finite differences, quadrature, and the characteristic-polynomial
// closed-form solution for quadratic Lagrangians (companion-matrix roots +
// a complex Vandermonde solve against the initial conditions).
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#ifdef JETMECH_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

namespace oracles {

inline double central_fd(const std::function<double(double)>& f, double x, double h = 0.0) {
    if (h == 0.0) h = 1e-6 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_central_fd(const std::function<double(double)>& f, double x,
                                double h = 1e-4) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Composite Simpson over [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Random quadratic coefficients whose characteristic roots are +-i w_k with
/// distinct frequencies in [0.5, 3.0]: bounded oscillatory solutions by
/// construction.  Returns c_0..c_N.
inline std::vector<double> random_oscillatory_coeffs(std::mt19937_64& rng, int n_order) {
    std::uniform_real_distribution<double> uw(0.5, 3.0);
    std::vector<double> freqs;
    while (static_cast<int>(freqs.size()) < n_order) {
        const double w = uw(rng);
        bool ok = true;
        for (double v : freqs) ok = ok && std::abs(v - w) > 0.2;
        if (ok) freqs.push_back(w);
    }
    // Q(mu) = prod_k (mu + w_k^2) with mu = z^2; c_n = (-1)^n [mu^n] Q
    std::vector<double> q{1.0};
    for (double w : freqs) {
        std::vector<double> next(q.size() + 1, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            next[i + 1] += q[i];
            next[i] += q[i] * w * w;
        }
        q = std::move(next);
    }
    std::uniform_real_distribution<double> us(0.25, 1.5);
    const double scale = us(rng) * (rng() % 2 == 0 ? 1.0 : -1.0);
    std::vector<double> coeffs(q.size());
    for (std::size_t n = 0; n < q.size(); ++n)
        coeffs[n] = (n % 2 == 0 ? 1.0 : -1.0) * q[n] * scale;
    return coeffs;
}

#ifdef JETMECH_HAVE_EIGEN

/// Closed-form solution r(t) = Re sum_k A_k exp(lambda_k t) of the quadratic
/// equation of motion sum_n (-1)^n c_n r^(2n) = 0, built from the roots of
/// the characteristic polynomial sum_n (-1)^n c_n z^(2n) and a linear solve
/// against the initial derivatives r(0), r'(0), ..., r^(2N-1)(0).
class CharacteristicSolution {
public:
    CharacteristicSolution(const std::vector<double>& coeffs,
                           const std::vector<double>& init_derivs) {
        const int n_order = static_cast<int>(coeffs.size()) - 1;   // N
        const int degree = 2 * n_order;
        if (static_cast<int>(init_derivs.size()) != degree)
            throw std::runtime_error("need 2N initial derivatives");

        // monic characteristic polynomial coefficients a_0..a_{d-1} of
        // z^d + a_{d-1} z^{d-1} + ... + a_0, even powers only
        std::vector<double> poly(degree + 1, 0.0);
        for (int n = 0; n <= n_order; ++n)
            poly[2 * n] = (n % 2 == 0 ? 1.0 : -1.0) * coeffs[n];
        const double top = poly[degree];
        for (double& p : poly) p /= top;

        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
        for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -poly[i];
        Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
        roots_.resize(degree);
        for (int i = 0; i < degree; ++i) roots_[i] = solver.eigenvalues()(i);

        Eigen::MatrixXcd vander(degree, degree);
        Eigen::VectorXcd rhs(degree);
        for (int m = 0; m < degree; ++m) {
            for (int k = 0; k < degree; ++k) vander(m, k) = std::pow(roots_[k], m);
            rhs(m) = init_derivs[m];
        }
        const Eigen::VectorXcd amps = vander.fullPivLu().solve(rhs);
        amplitudes_.resize(degree);
        for (int i = 0; i < degree; ++i) amplitudes_[i] = amps(i);
    }

    /// n-th derivative of the closed-form solution at t.
    double deriv(double t, int n = 0) const {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < roots_.size(); ++k)
            acc += amplitudes_[k] * std::pow(roots_[k], n) * std::exp(roots_[k] * t);
        return acc.real();
    }

    /// Smallest pairwise distance between the roots (degeneracy guard).
    double min_root_separation() const {
        double sep = 1e300;
        for (std::size_t i = 0; i < roots_.size(); ++i)
            for (std::size_t j = i + 1; j < roots_.size(); ++j)
                sep = std::min(sep, std::abs(roots_[i] - roots_[j]));
        return sep;
    }

    /// Longest oscillation period 2*pi / min |Im lambda|.
    double characteristic_period() const {
        double w_min = 1e300;
        for (const auto& z : roots_)
            if (std::abs(z.imag()) > 1e-9) w_min = std::min(w_min, std::abs(z.imag()));
        if (w_min == 1e300) throw std::runtime_error("no oscillatory roots");
        return 2.0 * M_PI / w_min;
    }

private:
    std::vector<std::complex<double>> roots_;
    std::vector<std::complex<double>> amplitudes_;
};

#endif // JETMECH_HAVE_EIGEN

} // namespace oracles
