#include "jetmech/jet.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace jetmech {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > 3)
        throw Error("jet dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

void check_finite(const std::vector<double>& data) {
    for (double v : data)
        if (!std::isfinite(v)) throw Error("jet derivatives must be finite");
}

} // namespace

JetPoint::JetPoint(double t, int dim, int max_order) : t_(t), dim_(dim) {
    check_dim(dim);
    if (max_order < 0) throw OrderError("max_order must be >= 0");
    if (!std::isfinite(t)) throw Error("jet time must be finite");
    data_.assign(static_cast<std::size_t>(max_order + 1) * dim, 0.0);
}

JetPoint::JetPoint(double t, int dim, std::vector<double> data)
    : t_(t), dim_(dim), data_(std::move(data)) {
    check_dim(dim);
    if (!std::isfinite(t)) throw Error("jet time must be finite");
    if (data_.empty() || data_.size() % dim != 0)
        throw Error("jet data size must be a positive multiple of dim");
    check_finite(data_);
}

JetPoint JetPoint::scalar(double t, std::vector<double> orders) {
    return JetPoint(t, 1, std::move(orders));
}

double JetPoint::deriv(int order, int comp) const {
    if (order < 0 || order > max_order())
        throw OrderError("derivative order " + std::to_string(order) +
                         " out of range (jet carries 0.." + std::to_string(max_order()) + ")");
    if (comp < 0 || comp >= dim_)
        throw Error("component " + std::to_string(comp) + " out of range for dim " +
                    std::to_string(dim_));
    return data_[static_cast<std::size_t>(order) * dim_ + comp];
}

JetPoint JetPoint::with_deriv(int order, int comp, double value) const {
    deriv(order, comp); // bounds check
    JetPoint out = *this;
    out.data_[static_cast<std::size_t>(order) * dim_ + comp] = value;
    check_finite(out.data_);
    return out;
}

JetPoint JetPoint::with_time(double t) const {
    if (!std::isfinite(t)) throw Error("jet time must be finite");
    JetPoint out = *this;
    out.t_ = t;
    return out;
}

JetPoint taylor_propagate(const JetPoint& jet, double dt, int order) {
    if (order < 0 || order > jet.max_order())
        throw OrderError("propagation order " + std::to_string(order) +
                         " exceeds jet order " + std::to_string(jet.max_order()));
    if (!std::isfinite(dt)) throw Error("dt must be finite");

    const int dim = jet.dim();
    std::vector<double> out = jet.data();
    for (int n = 0; n <= order; ++n) {
        for (int c = 0; c < dim; ++c) {
            double acc = 0.0;
            double dt_pow = 1.0;   // dt^j / j!
            for (int j = 0; n + j <= order; ++j) {
                acc += jet.deriv(n + j, c) * dt_pow;
                dt_pow *= dt / (j + 1);
            }
            out[static_cast<std::size_t>(n) * dim + c] = acc;
        }
    }
    return JetPoint(jet.t() + dt, dim, std::move(out));
}

JetPoint truncate_jet(const JetPoint& jet, int new_max_order) {
    if (new_max_order < 0 || new_max_order > jet.max_order())
        throw OrderError("truncation order " + std::to_string(new_max_order) +
                         " out of range (jet carries 0.." + std::to_string(jet.max_order()) + ")");
    std::vector<double> out(jet.data().begin(),
                            jet.data().begin() + static_cast<std::size_t>(new_max_order + 1) * jet.dim());
    return JetPoint(jet.t(), jet.dim(), std::move(out));
}

void validate(const Trajectory& traj) {
    if (traj.samples.empty()) throw Error("trajectory has no samples");
    const int dim = traj.samples.front().dim();
    const int m = traj.samples.front().max_order();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const JetPoint& s = traj.samples[i];
        if (s.dim() != dim || s.max_order() != m)
            throw Error("trajectory samples must share dim and order");
        if (i > 0 && !(s.t() > traj.samples[i - 1].t()))
            throw Error("trajectory samples must be strictly increasing in t");
    }
}

bool is_uniformly_sampled(const Trajectory& traj, double rel_tol) {
    if (traj.samples.size() < 3) return true;
    const double h0 = traj.samples[1].t() - traj.samples[0].t();
    for (std::size_t i = 2; i < traj.samples.size(); ++i) {
        const double h = traj.samples[i].t() - traj.samples[i - 1].t();
        if (std::abs(h - h0) > rel_tol * std::abs(h0)) return false;
    }
    return true;
}

namespace {

/// Two-point Hermite interpolation between bracketing jets: one component,
/// all derivative orders of both endpoints (degree 2M+1, local error
/// O(dt^(2M+2))).  Returns the power-basis coefficients around t_a.
std::vector<double> hermite_coefficients(const JetPoint& a, const JetPoint& b, int comp) {
    const int m = a.max_order();
    const int k = 2 * (m + 1);
    std::vector<double> nodes(k), table(k);
    double fact = 1.0;
    std::vector<double> inv_fact(m + 1);
    for (int j = 0; j <= m; ++j) {
        if (j > 0) fact *= j;
        inv_fact[j] = 1.0 / fact;
    }
    for (int j = 0; j <= m; ++j) {
        nodes[j] = 0.0;                 // t_a, shifted coordinates
        nodes[m + 1 + j] = b.t() - a.t();
        table[j] = a.deriv(0, comp);
        table[m + 1 + j] = b.deriv(0, comp);
    }
    // divided differences with repeated nodes
    std::vector<double> coeff(k);
    coeff[0] = table[0];
    for (int w = 1; w < k; ++w) {
        for (int i = 0; i + w < k; ++i) {
            if (nodes[i + w] == nodes[i]) {
                const JetPoint& src = nodes[i] == 0.0 ? a : b;
                table[i] = src.deriv(w, comp) * inv_fact[w];
            } else {
                table[i] = (table[i + 1] - table[i]) / (nodes[i + w] - nodes[i]);
            }
        }
        coeff[w] = table[0];
    }
    // Newton form -> power basis in u = t - t_a
    std::vector<double> poly{coeff[k - 1]};
    for (int j = k - 2; j >= 0; --j) {
        poly.push_back(0.0);
        for (std::size_t d = poly.size() - 1; d > 0; --d)
            poly[d] = poly[d - 1] - nodes[j] * poly[d];
        poly[0] = coeff[j] - nodes[j] * poly[0];
    }
    return poly;   // poly[d] multiplies u^d
}

double poly_derivative_at(const std::vector<double>& poly, double u, int n) {
    double acc = 0.0;
    for (std::size_t d = poly.size(); d-- > static_cast<std::size_t>(n);) {
        double w = poly[d];
        for (int j = 0; j < n; ++j) w *= static_cast<double>(d - j);
        acc = acc * u + w;
    }
    return acc;
}

} // namespace

Trajectory resample_uniform(const Trajectory& traj, int n_samples) {
    validate(traj);
    if (traj.samples.size() < 2 || n_samples < 2)
        throw Error("resample needs at least 2 samples");
    const double t0 = traj.samples.front().t();
    const double t1 = traj.samples.back().t();
    const int m = traj.samples.front().max_order();
    const int dim = traj.samples.front().dim();

    Trajectory out;
    out.method = traj.method + "+resample";
    out.samples.reserve(n_samples);
    std::size_t seg = 0;
    std::vector<std::vector<double>> polys(dim);
    bool polys_valid = false;
    for (int i = 0; i < n_samples; ++i) {
        const double t = i == n_samples - 1 ? t1 : t0 + (t1 - t0) * i / (n_samples - 1);
        while (seg + 2 < traj.samples.size() && traj.samples[seg + 1].t() <= t) {
            ++seg;
            polys_valid = false;
        }
        const JetPoint& a = traj.samples[seg];
        const JetPoint& b = traj.samples[seg + 1];
        if (!polys_valid) {
            for (int c = 0; c < dim; ++c) polys[c] = hermite_coefficients(a, b, c);
            polys_valid = true;
        }
        std::vector<double> data(static_cast<std::size_t>(m + 1) * dim);
        for (int n = 0; n <= m; ++n)
            for (int c = 0; c < dim; ++c)
                data[static_cast<std::size_t>(n) * dim + c] =
                    poly_derivative_at(polys[c], t - a.t(), n);
        out.samples.emplace_back(t, dim, std::move(data));
    }
    validate(out);
    return out;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    validate(traj);
    static const char* comp_names[3] = {"x", "y", "z"};
    const int dim = traj.samples.front().dim();
    const int m = traj.samples.front().max_order();
    out << "t";
    for (int n = 0; n <= m; ++n)
        for (int c = 0; c < dim; ++c)
            out << ",r" << n << "_" << comp_names[c];
    out << "\n";
    for (const JetPoint& s : traj.samples) {
        out << format_full(s.t());
        for (int n = 0; n <= m; ++n)
            for (int c = 0; c < dim; ++c)
                out << "," << format_full(s.deriv(n, c));
        out << "\n";
    }
}

} // namespace jetmech
