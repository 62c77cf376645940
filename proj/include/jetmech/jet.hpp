#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

#include "jetmech/errors.hpp"

namespace jetmech {

/// A point of the extended phase space: a time instant together with the
/// coordinate vector and its time derivatives up to a fixed order M.
///
/// derivs are stored order-major: entry (n, c) is component c of the n-th
/// time derivative, in units of m/s^n.  Immutable after construction; the
/// with_* helpers return modified copies.
class JetPoint {
public:
    /// All-zero jet of the given spatial dimension carrying orders 0..max_order.
    JetPoint(double t, int dim, int max_order);

    /// Jet from flat order-major data of size (max_order+1)*dim.
    JetPoint(double t, int dim, std::vector<double> data);

    /// Dimension-1 convenience: orders 0..M as a plain list.
    static JetPoint scalar(double t, std::vector<double> orders);

    double t() const { return t_; }
    int dim() const { return dim_; }
    int max_order() const { return static_cast<int>(data_.size() / dim_) - 1; }

    double deriv(int order, int comp = 0) const;

    /// Flat order-major storage.
    const std::vector<double>& data() const { return data_; }

    JetPoint with_deriv(int order, int comp, double value) const;
    JetPoint with_time(double t) const;

private:
    double t_;
    int dim_;
    std::vector<double> data_;
};

/// Taylor-propagates the jet by dt: each derivative of order n becomes
/// sum_{j=0..order-n} derivs[n+j] dt^j / j!.  Orders above `order` are copied
/// unchanged (treated as frozen, not extrapolated).
JetPoint taylor_propagate(const JetPoint& jet, double dt, int order);

/// Drops derivative orders above new_max_order.
JetPoint truncate_jet(const JetPoint& jet, int new_max_order);

/// Time-ordered sequence of jets with uniform order and dimension, as produced
/// by integration.
struct Trajectory {
    std::vector<JetPoint> samples;
    std::string method;     ///< integration method name
    long accepted = 0;      ///< accepted step count
    long rejected = 0;      ///< rejected (re-tried) step count
};

/// Throws unless samples are strictly increasing in t and share order/dim.
void validate(const Trajectory& traj);

bool is_uniformly_sampled(const Trajectory& traj, double rel_tol = 1e-9);

/// Resamples onto a uniform grid over the same span by Taylor propagation
/// from the nearest earlier sample.  n_samples >= 2.
Trajectory resample_uniform(const Trajectory& traj, int n_samples);

/// CSV export: header `t,r0_x[,r0_y,r0_z],r1_x,...`, one column per derivative
/// order per component, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);

/// Formats a double with full round-trip precision (17 significant digits).
std::string format_full(double v);

} // namespace jetmech
