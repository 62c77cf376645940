#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jetmech/integrate.hpp"
#include "jetmech/jet.hpp"
#include "jetmech/lagrangian.hpp"
#include "jetmech/potentials.hpp"

namespace jetmech {

/// Validated run configuration.  The on-disk format is JSON; unknown keys
/// anywhere in the document are hard errors so typos cannot silently change a
/// run.  All getters raise ConfigError naming the offending key.
class RunConfig {
public:
    static RunConfig load_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text, const std::string& origin = "<text>");

    /// Applies a dotted-path override such as "integrator.relTol=1e-10".
    /// The value is parsed as JSON when possible, else taken as a string.
    void apply_override(const std::string& assignment);

    /// Rejects unknown keys at every level.
    void validate_schema() const;

    long seed() const;                       ///< default 0
    LagrangianModel lagrangian() const;
    int dim() const;                         ///< initial.dim, default 1
    IntegratorSpec integrator() const;
    std::pair<double, double> tspan() const;
    JetPoint initial_jet() const;
    PotentialModel potential() const;
    std::vector<double> potential_radii() const;

    // action-check section (defaults in parentheses)
    int action_bump_exponent(int fallback) const;    ///< (N+1)
    int action_component() const;                    ///< (0)
    int action_samples() const;                      ///< (2001)
    double action_residual_threshold() const;        ///< (1e-4)
    std::vector<double> action_epsilons() const;     ///< (default_eps_sweep)

    // output section
    std::string output_path(const std::string& key, const std::string& fallback) const;
    int output_jet_order() const;                    ///< (0 = keep the integration order)

    const nlohmann::json& raw() const { return doc_; }
    const std::string& origin() const { return origin_; }

private:
    nlohmann::json doc_;
    std::string origin_;
};

/// Writes content to path atomically (temp file in the same directory, then
/// rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace jetmech
