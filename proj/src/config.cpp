#include "jetmech/config.hpp"

#include "jetmech/action.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace jetmech {

using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"seed", "lagrangian", "integrator", "initial", "potential", "action", "output"}},
    {"lagrangian", {"kind", "coeffs", "expr", "params", "omega", "omega1", "omega2"}},
    {"integrator", {"method", "step", "relTol", "absTol", "maxSteps", "tspan"}},
    {"initial", {"t", "dim", "derivs"}},
    {"potential", {"kind", "G", "M", "k", "variant", "coefficients", "radii", "sweep"}},
    {"potential.sweep", {"rmin", "rmax", "points", "spacing"}},
    {"action", {"bumpExponent", "component", "epsilons", "samples", "residualThreshold"}},
    {"output", {"directory", "trajectory", "summary", "report", "table", "jetOrder"}},
};

void check_keys(const json& node, const std::string& path) {
    if (!node.is_object()) return;
    auto it = kSchema.find(path);
    // free-form objects (lagrangian.params) are not in the schema table
    if (it == kSchema.end()) return;
    for (const auto& [key, value] : node.items()) {
        if (!it->second.count(key)) {
            const std::string full = path.empty() ? key : path + "." + key;
            throw ConfigError("unknown config key '" + full + "'", full);
        }
        const std::string child = path.empty() ? key : path + "." + key;
        if (child != "lagrangian.params") check_keys(value, child);
    }
}

[[noreturn]] void missing(const std::string& key) {
    throw ConfigError("missing config key '" + key + "'", key);
}

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' must be " + expected, key);
}

const json* find(const json& doc, const std::string& dotted) {
    const json* node = &doc;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const std::size_t dot = dotted.find('.', start);
        const std::string part = dotted.substr(start, dot - start);
        if (!node->is_object() || !node->contains(part)) return nullptr;
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return node;
}

double get_number(const json& doc, const std::string& key) {
    const json* n = find(doc, key);
    if (!n) missing(key);
    if (!n->is_number()) bad_type(key, "a number");
    return n->get<double>();
}

double get_number_or(const json& doc, const std::string& key, double fallback) {
    const json* n = find(doc, key);
    if (!n) return fallback;
    if (!n->is_number()) bad_type(key, "a number");
    return n->get<double>();
}

long get_integer_or(const json& doc, const std::string& key, long fallback) {
    const json* n = find(doc, key);
    if (!n) return fallback;
    if (!n->is_number_integer()) bad_type(key, "an integer");
    return n->get<long>();
}

std::string get_string(const json& doc, const std::string& key) {
    const json* n = find(doc, key);
    if (!n) missing(key);
    if (!n->is_string()) bad_type(key, "a string");
    return n->get<std::string>();
}

std::string get_string_or(const json& doc, const std::string& key, const std::string& fallback) {
    const json* n = find(doc, key);
    if (!n) return fallback;
    if (!n->is_string()) bad_type(key, "a string");
    return n->get<std::string>();
}

std::vector<double> get_number_array(const json& doc, const std::string& key) {
    const json* n = find(doc, key);
    if (!n) missing(key);
    if (!n->is_array()) bad_type(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& v : *n) {
        if (!v.is_number()) bad_type(key, "an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin_ = origin;
    try {
        cfg.doc_ = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), origin);
    }
    if (!cfg.doc_.is_object()) throw ConfigError("config root must be a JSON object", origin);
    return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like section.key=value: '" + assignment + "'",
                          assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;   // bare words become strings
    }
    json* node = &doc_;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (part.empty())
            throw ConfigError("empty path component in override '" + assignment + "'", path);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

void RunConfig::validate_schema() const { check_keys(doc_, ""); }

long RunConfig::seed() const { return get_integer_or(doc_, "seed", 0); }

int RunConfig::dim() const {
    const long d = get_integer_or(doc_, "initial.dim", 1);
    if (d < 1 || d > 3) bad_type("initial.dim", "1, 2 or 3");
    return static_cast<int>(d);
}

LagrangianModel RunConfig::lagrangian() const {
    const std::string kind = get_string(doc_, "lagrangian.kind");
    if (kind == "quadratic") {
        return LagrangianModel::quadratic(get_number_array(doc_, "lagrangian.coeffs"));
    }
    if (kind == "expression") {
        const std::string text = get_string(doc_, "lagrangian.expr");
        std::map<std::string, double> params;
        if (const json* p = find(doc_, "lagrangian.params")) {
            if (!p->is_object()) bad_type("lagrangian.params", "an object of numbers");
            for (const auto& [name, v] : p->items()) {
                if (!v.is_number()) bad_type("lagrangian.params." + name, "a number");
                params[name] = v.get<double>();
            }
        }
        try {
            return LagrangianModel::expression(text, std::move(params));
        } catch (const ParseError& e) {
            throw ConfigError(std::string("lagrangian.expr: ") + e.what(), "lagrangian.expr");
        }
    }
    if (kind == "harmonic")
        return LagrangianModel::harmonic(get_number(doc_, "lagrangian.omega"));
    if (kind == "pais-uhlenbeck")
        return LagrangianModel::pais_uhlenbeck(get_number(doc_, "lagrangian.omega1"),
                                               get_number(doc_, "lagrangian.omega2"));
    throw ConfigError("lagrangian.kind must be quadratic, expression, harmonic or pais-uhlenbeck",
                      "lagrangian.kind");
}

IntegratorSpec RunConfig::integrator() const {
    IntegratorSpec spec;
    const std::string method = get_string_or(doc_, "integrator.method", "rk45");
    if (method == "rk4") {
        spec = IntegratorSpec::fixed(get_number(doc_, "integrator.step"));
    } else if (method == "rk45") {
        spec = IntegratorSpec::adaptive(get_number_or(doc_, "integrator.relTol", 1e-10),
                                        get_number_or(doc_, "integrator.absTol", 1e-12));
    } else {
        throw ConfigError("integrator.method must be rk4 or rk45", "integrator.method");
    }
    spec.max_steps = get_integer_or(doc_, "integrator.maxSteps", spec.max_steps);
    return spec;
}

std::pair<double, double> RunConfig::tspan() const {
    const std::vector<double> span = get_number_array(doc_, "integrator.tspan");
    if (span.size() != 2) bad_type("integrator.tspan", "an array [t0, t1]");
    return {span[0], span[1]};
}

JetPoint RunConfig::initial_jet() const {
    const int d = dim();
    const json* n = find(doc_, "initial.derivs");
    if (!n) missing("initial.derivs");
    if (!n->is_array() || n->empty()) bad_type("initial.derivs", "a non-empty array");
    double t0 = get_number_or(doc_, "initial.t", 0.0);
    if (const json* span = find(doc_, "integrator.tspan"); span && !find(doc_, "initial.t"))
        t0 = span->at(0).get<double>();

    std::vector<double> data;
    if (n->front().is_array()) {
        for (const auto& row : *n) {
            if (!row.is_array() || static_cast<int>(row.size()) != d)
                bad_type("initial.derivs", "rows of dim numbers");
            for (const auto& v : row) data.push_back(v.get<double>());
        }
    } else {
        if (d != 1) bad_type("initial.derivs", "rows of dim numbers (flat form is dim 1 only)");
        for (const auto& v : *n) {
            if (!v.is_number()) bad_type("initial.derivs", "numbers");
            data.push_back(v.get<double>());
        }
    }
    return JetPoint(t0, d, std::move(data));
}

PotentialModel RunConfig::potential() const {
    const std::string kind = get_string(doc_, "potential.kind");
    const double G = get_number_or(doc_, "potential.G", 1.0);
    const double M = get_number_or(doc_, "potential.M", 1.0);
    if (kind == "newtonian") return PotentialModel::newtonian(G, M);
    const double k = get_number(doc_, "potential.k");
    if (kind == "exponential") {
        const std::string variant = get_string_or(doc_, "potential.variant", "shifted");
        if (variant == "raw")
            return PotentialModel::exponential(G, M, k, PotentialModel::Variant::raw);
        if (variant == "shifted")
            return PotentialModel::exponential(G, M, k, PotentialModel::Variant::shifted);
        throw ConfigError("potential.variant must be raw or shifted", "potential.variant");
    }
    if (kind == "series")
        return PotentialModel::series(G, M, k, get_number_array(doc_, "potential.coefficients"));
    throw ConfigError("potential.kind must be newtonian, exponential or series",
                      "potential.kind");
}

std::vector<double> RunConfig::potential_radii() const {
    if (find(doc_, "potential.radii")) return get_number_array(doc_, "potential.radii");
    if (!find(doc_, "potential.sweep")) missing("potential.radii");
    const double rmin = get_number(doc_, "potential.sweep.rmin");
    const double rmax = get_number(doc_, "potential.sweep.rmax");
    const long points = get_integer_or(doc_, "potential.sweep.points", 50);
    const std::string spacing = get_string_or(doc_, "potential.sweep.spacing", "log");
    if (!(rmin > 0) || !(rmax > rmin)) bad_type("potential.sweep", "0 < rmin < rmax");
    if (points < 2) bad_type("potential.sweep.points", ">= 2");
    std::vector<double> radii(points);
    for (long i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / (points - 1);
        radii[i] = spacing == "linear" ? rmin + u * (rmax - rmin)
                                       : rmin * std::pow(rmax / rmin, u);
    }
    return radii;
}

int RunConfig::action_bump_exponent(int fallback) const {
    return static_cast<int>(get_integer_or(doc_, "action.bumpExponent", fallback));
}
int RunConfig::action_component() const {
    return static_cast<int>(get_integer_or(doc_, "action.component", 0));
}
int RunConfig::action_samples() const {
    return static_cast<int>(get_integer_or(doc_, "action.samples", 2001));
}
double RunConfig::action_residual_threshold() const {
    return get_number_or(doc_, "action.residualThreshold", 1e-4);
}
std::vector<double> RunConfig::action_epsilons() const {
    if (find(doc_, "action.epsilons")) return get_number_array(doc_, "action.epsilons");
    return default_eps_sweep();
}

std::string RunConfig::output_path(const std::string& key, const std::string& fallback) const {
    const std::string dir = get_string_or(doc_, "output.directory", ".");
    const std::string name = get_string_or(doc_, "output." + key, fallback);
    return (std::filesystem::path(dir) / name).string();
}

int RunConfig::output_jet_order() const {
    return static_cast<int>(get_integer_or(doc_, "output.jetOrder", 0));
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp + "'");
        out << content;
        if (!out.flush()) throw Error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace jetmech
