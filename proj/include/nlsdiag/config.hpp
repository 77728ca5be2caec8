#pragma once

#include <boost/program_options/parsers.hpp>

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "nlsdiag/errors.hpp"
#include "nlsdiag/fields.hpp"
#include "nlsdiag/solver.hpp"

namespace nlsdiag {

enum class Scenario {
    free_calibration,
    linear_scatter_diag,
    nls_longrange,
    nls_shortrange_control,
    delta_potential,
    hartree_diag,
    theorem3_demo,
};

inline const std::vector<std::pair<Scenario, std::string>>& scenario_names() {
    static const std::vector<std::pair<Scenario, std::string>> names{
        {Scenario::free_calibration, "free_calibration"},
        {Scenario::linear_scatter_diag, "linear_scatter_diag"},
        {Scenario::nls_longrange, "nls_longrange"},
        {Scenario::nls_shortrange_control, "nls_shortrange_control"},
        {Scenario::delta_potential, "delta_potential"},
        {Scenario::hartree_diag, "hartree_diag"},
        {Scenario::theorem3_demo, "theorem3_demo"},
    };
    return names;
}

inline std::string to_string(Scenario s) {
    for (const auto& [k, v] : scenario_names())
        if (k == s) return v;
    return "?";
}

inline Scenario scenario_from_string(const std::string& name) {
    for (const auto& [k, v] : scenario_names())
        if (v == name) return k;
    throw ConfigError("scenario: unknown scenario '" + name + "'");
}

struct GridParams {
    int dim = 1;
    std::size_t points = 1024;
    double box_length = 80.0;

    SpatialGrid make() const { return SpatialGrid(dim, points, box_length); }
};

struct DiagnosticsParams {
    std::string phi = "gaussian";  // gaussian | auto (aligned with v+)
    double phi_width = 1.0;
    Vec phi_center{0.0, 0.0};
    double level = 100.0;  // truncation level n of the test function
    double t_min = 1.0;    // synthetic series: geometric times
    double t_max = 100.0;
    int t_count = 60;
    double tau_min = 10.0;
    double tau_max = 100.0;
    double epsilon = 0.05;
    double window = 2.0;
    std::vector<double> window_starts{5.0, 10.0, 20.0, 40.0, 80.0};
    int window_samples = 21;
    double cauchy_t_min = 50.0;
    double cauchy_tolerance = 0.05;
    double main_tolerance = 0.05;
    int n_max = 20;
    double hypothesis_t_min = 50.0;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::free_calibration;
    std::uint64_t seed = 0;
    GridParams grid;
    NonlinearitySpec nl;
    SolverConfig solver;
    double snapshot_every = 0.0;  // > 0: uniform snapshots, overrides solver.snapshot_times
    InitialDataSpec initial;
    LocalizedPathSpec localized;
    PotentialSpec potential;
    std::optional<InitialTerm> v_plus;
    DiagnosticsParams diagnostics;

    /// Snapshot times the solver is asked for.
    std::vector<double> snapshot_times() const {
        if (!(snapshot_every > 0.0)) return solver.snapshot_times;
        std::vector<double> t;
        const auto count = static_cast<long>(std::floor(solver.t_end / snapshot_every * (1.0 + 1e-12)));
        for (long k = 1; k <= count; ++k) t.push_back(static_cast<double>(k) * snapshot_every);
        if (t.empty() || t.back() < solver.t_end * (1.0 - 1e-12)) t.push_back(solver.t_end);
        return t;
    }
};

// ---------------------------------------------------------------------------
// Defaults

namespace detail {

inline LocalizedComponent moving_gaussian(double width, double v, complex amp = 1.0) {
    LocalizedComponent c;
    c.width = width;
    c.amplitude = amp;
    c.path = Path::linear({0.0, 0.0}, {v, 0.0});
    return c;
}

inline InitialTerm gaussian_term(double width, complex amp = 1.0) {
    InitialTerm t;
    t.width = width;
    t.amplitude = amp;
    return t;
}

}  // namespace detail

/// Runnable defaults for a scenario; parse_config overrides them key by key.
inline ScenarioConfig scenario_defaults(Scenario s) {
    ScenarioConfig c;
    c.scenario = s;
    auto& d = c.diagnostics;
    switch (s) {
        case Scenario::free_calibration:
            c.grid = {1, 1024, 80.0};
            c.solver.dt = 0.01;
            c.solver.t_end = 10.0;
            c.snapshot_every = 0.5;
            c.initial.terms = {detail::gaussian_term(1.0)};
            d.phi_width = 1.5;
            d.phi_center = {1.0, 0.0};
            break;
        case Scenario::linear_scatter_diag:
            c.grid = {1, 4096, 1024.0};
            c.solver.dt = 0.01;
            c.solver.t_end = 50.0;
            c.snapshot_every = 1.0;
            c.initial.terms = {detail::gaussian_term(1.0)};
            c.potential.components.push_back({PotentialProfile::gaussian_well, 1.0, Path::fixed({0.0, 0.0}), 1.0});
            d.phi_width = 1.3;
            d.phi_center = {0.5, 0.0};
            d.t_min = 1.0;
            break;
        case Scenario::nls_longrange:
            c.grid = {1, 4096, 2048.0};
            c.v_plus = detail::gaussian_term(2.0);
            c.localized.components = {detail::moving_gaussian(1.5, 5.0)};
            d.phi = "auto";
            break;
        case Scenario::nls_shortrange_control:
            c.grid = {1, 4096, 2048.0};
            c.nl.p = 2.5;
            c.solver.dt = 0.01;
            c.solver.t_end = 100.0;
            c.snapshot_every = 1.0;
            c.initial.terms = {detail::gaussian_term(2.0, 0.1)};
            d.phi_width = 2.0;
            break;
        case Scenario::delta_potential: {
            c.grid = {1, 4096, 1024.0};
            c.potential.atoms.push_back({{0.0, 0.0}, 1.0});
            LocalizedComponent bound;
            bound.profile = LocalizedProfile::bound_state;
            bound.width = 2.0;
            bound.boost = false;
            c.localized.components = {bound};
            c.v_plus = detail::gaussian_term(1.0);
            d.phi_center = {0.4, 0.0};
            break;
        }
        case Scenario::hartree_diag:
            c.grid = {1, 4096, 2048.0};
            c.nl.kind = NonlinearitySpec::Kind::hartree;
            c.v_plus = detail::gaussian_term(2.0);
            c.localized.components = {detail::moving_gaussian(1.5, 5.0)};
            d.phi = "auto";
            d.main_tolerance = 0.08;
            break;
        case Scenario::theorem3_demo:
            c.grid = {1, 4096, 1024.0};
            c.nl.p = 1.0;
            c.v_plus = detail::gaussian_term(1.5);
            c.localized.components = {detail::moving_gaussian(1.0, 1.0)};
            d.t_min = 5.0;
            d.t_max = 200.0;
            d.t_count = 20;
            break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class KeyValues {
public:
    explicit KeyValues(const std::string& text) {
        std::istringstream in(text);
        boost::program_options::options_description none;
        try {
            const auto parsed = boost::program_options::parse_config_file(in, none, true);
            for (const auto& o : parsed.options) {
                const std::string v = o.value.empty() ? "" : trim(o.value.front());
                if (!kv_.emplace(o.string_key, v).second) throw ConfigError(o.string_key + ": duplicate key");
            }
        } catch (const boost::program_options::error& e) {
            throw ConfigError(std::string("config syntax: ") + e.what());
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    bool has_prefix(const std::string& prefix) const {
        for (const auto& [k, v] : kv_)
            if (k.rfind(prefix, 0) == 0) return true;
        return false;
    }

    /// Sorted indices N of keys "prefix.N.field".
    std::vector<int> indices(const std::string& prefix) const {
        std::set<int> out;
        for (const auto& [k, v] : kv_) {
            if (k.rfind(prefix + ".", 0) != 0) continue;
            const std::string rest = k.substr(prefix.size() + 1);
            const auto dot = rest.find('.');
            const std::string idx = rest.substr(0, dot);
            int n = -1;
            const auto r = std::from_chars(idx.data(), idx.data() + idx.size(), n);
            if (r.ec != std::errc() || r.ptr != idx.data() + idx.size() || n < 0 || dot == std::string::npos)
                throw ConfigError(k + ": expected " + prefix + ".<index>.<field>");
            out.insert(n);
        }
        return {out.begin(), out.end()};
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    void finish() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw ConfigError(k + ": unknown key");
    }

    void read(const std::string& key, double& out) {
        if (auto v = take(key)) out = to_double(key, *v);
    }
    template <std::integral T>
        requires(!std::is_same_v<T, bool>)
    void read(const std::string& key, T& out) {
        if (auto v = take(key)) out = to_integer<T>(key, *v);
    }
    void read(const std::string& key, bool& out) {
        if (auto v = take(key)) {
            if (*v == "true") out = true;
            else if (*v == "false") out = false;
            else throw ConfigError(key + ": expected true or false, got '" + *v + "'");
        }
    }
    void read(const std::string& key, std::string& out) {
        if (auto v = take(key)) out = unquote(key, *v);
    }
    void read(const std::string& key, std::vector<double>& out) {
        if (auto v = take(key)) out = to_list(key, *v);
    }
    void read_vec(const std::string& key, Vec& out, int dim) {
        auto v = take(key);
        if (!v) return;
        const auto list = v->starts_with("[") ? to_list(key, *v) : std::vector<double>{to_double(key, *v)};
        if (static_cast<int>(list.size()) != dim)
            throw ConfigError(key + ": expected " + std::to_string(dim) + " component(s)");
        out = {list[0], dim == 2 ? list[1] : 0.0};
    }
    void read_complex(const std::string& key, complex& out) {
        double re = out.real(), im = out.imag();
        read(key + "_re", re);
        read(key + "_im", im);
        out = {re, im};
    }

private:
    static double to_double(const std::string& key, const std::string& s) {
        double x = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x))
            throw ConfigError(key + ": expected a finite number, got '" + s + "'");
        return x;
    }
    template <class T>
    static T to_integer(const std::string& key, const std::string& s) {
        T x{};
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size())
            throw ConfigError(key + ": expected an integer, got '" + s + "'");
        return x;
    }
    static std::string unquote(const std::string& key, const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
        if (s.find('"') != std::string::npos) throw ConfigError(key + ": unbalanced quotes");
        return s;
    }
    static std::vector<double> to_list(const std::string& key, const std::string& s) {
        if (s.size() < 2 || s.front() != '[' || s.back() != ']')
            throw ConfigError(key + ": expected a list [a, b, ...]");
        std::vector<double> out;
        const std::string body = trim(s.substr(1, s.size() - 2));
        if (body.empty()) return out;
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            out.push_back(to_double(key, trim(body.substr(start, comma - start))));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

template <class E>
E enum_from(const std::string& key, const std::string& s, const std::vector<std::pair<E, std::string>>& table) {
    for (const auto& [e, name] : table)
        if (name == s) return e;
    std::string allowed;
    for (const auto& [e, name] : table) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ConfigError(key + ": unknown value '" + s + "' (expected one of " + allowed + ")");
}

template <class E>
std::string enum_name(E e, const std::vector<std::pair<E, std::string>>& table) {
    for (const auto& [v, name] : table)
        if (v == e) return name;
    return "?";
}

inline const std::vector<std::pair<NonlinearitySpec::Kind, std::string>> kKinds{
    {NonlinearitySpec::Kind::power, "power"}, {NonlinearitySpec::Kind::hartree, "hartree"}};
inline const std::vector<std::pair<InitialProfile, std::string>> kInitialProfiles{
    {InitialProfile::gaussian, "gaussian"}, {InitialProfile::sech, "sech"},
    {InitialProfile::modulated_gaussian, "modulated_gaussian"}};
inline const std::vector<std::pair<LocalizedProfile, std::string>> kLocalizedProfiles{
    {LocalizedProfile::gaussian, "gaussian"}, {LocalizedProfile::sech, "sech"},
    {LocalizedProfile::bound_state, "bound_state"}};
inline const std::vector<std::pair<PotentialProfile, std::string>> kPotentialProfiles{
    {PotentialProfile::gaussian_well, "gaussian_well"}, {PotentialProfile::inverse_power, "inverse_power"},
    {PotentialProfile::ball, "ball"}};
inline const std::vector<std::pair<PotentialClass, std::string>> kPotentialClasses{
    {PotentialClass::v1, "v1"}, {PotentialClass::v2_ld2, "v2_ld2"}, {PotentialClass::v2_l1plus, "v2_l1plus"},
    {PotentialClass::v2_measure, "v2_measure"}};
inline const std::vector<std::pair<TimeModulation::Kind, std::string>> kModulations{
    {TimeModulation::Kind::none, "none"}, {TimeModulation::Kind::cosine, "cosine"}};

template <class E>
void read_enum(KeyValues& kv, const std::string& key, E& out, const std::vector<std::pair<E, std::string>>& table) {
    std::string s;
    kv.read(key, s);
    if (!s.empty()) out = enum_from(key, s, table);
}

inline void read_term(KeyValues& kv, const std::string& p, InitialTerm& t, int dim) {
    read_enum(kv, p + ".profile", t.profile, kInitialProfiles);
    kv.read_complex(p + ".amplitude", t.amplitude);
    kv.read_vec(p + ".center", t.center, dim);
    kv.read_vec(p + ".velocity", t.velocity, dim);
    kv.read(p + ".phase", t.phase);
    kv.read(p + ".width", t.width);
    kv.read_vec(p + ".wavenumber", t.wavenumber, dim);
}

// Linear paths c(t) = position + velocity t, optionally with the oscillating term.
inline void read_path(KeyValues& kv, const std::string& p, const std::string& origin_key, Path& path, int dim) {
    Vec c0 = path.at(0.0);
    Vec v = path.coefficients.size() > 1 ? path.coefficients[1] : Vec{0.0, 0.0};
    kv.read_vec(p + "." + origin_key, c0, dim);
    kv.read_vec(p + ".velocity", v, dim);
    Vec amp = path.oscillation_amplitude;
    double rate = path.oscillation_rate;
    kv.read_vec(p + ".oscillation_amplitude", amp, dim);
    kv.read(p + ".oscillation_rate", rate);
    path = Path::linear(c0, v);
    path.oscillation_amplitude = amp;
    path.oscillation_rate = rate;
}

template <class T, class Fn>
void read_list(KeyValues& kv, const std::string& prefix, std::vector<T>& list, Fn&& read_one) {
    const auto idx = kv.indices(prefix);
    if (idx.empty()) return;
    list.clear();
    for (int i : idx) {
        T item{};
        read_one(prefix + "." + std::to_string(i), item);
        list.push_back(std::move(item));
    }
}

}  // namespace detail

/// Checks every value; messages carry the key path.
inline void validate_config(const ScenarioConfig& c) {
    const auto& g = c.grid;
    if (g.dim != 1 && g.dim != 2) throw ConfigError("grid.dim: must be 1 or 2");
    if (g.points < 8 || (g.points & (g.points - 1)) != 0)
        throw ConfigError("grid.points: must be a power of two >= 8 (got " + std::to_string(g.points) + ")");
    if (!(g.box_length > 0.0)) throw ConfigError("grid.box_length: must be positive");
    if (!(c.nl.p > 0.0)) throw ConfigError("nonlinearity.p: must be > 0");
    if (c.nl.mu == complex(0.0, 0.0)) throw ConfigError("nonlinearity.mu: must be nonzero");
    SolverConfig solver = c.solver;
    solver.snapshot_times = c.snapshot_times();
    solver.validate();
    if (c.snapshot_every < 0.0) throw ConfigError("solver.snapshot_every: must be >= 0");
    c.potential.validate(g.dim);
    c.localized.validate(g.dim);
    const auto& d = c.diagnostics;
    if (d.phi != "gaussian" && d.phi != "auto") throw ConfigError("diagnostics.phi: expected gaussian or auto");
    if (d.phi == "auto" && !c.v_plus) throw ConfigError("diagnostics.phi: auto needs a [v_plus] section");
    if (!(d.phi_width > 0.0)) throw ConfigError("diagnostics.phi_width: must be positive");
    if (!(d.level > 0.0)) throw ConfigError("diagnostics.level: must be positive");
    if (!(d.t_min > 0.0) || !(d.t_max > d.t_min)) throw ConfigError("diagnostics.t_max: need 0 < t_min < t_max");
    if (d.t_count < 2) throw ConfigError("diagnostics.t_count: must be >= 2");
    if (!(d.tau_min > 1.0) || !(d.tau_max > d.tau_min)) throw ConfigError("diagnostics.tau_max: need 1 < tau_min < tau_max");
    if (!(d.epsilon > 0.0)) throw ConfigError("diagnostics.epsilon: must be positive");
    if (!(d.window > 0.0)) throw ConfigError("diagnostics.window: must be positive");
    if (d.window_samples < 3) throw ConfigError("diagnostics.window_samples: must be >= 3");
    if (d.n_max < 1 || d.n_max > 60) throw ConfigError("diagnostics.n_max: must lie in [1, 60]");

    const bool needs_initial = c.scenario == Scenario::free_calibration || c.scenario == Scenario::linear_scatter_diag ||
                               c.scenario == Scenario::nls_shortrange_control;
    if (needs_initial && c.initial.terms.empty() && !c.initial.radiation)
        throw ConfigError("initial: scenario " + to_string(c.scenario) + " needs initial data");
    if (!needs_initial && !c.v_plus)
        throw ConfigError("v_plus: scenario " + to_string(c.scenario) + " needs a [v_plus] section");
    switch (c.scenario) {
        case Scenario::nls_longrange:
            if (!c.nl.long_range(g.dim)) throw ConfigError("nonlinearity.p: nls_longrange needs p <= 2/d");
            break;
        case Scenario::nls_shortrange_control:
            if (c.nl.long_range(g.dim)) throw ConfigError("nonlinearity.p: nls_shortrange_control needs p > 2/d");
            if (!(c.nl.p < 4.0 / g.dim)) throw ConfigError("nonlinearity.p: solver runs need p < 4/d");
            break;
        case Scenario::delta_potential:
            if (g.dim != 1) throw ConfigError("grid.dim: delta_potential is one-dimensional");
            if (c.potential.atoms.empty()) throw ConfigError("potential.atom: delta_potential needs an atom");
            break;
        case Scenario::hartree_diag:
            if (c.nl.kind != NonlinearitySpec::Kind::hartree) throw ConfigError("nonlinearity.kind: hartree_diag needs hartree");
            break;
        case Scenario::theorem3_demo:
            if (c.nl.kind != NonlinearitySpec::Kind::power || c.nl.p != 1.0)
                throw ScopeError("nonlinearity.p: theorem3_demo is scoped to the power nonlinearity with p = 1");
            if (!(1.0 <= 2.0 / g.dim)) throw ScopeError("grid.dim: theorem3_demo needs 1 <= 2/d");
            break;
        default: break;
    }
}

/**
 * Reads the key-value document: top-level scenario and seed, then sections
 * [grid] [nonlinearity] [solver] [initial] [initial.term.N] [localized]
 * [localized.component.N] [potential] [potential.component.N]
 * [potential.atom.N] [v_plus] [diagnostics]. Unknown keys are errors.
 */
inline ScenarioConfig parse_config(const std::string& text, std::optional<std::string> scenario_override = std::nullopt) {
    detail::KeyValues kv(text);
    std::string name;
    kv.read("scenario", name);
    if (scenario_override) name = *scenario_override;
    if (name.empty()) throw ConfigError("scenario: missing");
    ScenarioConfig c = scenario_defaults(scenario_from_string(name));
    kv.read("seed", c.seed);

    kv.read("grid.dim", c.grid.dim);
    kv.read("grid.points", c.grid.points);
    kv.read("grid.box_length", c.grid.box_length);
    const int dim = c.grid.dim;
    if (dim != 1 && dim != 2) throw ConfigError("grid.dim: must be 1 or 2");

    detail::read_enum(kv, "nonlinearity.kind", c.nl.kind, detail::kKinds);
    kv.read("nonlinearity.p", c.nl.p);
    kv.read_complex("nonlinearity.mu", c.nl.mu);

    kv.read("solver.dt", c.solver.dt);
    kv.read("solver.t_end", c.solver.t_end);
    kv.read("solver.snapshot_every", c.snapshot_every);
    kv.read("solver.snapshot_times", c.solver.snapshot_times);
    kv.read("solver.mollify_width", c.solver.mollify_width);
    kv.read("solver.dealias", c.solver.dealias);
    kv.read("solver.mass_check_interval", c.solver.mass_check_interval);
    kv.read("solver.adapt_dt", c.solver.adapt_dt);

    if (kv.has("initial.radiation_amplitude") || kv.has("initial.radiation_band")) {
        Radiation r = c.initial.radiation.value_or(Radiation{});
        kv.read("initial.radiation_amplitude", r.amplitude);
        kv.read("initial.radiation_band", r.band);
        c.initial.radiation = r;
    }
    detail::read_list(kv, "initial.term", c.initial.terms,
                      [&](const std::string& p, InitialTerm& t) { detail::read_term(kv, p, t, dim); });

    kv.read("localized.q_exponent", c.localized.q_exponent);
    detail::read_list(kv, "localized.component", c.localized.components, [&](const std::string& p, LocalizedComponent& l) {
        detail::read_enum(kv, p + ".profile", l.profile, detail::kLocalizedProfiles);
        kv.read_complex(p + ".amplitude", l.amplitude);
        kv.read(p + ".width", l.width);
        kv.read(p + ".phase_rate", l.phase_rate);
        detail::read_path(kv, p, "position", l.path, dim);
        kv.read(p + ".spread_beta", l.spread_beta);
        kv.read(p + ".boost", l.boost);
    });

    detail::read_enum(kv, "potential.modulation", c.potential.modulation.kind, detail::kModulations);
    kv.read("potential.omega", c.potential.modulation.omega);
    detail::read_list(kv, "potential.component", c.potential.components, [&](const std::string& p, PotentialComponent& v) {
        detail::read_enum(kv, p + ".profile", v.profile, detail::kPotentialProfiles);
        kv.read_complex(p + ".amplitude", v.amplitude);
        detail::read_path(kv, p, "center", v.center, dim);
        kv.read(p + ".width", v.width);
        kv.read(p + ".exponent", v.exponent);
        detail::read_enum(kv, p + ".class", v.claimed_class, detail::kPotentialClasses);
    });
    detail::read_list(kv, "potential.atom", c.potential.atoms, [&](const std::string& p, PotentialAtom& a) {
        kv.read_vec(p + ".position", a.position, dim);
        kv.read_complex(p + ".weight", a.weight);
    });

    if (kv.has_prefix("v_plus.")) {
        InitialTerm t = c.v_plus.value_or(InitialTerm{});
        detail::read_term(kv, "v_plus", t, dim);
        c.v_plus = t;
    }

    auto& d = c.diagnostics;
    kv.read("diagnostics.phi", d.phi);
    kv.read("diagnostics.phi_width", d.phi_width);
    kv.read_vec("diagnostics.phi_center", d.phi_center, dim);
    kv.read("diagnostics.level", d.level);
    kv.read("diagnostics.t_min", d.t_min);
    kv.read("diagnostics.t_max", d.t_max);
    kv.read("diagnostics.t_count", d.t_count);
    kv.read("diagnostics.tau_min", d.tau_min);
    kv.read("diagnostics.tau_max", d.tau_max);
    kv.read("diagnostics.epsilon", d.epsilon);
    kv.read("diagnostics.window", d.window);
    kv.read("diagnostics.window_starts", d.window_starts);
    kv.read("diagnostics.window_samples", d.window_samples);
    kv.read("diagnostics.cauchy_t_min", d.cauchy_t_min);
    kv.read("diagnostics.cauchy_tolerance", d.cauchy_tolerance);
    kv.read("diagnostics.main_tolerance", d.main_tolerance);
    kv.read("diagnostics.n_max", d.n_max);
    kv.read("diagnostics.hypothesis_t_min", d.hypothesis_t_min);

    kv.finish();
    validate_config(c);
    return c;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Writer {
public:
    explicit Writer(int dim) : dim_(dim) {}

    void section(const std::string& name) { out_ << (out_.tellp() > 0 ? "\n" : "") << "[" << name << "]\n"; }
    void put(const std::string& k, double x) { out_ << k << " = " << fmt_double(x) << "\n"; }
    void put_int(const std::string& k, long long x) { out_ << k << " = " << x << "\n"; }
    void put_u64(const std::string& k, std::uint64_t x) { out_ << k << " = " << x << "\n"; }
    void put(const std::string& k, bool b) { out_ << k << " = " << (b ? "true" : "false") << "\n"; }
    void put(const std::string& k, const std::string& s) { out_ << k << " = \"" << s << "\"\n"; }
    void put(const std::string& k, const std::vector<double>& v) {
        out_ << k << " = [";
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << fmt_double(v[i]);
        out_ << "]\n";
    }
    void put_vec(const std::string& k, const Vec& v) {
        put(k, dim_ == 2 ? std::vector<double>{v[0], v[1]} : std::vector<double>{v[0]});
    }
    void put_complex(const std::string& k, complex z) {
        put(k + "_re", z.real());
        put(k + "_im", z.imag());
    }
    std::string str() const { return out_.str(); }

private:
    int dim_;
    std::ostringstream out_;
};

inline void write_term(Writer& w, const InitialTerm& t) {
    w.put("profile", enum_name(t.profile, kInitialProfiles));
    w.put_complex("amplitude", t.amplitude);
    w.put_vec("center", t.center);
    w.put_vec("velocity", t.velocity);
    w.put("phase", t.phase);
    w.put("width", t.width);
    w.put_vec("wavenumber", t.wavenumber);
}

inline void write_path(Writer& w, const Path& p, const std::string& origin_key) {
    w.put_vec(origin_key, p.at(0.0));
    w.put_vec("velocity", p.coefficients.size() > 1 ? p.coefficients[1] : Vec{0.0, 0.0});
    if (p.oscillating()) {
        w.put_vec("oscillation_amplitude", p.oscillation_amplitude);
        w.put("oscillation_rate", p.oscillation_rate);
    }
}

}  // namespace detail

/// Canonical text of a configuration; parse_config(serialize(c)) reproduces c.
inline std::string serialize_config(const ScenarioConfig& c) {
    detail::Writer w(c.grid.dim);
    w.put("scenario", to_string(c.scenario));
    w.put_u64("seed", c.seed);

    w.section("grid");
    w.put_int("dim", c.grid.dim);
    w.put_int("points", static_cast<long long>(c.grid.points));
    w.put("box_length", c.grid.box_length);

    w.section("nonlinearity");
    w.put("kind", detail::enum_name(c.nl.kind, detail::kKinds));
    w.put("p", c.nl.p);
    w.put_complex("mu", c.nl.mu);

    w.section("solver");
    w.put("dt", c.solver.dt);
    w.put("t_end", c.solver.t_end);
    w.put("snapshot_every", c.snapshot_every);
    w.put("snapshot_times", c.solver.snapshot_times);
    w.put("mollify_width", c.solver.mollify_width);
    w.put("dealias", c.solver.dealias);
    w.put_int("mass_check_interval", c.solver.mass_check_interval);
    w.put("adapt_dt", c.solver.adapt_dt);

    if (c.initial.radiation) {
        w.section("initial");
        w.put("radiation_amplitude", c.initial.radiation->amplitude);
        w.put("radiation_band", c.initial.radiation->band);
    }
    for (std::size_t i = 0; i < c.initial.terms.size(); ++i) {
        w.section("initial.term." + std::to_string(i));
        detail::write_term(w, c.initial.terms[i]);
    }

    w.section("localized");
    w.put("q_exponent", c.localized.q_exponent);
    for (std::size_t i = 0; i < c.localized.components.size(); ++i) {
        const auto& l = c.localized.components[i];
        w.section("localized.component." + std::to_string(i));
        w.put("profile", detail::enum_name(l.profile, detail::kLocalizedProfiles));
        w.put_complex("amplitude", l.amplitude);
        w.put("width", l.width);
        w.put("phase_rate", l.phase_rate);
        detail::write_path(w, l.path, "position");
        w.put("spread_beta", l.spread_beta);
        w.put("boost", l.boost);
    }

    w.section("potential");
    w.put("modulation", detail::enum_name(c.potential.modulation.kind, detail::kModulations));
    w.put("omega", c.potential.modulation.omega);
    for (std::size_t i = 0; i < c.potential.components.size(); ++i) {
        const auto& v = c.potential.components[i];
        w.section("potential.component." + std::to_string(i));
        w.put("profile", detail::enum_name(v.profile, detail::kPotentialProfiles));
        w.put_complex("amplitude", v.amplitude);
        detail::write_path(w, v.center, "center");
        w.put("width", v.width);
        w.put("exponent", v.exponent);
        w.put("class", detail::enum_name(v.claimed_class, detail::kPotentialClasses));
    }
    for (std::size_t i = 0; i < c.potential.atoms.size(); ++i) {
        w.section("potential.atom." + std::to_string(i));
        w.put_vec("position", c.potential.atoms[i].position);
        w.put_complex("weight", c.potential.atoms[i].weight);
    }

    if (c.v_plus) {
        w.section("v_plus");
        detail::write_term(w, *c.v_plus);
    }

    const auto& d = c.diagnostics;
    w.section("diagnostics");
    w.put("phi", d.phi);
    w.put("phi_width", d.phi_width);
    w.put_vec("phi_center", d.phi_center);
    w.put("level", d.level);
    w.put("t_min", d.t_min);
    w.put("t_max", d.t_max);
    w.put_int("t_count", d.t_count);
    w.put("tau_min", d.tau_min);
    w.put("tau_max", d.tau_max);
    w.put("epsilon", d.epsilon);
    w.put("window", d.window);
    w.put("window_starts", d.window_starts);
    w.put_int("window_samples", d.window_samples);
    w.put("cauchy_t_min", d.cauchy_t_min);
    w.put("cauchy_tolerance", d.cauchy_tolerance);
    w.put("main_tolerance", d.main_tolerance);
    w.put_int("n_max", d.n_max);
    w.put("hypothesis_t_min", d.hypothesis_t_min);
    return w.str();
}

}  // namespace nlsdiag
