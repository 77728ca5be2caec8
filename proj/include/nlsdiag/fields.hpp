#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlsdiag/grid.hpp"
#include "nlsdiag/norms.hpp"
#include "nlsdiag/spectral.hpp"

namespace nlsdiag {

// ---------------------------------------------------------------------------
// Nonlinearity

/// F(u) = mu |u|^p u (power) or mu (|x|^{-dp/2} * |u|^2) u (Hartree).
struct NonlinearitySpec {
    enum class Kind { power, hartree };

    Kind kind = Kind::power;
    double p = 0.5;
    complex mu{1.0, 0.0};

    void validate() const {
        if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("nonlinearity: p must be > 0");
        if (mu == complex(0.0, 0.0)) throw ConfigError("nonlinearity: mu must be nonzero");
    }

    /// Additional guard for time stepping: mass-subcritical p < 4/d, and a
    /// locally integrable Hartree kernel.
    void validate_for_solver(int dim) const {
        validate();
        if (!(p < 4.0 / dim)) throw ConfigError("nonlinearity: solver runs require p < 4/d");
        if (kind == Kind::hartree && !(kernel_exponent(dim) < dim))
            throw ConfigError("nonlinearity: Hartree kernel exponent dp/2 must be < d");
    }

    double kernel_exponent(int dim) const { return 0.5 * dim * p; }
    bool long_range(int dim) const { return p <= 2.0 / dim; }
    bool theorem2_range(int dim) const { return p < 1.0 && p <= 2.0 / dim; }
    bool theorem3_range(int dim) const { return kind == Kind::power && p == 1.0 && 1.0 <= 2.0 / dim; }
};

inline std::string to_string(NonlinearitySpec::Kind k) {
    return k == NonlinearitySpec::Kind::power ? "power" : "hartree";
}

// ---------------------------------------------------------------------------
// Paths

/**
 * Center path c(t) = sum_k a_k t^k, optionally plus an oscillating term
 * A t sin(w log(1+t)) whose c(t)/t has no limit.
 */
struct Path {
    std::vector<Vec> coefficients;
    Vec oscillation_amplitude{0.0, 0.0};
    double oscillation_rate = 0.0;

    static Path fixed(Vec c) { return Path{{c}}; }
    static Path linear(Vec c0, Vec v) { return Path{{c0, v}}; }

    Vec at(double t) const {
        Vec c{0.0, 0.0};
        double tk = 1.0;
        for (const auto& a : coefficients) {
            c[0] += a[0] * tk;
            c[1] += a[1] * tk;
            tk *= t;
        }
        if (oscillating()) {
            const double s = t * std::sin(oscillation_rate * std::log1p(t));
            c[0] += oscillation_amplitude[0] * s;
            c[1] += oscillation_amplitude[1] * s;
        }
        return c;
    }

    Vec velocity(double t) const {
        Vec v{0.0, 0.0};
        double tk = 1.0;
        for (std::size_t k = 1; k < coefficients.size(); ++k) {
            v[0] += static_cast<double>(k) * coefficients[k][0] * tk;
            v[1] += static_cast<double>(k) * coefficients[k][1] * tk;
            tk *= t;
        }
        if (oscillating()) {
            const double arg = oscillation_rate * std::log1p(t);
            const double ds = std::sin(arg) + t * std::cos(arg) * oscillation_rate / (1.0 + t);
            v[0] += oscillation_amplitude[0] * ds;
            v[1] += oscillation_amplitude[1] * ds;
        }
        return v;
    }

    bool oscillating() const {
        return oscillation_rate != 0.0 &&
               (oscillation_amplitude[0] != 0.0 || oscillation_amplitude[1] != 0.0);
    }

    /// lim c(t)/t, when it exists.
    std::optional<Vec> limit_velocity() const {
        if (oscillating()) return std::nullopt;
        for (std::size_t k = 2; k < coefficients.size(); ++k)
            if (coefficients[k][0] != 0.0 || coefficients[k][1] != 0.0) return std::nullopt;
        if (coefficients.size() < 2) return Vec{0.0, 0.0};
        return coefficients[1];
    }

    bool time_dependent() const {
        if (oscillating()) return true;
        for (std::size_t k = 1; k < coefficients.size(); ++k)
            if (coefficients[k][0] != 0.0 || coefficients[k][1] != 0.0) return true;
        return false;
    }
};

namespace detail {

inline Vec displacement(const Vec& x, const Vec& c, int dim, const SpatialGrid* periodic) {
    if (periodic) return periodic->min_image(x, c);
    Vec d{x[0] - c[0], dim == 2 ? x[1] - c[1] : 0.0};
    return d;
}

inline double dot(const Vec& a, const Vec& b, int dim) {
    return a[0] * b[0] + (dim == 2 ? a[1] * b[1] : 0.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Potentials

enum class PotentialProfile { gaussian_well, inverse_power, ball };

/// Integrability class claimed for a potential component. V1 is L^{2/p-};
/// the V2 tags are L^{d/2}, L^{1+} and measures respectively.
enum class PotentialClass { v1, v2_ld2, v2_l1plus, v2_measure };

inline bool is_v2(PotentialClass c) { return c != PotentialClass::v1; }

struct PotentialComponent {
    PotentialProfile profile = PotentialProfile::gaussian_well;
    complex amplitude{1.0, 0.0};
    Path center = Path::fixed({0.0, 0.0});
    double width = 1.0;
    double exponent = 1.0;  // inverse_power only: amplitude (width/max(r,width))^exponent
    PotentialClass claimed_class = PotentialClass::v1;

    double shape(double r) const {
        switch (profile) {
            case PotentialProfile::gaussian_well: return std::exp(-r * r / (2.0 * width * width));
            case PotentialProfile::inverse_power: return std::pow(width / std::max(r, width), exponent);
            case PotentialProfile::ball: return r <= width ? 1.0 : 0.0;
        }
        return 0.0;
    }
};

/// A point mass weight * delta(x - position); one dimension only.
struct PotentialAtom {
    Vec position{0.0, 0.0};
    complex weight{1.0, 0.0};
};

struct TimeModulation {
    enum class Kind { none, cosine };
    Kind kind = Kind::none;
    double omega = 0.0;

    double factor(double t) const { return kind == Kind::cosine ? std::cos(omega * t) : 1.0; }
};

/// V = V1 + V2 with the split given explicitly by each component's class tag.
struct PotentialSpec {
    std::vector<PotentialComponent> components;
    std::vector<PotentialAtom> atoms;
    TimeModulation modulation;

    bool empty() const { return components.empty() && atoms.empty(); }

    bool has_v1() const {
        for (const auto& c : components)
            if (c.claimed_class == PotentialClass::v1) return true;
        return false;
    }

    bool time_dependent() const {
        if (modulation.kind != TimeModulation::Kind::none) return true;
        for (const auto& c : components)
            if (c.center.time_dependent()) return true;
        return false;
    }

    void validate(int dim) const {
        if (!atoms.empty() && dim != 1)
            throw ConfigError("potential: atoms are only supported in one dimension");
        for (const auto& c : components) {
            if (!(c.width > 0.0)) throw ConfigError("potential: component width must be positive");
            if (c.profile == PotentialProfile::inverse_power && !(c.exponent > 0.0))
                throw ConfigError("potential: inverse_power exponent must be positive");
        }
    }

    /// Smooth part evaluated pointwise (atoms excluded).
    complex smooth_value(double t, const Vec& x, int dim, const SpatialGrid* periodic = nullptr,
                         std::optional<bool> v2_only = std::nullopt) const {
        complex v{0.0, 0.0};
        for (const auto& c : components) {
            if (v2_only && *v2_only != is_v2(c.claimed_class)) continue;
            const Vec d = detail::displacement(x, c.center.at(t), dim, periodic);
            v += c.amplitude * c.shape(std::sqrt(norm2(d, dim)));
        }
        return v * modulation.factor(t);
    }
};

enum class PotentialPart { all, v1, v2 };

/// Unit-mass Gaussian mollifier of width w.
inline double mollifier(double r2, double w, int dim) {
    return std::exp(-r2 / (2.0 * w * w)) * std::pow(2.0 * std::numbers::pi * w * w, -0.5 * dim);
}

inline double default_mollify_width(const SpatialGrid& g) { return 3.0 * g.spacing(); }

/**
 * V(t) on the grid. Smooth components are sampled pointwise (periodically);
 * each atom contributes weight * G_w(x - x0) with G_w the unit-mass Gaussian
 * of width mollify_width.
 */
inline GridField sample_potential(const PotentialSpec& spec, double t, const SpatialGrid& grid,
                                  double mollify_width, PotentialPart part = PotentialPart::all) {
    spec.validate(grid.dim());
    if (!spec.atoms.empty() && !(mollify_width >= 2.0 * grid.spacing() * (1.0 - 1e-12)))
        throw DomainError("sample_potential: mollify_width must be >= 2 grid spacings");
    std::optional<bool> v2_only;
    if (part == PotentialPart::v1) v2_only = false;
    if (part == PotentialPart::v2) v2_only = true;
    const int dim = grid.dim();
    const double mod = spec.modulation.factor(t);
    return GridField::sample(
        grid,
        [&](const Vec& x) {
            complex v = spec.smooth_value(t, x, dim, &grid, v2_only);
            if (part != PotentialPart::v1)
                for (const auto& a : spec.atoms) {
                    const Vec d = grid.min_image(x, a.position);
                    v += mod * a.weight * mollifier(norm2(d, dim), mollify_width, dim);
                }
            return v;
        },
        Space::physical, t);
}

/// Total variation of the V2 part: sum |weights| plus the L^1 norm of smooth V2 components.
inline double v2_measure_norm(const PotentialSpec& spec, double t, const SpatialGrid& grid) {
    double total = 0.0;
    for (const auto& a : spec.atoms) total += std::abs(a.weight);
    total *= std::abs(spec.modulation.factor(t));
    bool any = false;
    for (const auto& c : spec.components) any = any || is_v2(c.claimed_class);
    if (any) {
        const double cell = grid.cell_measure();
        for (std::size_t j = 0; j < grid.size(); ++j)
            total += std::abs(spec.smooth_value(t, grid.point(j), grid.dim(), &grid, true)) * cell;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Localized components l(t) = sum_k l_k(t, x - c_k(t))

enum class LocalizedProfile { gaussian, sech, bound_state };

namespace detail {

/// Squared-modulus integral of the unit-amplitude, unit-width profile shape.
inline double profile_mass(LocalizedProfile p, int dim) {
    const double pi = std::numbers::pi;
    switch (p) {
        case LocalizedProfile::gaussian: return std::pow(pi, 0.5 * dim);
        case LocalizedProfile::sech: return dim == 1 ? 2.0 : 2.0 * pi * std::numbers::ln2;
        case LocalizedProfile::bound_state: return dim == 1 ? 1.0 : pi / 2.0;
    }
    return 0.0;
}

inline double profile_shape(LocalizedProfile p, double s) {
    switch (p) {
        case LocalizedProfile::gaussian: return std::exp(-0.5 * s * s);
        case LocalizedProfile::sech: return 1.0 / std::cosh(s);
        case LocalizedProfile::bound_state: return std::exp(-s);
    }
    return 0.0;
}

}  // namespace detail

/**
 * One traveling profile. bound_state is exp(-gamma|x|/2) with width = 2/gamma.
 * Sublinear spreading: width(t) = width (1+t)^beta with amplitude rescaled so
 * the L^2 mass is constant.
 */
struct LocalizedComponent {
    LocalizedProfile profile = LocalizedProfile::gaussian;
    complex amplitude{1.0, 0.0};
    double width = 1.0;
    double phase_rate = 0.0;
    Path path = Path::fixed({0.0, 0.0});
    double spread_beta = 0.0;
    bool boost = true;  // Galilean phase exp(i c'(t).(x - c(t))/2)

    double width_at(double t) const { return width * std::pow(1.0 + t, spread_beta); }

    complex value(double t, const Vec& x, int dim, const SpatialGrid* periodic = nullptr) const {
        const double w = width_at(t);
        const double amp_scale = std::pow(1.0 + t, -0.5 * dim * spread_beta);
        const Vec d = detail::displacement(x, path.at(t), dim, periodic);
        const double s = std::sqrt(norm2(d, dim)) / w;
        double phase = phase_rate * t;
        if (boost) phase += 0.5 * detail::dot(path.velocity(t), d, dim);
        return amplitude * amp_scale * detail::profile_shape(profile, s) * std::polar(1.0, phase);
    }

    /// Exact L^2 mass on R^d (time independent).
    double mass(int dim) const {
        return std::norm(amplitude) * std::pow(width, dim) * detail::profile_mass(profile, dim);
    }
};

struct LocalizedPathSpec {
    std::vector<LocalizedComponent> components;
    double q_exponent = 1.5;  // l bounded in L^2 cap L^q, 1 < q < 2

    void validate(int dim) const {
        if (!(q_exponent > 1.0 && q_exponent < 2.0))
            throw ConfigError("localized: q_exponent must lie in (1, 2)");
        for (const auto& c : components) {
            if (!(c.width > 0.0)) throw ConfigError("localized: width must be positive");
            if (!(c.spread_beta >= 0.0 && c.spread_beta < 1.0))
                throw ConfigError("localized: spread_beta must lie in [0, 1)");
        }
        (void)dim;
    }

    complex value(double t, const Vec& x, int dim, const SpatialGrid* periodic = nullptr) const {
        complex v{0.0, 0.0};
        for (const auto& c : components) v += c.value(t, x, dim, periodic);
        return v;
    }
};

struct LocalizedSample {
    GridField field;
    double l2 = 0.0;
    double lq = 0.0;
    bool valid = true;  // false once a component approaches the box edge
};

/// Margin, in widths, a component must keep from the box edge.
inline constexpr double kSupportMargin = 8.0;

inline LocalizedSample sample_localized(const LocalizedPathSpec& spec, double t,
                                        const SpatialGrid& grid) {
    spec.validate(grid.dim());
    const int dim = grid.dim();
    GridField f = GridField::sample(
        grid, [&](const Vec& x) { return spec.value(t, x, dim, &grid); }, Space::physical, t);
    bool valid = true;
    for (const auto& c : spec.components) {
        double margin = kSupportMargin * c.width_at(t);
        if (c.profile == LocalizedProfile::bound_state) margin *= 2.5;
        if (!grid.contains(c.path.at(t), margin)) valid = false;
    }
    const double l2 = l2_norm(f);
    const double lq = lp_norm(f, spec.q_exponent);
    return {std::move(f), l2, lq, valid};
}

/// Synthetic decomposition u(t) = l(t) + e^{itD} v+ with vanishing remainder.
inline GridField synth_state(const LocalizedPathSpec& lspec, const GridField& v_plus, double t,
                             const SpatialGrid& grid) {
    if (!(t >= 0.0)) throw DomainError("synth_state requires t >= 0");
    if (!(v_plus.grid() == grid)) throw GridMismatchError("synth_state: v+ lives on another grid");
    GridField u = free_propagate(v_plus.with_time(std::nullopt), t);
    if (!lspec.components.empty()) u += sample_localized(lspec, t, grid).field.with_time(std::nullopt);
    return u.with_time(t);
}

// ---------------------------------------------------------------------------
// Initial data

enum class InitialProfile { gaussian, sech, modulated_gaussian };

struct InitialTerm {
    InitialProfile profile = InitialProfile::gaussian;
    complex amplitude{1.0, 0.0};
    Vec center{0.0, 0.0};
    Vec velocity{0.0, 0.0};  // Galilean phase exp(i v.(x - center)/2)
    double phase = 0.0;
    double width = 1.0;
    Vec wavenumber{0.0, 0.0};  // modulated_gaussian only: extra exp(i k.x)

    complex value(const Vec& x, int dim, const SpatialGrid* periodic) const {
        const Vec d = detail::displacement(x, center, dim, periodic);
        const double s = std::sqrt(norm2(d, dim)) / width;
        const double shape = profile == InitialProfile::sech ? 1.0 / std::cosh(s) : std::exp(-0.5 * s * s);
        double ph = phase + 0.5 * detail::dot(velocity, d, dim);
        if (profile == InitialProfile::modulated_gaussian) ph += detail::dot(wavenumber, x, dim);
        return amplitude * shape * std::polar(1.0, ph);
    }

    double analytic_mass(int dim) const {
        const auto shape = profile == InitialProfile::sech ? LocalizedProfile::sech : LocalizedProfile::gaussian;
        return std::norm(amplitude) * std::pow(width, dim) * detail::profile_mass(shape, dim);
    }
};

/// Seeded band-limited random radiation with prescribed L^2 norm.
struct Radiation {
    double amplitude = 0.0;
    double band = 1.0;
    std::uint64_t seed = 0;
};

struct InitialDataSpec {
    std::vector<InitialTerm> terms;
    std::optional<Radiation> radiation;
};

namespace detail {

// Standard normal pair from raw 64-bit draws; independent of the standard
// library's distribution implementations so seeds reproduce across toolchains.
inline std::array<double, 2> normal_pair(std::mt19937_64& rng) {
    auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

}  // namespace detail

inline GridField make_radiation(const Radiation& rad, const SpatialGrid& grid) {
    const SpatialGrid freq = grid.dual();
    std::mt19937_64 rng(rad.seed);
    std::vector<complex> coeffs(grid.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const auto z = detail::normal_pair(rng);
        if (norm2(freq.point(k), grid.dim()) <= rad.band * rad.band) coeffs[k] = {z[0], z[1]};
    }
    GridField f = inverse_transform(GridField(freq, std::move(coeffs), Space::frequency));
    const double n = l2_norm(f);
    if (n > 0.0) f *= rad.amplitude / n;
    return GridField(grid, std::vector<complex>(f.values().begin(), f.values().end()));
}

inline GridField make_field(const InitialDataSpec& spec, const SpatialGrid& grid) {
    const int dim = grid.dim();
    GridField u = GridField::zeros(grid);
    for (const auto& term : spec.terms) {
        if (term.profile == InitialProfile::sech && dim != 1)
            throw ConfigError("initial data: sech profile is one-dimensional");
        if (!(term.width > 0.0)) throw ConfigError("initial data: width must be positive");
        for (int a = 0; a < dim; ++a)
            if (term.width > grid.box_length(a) / 4.0)
                throw ConfigError("initial data: profile wider than box/4");
        GridField f = GridField::sample(grid, [&](const Vec& x) { return term.value(x, dim, &grid); });
        if (mass(f) < (1.0 - 1e-8) * term.analytic_mass(dim))
            throw ConfigError("initial data: profile mass not captured by the grid");
        u += f;
    }
    if (spec.radiation && spec.radiation->amplitude != 0.0) {
        if (!(spec.radiation->band > 0.0)) throw ConfigError("initial data: radiation band must be positive");
        u += make_radiation(*spec.radiation, grid);
    }
    return u.with_time(0.0);
}

}  // namespace nlsdiag
