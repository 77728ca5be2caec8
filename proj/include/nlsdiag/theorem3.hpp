#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlsdiag/errors.hpp"
#include "nlsdiag/fields.hpp"
#include "nlsdiag/grid.hpp"
#include "nlsdiag/norms.hpp"
#include "nlsdiag/spectral.hpp"

namespace nlsdiag {

// ---------------------------------------------------------------------------
// Atomic measures

struct MeasureAtom {
    Vec position{0.0, 0.0};
    double mass = 0.0;
};

/**
 * nu = sum m_k delta(x - x_k). In the velocity frame the atoms sit at the
 * limit velocities v_k; in the frequency frame (the variable of phi^) at v_k/2.
 */
struct AtomicMeasure {
    enum class Frame { velocity, frequency };
    std::vector<MeasureAtom> atoms;
    Frame frame = Frame::velocity;

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mass;
        return m;
    }

    void validate() const {
        for (const auto& a : atoms)
            if (!(a.mass >= 0.0) || !std::isfinite(a.mass) || !std::isfinite(a.position[0]) ||
                !std::isfinite(a.position[1]))
                throw ConstructionError("atomic measure: masses must be >= 0 and positions finite");
    }

    AtomicMeasure in_frame(Frame f) const {
        if (f == frame) return *this;
        AtomicMeasure out = *this;
        const double s = f == Frame::frequency ? 0.5 : 2.0;
        for (auto& a : out.atoms) a.position = {s * a.position[0], s * a.position[1]};
        out.frame = f;
        return out;
    }

    /// Adds mass at x, merging with an atom already there.
    void add(const Vec& x, double m) {
        for (auto& a : atoms) {
            const double tol = 1e-12 * std::max({1.0, std::abs(x[0]), std::abs(x[1])});
            if (std::abs(a.position[0] - x[0]) <= tol && std::abs(a.position[1] - x[1]) <= tol) {
                a.mass += m;
                return;
            }
        }
        atoms.push_back({x, m});
    }
};

namespace detail {

// |V_k|_2^2 of a potential component; only square-integrable profiles.
inline double component_l2_squared(const PotentialComponent& c, int dim) {
    const double a2 = std::norm(c.amplitude);
    switch (c.profile) {
        case PotentialProfile::gaussian_well: return a2 * std::pow(std::numbers::pi, 0.5 * dim) * std::pow(c.width, dim);
        case PotentialProfile::ball: return a2 * (dim == 1 ? 2.0 * c.width : std::numbers::pi * c.width * c.width);
        case PotentialProfile::inverse_power: break;
    }
    throw ScopeError("inverse_power potentials are not handled by the atomic-measure construction");
}

}  // namespace detail

/**
 * nu from the localized paths: one atom per component at its limit velocity
 * with mass limsup |l_k(t)|_2^2, estimated as the max over t_probe. Smooth
 * potential components contribute |V_k|_2^2 (times the modulation) likewise.
 */
inline AtomicMeasure nu_from_paths(const LocalizedPathSpec& lspec, const PotentialSpec* pot,
                                   const std::vector<double>& t_probe, int dim) {
    if (t_probe.empty()) throw DomainError("nu_from_paths: t_probe is empty");
    AtomicMeasure nu;
    for (std::size_t k = 0; k < lspec.components.size(); ++k) {
        const auto& c = lspec.components[k];
        const auto v = c.path.limit_velocity();
        if (!v) throw ConstructionError("localized component " + std::to_string(k) + " has no limit velocity");
        // The amplitude rescaling in LocalizedComponent keeps the mass constant in t.
        nu.add(*v, c.mass(dim));
    }
    if (pot) {
        if (!pot->atoms.empty()) throw ScopeError("nu_from_paths: point potentials are not square integrable");
        double mod2 = 0.0;
        for (double t : t_probe) mod2 = std::max(mod2, std::pow(pot->modulation.factor(t), 2));
        for (std::size_t k = 0; k < pot->components.size(); ++k) {
            const auto& c = pot->components[k];
            const auto v = c.center.limit_velocity();
            if (!v) throw ConstructionError("potential component " + std::to_string(k) + " has no limit velocity");
            nu.add(*v, mod2 * detail::component_l2_squared(c, dim));
        }
    }
    return nu;
}

// ---------------------------------------------------------------------------
// Cutoffs

namespace detail {

inline double smooth_edge(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace detail

/// Smooth monotone step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = detail::smooth_edge(s), b = detail::smooth_edge(1.0 - s);
    return a / (a + b);
}

/// chi: 1 on |x| <= 1, 0 on |x| >= 2. Argument is |x|.
inline double standard_bump(double r) { return smooth_step(2.0 - r); }

/// lambda: 0 for s <= 1/2, 1 for s >= 1.
inline double standard_step(double s) { return smooth_step(2.0 * s - 1.0); }

struct Ball {
    Vec center{0.0, 0.0};
    double radius = 0.0;
};

/// psi = lambda(sum_k chi((x - c_k)/r_k)).
struct Cutoff {
    int dim = 1;
    double epsilon = 0.0;
    double radius = 0.0;
    std::vector<Ball> balls;
    GridField psi;
    double achieved_l1 = 0.0;  // quadrature of the analytic psi
    double grid_l1 = 0.0;      // h^d sum of the sampled psi
    double uncovered_mass = 0.0;  // nu(W^c), W the union of the balls

    double value(const Vec& x) const {
        double s = 0.0;
        for (const auto& b : balls) {
            const Vec d{x[0] - b.center[0], x[1] - b.center[1]};
            s += standard_bump(std::sqrt(norm2(d, dim)) / b.radius);
            if (s >= 1.0) return 1.0;
        }
        return standard_step(s);
    }

    bool covers(const Vec& x) const {
        for (const auto& b : balls) {
            const Vec d{x[0] - b.center[0], x[1] - b.center[1]};
            if (norm2(d, dim) <= b.radius * b.radius) return true;
        }
        return false;
    }
};

namespace detail {

struct Window {
    Vec center{0.0, 0.0};
    double half_width = 0.0;
};

/**
 * int f over the union of square windows by the midpoint rule on each, every
 * node weighted by 1/(number of windows containing it) so overlaps count once.
 */
template <class F>
auto union_quadrature(const std::vector<Window>& windows, int dim, std::size_t nodes, F&& f) {
    using R = decltype(f(Vec{}));
    R acc{};
    const std::size_t ny = dim == 2 ? nodes : 1;
    for (const auto& w : windows) {
        if (!(w.half_width > 0.0)) continue;
        const double h = 2.0 * w.half_width / static_cast<double>(nodes);
        const double cell = dim == 2 ? h * h : h;
        for (std::size_t i = 0; i < nodes; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                Vec x{w.center[0] - w.half_width + (static_cast<double>(i) + 0.5) * h, 0.0};
                if (dim == 2) x[1] = w.center[1] - w.half_width + (static_cast<double>(j) + 0.5) * h;
                int count = 0;
                for (const auto& o : windows) {
                    bool in = std::abs(x[0] - o.center[0]) < o.half_width;
                    if (dim == 2) in = in && std::abs(x[1] - o.center[1]) < o.half_width;
                    count += in ? 1 : 0;
                }
                acc += f(x) * (cell / std::max(count, 1));
            }
    }
    return acc;
}

inline std::size_t quadrature_nodes(int dim) { return dim == 1 ? 4096 : 384; }

/// Catmull-Rom (cubic) interpolation of a grid field at x; zero outside the grid.
inline complex interpolate(const GridField& f, const Vec& x) {
    const auto& g = f.grid();
    const long n = static_cast<long>(g.points_per_axis());
    long base[2] = {0, 0};
    double w[2][4] = {{0, 1, 0, 0}, {0, 1, 0, 0}};
    for (int a = 0; a < g.dim(); ++a) {
        const double idx = x[a] / g.spacing(a) + static_cast<double>(n / 2);
        if (!(idx >= 0.0) || idx > static_cast<double>(n - 1)) return 0.0;
        base[a] = std::min(static_cast<long>(idx), n - 2);
        const double t = idx - static_cast<double>(base[a]), t2 = t * t, t3 = t2 * t;
        w[a][0] = 0.5 * (-t3 + 2 * t2 - t);
        w[a][1] = 0.5 * (3 * t3 - 5 * t2 + 2);
        w[a][2] = 0.5 * (-3 * t3 + 4 * t2 + t);
        w[a][3] = 0.5 * (t3 - t2);
    }
    auto at = [&](long i, long j) -> complex {
        if (i < 0 || i >= n || j < 0 || j >= n) return 0.0;
        return f[static_cast<std::size_t>(g.dim() == 1 ? i : i * n + j)];
    };
    complex s{0.0, 0.0};
    for (int p = 0; p < 4; ++p) {
        if (g.dim() == 1) {
            s += w[0][p] * at(base[0] + p - 1, 0);
            continue;
        }
        for (int q = 0; q < 4; ++q) s += w[0][p] * w[1][q] * at(base[0] + p - 1, base[1] + q - 1);
    }
    return s;
}

inline double unit_ball_volume(int dim) { return dim == 1 ? 2.0 : std::numbers::pi; }

}  // namespace detail

/**
 * Balls B(x_k, r) around every atom with N omega_d r^d = epsilon, so the
 * support of psi (inside the doubled balls) has measure at most 2^d epsilon.
 */
inline Cutoff build_cutoff(const AtomicMeasure& nu, double epsilon, const SpatialGrid& grid) {
    if (!(epsilon > 0.0)) throw DomainError("build_cutoff: epsilon must be positive");
    nu.validate();
    const int d = grid.dim();
    Cutoff c{.dim = d, .epsilon = epsilon, .psi = GridField::zeros(grid, Space::frequency)};
    if (nu.atoms.empty()) return c;
    const double count = static_cast<double>(nu.atoms.size());
    c.radius = std::pow(epsilon / (count * detail::unit_ball_volume(d)), 1.0 / d);
    for (const auto& a : nu.atoms) {
        if (!grid.contains(a.position, 4.0 * c.radius))
            throw ConstructionError("build_cutoff: atom closer than 4 radii to the box edge");
        c.balls.push_back({a.position, c.radius});
    }
    for (std::size_t j = 0; j < grid.size(); ++j) c.psi[j] = c.value(grid.point(j));
    double s = 0.0;
    for (const auto& z : c.psi.values()) s += z.real();
    c.grid_l1 = s * grid.cell_measure();
    std::vector<detail::Window> windows;
    for (const auto& b : c.balls) windows.push_back({b.center, 2.0 * b.radius});
    c.achieved_l1 = detail::union_quadrature(windows, d, detail::quadrature_nodes(d),
                                             [&](const Vec& x) { return c.value(x); });
    for (const auto& a : nu.atoms)
        if (!c.covers(a.position)) c.uncovered_mass += a.mass;
    return c;
}

// ---------------------------------------------------------------------------
// Test-function sequence

struct SequenceOptions {
    double mollify_cells = 3.0;  // Gaussian mollifier width, in dual-grid cells
};

struct SequenceStep {
    int n = 0;
    double epsilon = 0.0;
    double delta = 0.0;             // modulus floor of g_n
    complex main_pairing{0.0, 0.0}; // <|v+^| v+^, phi_n^>
    double nu_pairing = 0.0;        // <nu, |phi_n^|>
    double psi_l1 = 0.0;            // achieved |psi_n|_1
    double psi_l1_bound = 0.0;      // 4^d eps_n
    double uncovered_mass = 0.0;    // nu(W_n^c)
    double phi_hat_sup = 0.0;
    double g_sup = 0.0;             // |g_n|_inf after mollification
    GridField phi;                  // physical phi_n
};

struct TestSequence {
    double target = 0.0;            // |v+^|_2^2
    complex baseline_main{0.0, 0.0};  // n_max without the cutoff
    double baseline_nu = 0.0;
    std::vector<SequenceStep> steps;

    /// First n with main >= main_fraction * target and nu <= nu_fraction * target.
    std::optional<int> first_success(double main_fraction = 0.9, double nu_fraction = 0.01) const {
        for (const auto& s : steps)
            if (s.main_pairing.real() >= main_fraction * target && s.nu_pairing <= nu_fraction * target) return s.n;
        return std::nullopt;
    }
};

/**
 * phi_n^ = (1 - psi_n) g_n with g_n the mollified v+^ / max(|v+^|, delta_n),
 * delta_n = max|v+^| / n, and psi_n the cutoff at eps_n = 2^{-n} around the
 * atoms of nu taken in the frequency frame. Power nonlinearity with p = 1 only.
 * <nu, |phi_n^|> evaluates psi_n analytically at the atoms.
 */
inline TestSequence test_sequence(const GridField& v_plus, const AtomicMeasure& nu_any, int n_max,
                                  const NonlinearitySpec& nl, const SequenceOptions& opt = {}) {
    if (nl.kind != NonlinearitySpec::Kind::power || std::abs(nl.p - 1.0) > 1e-12)
        throw ScopeError("test_sequence is defined for the power nonlinearity with p = 1");
    if (n_max < 1) throw DomainError("test_sequence: n_max must be >= 1");
    const AtomicMeasure nu = nu_any.in_frame(AtomicMeasure::Frame::frequency);
    nu.validate();
    const GridField vh = forward_transform(v_plus.with_time(std::nullopt));
    const double vmax = sup_norm(vh);
    if (vmax == 0.0) throw DomainError("test_sequence: v+ is zero");
    const SpatialGrid& fg = vh.grid();
    const int d = fg.dim();
    GridField weight = vh;  // |v+^| v+^
    for (std::size_t k = 0; k < vh.size(); ++k) weight[k] = std::abs(vh[k]) * vh[k];

    TestSequence out;
    out.target = mass(vh);
    const double w = opt.mollify_cells * fg.spacing();
    auto mollified_g = [&](double delta) {
        GridField g = vh;
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = vh[k] / std::max(std::abs(vh[k]), delta);
        GridField x = inverse_transform(g);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] *= std::exp(-0.5 * w * w * x.grid().radius_squared(j));
        return forward_transform(x);
    };
    auto nu_pair = [&](const GridField& phi_hat, const Cutoff* cut) {
        double s = 0.0;
        for (const auto& a : nu.atoms) {
            const double keep = cut ? 1.0 - cut->value(a.position) : 1.0;
            s += a.mass * keep * std::abs(detail::interpolate(phi_hat, a.position));
        }
        return s;
    };

    const GridField g_last = mollified_g(vmax / n_max);
    out.baseline_main = inner(weight, g_last);
    out.baseline_nu = nu_pair(g_last, nullptr);

    for (int n = 1; n <= n_max; ++n) {
        const double eps = std::ldexp(1.0, -n);
        const GridField g = mollified_g(vmax / n);
        const Cutoff cut = build_cutoff(nu, eps, fg);
        GridField phi_hat = g;
        for (std::size_t k = 0; k < phi_hat.size(); ++k) phi_hat[k] *= 1.0 - cut.psi[k].real();
        const GridField phi = inverse_transform(phi_hat);
        out.steps.push_back({
            .n = n,
            .epsilon = eps,
            .delta = vmax / n,
            .main_pairing = inner(weight, phi_hat),
            // The interpolated g is multiplied by 1 - psi at the atom itself.
            .nu_pairing = nu_pair(g, &cut),
            .psi_l1 = cut.achieved_l1,
            .psi_l1_bound = std::pow(4.0, d) * eps,
            .uncovered_mass = cut.uncovered_mass,
            .phi_hat_sup = sup_norm(phi_hat),
            .g_sup = sup_norm(g),
            .phi = GridField(v_plus.grid(), std::vector<complex>(phi.values().begin(), phi.values().end())),
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hypothesis and l-term checks

namespace detail {

// Half-width beyond which a profile's squared modulus is negligible (< 1e-30 relative).
inline double localized_reach(const LocalizedComponent& c, double t) {
    const double w = c.width_at(t);
    switch (c.profile) {
        case LocalizedProfile::gaussian: return 12.0 * w;
        case LocalizedProfile::sech: return 36.0 * w;
        case LocalizedProfile::bound_state: return 36.0 * w;
    }
    return 12.0 * w;
}

inline double potential_reach(const PotentialComponent& c) {
    switch (c.profile) {
        case PotentialProfile::gaussian_well: return 12.0 * c.width;
        case PotentialProfile::ball: return c.width;
        case PotentialProfile::inverse_power: break;
    }
    throw ScopeError("inverse_power potentials are not handled by the atomic-measure construction");
}

inline void require_nonnegative_bump(const GridField& phi) {
    const double sup = sup_norm(phi);
    if (sup == 0.0) return;
    const auto& g = phi.grid();
    const std::size_t n = g.points_per_axis();
    double edge = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (std::abs(phi[j].imag()) > 1e-12 * sup || phi[j].real() < -1e-12 * sup)
            throw DomainError("hypothesis_check: phi must be real and nonnegative");
        const auto [i, k] = g.unflatten(j);
        const bool on_edge = i == 0 || i == n - 1 || (g.dim() == 2 && (k == 0 || k == n - 1));
        if (on_edge) edge = std::max(edge, std::abs(phi[j]));
    }
    if (edge >= sup) throw DomainError("hypothesis_check: sup of phi must be attained in the interior");
}

}  // namespace detail

struct HypothesisPoint {
    double t = 0.0;
    double integral = 0.0;  // <t^d [|l(t,tx)|^2 + |V(t,tx)|^2], phi>
    double slack = 0.0;     // <nu, phi> - max over s >= t of integral(s)
};

struct HypothesisCheck {
    double nu_pairing = 0.0;
    std::vector<HypothesisPoint> points;

    /// Slack >= -tol * max(<nu,phi>, tiny) for every t >= t_from.
    bool satisfied(double t_from, double rel_tol = 0.02) const {
        const double scale = std::max(nu_pairing, std::numeric_limits<double>::min());
        for (const auto& p : points)
            if (p.t >= t_from && p.slack < -rel_tol * scale) return false;
        return true;
    }
};

/**
 * Evaluates <t^d [|l(t,tx)|^2 + |V(t,tx)|^2], phi(x)> by substituting y = tx,
 * i.e. int [|l(t,y)|^2 + |V(t,y)|^2] phi(y/t) dy, on windows around each
 * profile; phi is interpolated. nu is taken in the velocity frame.
 */
inline HypothesisCheck hypothesis_check(const LocalizedPathSpec& lspec, const PotentialSpec* pot,
                                        const AtomicMeasure& nu_any, const GridField& phi,
                                        std::vector<double> t_list) {
    detail::require_nonnegative_bump(phi);
    const AtomicMeasure nu = nu_any.in_frame(AtomicMeasure::Frame::velocity);
    nu.validate();
    if (pot && !pot->atoms.empty()) throw ScopeError("hypothesis_check: point potentials are not square integrable");
    std::sort(t_list.begin(), t_list.end());
    const int d = phi.grid().dim();
    HypothesisCheck out;
    for (const auto& a : nu.atoms) out.nu_pairing += a.mass * detail::interpolate(phi, a.position).real();
    for (double t : t_list) {
        if (!(t > 0.0)) throw DomainError("hypothesis_check: times must be positive");
        std::vector<detail::Window> lw, vw;
        for (const auto& c : lspec.components) lw.push_back({c.path.at(t), detail::localized_reach(c, t)});
        if (pot)
            for (const auto& c : pot->components) vw.push_back({c.center.at(t), detail::potential_reach(c)});
        auto phi_at = [&](const Vec& y) { return detail::interpolate(phi, {y[0] / t, y[1] / t}).real(); };
        double total = detail::union_quadrature(lw, d, detail::quadrature_nodes(d), [&](const Vec& y) {
            return std::norm(lspec.value(t, y, d)) * phi_at(y);
        });
        if (pot)
            total += detail::union_quadrature(vw, d, detail::quadrature_nodes(d), [&](const Vec& y) {
                return std::norm(pot->smooth_value(t, y, d)) * phi_at(y);
            });
        out.points.push_back({t, total, 0.0});
    }
    double tail = -std::numeric_limits<double>::infinity();
    for (auto it = out.points.rbegin(); it != out.points.rend(); ++it) {
        tail = std::max(tail, it->integral);
        it->slack = out.nu_pairing - tail;
    }
    return out;
}

struct LTermPoint {
    double t = 0.0;
    double cubic = 0.0;      // |<|l~| l~, phi^>|
    double quadratic = 0.0;  // <|l~|^2, |phi^|>
    double atomic = 0.0;     // <nu, |phi^|>
    double proxy = 0.0;      // concentration error: sum_k m_k osc of |phi^| where l~_k lives
    bool ordered = true;     // cubic <= quadratic
    bool concentrated = true;  // quadratic <= atomic + proxy
};

/**
 * The chain |<|l~|l~, phi^>| <= <|l~|^2, |phi^|> <= <nu, |phi^|> + o(1) at
 * each t. phi_hat lives on a frequency grid. Both integrals substitute
 * xi = x/2t and run over windows around the components in x, where the
 * (2t)^d Jacobian cancels the tilde normalization.
 */
inline std::vector<LTermPoint> l_term_bound_check(const LocalizedPathSpec& lspec, const AtomicMeasure& nu_any,
                                                  const GridField& phi_hat, const std::vector<double>& t_list,
                                                  const NonlinearitySpec& nl) {
    if (nl.kind != NonlinearitySpec::Kind::power || std::abs(nl.p - 1.0) > 1e-12)
        throw ScopeError("l_term_bound_check is defined for the power nonlinearity with p = 1");
    const AtomicMeasure nu = nu_any.in_frame(AtomicMeasure::Frame::frequency);
    nu.validate();
    const int d = phi_hat.grid().dim();
    const complex id2 = std::pow(complex(0.0, 1.0), 0.5 * d);
    std::vector<LTermPoint> out;
    for (double t : t_list) {
        if (!(t > 0.0)) throw DomainError("l_term_bound_check: times must be positive");
        LTermPoint pt;
        pt.t = t;
        std::vector<detail::Window> windows;
        for (const auto& c : lspec.components) windows.push_back({c.path.at(t), detail::localized_reach(c, t)});
        const auto at = [&](const Vec& x) { return detail::interpolate(phi_hat, {x[0] / (2 * t), x[1] / (2 * t)}); };
        struct Pair {
            complex cubic;
            double quad;
            Pair& operator+=(const Pair& o) {
                cubic += o.cubic;
                quad += o.quad;
                return *this;
            }
            Pair operator*(double s) const { return {cubic * s, quad * s}; }
        };
        const Pair sums = detail::union_quadrature(windows, d, detail::quadrature_nodes(d), [&](const Vec& x) {
            const complex l = lspec.value(t, x, d);
            const complex ph = at(x);
            const double r2 = norm2(x, d);
            return Pair{std::abs(l) * id2 * std::polar(1.0, -r2 / (4.0 * t)) * l * std::conj(ph),
                        std::norm(l) * std::abs(ph)};
        });
        pt.cubic = std::abs(sums.cubic);
        pt.quadratic = sums.quad;
        for (const auto& a : nu.atoms) pt.atomic += a.mass * std::abs(detail::interpolate(phi_hat, a.position));
        for (std::size_t k = 0; k < lspec.components.size(); ++k) {
            const auto& c = lspec.components[k];
            const Vec center = c.path.at(t);
            const Vec xi0{center[0] / (2 * t), center[1] / (2 * t)};
            const double reach = detail::localized_reach(c, t) / (2 * t);
            const auto lim = c.path.limit_velocity();
            const Vec atom = lim ? Vec{0.5 * (*lim)[0], 0.5 * (*lim)[1]} : xi0;
            const double ref = std::abs(detail::interpolate(phi_hat, atom));
            double osc = 0.0;
            const int samples = 64;
            for (int i = 0; i <= samples; ++i)
                for (int j = 0; j <= (d == 2 ? samples : 0); ++j) {
                    Vec xi{xi0[0] + reach * (2.0 * i / samples - 1.0), 0.0};
                    if (d == 2) xi[1] = xi0[1] + reach * (2.0 * j / samples - 1.0);
                    osc = std::max(osc, std::abs(std::abs(detail::interpolate(phi_hat, xi)) - ref));
                }
            pt.proxy += c.mass(d) * osc;
        }
        pt.ordered = pt.cubic <= pt.quadratic * (1.0 + 1e-12);
        pt.concentrated = pt.quadratic <= pt.atomic + pt.proxy + 1e-12 * std::max(1.0, pt.atomic);
        out.push_back(pt);
    }
    return out;
}

}  // namespace nlsdiag
