#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlsdiag/fields.hpp"
#include "nlsdiag/fitting.hpp"
#include "nlsdiag/grid.hpp"
#include "nlsdiag/norms.hpp"
#include "nlsdiag/parallel.hpp"
#include "nlsdiag/solver.hpp"
#include "nlsdiag/spectral.hpp"

namespace nlsdiag {

/// P(t) = <u, e^{it Delta} phi>.
inline complex pairing(const GridField& u, const GridField& phi, double t) {
    if (!(u.grid() == phi.grid())) throw GridMismatchError("pairing: u and phi live on different grids");
    return inner(u.with_time(std::nullopt), free_propagate(phi.with_time(std::nullopt), t));
}

/// Tilde-frame main term <F(u~), w~>, evaluated as (2t)^{dp/2} <F(u), e^{it Delta} phi>.
inline complex main_term(const GridField& u, const GridField& phi, double t, const NonlinearitySpec& nl,
                         const HartreeKernel* kernel = nullptr) {
    if (!(t > 0.0)) throw DomainError("main_term requires t > 0");
    if (!(u.grid() == phi.grid())) throw GridMismatchError("main_term: u and phi live on different grids");
    const double frame = std::pow(2.0 * t, 0.5 * u.grid().dim() * nl.p);
    const GridField w = free_propagate(phi.with_time(std::nullopt), t);
    return frame * inner(apply_nonlinearity(u.with_time(std::nullopt), nl, kernel), w);
}

/// Atoms of the limit of |l~(t)|^2: mass ||l_k||_2^2 at v_k / 2 in the frequency frame.
struct FrequencyAtom {
    Vec position;
    double mass;
};

inline std::vector<FrequencyAtom> tilde_atoms(const LocalizedPathSpec& lspec, int dim) {
    std::vector<FrequencyAtom> atoms;
    for (const auto& c : lspec.components) {
        const auto v = c.path.limit_velocity();
        if (!v) throw DomainError("localized component has no limit velocity");
        atoms.push_back({{0.5 * (*v)[0], dim == 2 ? 0.5 * (*v)[1] : 0.0}, c.mass(dim)});
    }
    return atoms;
}

/**
 * Limit of the main term. Power: mu <|v+^|^p v+^, phi^>. Hartree:
 * mu <(K*(|v+^|^2 + lambda)) v+^, phi^> with lambda the atomic limit of
 * |l~|^2. K at an atom uses the cell average inside the atom's own cell.
 */
inline complex main_term_limit(const GridField& v_plus, const GridField& phi, const NonlinearitySpec& nl,
                               const LocalizedPathSpec* lspec = nullptr) {
    if (!(v_plus.grid() == phi.grid())) throw GridMismatchError("main_term_limit: grids differ");
    const GridField vh = forward_transform(v_plus.with_time(std::nullopt));
    const GridField ph = forward_transform(phi.with_time(std::nullopt));
    if (sup_norm(vh) == 0.0) return 0.0;
    const SpatialGrid& fg = vh.grid();
    const int d = fg.dim();
    GridField f = GridField::zeros(fg, Space::frequency);
    if (nl.kind == NonlinearitySpec::Kind::power) {
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = nl.mu * std::pow(std::abs(vh[k]), nl.p) * vh[k];
        return inner(f, ph);
    }
    const HartreeKernel kernel(fg, nl.kernel_exponent(d));
    GridField phys(fg, std::vector<complex>(vh.values().begin(), vh.values().end()));
    GridField pot = kernel.apply(phys);
    if (lspec) {
        const double s = kernel.exponent();
        const double origin = kernel.origin_average();
        for (const auto& a : tilde_atoms(*lspec, d)) {
            for (std::size_t k = 0; k < pot.size(); ++k) {
                const Vec z = fg.min_image(fg.point(k), a.position);
                bool own_cell = true;
                for (int ax = 0; ax < d; ++ax) own_cell = own_cell && std::abs(z[ax]) < 0.5 * fg.spacing(ax);
                pot[k] += a.mass * (own_cell ? origin : std::pow(norm2(z, d), -0.5 * s));
            }
        }
    }
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = nl.mu * pot[k].real() * vh[k];
    return inner(f, ph);
}

// ---------------------------------------------------------------------------
// Potential term

struct PotentialTermOptions {
    double epsilon = 0.05;       // the "-" in L^{2/p-} and the "+" in L^{1+}
    double mollify_width = 0.0;  // 0: default_mollify_width(grid)
};

struct PotentialTerm {
    complex value{0.0, 0.0};     // <V u, w>
    complex v1_value{0.0, 0.0};  // <V1 u, w>
    complex v2_value{0.0, 0.0};  // <V2 u, w>
    std::optional<double> v1_bound;  // ||V1||_a ||u||_2 ||w||_b, a = 2/p - eps
    std::string note;
};

/**
 * <V(t) u, e^{it Delta} phi> with the V1 Hoelder bound. The bound is refused
 * (note set, v1_bound empty) when p >= 1 and a V1 component is present.
 */
inline PotentialTerm potential_term(const GridField& u, const PotentialSpec& pot, const GridField& phi, double t,
                                    const NonlinearitySpec& nl, const PotentialTermOptions& opt = {}) {
    PotentialTerm out;
    if (pot.empty()) {
        out.v1_bound = 0.0;
        return out;
    }
    const SpatialGrid& g = u.grid();
    if (!(g == phi.grid())) throw GridMismatchError("potential_term: grids differ");
    const double mw = opt.mollify_width > 0.0 ? opt.mollify_width : default_mollify_width(g);
    const GridField w = free_propagate(phi.with_time(std::nullopt), t);
    const GridField v1 = sample_potential(pot, t, g, mw, PotentialPart::v1);
    const GridField v2 = sample_potential(pot, t, g, mw, PotentialPart::v2);
    GridField v1u = u.with_time(std::nullopt), v2u = u.with_time(std::nullopt);
    for (std::size_t j = 0; j < g.size(); ++j) {
        v1u[j] *= v1[j];
        v2u[j] *= v2[j];
    }
    out.v1_value = inner(v1u, w);
    out.v2_value = inner(v2u, w);
    out.value = out.v1_value + out.v2_value;
    if (!pot.has_v1()) {
        out.v1_bound = 0.0;
    } else if (nl.p >= 1.0) {
        out.note = "V1 bound needs p < 1";
    } else {
        const double a = 2.0 / nl.p - opt.epsilon;
        const double b = 1.0 / (0.5 - 1.0 / a);
        out.v1_bound = lp_norm(v1, a) * l2_norm(u) * lp_norm(w, b);
    }
    return out;
}

/// int_{t0}^{t0+T} |y(t)| dt by the trapezoid rule on samples, with the
/// integrand interpolated at partial end cells.
inline double window_integral(const std::vector<double>& t, const std::vector<double>& y, double t0, double T) {
    if (t.size() != y.size() || t.empty()) throw DomainError("window_integral: bad samples");
    const double t1 = t0 + T;
    const double tol = 1e-9 * std::max(1.0, std::abs(t1));
    if (t.front() > t0 + tol || t.back() < t1 - tol) throw RangeError("window not covered by samples");
    auto interp = [&](double x) {
        auto it = std::upper_bound(t.begin(), t.end(), x);
        if (it == t.begin()) return std::abs(y.front());
        if (it == t.end()) return std::abs(y.back());
        const std::size_t i = static_cast<std::size_t>(it - t.begin());
        const double a = (x - t[i - 1]) / (t[i] - t[i - 1]);
        return (1.0 - a) * std::abs(y[i - 1]) + a * std::abs(y[i]);
    };
    double acc = 0.0, pt = t0, py = interp(t0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= t0 + tol || t[i] >= t1 - tol) continue;
        acc += 0.5 * (t[i] - pt) * (std::abs(y[i]) + py);
        pt = t[i];
        py = std::abs(y[i]);
    }
    return acc + 0.5 * (t1 - pt) * (interp(t1) + py);
}

/**
 * Upper bound for int_{t0}^{t0+T} |<V2 u, w>| dt.
 * d = 1: T^{3/4} sup||V2||_M ||u||_{L^4 C_b} sup||w||_inf.
 * d = 2: T^{1-1/q} sup||V2||_{1+eps} ||u||_{L^q L^b} sup||w||_inf, with
 * 1/b = 1 - 1/(1+eps) and (q, b) Strichartz admissible.
 */
inline double v2_window_estimate(const std::vector<Snapshot>& u_snaps, const PotentialSpec& pot, const GridField& phi,
                                 double t0, double T, const PotentialTermOptions& opt = {}) {
    if (u_snaps.empty()) throw RangeError("v2_window_estimate: no snapshots");
    const SpatialGrid& g = u_snaps.front().field.grid();
    const int d = g.dim();
    const double mw = opt.mollify_width > 0.0 ? opt.mollify_width : default_mollify_width(g);
    double v2max = 0.0, wmax = 0.0;
    const double t1 = t0 + T;
    for (const auto& s : u_snaps) {
        if (s.t < t0 - 1e-12 || s.t > t1 + 1e-12) continue;
        const double vn = d == 1 ? v2_measure_norm(pot, s.t, g)
                                 : lp_norm(sample_potential(pot, s.t, g, mw, PotentialPart::v2), 1.0 + opt.epsilon);
        v2max = std::max(v2max, vn);
        wmax = std::max(wmax, sup_norm(free_propagate(phi.with_time(std::nullopt), s.t)));
    }
    if (d == 1)
        return std::pow(T, 0.75) * v2max * strichartz_window_norm(u_snaps, t0, T, StrichartzPair::endpoint_1d()) * wmax;
    const double b = (1.0 + opt.epsilon) / opt.epsilon;
    const double q = 2.0 / (1.0 - 2.0 / b);
    return std::pow(T, 1.0 - 1.0 / q) * v2max * strichartz_window_norm(u_snaps, t0, T, {q, b}) * wmax;
}

// ---------------------------------------------------------------------------
// Derivative identity

struct DerivativeCheck {
    double max_defect = 0.0;
    double max_pairing = 0.0;
    double spacing = 0.0;
    std::size_t points = 0;
};

/**
 * max over interior snapshots of |i (P(t+d) - P(t-d)) / 2d - (<F(u),w> + <Vu,w>)|.
 * Snapshots must be uniformly spaced.
 */
inline DerivativeCheck derivative_check(const Trajectory& traj, const GridField& phi, const NonlinearitySpec& nl,
                                        const PotentialSpec& pot, int threads = 1) {
    const auto& s = traj.snapshots;
    if (s.size() < 3) throw RangeError("derivative_check needs at least 3 snapshots");
    const double delta = s[1].t - s[0].t;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs((s[i].t - s[i - 1].t) - delta) > 1e-9 * std::max(1.0, s[i].t))
            throw RangeError("derivative_check needs uniformly spaced snapshots");
    const bool linear = nl.mu == complex(0.0, 0.0);
    std::optional<HartreeKernel> kernel;
    if (!linear && nl.kind == NonlinearitySpec::Kind::hartree)
        kernel.emplace(phi.grid(), nl.kernel_exponent(phi.grid().dim()));
    PotentialTermOptions popt;
    popt.mollify_width = traj.config.mollify_width;

    std::vector<complex> p(s.size()), rhs(s.size());
    parallel_for(s.size(), threads, [&](std::size_t i) {
        const GridField u = s[i].field.with_time(std::nullopt);
        const GridField w = free_propagate(phi.with_time(std::nullopt), s[i].t);
        p[i] = inner(u, w);
        complex r = linear ? complex(0.0, 0.0) : inner(apply_nonlinearity(u, nl, kernel ? &*kernel : nullptr), w);
        if (!pot.empty()) r += potential_term(u, pot, phi, s[i].t, nl, popt).value;
        rhs[i] = r;
    });
    DerivativeCheck out;
    out.spacing = delta;
    for (std::size_t i = 0; i < s.size(); ++i) out.max_pairing = std::max(out.max_pairing, std::abs(p[i]));
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const complex lhs = complex(0.0, 1.0) * (p[i + 1] - p[i - 1]) / (2.0 * delta);
        out.max_defect = std::max(out.max_defect, std::abs(lhs - rhs[i]));
        ++out.points;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition residuals

struct DecompositionResidual {
    double resid = 0.0;      // ||u - l(t) - e^{it Delta} v+||_2
    double mod_resid = 0.0;  // ||(M(t) - 1) v+||_2
};

inline double modulation_residual(const GridField& v_plus, double t) {
    if (!(t > 0.0)) throw DomainError("modulation residual requires t > 0");
    const auto& g = v_plus.grid();
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        // |e^{i theta} - 1| = 2 |sin(theta/2)|
        const double th = g.radius_squared(j) / (4.0 * t);
        s += std::norm(v_plus[j]) * 4.0 * std::pow(std::sin(0.5 * th), 2);
    }
    return std::sqrt(s * g.cell_measure());
}

inline DecompositionResidual residual_decomposition(const GridField& u, const LocalizedPathSpec* lspec,
                                                    const GridField& v_plus, double t) {
    if (!(t > 0.0)) throw DomainError("residual_decomposition requires t > 0");
    if (!(u.grid() == v_plus.grid())) throw GridMismatchError("residual_decomposition: grids differ");
    GridField r = u.with_time(std::nullopt) - free_propagate(v_plus.with_time(std::nullopt), t);
    if (lspec && !lspec->components.empty()) r -= sample_localized(*lspec, t, u.grid()).field.with_time(std::nullopt);
    return {l2_norm(r), modulation_residual(v_plus, t)};
}

// ---------------------------------------------------------------------------
// Test function

struct TestFunctionOptions {
    /// Width of the Gaussian mollifier in frequency; 0 means two dual cells.
    double mollify_width = 0.0;
};

struct TestFunction {
    GridField phi;      // physical
    GridField phi_hat;  // on the dual grid
    std::optional<GridField> truncated;  // Hartree: v+^' = v+^ 1{|v+^| <= n}
    double cross_term_residual = 0.0;    // max |(v+^ - v+^') v+^'|, Hartree only
    complex positivity{0.0, 0.0};        // <|v+^|^p v+^, phi^>
};

/**
 * Power: phi^ is the mollified v+^ min(1, n/|v+^|), so the integrand of
 * <|v+^|^p v+^, phi^> is nonnegative before mollification. Hartree: phi^ is
 * the mollified truncation v+^' = v+^ 1{|v+^| <= n}. The phase of mu is not
 * folded in here; glassey_integral aligns with it.
 */
inline TestFunction choose_test_function(const GridField& v_plus, const NonlinearitySpec& nl, double level,
                                         const TestFunctionOptions& opt = {}) {
    if (!(level > 0.0)) throw LevelError("truncation level must be positive");
    const GridField vh = forward_transform(v_plus.with_time(std::nullopt));
    const double vmax = sup_norm(vh);
    if (vmax == 0.0) throw DomainError("choose_test_function: v+ is zero");
    const SpatialGrid& fg = vh.grid();
    GridField gh = vh;
    std::optional<GridField> trunc;
    double cross = 0.0;
    if (nl.kind == NonlinearitySpec::Kind::power) {
        for (std::size_t k = 0; k < gh.size(); ++k) {
            const double m = std::abs(vh[k]);
            if (m > level) gh[k] *= level / m;
        }
    } else {
        bool any = false;
        for (std::size_t k = 0; k < gh.size(); ++k) {
            if (std::abs(vh[k]) > level) gh[k] = 0.0;
            else any = any || vh[k] != complex(0.0, 0.0);
        }
        if (!any) throw LevelError("truncation level below |v+^| everywhere: v+^' vanishes");
        for (std::size_t k = 0; k < gh.size(); ++k) cross = std::max(cross, std::abs((vh[k] - gh[k]) * gh[k]));
        trunc = gh;
    }
    const double w = opt.mollify_width > 0.0 ? opt.mollify_width : 2.0 * fg.spacing();
    GridField phi = inverse_transform(gh);
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] *= std::exp(-0.5 * w * w * phi.grid().radius_squared(j));
    phi = GridField(v_plus.grid(), std::vector<complex>(phi.values().begin(), phi.values().end()));
    GridField phi_hat = forward_transform(phi);
    GridField f = vh;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::pow(std::abs(vh[k]), nl.p) * vh[k];
    const complex pos = inner(f, phi_hat);
    return {std::move(phi), std::move(phi_hat), std::move(trunc), cross, pos};
}

// ---------------------------------------------------------------------------
// Series

/// One row of the exported series. Empty optionals are diagnostics that do not apply.
struct SeriesRow {
    double t = 0.0;
    complex pairing{0.0, 0.0};
    std::optional<complex> main;       // tilde-frame main term
    std::optional<complex> potential;  // <V u, w>
    std::optional<double> resid_l2;
    std::optional<double> mod_resid;
    double mass = 0.0;
    std::optional<double> l_q_norm;  // ||l~(t)||_q
    std::optional<double> v1_bound;
    std::optional<complex> v1_value;
};

struct PairingSeries {
    std::vector<SeriesRow> rows;
    double phi_norm = 0.0;
    double max_u_norm = 0.0;
    int dim = 1;
    NonlinearitySpec nl;

    /// |P(t)| <= sup ||u||_2 ||phi||_2 at every row.
    bool bounded(double slack = 1e-10) const {
        for (const auto& r : rows)
            if (std::abs(r.pairing) > max_u_norm * phi_norm + slack) return false;
        return true;
    }

    std::vector<double> times() const {
        std::vector<double> t;
        for (const auto& r : rows) t.push_back(r.t);
        return t;
    }
};

struct SeriesInputs {
    const GridField* phi = nullptr;
    NonlinearitySpec nl;
    const PotentialSpec* pot = nullptr;
    const LocalizedPathSpec* lspec = nullptr;
    const GridField* v_plus = nullptr;
    PotentialTermOptions potential;
    int threads = 1;
};

/// Diagnostics at each time; state(t) supplies u(t). Rows are computed
/// independently and stored in time order.
template <class StateFn>
PairingSeries build_series(const std::vector<double>& times, StateFn&& state, const SeriesInputs& in) {
    if (!in.phi) throw DomainError("build_series: phi required");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("build_series: times must be increasing");
    const SpatialGrid& g = in.phi->grid();
    const int d = g.dim();
    const bool linear = in.nl.mu == complex(0.0, 0.0);
    std::optional<HartreeKernel> kernel;
    if (!linear && in.nl.kind == NonlinearitySpec::Kind::hartree) kernel.emplace(g, in.nl.kernel_exponent(d));
    const bool has_l = in.lspec && !in.lspec->components.empty();

    PairingSeries out;
    out.phi_norm = l2_norm(*in.phi);
    out.dim = d;
    out.nl = in.nl;
    out.rows.resize(times.size());
    std::vector<double> unorm(times.size());
    parallel_for(times.size(), in.threads, [&](std::size_t i) {
        const double t = times[i];
        const GridField u = state(t).with_time(std::nullopt);
        if (!(u.grid() == g)) throw GridMismatchError("build_series: state lives on another grid");
        SeriesRow r;
        r.t = t;
        const GridField w = free_propagate(in.phi->with_time(std::nullopt), t);
        r.pairing = inner(u, w);
        if (t > 0.0 && !linear)
            r.main = std::pow(2.0 * t, 0.5 * d * in.nl.p) * inner(apply_nonlinearity(u, in.nl, kernel ? &*kernel : nullptr), w);
        else if (t > 0.0)
            r.main = complex(0.0, 0.0);
        if (in.pot && !in.pot->empty()) {
            const auto pt = potential_term(u, *in.pot, *in.phi, t, in.nl, in.potential);
            r.potential = pt.value;
            r.v1_bound = pt.v1_bound;
            r.v1_value = pt.v1_value;
        }
        if (in.v_plus && t > 0.0) {
            const auto dr = residual_decomposition(u, in.lspec, *in.v_plus, t);
            r.resid_l2 = dr.resid;
            r.mod_resid = dr.mod_resid;
        }
        r.mass = mass(u);
        unorm[i] = std::sqrt(r.mass);
        if (has_l && t > 0.0) {
            const auto ls = sample_localized(*in.lspec, t, g);
            const double q = in.lspec->q_exponent;
            r.l_q_norm = std::pow(2.0 * t, 0.5 * d - d / q) * ls.lq;
        }
        out.rows[i] = std::move(r);
    });
    for (double n : unorm) out.max_u_norm = std::max(out.max_u_norm, n);
    return out;
}

inline PairingSeries build_series(const Trajectory& traj, const SeriesInputs& in) {
    std::vector<double> times;
    for (const auto& s : traj.snapshots) times.push_back(s.t);
    auto state = [&](double t) -> const GridField& { return traj.at(t).field; };
    return build_series(times, state, in);
}

// ---------------------------------------------------------------------------
// Glassey integral

struct GlasseyValue {
    double value = 0.0;
    std::optional<double> alpha;  // empty for short-range p > 2/d
};

/**
 * int_1^tau Re(e^{-i arg mu} [ (2t)^{-dp/2} main(t) + pot(t) ]) dt, i.e. the
 * aligned real part of i dP/dt. Trapezoid over the series rows.
 */
inline GlasseyValue glassey_integral(const PairingSeries& series, double tau) {
    const auto& rows = series.rows;
    const double lo = 1.0;
    if (!(tau > lo)) throw DomainError("glassey_integral requires tau > 1");
    const double tol = 1e-9 * tau;
    if (rows.empty() || rows.front().t > lo + tol || rows.back().t < tau - tol)
        throw RangeError("series does not cover [1, tau]");
    const int d = series.dim;
    const complex align = std::polar(1.0, -std::arg(series.nl.mu == complex(0.0, 0.0) ? complex(1.0, 0.0) : series.nl.mu));
    auto integrand = [&](const SeriesRow& r) {
        if (!r.main) throw RangeError("series row lacks a main term at t = " + std::to_string(r.t));
        complex z = std::pow(2.0 * r.t, -0.5 * d * series.nl.p) * *r.main;
        if (r.potential) z += *r.potential;
        return (align * z).real();
    };
    std::vector<double> ts, ys;
    for (const auto& r : rows)
        if (r.t >= lo - tol && r.t > 0.0) {
            ts.push_back(r.t);
            ys.push_back(integrand(r));
        }
    // Include the row just before 1 for interpolation if present.
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].t < lo - tol && rows[i + 1].t >= lo - tol && rows[i].t > 0.0) {
            ts.insert(ts.begin(), rows[i].t);
            ys.insert(ys.begin(), integrand(rows[i]));
        }
    auto interp = [&](double x) {
        auto it = std::upper_bound(ts.begin(), ts.end(), x);
        if (it == ts.begin()) return ys.front();
        if (it == ts.end()) return ys.back();
        const std::size_t i = static_cast<std::size_t>(it - ts.begin());
        const double a = (x - ts[i - 1]) / (ts[i] - ts[i - 1]);
        return (1.0 - a) * ys[i - 1] + a * ys[i];
    };
    double acc = 0.0, pt = lo, py = interp(lo);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= lo + tol || ts[i] >= tau - tol) continue;
        acc += 0.5 * (ts[i] - pt) * (ys[i] + py);
        pt = ts[i];
        py = ys[i];
    }
    acc += 0.5 * (tau - pt) * (interp(tau) + py);
    GlasseyValue out{acc, std::nullopt};
    if (series.nl.p <= 2.0 / d * (1.0 + 1e-12) && tau >= 2.0) out.alpha = alpha(tau, series.nl.p, d);
    return out;
}

/// Offset-mode growth fit of tau -> glassey_integral over [tau_min, tau_max].
inline GrowthFit glassey_growth(const PairingSeries& series, double tau_min, double tau_max) {
    // The endpoints themselves plus every row strictly inside.
    std::vector<double> taus{tau_min};
    for (const auto& r : series.rows)
        if (r.t > tau_min * (1.0 + 1e-9) && r.t < tau_max * (1.0 - 1e-9)) taus.push_back(r.t);
    taus.push_back(tau_max);
    std::vector<double> vals;
    for (double tau : taus) vals.push_back(glassey_integral(series, tau).value);
    GrowthFitOptions opt;
    opt.offset = true;
    return growth_fit(taus, vals, opt);
}

}  // namespace nlsdiag
