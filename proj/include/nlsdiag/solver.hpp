#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlsdiag/fft.hpp"
#include "nlsdiag/fields.hpp"
#include "nlsdiag/grid.hpp"
#include "nlsdiag/norms.hpp"
#include "nlsdiag/spectral.hpp"

namespace nlsdiag {

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    std::vector<double> snapshot_times;  // empty: t_end only
    double mollify_width = 0.0;          // 0: default_mollify_width(grid)
    bool dealias = false;
    int mass_check_interval = 100;
    bool adapt_dt = true;  // shrink dt to the stability guard computed at t = 0

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver.dt must be positive");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end must be positive");
        if (mollify_width < 0.0) throw ConfigError("solver.mollify_width must be >= 0");
        if (mass_check_interval < 1) throw ConfigError("solver.mass_check_interval must be >= 1");
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
            const double s = snapshot_times[i];
            if (!(s > 0.0) || s > t_end * (1.0 + 1e-12))
                throw ConfigError("solver.snapshot_times must lie in (0, t_end]");
            if (i > 0 && !(s > snapshot_times[i - 1]))
                throw ConfigError("solver.snapshot_times must be strictly increasing");
        }
    }
};

struct Snapshot {
    double t;
    GridField field;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;  // includes t = 0
    std::vector<std::pair<double, double>> mass_log;
    SolverConfig config;
    double dt_used = 0.0;
    double t_valid = std::numeric_limits<double>::infinity();
    bool aborted = false;
    double last_valid_time = 0.0;
    std::string abort_reason;

    bool within_horizon(double t) const { return t <= t_valid; }

    const Snapshot& at(double t, double tol = 1e-9) const {
        for (const auto& s : snapshots)
            if (std::abs(s.t - t) <= tol * std::max(1.0, std::abs(t))) return s;
        throw RangeError("no snapshot at t = " + std::to_string(t));
    }
};

// ---------------------------------------------------------------------------
// Nonlinear substep

namespace detail {

// Exact solution of i u' = (V + mu |u|^p) u over dt at one point.
inline complex power_substep(complex u, double dt, double p, complex mu, complex v) {
    const double rho0 = std::abs(u);
    if (rho0 == 0.0) return u;
    const double vr = v.real(), vi = v.imag();
    const double a = p * vi;
    const double e = a == 0.0 ? dt : std::expm1(a * dt) / a;  // int_0^dt e^{p Vi s} ds
    const double rp = std::pow(rho0, p);
    double rho1 = rho0, integral = rp * e;  // integral = int_0^dt rho(s)^p ds
    if (mu.imag() != 0.0) {
        const double kappa = p * mu.imag() * rp * e;
        if (!(1.0 - kappa > 0.0))
            throw StepSizeError("power substep blows up within dt; reduce solver.dt");
        rho1 = rho0 * std::exp(vi * dt) * std::pow(1.0 - kappa, -1.0 / p);
        integral = -std::log1p(-kappa) / (p * mu.imag());
    } else {
        rho1 = rho0 * std::exp(vi * dt);
    }
    const double dtheta = -vr * dt - mu.real() * integral;
    if (vi == 0.0 && mu.imag() == 0.0) return u * std::polar(1.0, dtheta);
    return (u / rho0) * std::polar(rho1, dtheta);
}

// Average of |x|^{-s} over the origin cell [-a, a] x [-b, b] (2-d) or [-a, a].
inline double origin_cell_average(int dim, double s, double a, double b) {
    if (dim == 1) return std::pow(a, -s) / (1.0 - s);
    // Polar integration over the rectangle, split at the corner angle.
    const double corner = std::atan2(b, a);
    auto simpson = [&](double lo, double hi, auto&& f) {
        const int m = 2048;
        const double h = (hi - lo) / m;
        double acc = f(lo) + f(hi);
        for (int k = 1; k < m; ++k) acc += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    const double q = 2.0 - s;
    const double i1 = simpson(0.0, corner, [&](double th) { return std::pow(a / std::cos(th), q); });
    const double i2 = simpson(corner, std::numbers::pi / 2, [&](double th) { return std::pow(b / std::sin(th), q); });
    return 4.0 * (i1 + i2) / q / (4.0 * a * b);
}

}  // namespace detail

/**
 * Circular convolution with K(x) = |x|^{-s} sampled at minimum-image
 * displacements; the origin sample is replaced by the cell average of K.
 * The kernel spectrum is computed once per grid.
 */
class HartreeKernel {
public:
    HartreeKernel(const SpatialGrid& grid, double s) : grid_(grid), s_(s) {
        const int d = grid.dim();
        if (!(s > 0.0) || !(s < d))
            throw DomainError("Hartree kernel exponent dp/2 must lie in (0, d)");
        const std::size_t n = grid.points_per_axis();
        spectrum_.resize(grid.size());
        for (std::size_t flat = 0; flat < spectrum_.size(); ++flat) {
            const auto [i, j] = grid.unflatten(flat);
            // Index difference i maps to displacement min-image(i h).
            auto disp = [&](std::size_t idx, int axis) {
                const double m = idx < n / 2 ? static_cast<double>(idx) : static_cast<double>(idx) - static_cast<double>(n);
                return m * grid.spacing(axis);
            };
            Vec x{disp(i, 0), d == 2 ? disp(j, 1) : 0.0};
            const double r2 = norm2(x, d);
            spectrum_[flat] = r2 == 0.0 ? origin_average() : std::pow(r2, -0.5 * s);
        }
        fft::forward(spectrum_, d, n);
        const double scale = grid.cell_measure() / static_cast<double>(grid.size());
        for (auto& z : spectrum_) z *= scale;
    }

    double exponent() const { return s_; }
    const SpatialGrid& grid() const { return grid_; }

    double origin_average() const {
        return detail::origin_cell_average(grid_.dim(), s_, grid_.spacing(0) / 2, grid_.spacing(grid_.dim() - 1) / 2);
    }

    /// h^d sum_j K(x_i - x_j) rho_j. Input and output are index-ordered arrays.
    std::vector<complex> convolve(std::vector<complex> rho) const {
        const std::size_t n = grid_.points_per_axis();
        fft::forward(rho, grid_.dim(), n);
        for (std::size_t k = 0; k < rho.size(); ++k) rho[k] *= spectrum_[k];
        fft::backward(rho, grid_.dim(), n);
        return rho;
    }

    GridField apply(const GridField& u) const {
        if (!(u.grid() == grid_)) throw GridMismatchError("Hartree kernel built for another grid");
        std::vector<complex> rho(u.size());
        for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(u[j]);
        return GridField(grid_, convolve(std::move(rho)), Space::physical, u.time_label());
    }

private:
    SpatialGrid grid_;
    double s_;
    std::vector<complex> spectrum_;
};

/// K * |u|^2 with K(x) = |x|^{-dp/2}. The imaginary residue is left in place.
inline GridField hartree_potential(const GridField& u, double p) {
    if (u.space() != Space::physical) throw DomainError("hartree_potential expects a physical field");
    u.require_finite("hartree_potential");
    return HartreeKernel(u.grid(), 0.5 * u.grid().dim() * p).apply(u);
}

/**
 * Non-kinetic substep i u_t = V u + F(u) over dt. Power case: exact pointwise
 * flow. Hartree case: the potential K*|u|^2 is frozen at a predicted midpoint.
 */
inline GridField nonlinear_phase_step(const GridField& u, double dt, const NonlinearitySpec& nl,
                                      const GridField* v_now, const HartreeKernel* kernel = nullptr) {
    if (v_now) u.check_compatible(*v_now);
    const std::size_t size = u.size();
    auto vat = [&](std::size_t j) { return v_now ? (*v_now)[j] : complex(0.0, 0.0); };
    GridField out = u;
    if (nl.kind == NonlinearitySpec::Kind::power) {
        for (std::size_t j = 0; j < size; ++j) out[j] = detail::power_substep(u[j], dt, nl.p, nl.mu, vat(j));
        return out;
    }
    std::optional<HartreeKernel> own;
    if (!kernel) kernel = &own.emplace(u.grid(), nl.kernel_exponent(u.grid().dim()));
    auto rotate = [&](const GridField& phi, double tau) {
        GridField r = u;
        for (std::size_t j = 0; j < size; ++j)
            r[j] = u[j] * std::exp(complex(0.0, -tau) * (vat(j) + nl.mu * phi[j].real()));
        return r;
    };
    const GridField half = rotate(kernel->apply(u), 0.5 * dt);
    return rotate(kernel->apply(half), dt);
}

inline GridField nonlinear_phase_step(const GridField& u, double dt, const NonlinearitySpec& nl,
                                      const GridField& v_now) {
    return nonlinear_phase_step(u, dt, nl, &v_now);
}

/// F(u): mu |u|^p u or mu (K*|u|^2) u.
inline GridField apply_nonlinearity(const GridField& u, const NonlinearitySpec& nl,
                                    const HartreeKernel* kernel = nullptr) {
    GridField out = u;
    if (nl.kind == NonlinearitySpec::Kind::power) {
        for (std::size_t j = 0; j < u.size(); ++j) out[j] = nl.mu * std::pow(std::abs(u[j]), nl.p) * u[j];
        return out;
    }
    std::optional<HartreeKernel> own;
    if (!kernel) kernel = &own.emplace(u.grid(), nl.kernel_exponent(u.grid().dim()));
    const GridField phi = kernel->apply(u);
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = nl.mu * phi[j].real() * u[j];
    return out;
}

/// One unfused Strang step: e^{i dt/2 D}, nonlinear substep, e^{i dt/2 D}. dt may be negative.
inline GridField strang_step(const GridField& u, double dt, const NonlinearitySpec& nl, const GridField* v) {
    const GridField a = free_propagate(u.with_time(std::nullopt), 0.5 * dt);
    const GridField b = nonlinear_phase_step(a, dt, nl, v);
    return free_propagate(b, 0.5 * dt);
}

// ---------------------------------------------------------------------------
// Evolution

namespace detail {

// e^{i tau Delta} on index-ordered arrays, FFT-natural frequency order. The
// multiplier is even in xi, so the centering phases of the grid cancel.
class KineticStep {
public:
    KineticStep(const SpatialGrid& g, bool dealias) : grid_(g), xi2_(g.size()), mask_(g.size(), 1.0) {
        const std::size_t n = g.points_per_axis();
        auto freq = [&](std::size_t k, int axis) {
            const double m = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
            return 2.0 * std::numbers::pi * m / g.box_length(axis);
        };
        auto keep = [&](std::size_t k) {
            const double m = k < n / 2 ? static_cast<double>(k) : static_cast<double>(n) - static_cast<double>(k);
            return 3.0 * m <= static_cast<double>(n);
        };
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            const auto [i, j] = g.unflatten(flat);
            Vec xi{freq(i, 0), g.dim() == 2 ? freq(j, 1) : 0.0};
            xi2_[flat] = norm2(xi, g.dim());
            if (dealias && (!keep(i) || (g.dim() == 2 && !keep(j)))) mask_[flat] = 0.0;
        }
    }

    void apply(std::vector<complex>& v, double tau) {
        if (tau == 0.0) return;
        const auto& phases = table(tau);
        fft::forward(v, grid_.dim(), grid_.points_per_axis());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] *= phases[k];
        fft::backward(v, grid_.dim(), grid_.points_per_axis());
    }

private:
    const std::vector<complex>& table(double tau) {
        if (auto it = cache_.find(tau); it != cache_.end()) return it->second;
        if (cache_.size() > 8) cache_.clear();
        std::vector<complex> ph(xi2_.size());
        const double inv = 1.0 / static_cast<double>(xi2_.size());
        for (std::size_t k = 0; k < ph.size(); ++k) ph[k] = std::polar(mask_[k] * inv, -tau * xi2_[k]);
        return cache_.emplace(tau, std::move(ph)).first->second;
    }

    SpatialGrid grid_;
    std::vector<double> xi2_;
    std::vector<double> mask_;
    std::map<double, std::vector<complex>> cache_;
};

// Radius containing all but `tail` of the mass of f (physical or frequency).
inline double mass_radius(const GridField& f, double tail) {
    std::vector<std::pair<double, double>> rm(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) rm[j] = {std::sqrt(f.grid().radius_squared(j)), std::norm(f[j])};
    std::sort(rm.begin(), rm.end());
    double total = 0.0;
    for (const auto& e : rm) total += e.second;
    if (total == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& e : rm) {
        acc += e.second;
        if (acc >= (1.0 - tail) * total) return e.first;
    }
    return rm.back().first;
}

}  // namespace detail

/// Mass fraction outside the extent and velocity radii used by the horizon.
inline constexpr double kHorizonTail = 1e-6;

/**
 * Last time for which L >= 4 (extent + 2 v_max t) holds on every axis, with
 * extent and group velocity 2|xi| measured from u0.
 */
inline double validity_horizon(const GridField& u0) {
    const double extent = detail::mass_radius(u0, kHorizonTail);
    const double vmax = 2.0 * detail::mass_radius(forward_transform(u0.with_time(std::nullopt)), kHorizonTail);
    double lmin = u0.grid().box_length(0);
    if (u0.grid().dim() == 2) lmin = std::min(lmin, u0.grid().box_length(1));
    const double room = lmin / 4.0 - extent;
    if (room <= 0.0) return 0.0;
    if (vmax == 0.0) return std::numeric_limits<double>::infinity();
    return room / (2.0 * vmax);
}

/// dt <= 0.05 / max(|mu| max|u|^p, max|V|) at the initial state.
inline double stable_dt(const GridField& u0, const NonlinearitySpec& nl, const GridField* v0,
                        const HartreeKernel* kernel) {
    double rate = 0.0;
    if (nl.kind == NonlinearitySpec::Kind::power) {
        rate = std::abs(nl.mu) * std::pow(sup_norm(u0), nl.p);
    } else if (kernel) {
        rate = std::abs(nl.mu) * sup_norm(kernel->apply(u0));
    }
    if (v0) rate = std::max(rate, sup_norm(*v0));
    return rate > 0.0 ? 0.05 / rate : std::numeric_limits<double>::infinity();
}

/**
 * Strang splitting: e^{i dt/2 Delta}, nonlinear substep with V at the step
 * midpoint, e^{i dt/2 Delta}. Adjacent half kinetic steps are fused. Each
 * interval between snapshots is cut into equal substeps so snapshots are hit
 * exactly.
 */
/// mu = 0 is accepted here and runs the linear flow.
inline Trajectory evolve(const GridField& u0, SolverConfig cfg, const NonlinearitySpec& nl,
                         const PotentialSpec& pot) {
    cfg.validate();
    if (u0.space() != Space::physical) throw DomainError("evolve expects a physical initial state");
    u0.require_finite("evolve");
    const SpatialGrid& g = u0.grid();
    const bool nonlinear = nl.mu != complex(0.0, 0.0);
    if (nonlinear) nl.validate_for_solver(g.dim());
    pot.validate(g.dim());
    const double mw = cfg.mollify_width > 0.0 ? cfg.mollify_width : default_mollify_width(g);

    std::optional<HartreeKernel> kernel;
    if (nonlinear && nl.kind == NonlinearitySpec::Kind::hartree) kernel.emplace(g, nl.kernel_exponent(g.dim()));

    const bool has_pot = !pot.empty();
    const bool pot_static = !pot.time_dependent();
    std::optional<GridField> v_static;
    if (has_pot) v_static = sample_potential(pot, 0.0, g, mw);

    Trajectory traj;
    traj.config = cfg;
    traj.t_valid = validity_horizon(u0);
    double dt = cfg.dt;
    const NonlinearitySpec linear{NonlinearitySpec::Kind::power, 1.0, {0.0, 0.0}};
    const NonlinearitySpec& active = nonlinear ? nl : linear;
    if (cfg.adapt_dt && (nonlinear || has_pot))
        dt = std::min(dt, stable_dt(u0, active, v_static ? &*v_static : nullptr, kernel ? &*kernel : nullptr));
    traj.dt_used = dt;

    std::vector<double> marks = cfg.snapshot_times;
    if (marks.empty() || marks.back() < cfg.t_end * (1.0 - 1e-12)) marks.push_back(cfg.t_end);

    detail::KineticStep kinetic(g, cfg.dealias);
    std::vector<complex> state(u0.values().begin(), u0.values().end());
    traj.snapshots.push_back({0.0, u0.with_time(0.0)});
    traj.mass_log.emplace_back(0.0, mass(u0));

    auto state_mass = [&] {
        double s = 0.0;
        for (const auto& z : state) s += std::norm(z);
        return s * g.cell_measure();
    };

    double t = 0.0;
    double pending = 0.0;  // kinetic time owed before the state is physical
    long step = 0;
    try {
        for (double mark : marks) {
            const double span = mark - t;
            const long m = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
            const double h = span / static_cast<double>(m);
            const double t_start = t;
            for (long k = 0; k < m; ++k) {
                const double t_k = t_start + span * static_cast<double>(k) / static_cast<double>(m);
                kinetic.apply(state, pending + 0.5 * h);
                pending = 0.0;
                if (nonlinear || has_pot) {
                    GridField cur(g, std::move(state));
                    std::optional<GridField> v_mid;
                    if (has_pot) v_mid = pot_static ? *v_static : sample_potential(pot, t_k + 0.5 * h, g, mw);
                    const GridField* vp = v_mid ? &*v_mid : nullptr;
                    GridField next = nonlinear_phase_step(cur, h, active, vp, kernel ? &*kernel : nullptr);
                    state.assign(next.values().begin(), next.values().end());
                }
                pending = 0.5 * h;
                ++step;
                const double msum = state_mass();
                if (!std::isfinite(msum)) {
                    traj.aborted = true;
                    traj.abort_reason = "non-finite values after step ending at t = " +
                                        std::to_string(t_start + span * static_cast<double>(k + 1) / static_cast<double>(m));
                    traj.last_valid_time = t_k;
                    return traj;
                }
                if (step % cfg.mass_check_interval == 0 && k + 1 < m)
                    traj.mass_log.emplace_back(t_start + span * static_cast<double>(k + 1) / static_cast<double>(m), msum);
            }
            kinetic.apply(state, pending);
            pending = 0.0;
            t = mark;
            GridField snap(g, state, Space::physical, t);
            traj.mass_log.emplace_back(t, mass(snap));
            traj.snapshots.push_back({t, std::move(snap)});
            traj.last_valid_time = t;
        }
    } catch (const StepSizeError& e) {
        throw StepSizeError(std::string(e.what()) + " (last valid time " + std::to_string(traj.last_valid_time) + ")");
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Strichartz window norms

/// Space-time exponent pair (q, r); r = infinity is the sup norm.
struct StrichartzPair {
    double q = 4.0;
    double r = std::numeric_limits<double>::infinity();

    static StrichartzPair endpoint_1d() { return {4.0, std::numeric_limits<double>::infinity()}; }
};

/**
 * (int_{t0}^{t0+T} ||u(t)||_r^q dt)^{1/q} by the trapezoid rule over the
 * snapshots, with the integrand linearly interpolated at partial end cells.
 */
inline double strichartz_window_norm(const std::vector<Snapshot>& snaps, double t0, double T,
                                     StrichartzPair pair) {
    if (!(T > 0.0)) throw DomainError("window length must be positive");
    if (!(pair.q >= 1.0) || !(pair.r >= 1.0)) throw DomainError("Strichartz exponents must be >= 1");
    const double t1 = t0 + T;
    const double tol = 1e-9 * std::max(1.0, std::abs(t1));
    if (snaps.empty() || snaps.front().t > t0 + tol || snaps.back().t < t1 - tol)
        throw RangeError("window [" + std::to_string(t0) + ", " + std::to_string(t1) + "] not covered by snapshots");
    std::vector<double> ts, ys;
    for (const auto& s : snaps) {
        ts.push_back(s.t);
        ys.push_back(std::pow(lp_norm(s.field, pair.r), pair.q));
    }
    auto interp = [&](double x) {
        auto it = std::upper_bound(ts.begin(), ts.end(), x);
        if (it == ts.begin()) return ys.front();
        if (it == ts.end()) return ys.back();
        const std::size_t i = static_cast<std::size_t>(it - ts.begin());
        const double w = (x - ts[i - 1]) / (ts[i] - ts[i - 1]);
        return (1.0 - w) * ys[i - 1] + w * ys[i];
    };
    double acc = 0.0;
    double prev_t = t0, prev_y = interp(t0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= t0 + tol || ts[i] >= t1 - tol) continue;
        acc += 0.5 * (ts[i] - prev_t) * (ys[i] + prev_y);
        prev_t = ts[i];
        prev_y = ys[i];
    }
    acc += 0.5 * (t1 - prev_t) * (interp(t1) + prev_y);
    return std::pow(acc, 1.0 / pair.q);
}

inline double strichartz_window_norm(const Trajectory& traj, double t0, double T, StrichartzPair pair) {
    return strichartz_window_norm(traj.snapshots, t0, T, pair);
}

}  // namespace nlsdiag
