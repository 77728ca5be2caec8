#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nlsdiag/fft.hpp"
#include "nlsdiag/grid.hpp"
#include "nlsdiag/norms.hpp"

namespace nlsdiag {

namespace detail {

// (-1)^(i+j) in centered index space. Conjugating the FFT with it moves the
// origin to index n/2 on both sides (n/2 is even, so no global phase).
inline void checkerboard(std::span<complex> v, const SpatialGrid& g) {
    const std::size_t n = g.points_per_axis();
    if (g.dim() == 1) {
        for (std::size_t j = 1; j < n; j += 2) v[j] = -v[j];
        return;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i & 1) ? 0 : 1; j < n; j += 2) v[i * n + j] = -v[i * n + j];
}

inline double unitary_prefactor(int dim) {
    return std::pow(2.0 * std::numbers::pi, -0.5 * dim);
}

// exp(-i x_j eta) for x_j = x0 + j h, j < n. Rotation recurrence, re-seeded
// exactly every 32 entries to bound the drift.
inline void phase_row(double x0, double h, double eta, std::span<complex> out) {
    const complex step = std::polar(1.0, -h * eta);
    complex cur;
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (j % 32 == 0)
            cur = std::polar(1.0, -(x0 + static_cast<double>(j) * h) * eta);
        else
            cur *= step;
        out[j] = cur;
    }
}

// (2 i t)^{power} on the principal branch.
inline complex two_i_t_pow(double t, double power) {
    return std::polar(std::pow(2.0 * t, power), power * std::numbers::pi / 2.0);
}

}  // namespace detail

/// Unitary transform (2 pi)^{-d/2} h^d sum_j exp(-i x_j xi_k) f_j onto the dual grid.
inline GridField forward_transform(const GridField& f) {
    if (f.space() != Space::physical)
        throw DomainError("forward_transform expects a physical-space field");
    f.require_finite("forward_transform");
    const auto& g = f.grid();
    std::vector<complex> v(f.values().begin(), f.values().end());
    detail::checkerboard(v, g);
    fft::forward(v, g.dim(), g.points_per_axis());
    detail::checkerboard(v, g);
    const double scale = detail::unitary_prefactor(g.dim()) * g.cell_measure();
    for (auto& z : v) z *= scale;
    return GridField(g.dual(), std::move(v), Space::frequency, f.time_label());
}

inline GridField inverse_transform(const GridField& fhat) {
    if (fhat.space() != Space::frequency)
        throw DomainError("inverse_transform expects a frequency-space field");
    fhat.require_finite("inverse_transform");
    const auto& g = fhat.grid();
    std::vector<complex> v(fhat.values().begin(), fhat.values().end());
    detail::checkerboard(v, g);
    fft::backward(v, g.dim(), g.points_per_axis());
    detail::checkerboard(v, g);
    const double scale = detail::unitary_prefactor(g.dim()) * g.cell_measure();
    for (auto& z : v) z *= scale;
    return GridField(g.dual(), std::move(v), Space::physical, fhat.time_label());
}

/// Applies a Fourier multiplier m(xi) to a physical field. The unpaired
/// Nyquist mode is treated as its negative-frequency representative.
template <class Multiplier>
GridField apply_multiplier(const GridField& f, Multiplier&& m) {
    if (f.space() != Space::physical)
        throw DomainError("Fourier multipliers act on physical-space fields");
    f.require_finite("apply_multiplier");
    const auto& g = f.grid();
    const SpatialGrid freq = g.dual();
    std::vector<complex> v(f.values().begin(), f.values().end());
    detail::checkerboard(v, g);
    fft::forward(v, g.dim(), g.points_per_axis());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= m(freq.point(k));
    fft::backward(v, g.dim(), g.points_per_axis());
    detail::checkerboard(v, g);
    const double inv = 1.0 / static_cast<double>(v.size());
    for (auto& z : v) z *= inv;
    return GridField(g, std::move(v), Space::physical, f.time_label());
}

/// e^{it Delta} f = F^{-1} e^{-it|xi|^2} F f.
inline GridField free_propagate(const GridField& f, double t) {
    if (!std::isfinite(t)) throw DomainError("free_propagate: non-finite time");
    const int dim = f.grid().dim();
    GridField out = t == 0.0 ? f : apply_multiplier(f, [t, dim](const Vec& xi) {
        return std::polar(1.0, -t * norm2(xi, dim));
    });
    if (t == 0.0) f.require_finite("free_propagate");
    if (auto tl = f.time_label()) out = out.with_time(*tl + t);
    return out;
}

/// Pointwise multiplication by M(t)^{sign} = exp(sign i |x|^2 / 4t).
inline GridField modulate(const GridField& f, double t, int sign) {
    if (t == 0.0 || !std::isfinite(t)) throw DomainError("modulate: t must be nonzero and finite");
    if (sign != 1 && sign != -1) throw DomainError("modulate: sign must be +1 or -1");
    f.require_finite("modulate");
    GridField out = f;
    const auto& g = f.grid();
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] *= std::polar(1.0, sign * g.radius_squared(j) / (4.0 * t));
    return out;
}

/// The grid {x_j / 2t} on which tilde-frame fields live.
inline SpatialGrid tilde_grid(const SpatialGrid& g, double t) {
    if (!(t > 0.0)) throw DomainError("tilde frame requires t > 0");
    return g.scaled(1.0 / (2.0 * t));
}

/**
 * (MD)^{-1}: u~(x_j/2t) = (2it)^{d/2} exp(-i|x_j|^2/4t) u(x_j), returned on the
 * rescaled grid. An exact L^2 isometry with the rescaled cell measure.
 */
inline GridField tilde_transform(const GridField& u, double t) {
    if (!(t > 0.0)) throw DomainError("tilde_transform requires t > 0");
    if (u.space() != Space::physical) throw DomainError("tilde_transform expects physical field");
    u.require_finite("tilde_transform");
    const auto& g = u.grid();
    const complex pre = detail::two_i_t_pow(t, 0.5 * g.dim());
    std::vector<complex> v(u.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = pre * std::polar(1.0, -g.radius_squared(j) / (4.0 * t)) * u[j];
    return GridField(tilde_grid(g, t), std::move(v), Space::physical, u.time_label());
}

/// MD: inverse of tilde_transform. `physical_grid` is the grid of the original field.
inline GridField untilde_transform(const GridField& ut, double t, const SpatialGrid& physical_grid) {
    if (!(t > 0.0)) throw DomainError("untilde_transform requires t > 0");
    if (!(ut.grid() == tilde_grid(physical_grid, t)))
        throw GridMismatchError("tilde field does not live on the rescaled grid");
    const complex pre = detail::two_i_t_pow(t, -0.5 * physical_grid.dim());
    std::vector<complex> v(ut.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = pre * std::polar(1.0, physical_grid.radius_squared(j) / (4.0 * t)) * ut[j];
    return GridField(physical_grid, std::move(v), Space::physical, ut.time_label());
}

/**
 * Direct quadrature (2 pi)^{-d/2} h^d sum_j exp(-i x_j . eta) f_j evaluated at
 * every point eta of `target`, which need not be the dual grid. Separable;
 * O(n^{d+1}).
 */
inline GridField direct_transform(const GridField& f, const SpatialGrid& target) {
    if (f.space() != Space::physical) throw DomainError("direct_transform expects physical field");
    f.require_finite("direct_transform");
    const auto& g = f.grid();
    if (g.dim() != target.dim() || g.points_per_axis() != target.points_per_axis())
        throw GridMismatchError("direct_transform: target must match dimension and size");
    const std::size_t n = g.points_per_axis();
    const double scale = detail::unitary_prefactor(g.dim()) * g.cell_measure();
    std::vector<complex> row(n);
    std::vector<complex> out(f.size());

    if (g.dim() == 1) {
        for (std::size_t k = 0; k < n; ++k) {
            detail::phase_row(g.coordinate(0, 0), g.spacing(0), target.coordinate(0, k), row);
            complex s{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) s += row[j] * f[j];
            out[k] = s * scale;
        }
        return GridField(target, std::move(out), Space::frequency, f.time_label());
    }

    // Per-axis phase matrices E_a[k][j] = exp(-i x_j eta_k).
    auto matrix = [&](int axis) {
        std::vector<complex> m(n * n);
        for (std::size_t k = 0; k < n; ++k)
            detail::phase_row(g.coordinate(axis, 0), g.spacing(axis), target.coordinate(axis, k),
                              std::span<complex>(m.data() + k * n, n));
        return m;
    };
    const auto e0 = matrix(0);
    const auto e1 = matrix(1);
    std::vector<complex> tmp(f.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            complex s{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) s += e1[k * n + j] * f[i * n + j];
            tmp[i * n + k] = s;
        }
    for (std::size_t k0 = 0; k0 < n; ++k0)
        for (std::size_t k1 = 0; k1 < n; ++k1) {
            complex s{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) s += e0[k0 * n + i] * tmp[i * n + k1];
            out[k0 * n + k1] = s * scale;
        }
    return GridField(target, std::move(out), Space::frequency, f.time_label());
}

/// Direct quadrature of the unitary transform at a single frequency point.
inline complex fourier_at(const GridField& f, const Vec& xi) {
    const auto& g = f.grid();
    complex s{0.0, 0.0};
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Vec x = g.point(j);
        double phase = x[0] * xi[0];
        if (g.dim() == 2) phase += x[1] * xi[1];
        s += std::polar(1.0, -phase) * f[j];
    }
    return s * detail::unitary_prefactor(g.dim()) * g.cell_measure();
}

/**
 * Relative residual ||e^{itD} phi - M D F M phi||_2 / ||phi||_2. The right-hand
 * side is built by modulating, transforming by direct quadrature onto the grid
 * {x_j/2t}, and dilating/modulating back onto {x_j}; no resampling occurs.
 */
inline double verify_factorization(const GridField& phi, double t) {
    if (!(t > 0.0)) throw DomainError("verify_factorization requires t > 0");
    const GridField lhs = free_propagate(phi.with_time(std::nullopt), t);
    const GridField ghat = direct_transform(modulate(phi, t, +1), tilde_grid(phi.grid(), t));
    const GridField rhs =
        untilde_transform(GridField(ghat.grid(), std::vector<complex>(ghat.values().begin(),
                                                                      ghat.values().end())),
                          t, phi.grid());
    const double denom = l2_norm(phi);
    if (denom == 0.0) return 0.0;
    return l2_norm(lhs - rhs) / denom;
}

}  // namespace nlsdiag
