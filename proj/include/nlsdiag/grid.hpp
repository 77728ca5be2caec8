#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlsdiag/errors.hpp"

namespace nlsdiag {

using complex = std::complex<double>;

/// A point of R^d, d <= 2. The second component is ignored in one dimension.
using Vec = std::array<double, 2>;

inline double norm2(const Vec& v, int dim) {
    double s = v[0] * v[0];
    if (dim == 2) s += v[1] * v[1];
    return s;
}

enum class Space { physical, frequency };

inline std::string_view to_string(Space s) {
    return s == Space::physical ? "physical" : "frequency";
}

/**
 * Uniform periodic sampling of a box in R^d (d = 1 or 2).
 *
 * Axis coordinates are x_j = (j - n/2) h with h = L/n, so the origin sits at
 * index n/2 and the box is [-L/2, L/2). The frequency set of a grid is itself
 * a grid (see dual()) with spacing 2*pi/L and the same centered layout, which
 * is how frequency-tagged fields are stored.
 */
class SpatialGrid {
public:
    SpatialGrid(int dim, std::size_t points_per_axis, double box_length)
        : SpatialGrid(dim, points_per_axis, Vec{box_length, box_length}) {}

    SpatialGrid(int dim, std::size_t points_per_axis, Vec box_length)
        : dim_(dim), n_(points_per_axis), box_(box_length) {
        if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
        if (n_ < 8 || (n_ & (n_ - 1)) != 0)
            throw ConfigError("points_per_axis must be a power of two >= 8, got " +
                              std::to_string(n_));
        if (dim == 1) box_[1] = box_[0];
        for (int a = 0; a < dim; ++a)
            if (!(box_[a] > 0.0) || !std::isfinite(box_[a]))
                throw ConfigError("box_length must be positive and finite");
    }

    int dim() const { return dim_; }
    std::size_t points_per_axis() const { return n_; }
    std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }
    double box_length(int axis = 0) const { return box_[axis]; }
    const Vec& box() const { return box_; }
    double spacing(int axis = 0) const { return box_[axis] / static_cast<double>(n_); }

    /// Quadrature weight h^d of one cell.
    double cell_measure() const {
        return dim_ == 1 ? spacing(0) : spacing(0) * spacing(1);
    }

    double coordinate(int axis, std::size_t index) const {
        return (static_cast<double>(index) - static_cast<double>(n_ / 2)) * spacing(axis);
    }

    /// Multi-index of a row-major flat index (axis 0 is the slow axis).
    std::array<std::size_t, 2> unflatten(std::size_t flat) const {
        if (dim_ == 1) return {flat, 0};
        return {flat / n_, flat % n_};
    }

    Vec point(std::size_t flat) const {
        auto [i, j] = unflatten(flat);
        Vec x{coordinate(0, i), 0.0};
        if (dim_ == 2) x[1] = coordinate(1, j);
        return x;
    }

    double radius_squared(std::size_t flat) const { return norm2(point(flat), dim_); }

    /// The frequency grid: spacing 2*pi/L and box 2*pi*n/L per axis.
    SpatialGrid dual() const {
        Vec b = box_;
        for (int a = 0; a < 2; ++a)
            b[a] = 2.0 * std::numbers::pi * static_cast<double>(n_) / box_[a];
        return SpatialGrid(dim_, n_, b);
    }

    /// Same index layout with every coordinate multiplied by factor.
    SpatialGrid scaled(double factor) const {
        if (!(factor > 0.0)) throw DomainError("grid scale factor must be positive");
        return SpatialGrid(dim_, n_, Vec{box_[0] * factor, box_[1] * factor});
    }

    /// Periodic displacement x - y reduced to the minimum image on this box.
    Vec min_image(const Vec& x, const Vec& y) const {
        Vec d{x[0] - y[0], x[1] - y[1]};
        for (int a = 0; a < dim_; ++a) d[a] -= box_[a] * std::nearbyint(d[a] / box_[a]);
        if (dim_ == 1) d[1] = 0.0;
        return d;
    }

    bool contains(const Vec& x, double margin = 0.0) const {
        for (int a = 0; a < dim_; ++a)
            if (x[a] - margin < -box_[a] / 2 || x[a] + margin >= box_[a] / 2) return false;
        return true;
    }

    // Box lengths compare to a few ulps: dual().dual() reproduces L only up to
    // rounding.
    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        auto close = [](double x, double y) {
            return std::abs(x - y) <= 1e-13 * std::max(std::abs(x), std::abs(y));
        };
        return a.dim_ == b.dim_ && a.n_ == b.n_ && close(a.box_[0], b.box_[0]) &&
               (a.dim_ == 1 || close(a.box_[1], b.box_[1]));
    }

private:
    int dim_;
    std::size_t n_;
    Vec box_;
};

/**
 * Complex samples on a SpatialGrid, tagged with the space they live in and an
 * optional time label. Row-major storage; value semantics.
 */
class GridField {
public:
    GridField(SpatialGrid grid, std::vector<complex> values, Space space = Space::physical,
              std::optional<double> time_label = std::nullopt)
        : grid_(std::move(grid)), values_(std::move(values)), space_(space), time_(time_label) {
        if (values_.size() != grid_.size())
            throw ConfigError("field length " + std::to_string(values_.size()) +
                              " does not match grid size " + std::to_string(grid_.size()));
    }

    static GridField zeros(const SpatialGrid& grid, Space space = Space::physical,
                           std::optional<double> time_label = std::nullopt) {
        return GridField(grid, std::vector<complex>(grid.size()), space, time_label);
    }

    /// Samples f(x_j) at every grid point.
    template <class F>
    static GridField sample(const SpatialGrid& grid, F&& f, Space space = Space::physical,
                            std::optional<double> time_label = std::nullopt) {
        std::vector<complex> v(grid.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.point(j));
        return GridField(grid, std::move(v), space, time_label);
    }

    const SpatialGrid& grid() const { return grid_; }
    Space space() const { return space_; }
    std::optional<double> time_label() const { return time_; }
    std::size_t size() const { return values_.size(); }

    std::span<const complex> values() const { return values_; }
    std::span<complex> values() { return values_; }
    const complex& operator[](std::size_t j) const { return values_[j]; }
    complex& operator[](std::size_t j) { return values_[j]; }

    GridField with_time(std::optional<double> t) const {
        GridField g = *this;
        g.time_ = t;
        return g;
    }

    bool all_finite() const {
        for (const auto& z : values_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    void require_finite(std::string_view what) const {
        if (!all_finite())
            throw DataIntegrityError(std::string(what) + ": field contains non-finite values");
    }

    GridField& operator+=(const GridField& o) {
        check_compatible(o);
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        check_compatible(o);
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
        return *this;
    }
    GridField& operator*=(complex c) {
        for (auto& z : values_) z *= c;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(complex c, GridField a) { return a *= c; }

    void check_compatible(const GridField& o) const {
        if (!(grid_ == o.grid_)) throw GridMismatchError("fields live on different grids");
        if (space_ != o.space_) throw GridMismatchError("fields live in different spaces");
    }

private:
    SpatialGrid grid_;
    std::vector<complex> values_;
    Space space_;
    std::optional<double> time_;
};

/// Discrete L^2 pairing <f, g> = h^d sum f conj(g), conjugate-linear in g.
inline complex inner(const GridField& f, const GridField& g) {
    f.check_compatible(g);
    complex s{0.0, 0.0};
    auto a = f.values();
    auto b = g.values();
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
    return s * f.grid().cell_measure();
}

inline double l2_norm(const GridField& f) {
    double s = 0.0;
    for (const auto& z : f.values()) s += std::norm(z);
    return std::sqrt(s * f.grid().cell_measure());
}

inline double mass(const GridField& f) {
    double s = 0.0;
    for (const auto& z : f.values()) s += std::norm(z);
    return s * f.grid().cell_measure();
}

}  // namespace nlsdiag
