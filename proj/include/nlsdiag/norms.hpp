#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlsdiag/grid.hpp"

namespace nlsdiag {

/// Which discrete norm to evaluate. r = infinity in an lp norm means sup.
struct Norm {
    enum class Kind { lp, weak_lp, sup };
    Kind kind = Kind::lp;
    double r = 2.0;

    static Norm lp(double r) { return {Kind::lp, r}; }
    static Norm weak(double r) { return {Kind::weak_lp, r}; }
    static Norm sup() { return {Kind::sup, std::numeric_limits<double>::infinity()}; }
};

inline double sup_norm(const GridField& f) {
    double m = 0.0;
    for (const auto& z : f.values()) m = std::max(m, std::abs(z));
    return m;
}

inline double lp_norm(const GridField& f, double r) {
    if (!(r >= 1.0)) throw DomainError("lp norm requires r >= 1");
    if (std::isinf(r)) return sup_norm(f);
    if (r == 2.0) return l2_norm(f);
    // Scale by the maximum to avoid under/overflow for large r.
    const double m = sup_norm(f);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& z : f.values()) s += std::pow(std::abs(z) / m, r);
    return m * std::pow(s * f.grid().cell_measure(), 1.0 / r);
}

/// Weak-L^r (Lorentz L^{r,inf}) surrogate: sup_k (k h^d)^{1/r} f*_k over the
/// decreasing rearrangement of grid moduli. O(h) accurate, not certified.
inline double weak_lp_norm(const GridField& f, double r) {
    if (!(r > 1.0) || std::isinf(r)) throw DomainError("weak lp norm requires 1 < r < inf");
    std::vector<double> mod(f.size());
    for (std::size_t j = 0; j < mod.size(); ++j) mod[j] = std::abs(f[j]);
    std::sort(mod.begin(), mod.end(), std::greater<>());
    const double cell = f.grid().cell_measure();
    double best = 0.0;
    for (std::size_t k = 0; k < mod.size() && mod[k] > 0.0; ++k)
        best = std::max(best, std::pow(static_cast<double>(k + 1) * cell, 1.0 / r) * mod[k]);
    return best;
}

inline double norm(const GridField& f, Norm n) {
    if (n.kind != Norm::Kind::sup && !(n.r >= 1.0)) throw DomainError("norm exponent r < 1");
    f.require_finite("norm");
    switch (n.kind) {
        case Norm::Kind::sup: return sup_norm(f);
        case Norm::Kind::weak_lp: return weak_lp_norm(f, n.r);
        case Norm::Kind::lp: break;
    }
    return lp_norm(f, n.r);
}

}  // namespace nlsdiag
