#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlsdiag/errors.hpp"

namespace nlsdiag {

/// Predicted divergence rate: tau^{1-dp/2} for p < 2/d, log tau at p = 2/d.
inline double alpha(double tau, double p, int d) {
    if (!(tau >= 2.0)) throw DomainError("alpha requires tau >= 2");
    if (!(p > 0.0)) throw DomainError("alpha requires p > 0");
    const double critical = 2.0 / d;
    if (std::abs(p - critical) <= 1e-12 * critical) return std::log(tau);
    if (p > critical) throw DomainError("alpha is defined for long-range p <= 2/d only");
    return std::pow(tau, 1.0 - 0.5 * d * p);
}

/// True when (p, d) sits on the logarithmic boundary p = 2/d.
inline bool alpha_is_logarithmic(double p, int d) {
    return std::abs(p - 2.0 / d) <= 1e-12 * (2.0 / d);
}

enum class GrowthModel { power_law, logarithmic, constant };

inline std::string to_string(GrowthModel m) {
    switch (m) {
        case GrowthModel::power_law: return "power_law";
        case GrowthModel::logarithmic: return "logarithmic";
        case GrowthModel::constant: return "constant";
    }
    return "?";
}

/**
 * One fitted model. power_law: y = coefficient * t^exponent (or, in offset
 * mode, y = intercept + coefficient (t^exponent - 1)/exponent); logarithmic:
 * y = intercept + coefficient log t; constant: y = intercept.
 * goodness is R^2 of the fitted curve in y, for every model.
 */
struct ModelFit {
    GrowthModel model = GrowthModel::power_law;
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double coefficient = std::numeric_limits<double>::quiet_NaN();
    double intercept = 0.0;
    double goodness = std::numeric_limits<double>::quiet_NaN();
};

struct GrowthFit {
    GrowthModel model = GrowthModel::power_law;
    double exponent = std::numeric_limits<double>::quiet_NaN();  // power_law only
    double coefficient = std::numeric_limits<double>::quiet_NaN();
    double goodness = std::numeric_limits<double>::quiet_NaN();
    double t_min = 0.0, t_max = 0.0;
    std::vector<ModelFit> candidates;
    std::vector<std::string> warnings;
    bool offset = false;
};

struct GrowthFitOptions {
    std::vector<GrowthModel> models{GrowthModel::power_law, GrowthModel::logarithmic, GrowthModel::constant};
    /// Fit the exponent of y = a + C (t^b - 1)/b (log t is the b -> 0 member)
    /// instead of a log-log regression. Suited to integrals started at t = 1.
    bool offset = false;
    /// Offset mode: |b| at or below this selects the logarithmic model.
    double log_tolerance = 0.1;
    /// Relative spread (max - min)/max|y| below which the constant model wins.
    double constant_tolerance = 0.02;
};

namespace detail {

struct Line {
    double slope, intercept;
};

inline Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx};
}

inline double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    double my = 0;
    for (double v : y) my += v;
    my /= static_cast<double>(y.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

// (t^b - 1)/b, continuous at b = 0.
inline double box_cox(double t, double b) {
    const double l = std::log(t);
    return std::abs(b * l) < 1e-8 ? l * (1.0 + 0.5 * b * l) : std::expm1(b * l) / b;
}

inline ModelFit fit_box_cox(const std::vector<double>& t, const std::vector<double>& y, double b) {
    std::vector<double> x(t.size()), yhat(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = box_cox(t[i], b);
    const Line line = least_squares(x, y);
    for (std::size_t i = 0; i < t.size(); ++i) yhat[i] = line.intercept + line.slope * x[i];
    return {GrowthModel::power_law, b, line.slope, line.intercept, r_squared(y, yhat)};
}

}  // namespace detail

inline GrowthFit growth_fit(const std::vector<double>& t, const std::vector<double>& y,
                            const GrowthFitOptions& opt = {}) {
    if (t.size() != y.size()) throw DomainError("growth_fit: t and y differ in length");
    if (t.size() < 10) throw DomainError("growth_fit needs at least 10 points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !std::isfinite(y[i])) throw DomainError("growth_fit: t must be positive, y finite");
        if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("growth_fit: t must be increasing");
    }
    if (t.back() < 10.0 * t.front() * (1.0 - 1e-12)) throw DomainError("growth_fit: range spans less than one decade");

    GrowthFit out;
    out.t_min = t.front();
    out.t_max = t.back();
    out.offset = opt.offset;
    auto wants = [&](GrowthModel m) { return std::find(opt.models.begin(), opt.models.end(), m) != opt.models.end(); };

    std::vector<double> logt(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) logt[i] = std::log(t[i]);

    if (wants(GrowthModel::power_law)) {
        if (opt.offset) {
            auto neg_r2 = [&](double b) { return -detail::fit_box_cox(t, y, b).goodness; };
            // Coarse scan, then Brent refinement around the best cell.
            double best_b = 0.0, best = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 120; ++k) {
                const double b = -1.0 + 3.0 * k / 120.0;
                const double v = neg_r2(b);
                if (v < best) {
                    best = v;
                    best_b = b;
                }
            }
            const auto r = boost::math::tools::brent_find_minima(neg_r2, best_b - 0.025, best_b + 0.025, 50);
            out.candidates.push_back(detail::fit_box_cox(t, y, r.first));
        } else {
            std::vector<double> lx, ly;
            std::size_t dropped = 0;
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (y[i] > 0.0) {
                    lx.push_back(logt[i]);
                    ly.push_back(std::log(y[i]));
                } else {
                    ++dropped;
                }
            }
            if (dropped > 0)
                out.warnings.push_back("power_law: dropped " + std::to_string(dropped) + " nonpositive values");
            if (lx.size() >= 2) {
                const auto line = detail::least_squares(lx, ly);
                const double c = std::exp(line.intercept);
                std::vector<double> yhat(t.size());
                for (std::size_t i = 0; i < t.size(); ++i) yhat[i] = c * std::pow(t[i], line.slope);
                out.candidates.push_back({GrowthModel::power_law, line.slope, c, 0.0, detail::r_squared(y, yhat)});
            }
        }
    }
    if (wants(GrowthModel::logarithmic)) {
        const auto line = detail::least_squares(logt, y);
        std::vector<double> yhat(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) yhat[i] = line.intercept + line.slope * logt[i];
        out.candidates.push_back({GrowthModel::logarithmic, std::numeric_limits<double>::quiet_NaN(), line.slope,
                                  line.intercept, detail::r_squared(y, yhat)});
    }
    double ymax = 0.0, ylo = y.front(), yhi = y.front(), ymean = 0.0;
    for (double v : y) {
        ymax = std::max(ymax, std::abs(v));
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
        ymean += v;
    }
    ymean /= static_cast<double>(y.size());
    const double spread = ymax > 0.0 ? (yhi - ylo) / ymax : 0.0;
    if (wants(GrowthModel::constant)) {
        std::vector<double> yhat(t.size(), ymean);
        out.candidates.push_back({GrowthModel::constant, std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(), ymean, detail::r_squared(y, yhat)});
    }
    if (out.candidates.empty()) throw DomainError("growth_fit: no candidate model could be fitted");

    auto find = [&](GrowthModel m) -> const ModelFit* {
        for (const auto& c : out.candidates)
            if (c.model == m) return &c;
        return nullptr;
    };
    const ModelFit* chosen = nullptr;
    if (find(GrowthModel::constant) && spread <= opt.constant_tolerance) {
        chosen = find(GrowthModel::constant);
    } else if (opt.offset && find(GrowthModel::power_law)) {
        const ModelFit* pl = find(GrowthModel::power_law);
        chosen = (std::abs(pl->exponent) <= opt.log_tolerance && find(GrowthModel::logarithmic))
                     ? find(GrowthModel::logarithmic)
                     : pl;
    } else {
        for (const auto& c : out.candidates) {
            if (c.model == GrowthModel::constant) continue;
            if (!chosen || c.goodness > chosen->goodness) chosen = &c;
        }
        if (!chosen) chosen = &out.candidates.front();
    }
    out.model = chosen->model;
    out.exponent = chosen->exponent;
    out.coefficient = chosen->model == GrowthModel::constant ? chosen->intercept : chosen->coefficient;
    out.goodness = chosen->goodness;
    return out;
}

}  // namespace nlsdiag
