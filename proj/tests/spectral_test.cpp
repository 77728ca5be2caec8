#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlsdiag/spectral.hpp"
#include "test_support.hpp"

using namespace nlsdiag;
using namespace nlsdiag::testing;

namespace {

const double kPi = std::numbers::pi;

TEST(SpatialGrid, RejectsBadSizes) {
    EXPECT_THROW(SpatialGrid(1, 6, 10.0), ConfigError);
    EXPECT_THROW(SpatialGrid(1, 4, 10.0), ConfigError);
    EXPECT_THROW(SpatialGrid(3, 8, 10.0), ConfigError);
    EXPECT_THROW(SpatialGrid(1, 8, -1.0), ConfigError);
}

TEST(SpatialGrid, FrequencySetIsSymmetricUpToNyquist) {
    SpatialGrid g(1, 16, 8.0);
    const SpatialGrid f = g.dual();
    EXPECT_DOUBLE_EQ(g.spacing() * 16, 8.0);
    EXPECT_NEAR(f.spacing(), 2 * kPi / 8.0, 1e-15);
    EXPECT_NEAR(f.coordinate(0, 0), -8 * 2 * kPi / 8.0, 1e-13);
    for (std::size_t k = 1; k < 16; ++k)
        EXPECT_NEAR(f.coordinate(0, k), -f.coordinate(0, 16 - k), 1e-13);
}

TEST(ForwardTransform, DiscreteDeltaHasFlatSpectrum) {
    SpatialGrid g(1, 64, 10.0);
    GridField f = GridField::zeros(g);
    f[17] = 1.0;
    const GridField fh = forward_transform(f);
    const double m = std::abs(fh[0]);
    for (auto z : fh.values()) EXPECT_NEAR(std::abs(z), m, 1e-14);
}

TEST(ForwardTransform, GaussianMatchesClosedForm) {
    SpatialGrid g(1, 1024, 80.0);
    const GridField fh = forward_transform(gaussian(g));
    EXPECT_EQ(fh.space(), Space::frequency);
    double err = 0.0;
    for (std::size_t k = 0; k < fh.size(); ++k) {
        const double xi = fh.grid().coordinate(0, k);
        err = std::max(err, std::abs(fh[k] - std::exp(-xi * xi / 2)));
    }
    EXPECT_LE(err, 1e-10);
}

TEST(ForwardTransform, PlaneWaveConcentratesInOneBin) {
    SpatialGrid g(1, 256, 20.0);
    const double xi5 = 5 * 2 * kPi / 20.0;
    const GridField f = GridField::sample(g, [&](const Vec& x) { return std::polar(1.0, x[0] * xi5); });
    const GridField fh = forward_transform(f);
    const std::size_t bin = 128 + 5;
    EXPECT_GT(std::abs(fh[bin]), 1.0);
    for (std::size_t k = 0; k < fh.size(); ++k)
        if (k != bin) EXPECT_LE(std::abs(fh[k]), 1e-12);
}

TEST(ForwardTransform, RejectsNonFinite) {
    SpatialGrid g(1, 8, 1.0);
    GridField f = GridField::zeros(g);
    f[3] = std::nan("");
    EXPECT_THROW(forward_transform(f), DataIntegrityError);
}

TEST(ForwardTransform, ParsevalAndRoundTrip) {
    for (int d = 1; d <= 2; ++d) {
        SpatialGrid g(d, d == 1 ? 512 : 64, 13.0);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const GridField f = random_field(g, seed);
            const GridField fh = forward_transform(f);
            EXPECT_NEAR(l2_norm(fh), l2_norm(f), 1e-12 * l2_norm(f));
            const GridField back = inverse_transform(fh);
            EXPECT_TRUE(back.grid() == g);
            EXPECT_LE(rel_l2_diff(back, f), 1e-12);
        }
    }
}

TEST(FreePropagate, ZeroTimeIsIdentity) {
    SpatialGrid g(1, 64, 10.0);
    const GridField f = random_field(g, 3);
    const GridField u = free_propagate(f, 0.0);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(u[j], f[j]);
}

TEST(FreePropagate, GaussianMatchesPeriodizedClosedForm) {
    // The periodic box evolves the periodization of the data, so the oracle is
    // the method-of-images sum of the continuum solution.
    SpatialGrid g(1, 1024, 80.0);
    const GridField f = gaussian(g);
    for (double t : {0.5, 2.0, 10.0}) {
        const GridField u = free_propagate(f, t);
        const GridField exact = GridField::sample(
            g, [&](const Vec& x) { return free_gaussian_periodic_1d(x[0], t, 80.0); });
        EXPECT_LE(rel_l2_diff(u, exact), 1e-8) << "t=" << t;
    }
}

TEST(FreePropagate, PreservesNormAndComposes) {
    SpatialGrid g(2, 64, 9.0);
    const GridField f = random_field(g, 11);
    const GridField a = free_propagate(free_propagate(f, 0.3), 1.1);
    const GridField b = free_propagate(f, 1.4);
    EXPECT_NEAR(l2_norm(a), l2_norm(f), 1e-12 * l2_norm(f));
    EXPECT_LE(rel_l2_diff(a, b), 1e-12);
}

TEST(FreePropagate, RealMultipliersAreSelfAdjointIncludingNyquist) {
    SpatialGrid g(1, 32, 5.0);
    const GridField f = random_field(g, 1), h = random_field(g, 2);
    auto m = [](const Vec& xi) { return complex(1.0 + xi[0] * xi[0] + 0.3 * xi[0]); };
    const complex lhs = inner(apply_multiplier(f, m), h);
    const complex rhs = inner(f, apply_multiplier(h, m));
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12 * std::abs(lhs));
}

TEST(FreePropagate, DispersiveDecayOfNarrowGaussian) {
    // t^{1/2} sup|e^{itD} f| settles once 4t^2 >> sigma^4; sigma = 1/2 gets
    // there by t = 1. Box sized so images stay below the tolerance at t = 50.
    SpatialGrid g(1, 4096, 1024.0);
    const GridField f = gaussian(g, 0.5);
    std::vector<double> scaled;
    for (double t : geomspace(1.0, 50.0, 12)) scaled.push_back(std::sqrt(t) * sup_norm(free_propagate(f, t)));
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    EXPECT_LE((*hi - *lo) / *hi, 0.02);
}

TEST(Modulate, InverseAndModulus) {
    SpatialGrid g(2, 32, 6.0);
    const GridField f = random_field(g, 5);
    const GridField m = modulate(f, 0.7, +1);
    const GridField back = modulate(m, 0.7, -1);
    for (std::size_t j = 0; j < f.size(); ++j) {
        EXPECT_NEAR(std::abs(m[j]), std::abs(f[j]), 1e-15);
        EXPECT_NEAR(std::abs(back[j] - f[j]), 0.0, 1e-15);
    }
    EXPECT_THROW(modulate(f, 0.0, 1), DomainError);
}

TEST(Modulate, L1DefectDecaysLikeInverseTime) {
    SpatialGrid g(1, 2048, 80.0);
    const GridField phi = gaussian(g);
    std::vector<double> ts = geomspace(1.0, 100.0, 15), vals;
    for (double t : ts) {
        const GridField d = modulate(phi, t, +1) - phi;
        const double val = lp_norm(d, 1.0);
        // |e^{i theta} - 1| <= |theta|, theta = x^2/4t.
        double bound = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            bound += g.radius_squared(j) / (4 * t) * std::abs(phi[j]) * g.spacing();
        EXPECT_LE(val, bound * (1 + 1e-12));
        vals.push_back(val);
    }
    EXPECT_NEAR(loglog_slope(ts, vals), -1.0, 0.1);
}

TEST(TildeTransform, IsometryAndHalfTimeIdentity) {
    SpatialGrid g(1, 256, 30.0);
    const GridField u = random_field(g, 9);
    const GridField ut = tilde_transform(u, 3.7);
    EXPECT_NEAR(ut.grid().spacing(), g.spacing() / 7.4, 1e-15);
    EXPECT_NEAR(l2_norm(ut), l2_norm(u), 1e-12 * l2_norm(u));

    const GridField half = tilde_transform(u, 0.5);
    EXPECT_TRUE(half.grid() == g);
    const complex sqrt_i = std::polar(1.0, kPi / 4);
    for (std::size_t j = 0; j < u.size(); ++j)
        EXPECT_NEAR(std::abs(half[j] - sqrt_i * std::polar(1.0, -g.radius_squared(j) / 2) * u[j]), 0.0,
                    1e-14);
    EXPECT_THROW(tilde_transform(u, 0.0), DomainError);

    const GridField back = untilde_transform(ut, 3.7, g);
    EXPECT_LE(rel_l2_diff(back, u), 1e-14);
}

TEST(TildeTransform, FreeEvolutionMapsToTransformOfModulatedData) {
    SpatialGrid g(1, 1024, 80.0);
    const GridField phi = gaussian(g, 1.0, {0.5, 0.0});
    const double t = 1.3;
    const GridField ut = tilde_transform(free_propagate(phi, t), t);
    // Oracle: direct quadrature of F M phi at each rescaled grid point.
    const GridField mphi = modulate(phi, t, +1);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < g.size(); k += 7) {
        const complex ref = fourier_at(mphi, ut.grid().point(k));
        num += std::norm(ut[k] - ref);
        den += std::norm(ref);
    }
    EXPECT_LE(std::sqrt(num / den), 1e-6);
}

TEST(DirectTransform, AgreesWithFftOnDualGrid) {
    for (int d = 1; d <= 2; ++d) {
        SpatialGrid g(d, d == 1 ? 128 : 32, 11.0);
        const GridField f = random_field(g, 21);
        const GridField a = forward_transform(f);
        const GridField b = direct_transform(f, g.dual());
        EXPECT_LE(rel_l2_diff(b, a), 1e-12);
    }
}

TEST(Norms, IndicatorAndConstant) {
    SpatialGrid g(1, 64, 16.0);
    GridField f = GridField::zeros(g);
    for (std::size_t j = 10; j < 17; ++j) f[j] = 1.0;
    for (double r : {1.0, 2.0, 3.5}) EXPECT_NEAR(norm(f, Norm::lp(r)), std::pow(7 * 0.25, 1 / r), 1e-14);
    const GridField c = GridField::sample(g, [](const Vec&) { return complex(0.3, -0.4); });
    EXPECT_DOUBLE_EQ(norm(c, Norm::sup()), 0.5);
    EXPECT_DOUBLE_EQ(norm(c, Norm::lp(INFINITY)), 0.5);
    EXPECT_THROW(norm(c, Norm::lp(0.5)), DomainError);
    EXPECT_THROW(norm(c, Norm::weak(1.0)), DomainError);
}

TEST(Norms, WeakL2OfInverseSquareRoot) {
    // |{|x|^{-1/2} > s}| = 2 s^{-2}, so the continuum weak-L^2 norm is sqrt(2).
    SpatialGrid g(1, 4096, 20.0);
    const GridField f = GridField::sample(g, [](const Vec& x) {
        return x[0] == 0.0 ? complex(0.0) : complex(1.0 / std::sqrt(std::abs(x[0])));
    });
    EXPECT_NEAR(norm(f, Norm::weak(2.0)), std::sqrt(2.0), 0.05 * std::sqrt(2.0));
}

TEST(VerifyFactorization, GaussianOneDimension) {
    SpatialGrid g(1, 1024, 80.0);
    const GridField phi = gaussian(g);
    EXPECT_LE(verify_factorization(phi, 1.0), 1e-6);
    const double base = verify_factorization(phi, 1.0);
    const double rotated = verify_factorization(std::polar(1.0, 0.83) * phi, 1.0);
    EXPECT_NEAR(rotated, base, 1e-12);
    EXPECT_THROW(verify_factorization(phi, -1.0), DomainError);
}

TEST(VerifyFactorization, TensorGaussianTwoDimensions) {
    SpatialGrid g(2, 256, 48.0);
    EXPECT_LE(verify_factorization(gaussian(g), 2.0), 1e-5);
}

}  // namespace
