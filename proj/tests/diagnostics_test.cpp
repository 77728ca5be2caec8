#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlsdiag/diagnostics.hpp"
#include "test_support.hpp"

using namespace nlsdiag;
namespace oracle = nlsdiag::testing;

namespace {

const NonlinearitySpec::Kind kPower = NonlinearitySpec::Kind::power;
const NonlinearitySpec::Kind kHartree = NonlinearitySpec::Kind::hartree;

// <F(u~), w~> on the rescaled grid, with w~ = F M phi by direct quadrature.
complex tilde_main_direct(const GridField& u, const GridField& phi, double t, const NonlinearitySpec& nl) {
    const GridField ut = tilde_transform(u, t);
    const GridField wh = direct_transform(modulate(phi, t, +1), ut.grid());
    const GridField wt(ut.grid(), std::vector<complex>(wh.values().begin(), wh.values().end()));
    return inner(apply_nonlinearity(ut, nl), wt);
}

LocalizedComponent traveling(LocalizedProfile p, double width, double v, complex amp = 1.0) {
    LocalizedComponent c;
    c.profile = p;
    c.width = width;
    c.amplitude = amp;
    c.path = Path::linear({0.0, 0.0}, {v, 0.0});
    return c;
}

}  // namespace

TEST(Pairing, FreeFlowIsConstant) {
    SpatialGrid g(1, 512, 60.0);
    const GridField phi = oracle::gaussian(g, 1.2, {1.0, 0.0}, {0.3, 0.8});
    const double n2 = mass(phi);
    for (double t : {0.0, 0.7, 5.0}) {
        const complex p = pairing(free_propagate(phi, t), phi, t);
        EXPECT_NEAR(std::abs(p - n2), 0.0, 1e-12) << t;
    }
}

TEST(Pairing, DisjointSupportsAndCauchySchwarz) {
    SpatialGrid g(1, 256, 20.0);
    GridField a = GridField::zeros(g), b = GridField::zeros(g);
    for (std::size_t j = 0; j < 100; ++j) a[j] = {1.0, 0.5};
    for (std::size_t j = 150; j < 256; ++j) b[j] = {0.2, -1.0};
    EXPECT_EQ(pairing(a, b, 0.0), complex(0.0, 0.0));
    for (std::uint64_t s = 0; s < 10; ++s) {
        const GridField u = oracle::random_field(g, s), p = oracle::random_field(g, s + 100);
        EXPECT_LE(std::abs(pairing(u, p, 0.3 * s)), l2_norm(u) * l2_norm(p));
    }
    EXPECT_THROW(pairing(a, GridField::zeros(SpatialGrid(1, 128, 20.0)), 1.0), GridMismatchError);
}

TEST(MainTerm, ZeroAndDomain) {
    SpatialGrid g(1, 64, 10.0);
    const GridField phi = oracle::gaussian(g);
    EXPECT_EQ(main_term(GridField::zeros(g), phi, 1.0, {kPower, 0.5, 1.0}), complex(0.0, 0.0));
    EXPECT_THROW(main_term(phi, phi, 0.0, {kPower, 0.5, 1.0}), DomainError);
}

TEST(MainTerm, MatchesRescaledGridEvaluation) {
    SpatialGrid g(1, 512, 40.0);
    const GridField phi = oracle::gaussian(g, 1.0, {0.5, 0.0}, {1.0, 0.3});
    const GridField u = free_propagate(oracle::gaussian(g, 1.4, {-1.0, 0.0}, 0.9), 2.0) +
                        oracle::gaussian(g, 0.8, {3.0, 0.0}, 0.4);
    for (const NonlinearitySpec& nl : {NonlinearitySpec{kPower, 0.5, {1.0, -0.5}}, NonlinearitySpec{kHartree, 0.7, {-1.0, 0.0}}}) {
        const complex a = main_term(u, phi, 2.0, nl);
        const complex b = tilde_main_direct(u, phi, 2.0, nl);
        EXPECT_LT(std::abs(a - b), 1e-8 * std::abs(b)) << to_string(nl.kind);
    }
    SpatialGrid g2(2, 64, 24.0);
    const GridField phi2 = oracle::gaussian(g2, 1.0, {0.5, -0.5});
    const GridField u2 = free_propagate(oracle::gaussian(g2, 1.2), 1.0);
    for (const NonlinearitySpec& nl : {NonlinearitySpec{kPower, 0.5, 1.0}, NonlinearitySpec{kHartree, 1.0, 1.0}}) {
        const complex a = main_term(u2, phi2, 1.0, nl);
        const complex b = tilde_main_direct(u2, phi2, 1.0, nl);
        EXPECT_LT(std::abs(a - b), 1e-8 * std::abs(b)) << to_string(nl.kind);
    }
}

TEST(MainTerm, ExactProfileStateApproachesLimit) {
    SpatialGrid g(1, 4096, 1024.0);
    const double t = 50.0;
    const NonlinearitySpec nl{kPower, 0.5, 1.0};
    const GridField vplus = oracle::gaussian(g, 1.5);
    const TestFunction tf = choose_test_function(vplus, nl, 100.0);
    // u = M D v+^ exactly: u~ equals v+^ sampled on the rescaled grid.
    const GridField vh = direct_transform(vplus, tilde_grid(g, t));
    const GridField u = untilde_transform(GridField(vh.grid(), std::vector<complex>(vh.values().begin(), vh.values().end())), t, g);
    const complex m = main_term(u, tf.phi, t, nl);
    const complex lim = main_term_limit(vplus, tf.phi, nl);
    EXPECT_LT(std::abs(m - lim), 0.01 * std::abs(lim));
}

TEST(MainTermLimit, PowerGaussianOracle) {
    SpatialGrid g(1, 1024, 80.0);
    const double sigma = 1.5, p = 0.5;
    const GridField vplus = oracle::gaussian(g, sigma);
    EXPECT_EQ(main_term_limit(GridField::zeros(g), vplus, {kPower, p, 1.0}), complex(0.0, 0.0));
    // phi^ = v+^ = sigma exp(-sigma^2 xi^2 / 2).
    const complex mu{0.6, -0.8};
    const complex got = main_term_limit(vplus, vplus, {kPower, p, mu});
    const double integral = std::pow(sigma, p + 2) * std::sqrt(2.0 * std::numbers::pi / ((p + 2) * sigma * sigma));
    EXPECT_GT((got / mu).real(), 0.0);
    EXPECT_LT(std::abs(got - mu * integral), 1e-8 * integral);
}

TEST(MainTermLimit, HartreeAtomCorrection) {
    SpatialGrid g(1, 512, 80.0);
    const GridField vplus = oracle::gaussian(g, 2.0);
    const GridField phi = oracle::gaussian(g, 1.5, {0.3, 0.0});
    const NonlinearitySpec nl{kHartree, 0.6, {1.0, 0.5}};
    LocalizedPathSpec l{{traveling(LocalizedProfile::gaussian, 1.0, 3.3, 0.7)}};
    const complex base = main_term_limit(vplus, phi, nl);
    const complex with = main_term_limit(vplus, phi, nl, &l);
    // Point-mass convolution is kernel evaluation: mu m <K(. - y) v+^, phi^>.
    const GridField vh = forward_transform(vplus), ph = forward_transform(phi);
    const double m = l.components[0].mass(1), y = 1.65, s = 0.3;
    // The grid point sharing a cell with the atom takes the cell average of K.
    const double h = vh.grid().spacing();
    complex direct{0.0, 0.0};
    for (std::size_t k = 0; k < vh.size(); ++k) {
        const double z = std::abs(vh.grid().min_image(vh.grid().point(k), {y, 0.0})[0]);
        const double kz = z < 0.5 * h ? std::pow(0.5 * h, -s) / (1.0 - s) : std::pow(z, -s);
        direct += kz * vh[k] * std::conj(ph[k]);
    }
    direct *= nl.mu * m * vh.grid().cell_measure();
    EXPECT_LT(std::abs((with - base) - direct), 1e-8 * std::abs(direct));
}

TEST(PotentialTerm, ZeroPotential) {
    SpatialGrid g(1, 128, 20.0);
    const GridField u = oracle::gaussian(g);
    const auto pt = potential_term(u, {}, u, 1.0, {kPower, 0.5, 1.0});
    EXPECT_EQ(pt.value, complex(0.0, 0.0));
    EXPECT_EQ(pt.v1_bound.value(), 0.0);
}

TEST(PotentialTerm, HoelderBoundAndDecay) {
    SpatialGrid g(1, 4096, 2048.0);
    PotentialSpec pot;
    pot.components.push_back({PotentialProfile::gaussian_well, -2.0, Path::fixed({0.0, 0.0}), 1.0});
    const NonlinearitySpec nl{kPower, 0.5, 1.0};
    const GridField psi = oracle::gaussian(g, 1.0, {0.0, 0.0}, 1.0);
    const GridField phi = oracle::gaussian(g, 1.3, {0.5, 0.0});
    std::vector<double> ts = oracle::geomspace(1.0, 100.0, 25), mags;
    for (double t : ts) {
        const auto pt = potential_term(free_propagate(psi, t), pot, phi, t, nl);
        ASSERT_TRUE(pt.v1_bound);
        EXPECT_LE(std::abs(pt.v1_value), *pt.v1_bound) << t;
        mags.push_back(std::abs(pt.value));
    }
    EXPECT_LE(oracle::loglog_slope(ts, mags), -0.25 - 0.05);
    const auto refused = potential_term(psi, pot, phi, 1.0, {kPower, 1.0, 1.0});
    EXPECT_FALSE(refused.v1_bound);
    EXPECT_FALSE(refused.note.empty());
}

TEST(PotentialTerm, AtomWindowSumsDecay) {
    SpatialGrid g(1, 4096, 1024.0);
    PotentialSpec pot;
    pot.atoms.push_back({{0.0, 0.0}, 1.0});
    LocalizedComponent bound = traveling(LocalizedProfile::bound_state, 2.0, 0.0);
    bound.boost = false;
    LocalizedPathSpec l{{bound}};
    const GridField vplus = oracle::gaussian(g, 1.0);
    const GridField phi = oracle::gaussian(g, 1.0, {0.4, 0.0});
    const NonlinearitySpec nl{kPower, 0.5, 1.0};
    std::vector<double> t0s{5, 10, 20, 40, 80}, sums, bounds;
    for (double t0 : t0s) {
        std::vector<double> ts, vals;
        std::vector<Snapshot> snaps;
        for (int k = 0; k <= 20; ++k) {
            const double t = t0 + 0.1 * k;
            const GridField u = synth_state(l, vplus, t, g);
            ts.push_back(t);
            vals.push_back(std::abs(potential_term(u, pot, phi, t, nl).v2_value));
            snaps.push_back({t, u});
        }
        sums.push_back(window_integral(ts, vals, t0, 2.0));
        bounds.push_back(v2_window_estimate(snaps, pot, phi, t0, 2.0));
        EXPECT_LE(sums.back(), bounds.back());
    }
    EXPECT_NEAR(oracle::loglog_slope(t0s, sums), -0.5, 0.15);
}

TEST(DerivativeCheck, LinearFlowHasNoDefect) {
    SpatialGrid g(1, 256, 40.0);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.5;
    for (int k = 1; k <= 50; ++k) cfg.snapshot_times.push_back(0.01 * k);
    const NonlinearitySpec nl{kPower, 0.5, 0.0};
    const Trajectory tr = evolve(oracle::gaussian(g), cfg, nl, {});
    EXPECT_LE(derivative_check(tr, oracle::gaussian(g, 1.0, {1.0, 0.0}), nl, {}).max_defect, 1e-8);
}

TEST(DerivativeCheck, PowerCaseSecondOrder) {
    SpatialGrid g(1, 512, 40.0);
    const NonlinearitySpec nl{kPower, 0.5, {1.0, 0.0}};
    PotentialSpec pot;
    pot.components.push_back({PotentialProfile::gaussian_well, -0.5, Path::fixed({1.0, 0.0}), 1.5});
    const GridField u0 = oracle::gaussian(g, 1.0, {0.0, 0.0}, 1.0);
    const GridField phi = oracle::gaussian(g, 1.0, {0.5, 0.0});
    auto run = [&](double delta) {
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        const int m = static_cast<int>(std::lround(1.0 / delta));
        for (int k = 1; k <= m; ++k) cfg.snapshot_times.push_back(delta * k);
        return derivative_check(evolve(u0, cfg, nl, pot), phi, nl, pot, 4);
    };
    const auto coarse = run(0.02);
    const auto fine = run(0.01);
    EXPECT_LE(fine.max_defect, 1e-4 * fine.max_pairing);
    EXPECT_NEAR(coarse.max_defect / fine.max_defect, 4.0, 1.0);
}

TEST(Residual, SyntheticStateAndModulation) {
    SpatialGrid g(1, 4096, 2048.0);
    LocalizedPathSpec l{{traveling(LocalizedProfile::sech, 1.0, 4.0)}};
    const GridField vplus = oracle::gaussian(g, 1.0, {0.0, 0.0}, {0.6, 0.2});
    std::vector<double> ts = oracle::geomspace(1.0, 100.0, 20), mods;
    for (double t : ts) {
        const GridField u = synth_state(l, vplus, t, g);
        const auto r = residual_decomposition(u, &l, vplus, t);
        EXPECT_LE(r.resid, 1e-12 * l2_norm(u));
        mods.push_back(r.mod_resid);
    }
    EXPECT_NEAR(oracle::loglog_slope(ts, mods), -1.0, 0.1);
}

TEST(Residual, TildeFrameTriangle) {
    SpatialGrid g(1, 1024, 160.0);
    LocalizedPathSpec l{{traveling(LocalizedProfile::gaussian, 1.0, 2.0)}};
    const GridField vplus = oracle::gaussian(g, 1.0, {0.0, 0.0}, 0.8);
    const double t = 3.0;
    // A perturbed state so the residual is not zero.
    const GridField u = synth_state(l, vplus, t, g) + oracle::gaussian(g, 2.0, {-5.0, 0.0}, 0.01);
    const auto r = residual_decomposition(u, &l, vplus, t);
    const GridField ut = tilde_transform(u.with_time(std::nullopt), t);
    const GridField lt = tilde_transform(sample_localized(l, t, g).field.with_time(std::nullopt), t);
    const GridField vh = direct_transform(vplus, ut.grid());
    const GridField vht(ut.grid(), std::vector<complex>(vh.values().begin(), vh.values().end()));
    EXPECT_LE(l2_norm(ut - vht - lt), r.resid + r.mod_resid + 1e-10);
}

TEST(TestFunction, GaussianIsAligned) {
    SpatialGrid g(1, 1024, 80.0);
    const GridField vplus = oracle::gaussian(g, 1.5, {1.0, 0.0}, {0.5, 0.5});
    const TestFunction tf = choose_test_function(vplus, {kPower, 0.5, 1.0}, 1e6);
    const GridField vh = forward_transform(vplus);
    const complex c = inner(tf.phi_hat, vh) / (l2_norm(tf.phi_hat) * l2_norm(vh));
    EXPECT_GT(c.real(), 0.999);
    EXPECT_GT(tf.positivity.real(), 0.0);
    EXPECT_LT(std::abs(tf.positivity.imag()), 1e-10 * tf.positivity.real());
}

TEST(TestFunction, SignAlternatingProfile) {
    SpatialGrid g(1, 1024, 80.0);
    const GridField vplus = GridField::sample(g, [](const Vec& x) {
        return x[0] * std::exp(-x[0] * x[0] / 2) + 0.5 * std::exp(-x[0] * x[0] / 8) * std::cos(2 * x[0]);
    });
    for (double level : {1e3, 0.3}) {
        const TestFunction tf = choose_test_function(vplus, {kPower, 0.5, 1.0}, level);
        EXPECT_GT(tf.positivity.real(), 0.0) << level;
    }
}

TEST(TestFunction, HartreeTruncation) {
    SpatialGrid g(1, 512, 40.0);
    const GridField vplus = oracle::gaussian(g, 1.0, {0.0, 0.0}, 2.0);
    const double peak = sup_norm(forward_transform(vplus));
    const TestFunction tf = choose_test_function(vplus, {kHartree, 0.5, 1.0}, 0.5 * peak);
    ASSERT_TRUE(tf.truncated);
    EXPECT_EQ(tf.cross_term_residual, 0.0);
    EXPECT_GT(tf.positivity.real(), 0.0);
    EXPECT_THROW(choose_test_function(vplus, {kHartree, 0.5, 1.0}, 1e-30), LevelError);
    EXPECT_THROW(choose_test_function(GridField::zeros(g), {kPower, 0.5, 1.0}, 1.0), DomainError);
}

TEST(Glassey, LinearTrajectoryIntegralVanishes) {
    SpatialGrid g(1, 256, 40.0);
    const GridField v = oracle::gaussian(g);
    SeriesInputs in;
    in.phi = &v;
    in.nl = {kPower, 0.5, 0.0};
    const auto times = oracle::geomspace(1.0, 20.0, 15);
    const PairingSeries s = build_series(times, [&](double t) { return free_propagate(v, t); }, in);
    EXPECT_TRUE(s.bounded());
    for (double tau : {2.0, 10.0, 20.0}) EXPECT_LE(std::abs(glassey_integral(s, tau).value), 1e-6);
    EXPECT_THROW(glassey_integral(s, 40.0), RangeError);
}

TEST(Glassey, SeriesIsThreadCountIndependent) {
    SpatialGrid g(1, 512, 80.0);
    const GridField v = oracle::gaussian(g, 1.5);
    const TestFunction tf = choose_test_function(v, {kPower, 0.5, 1.0}, 100.0);
    SeriesInputs in;
    in.phi = &tf.phi;
    in.nl = {kPower, 0.5, {1.0, 1.0}};
    in.v_plus = &v;
    const auto times = oracle::geomspace(1.0, 10.0, 12);
    auto state = [&](double t) { return free_propagate(v, t); };
    const PairingSeries a = build_series(times, state, in);
    in.threads = 4;
    const PairingSeries b = build_series(times, state, in);
    for (std::size_t i = 0; i < times.size(); ++i) {
        ASSERT_EQ(a.rows[i].pairing, b.rows[i].pairing);
        ASSERT_EQ(*a.rows[i].main, *b.rows[i].main);
    }
}

TEST(Glassey, SyntheticLongRangeGrowth) {
    SpatialGrid g(1, 4096, 2048.0);
    const NonlinearitySpec nl{kPower, 0.5, {0.0, 1.0}};
    const GridField v = oracle::gaussian(g, 2.0);
    const TestFunction tf = choose_test_function(v, nl, 100.0);
    SeriesInputs in;
    in.phi = &tf.phi;
    in.nl = nl;
    in.threads = 4;
    const auto times = oracle::geomspace(1.0, 100.0, 50);
    const PairingSeries s = build_series(times, [&](double t) { return free_propagate(v, t); }, in);
    const GrowthFit f = glassey_growth(s, 10.0, 100.0);
    EXPECT_EQ(f.model, GrowthModel::power_law);
    EXPECT_NEAR(f.exponent, 0.75, 0.1);
    EXPECT_GT(glassey_integral(s, 100.0).value, 0.0);
}
