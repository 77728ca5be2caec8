// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "nlsdiag/nlsdiag.hpp"
#include "test_support.hpp"

using namespace nlsdiag;
namespace oracle = nlsdiag::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

int threads() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

constexpr auto kPower = NonlinearitySpec::Kind::power;
constexpr auto kHartree = NonlinearitySpec::Kind::hartree;

LocalizedComponent moving(LocalizedProfile profile, double width, double v, double c0 = 0.0) {
    LocalizedComponent c;
    c.profile = profile;
    c.width = width;
    c.path = Path::linear({c0, 0.0}, {v, 0.0});
    return c;
}

double rel_l2(const GridField& a, const GridField& b) { return l2_norm(a - b) / l2_norm(b); }

Outcome unitarity() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SpatialGrid g = seed % 4 == 3 ? SpatialGrid(2, 64, 20.0) : SpatialGrid(1, 1024, 80.0);
        const GridField f = oracle::random_field(g, 1000 + seed);
        const double n = l2_norm(f);
        const double t = 0.1 + 0.37 * static_cast<double>(seed);
        worst = std::max({worst, std::abs(l2_norm(forward_transform(f)) - n) / n,
                          std::abs(l2_norm(inverse_transform(forward_transform(f))) - n) / n,
                          std::abs(l2_norm(free_propagate(f, t)) - n) / n, rel_l2(inverse_transform(forward_transform(f)), f)});
    }
    return {worst <= 1e-12, "max relative L2 defect " + num(worst) + " over 100 fields (tol 1e-12)"};
}

Outcome gaussian_oracle() {
    const SpatialGrid g(1, 1024, 80.0);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 10.0;
    const Trajectory lin = evolve(oracle::gaussian(g), cfg, {kPower, 0.5, 0.0}, {});
    const GridField exact = GridField::sample(g, [](const Vec& x) { return oracle::free_gaussian_periodic_1d(x[0], 10.0, 80.0); });
    const double err = rel_l2(lin.snapshots.back().field.with_time(std::nullopt), exact);
    return {err <= 1e-8, "relative L2 error at t = 10: " + num(err) + " (tol 1e-8)"};
}

Outcome factorization() {
    // Per-t grid: the box holds e^{itD} phi without wrap-around, and the tilde
    // grid {x_j/2t} stays inside the alias-free band |xi| < pi/h (L h < 4 pi t).
    auto pow2 = [](double x) { return std::exp2(std::ceil(std::log2(x))); };
    double worst = 0.0;
    std::string each;
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double L = pow2(std::max(40.0, 24.0 * t + 16.0));
        const auto n = static_cast<std::size_t>(pow2(std::max(4.0 * L, L * L / (2.0 * std::numbers::pi * t))));
        const double r = verify_factorization(oracle::gaussian(SpatialGrid(1, n, L)), t);
        worst = std::max(worst, r);
        each += (each.empty() ? "" : " ") + num(r);
    }
    return {worst <= 1e-6, "residuals at t = 0.5,1,2,5,10: " + each + " (tol 1e-6)"};
}

Outcome dispersive_rate() {
    std::string detail;
    bool ok = true;
    const auto ts = oracle::geomspace(1.0, 50.0, 12);
    for (int d : {1, 2}) {
        const SpatialGrid g = d == 1 ? SpatialGrid(1, 4096, 1024.0) : SpatialGrid(2, 1024, 512.0);
        const GridField f = oracle::gaussian(g, d == 1 ? 0.5 : 1.0);
        std::vector<double> sups;
        for (double t : ts) sups.push_back(sup_norm(free_propagate(f, t)));
        const double slope = oracle::loglog_slope(ts, sups);
        ok = ok && std::abs(slope + 0.5 * d) <= 0.05;
        detail += (detail.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + " slope " + num(slope);
    }
    return {ok, detail + " (target -d/2 +- 0.05)"};
}

Outcome hausdorff_young() {
    const SpatialGrid g(1, 4096, 2048.0);
    const double sigma = 1.0;
    const GridField phi = oracle::gaussian(g, sigma);
    const auto ts = oracle::geomspace(1.0, 100.0, 12);
    std::vector<double> defect;
    for (double t : ts) {
        const GridField wt = tilde_transform(free_propagate(phi, t), t);
        double s = 0.0;
        for (std::size_t j = 0; j < wt.size(); ++j) {
            const double xi = wt.grid().point(j)[0];
            s = std::max(s, std::abs(wt[j] - sigma * std::exp(-0.5 * sigma * sigma * xi * xi)));
        }
        defect.push_back(s);
    }
    const double slope = oracle::loglog_slope(ts, defect);
    return {std::abs(slope + 1.0) <= 0.1, "slope of sup|w~ - phi^| " + num(slope) + " (target -1 +- 0.1)"};
}

Outcome derivative_identity() {
    const SpatialGrid g(1, 512, 40.0);
    const NonlinearitySpec nl{kPower, 0.5, {1.0, 0.0}};
    const GridField u0 = oracle::gaussian(g);
    const GridField phi = oracle::gaussian(g, 1.0, {0.5, 0.0});
    auto run = [&](double spacing) {
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        const int m = static_cast<int>(std::lround(1.0 / spacing));
        for (int k = 1; k <= m; ++k) cfg.snapshot_times.push_back(spacing * k);
        return derivative_check(evolve(u0, cfg, nl, {}), phi, nl, {}, threads());
    };
    const auto fine = run(0.01);
    const auto coarse = run(0.02);
    const double rel = fine.max_defect / fine.max_pairing;
    const double order = coarse.max_defect / fine.max_defect;
    return {rel <= 1e-4 && std::abs(order - 4.0) <= 1.0,
            "defect/max|P| " + num(rel) + " (tol 1e-4), refinement ratio " + num(order) + " (4 +- 25%)"};
}

Outcome main_term_limits() {
    const SpatialGrid g(1, 4096, 2048.0);
    const GridField v = oracle::gaussian(g, 2.0);
    const LocalizedPathSpec l{{moving(LocalizedProfile::gaussian, 1.5, 5.0)}};
    const double t = 100.0;
    const GridField u = synth_state(l, v, t, g);
    std::string detail;
    bool ok = true;
    for (auto [kind, tol] : {std::pair{kPower, 0.05}, std::pair{kHartree, 0.08}}) {
        const NonlinearitySpec nl{kind, 0.5, 1.0};
        const TestFunction tf = choose_test_function(v, nl, 100.0);
        std::optional<HartreeKernel> k;
        if (kind == kHartree) k.emplace(g, nl.kernel_exponent(1));
        const complex m = main_term(u, tf.phi, t, nl, k ? &*k : nullptr);
        const complex lim = main_term_limit(v, tf.phi, nl, kind == kHartree ? &l : nullptr);
        const double rel = std::abs(m - lim) / std::abs(lim);
        ok = ok && rel <= tol;
        detail += (detail.empty() ? "" : ", ") + to_string(kind) + " " + num(rel) + " (tol " + num(tol) + ")";
    }
    return {ok, "relative gap at t = 100: " + detail};
}

Outcome growth_dichotomy() {
    struct Case {
        int d;
        double p;
    };
    std::string detail;
    bool ok = true;
    for (const Case c : {Case{1, 0.5}, Case{1, 1.0}, Case{2, 0.5}, Case{1, 2.0}, Case{2, 1.0}}) {
        const SpatialGrid g = c.d == 1 ? SpatialGrid(1, 4096, 2048.0) : SpatialGrid(2, 1024, 1024.0);
        const GridField v = oracle::gaussian(g, 2.0);
        const LocalizedPathSpec l{{moving(LocalizedProfile::gaussian, 1.5, c.d == 1 ? 5.0 : 2.0)}};
        const NonlinearitySpec nl{kPower, c.p, 1.0};
        const TestFunction tf = choose_test_function(v, nl, 100.0);
        SeriesInputs in;
        in.phi = &tf.phi;
        in.nl = nl;
        in.threads = threads();
        const auto times = oracle::geomspace(1.0, 100.0, c.d == 1 ? 60 : 30);
        const PairingSeries s = build_series(times, [&](double t) { return synth_state(l, v, t, g); }, in);
        const GrowthFit f = glassey_growth(s, 10.0, 100.0);
        std::string got = to_string(f.model);
        if (alpha_is_logarithmic(c.p, c.d)) {
            ok = ok && f.model == GrowthModel::logarithmic;
        } else {
            const double target = 1.0 - 0.5 * c.d * c.p;
            ok = ok && f.model == GrowthModel::power_law && std::abs(f.exponent - target) <= 0.1;
            got += " " + num(f.exponent) + " vs " + num(target);
        }
        detail += (detail.empty() ? "" : "; ") + std::string("(") + std::to_string(c.d) + "," + num(c.p) + ") " + got;
    }
    return {ok, detail};
}

Outcome potential_bounds() {
    bool ok = true;
    std::string detail;
    {
        const SpatialGrid g(1, 4096, 2048.0);
        PotentialSpec pot;
        pot.components.push_back({PotentialProfile::gaussian_well, -2.0, Path::fixed({0.0, 0.0}), 1.0});
        const NonlinearitySpec nl{kPower, 0.5, 1.0};
        const GridField psi = oracle::gaussian(g);
        const GridField phi = oracle::gaussian(g, 1.3, {0.5, 0.0});
        const auto ts = oracle::geomspace(1.0, 100.0, 25);
        std::vector<double> mags;
        bool holder = true;
        for (double t : ts) {
            const auto pt = potential_term(free_propagate(psi, t), pot, phi, t, nl);
            holder = holder && pt.v1_bound && std::abs(pt.v1_value) <= *pt.v1_bound;
            mags.push_back(std::abs(pt.value));
        }
        const double slope = oracle::loglog_slope(ts, mags);
        ok = ok && holder && slope <= -0.25;
        detail += std::string("Hoelder bound ") + (holder ? "held" : "violated") + " at all 25 t, decay slope " + num(slope) +
                  " (<= -0.25)";
    }
    {
        const SpatialGrid g(1, 4096, 1024.0);
        PotentialSpec pot;
        pot.atoms.push_back({{0.0, 0.0}, 1.0});
        LocalizedComponent bound = moving(LocalizedProfile::bound_state, 2.0, 0.0);
        bound.boost = false;
        const LocalizedPathSpec l{{bound}};
        const GridField v = oracle::gaussian(g);
        const GridField phi = oracle::gaussian(g, 1.0, {0.4, 0.0});
        const NonlinearitySpec nl{kPower, 0.5, 1.0};
        const std::vector<double> t0s{5, 10, 20, 40, 80};
        std::vector<double> sums;
        for (double t0 : t0s) {
            std::vector<double> ts, vals;
            for (int k = 0; k <= 20; ++k) {
                const double t = t0 + 0.1 * k;
                ts.push_back(t);
                vals.push_back(std::abs(potential_term(synth_state(l, v, t, g), pot, phi, t, nl).v2_value));
            }
            sums.push_back(window_integral(ts, vals, t0, 2.0));
        }
        const double slope = oracle::loglog_slope(t0s, sums);
        ok = ok && std::abs(slope + 0.5) <= 0.15;
        detail += "; atom window-sum slope " + num(slope) + " (-0.5 +- 0.15)";
    }
    return {ok, detail};
}

Outcome hartree_oracle() {
    const SpatialGrid g(1, 256, 20.0);
    const GridField u = oracle::random_field(g, 99);
    const double h = g.spacing();
    double worst = 0.0;
    for (double p : {0.5, 1.0, 1.5}) {
        const double s = 0.5 * p;
        const GridField fast = HartreeKernel(g, s).apply(u);
        const double n = static_cast<double>(g.size());
        double num2 = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                double z = std::abs(static_cast<double>(i) - static_cast<double>(j));
                z = std::min(z, n - z) * h;
                // The origin cell carries the cell average of |x|^{-s}.
                const double k = z < 0.5 * h ? std::pow(0.5 * h, -s) / (1.0 - s) : std::pow(z, -s);
                acc += k * std::norm(u[j]) * h;
            }
            num2 += std::norm(fast[i] - acc);
            den += acc * acc;
        }
        worst = std::max(worst, std::sqrt(num2 / den));
    }
    return {worst <= 1e-10, "relative L2 gap to direct summation at n = 256: " + num(worst) + " (tol 1e-10)"};
}

Outcome theorem3_sequence() {
    const SpatialGrid g(1, 1024, 80.0);
    const GridField v = oracle::gaussian(g, 1.5);
    const AtomicMeasure nu{{{{1.0, 0.0}, mass(v)}}};
    const TestSequence s = test_sequence(v, nu, 20, {kPower, 1.0, 1.0});
    const auto first = s.first_success();
    bool l1 = true;
    double worst = 0.0;
    for (const auto& st : s.steps) {
        const double bound = 4.0 * std::pow(2.0, -st.n);
        l1 = l1 && st.psi_l1 <= bound;
        worst = std::max(worst, st.psi_l1 / bound);
    }
    std::string detail = first ? "first success at n = " + std::to_string(*first) : std::string("no n <= 20 succeeded");
    if (first) {
        const auto& st = s.steps[static_cast<std::size_t>(*first - 1)];
        detail += " (main/target " + num(st.main_pairing.real() / s.target) + ", nu/target " + num(st.nu_pairing / s.target) + ")";
    }
    return {first.has_value() && l1, detail + ", max |psi_n|_1 / (4 2^-n) " + num(worst)};
}

Outcome hypothesis() {
    const SpatialGrid g(1, 512, 20.0);
    const GridField phi = oracle::gaussian(g, 1.0, {1.0, 0.0});
    const LocalizedPathSpec l{{moving(LocalizedProfile::sech, 1.0, 1.0, 2.0)}};
    const auto ts = oracle::geomspace(5.0, 200.0, 12);
    const AtomicMeasure nu = nu_from_paths(l, nullptr, ts, 1);
    const HypothesisCheck h = hypothesis_check(l, nullptr, nu, phi, ts);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : h.points)
        if (p.t >= 50.0) worst = std::min(worst, p.slack / h.nu_pairing);
    AtomicMeasure half = nu;
    half.atoms[0].mass *= 0.5;
    const bool flagged = !hypothesis_check(l, nullptr, half, phi, ts).satisfied(50.0);
    return {h.satisfied(50.0) && worst >= -0.02 && flagged,
            "min relative slack for t >= 50: " + num(worst) + " (>= -0.02); 50% deficit " + (flagged ? "flagged" : "not flagged")};
}

Outcome short_range_control(const std::filesystem::path& configs, const std::filesystem::path& out) {
    RunOptions opt;
    opt.deterministic = true;
    opt.out_dir = out / "nls_shortrange_control";
    const RunResult sr = run_scenario(parse_config(read_text(configs / "nls_shortrange_control.toml")), opt);
    opt.out_dir = out / "nls_longrange";
    opt.threads = threads();
    const RunResult lr = run_scenario(parse_config(read_text(configs / "nls_longrange.toml")), opt);
    const std::string report = emit_report({sr, lr});
    write_text(out / "report.md", report);
    double spread = std::numeric_limits<double>::quiet_NaN();
    bool cauchy = false;
    for (const auto& i : sr.invariants)
        if (i.name == "pairing_cauchy") {
            cauchy = i.pass;
            spread = i.value.value_or(spread);
        }
    const bool contrast = lr.fitted_model == std::optional<std::string>("power_law") && lr.glassey_tau_max && sr.glassey_tau_max &&
                          *lr.glassey_tau_max > 10.0 * std::abs(*sr.glassey_tau_max);
    return {cauchy && !sr.aborted && contrast,
            "max |P(t2)-P(t1)| / (|u||phi|) on [50,100]: " + num(spread) + " (tol 0.05); glassey(100) short " +
                num(sr.glassey_tau_max.value_or(NAN)) + " vs long " + num(lr.glassey_tau_max.value_or(NAN)) + ", report " +
                (out / "report.md").string()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path configs = argc > 1 ? argv[1] : "configs";
    const std::filesystem::path out = argc > 2 ? argv[2] : "acceptance_out";
    std::filesystem::create_directories(out);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"unitarity and Parseval", unitarity},
        {"free Gaussian oracle", gaussian_oracle},
        {"factorization residual", factorization},
        {"dispersive decay rate", dispersive_rate},
        {"tilde-frame test function rate", hausdorff_young},
        {"derivative identity", derivative_identity},
        {"main-term limit", main_term_limits},
        {"growth dichotomy", growth_dichotomy},
        {"potential bounds", potential_bounds},
        {"Hartree direct-sum oracle", hartree_oracle},
        {"cutoff test-function sequence", theorem3_sequence},
        {"concentration hypothesis", hypothesis},
        {"short-range control", [&] { return short_range_control(configs, out); }},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
