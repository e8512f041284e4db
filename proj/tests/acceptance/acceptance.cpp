// Acceptance run: one PASS/FAIL line per criterion, diagnostics indented below it.
// Usage: acceptance [criterion ...]   (default: all)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "../unit/spec_gen.hpp"
#include "sinai/confinement.hpp"
#include "sinai/rate.hpp"
#include "sinai/targets.hpp"
#include "sinai/tightness.hpp"
#include "sinai/vessel.hpp"
#include "sinai/walk.hpp"
#include "sinai/wells.hpp"

using namespace sinai;

namespace {

constexpr uint64_t kSeed = 20240601;

struct Verdict {
    bool pass = true;
    std::string summary;
};

double rel(double a, double b) { return std::fabs(a / b - 1); }

void note(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const AcceptanceTarget& target(int id, const std::string& name) {
    for (auto& t : acceptance_targets())
        if (t.criterion == id && t.name == name) return t;
    std::fprintf(stderr, "no target %d/%s\n", id, name.c_str());
    std::exit(2);
}

// ordinary least squares slope of y on x
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
}

void print_fit(const RateFit& f) {
    for (std::size_t i = 0; i < f.t_grid.size(); ++i)
        note("t=%-8g P=%.6e  se=%.2e", f.t_grid[i], f.estimates[i].estimate, f.estimates[i].std_error);
}

// ---- 1 ------------------------------------------------------------------
Verdict wells_oracle() {
    Rng rng(kSeed, 1);
    long mismatches = 0, comparisons = 0;
    for (int r = 0; r < 200; ++r) {
        GridPath p = sample_brownian(1.0 / 500, 500, 500, rng);
        WellProcess w = wells_process(p);
        for (int k = 0; k < 50; ++k) {
            double h = (k < int(w.jumps.size()) && w.jumps[std::size_t(k)].first > 0)
                           ? w.jumps[std::size_t(k)].first
                           : (0.001 + rng.uniform()) * 1.2 * (w.max_depth + 0.05);
            ++comparisons;
            if (w(h) != wells_bruteforce(p, h)) ++mismatches;
        }
    }
    return {mismatches == 0, fmt("%ld mismatches in %ld comparisons", mismatches, comparisons)};
}

// ---- 2 ------------------------------------------------------------------
Verdict jump_probability() {
    auto& t = target(2, "jump probability");
    McEstimate e = jump_prob_mc(2.0, 100000, 1e-3, kSeed);
    double z = (e.estimate - t.value) / e.std_error;
    note("exact %.6f, closed-form check %.6f", t.value, jump_prob_exact(2.0));
    McEstimate raw = jump_prob_mc(2.0, 20000, 1e-3, kSeed + 1, 1, false);
    note("uncorrected grid depths (2e4 samples): %.5f +- %.5f", raw.estimate, raw.std_error);
    return {std::fabs(z) <= t.tolerance,
            fmt("P = %.5f +- %.5f vs %.5f, z = %+.2f (tol %g SE)", e.estimate, e.std_error, t.value, z, t.tolerance)};
}

// ---- 3 ------------------------------------------------------------------
// windowed interval probability by images, independent of the eigen-series
double images_window(double t, double x, double lo, double hi) {
    boost::math::normal N;
    auto Phi = [&](double u) { return boost::math::cdf(N, u); };
    double s = std::sqrt(t), sum = 0;
    for (int k = -40; k <= 40; ++k) {
        double o = 2.0 * k;
        sum += Phi((hi - x + o) / s) - Phi((lo - x + o) / s) - Phi((hi + x + o) / s) + Phi((lo + x + o) / s);
    }
    return sum;
}

Verdict confinement_a() {
    auto& t = target(3, "confinement (a) slope");
    ConfinementEvent e;
    e.kind = ConfinementEvent::Kind::interval;
    e.eps = 0.1;
    std::vector<double> grid{1, 1.5, 2, 2.5, 3, 3.5, 4};
    std::vector<double> logp;
    double worst = 0;
    for (double s : grid) {
        double p = confinement_exact(e, s), q = images_window(s, 0.5, e.eps, 1 - e.eps);
        worst = std::max(worst, rel(p, q));
        logp.push_back(std::log(p));
    }
    double exact_slope = ols_slope(grid, logp);
    note("series vs images: max relative gap %.2e over t in [1,4]", worst);
    note("slope of the exact series: %.6f, relative gap to target %.2e", exact_slope, rel(exact_slope, t.value));
    McConfig cfg;
    cfg.smc.particles = 4000;
    cfg.smc.replicas = 16;
    cfg.smc.dt = 0.02;
    RateFit f = mc_rate(e, grid, cfg, kSeed);
    print_fit(f);
    double zmax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        zmax = std::max(zmax, std::fabs(f.estimates[i].estimate - confinement_exact(e, grid[i])) /
                                  f.estimates[i].std_error);
    note("MC vs exact: max |z| = %.2f", zmax);
    bool ok = worst < 1e-3 && rel(exact_slope, t.value) < 1e-3 && rel(f.slope, t.value) <= t.tolerance;
    return {ok, fmt("MC slope %.4f +- %.4f vs %.4f (%.2f%%, tol %g%%); exact-series slope gap %.1e (tol 1e-3)", f.slope,
                    f.slope_std_error, t.value, 100 * rel(f.slope, t.value), 100 * t.tolerance,
                    rel(exact_slope, t.value))};
}

// ---- 4 ------------------------------------------------------------------
Verdict reflected_b() {
    auto& t = target(4, "confinement (b) slope");
    ConfinementEvent e;
    e.kind = ConfinementEvent::Kind::reflected;
    e.eps = 0.1;
    e.start = 0.3;
    McConfig cfg;
    cfg.smc.particles = 4000;
    cfg.smc.replicas = 16;
    cfg.smc.dt = 0.02;
    std::vector<double> grid{2, 4, 6, 8, 10};
    RateFit f = mc_rate(e, grid, cfg, kSeed);
    print_fit(f);
    std::vector<double> logp;
    for (double s : grid) logp.push_back(std::log(confinement_exact(e, s)));
    note("slope of the exact probabilities on the same grid: %.5f", ols_slope(grid, logp));
    return {rel(f.slope, t.value) <= t.tolerance,
            fmt("slope %.4f +- %.4f vs %.4f (%.2f%%, tol %g%%)", f.slope, f.slope_std_error, t.value,
                100 * rel(f.slope, t.value), 100 * t.tolerance)};
}

// ---- 5 ------------------------------------------------------------------
Verdict floor_c() {
    auto& t = target(5, "floor (c)/(b) log-ratio slope");
    ConfinementEvent c, b;
    c.kind = ConfinementEvent::Kind::reflected_floor;
    c.K = 1;
    b.kind = ConfinementEvent::Kind::reflected;
    b.eps = 0;
    b.start = 0;
    McConfig cfg;
    cfg.smc.particles = 4000;
    cfg.smc.replicas = 16;
    cfg.smc.dt = 0.001;
    std::vector<double> grid{0.5, 0.75, 1, 1.25, 1.5};
    RateFit fc = mc_rate(c, grid, cfg, kSeed), fb = mc_rate(b, grid, cfg, kSeed + 1);
    std::vector<double> lr;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        lr.push_back(std::log(fc.estimates[i].estimate / fb.estimates[i].estimate));
        note("t=%-5g P_c=%.5e P_b=%.5e (exact %.5e) log-ratio %.4f", grid[i], fc.estimates[i].estimate,
             fb.estimates[i].estimate, confinement_exact(b, grid[i]), lr.back());
    }
    double slope = fc.slope - fb.slope;
    double se = std::hypot(fc.slope_std_error, fb.slope_std_error);
    // deep-t behaviour of (c) alone, for the record
    McConfig deep = cfg;
    deep.smc.dt = 0.005;
    RateFit fd = mc_rate(c, {4, 6, 8, 10}, deep, kSeed + 2);
    note("diagnostic: (c) alone on t in [4,10]: slope %.4f +- %.4f; closed-form rate of (c) %.4f", fd.slope,
         fd.slope_std_error, confinement_target(c));
    return {rel(slope, t.value) <= t.tolerance,
            fmt("log-ratio slope %.4f +- %.4f vs %.4f (%.1f%%, tol %g%%)", slope, se, t.value,
                100 * rel(slope, t.value), 100 * t.tolerance)};
}

// ---- 6 ------------------------------------------------------------------
Verdict block_costs() {
    BlockGeometry g;
    g.x = 0;
    g.y = 1;
    g.h = 1;
    McConfig cfg;
    cfg.smc.particles = 4000;
    cfg.smc.replicas = 16;
    cfg.smc.dt = 0.01;
    double tc = block_target(BlockKind::C, g, 0.1, 0.05);
    RateFit fc = mc_block_cost(BlockKind::C, g, 0.1, 0.05, {2, 3, 4, 5, 6}, cfg, kSeed);
    note("C: slope %.4f +- %.4f vs %.4f (%.2f%%, tol 10%%)", fc.slope, fc.slope_std_error, tc, 100 * rel(fc.slope, tc));
    BlockGeometry gg = g;
    gg.h2 = 1.2;
    gg.w = 0;
    cfg.smc.dt = 0.005;
    std::vector<double> M{4, 6, 8, 10, 12};
    double tg = block_target(BlockKind::Gamma, gg, 0.1, 0.05);
    RateFit raw = mc_block_cost(BlockKind::Gamma, gg, 0.1, 0.05, M, cfg, kSeed + 1);
    RateFit fg = fit_rate(M, raw.estimates, true);
    note("Gamma: slope %.4f +- %.4f (with 1/M term; plain fit %.4f) vs %.4f (%.2f%%, tol 15%%)", fg.slope,
         fg.slope_std_error, raw.slope, tg, 100 * rel(fg.slope, tg));
    bool ok = rel(fc.slope, tc) <= target(6, "block C slope").tolerance &&
              rel(fg.slope, tg) <= target(6, "block Gamma slope").tolerance;
    return {ok, fmt("C %.2f%% off (tol 10%%), Gamma %.2f%% off (tol 15%%)", 100 * rel(fc.slope, tc),
                    100 * rel(fg.slope, tg))};
}

// ---- 7 ------------------------------------------------------------------
Verdict rate_dual_path() {
    Rng rng(kSeed, 7);
    double dual = 0, scale = 0, shr = 0;
    for (int k = 0; k < 100; ++k) {
        StepSpec sp = random_spec(rng);
        double a = rate_of_spec(sp).value;
        auto mu = occupation(sp);
        dual = std::max(dual, std::fabs(a - rate_of_envelopes(envelopes(mu)).value));
        dual = std::max(dual, std::fabs(a - rate_of_measure(mu).value));
        for (double c : {0.5, 2.0, 3.7})
            scale = std::max(scale, rel(rate_of_measure(rescale_measure(mu, c)).value, a));
        for (double e : {0.1, 0.25, 0.5})
            shr = std::max(shr, rel(rate_of_measure(shrink(mu, e)).value, (1 - e) * a));
    }
    auto& t = target(7, "rate dual path");
    note("max relative deviation: scaling %.2e, shrink %.2e (both required <= 1e-12)", scale, shr);
    return {dual <= t.tolerance && scale <= 1e-12 && shr <= 1e-12,
            fmt("max |spec - envelopes| = %.2e (tol %g) over 100 specs", dual, t.tolerance)};
}

// ---- 8 ------------------------------------------------------------------
Verdict corollary() {
    double worst = 0, worst_s0 = 0;
    bool ok = true;
    for (double r : {0.0, 1.0, 2.0}) {
        auto v = variational_sup([r](double s) { return std::pow(s, r); }, 10000);
        double c = corollary_value(r);
        if (!v.closed_form) ok = false;
        double cf = v.closed_form.value_or(NAN);
        double d = std::max({std::fabs(v.lp - c), std::fabs(v.greedy - c), std::fabs(cf - c)});
        double ds = std::fabs(v.s0 - corollary_s0(r));
        note("r=%g: LP %.10f greedy %.10f closed form %.10f target %.10f; s0 %.12f", r, v.lp, v.greedy, cf, c, v.s0);
        worst = std::max(worst, d);
        worst_s0 = std::max(worst_s0, ds);
    }
    ok = ok && worst <= target(8, "corollary value").tolerance && worst_s0 <= target(8, "corollary s0").tolerance;
    return {ok, fmt("max value gap %.2e (tol 1e-6), max s0 gap %.2e (tol 1e-10)", worst, worst_s0)};
}

// ---- 9 ------------------------------------------------------------------
std::vector<StepSpec> vessel_lattice() {
    return {
        StepSpec({1}, {0.3}),
        StepSpec({1}, {-0.5}),
        StepSpec({1, 2}, {0.3, -0.4}),
        StepSpec({1, 2}, {0.3, 0.6}),
        StepSpec({1, 2, 3}, {0.3, -0.4, 0.8}),
        StepSpec({1, 2, 3}, {-0.2, 0.5, -0.9}),
        StepSpec({1, 1.5, 2.5, 3}, {0.3, -0.4, 0.8, 1.2}),
        StepSpec({1, 2, 3, 4}, {0.2, -0.3, -0.6, 0.7}),
        StepSpec({0.5, 1, 1.5}, {0.1, 0.2, 0.4}),
        StepSpec({1, 2}, {-0.3, -0.7}),
        StepSpec({1, 2, 3, 4, 5}, {0.2, -0.2, 0.5, -0.6, 1}),
        StepSpec({1, 2}, {1, -1}),
    };
}

Verdict vessel() {
    int witnesses = 0, members = 0, perturbed = 0, assertion_failures = 0;
    Rng rng(kSeed, 9);
    for (auto& sp : vessel_lattice()) {
        VesselSpec v(sp, 0.05, 0.05);
        GridPath w = construct_witness(v);
        double hmin = sp.h()[0];
        for (std::size_t i = 1; i < sp.h().size(); ++i) hmin = std::min(hmin, sp.h()[i] - sp.h()[i - 1]);
        double amp = 0.05 * 0.05 * hmin / 8;
        for (int r = 0; r <= 20; ++r) {
            GridPath p = w;
            if (r > 0) {
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (i != p.origin()) p.values[i] += amp * (2 * rng.uniform() - 1);
                ++perturbed;
            }
            auto rep = vessel_membership(p, v);
            if (r == 0) witnesses += rep.member;
            if (!rep.member) continue;
            ++members;
            auto prof = v_profile(p, v);
            auto c = skorokhod_closeness(p, v);
            if (!prof.all_ok || !c.sandwich_ok || !(c.distance <= c.bound)) ++assertion_failures;
        }
    }
    note("witnesses in the vessel: %d/12; perturbed members %d/%d; assertion failures %d", witnesses,
         members - witnesses, perturbed, assertion_failures);

    StepSpec sp({1}, {0.3});
    SmcOptions o;
    o.particles = 4000;
    o.replicas = 16;
    o.dt = 0.05;
    VesselMc a = mc_vessel_prob(VesselSpec(sp, 0.05, 0.05), {100, 200, 300, 400}, o, kSeed);
    o.dt = 0.1;
    VesselMc b = mc_vessel_prob(VesselSpec(sp, 0.025, 0.025), {300, 600, 900, 1200}, o, kSeed + 1);
    double ga = std::fabs(a.fit.slope - a.target), gb = std::fabs(b.fit.slope - b.target);
    note("(delta,eps)=0.05:  slope %.4f +- %.4f, finite-(delta,eps) rate %.4f, -I %.4f, gap %.4f", a.fit.slope,
         a.fit.slope_std_error, a.finite_target, a.target, ga);
    note("(delta,eps)=0.025: slope %.4f +- %.4f, finite-(delta,eps) rate %.4f, -I %.4f, gap %.4f", b.fit.slope,
         b.fit.slope_std_error, b.finite_target, b.target, gb);
    bool ok = witnesses == 12 && assertion_failures == 0 && a.in_band && b.in_band && gb < ga;
    return {ok, fmt("witnesses 12/12=%s, assertions %s, in band %s/%s (35%%), gap %.3f -> %.3f",
                    witnesses == 12 ? "yes" : "no", assertion_failures ? "failed" : "hold", a.in_band ? "yes" : "no",
                    b.in_band ? "yes" : "no", ga, gb)};
}

// ---- 10 -----------------------------------------------------------------
Verdict tightness() {
    auto& t = target(10, "tightness slope");
    auto r = tightness_mc(2.0, {2, 3, 4, 5, 6, 7, 8}, 4000, 0.004, kSeed);
    std::size_t bad = 0;
    for (auto& p : r.points) {
        note("M=%g P=%.4e se=%.2e (S=%.3e, conditional %.3f); later strips %.1e, overlap %.1e", p.M, p.estimate.estimate,
             p.estimate.std_error, p.survival, p.conditional.estimate, p.later_strips, p.both_sides);
        bad += p.inconsistent;
    }
    note("strip check vs occupation-measure check disagreements: %zu", bad);
    return {rel(r.fit.slope, t.value) <= t.tolerance && bad == 0,
            fmt("slope %.4f +- %.4f vs %.4f (%.2f%%, tol %g%%)", r.fit.slope, r.fit.slope_std_error, t.value,
                100 * rel(r.fit.slope, t.value), 100 * t.tolerance)};
}

// ---- 11 -----------------------------------------------------------------
Verdict localization() {
    auto& t = target(11, "localization median");
    EnvDistribution d;
    auto r = localization_experiment(d, 50, 1000000, kSeed);
    std::vector<double> s = r.scaled_deviation;
    std::sort(s.begin(), s.end());
    note("quartiles %.4f %.4f %.4f, max %.4f (threshold pilot-calibrated)", s[12], s[25], s[37], s.back());
    return {r.median <= t.value, fmt("median %.4f (bound %g) over 50 environments, n = 1e6", r.median, t.value)};
}

// ---- 12 -----------------------------------------------------------------
Verdict hitting_time() {
    HittingTimeSampler T;
    Rng rng(kSeed, 12);
    const std::size_t n = 1000000;
    std::vector<double> grid{2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6};
    std::vector<std::size_t> above(grid.size(), 0);
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = T.sample(rng);
        s += x;
        s2 += x * x;
        for (std::size_t k = 0; k < grid.size(); ++k) above[k] += x > grid[k];
    }
    double mean = s / double(n), se = std::sqrt((s2 / double(n) - mean * mean) / double(n));
    std::vector<McEstimate> est;
    for (std::size_t k = 0; k < grid.size(); ++k) est.push_back(binomial_estimate(above[k], n, kSeed, "P(T > t)"));
    RateFit f = fit_rate(grid, est);
    auto& tm = target(12, "hitting time mean");
    auto& ts = target(12, "hitting time tail slope");
    double z = (mean - tm.value) / se;
    note("mean %.5f +- %.5f (z = %+.2f)", mean, se, z);
    note("tail slope %.4f +- %.4f vs %.4f (%.2f%%)", f.slope, f.slope_std_error, ts.value, 100 * rel(f.slope, ts.value));

    Rng env(kSeed, 13);
    auto pot = sample_env(EnvDistribution{}, 200, env);
    HittingTimeSampler Te(20000);
    WalkOptions o;
    o.a_max = std::log(1000.0);
    o.extra_times = {1000};
    o.width_margin = 1;
    std::vector<long> direct, embedded;
    for (uint64_t r = 0; r < 5000; ++r) {
        Rng a(kSeed, 14, r), b(kSeed, 15, r);
        direct.push_back(simulate_walk(pot, o, a).at(1000));
        embedded.push_back(embedded_walk(pot, 1000, Te, b).position);
    }
    auto chi = chi_square_two_sample(direct, embedded);
    note("embedding chi-square %.2f on %d dof, p = %.4f", chi.statistic, chi.dof, chi.p_value);
    bool ok = std::fabs(z) <= tm.tolerance && rel(f.slope, ts.value) <= ts.tolerance &&
              chi.p_value > target(12, "embedding chi-square p").value;
    return {ok, fmt("mean z %+.2f (tol 3), tail slope %.2f%% off (tol 5%%), chi-square p %.3f (> 0.01)", z,
                    100 * rel(f.slope, ts.value), chi.p_value)};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> run;
    double time_limit = 0; // seconds, 0 for none
};

} // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all = {
        {1, "wells oracle equivalence", wells_oracle, 60},
        {2, "jump probability", jump_probability, 300},
        {3, "confinement rate (a)", confinement_a, 1200},
        {4, "reflected rate (b)", reflected_b, 1200},
        {5, "floor effect (c)", floor_c},
        {6, "block costs", block_costs, 1800},
        {7, "rate function dual path", rate_dual_path},
        {8, "corollary variational problem", corollary},
        {9, "vessel", vessel},
        {10, "exponential tightness", tightness},
        {11, "localization", localization},
        {12, "hitting-time sampler", hitting_time},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    std::printf("acceptance targets table v%d, seed %llu\n", kTargetTableVersion, (unsigned long long)kSeed);
    int failed = 0;
    for (auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        std::printf("criterion %2d (%s)\n", c.id, c.title);
        std::fflush(stdout);
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0 && secs > c.time_limit) {
            v.pass = false;
            v.summary += fmt("; runtime over the %g s limit", c.time_limit);
        }
        std::printf("%s criterion %d: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, v.summary.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}
