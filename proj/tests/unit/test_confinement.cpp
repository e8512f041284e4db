#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "sinai/confinement.hpp"

using namespace sinai;

namespace {
double q_oracle(double t, double x, double y) {
    long double s = 0;
    for (int n = 1; n < 400; ++n)
        s += std::exp(-(long double)n * n * M_PI * M_PI * t / 2) * std::sin(n * M_PI * x) * std::sin(n * M_PI * y);
    return double(2 * s);
}
double gauss(double d, double s) { return std::exp(-d * d / (2 * s)) / std::sqrt(2 * M_PI * s); }
} // namespace

TEST_CASE("q kernel values and symmetry") {
    CHECK(q_kernel(1, 0.5, 0.5) == doctest::Approx(0.0143835).epsilon(1e-5));
    CHECK(q_kernel(1, 0.5, 0.5) == doctest::Approx(q_oracle(1, 0.5, 0.5)).epsilon(1e-14));
    for (double t : {0.05, 0.3, 1.0, 2.5}) {
        CHECK(q_kernel(t, 0.3, 0.7) == q_kernel(t, 0.7, 0.3));
        CHECK(q_kernel(t, 0.2, 0.9) == doctest::Approx(q_oracle(t, 0.2, 0.9)).epsilon(1e-12));
    }
    // scaling
    CHECK(q_kernel(2.0, 0.6, 1.0, 2.0) == doctest::Approx(q_kernel(0.5, 0.3, 0.5) / 2).epsilon(1e-14));
    CHECK_THROWS_AS(q_kernel(0.001, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(q_kernel(1, 0, 0.5), std::domain_error);
}

TEST_CASE("q kernel Chapman-Kolmogorov") {
    using boost::math::quadrature::gauss_kronrod;
    for (auto [s, t, x, y] : {std::array<double, 4>{0.3, 0.5, 0.2, 0.6}, {1.0, 0.7, 0.5, 0.5}, {0.2, 2.0, 0.9, 0.1}}) {
        auto f = [&](double z) { return q_kernel(s, x, z) * q_kernel(t, z, y); };
        double I = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
        CHECK(std::fabs(I - q_kernel(s + t, x, y)) < 1e-10);
    }
}

TEST_CASE("bridge survival matches kernel over heat kernel") {
    // at s = 0.01 the far pair has a kernel near 1e-15, below the series' absolute accuracy
    for (double s : {0.01, 0.05, 0.2, 1.0})
        for (auto [a, b] : {std::pair{0.3, 0.6}, {0.05, 0.9}, {0.5, 0.5}}) {
            if (s < 0.05 && b - a > 0.5) continue;
            double ratio = q_kernel(s, a, b) / gauss(b - a, s);
            CHECK(bridge_stay(a, b, s, 0, 1) == doctest::Approx(ratio).epsilon(1e-10));
            CHECK(bridge_stay(a + 3, b + 3, s, 3, 4) == doctest::Approx(ratio).epsilon(1e-10));
        }
    CHECK(bridge_stay(0.2, 0.3, 0.1, 0, INFINITY) == doctest::Approx(1 - std::exp(-2 * 0.2 * 0.3 / 0.1)));
    CHECK(bridge_stay(1.2, 0.3, 0.1, 0, 1) == 0.0);
}

TEST_CASE("bridge minimum law") {
    // P(min < m) = exp(-2(a-m)(b-m)/s)
    Rng rng(3);
    int n = 200000, below = 0;
    double a = 0.4, b = 0.1, s = 0.3, m = -0.1;
    for (int i = 0; i < n; ++i) below += bridge_min(a, b, s, rng.uniform()) < m;
    double p = std::exp(-2 * (a - m) * (b - m) / s);
    CHECK(std::fabs(below / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("confinement probability") {
    CHECK(confinement_prob(1, 0.5, 1) == doctest::Approx(0.0091574).epsilon(1e-4));
    CHECK(confinement_prob(1, 1e-9, 1) < 1e-10);
    CHECK(confinement_prob(1, 0, 1) == 0.0);
    // the windowed form with the full window is the plain one
    CHECK(confinement_window_prob(1.3, 0.4, 1, 0, 1) == doctest::Approx(confinement_prob(1.3, 0.4, 1)).epsilon(1e-12));
    // series and image sums agree where both are accurate
    for (double t : {0.01, 0.02, 0.05}) {
        double series = confinement_prob(t, 0.3, 1);
        double images = interval_survival(t * 0.999999, 0.3, 0, 1);
        CHECK(series == doctest::Approx(images).epsilon(1e-5));
    }
    CHECK(interval_survival(1e-4, 0.5, 0, 1) == doctest::Approx(1.0));
    // deep in the tail only the leading term survives
    for (double t : {32.0, 40.0, 200.0})
        CHECK(interval_survival(t, 0, -1, 1) == doctest::Approx(4 / M_PI * std::exp(-M_PI * M_PI * t / 8)).epsilon(1e-12));
    CHECK(q_kernel(100, 0.5, 0.5) == doctest::Approx(2 * std::exp(-50 * M_PI * M_PI)).epsilon(1e-12));
}

TEST_CASE("confinement probability against plain Monte Carlo") {
    ConfinementEvent e;
    e.eps = 0;
    auto m = run_course_naive(confinement_course(e, 0.5), 100000, 1e-2, 11);
    double exact = confinement_prob(0.5, 0.5, 1);
    CHECK(std::fabs(m.estimate - exact) < 3 * m.std_error);
}

TEST_CASE("kernel bound constants") {
    double c2 = fit_c2(20);
    CHECK(c2 <= 2.5);
    CHECK(c2 >= 2.0 * 0.999);
    CHECK(fit_c1(0.1, 20) > 0);
    CHECK(fit_c1(0.1, 20) > fit_c1(0.01, 20));
    double C = fit_exit_constant();
    CHECK(C == doctest::Approx(4 / M_PI).epsilon(1e-6));
    for (double x : {0.5, 2.0, 7.0}) CHECK(interval_survival(x, 0, -1, 1) <= C * std::exp(-x * M_PI * M_PI / 8) + 1e-15);
}

TEST_CASE("particle estimate is unbiased against the exact value") {
    ConfinementEvent e;
    e.eps = 0.1;
    SmcOptions o;
    o.particles = 2000;
    o.replicas = 20;
    o.dt = 0.05;
    for (double t : {1.0, 3.0}) {
        auto m = run_course(confinement_course(e, t), o, 5, 0);
        double exact = confinement_exact(e, t);
        CHECK(std::fabs(m.estimate - exact) < 4 * m.std_error);
    }
}

TEST_CASE("estimates do not depend on the worker count") {
    ConfinementEvent e;
    e.kind = ConfinementEvent::Kind::reflected_floor;
    McConfig c1, c3;
    c1.smc.particles = c3.smc.particles = 300;
    c1.smc.replicas = c3.smc.replicas = 6;
    c1.smc.dt = c3.smc.dt = 0.01;
    c3.smc.workers = 3;
    auto a = mc_rate(e, {0.5, 1.0}, c1, 9);
    auto b = mc_rate(e, {0.5, 1.0}, c3, 9);
    CHECK(a.slope == b.slope);
    CHECK(a.estimates[1].estimate == b.estimates[1].estimate);
}

TEST_CASE("sample-size diagnostics") {
    ConfinementEvent e;
    McConfig c;
    c.mode = McMode::naive;
    c.naive_samples = 1000;
    CHECK_THROWS_AS(mc_rate(e, {4.0}, c, 1), std::invalid_argument);
    std::vector<McEstimate> est(2);
    est[0].estimate = 0.1;
    est[0].std_error = 0.01;
    est[1].estimate = 0;
    CHECK_THROWS_AS(fit_rate({1, 2}, est), std::runtime_error);
}

TEST_CASE("fit_rate recovers exact exponentials") {
    std::vector<double> t = {1, 2, 3, 4};
    std::vector<McEstimate> est;
    for (double s : t) est.push_back({std::exp(0.3 - 1.7 * s + 0.8 / s), 1e-3 * std::exp(-1.7 * s), 1, 0, ""});
    auto f = fit_rate(t, est, true);
    CHECK(f.slope == doctest::Approx(-1.7).epsilon(1e-9));
    CHECK(f.inv_coef == doctest::Approx(0.8).epsilon(1e-9));
    auto g = fit_rate({1, 2}, {est[0], est[1]});
    CHECK(g.slope == doctest::Approx(std::log(est[1].estimate / est[0].estimate)).epsilon(1e-12));
}

TEST_CASE("block targets") {
    BlockGeometry g;
    double eps = 0.1, d = 0.05;
    CHECK(block_target(BlockKind::C, g, eps, d) ==
          doctest::Approx(-(M_PI * M_PI / 2) * 0.95 / std::pow(1.01, 2)));
    // B cost is proportional to delta y
    CHECK(block_target(BlockKind::B, g, eps, 2 * d) == doctest::Approx(2 * block_target(BlockKind::B, g, eps, d)));
    // Gamma splits into its reflected confinement, hole and barrier pieces
    BlockGeometry G;
    G.x = 0.2;
    G.y = 1;
    G.h = 1;
    G.h2 = 1.5;
    double rc = -(M_PI * M_PI / 8) * (G.y - G.x - d * (G.x + G.y)) / (G.h * G.h);
    BlockGeometry Bg = G;
    Bg.h = G.h2;
    double barrier = -(M_PI * M_PI / 8) * d * G.y / (G.h2 * G.h2 * std::pow(1 + eps, 2));
    CHECK(block_target(BlockKind::Gamma, G, eps, d) ==
          doctest::Approx(rc + block_target(BlockKind::HR, G, eps, d) + barrier).epsilon(1e-12));
    CHECK_THROWS_AS(block_course(BlockKind::Gamma, BlockGeometry{0, 1, 2, 1, 0, -1}, eps, d, 2), std::invalid_argument);
    CHECK_THROWS_AS(block_course(BlockKind::C, BlockGeometry{1, 0.5, 1, 2, 0, -1}, eps, d, 2), std::invalid_argument);
}

TEST_CASE("block C Monte Carlo slope") {
    BlockGeometry g;
    McConfig c;
    c.smc.particles = 1000;
    c.smc.replicas = 8;
    c.smc.dt = 0.02;
    auto f = mc_block_cost(BlockKind::C, g, 0.1, 0.05, {2, 4, 6}, c, 21);
    double target = block_target(BlockKind::C, g, 0.1, 0.05);
    CHECK(std::fabs(f.slope / target - 1) < 0.03);
}

TEST_CASE("block B cost grows linearly in delta") {
    BlockGeometry g;
    McConfig c;
    c.smc.particles = 800;
    c.smc.replicas = 8;
    c.smc.dt = 0.01;
    std::vector<double> M = {20, 30, 40, 50};
    auto f1 = mc_block_cost(BlockKind::B, g, 0.1, 0.05, M, c, 31);
    auto f2 = mc_block_cost(BlockKind::B, g, 0.1, 0.1, M, c, 32);
    CHECK(f2.slope / f1.slope == doctest::Approx(2.0).epsilon(0.15));
}
