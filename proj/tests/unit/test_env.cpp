#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sinai/env.hpp"

using namespace sinai;

TEST_CASE("empty brownian path is a single point") {
    Rng rng(1);
    GridPath p = sample_brownian(1.0, 0, 0, rng);
    CHECK(p.size() == 1);
    CHECK(p.values[0] == 0.0);
}

TEST_CASE("brownian endpoint variance") {
    const int n = 10000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        Rng rng(7, 0, uint64_t(i));
        GridPath p = sample_brownian(0.01, 0, 100, rng);
        double x2 = p.values.back() * p.values.back();
        s += x2;
        s2 += x2 * x2;
    }
    double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::abs(m - 1.0) < 3 * se);
}

TEST_CASE("sampling is deterministic and pinned") {
    Rng a(42, 3), b(42, 3);
    GridPath p = sample_brownian(0.1, 50, 70, a), q = sample_brownian(0.1, 50, 70, b);
    CHECK(p.values == q.values);
    CHECK(p.pinned());
    CHECK(p.left_n == 50);
    CHECK(p.right_n == 70);
    CHECK_THROWS(sample_brownian(0.0, 1, 1, a));
}

TEST_CASE("brownian scaling keeps increment variance per unit time") {
    // c f(t/c^2) has cell variance c^2 dt over cells of length c^2 dt
    Rng rng(11);
    GridPath p = sample_brownian(0.01, 2000, 2000, rng);
    GridPath g = p.brownian_scaled(3.0);
    auto ratio = [](const GridPath& x) {
        double s = 0;
        for (std::size_t i = 1; i < x.size(); ++i) s += std::pow(x.values[i] - x.values[i - 1], 2);
        return s / double(x.size() - 1) / x.dt;
    };
    CHECK(std::abs(ratio(p) - 1.0) < 0.05);
    CHECK(ratio(g) == doctest::Approx(ratio(p)).epsilon(1e-12));
}

TEST_CASE("potential from probabilities") {
    StepPotential z = potential_from_probs(std::vector<double>(5, 0.5));
    for (double v : z.V) CHECK(v == 0.0);
    double e = std::exp(1.0);
    StepPotential one = potential_from_probs(std::vector<double>{1 / (1 + e)});
    CHECK(one.v(1) == doctest::Approx(1.0).epsilon(1e-14));
    StepPotential w = potential_from_probs(std::vector<double>{1 / (1 + e), e / (1 + e)});
    CHECK(w.v(0) == 0.0);
    CHECK(w.v(1) == doctest::Approx(1.0));
    CHECK(std::abs(w.v(2)) < 1e-14);
    CHECK_THROWS(potential_from_probs(std::vector<double>{1.0}));
    CHECK_THROWS(potential_from_probs(std::vector<double>{0.0}));
}

TEST_CASE("potential round trip of log-odds") {
    Rng rng(5);
    EnvDistribution d = EnvDistribution::parse("logistic-gaussian");
    StepPotential s = sample_env(d, 200, rng);
    CHECK(s.v(0) == 0.0);
    for (long k = s.lo + 1; k <= s.hi; ++k) {
        double rho = std::log((1 - s.p(k)) / s.p(k));
        CHECK(std::abs(s.v(k) - s.v(k - 1) - rho) < 1e-12);
    }
}

TEST_CASE("log-odds laws are centred with unit variance") {
    for (auto name : {"two-point", "logistic-gaussian", "brownian"}) {
        Rng rng(99);
        EnvDistribution d = EnvDistribution::parse(name);
        StepPotential s = sample_env(d, 50000, rng);
        double m = 0, m2 = 0, m4 = 0;
        long n = 0;
        for (long k = s.lo; k <= s.hi; ++k) {
            double r = std::log((1 - s.p(k)) / s.p(k));
            m += r;
            m2 += r * r;
            m4 += r * r * r * r;
            ++n;
        }
        m /= double(n);
        m2 /= double(n);
        m4 /= double(n);
        CHECK(std::abs(m) < 3 * std::sqrt(m2 / double(n)));
        CHECK(std::abs(m2 - 1.0) < 3 * std::sqrt((m4 - m2 * m2) / double(n)) + 1e-12);
    }
    CHECK_THROWS(EnvDistribution::parse("cauchy"));
}

TEST_CASE("sample_env is stable under widening") {
    EnvDistribution d;
    Rng a(3), b(3);
    StepPotential s = sample_env(d, 10, a), t = sample_env(d, 20, b);
    for (long k = -10; k <= 10; ++k) CHECK(s.p(k) == t.p(k));
}

TEST_CASE("SINP round trip and csv") {
    Rng rng(8);
    GridPath p = sample_brownian(0.25, 3, 4, rng);
    std::string f = "/tmp/sinai_test_path.sinp";
    write_sinp(p, f);
    GridPath q = read_sinp(f);
    CHECK(q.dt == p.dt);
    CHECK(q.left_n == 3);
    CHECK(q.values == p.values);
    std::remove(f.c_str());
    std::ostringstream os;
    write_csv(p, os);
    CHECK(os.str().rfind("t,value\n", 0) == 0);
    CHECK(p.at(0.125) == doctest::Approx(0.5 * (p.values[3] + p.values[4])));
}
