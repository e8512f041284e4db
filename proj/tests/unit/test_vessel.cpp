#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sinai/rate.hpp"
#include "sinai/vessel.hpp"

using namespace sinai;

namespace {
std::vector<StepSpec> lattice() {
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

double brute_sharp(const GridPath& p, double x, double y) {
    double best = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            double s = p.time(i), t = p.time(j);
            bool ok = x <= y ? (x <= s && s <= t && t <= y) : (y <= t && t <= s && s <= x);
            if (ok) best = std::max(best, p.values[j] - p.values[i]);
        }
    return best;
}
} // namespace

TEST_CASE("witness lies in the vessel across the spec lattice") {
    for (auto& sp : lattice()) {
        VesselSpec v(sp, 0.05, 0.05);
        GridPath w = construct_witness(v);
        auto rep = vessel_membership(w, v);
        INFO(v.to_json());
        CHECK_MESSAGE(rep.member, rep.first_violation);
        auto prof = v_profile(w, v);
        CHECK(prof.all_ok);
        auto c = skorokhod_closeness(w, v);
        CHECK_MESSAGE(c.sandwich_ok, c.sandwich_failure);
        CHECK(c.distance <= c.bound);
    }
}

TEST_CASE("violations are located at the right block") {
    StepSpec sp({1}, {0.3});
    VesselSpec v(sp, 0.05, 0.05);
    GridPath w = construct_witness(v);
    // flatten the first barrier on the positive wing below its level
    auto& b = v.blocks(1)[1];
    REQUIRE(b.kind == "B");
    GridPath low = w;
    for (std::size_t i = 0; i < low.size(); ++i)
        if (low.time(i) >= b.t0 && low.time(i) <= b.t1) low.values[i] = std::min(low.values[i], 0.9);
    auto rep = vessel_membership(low, v);
    CHECK_FALSE(rep.member);
    CHECK(rep.first_violation.rfind("E0 B (wing +)", 0) == 0);

    GridPath zero(w.dt, w.left_n, std::vector<double>(w.size(), 0.0));
    auto z = vessel_membership(zero, v);
    CHECK_FALSE(z.member);
    CHECK(z.first_violation.find("E0 B") == 0);
    CHECK(z.first_violation.find("never visits above") != std::string::npos);

    GridPath shortp(w.dt, 10, std::vector<double>(21, 0.0));
    CHECK_THROWS_AS(vessel_membership(shortp, v), std::domain_error);
}

TEST_CASE("vessel parameter validation") {
    CHECK_THROWS_AS(VesselSpec(StepSpec({1, 1.05}, {0.3, -0.4}), 0.05, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(VesselSpec(StepSpec({1, 2}, {0.3, 0.31}), 0.05, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(VesselSpec(StepSpec({1}, {0.3}), 0, 0.05), std::invalid_argument);
    CHECK_NOTHROW(VesselSpec(StepSpec({1, 2}, {0.3, 0.6}), 0.05, 0.05));
}

TEST_CASE("f sharp") {
    Rng rng(17);
    std::vector<double> vals(61);
    for (auto& x : vals) x = rng.normal();
    GridPath p(0.1, 30, vals);
    CHECK(f_sharp(p, 0.7, 0.7) == 0.0);
    for (auto [x, y] : {std::pair{-2.0, 2.0}, {1.5, -1.0}, {0.0, 3.0}, {3.0, 0.0}, {-3.0, -0.5}})
        CHECK(f_sharp(p, x, y) == doctest::Approx(brute_sharp(p, x, y)).epsilon(1e-12));
}

TEST_CASE("final-run barrier of the last hole reaches past 2 h_N") {
    // all x_i of one sign: every event is reflected and the last barrier is h_inf = 2 h_N
    StepSpec sp({1, 2}, {0.3, 0.6});
    VesselSpec v(sp, 0.05, 0.05);
    CHECK(v.spec().q() == 1);
    GridPath w = construct_witness(v);
    auto& last = v.blocks(1).back();
    CHECK(last.kind == "B^R");
    CHECK(last.leg.visit_level == doctest::Approx(4.0));
    double m = 1e9, best = 0;
    double anchor = v.w(1) * 1.05;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double t = w.time(i);
        if (t < anchor || t > last.t1) continue;
        m = std::min(m, w.values[i]);
        if (t >= last.t0) best = std::max(best, w.values[i] - m);
    }
    CHECK(best > 4.0);
    // the start barrier on the empty wing sits at -x_1 delta and climbs over 2 h_N as well
    auto& b0 = v.blocks(-1)[1];
    CHECK(b0.kind == "B");
    double top = -1e9;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (-w.time(i) >= b0.t0 && -w.time(i) <= b0.t1) top = std::max(top, w.values[i]);
    CHECK(top > 4.0);
}

TEST_CASE("Skorokhod closeness shrinks with the vessel") {
    StepSpec sp({1, 2, 3}, {0.3, -0.4, 0.8});
    double prev = 1e9;
    for (double d : {0.05, 0.025, 0.0125}) {
        VesselSpec v(sp, d, d);
        auto c = skorokhod_closeness(construct_witness(v), v);
        CHECK(c.sandwich_ok);
        CHECK(c.distance <= c.bound);
        CHECK(c.bound < prev);
        prev = c.bound;
    }
    // the identity time change of a step process against itself
    WellProcess x;
    x.jumps = {{0, 0}, {1, 0.3}, {2, -0.4}, {3, 0.8}};
    x.max_depth = 10;
    CHECK(skorokhod_distance(x, sp, {1, 2, 3}) == 0.0);
    x.jumps[1].first = 1.1;
    CHECK(skorokhod_distance(x, sp, {1.1, 2, 3}) == doctest::Approx(0.1));
    CHECK(skorokhod_distance(x, sp, {1, 2, 3}) == doctest::Approx(0.3));
}

TEST_CASE("finite vessel rate") {
    StepSpec sp({1}, {0.3});
    // start event: (pi^2/2)(0.015 + 0.015/4)(1/1.0025^2 + 0.05/1.0525^2) = 0.096242
    // final run:   (pi^2/8)(0.3 - 0.015 - 0.00075 + 0.015/(4 * 1.1025)) = 0.354879
    CHECK(vessel_rate(VesselSpec(sp, 0.05, 0.05)) == doctest::Approx(-0.451121).epsilon(1e-5));
    double I = rate_of_spec(sp).value;
    CHECK(I == doctest::Approx(M_PI * M_PI / 8 * 0.3).epsilon(1e-12));
    double prev = 1e9;
    for (double d : {0.05, 0.01, 0.002, 0.0004}) {
        double gap = -vessel_rate(VesselSpec(sp, d, d)) - I;
        CHECK(gap > 0);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("vessel course matches its blocks") {
    VesselSpec v(StepSpec({1, 2, 3}, {0.3, -0.4, 0.8}), 0.05, 0.05);
    for (int wing : {1, -1}) {
        auto c = v.course(wing, 10);
        REQUIRE(c.legs.size() == v.blocks(wing).size());
        double total = 0;
        for (auto& l : c.legs) total += l.duration;
        CHECK(total == doctest::Approx(10 * v.wing_end(wing)));
    }
    CHECK(v.reflected_wing(1));
    CHECK_FALSE(v.reflected_wing(-1));
}

TEST_CASE("vessel probability decays at the finite vessel rate") {
    VesselSpec v(StepSpec({1}, {0.3}), 0.05, 0.05);
    SmcOptions o;
    o.particles = 1000;
    o.replicas = 8;
    o.dt = 0.05;
    auto r = mc_vessel_prob(v, {100, 200, 300, 400}, o, 13);
    CHECK(std::fabs(r.fit.slope / r.finite_target - 1) < 0.1);
    CHECK(r.in_band);
    CHECK_THROWS_AS(mc_vessel_prob(v, {1000, 2000, 3000}, o, 13), std::invalid_argument);
}
