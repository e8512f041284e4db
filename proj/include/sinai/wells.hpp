#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sinai/env.hpp"
#include "sinai/mc.hpp"

namespace sinai {

struct Well {
    double a = 0, c = 0, bottom = 0, depth = 0;
    std::size_t ia = 0, ic = 0, im = 0; // grid indices
    bool left_truncated = false, right_truncated = false;
    bool truncated() const { return left_truncated || right_truncated; }
};

// x(h) = 0 on [0, h_1], x_k on (h_k, h_{k+1}], last value up to max_depth, 0 beyond.
// On grid paths h_1 = 0 (the shallowest well around the origin).
struct WellProcess {
    std::vector<std::pair<double, double>> jumps; // (h_k, x_k)
    double max_depth = 0;      // deepest well containing 0 on the path's own domain
    double resolved_depth = 0; // beyond this, extending the path may change x(h)

    double operator()(double h) const;
    bool truncated() const { return resolved_depth < max_depth; }
    // same-sign values grow in modulus along h
    bool sign_monotone() const;
};

// A local minimum that is a weak running minimum seen from the origin: the only
// bottoms whose well can contain 0.
struct WellCandidate {
    std::size_t im = 0, ia = 0, ic = 0;
    double value = 0;
    double asc_left = 0, asc_right = 0;
    bool left_complete = false, right_complete = false; // the scan dropped below the bottom
    bool contains = false;
    bool containment_fixed = false; // no extension of the path can change `contains`
    double depth() const { return asc_left < asc_right ? asc_left : asc_right; }
};

// Whether x(h) on this path equals x(h) on every extension of it; if not, which
// wings must grow.
struct WellCertificate {
    bool certain = false;
    bool extend_left = false, extend_right = false;
    double location = 0;
};

bool is_local_min(const GridPath& p, std::size_t i);
std::vector<WellCandidate> well_candidates(const GridPath& p);
WellCertificate certify_depth(const GridPath& p, double h);
// same, reusing well_candidates(p)
WellCertificate certify_depth(const GridPath& p, const std::vector<WellCandidate>& cs, double h);
Well well_at(const GridPath& p, std::size_t m);
Well well_of(const GridPath& p, double x0);

WellProcess wells_process(const GridPath& p);
double wells_bruteforce(const GridPath& p, double h);

bool x_scaling_check(const GridPath& p, double c);
double jump_prob_exact(double ratio);

// Monte Carlo of P(x_B(1) = x_B(ratio)) over two-sided Brownian grid paths, wings grown
// until both depths are certified. With `correct`, depths are lowered by 2 beta sqrt(dt)
// for the grid's shortfall on extremes (beta = -zeta(1/2)/sqrt(2 pi)).
McEstimate jump_prob_mc(double ratio, std::size_t n, double dt, uint64_t seed, unsigned workers = 1,
                        bool correct = true);
constexpr double kGridExtremeShift = 0.5825971579390106;

void write_csv(const WellProcess& w, std::ostream& os);
std::string to_json(const WellProcess& w);

} // namespace sinai
