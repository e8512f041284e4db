#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include "sinai/mc.hpp"

namespace sinai {

// P(m(x_B/M) leaves Q_a) through its first strip: sup_{h<=1} |x_B(h)| > aM.
// The positive side needs the right wing's reflected path R = B - min B to stay below 1
// on [0, aM]; that survival S(aM) is exact, and the rest is sampled with the right wing
// conditioned on it (Doob transform, exact rejection per step).
struct TightnessPoint {
    double M = 0;
    double survival = 0;      // S(aM) = P(|W| < 1 on [0, aM])
    McEstimate conditional;   // P(sup x_B > aM on [0,1] | R < 1 on [0, aM])
    McEstimate estimate;      // 2 S(aM) conditional
    double later_strips = 0;  // bound on the strips k >= 2
    double both_sides = 0;    // bound on the overlap of the two sides
    std::size_t inconsistent = 0; // samples where the strip check and the direct check disagree
};

struct TightnessResult {
    double a = 0;
    double target = 0; // -a pi^2 / 8
    RateFit fit;
    std::vector<TightnessPoint> points;
    std::string to_json() const;
};

TightnessResult tightness_mc(double a, const std::vector<double>& M_grid, std::size_t n, double dt, uint64_t seed,
                             unsigned workers = 1);

} // namespace sinai
