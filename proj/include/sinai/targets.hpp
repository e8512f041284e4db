#pragma once
#include <cmath>
#include <string>
#include <vector>

namespace sinai {

// Acceptance targets. `tolerance` is relative when `relative`, absolute otherwise;
// for one-sided checks the target is a bound.
struct AcceptanceTarget {
    int criterion;
    std::string name;
    double value;
    double tolerance;
    bool relative;
    std::string note;
};

inline constexpr int kTargetTableVersion = 1;

inline const std::vector<AcceptanceTarget>& acceptance_targets() {
    static const std::vector<AcceptanceTarget> t = {
        {1, "wells mismatches", 0, 0, false, "200 paths x 500 cells/side x 50 depths"},
        {2, "jump probability", (5 - 2 * std::exp(-1.0)) / 12, 3, false, "tolerance in standard errors"},
        {3, "confinement (a) slope", -M_PI * M_PI / 2, 0.02, true, "series vs images agree to 1e-3 relative"},
        {4, "confinement (b) slope", -M_PI * M_PI / 8, 0.05, true, "t in [2,10]"},
        {5, "floor (c)/(b) log-ratio slope", -3 * M_PI * M_PI / 8, 0.20, true, "t in [0.5,1.5], K=1"},
        {6, "block C slope", 0, 0.10, true, "target from the geometry"},
        {6, "block Gamma slope", 0, 0.15, true, "target from the geometry"},
        {7, "rate dual path", 0, 1e-9, false, "max |rate_of_spec - rate_of_envelopes|"},
        {8, "corollary value", 0, 1e-6, false, "(4/pi^2)(2/(r+3))^((r+3)/(r+1)), r=0,1,2"},
        {8, "corollary s0", 0, 1e-10, false, "(2/(r+3))^(1/(r+1))"},
        {9, "vessel slope", 0, 0.35, true, "band around -I(h,x)"},
        {10, "tightness slope", -2 * M_PI * M_PI / 8, 0.20, true, "a=2, M in 2..8"},
        {11, "localization median", 0.5, 0, false, "upper bound; pilot-calibrated"},
        {12, "hitting time mean", 1, 3, false, "tolerance in standard errors"},
        {12, "hitting time tail slope", -M_PI * M_PI / 8, 0.05, true, "t in [2,6]"},
        {12, "embedding chi-square p", 0.01, 0, false, "lower bound"},
    };
    return t;
}

} // namespace sinai
