#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sinai/occupation.hpp"

namespace sinai {

struct RateTerm {
    int index = 0;        // spec index, 0 for envelope jumps
    double time = 0;      // h_i or the jump time
    double increment = 0; // |x_i - x_{i-}| or jump size
    double coefficient = 0;
    double value = 0;
    bool final_run = false;
};

struct RateValue {
    double value = 0; // may be +inf
    std::vector<RateTerm> breakdown;
    bool infinite() const;
    std::string to_json() const;
};

RateValue rate_of_spec(const StepSpec& spec);
RateValue rate_of_envelopes(const std::vector<std::pair<double, double>>& f,
                            const std::vector<std::pair<double, double>>& g, double s_minus, double s_plus);
RateValue rate_of_envelopes(const Envelopes& e);
RateValue rate_of_measure(const OccupationMeasure& mu);

bool in_K(const StepSpec& spec);
bool in_K(const Envelopes& e);

OccupationMeasure shrink(const OccupationMeasure& mu, double eps);

// Continuous envelopes, constant beyond `support_end`.
struct EnvelopeFunctions {
    std::function<double(double)> f, g;
    double s_minus = kInf, s_plus = kInf;
    double support_end = 1;
};

struct StepApproximation {
    StepSpec spec;
    double rate = 0;
    double last_refinement_gap = 0; // change of the lower sums at the final doubling
    int points = 0;
};

StepApproximation step_approximate(const EnvelopeFunctions& env, double delta, int max_points = 1 << 22);
StepApproximation step_approximate(const Envelopes& env, double delta);

} // namespace sinai
