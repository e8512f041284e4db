#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>
#include "sinai/rng.hpp"

namespace sinai {

struct McEstimate {
    double estimate = 0;
    double std_error = 0;
    std::size_t n_samples = 0;
    uint64_t seed = 0;
    std::string meta;
    std::string to_json() const;
};

McEstimate binomial_estimate(std::size_t hits, std::size_t n, uint64_t seed, std::string meta);

struct RateFit {
    double slope = 0, intercept = 0, slope_std_error = 0;
    double inv_coef = 0, inv_coef_std_error = 0; // c in log P = a + s t + c/t, when fitted
    bool with_inverse_term = false;
    std::vector<double> t_grid;
    std::vector<McEstimate> estimates;
    std::string to_json() const;
};

// Weighted least squares of log P on t (and 1/t if requested), weights from
// delta-method variances. Throws on a zero estimate.
RateFit fit_rate(const std::vector<double>& t, const std::vector<McEstimate>& est, bool inverse_term = false);

// Brownian bridge from a to b over time s: probability of staying inside (lo, hi).
// Either bound may be infinite.
double bridge_stay(double a, double b, double s, double lo, double hi);
// Exact draw of the bridge minimum.
double bridge_min(double a, double b, double s, double u);

// One stretch of a killed-path event. Times are real (already scaled).
struct Leg {
    double duration = 0;
    bool reflected = false;     // constraints read R = f - running min instead of f
    bool reflect_anchor = false; // running min restarts here
    bool cap_anchor = false;     // reference value for `cap` is f at the start of this leg
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    enum class Visit { none, below, above } visit = Visit::none;
    double visit_level = 0;
    double end_lo = -std::numeric_limits<double>::infinity();
    double end_hi = std::numeric_limits<double>::infinity();
    bool end_abs = false; // end window applies to |f|
    double cap = std::numeric_limits<double>::infinity();    // f - f_ref <= cap
    double floor = -std::numeric_limits<double>::infinity(); // running min of f >= floor
    bool guide = false; // importance drift toward the visit level and end window
    std::string label;
};

struct Course {
    double start = 0;
    double start_reflected = 0; // initial R when the first leg is a reflection anchor
    std::vector<Leg> legs;
};

struct SmcOptions {
    std::size_t particles = 4000;
    std::size_t replicas = 16;
    double dt = 1e-2;
    std::size_t min_steps = 16; // per leg
    double ess_fraction = 0.5;
    unsigned workers = 1;
};

// Interacting-particle estimate of P(path in course). Each replica is an
// unbiased estimator; the spread over replicas gives the standard error.
McEstimate run_course(const Course& c, const SmcOptions& opt, uint64_t seed, uint64_t stream = 0);

// Plain Monte Carlo on the same course, one path per sample.
McEstimate run_course_naive(const Course& c, std::size_t n, double dt, uint64_t seed, uint64_t stream = 0);

// Runs fn(i) for i in [0, n) over `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace sinai
