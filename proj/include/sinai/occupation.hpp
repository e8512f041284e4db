#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sinai/wells.hpp"

namespace sinai {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Depths h_1 < ... < h_N and nonzero locations x_1..x_N. Indices are 1-based;
// index 0 and index N+1 (read as infinity) are the sentinels.
class StepSpec {
public:
    StepSpec() = default;
    StepSpec(std::vector<double> h, std::vector<double> x);

    int N() const { return int(h_.size()); }
    int inf() const { return N() + 1; }
    const std::vector<double>& h() const { return h_; }
    const std::vector<double>& x() const { return x_; }

    double H(int i) const; // h_0 = 0, h_inf = 2 h_N
    double X(int i) const; // x_0 = 0, x_inf = -x_1
    int minus(int i) const { return minus_[std::size_t(i)]; }
    int plus(int i) const { return plus_[std::size_t(i)]; }
    int alpha() const { return alpha_; }
    int beta() const { return beta_; }
    int q() const { return q_; } // first index of the final constant-sign run
    bool in_final_run(int i) const { return i >= q_ && i <= N(); }
    double mesh() const;

    // depths scale by a, locations by a^2
    StepSpec scaled(double a) const;

private:
    std::vector<double> h_, x_;
    std::vector<int> minus_, plus_;
    int alpha_ = 1, beta_ = 1, q_ = 1;
};

// v[0] on [0, t[0]], v[k] on (t[k-1], t[k]], last value beyond.
struct StepFunction {
    std::vector<double> t;
    std::vector<double> v{0.0};

    double operator()(double s) const;
    static StepFunction from_spec(const StepSpec& s);
};

struct Segment {
    double t0, t1, level;
    bool operator==(const Segment&) const = default;
};

struct OccupationMeasure {
    std::vector<Segment> segments; // contiguous, covering [0, horizon]
    double horizon = 0;
    double mass() const;
};

// Left-continuous nondecreasing pure-jump functions.
struct Envelopes {
    std::vector<std::pair<double, double>> f, g; // (time, jump size)
    double s_plus = 0, s_minus = 0;
    static double eval(const std::vector<std::pair<double, double>>& j, double t);
};

OccupationMeasure occupation(const StepFunction& phi, double horizon);
OccupationMeasure occupation(const StepSpec& spec, double horizon = kInf);
Envelopes envelopes(const OccupationMeasure& mu);
double lw_distance(const OccupationMeasure& mu, const OccupationMeasure& nu);
OccupationMeasure rescale_measure(const OccupationMeasure& mu, double a);
StepFunction z_process(const WellProcess& wp, double a);
bool in_neighborhood(const OccupationMeasure& nu, const StepSpec& spec, double eps);
bool tightness_set_check(const OccupationMeasure& mu, double a);

void write_csv(const OccupationMeasure& mu, std::ostream& os);
std::string to_json(const OccupationMeasure& mu);

} // namespace sinai
