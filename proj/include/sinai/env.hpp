#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sinai/rng.hpp"

namespace sinai {

// Two-sided path on a uniform grid, linearly interpolated. Index left_n is t = 0.
struct GridPath {
    double dt = 1.0;
    std::size_t left_n = 0;
    std::size_t right_n = 0;
    std::vector<double> values;

    GridPath() = default;
    GridPath(double dt, std::size_t left_n, std::vector<double> values);

    std::size_t size() const { return values.size(); }
    std::size_t origin() const { return left_n; }
    double time(std::size_t i) const { return (double(i) - double(left_n)) * dt; }
    double t_min() const { return -double(left_n) * dt; }
    double t_max() const { return double(right_n) * dt; }
    bool pinned() const { return values[left_n] == 0.0; }
    double at(double t) const;

    // g(t) = c f(t / c^2)
    GridPath brownian_scaled(double c) const;
    GridPath mirrored() const;
};

// Site probabilities p_k for k in [lo, hi] and V with V(0)=0, V(k)-V(k-1) = log((1-p_k)/p_k).
struct StepPotential {
    long lo = 0;
    long hi = 0;
    std::vector<double> probs;
    std::vector<double> V;

    double p(long k) const { return probs[std::size_t(k - lo)]; }
    double v(long k) const { return V[std::size_t(k - lo)]; }
    long width() const { return hi - lo; }
    GridPath as_path() const;
};

enum class LogOddsLaw { two_point, logistic_gaussian };

struct EnvDistribution {
    enum class Kind { brownian, iid_log_odds } kind = Kind::iid_log_odds;
    LogOddsLaw law = LogOddsLaw::two_point;
    double truncation = 4.0; // for logistic_gaussian, in standard deviations

    static EnvDistribution parse(const std::string& name);
    std::string name() const;
};

GridPath sample_brownian(double dt, std::size_t left_n, std::size_t right_n, Rng& rng);

// wing continuation: appends n Gaussian cells to a one-sided sequence starting at its last value
void extend_wing(std::vector<double>& wing, std::size_t n, double dt, Rng& rng);
GridPath join_wings(double dt, const std::vector<double>& left, const std::vector<double>& right);

StepPotential potential_from_probs(long lo, const std::vector<double>& probs);
// one-sided convenience: probs are p_1..p_n, p_0 = 1/2
StepPotential potential_from_probs(const std::vector<double>& probs_right);

// sites [-n, n], all iid
StepPotential sample_env(const EnvDistribution& dist, long n, Rng& rng);
double sample_log_odds(const EnvDistribution& dist, Rng& rng);

void write_sinp(const GridPath& p, const std::string& file);
GridPath read_sinp(const std::string& file);
void write_csv(const GridPath& p, std::ostream& os);

} // namespace sinai
