#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>
#include "sinai/env.hpp"
#include "sinai/mc.hpp"
#include "sinai/occupation.hpp"

namespace sinai {

struct Checkpoint {
    uint64_t n = 0;
    long position = 0;
};

// Positions at n_j = ceil(e^{u_j}), u_j on a uniform grid in log n, plus any extra times.
struct WalkTrajectory {
    std::vector<Checkpoint> checkpoints; // strictly increasing n
    uint64_t env_seed = 0, walk_seed = 0;
    uint64_t max_time = 0;
    double log_step = 0.01;
    long min_site = 0, max_site = 0;

    long at(uint64_t n) const; // position at the last checkpoint <= n
    bool has(uint64_t n) const;
};

struct WalkOptions {
    double a_max = 10;      // n_max = ceil(e^{a_max})
    double log_step = 0.01; // checkpoint spacing in log n
    std::vector<uint64_t> extra_times;
    double width_margin = 4; // required sites per side: margin (log n_max)^2
};

// sites needed on each side for a walk of n steps
long required_width(uint64_t n, double margin = 4);

WalkTrajectory simulate_walk(const StepPotential& pot, const WalkOptions& opt, Rng& rng);

// t -> S(ceil(e^{at})) / (a^2 log log a) on [0,1], sampled at the checkpoints
StepFunction rescaled_path(const WalkTrajectory& traj, double a);
// int_0^1 t^r S(e^{at}) dt / (a^2 log log a), trapezoid on the checkpoint grid
double weighted_integral(const WalkTrajectory& traj, double a, double r);

struct Localization {
    double t = 0;      // log n
    uint64_t n = 0;
    long position = 0;
    double bottom = 0; // x_V(t)
    double deviation = 0;
};

// |S(n) - x_V(log n)| at n = ceil(e^t) for each t
std::vector<Localization> localization_stats(const WalkTrajectory& traj, const StepPotential& pot,
                                             const std::vector<double>& t_grid);

// Hu localization over independent environments: |S(n) - x_V(log n)| / (log n)^2 for each.
// Environments are widened (stream-stably) until x_V(log n) is determined.
struct LocalizationRun {
    std::vector<double> scaled_deviation;
    std::vector<long> widths;
    double median = 0;
    std::string to_json() const;
};
LocalizationRun localization_experiment(const EnvDistribution& dist, std::size_t n_envs, uint64_t n, uint64_t seed,
                                        unsigned workers = 1);

// max c.x subject to A x <= b, x >= 0, with b >= 0 (dense tableau)
struct LpResult {
    double value = 0;
    std::vector<double> x;
    int iterations = 0;
};
LpResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c);

constexpr double kCorollaryBudget = 8.0 / (M_PI * M_PI); // A

struct VariationalResult {
    double greedy = 0;     // best single jump on the grid
    double greedy_at = 0;
    double lp = 0;         // grid linear program over jump sizes
    std::optional<double> closed_form; // (A/2) s0^3 gamma(s0), withheld if t^3 gamma(t) is not nondecreasing
    double s0 = 0;
    bool hypothesis_ok = false;
    std::vector<double> lp_jumps; // argmax step function as jump sizes on the grid
    std::vector<double> grid;
    std::string to_json() const;
};

// sup { int_0^1 gamma f : f nondecreasing, f(0) = 0, int t^-2 df <= A } on a uniform grid of n points
VariationalResult variational_sup(const std::function<double(double)>& gamma, std::size_t n = 10000);
// (4/pi^2) (2/(r+3))^{(r+3)/(r+1)}
double corollary_value(double r);
double corollary_s0(double r);

// Exit time of (-1,1) by standard Brownian motion from 0, by inverse CDF.
class HittingTimeSampler {
public:
    explicit HittingTimeSampler(std::size_t table = 100000, double t_max = 60);
    double survival(double t) const; // P(T > t)
    double sample(Rng& rng) const;

private:
    std::vector<double> t_, logS_;
};
double sample_T(const HittingTimeSampler& s, Rng& rng);

// Walk driven by the diffusion's exit probabilities (scale function of V) with
// iid exit times attached; returns S(n) and the elapsed diffusion time.
struct EmbeddedStep {
    long position = 0;
    double time = 0;
};
EmbeddedStep embedded_walk(const StepPotential& pot, uint64_t n, const HittingTimeSampler& T, Rng& rng);

struct ChiSquare {
    double statistic = 0;
    int dof = 0;
    double p_value = 0;
};
// two-sample chi-square on integer samples, bins with pooled count < min_count merged into the tails
ChiSquare chi_square_two_sample(const std::vector<long>& a, const std::vector<long>& b, int min_count = 5);

void write_csv(const WalkTrajectory& w, std::ostream& os);

} // namespace sinai
