#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include "sinai/mc.hpp"

namespace sinai {

// Transition density of Brownian motion killed outside (0, h).
// Eigen-series; t/h^2 below 0.01 is rejected (the series stops being the right tool there).
double q_kernel(double t, double x, double y, double h = 1.0, double tol = 1e-16, int n_max = 64);
// P_x(B[0,t] in (0,h))
double confinement_prob(double t, double x, double h = 1.0);
// P_x(B[0,t] in (0,h), B(t) in [lo,hi])
double confinement_window_prob(double t, double x, double h, double lo, double hi);
// P_x(B[0,t] in (lo,hi)) for any t > 0 (image sum for short times)
double interval_survival(double t, double x, double lo, double hi);

// sup of Q^1(t,x,y) e^{pi^2 t/2} over t >= 1 on a lattice
double fit_c2(int lattice = 40);
// inf of Q^1(t,x,y) e^{pi^2 t/2} over t >= 1 and x,y in [eps, 1-eps]
double fit_c1(double eps, int lattice = 40);
// sup of P_0(B[0,x] in (-1,1)) e^{x pi^2/8} over x in (0, x_max]
double fit_exit_constant(double x_max = 20, int lattice = 400);

struct ConfinementEvent {
    enum class Kind { interval, reflected, reflected_floor } kind = Kind::interval;
    double h = 1;
    double eps = 0;
    double start = -1; // z for (a), w for (b); negative means the default (h/2, resp. 0)
    double K = 1;      // floor depth for (c)
    static Kind parse(const std::string& s);
};

// The closed-form decay rate of each event.
double confinement_target(const ConfinementEvent& e);
// exact probability for (a) and (b); NaN for (c)
double confinement_exact(const ConfinementEvent& e, double t);
Course confinement_course(const ConfinementEvent& e, double t);
// (b) written through R = f - running min, started at R = w
Course reflected_course_via_min(const ConfinementEvent& e, double t);

enum class McMode { particles, naive };

struct McConfig {
    McMode mode = McMode::particles;
    SmcOptions smc;
    std::size_t naive_samples = 100000;
};

RateFit mc_rate(const ConfinementEvent& e, const std::vector<double>& t_grid, const McConfig& cfg, uint64_t seed);

enum class BlockKind { C, H, HR, B, Gamma };
BlockKind parse_block_kind(const std::string& s);
std::string block_name(BlockKind k);

struct BlockGeometry {
    double x = 0, y = 1, h = 1; // h is h1 for Gamma
    double h2 = 2;              // Gamma barrier height
    double w = 0;               // Gamma reflection start
    double z = -1;              // start value; negative means (1-eps)h/2
};

// closed-form M^{-1} log P as M -> infinity
double block_target(BlockKind k, const BlockGeometry& g, double eps, double delta);
Course block_course(BlockKind k, const BlockGeometry& g, double eps, double delta, double M);
RateFit mc_block_cost(BlockKind k, const BlockGeometry& g, double eps, double delta, const std::vector<double>& M_grid,
                      const McConfig& cfg, uint64_t seed);

} // namespace sinai
