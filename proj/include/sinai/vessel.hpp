#pragma once
#include <string>
#include <vector>
#include "sinai/confinement.hpp"
#include "sinai/mc.hpp"
#include "sinai/occupation.hpp"
#include "sinai/wells.hpp"

namespace sinai {

// One block of the restriction set on one wing. Times t0 < t1 are distances
// from the origin along the wing; the leg carries the band, visit and end window.
struct VesselBlock {
    int event = 0;     // 0 for the start event, i for E_i
    std::string kind;  // C, H, B, C^R, H^R, B^R
    int wing = 1;      // +1 or -1
    double t0 = 0, t1 = 0;
    Leg leg;           // duration t1 - t0 at scale M = 1
};

class VesselSpec {
public:
    VesselSpec(StepSpec spec, double delta, double eps);
    const StepSpec& spec() const { return spec_; }
    double delta() const { return delta_; }
    double eps() const { return eps_; }
    double w(int i) const; // signed, i in 1..N
    // blocks in wing order, starting at the origin
    const std::vector<VesselBlock>& blocks(int wing) const { return wing > 0 ? pos_ : neg_; }
    double wing_end(int wing) const;
    bool reflected_wing(int wing) const; // the final run lives here
    Course course(int wing, double M) const;
    std::string to_json() const;

private:
    void build_wing(int sign);
    StepSpec spec_;
    double delta_, eps_;
    std::vector<VesselBlock> pos_, neg_;
};

struct BlockCheck {
    int event = 0;
    int wing = 1;
    std::string kind;
    bool ok = true;
    std::string reason;
};

struct MembershipReport {
    bool member = true;
    std::string first_violation;
    std::vector<BlockCheck> blocks;
    std::string to_json() const;
};

MembershipReport vessel_membership(const GridPath& path, const VesselSpec& v);

// Piecewise-linear path meeting every block with margin eps^2 min(h)/4.
GridPath construct_witness(const VesselSpec& v);

// f^#(x, y) on the interpolated path, x and y signed times
double f_sharp(const GridPath& path, double x, double y);

struct VBracket {
    double value = 0, lo = 0, hi = 0;
    bool lo_open = false;
    bool ok = false;
};

struct VProfile {
    std::vector<VBracket> v; // index 1..N+1 (v[0] unused)
    double h1_tilde = 0, z1 = 0;
    bool all_ok = false;
};

VProfile v_profile(const GridPath& path, const VesselSpec& v);

struct Closeness {
    double distance = 0;
    double bound = 0;      // max(2 eps h_N, delta(1+delta) max|x_i|)
    bool sandwich_ok = false;
    std::string sandwich_failure;
};

// Skorokhod distance on [0, 2h_N] between x_path and the target step function,
// over a finite family of piecewise-linear time changes (an upper bound).
double skorokhod_distance(const WellProcess& x, const StepSpec& spec, const std::vector<double>& knots);
Closeness skorokhod_closeness(const GridPath& path, const VesselSpec& v);

// M^{-1} log P(B(M .) in R) as M -> infinity at fixed (delta, eps): minus the block-cost sum
double vessel_rate(const VesselSpec& v);

struct VesselMc {
    RateFit fit;          // log P against M, with a 1/M term
    double target = 0;    // -I(h, x)
    double finite_target = 0;
    double band = 0.35;
    bool in_band = false;
    std::vector<McEstimate> positive, negative;
    std::string to_json() const;
};

VesselMc mc_vessel_prob(const VesselSpec& v, const std::vector<double>& M_grid, const SmcOptions& opt, uint64_t seed,
                        double band = 0.35);

} // namespace sinai
