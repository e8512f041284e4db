#include <cmath>
#include <stdexcept>
#include <vector>

#include "sinai/env.hpp"
#include "sinai/wells.hpp"

namespace sinai {

McEstimate jump_prob_mc(double ratio, std::size_t n, double dt, uint64_t seed, unsigned workers, bool correct) {
    if (!(ratio >= 1)) throw std::invalid_argument("jump_prob_mc: ratio must be >= 1");
    if (!(dt > 0 && dt < 0.1)) throw std::invalid_argument("jump_prob_mc: dt must lie in (0, 0.1)");
    if (n == 0) throw std::invalid_argument("jump_prob_mc: need at least one sample");
    const double shift = correct ? 2 * kGridExtremeShift * std::sqrt(dt) : 0.0;
    const double h1 = 1 - shift, h2 = ratio - shift;
    std::vector<char> same(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Rng base(seed, 0, i);
        Rng l = base.child(0), r = base.child(1);
        std::vector<double> lw{0.0}, rw{0.0};
        std::size_t chunk = std::size_t(ratio * ratio / dt);
        extend_wing(lw, chunk, dt, l);
        extend_wing(rw, chunk, dt, r);
        for (;;) {
            GridPath p = join_wings(dt, lw, rw);
            auto cs = well_candidates(p);
            auto c1 = certify_depth(p, cs, h1), c2 = certify_depth(p, cs, h2);
            if (c1.certain && c2.certain) {
                same[i] = c1.location == c2.location;
                return;
            }
            if (c1.extend_left || c2.extend_left) extend_wing(lw, lw.size(), dt, l);
            if (c1.extend_right || c2.extend_right) extend_wing(rw, rw.size(), dt, r);
        }
    });
    std::size_t hits = 0;
    for (char c : same) hits += std::size_t(c);
    return binomial_estimate(hits, n, seed,
                             "P(x_B(1) = x_B(" + std::to_string(ratio) + ")), dt=" + std::to_string(dt) +
                                 (correct ? ", depths shifted by 2 beta sqrt(dt)" : ", no grid correction"));
}

} // namespace sinai
