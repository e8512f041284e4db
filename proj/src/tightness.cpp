#include "sinai/tightness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "sinai/confinement.hpp"
#include "sinai/env.hpp"
#include "sinai/occupation.hpp"
#include "sinai/wells.hpp"

namespace sinai {

namespace {
// P_r(reflected path stays below 1 for time s) = P_r(|W| < 1)
double stay_reflected(double s, double r) {
    if (s <= 0) return r < 1 ? 1.0 : 0.0;
    return interval_survival(s, r, -1, 1);
}

// right wing on [0, L] with B - min B < 1 throughout
std::vector<double> conditioned_wing(double L, double dt, Rng& rng) {
    const std::size_t K = std::size_t(std::ceil(L / dt));
    const double h = L / double(K), sq = std::sqrt(h);
    std::vector<double> w(K + 1, 0.0);
    double f = 0, m = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double rest = L - double(k + 1) * h;
        const double top = stay_reflected(rest, 0);
        for (int tries = 0;; ++tries) {
            if (tries > 100000) throw std::runtime_error("tightness: conditioned step rejected 1e5 times");
            double f2 = f + sq * rng.normal();
            double m2 = std::min(m, bridge_min(f, f2, h, rng.uniform()));
            if (f2 - m2 >= 1) continue;
            double acc = bridge_stay(f, f2, h, -std::numeric_limits<double>::infinity(), m2 + 1) *
                         stay_reflected(rest, f2 - m2) / top;
            if (rng.uniform() < acc) {
                f = f2;
                m = m2;
                break;
            }
        }
        w[k + 1] = f;
    }
    return w;
}
} // namespace

TightnessResult tightness_mc(double a, const std::vector<double>& M_grid, std::size_t n, double dt, uint64_t seed,
                             unsigned workers) {
    if (!(a > 0)) throw std::invalid_argument("tightness_mc: a must be positive");
    if (!(dt > 0 && dt < 0.1)) throw std::invalid_argument("tightness_mc: dt must lie in (0, 0.1)");
    if (M_grid.size() < 2) throw std::invalid_argument("tightness_mc: need at least two values of M");
    TightnessResult out;
    out.a = a;
    out.target = -a * M_PI * M_PI / 8;
    std::vector<McEstimate> est;
    for (std::size_t g = 0; g < M_grid.size(); ++g) {
        const double M = M_grid[g], L = a * M;
        std::vector<char> hit(n), bad(n);
        parallel_for(n, workers, [&](std::size_t i) {
            Rng base(seed, g, i);
            Rng c = base.child(0), l = base.child(1), r = base.child(2);
            std::vector<double> rw = conditioned_wing(L, dt, c);
            const double h = L / double(rw.size() - 1);
            std::vector<double> lw{0.0};
            extend_wing(lw, rw.size(), h, l);
            extend_wing(rw, rw.size(), h, r);
            GridPath p;
            for (;;) {
                p = join_wings(h, lw, rw);
                auto cert = certify_depth(p, 1.0);
                if (cert.certain) break;
                if (cert.extend_left) extend_wing(lw, lw.size(), h, l);
                if (cert.extend_right) extend_wing(rw, rw.size(), h, r);
            }
            WellProcess wp = wells_process(p);
            bool pos = false;
            StepFunction phi;
            for (auto& [d, x] : wp.jumps) {
                if (d >= 1) break;
                pos = pos || x > L;
                if (d > 0) {
                    phi.t.push_back(d);
                    phi.v.push_back(x / M);
                } else {
                    phi.v.back() = x / M;
                }
            }
            bool outside = !tightness_set_check(occupation(phi, 1.0), a);
            hit[i] = pos;
            bad[i] = pos && !outside;
        });
        TightnessPoint pt;
        pt.M = M;
        pt.survival = interval_survival(L, 0, -1, 1);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            hits += std::size_t(hit[i]);
            pt.inconsistent += std::size_t(bad[i]);
        }
        pt.conditional = binomial_estimate(hits, n, seed, "P(sup_{h<=1} x_B(h) > aM | R < 1 on [0,aM]), M=" +
                                                               std::to_string(M));
        pt.estimate.estimate = 2 * pt.survival * pt.conditional.estimate;
        pt.estimate.std_error = 2 * pt.survival * pt.conditional.std_error;
        pt.estimate.n_samples = n;
        pt.estimate.seed = seed;
        pt.estimate.meta = "2 S(aM) P(strip 1 exceeded on the positive side | R < 1 on [0,aM])";
        // strip k needs R < k on [0, a k^3 M], i.e. R < 1 on [0, a k M] after scaling
        for (int k = 2; k <= 6; ++k) pt.later_strips += 2 * interval_survival(a * k * M, 0, -1, 1);
        pt.both_sides = pt.survival * pt.survival;
        out.points.push_back(pt);
        est.push_back(pt.estimate);
    }
    out.fit = fit_rate(M_grid, est);
    return out;
}

std::string TightnessResult::to_json() const {
    nlohmann::json j = nlohmann::json::parse(fit.to_json());
    j["a"] = a;
    j["target"] = target;
    j["points"] = nlohmann::json::array();
    for (auto& p : points)
        j["points"].push_back({{"M", p.M},
                               {"survival", p.survival},
                               {"conditional", nlohmann::json::parse(p.conditional.to_json())},
                               {"estimate", p.estimate.estimate},
                               {"std_error", p.estimate.std_error},
                               {"later_strips_bound", p.later_strips},
                               {"both_sides_bound", p.both_sides},
                               {"inconsistent", p.inconsistent}});
    return j.dump(2);
}

} // namespace sinai
