#include "sinai/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sinai {

namespace {
constexpr double kInfD = std::numeric_limits<double>::infinity();

nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

nlohmann::json est_json(const McEstimate& e) {
    return {{"estimate", num(e.estimate)}, {"std_error", num(e.std_error)},
            {"n_samples", e.n_samples},    {"seed", e.seed},
            {"meta", e.meta}};
}
} // namespace

std::string McEstimate::to_json() const { return est_json(*this).dump(2); }

McEstimate binomial_estimate(std::size_t hits, std::size_t n, uint64_t seed, std::string meta) {
    if (n == 0) throw std::invalid_argument("binomial_estimate: no samples");
    double p = double(hits) / double(n);
    return {p, std::sqrt(p * (1 - p) / double(n)), n, seed, std::move(meta)};
}

std::string RateFit::to_json() const {
    nlohmann::json j;
    j["slope"] = num(slope);
    j["slope_std_error"] = num(slope_std_error);
    j["intercept"] = num(intercept);
    if (with_inverse_term) {
        j["inverse_coefficient"] = num(inv_coef);
        j["inverse_coefficient_std_error"] = num(inv_coef_std_error);
    }
    j["t_grid"] = t_grid;
    j["estimates"] = nlohmann::json::array();
    for (auto& e : estimates) j["estimates"].push_back(est_json(e));
    return j.dump(2);
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<McEstimate>& est, bool inverse_term) {
    if (t.size() != est.size()) throw std::invalid_argument("fit_rate: size mismatch");
    const int k = inverse_term ? 3 : 2;
    if (int(t.size()) < k) throw std::invalid_argument("fit_rate: too few grid points");
    double A[3][3] = {}, rhs[3] = {};
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& e = est[i];
        if (!(e.estimate > 0))
            throw std::runtime_error("fit_rate: zero estimate at t=" + std::to_string(t[i]) + " (" + e.meta +
                                     ", n=" + std::to_string(e.n_samples) + "); increase the sample size");
        double rel = e.std_error / e.estimate;
        double w = 1.0 / std::max(rel * rel, 1e-24);
        double x[3] = {1.0, t[i], 1.0 / t[i]};
        double y = std::log(e.estimate);
        for (int a = 0; a < k; ++a) {
            rhs[a] += w * x[a] * y;
            for (int b = 0; b < k; ++b) A[a][b] += w * x[a] * x[b];
        }
    }
    // invert the normal matrix by Gauss-Jordan
    double inv[3][3] = {};
    for (int a = 0; a < k; ++a) inv[a][a] = 1;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        if (A[piv][c] == 0) throw std::runtime_error("fit_rate: singular design");
        std::swap(A[c], A[piv]);
        std::swap(inv[c], inv[piv]);
        double d = A[c][c];
        for (int b = 0; b < k; ++b) A[c][b] /= d, inv[c][b] /= d;
        for (int r = 0; r < k; ++r) {
            if (r == c) continue;
            double f = A[r][c];
            for (int b = 0; b < k; ++b) A[r][b] -= f * A[c][b], inv[r][b] -= f * inv[c][b];
        }
    }
    double beta[3] = {};
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) beta[a] += inv[a][b] * rhs[b];
    RateFit f;
    f.intercept = beta[0];
    f.slope = beta[1];
    f.slope_std_error = std::sqrt(inv[1][1]);
    f.with_inverse_term = inverse_term;
    if (inverse_term) {
        f.inv_coef = beta[2];
        f.inv_coef_std_error = std::sqrt(inv[2][2]);
    }
    f.t_grid = t;
    f.estimates = est;
    return f;
}

double bridge_stay(double a, double b, double s, double lo, double hi) {
    if (!(a > lo && a < hi && b > lo && b < hi)) return 0.0;
    bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
    if (!flo && !fhi) return 1.0;
    if (!fhi) return -std::expm1(-2 * (a - lo) * (b - lo) / s);
    if (!flo) return -std::expm1(-2 * (hi - a) * (hi - b) / s);
    double L = hi - lo, x = a - lo, y = b - lo;
    double p = -std::expm1(-2 * x * y / s);
    for (int k = 1;; ++k) {
        double t = 0;
        for (int sg : {1, -1}) {
            double kl = sg * k * L;
            t += std::exp(-2 * kl * (kl + y - x) / s) - std::exp(-2 * (kl + x) * (kl + y) / s);
        }
        p += t;
        if (2.0 * (k * L - L) * (k * L - L) / s > 40.0 && k >= 2) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

double bridge_min(double a, double b, double s, double u) {
    double d = b - a;
    return 0.5 * (a + b - std::sqrt(d * d - 2 * s * std::log(u)));
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

namespace {

struct Particle {
    double f = 0, m = 0, fref = 0;
    bool visited = false;
    double logw = 0;
};

void validate(const Course& c) {
    bool anchored = false;
    for (auto& l : c.legs) {
        if (!(l.duration >= 0)) throw std::invalid_argument("course: negative leg duration");
        anchored = anchored || l.reflect_anchor;
        if (l.reflected && !anchored) throw std::invalid_argument("course: reflected leg before any anchor");
        if (l.reflected && l.lo > 0) throw std::invalid_argument("course: reflected legs need lo <= 0");
        if (!(l.lo < l.hi)) throw std::invalid_argument("course: empty band in leg " + l.label);
    }
}

void enter_leg(Particle& p, const Leg& l, bool first, const Course& c) {
    if (l.reflect_anchor) p.m = p.f - (first ? c.start_reflected : 0.0);
    if (l.cap_anchor) p.fref = p.f;
    p.visited = false;
}

double leg_hi(const Particle& p, const Leg& l) {
    double h = l.reflected ? p.m + l.hi : l.hi;
    if (std::isfinite(l.cap)) h = std::min(h, p.fref + l.cap);
    return h;
}

double drift(const Particle& p, const Leg& l, double T, double h) {
    double cur = l.reflected ? p.f - p.m : p.f;
    double lo = l.lo, hi = l.hi;
    if (std::isfinite(l.cap)) hi = std::min(hi, (l.reflected ? p.fref - p.m : p.fref) + l.cap);
    double target, horizon;
    if (l.visit != Leg::Visit::none && !p.visited) {
        if (l.visit == Leg::Visit::above)
            target = std::isfinite(hi) ? 0.5 * (l.visit_level + hi) : l.visit_level + 0.5;
        else
            target = std::isfinite(lo) ? 0.5 * (l.visit_level + lo) : l.visit_level - 0.5;
        horizon = std::max(0.5 * T, h);
    } else {
        double a = std::max(l.end_lo, lo), b = std::min(l.end_hi, hi);
        if (!std::isfinite(a) && !std::isfinite(b)) return 0;
        if (cur >= l.end_lo && cur <= l.end_hi) return 0;
        target = std::isfinite(a) && std::isfinite(b) ? 0.5 * (a + b) : (std::isfinite(a) ? a + 0.5 : b - 0.5);
        horizon = std::max(T, h);
    }
    double mu = (target - cur) / horizon;
    double cap = 3.0 / std::sqrt(h);
    return std::clamp(mu, -cap, cap);
}

// One cell of length h. Returns false when the particle is killed.
bool step(Particle& p, const Leg& l, double h, double T, bool guided, Rng& rng) {
    double mu = (guided && l.guide) ? drift(p, l, T, h) : 0.0;
    double a = p.f;
    double d = mu * h + std::sqrt(h) * rng.normal();
    double b = a + d;
    if (mu != 0) p.logw += -mu * d + 0.5 * mu * mu * h;
    p.f = b;
    if (!l.reflected) {
        double hi = l.hi;
        if (std::isfinite(l.cap)) hi = std::min(hi, p.fref + l.cap);
        double p_all = bridge_stay(a, b, h, l.lo, hi);
        double r = rng.uniform();
        if (r >= p_all) return false;
        if (l.visit != Leg::Visit::none && !p.visited) {
            double p_no = l.visit == Leg::Visit::above ? bridge_stay(a, b, h, l.lo, std::min(l.visit_level, hi))
                                                       : bridge_stay(a, b, h, std::max(l.visit_level, l.lo), hi);
            if (r >= p_no) p.visited = true;
        }
        return true;
    }
    double mc = bridge_min(a, b, h, rng.uniform());
    bool newmin = mc < p.m;
    double m2 = std::min(p.m, mc);
    if (m2 < l.floor) return false;
    p.m = m2;
    double hi = leg_hi(p, l);
    double p_all = bridge_stay(a, b, h, -kInfD, hi);
    double r = rng.uniform();
    if (r >= p_all) return false;
    if (!p.visited) {
        // for R, visiting below means touching 0, i.e. a new running minimum
        if (l.visit == Leg::Visit::below && newmin) p.visited = true;
        if (l.visit == Leg::Visit::above) {
            double v = m2 + l.visit_level;
            double p_no = v < hi ? bridge_stay(a, b, h, -kInfD, v) : p_all;
            if (r >= p_no) p.visited = true;
        }
    }
    return true;
}

bool leg_end_ok(const Particle& p, const Leg& l) {
    double cur = l.reflected ? p.f - p.m : p.f;
    if (l.end_abs) cur = std::fabs(cur);
    if (cur < l.end_lo || cur > l.end_hi) return false;
    if (l.visit != Leg::Visit::none && !p.visited) return false;
    return true;
}

std::size_t leg_steps(const Leg& l, const SmcOptions& o) {
    if (l.duration == 0) return 0;
    return std::max<std::size_t>(o.min_steps, std::size_t(std::ceil(l.duration / o.dt)));
}

double run_replica(const Course& c, const SmcOptions& o, Rng rng) {
    const std::size_t N = o.particles;
    std::vector<Particle> ps(N), tmp(N);
    for (auto& p : ps) p.f = c.start;
    std::vector<char> alive(N, 1);
    std::vector<double> w(N);
    double logZ = 0;
    for (std::size_t li = 0; li < c.legs.size(); ++li) {
        const Leg& l = c.legs[li];
        for (auto& p : ps) enter_leg(p, l, li == 0, c);
        std::size_t n = leg_steps(l, o);
        double h = n ? l.duration / double(n) : 0;
        for (std::size_t j = 0; j <= n; ++j) {
            bool last = j == n;
            if (!last) {
                double T = double(n - j) * h;
                for (std::size_t i = 0; i < N; ++i)
                    if (alive[i]) alive[i] = step(ps[i], l, h, T, true, rng);
            } else {
                for (std::size_t i = 0; i < N; ++i)
                    if (alive[i]) alive[i] = leg_end_ok(ps[i], l);
            }
            double mx = -kInfD;
            for (std::size_t i = 0; i < N; ++i)
                if (alive[i]) mx = std::max(mx, ps[i].logw);
            if (!std::isfinite(mx)) return 0.0;
            double s = 0, s2 = 0;
            for (std::size_t i = 0; i < N; ++i) {
                w[i] = alive[i] ? std::exp(ps[i].logw - mx) : 0.0;
                s += w[i];
                s2 += w[i] * w[i];
            }
            bool final_step = last && li + 1 == c.legs.size();
            if (s * s < o.ess_fraction * double(N) * s2 || final_step) {
                logZ += mx + std::log(s / double(N));
                if (final_step) break;
                // systematic resampling
                double u = rng.uniform() * s / double(N), acc = 0;
                std::size_t k = 0;
                for (std::size_t i = 0; i < N; ++i) {
                    acc += w[i];
                    while (k < N && u < acc) {
                        tmp[k] = ps[i];
                        tmp[k].logw = 0;
                        ++k;
                        u += s / double(N);
                    }
                }
                for (; k < N; ++k) {
                    // rounding: fill with the last live particle
                    std::size_t i = N;
                    while (i-- > 0 && !alive[i]) {}
                    tmp[k] = ps[i];
                    tmp[k].logw = 0;
                }
                std::swap(ps, tmp);
                std::fill(alive.begin(), alive.end(), 1);
            }
        }
    }
    return std::exp(logZ);
}

} // namespace

McEstimate run_course(const Course& c, const SmcOptions& o, uint64_t seed, uint64_t stream) {
    validate(c);
    if (o.particles < 2 || o.replicas < 2) throw std::invalid_argument("run_course: need >= 2 particles and replicas");
    std::vector<double> z(o.replicas);
    parallel_for(o.replicas, o.workers, [&](std::size_t r) { z[r] = run_replica(c, o, Rng(seed, stream, r)); });
    double mean = 0;
    for (double v : z) mean += v;
    mean /= double(z.size());
    double var = 0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= double(z.size() - 1);
    McEstimate e;
    e.estimate = mean;
    e.std_error = std::sqrt(var / double(z.size()));
    e.n_samples = o.particles * o.replicas;
    e.seed = seed;
    e.meta = "particle system, " + std::to_string(o.replicas) + " replicas x " + std::to_string(o.particles);
    return e;
}

McEstimate run_course_naive(const Course& c, std::size_t n, double dt, uint64_t seed, uint64_t stream) {
    validate(c);
    SmcOptions o;
    o.dt = dt;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) {
        Rng rng(seed, stream, s);
        Particle p;
        p.f = c.start;
        bool ok = true;
        for (std::size_t li = 0; ok && li < c.legs.size(); ++li) {
            const Leg& l = c.legs[li];
            enter_leg(p, l, li == 0, c);
            std::size_t k = leg_steps(l, o);
            double h = k ? l.duration / double(k) : 0;
            for (std::size_t j = 0; ok && j < k; ++j) ok = step(p, l, h, 0, false, rng);
            ok = ok && leg_end_ok(p, l);
        }
        hits += ok;
    }
    return binomial_estimate(hits, n, seed, "plain Monte Carlo");
}

} // namespace sinai
