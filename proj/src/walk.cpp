#include "sinai/walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "sinai/confinement.hpp"
#include "sinai/wells.hpp"

namespace sinai {

long WalkTrajectory::at(uint64_t n) const {
    auto it = std::upper_bound(checkpoints.begin(), checkpoints.end(), n,
                               [](uint64_t v, const Checkpoint& c) { return v < c.n; });
    if (it == checkpoints.begin()) return 0;
    return (it - 1)->position;
}

bool WalkTrajectory::has(uint64_t n) const {
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n,
                               [](const Checkpoint& c, uint64_t v) { return c.n < v; });
    return it != checkpoints.end() && it->n == n;
}

long required_width(uint64_t n, double margin) {
    double l = std::log(double(std::max<uint64_t>(n, 3)));
    return long(std::ceil(margin * l * l));
}

WalkTrajectory simulate_walk(const StepPotential& pot, const WalkOptions& opt, Rng& rng) {
    if (!(opt.a_max > 0) || opt.a_max > 40) throw std::invalid_argument("simulate_walk: a_max must lie in (0, 40]");
    if (!(opt.log_step > 0)) throw std::invalid_argument("simulate_walk: log_step must be positive");
    const uint64_t n_max = uint64_t(std::ceil(std::exp(opt.a_max)));
    const long need = required_width(n_max, opt.width_margin);
    if (pot.lo > -need || pot.hi < need)
        throw std::invalid_argument("simulate_walk: environment too narrow for n = " + std::to_string(n_max) +
                                    " steps; need sites [-" + std::to_string(need) + ", " + std::to_string(need) +
                                    "], have [" + std::to_string(pot.lo) + ", " + std::to_string(pot.hi) + "]");
    std::vector<uint64_t> times;
    for (std::size_t j = 0;; ++j) {
        double u = double(j) * opt.log_step;
        if (u > opt.a_max) break;
        times.push_back(uint64_t(std::ceil(std::exp(u))));
    }
    times.push_back(n_max);
    for (auto e : opt.extra_times)
        if (e >= 1 && e <= n_max) times.push_back(e);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    WalkTrajectory w;
    w.max_time = n_max;
    w.log_step = opt.log_step;
    long s = 0, smin = 0, smax = 0;
    std::size_t next = 0;
    for (uint64_t n = 1; n <= n_max; ++n) {
        s += rng.uniform() < pot.p(s) ? 1 : -1;
        if (s <= pot.lo || s >= pot.hi)
            throw std::runtime_error("simulate_walk: walk reached site " + std::to_string(s) + " at step " +
                                     std::to_string(n) + "; an environment wider than " +
                                     std::to_string(std::abs(s)) + " sites per side is needed");
        smin = std::min(smin, s);
        smax = std::max(smax, s);
        if (next < times.size() && times[next] == n) {
            w.checkpoints.push_back({n, s});
            ++next;
        }
    }
    w.min_site = smin;
    w.max_site = smax;
    return w;
}

namespace {
double loglog(double a) {
    if (!(a > M_E)) throw std::invalid_argument("rescaling needs a > e");
    return std::log(std::log(a));
}
void check_scale(const WalkTrajectory& traj, double a) {
    if (double(traj.max_time) < std::ceil(std::exp(a)) - 0.5)
        throw std::invalid_argument("rescaling: a exceeds the simulated horizon log n_max");
}
} // namespace

StepFunction rescaled_path(const WalkTrajectory& traj, double a) {
    const double norm = a * a * loglog(a);
    check_scale(traj, a);
    StepFunction f;
    f.v.clear();
    f.v.push_back(0.0);
    for (auto& c : traj.checkpoints) {
        double t = std::log(double(c.n)) / a;
        if (t > 1) break;
        if (t > 0) {
            f.t.push_back(t);
            f.v.push_back(double(c.position) / norm);
        } else {
            f.v.back() = double(c.position) / norm;
        }
    }
    return f;
}

double weighted_integral(const WalkTrajectory& traj, double a, double r) {
    if (!(r >= 0)) throw std::invalid_argument("weighted_integral: r must be >= 0");
    const double norm = a * a * loglog(a);
    check_scale(traj, a);
    std::vector<std::pair<double, double>> pts;
    for (auto& c : traj.checkpoints) {
        double t = std::log(double(c.n)) / a;
        if (t > 1) break;
        pts.push_back({t, std::pow(t, r) * double(c.position)});
    }
    if (pts.empty() || pts.back().first < 1) pts.push_back({1.0, double(traj.at(uint64_t(std::ceil(std::exp(a)))))});
    double s = 0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        s += 0.5 * (pts[k].second + pts[k - 1].second) * (pts[k].first - pts[k - 1].first);
    return s / norm;
}

std::vector<Localization> localization_stats(const WalkTrajectory& traj, const StepPotential& pot,
                                             const std::vector<double>& t_grid) {
    GridPath V = pot.as_path();
    std::vector<Localization> out;
    for (double t : t_grid) {
        uint64_t n = uint64_t(std::ceil(std::exp(t)));
        if (!traj.has(n)) throw std::invalid_argument("localization_stats: no checkpoint at n = " + std::to_string(n));
        Localization l;
        l.t = t;
        l.n = n;
        l.position = traj.at(n);
        if (t > 0) {
            WellCertificate c = certify_depth(V, t);
            if (!c.certain)
                throw std::domain_error(std::string("localization_stats: x_V(") + std::to_string(t) +
                                        ") is not determined by the environment; widen the " +
                                        (c.extend_left ? "left" : "right") + " side");
            l.bottom = c.location;
        }
        l.deviation = std::fabs(double(l.position) - l.bottom);
        out.push_back(l);
    }
    return out;
}

LocalizationRun localization_experiment(const EnvDistribution& dist, std::size_t n_envs, uint64_t n, uint64_t seed,
                                        unsigned workers) {
    if (n < 16) throw std::invalid_argument("localization_experiment: n must be at least 16");
    const double t = std::log(double(n));
    LocalizationRun out;
    out.scaled_deviation.resize(n_envs);
    out.widths.resize(n_envs);
    parallel_for(n_envs, workers, [&](std::size_t e) {
        long width = required_width(n);
        StepPotential pot;
        for (;;) {
            Rng er(seed, 0, e);
            pot = sample_env(dist, width, er);
            if (certify_depth(pot.as_path(), t).certain) break;
            width *= 2;
        }
        Rng wr(seed, 1, e);
        WalkOptions o;
        o.a_max = t;
        o.extra_times = {n};
        auto w = simulate_walk(pot, o, wr);
        out.scaled_deviation[e] = localization_stats(w, pot, {t})[0].deviation / (t * t);
        out.widths[e] = width;
    });
    std::vector<double> s = out.scaled_deviation;
    std::sort(s.begin(), s.end());
    if (!s.empty()) out.median = s.size() % 2 ? s[s.size() / 2] : 0.5 * (s[s.size() / 2 - 1] + s[s.size() / 2]);
    return out;
}

std::string LocalizationRun::to_json() const {
    nlohmann::json j;
    j["median"] = median;
    j["scaled_deviation"] = scaled_deviation;
    j["widths"] = widths;
    j["note"] = "threshold calibrated by a pilot run; the localization theorem's constants are not desk-scale";
    return j.dump(2);
}

LpResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c) {
    const std::size_t m = A.size(), n = c.size();
    for (auto& row : A)
        if (row.size() != n) throw std::invalid_argument("simplex_max: ragged constraint matrix");
    for (double v : b)
        if (v < 0) throw std::invalid_argument("simplex_max: b must be nonnegative");
    // tableau rows 0..m-1 constraints, row m objective; columns n structural, m slack, rhs
    const std::size_t W = n + m + 1;
    std::vector<double> T((m + 1) * W, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return T[i * W + j]; };
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) at(i, j) = A[i][j];
        at(i, n + i) = 1;
        at(i, W - 1) = b[i];
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) at(m, j) = -c[j];
    const double tol = 1e-12;
    LpResult res;
    for (int it = 0; it < 100000; ++it) {
        // Dantzig's rule; Bland's rule after a degenerate pivot
        std::size_t e = W;
        double best = -tol;
        for (std::size_t j = 0; j + 1 < W; ++j)
            if (at(m, j) < best) {
                best = at(m, j);
                e = j;
            }
        if (e == W) break;
        std::size_t r = m;
        double ratio = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (at(i, e) > tol) {
                double q = at(i, W - 1) / at(i, e);
                if (r == m || q < ratio - tol || (std::fabs(q - ratio) <= tol && basis[i] < basis[r])) {
                    r = i;
                    ratio = q;
                }
            }
        if (r == m) throw std::runtime_error("simplex_max: unbounded");
        if (ratio <= tol) {
            for (std::size_t j = 0; j + 1 < W; ++j)
                if (at(m, j) < -tol) {
                    e = j;
                    break;
                }
            r = m;
            for (std::size_t i = 0; i < m; ++i)
                if (at(i, e) > tol) {
                    double q = at(i, W - 1) / at(i, e);
                    if (r == m || q < ratio - tol || (std::fabs(q - ratio) <= tol && basis[i] < basis[r])) {
                        r = i;
                        ratio = q;
                    }
                }
        }
        double piv = at(r, e);
        for (std::size_t j = 0; j < W; ++j) at(r, j) /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == r || at(i, e) == 0) continue;
            double f = at(i, e);
            for (std::size_t j = 0; j < W; ++j) at(i, j) -= f * at(r, j);
        }
        basis[r] = e;
        res.iterations = it + 1;
    }
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = at(i, W - 1);
    res.value = at(m, W - 1);
    return res;
}

double corollary_value(double r) { return 4 / (M_PI * M_PI) * std::pow(2 / (r + 3), (r + 3) / (r + 1)); }
double corollary_s0(double r) { return std::pow(2 / (r + 3), 1 / (r + 1)); }

VariationalResult variational_sup(const std::function<double(double)>& gamma, std::size_t n) {
    using boost::math::quadrature::gauss_kronrod;
    if (n < 3) throw std::invalid_argument("variational_sup: grid needs at least 3 points");
    const double A = kCorollaryBudget;
    VariationalResult out;
    out.grid.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.grid[j] = double(j) / double(n - 1);
    // tail integrals int_{t_j}^1 gamma
    std::vector<double> G(n, 0.0);
    for (std::size_t j = n - 1; j-- > 0;)
        G[j] = G[j + 1] + gauss_kronrod<double, 15>::integrate(gamma, out.grid[j], out.grid[j + 1], 0, 0);
    out.hypothesis_ok = true;
    double prev = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double g = gamma(out.grid[j]);
        if (!(g >= 0)) throw std::invalid_argument("variational_sup: gamma must be nonnegative");
        double v = std::pow(out.grid[j], 3) * g;
        if (v < prev * (1 - 1e-12)) out.hypothesis_ok = false;
        prev = std::max(prev, v);
    }
    for (std::size_t j = 1; j < n; ++j) {
        double v = A * out.grid[j] * out.grid[j] * G[j];
        if (v > out.greedy) {
            out.greedy = v;
            out.greedy_at = out.grid[j];
        }
    }
    // jump d_j at t_j: objective d_j G_j, cost d_j / t_j^2
    std::vector<double> c(n - 1), row(n - 1);
    for (std::size_t j = 1; j < n; ++j) {
        c[j - 1] = G[j];
        row[j - 1] = 1 / (out.grid[j] * out.grid[j]);
    }
    LpResult lp = simplex_max({row}, {A}, c);
    out.lp = lp.value;
    out.lp_jumps.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) out.lp_jumps[j] = lp.x[j - 1];
    // s0: root of 2 int_s^1 gamma = s gamma(s)
    auto g = [&](double s) {
        return 2 * gauss_kronrod<double, 61>::integrate(gamma, s, 1.0, 10, 1e-15) - s * gamma(s);
    };
    double lo = 1e-12, hi = 1.0;
    if (g(lo) > 0 && g(hi) < 0) {
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > 0 ? lo : hi) = mid;
        }
        out.s0 = 0.5 * (lo + hi);
    } else {
        out.s0 = std::numeric_limits<double>::quiet_NaN();
    }
    if (out.hypothesis_ok && std::isfinite(out.s0)) out.closed_form = A / 2 * std::pow(out.s0, 3) * gamma(out.s0);
    return out;
}

std::string VariationalResult::to_json() const {
    nlohmann::json j;
    j["greedy"] = greedy;
    j["greedy_at"] = greedy_at;
    j["lp"] = lp;
    j["closed_form"] = closed_form ? nlohmann::json(*closed_form) : nlohmann::json(nullptr);
    j["s0"] = s0;
    j["hypothesis_ok"] = hypothesis_ok;
    j["grid_points"] = grid.size();
    j["budget"] = kCorollaryBudget;
    nlohmann::json jumps = nlohmann::json::array();
    for (std::size_t k = 0; k < lp_jumps.size(); ++k)
        if (lp_jumps[k] > 0) jumps.push_back({grid[k], lp_jumps[k]});
    j["lp_jumps"] = jumps;
    return j.dump(2);
}

HittingTimeSampler::HittingTimeSampler(std::size_t table, double t_max) {
    if (table < 100 || !(t_max > 1)) throw std::invalid_argument("HittingTimeSampler: bad table parameters");
    const double t_lo = 0.01;
    t_.resize(table);
    logS_.resize(table);
    for (std::size_t k = 0; k < table; ++k) {
        t_[k] = t_lo * std::pow(t_max / t_lo, double(k) / double(table - 1));
        logS_[k] = std::log(survival(t_[k]));
    }
}

double HittingTimeSampler::survival(double t) const {
    if (t <= 0) return 1.0;
    if (t > 40) return 4 / M_PI * std::exp(-M_PI * M_PI * t / 8);
    return interval_survival(t, 0, -1, 1);
}

double HittingTimeSampler::sample(Rng& rng) const {
    double L = std::log(rng.uniform()); // P(T > t) is uniform
    if (L >= logS_.front()) return t_.front();
    if (L < logS_.back()) return 8 / (M_PI * M_PI) * (std::log(4 / M_PI) - L);
    // logS_ decreasing
    auto it = std::lower_bound(logS_.begin(), logS_.end(), L, [](double a, double b) { return a > b; });
    std::size_t k = std::size_t(it - logS_.begin());
    double l0 = logS_[k - 1], l1 = logS_[k];
    return t_[k - 1] + (t_[k] - t_[k - 1]) * (L - l0) / (l1 - l0);
}

double sample_T(const HittingTimeSampler& s, Rng& rng) { return s.sample(rng); }

EmbeddedStep embedded_walk(const StepPotential& pot, uint64_t n, const HittingTimeSampler& T, Rng& rng) {
    EmbeddedStep st;
    long s = 0;
    for (uint64_t k = 0; k < n; ++k) {
        if (s - 1 < pot.lo || s + 1 > pot.hi) throw std::runtime_error("embedded_walk: walk left the environment");
        // exit of (s-1, s+1) at s+1 for the diffusion in potential V: s'(x) = e^{V(x)}, V constant on [k, k+1)
        double right = 1 / (1 + std::exp(pot.v(s) - pot.v(s - 1)));
        s += rng.uniform() < right ? 1 : -1;
        st.time += T.sample(rng);
    }
    st.position = s;
    return st;
}

ChiSquare chi_square_two_sample(const std::vector<long>& a, const std::vector<long>& b, int min_count) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chi_square_two_sample: empty sample");
    std::map<long, std::pair<double, double>> h;
    for (long v : a) h[v].first += 1;
    for (long v : b) h[v].second += 1;
    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> acc{0, 0};
    for (auto& [k, c] : h) {
        acc.first += c.first;
        acc.second += c.second;
        if (acc.first + acc.second >= min_count) {
            bins.push_back(acc);
            acc = {0, 0};
        }
    }
    if (acc.first + acc.second > 0) {
        if (bins.empty()) bins.push_back(acc);
        else {
            bins.back().first += acc.first;
            bins.back().second += acc.second;
        }
    }
    ChiSquare out;
    out.dof = int(bins.size()) - 1;
    if (out.dof < 1) {
        out.p_value = 1;
        return out;
    }
    const double n1 = double(a.size()), n2 = double(b.size());
    const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
    for (auto& [x, y] : bins) out.statistic += std::pow(k1 * x - k2 * y, 2) / (x + y);
    boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

void write_csv(const WalkTrajectory& w, std::ostream& os) {
    os << "t,n,S\n";
    os.precision(17);
    for (auto& c : w.checkpoints) os << std::log(double(c.n)) << ',' << c.n << ',' << c.position << '\n';
}

} // namespace sinai
