#include "sinai/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace sinai {

StepSpec::StepSpec(std::vector<double> h, std::vector<double> x) : h_(std::move(h)), x_(std::move(x)) {
    if (h_.size() != x_.size()) throw std::invalid_argument("StepSpec: h and x differ in length");
    int n = N();
    for (int i = 0; i < n; ++i) {
        if (!(h_[std::size_t(i)] > (i ? h_[std::size_t(i - 1)] : 0.0)))
            throw std::invalid_argument("StepSpec: depths must be positive and strictly increasing");
        if (!(x_[std::size_t(i)] != 0.0) || !std::isfinite(x_[std::size_t(i)]))
            throw std::invalid_argument("StepSpec: locations must be finite and nonzero");
    }
    minus_.assign(std::size_t(n + 2), 0);
    plus_.assign(std::size_t(n + 2), n + 1);
    int last_pos = 0, last_neg = 0;
    alpha_ = beta_ = n + 1;
    for (int i = 1; i <= n; ++i) {
        double xi = X(i);
        if (xi > 0) {
            if (last_pos && xi < X(last_pos)) throw std::invalid_argument("StepSpec: positive locations must not shrink");
            minus_[std::size_t(i)] = last_pos;
            if (last_pos) plus_[std::size_t(last_pos)] = i;
            else alpha_ = i;
            last_pos = i;
        } else {
            if (last_neg && xi > X(last_neg)) throw std::invalid_argument("StepSpec: negative locations must not shrink");
            minus_[std::size_t(i)] = last_neg;
            if (last_neg) plus_[std::size_t(last_neg)] = i;
            else beta_ = i;
            last_neg = i;
        }
    }
    q_ = n;
    while (q_ > 1 && (X(q_ - 1) > 0) == (X(n) > 0)) --q_;
    if (n == 0) q_ = 1;
}

double StepSpec::H(int i) const {
    if (i <= 0) return 0.0;
    if (i > N()) return N() ? 2.0 * h_.back() : 0.0;
    return h_[std::size_t(i - 1)];
}

double StepSpec::X(int i) const {
    if (i <= 0) return 0.0;
    if (i > N()) return N() ? -x_.front() : 0.0;
    return x_[std::size_t(i - 1)];
}

double StepSpec::mesh() const {
    double m = kInf;
    for (int i = 1; i <= N(); ++i) m = std::min(m, H(i) - H(i - 1));
    return m;
}

StepSpec StepSpec::scaled(double a) const {
    std::vector<double> h(h_), x(x_);
    for (auto& v : h) v *= a;
    for (auto& v : x) v *= a * a;
    return StepSpec(h, x);
}

double StepFunction::operator()(double s) const {
    auto it = std::lower_bound(t.begin(), t.end(), s);
    return v[std::size_t(it - t.begin())];
}

StepFunction StepFunction::from_spec(const StepSpec& s) {
    StepFunction f;
    f.t = s.h();
    f.v.insert(f.v.end(), s.x().begin(), s.x().end());
    return f;
}

double OccupationMeasure::mass() const {
    double m = 0;
    for (auto& s : segments) m += s.t1 - s.t0;
    return m;
}

OccupationMeasure occupation(const StepFunction& phi, double horizon) {
    if (!(horizon > 0)) throw std::invalid_argument("occupation: horizon must be positive");
    if (phi.v.size() != phi.t.size() + 1) throw std::invalid_argument("occupation: malformed step function");
    OccupationMeasure mu;
    mu.horizon = horizon;
    double start = 0;
    for (std::size_t k = 0; k < phi.v.size() && start < horizon; ++k) {
        double end = k < phi.t.size() ? std::min(phi.t[k], horizon) : horizon;
        if (end <= start) continue;
        if (!mu.segments.empty() && mu.segments.back().level == phi.v[k]) mu.segments.back().t1 = end;
        else mu.segments.push_back({start, end, phi.v[k]});
        start = end;
    }
    return mu;
}

OccupationMeasure occupation(const StepSpec& spec, double horizon) {
    return occupation(StepFunction::from_spec(spec), horizon);
}

double Envelopes::eval(const std::vector<std::pair<double, double>>& j, double t) {
    double s = 0;
    for (auto& [tj, d] : j)
        if (tj < t) s += d;
    return s;
}

Envelopes envelopes(const OccupationMeasure& mu) {
    Envelopes e;
    double fp = 0, gn = 0;
    for (auto& s : mu.segments) {
        if (s.t1 <= s.t0) continue;
        if (s.level > 0) {
            if (s.level > fp) e.f.emplace_back(s.t0, s.level - fp);
            else if (s.level < fp) throw std::invalid_argument("envelopes: positive part is not on a nondecreasing graph");
            fp = s.level;
            e.s_plus = std::max(e.s_plus, s.t1);
        } else if (s.level < 0) {
            if (-s.level > gn) e.g.emplace_back(s.t0, -s.level - gn);
            else if (-s.level < gn) throw std::invalid_argument("envelopes: negative part is not on a nonincreasing graph");
            gn = -s.level;
            e.s_minus = std::max(e.s_minus, s.t1);
        }
    }
    return e;
}

namespace {
// per-time cost on [-L, L] plus a point for mass outside the window
double cell_cost(double a, double b, double L) {
    bool ia = std::abs(a) <= L, ib = std::abs(b) <= L;
    if (ia && ib) return std::min(2.0, std::abs(a - b));
    return ia == ib ? 0.0 : 1.0;
}

double window_distance(const OccupationMeasure& mu, const OccupationMeasure& nu, double L) {
    double T = std::min({L, mu.horizon, nu.horizon});
    double d = 0, t = 0;
    std::size_t i = 0, j = 0;
    while (t < T && i < mu.segments.size() && j < nu.segments.size()) {
        const Segment &a = mu.segments[i], &b = nu.segments[j];
        double e = std::min({a.t1, b.t1, T});
        if (e > t) d += (e - t) * cell_cost(a.level, b.level, L);
        t = std::max(t, e);
        if (a.t1 <= t) ++i;
        if (b.t1 <= t) ++j;
    }
    return d;
}
} // namespace

double lw_distance(const OccupationMeasure& mu, const OccupationMeasure& nu) {
    double d = 0, w = 0.5;
    for (int L = 1; L <= 60; ++L, w *= 0.5) d += w * std::min(1.0, window_distance(mu, nu, double(L)));
    return d;
}

OccupationMeasure rescale_measure(const OccupationMeasure& mu, double a) {
    if (!(a > 0)) throw std::invalid_argument("rescale_measure: a must be positive");
    OccupationMeasure r;
    r.horizon = a * mu.horizon;
    for (auto& s : mu.segments) r.segments.push_back({a * s.t0, a * s.t1, a * a * s.level});
    return r;
}

StepFunction z_process(const WellProcess& wp, double a) {
    if (!(a > std::exp(1.0))) throw std::invalid_argument("z_process: a must exceed e");
    double c = a * a * std::log(std::log(a));
    StepFunction z;
    for (auto& [h, x] : wp.jumps) {
        if (h <= 0) z.v[0] = x / c;
        else {
            z.t.push_back(h / a);
            z.v.push_back(x / c);
        }
    }
    if (std::isfinite(wp.max_depth) && !wp.jumps.empty()) {
        z.t.push_back(wp.max_depth / a);
        z.v.push_back(0.0);
    }
    return z;
}

bool in_neighborhood(const OccupationMeasure& nu, const StepSpec& spec, double eps) {
    if (!(eps > 0 && eps < spec.mesh() / 2)) throw std::invalid_argument("in_neighborhood: eps must lie in (0, mesh/2)");
    for (int i = 1; i <= spec.N(); ++i) {
        double lo = spec.H(i) - eps, hi = spec.H(i) + eps, xi = spec.X(i);
        bool hit = false;
        for (auto& s : nu.segments) {
            if (std::min(s.t1, hi) <= std::max(s.t0, lo)) continue;
            if ((xi > 0 && s.level > xi) || (xi < 0 && s.level < xi)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

bool tightness_set_check(const OccupationMeasure& mu, double a) {
    for (auto& s : mu.segments) {
        if (s.t1 <= s.t0) continue;
        double k = std::floor(s.t0) + 1;
        if (std::abs(s.level) > a * k * k * k) return false;
    }
    return true;
}

void write_csv(const OccupationMeasure& mu, std::ostream& os) {
    os << "t0,t1,level\n";
    os.precision(17);
    for (auto& s : mu.segments) os << s.t0 << ',' << s.t1 << ',' << s.level << '\n';
}

std::string to_json(const OccupationMeasure& mu) {
    nlohmann::json j;
    j["horizon"] = std::isfinite(mu.horizon) ? nlohmann::json(mu.horizon) : nlohmann::json("inf");
    j["segments"] = nlohmann::json::array();
    for (auto& s : mu.segments)
        j["segments"].push_back({s.t0, std::isfinite(s.t1) ? nlohmann::json(s.t1) : nlohmann::json("inf"), s.level});
    return j.dump(2);
}

} // namespace sinai
