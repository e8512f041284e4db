#include "sinai/rate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace sinai {

namespace {
const double kTwoSided = M_PI * M_PI / 2;
const double kOneSided = M_PI * M_PI / 8;
} // namespace

bool RateValue::infinite() const { return std::isinf(value); }

std::string RateValue::to_json() const {
    nlohmann::json j;
    j["value"] = infinite() ? nlohmann::json("inf") : nlohmann::json(value);
    j["breakdown"] = nlohmann::json::array();
    for (auto& t : breakdown)
        j["breakdown"].push_back({{"index", t.index},
                                  {"time", t.time},
                                  {"increment", t.increment},
                                  {"coefficient", t.coefficient},
                                  {"value", std::isinf(t.value) ? nlohmann::json("inf") : nlohmann::json(t.value)},
                                  {"final_run", t.final_run}});
    return j.dump(2);
}

RateValue rate_of_spec(const StepSpec& s) {
    RateValue r;
    for (int i = 1; i <= s.N(); ++i) {
        RateTerm t;
        t.index = i;
        t.time = s.H(i);
        t.increment = std::abs(s.X(i) - s.X(s.minus(i)));
        t.final_run = s.in_final_run(i);
        t.coefficient = t.final_run ? kOneSided : kTwoSided;
        t.value = t.coefficient * t.increment / (t.time * t.time);
        r.value += t.value;
        r.breakdown.push_back(t);
    }
    return r;
}

RateValue rate_of_envelopes(const std::vector<std::pair<double, double>>& f,
                            const std::vector<std::pair<double, double>>& g, double s_minus, double s_plus) {
    // with s_minus finite the roles of the half-planes are exchanged
    if (std::isfinite(s_minus)) {
        std::swap(s_plus, s_minus);
        return rate_of_envelopes(g, f, kInf, s_plus);
    }
    if (!std::isfinite(s_plus) && !(f.empty() && g.empty()))
        throw std::invalid_argument("rate_of_envelopes: both half-planes are occupied up to infinity");
    RateValue r;
    auto add = [&](double t, double d, bool final_run) {
        if (d == 0) return;
        if (d < 0) throw std::invalid_argument("rate_of_envelopes: envelopes must be nondecreasing");
        RateTerm term;
        term.time = t;
        term.increment = d;
        term.final_run = final_run;
        term.coefficient = final_run ? kOneSided : kTwoSided;
        term.value = t > 0 ? term.coefficient * d / (t * t) : kInf;
        r.value += term.value;
        r.breakdown.push_back(term);
    };
    // first integral over [0, s_plus), second over [s_plus, inf)
    for (auto& [t, d] : f) add(t, d, false);
    for (auto& [t, d] : g) add(t, d, !(t < s_plus));
    std::sort(r.breakdown.begin(), r.breakdown.end(), [](const RateTerm& a, const RateTerm& b) { return a.time < b.time; });
    return r;
}

RateValue rate_of_envelopes(const Envelopes& e) { return rate_of_envelopes(e.f, e.g, e.s_minus, e.s_plus); }

RateValue rate_of_measure(const OccupationMeasure& mu) { return rate_of_envelopes(envelopes(mu)); }

bool in_K(const StepSpec& spec) { return rate_of_spec(spec).value <= 1 + 1e-12; }
bool in_K(const Envelopes& e) { return rate_of_envelopes(e).value <= 1 + 1e-12; }

OccupationMeasure shrink(const OccupationMeasure& mu, double eps) {
    if (!(eps >= 0 && eps < 1)) throw std::invalid_argument("shrink: eps must lie in [0,1)");
    OccupationMeasure r = mu;
    for (auto& s : r.segments) s.level *= (1 - eps);
    return r;
}

namespace {
// jumps of a sampled envelope pair turned into a spec; an idle positive step keeps
// negative jumps before s_plus out of the final run
StepSpec spec_from_jumps(std::vector<std::pair<double, double>> f, std::vector<std::pair<double, double>> g,
                         double s_minus, double s_plus) {
    bool swapped = std::isfinite(s_minus);
    if (swapped) {
        std::swap(f, g);
        std::swap(s_minus, s_plus);
    }
    struct Ev { double t; double d; bool upper; };
    std::vector<Ev> ev;
    for (auto& [t, d] : f) if (d > 0) ev.push_back({t, d, true});
    for (auto& [t, d] : g) if (d > 0) ev.push_back({t, d, false});
    std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) { return a.t < b.t || (a.t == b.t && a.upper && !b.upper); });
    double up = 0, lo = 0, last_t = 0;
    std::vector<double> h, x;
    double sign_up = swapped ? -1.0 : 1.0;
    bool need_idle = false;
    for (auto& e : ev) {
        double t = e.t;
        if (!h.empty() && t <= last_t) t = std::nextafter(last_t, kInf);
        if (!e.upper && t >= s_plus && need_idle) {
            double ti = t;
            t = std::nextafter(ti, kInf);
            h.push_back(ti);
            x.push_back(sign_up * std::max(up, 1e-300));
            need_idle = false;
        }
        if (e.upper) {
            up += e.d;
            x.push_back(sign_up * up);
            need_idle = false;
        } else {
            lo += e.d;
            x.push_back(-sign_up * lo);
            if (t < s_plus) need_idle = true;
        }
        h.push_back(t);
        last_t = t;
    }
    if (need_idle && std::isfinite(s_plus)) {
        h.push_back(std::max(s_plus, std::nextafter(last_t, kInf)));
        x.push_back(sign_up * std::max(up, 1e-300));
    }
    return StepSpec(h, x);
}
} // namespace

StepApproximation step_approximate(const Envelopes& env, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("step_approximate: delta must be positive");
    StepApproximation a;
    a.spec = spec_from_jumps(env.f, env.g, env.s_minus, env.s_plus);
    a.rate = rate_of_spec(a.spec).value;
    a.points = a.spec.N();
    return a;
}

StepApproximation step_approximate(const EnvelopeFunctions& env, double delta, int max_points) {
    if (!(delta > 0)) throw std::invalid_argument("step_approximate: delta must be positive");
    double T = env.support_end;
    // lower Stieltjes sums on a partition of [0, T]: t^-2 at the right end of each cell
    auto jumps = [&](const std::function<double(double)>& F, int n) {
        std::vector<std::pair<double, double>> j;
        double prev = F(0);
        for (int k = 1; k <= n; ++k) {
            double t = T * double(k) / n, v = F(t);
            if (v != prev) j.emplace_back(t, v - prev);
            prev = v;
        }
        return j;
    };
    auto lower = [&](int n) {
        return rate_of_envelopes(jumps(env.f, n), jumps(env.g, n), env.s_minus, env.s_plus).value;
    };
    int n = 16;
    double prev = lower(n);
    while (true) {
        if (2 * n > max_points) throw std::runtime_error("step_approximate: partition budget exhausted, gap " + std::to_string(delta));
        double cur = lower(2 * n);
        n *= 2;
        double gap = std::abs(cur - prev);
        prev = cur;
        if (gap < delta / 4) {
            StepApproximation a;
            a.spec = spec_from_jumps(jumps(env.f, n), jumps(env.g, n), env.s_minus, env.s_plus);
            a.rate = rate_of_spec(a.spec).value;
            a.last_refinement_gap = gap;
            a.points = n;
            return a;
        }
    }
}

} // namespace sinai
