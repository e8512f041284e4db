#include "sinai/vessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sinai/rate.hpp"

namespace sinai {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sgn(double v) { return v > 0 ? 1 : -1; }

struct Sample {
    double t, f;
};

// interpolated values at a and b plus every node strictly between, in order from a to b
std::vector<Sample> samples(const GridPath& p, double a, double b) {
    std::vector<Sample> s;
    bool rev = b < a;
    double lo = std::min(a, b), hi = std::max(a, b);
    s.push_back({lo, p.at(lo)});
    double first = std::floor(lo / p.dt) + 1;
    for (double k = first; k * p.dt < hi; ++k) {
        long i = long(k) + long(p.left_n);
        if (i < 0 || i >= long(p.size())) continue;
        s.push_back({k * p.dt, p.values[std::size_t(i)]});
    }
    if (hi > lo) s.push_back({hi, p.at(hi)});
    if (rev) std::reverse(s.begin(), s.end());
    return s;
}

} // namespace

VesselSpec::VesselSpec(StepSpec spec, double delta, double eps) : spec_(std::move(spec)), delta_(delta), eps_(eps) {
    const int N = spec_.N();
    if (N < 1) throw std::invalid_argument("VesselSpec: empty step spec");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("VesselSpec: delta must lie in (0,1)");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("VesselSpec: eps must lie in (0,1)");
    if (!(eps < spec_.mesh() / 2)) throw std::invalid_argument("VesselSpec: eps must be below mesh/2");
    const int q = spec_.q();
    for (int i = 2; i < q; ++i)
        if (!(-eps * spec_.H(i) + eps * eps * spec_.H(i) < -eps * spec_.H(i - 1)))
            throw std::invalid_argument("VesselSpec: hole " + std::to_string(i) +
                                        " is not deeper than hole " + std::to_string(i - 1) + " (eps too large)");
    // the v_i brackets must be ordered
    int ab = std::max(spec_.alpha(), spec_.beta());
    double prev_hi = spec_.H(1) + eps * (spec_.H(1) + eps * spec_.H(ab));
    for (int i = 2; i <= N; ++i) {
        int im = spec_.minus(i);
        double lo = im >= q ? spec_.H(i) : spec_.H(i) + (eps - eps * eps) * spec_.H(i - 1);
        double hi = im >= q ? spec_.H(i) * (1 + eps) : spec_.H(i) + eps * (spec_.H(i) + spec_.H(i - 1));
        if (!(prev_hi < lo))
            throw std::invalid_argument("VesselSpec: brackets of v_" + std::to_string(i - 1) + " and v_" +
                                        std::to_string(i) + " overlap (eps too large)");
        prev_hi = hi;
    }
    if (!(prev_hi < 2 * spec_.H(N))) throw std::invalid_argument("VesselSpec: v_N bracket reaches 2 h_N");
    for (int i = 1; i <= N; ++i) {
        double wi = std::fabs(w(i)), xi = std::fabs(spec_.X(i));
        if (!(wi * (1 + delta) < xi * (1 - delta)))
            throw std::invalid_argument("VesselSpec: confinement block of E_" + std::to_string(i) +
                                        " is empty (|w_i|(1+delta) >= |x_i|(1-delta))");
    }
    build_wing(1);
    build_wing(-1);
}

double VesselSpec::w(int i) const {
    if (i == spec_.alpha() || i == spec_.beta()) return spec_.X(i) * delta_;
    return spec_.X(spec_.minus(i));
}

double VesselSpec::wing_end(int wing) const {
    auto& b = blocks(wing);
    return b.empty() ? 0.0 : b.back().t1;
}

bool VesselSpec::reflected_wing(int wing) const { return sgn(spec_.X(spec_.N())) == wing; }

void VesselSpec::build_wing(int sign) {
    auto& out = sign > 0 ? pos_ : neg_;
    const double d = delta_, e = eps_, e2 = eps_ * eps_;
    const int q = spec_.q();
    auto add = [&](int ev, const std::string& kind, double t0, double t1, Leg l) {
        l.duration = t1 - t0;
        l.label = (ev ? "E" + std::to_string(ev) : std::string("E0")) + " " + kind;
        out.push_back({ev, kind, sign, t0, t1, l});
    };
    auto value_leg = [&](double lo, double hi, double h) {
        Leg l;
        l.lo = lo;
        l.hi = hi;
        l.end_lo = 0;
        l.end_hi = h - e * h;
        return l;
    };
    int a = sign > 0 ? spec_.alpha() : spec_.beta();
    double xa = std::fabs(spec_.X(a)), ha = spec_.H(a);
    add(0, "C", 0, xa * d, value_leg(-e2 * ha, ha, ha));
    Leg b0 = value_leg(-e2 * ha, ha + e * ha, ha);
    b0.visit = Leg::Visit::above;
    b0.visit_level = ha;
    b0.guide = true;
    add(0, "B", xa * d, xa * d * (1 + d), b0);
    for (int i = 1; i <= spec_.N(); ++i) {
        if (sgn(spec_.X(i)) != sign) continue;
        double xi = std::fabs(spec_.X(i)), wi = std::fabs(w(i)), hi = spec_.H(i), hp = spec_.H(spec_.plus(i));
        if (i < q) {
            add(i, "C", wi * (1 + d), xi * (1 - d), value_leg(-e2 * hi, hi, hi));
            Leg hl = value_leg(-e * hi, hi, hi);
            hl.visit = Leg::Visit::below;
            hl.visit_level = -e * hi + e2 * hi;
            hl.guide = true;
            add(i, "H", xi * (1 - d), xi, hl);
            Leg bl = value_leg(-e2 * hp, hp + e * hp, hp);
            bl.visit = Leg::Visit::above;
            bl.visit_level = hp;
            bl.guide = true;
            add(i, "B", xi, xi * (1 + d), bl);
        } else {
            Leg cl = value_leg(-e2 * hi, hi, hi);
            cl.reflected = true;
            cl.reflect_anchor = i == q;
            cl.cap_anchor = true;
            cl.cap = e2;
            add(i, "C^R", wi * (1 + d), xi * (1 - d), cl);
            Leg hl = value_leg(0, hi, hi);
            hl.reflected = true;
            hl.cap = e2;
            hl.visit = Leg::Visit::below;
            add(i, "H^R", xi * (1 - d), xi, hl);
            Leg bl = value_leg(-e2 * hp, hp + e * hp, hp);
            bl.reflected = true;
            bl.cap = e2;
            bl.visit = Leg::Visit::above;
            bl.visit_level = hp;
            bl.guide = true;
            add(i, "B^R", xi, xi * (1 + d), bl);
        }
    }
}

Course VesselSpec::course(int wing, double M) const {
    Course c;
    for (auto& b : blocks(wing)) {
        Leg l = b.leg;
        l.duration = (b.t1 - b.t0) * M;
        c.legs.push_back(l);
    }
    return c;
}

std::string VesselSpec::to_json() const {
    nlohmann::json j;
    j["h"] = spec_.h();
    j["x"] = spec_.x();
    j["delta"] = delta_;
    j["eps"] = eps_;
    for (int wing : {1, -1}) {
        auto& arr = j[wing > 0 ? "positive_wing" : "negative_wing"];
        arr = nlohmann::json::array();
        for (auto& b : blocks(wing)) {
            nlohmann::json o = {{"event", b.event}, {"kind", b.kind}, {"t0", b.t0}, {"t1", b.t1}};
            o["band"] = {b.leg.lo, b.leg.hi};
            if (b.leg.visit != Leg::Visit::none)
                o["visit"] = {{"direction", b.leg.visit == Leg::Visit::above ? "above" : "below"},
                              {"level", b.leg.visit_level}};
            o["end_window"] = {b.leg.end_lo, b.leg.end_hi};
            if (std::isfinite(b.leg.cap)) o["cap"] = b.leg.cap;
            arr.push_back(o);
        }
    }
    return j.dump(2);
}

std::string MembershipReport::to_json() const {
    nlohmann::json j;
    j["member"] = member;
    j["first_violation"] = first_violation;
    j["blocks"] = nlohmann::json::array();
    for (auto& b : blocks)
        j["blocks"].push_back({{"event", b.event}, {"wing", b.wing}, {"kind", b.kind}, {"ok", b.ok}, {"reason", b.reason}});
    return j.dump(2);
}

MembershipReport vessel_membership(const GridPath& path, const VesselSpec& v) {
    if (path.t_max() < v.wing_end(1) || -path.t_min() < v.wing_end(-1))
        throw std::domain_error("vessel_membership: path does not cover both wings of the vessel");
    MembershipReport rep;
    for (int wing : {1, -1}) {
        double m = 0, fref = 0;
        for (auto& b : v.blocks(wing)) {
            const Leg& l = b.leg;
            auto s = samples(path, wing * b.t0, wing * b.t1);
            BlockCheck chk{b.event, wing, b.kind, true, ""};
            auto fail = [&](const std::string& why) {
                if (chk.ok) chk.reason = why;
                chk.ok = false;
            };
            if (l.reflect_anchor) m = s.front().f;
            if (l.cap_anchor) fref = s.front().f;
            bool visited = false;
            double cur = 0;
            for (auto& x : s) {
                m = std::min(m, x.f);
                cur = l.reflected ? x.f - m : x.f;
                if (cur < l.lo || cur > l.hi) fail("leaves the band at t=" + std::to_string(x.t));
                if (x.f - fref > l.cap) fail("rises more than the cap at t=" + std::to_string(x.t));
                if (l.visit == Leg::Visit::above && cur > l.visit_level) visited = true;
                if (l.visit == Leg::Visit::below && (l.reflected ? cur <= 0 : cur < l.visit_level)) visited = true;
            }
            if (l.visit != Leg::Visit::none && !visited)
                fail(l.visit == Leg::Visit::above ? "never visits above the barrier level" : "never visits the hole level");
            if (cur < l.end_lo || cur > l.end_hi) fail("ends outside [" + std::to_string(l.end_lo) + ", " +
                                                       std::to_string(l.end_hi) + "]");
            if (!chk.ok && rep.member) {
                rep.member = false;
                rep.first_violation = "E" + std::to_string(b.event) + " " + b.kind + " (wing " +
                                      (wing > 0 ? "+" : "-") + "): " + chk.reason;
            }
            rep.blocks.push_back(chk);
        }
    }
    return rep;
}

GridPath construct_witness(const VesselSpec& v) {
    const auto& sp = v.spec();
    const double e = v.eps();
    double hmin = sp.H(1);
    const double ell = e * e * hmin / 2, rho = e * e * hmin / 2, kappa = e * e * hmin / 16;
    double min_block = std::numeric_limits<double>::infinity();
    for (int wing : {1, -1})
        for (auto& b : v.blocks(wing)) min_block = std::min(min_block, b.t1 - b.t0);
    const double dt = min_block / 12;
    std::vector<std::vector<std::pair<double, double>>> knots(2);
    for (int wing : {1, -1}) {
        auto& k = knots[wing > 0 ? 0 : 1];
        k.push_back({0, 0});
        double cur = 0, m = 0;
        for (auto& b : v.blocks(wing)) {
            double t0 = b.t0, D = b.t1 - b.t0;
            auto at = [&](double frac, double val) { k.push_back({t0 + frac * D, val}); };
            const Leg& l = b.leg;
            if (b.event == 0 && b.kind == "C") {
                at(1.0 / 6, ell);
                at(1, ell);
                cur = ell;
            } else if (b.kind == "C") {
                at(1.0 / 6, cur);
                at(2.0 / 6, ell);
                at(1, ell);
                cur = ell;
            } else if (b.kind == "H") {
                double h = l.hi, dip = -e * h + e * e * h / 2;
                at(1.0 / 6, cur);
                at(2.0 / 6, dip);
                at(0.43, dip - kappa);
                at(4.0 / 6, dip);
                at(5.0 / 6, ell);
                at(1, ell);
                cur = ell;
            } else if (b.kind == "B") {
                double peak = l.visit_level * (1 + e / 2);
                at(1.0 / 6, cur);
                at(2.0 / 6, peak);
                at(4.0 / 6, peak);
                at(5.0 / 6, ell);
                at(1, ell);
                cur = ell;
            } else if (b.kind == "C^R") {
                if (l.reflect_anchor) m = cur;
                // room for the next barrier under the cap
                int i = b.event;
                double hp = sp.H(sp.plus(i));
                double drop = hp * (1 + e / 2) + 2 * rho;
                at(1.0 / 6, cur);
                at(4.0 / 6, cur - drop);
                at(5.0 / 6, cur - drop + rho);
                at(1, cur - drop + rho);
                m = std::min(m, cur - drop);
                cur = cur - drop + rho;
            } else if (b.kind == "H^R") {
                at(1.0 / 6, cur);
                at(0.43, cur - 2 * rho);
                at(5.0 / 6, cur - rho);
                at(1, cur - rho);
                m = std::min(m, cur - 2 * rho);
                cur -= rho;
            } else if (b.kind == "B^R") {
                double peak = m + l.visit_level * (1 + e / 2);
                at(1.0 / 6, cur);
                at(2.0 / 6, peak);
                at(4.0 / 6, peak);
                at(5.0 / 6, m + rho);
                at(1, m + rho);
                cur = m + rho;
            }
        }
        // walls well above 2 h_N so the wells of the witness are resolved past the last depth
        double end = k.back().first, top = -std::numeric_limits<double>::infinity();
        for (auto& kn : k) top = std::max(top, kn.second);
        k.push_back({end + 12 * dt, cur});
        k.push_back({end * 1.05 + 24 * dt, top + 3 * sp.H(sp.N())});
        k.push_back({end * 1.05 + 36 * dt, top + 3 * sp.H(sp.N())});
    }
    auto eval = [&](const std::vector<std::pair<double, double>>& k, double s) {
        auto it = std::upper_bound(k.begin(), k.end(), s, [](double a, const auto& p) { return a < p.first; });
        if (it == k.begin()) return k.front().second;
        if (it == k.end()) return k.back().second;
        auto [t1, v1] = *it;
        auto [t0, v0] = *(it - 1);
        return t1 == t0 ? v1 : v0 + (v1 - v0) * (s - t0) / (t1 - t0);
    };
    std::size_t nl = std::size_t(std::ceil(knots[1].back().first / dt));
    std::size_t nr = std::size_t(std::ceil(knots[0].back().first / dt));
    std::vector<double> vals(nl + nr + 1);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double t = (double(i) - double(nl)) * dt;
        vals[i] = t >= 0 ? eval(knots[0], t) : eval(knots[1], -t);
    }
    vals[nl] = 0.0;
    return GridPath(dt, nl, std::move(vals));
}

double f_sharp(const GridPath& p, double x, double y) {
    if (x == y) return 0.0;
    auto s = samples(p, x, y); // ordered from x to y
    double best = 0, run = std::numeric_limits<double>::infinity();
    if (x < y) {
        for (auto& a : s) {
            run = std::min(run, a.f);
            best = std::max(best, a.f - run);
        }
    } else {
        // t <= s, both in [y, x]: f(t) - f(s) with s to the right of t; scan from x towards y
        for (auto& a : s) {
            run = std::min(run, a.f);
            best = std::max(best, a.f - run);
        }
    }
    return best;
}

namespace {
double max_on(const GridPath& p, double a, double b) {
    double m = -std::numeric_limits<double>::infinity();
    for (auto& s : samples(p, a, b)) m = std::max(m, s.f);
    return m;
}
double min_on(const GridPath& p, double a, double b) {
    double m = std::numeric_limits<double>::infinity();
    for (auto& s : samples(p, a, b)) m = std::min(m, s.f);
    return m;
}
} // namespace

VProfile v_profile(const GridPath& path, const VesselSpec& v) {
    const auto& sp = v.spec();
    const int N = sp.N(), q = sp.q();
    const double d = v.delta(), e = v.eps();
    int ab = std::max(sp.alpha(), sp.beta());
    VProfile out;
    out.v.resize(std::size_t(N + 2));
    double end1 = sp.X(1) * d * (1 + d);
    out.h1_tilde = max_on(path, 0, end1);
    double endab = sp.X(ab) * d * (1 + d);
    out.z1 = endab;
    auto s = samples(path, 0, endab);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k].f >= out.h1_tilde) {
            if (k == 0) out.z1 = s[k].t;
            else {
                double f0 = s[k - 1].f, f1 = s[k].f;
                out.z1 = s[k - 1].t + (s[k].t - s[k - 1].t) * (out.h1_tilde - f0) / (f1 - f0);
            }
            break;
        }
    }
    {
        auto& b = out.v[1];
        b.value = out.h1_tilde - min_on(path, out.z1, end1);
        b.lo = sp.H(1);
        b.hi = sp.H(1) + e * (sp.H(1) + e * sp.H(ab));
    }
    for (int i = 2; i <= N; ++i) {
        auto& b = out.v[std::size_t(i)];
        int im = sp.minus(i);
        if (i == ab || (im >= 1 && im < q)) {
            if (i == ab) b.value = f_sharp(path, sp.X(i - 1), sp.X(i) * d * (1 + d));
            else if (i - 1 == im) b.value = f_sharp(path, sp.X(i - 1) * (1 - d), sp.X(i - 1) * (1 + d));
            else b.value = f_sharp(path, sp.X(i - 1), sp.X(im) * (1 + d));
            b.lo = sp.H(i) + (e - e * e) * sp.H(i - 1);
            b.hi = sp.H(i) + e * (sp.H(i) + sp.H(i - 1));
        } else {
            // reflected from w_q(1+delta)
            double anchor = v.w(q) * (1 + d);
            double a = sp.X(im), c = sp.X(im) * (1 + d);
            double m = std::numeric_limits<double>::infinity(), best = -m;
            for (auto& x : samples(path, anchor, c)) {
                m = std::min(m, x.f);
                if (std::fabs(x.t) >= std::fabs(a)) best = std::max(best, x.f - m);
            }
            b.value = best;
            b.lo = sp.H(i);
            b.lo_open = true;
            b.hi = sp.H(i) * (1 + e);
        }
    }
    out.v[std::size_t(N + 1)] = {2 * sp.H(N), 2 * sp.H(N), 2 * sp.H(N), false, true};
    out.all_ok = true;
    for (int i = 1; i <= N; ++i) {
        auto& b = out.v[std::size_t(i)];
        b.ok = (b.lo_open ? b.value > b.lo : b.value >= b.lo) && b.value <= b.hi;
        out.all_ok = out.all_ok && b.ok;
    }
    return out;
}

namespace {
// every value x takes on (a, b]
std::vector<double> values_on(const WellProcess& w, double a, double b) {
    std::vector<double> out;
    double first = w.jumps.empty() ? w.max_depth : w.jumps.front().first;
    if (a < first) out.push_back(0.0);
    for (std::size_t k = 0; k < w.jumps.size(); ++k) {
        double lo = w.jumps[k].first;
        double hi = k + 1 < w.jumps.size() ? w.jumps[k + 1].first : w.max_depth;
        if (lo < b && hi > a && hi > lo) out.push_back(w.jumps[k].second);
    }
    if (b > w.max_depth) out.push_back(0.0);
    return out;
}

double lambda_at(const std::vector<double>& from, const std::vector<double>& to, double h) {
    auto it = std::upper_bound(from.begin(), from.end(), h);
    if (it == from.begin()) return to.front();
    if (it == from.end()) return to.back();
    std::size_t k = std::size_t(it - from.begin());
    double t = (h - from[k - 1]) / (from[k] - from[k - 1]);
    return to[k - 1] + t * (to[k] - to[k - 1]);
}
} // namespace

double skorokhod_distance(const WellProcess& x, const StepSpec& spec, const std::vector<double>& knots) {
    const int N = spec.N();
    const double top = 2 * spec.H(N);
    if (int(knots.size()) != N) throw std::invalid_argument("skorokhod_distance: need one knot per depth");
    std::vector<double> from = {0}, to = {0};
    for (int i = 1; i <= N; ++i) {
        from.push_back(spec.H(i));
        to.push_back(knots[std::size_t(i - 1)]);
    }
    from.push_back(top);
    to.push_back(top);
    for (std::size_t k = 1; k < to.size(); ++k)
        if (!(to[k] > to[k - 1])) return std::numeric_limits<double>::infinity();
    double dist = 0;
    for (std::size_t k = 0; k < from.size(); ++k) dist = std::max(dist, std::fabs(to[k] - from[k]));
    std::vector<double> br(from);
    auto add_pulled = [&](double depth) {
        if (depth > 0 && depth < top) br.push_back(lambda_at(to, from, depth));
    };
    for (auto& j : x.jumps) add_pulled(j.first);
    add_pulled(x.max_depth);
    std::sort(br.begin(), br.end());
    StepFunction phi = StepFunction::from_spec(spec);
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        if (!(br[k + 1] > br[k])) continue;
        double mid = 0.5 * (br[k] + br[k + 1]);
        dist = std::max(dist, std::fabs(x(lambda_at(from, to, mid)) - phi(mid)));
    }
    return dist;
}

Closeness skorokhod_closeness(const GridPath& path, const VesselSpec& v) {
    const auto& sp = v.spec();
    const int N = sp.N();
    const double d = v.delta(), e = v.eps();
    WellProcess wp = wells_process(path);
    VProfile prof = v_profile(path, v);
    Closeness c;
    double xmax = 0;
    for (int i = 1; i <= N; ++i) xmax = std::max(xmax, std::fabs(sp.X(i)));
    c.bound = std::max(2 * e * sp.H(N), d * (1 + d) * xmax);
    c.sandwich_ok = true;
    double lim0 = d * (d + 1) * std::max(std::fabs(sp.X(sp.alpha())), std::fabs(sp.X(sp.beta())));
    for (double x : values_on(wp, -1, prof.v[1].value))
        if (std::fabs(x) > lim0 + 1e-12) {
            c.sandwich_ok = false;
            c.sandwich_failure = "x(h) = " + std::to_string(x) + " on [0, v_1] exceeds " + std::to_string(lim0);
        }
    for (int i = 1; i <= N; ++i) {
        double a = prof.v[std::size_t(i)].value, b = prof.v[std::size_t(i + 1)].value;
        double lo = std::min(sp.X(i) * (1 - d), sp.X(i)), hi = std::max(sp.X(i) * (1 - d), sp.X(i));
        for (double x : values_on(wp, a, b))
            if (x < lo - 1e-12 || x > hi + 1e-12) {
                c.sandwich_ok = false;
                c.sandwich_failure = "x(h) = " + std::to_string(x) + " on (v_" + std::to_string(i) + ", v_" +
                                     std::to_string(i + 1) + "] is outside [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]";
            }
    }
    std::vector<double> ident, matched;
    for (int i = 1; i <= N; ++i) {
        ident.push_back(sp.H(i));
        matched.push_back(prof.v[std::size_t(i)].value);
    }
    c.distance = std::min(skorokhod_distance(wp, sp, ident), skorokhod_distance(wp, sp, matched));
    return c;
}

double vessel_rate(const VesselSpec& v) {
    const auto& sp = v.spec();
    const double d = v.delta(), e = v.eps(), e2 = e * e;
    const double A = M_PI * M_PI / 2, R = M_PI * M_PI / 8;
    double s = 0;
    for (int a : {sp.alpha(), sp.beta()}) {
        double x = std::fabs(sp.X(a)), h = sp.H(a);
        s += A * x * d / (h * h) * (1 / std::pow(1 + e2, 2) + d / std::pow(1 + e + e2, 2));
    }
    for (int i = 1; i <= sp.N(); ++i) {
        double x = sp.X(i), w = v.w(i), h = sp.H(i), hp = sp.H(sp.plus(i));
        if (i < sp.q())
            s += A * (std::fabs(x - w - d * (x + w)) / (h * h * std::pow(1 + e2, 2)) +
                      d * std::fabs(x) / (h * h * std::pow(1 + e, 2)) +
                      d * std::fabs(x) / (hp * hp * std::pow(1 + e + e2, 2)));
        else
            s += R * (std::fabs(x - w - d * w) / (h * h) + d * std::fabs(x) / (hp * hp * std::pow(1 + e, 2)));
    }
    return -s;
}

std::string VesselMc::to_json() const {
    nlohmann::json j = nlohmann::json::parse(fit.to_json());
    j["target"] = target;
    j["finite_target"] = finite_target;
    j["band"] = band;
    j["in_band"] = in_band;
    return j.dump(2);
}

VesselMc mc_vessel_prob(const VesselSpec& v, const std::vector<double>& M_grid, const SmcOptions& opt, uint64_t seed,
                        double band) {
    VesselMc out;
    out.target = -rate_of_spec(v.spec()).value;
    out.finite_target = vessel_rate(v);
    out.band = band;
    if (M_grid.size() < 3) throw std::invalid_argument("mc_vessel_prob: need at least three values of M");
    double worst = -out.finite_target * M_grid.back();
    if (worst > 600)
        throw std::invalid_argument("mc_vessel_prob: P at M=" + std::to_string(M_grid.back()) + " is about exp(-" +
                                    std::to_string(worst) + "), beyond double range");
    std::vector<McEstimate> est;
    for (std::size_t k = 0; k < M_grid.size(); ++k) {
        double M = M_grid[k];
        auto p = run_course(v.course(1, M), opt, seed, 2 * k);
        auto n = run_course(v.course(-1, M), opt, seed, 2 * k + 1);
        out.positive.push_back(p);
        out.negative.push_back(n);
        McEstimate c;
        c.estimate = p.estimate * n.estimate;
        double r1 = p.estimate > 0 ? p.std_error / p.estimate : 0, r2 = n.estimate > 0 ? n.std_error / n.estimate : 0;
        c.std_error = c.estimate * std::sqrt(r1 * r1 + r2 * r2);
        c.n_samples = p.n_samples;
        c.seed = seed;
        c.meta = "vessel, M=" + std::to_string(M) + "; product of independent wing estimates";
        est.push_back(c);
    }
    out.fit = fit_rate(M_grid, est, true);
    out.in_band = std::fabs(out.fit.slope - out.target) <= band * std::fabs(out.target);
    return out;
}

} // namespace sinai
