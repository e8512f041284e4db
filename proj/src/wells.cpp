#include "sinai/wells.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace sinai {

double WellProcess::operator()(double h) const {
    if (h <= 0 || h > max_depth || jumps.empty()) return 0.0;
    auto it = std::lower_bound(jumps.begin(), jumps.end(), h,
                               [](const std::pair<double, double>& j, double v) { return j.first < v; });
    if (it == jumps.begin()) return 0.0;
    return std::prev(it)->second;
}

bool WellProcess::sign_monotone() const {
    double pos = 0, neg = 0;
    for (auto& [h, x] : jumps) {
        if (x > 0) {
            if (x < pos) return false;
            pos = x;
        } else if (x < 0) {
            if (-x < neg) return false;
            neg = -x;
        }
    }
    return true;
}

bool is_local_min(const GridPath& p, std::size_t i) {
    const auto& f = p.values;
    return i > 0 && i + 1 < f.size() && f[i - 1] > f[i] && f[i + 1] > f[i];
}

// Plain scan from the bottom outward: the oracle's definition of a well.
Well well_at(const GridPath& p, std::size_t m) {
    if (!is_local_min(p, m)) throw std::invalid_argument("well_of: not a strict local minimum");
    const auto& f = p.values;
    Well w;
    w.im = m;
    std::size_t ia = m;
    std::size_t j = m;
    while (j > 0 && f[j - 1] >= f[m]) {
        --j;
        if (f[j] >= f[ia]) ia = j;
    }
    w.left_truncated = (j == 0);
    std::size_t ic = m;
    j = m;
    while (j + 1 < f.size() && f[j + 1] >= f[m]) {
        ++j;
        if (f[j] >= f[ic]) ic = j;
    }
    w.right_truncated = (j + 1 == f.size());
    w.ia = ia;
    w.ic = ic;
    w.a = p.time(ia);
    w.c = p.time(ic);
    w.bottom = p.time(m);
    w.depth = std::min(f[ia] - f[m], f[ic] - f[m]);
    return w;
}

Well well_of(const GridPath& p, double x0) {
    double x = x0 / p.dt + double(p.left_n);
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9 || r < 0 || r >= double(p.size()))
        throw std::invalid_argument("well_of: location is not a grid point");
    return well_at(p, std::size_t(r));
}

double wells_bruteforce(const GridPath& p, double h) {
    if (!(h > 0)) throw std::invalid_argument("wells_bruteforce: h must be positive");
    const std::size_t o = p.origin();
    bool found = false;
    std::size_t best_len = 0, best_m = 0;
    for (std::size_t m = 1; m + 1 < p.size(); ++m) {
        if (!is_local_min(p, m)) continue;
        Well w = well_at(p, m);
        if (w.depth < h || w.ia > o || w.ic < o) continue;
        std::size_t len = w.ic - w.ia;
        if (!found || len < best_len || (len == best_len && m < best_m)) {
            found = true;
            best_len = len;
            best_m = m;
        }
    }
    return found ? p.time(best_m) : 0.0;
}

namespace {

// One side of the origin, indexed by distance k from it.
struct Wing {
    std::vector<double> f;            // f[k]
    std::vector<double> lo;           // running min over [0,k]
    std::vector<double> hi;           // running max over [0,k]
    std::vector<std::size_t> arg_out; // outermost argmax over [0,k]
    std::vector<std::size_t> arg_in;  // innermost argmax over [0,k]
    std::vector<std::size_t> seg_out; // outermost argmax over [k, next strict record low)
    std::vector<bool> last_seg;       // k lies before any later strict record low

    explicit Wing(std::vector<double> v) : f(std::move(v)) {
        std::size_t n = f.size();
        lo.resize(n);
        hi.resize(n);
        arg_out.resize(n);
        arg_in.resize(n);
        seg_out.resize(n);
        last_seg.assign(n, false);
        lo[0] = hi[0] = f[0];
        for (std::size_t k = 1; k < n; ++k) {
            lo[k] = std::min(lo[k - 1], f[k]);
            hi[k] = std::max(hi[k - 1], f[k]);
            arg_out[k] = f[k] >= hi[k - 1] ? k : arg_out[k - 1];
            arg_in[k] = f[k] > hi[k - 1] ? k : arg_in[k - 1];
        }
        // backward pass; a strict record low at k+1 closes the segment containing k
        bool last = true;
        for (std::size_t k = n; k-- > 0;) {
            bool boundary = (k + 1 < n) && f[k + 1] < lo[k];
            if (boundary) last = false;
            if (k + 1 == n || boundary) seg_out[k] = k;
            else seg_out[k] = f[k] > f[seg_out[k + 1]] ? k : seg_out[k + 1];
            last_seg[k] = last;
        }
    }

    // first k with lo[k] < v, or size() if none
    std::size_t drop_below(double v) const {
        return std::size_t(std::lower_bound(lo.begin(), lo.end(), v, [](double a, double b) { return a >= b; }) -
                           lo.begin());
    }
};

} // namespace

std::vector<WellCandidate> well_candidates(const GridPath& p) {
    const auto& v = p.values;
    const std::size_t o = p.origin();
    Wing R(std::vector<double>(v.begin() + std::ptrdiff_t(o), v.end()));
    Wing L(std::vector<double>(v.rend() - std::ptrdiff_t(o) - 1, v.rend()));
    std::vector<WellCandidate> cs;

    // origin as bottom
    if (is_local_min(p, o)) {
        std::size_t kl = L.drop_below(v[o]), kr = R.drop_below(v[o]);
        WellCandidate c;
        c.im = o;
        c.ia = o - L.arg_out[kl - 1];
        c.ic = o + R.arg_out[kr - 1];
        c.value = v[o];
        c.asc_left = v[c.ia] - v[o];
        c.asc_right = v[c.ic] - v[o];
        c.left_complete = kl < L.f.size();
        c.right_complete = kr < R.f.size();
        c.contains = c.containment_fixed = true;
        cs.push_back(c);
    }
    // bottoms on one wing; the opposite wing only enters through prefix maxima
    auto side = [&](const Wing& S, const Wing& T, bool right) {
        for (std::size_t k = 1; k + 1 < S.f.size(); ++k) {
            double fm = S.f[k];
            if (!(S.f[k - 1] > fm && S.f[k + 1] > fm) || fm > S.lo[k - 1]) continue;
            std::size_t kt = T.drop_below(fm);
            double tmax = T.hi[kt - 1], smax = S.hi[k];
            WellCandidate c;
            c.value = fm;
            c.contains = tmax >= smax;
            bool far_done = !S.last_seg[k], across_done = kt < T.f.size();
            c.containment_fixed = across_done;
            double far_asc = S.f[S.seg_out[k]] - fm;
            double across_asc = std::max(tmax, smax) - fm;
            // the far end stays on the bottom's wing; the end across 0 exists only if 0 is inside
            std::size_t far = S.seg_out[k];
            std::size_t across = c.contains ? T.arg_out[kt - 1] : 0;
            if (right) {
                c.im = o + k;
                c.ia = c.contains ? o - across : o + S.arg_in[k];
                c.ic = o + far;
                c.asc_left = across_asc;
                c.asc_right = far_asc;
                c.left_complete = across_done;
                c.right_complete = far_done;
            } else {
                c.im = o - k;
                c.ia = o - far;
                c.ic = c.contains ? o + across : o - S.arg_in[k];
                c.asc_left = far_asc;
                c.asc_right = across_asc;
                c.left_complete = far_done;
                c.right_complete = across_done;
            }
            cs.push_back(c);
        }
    };
    side(R, L, true);
    side(L, R, false);
    return cs;
}

WellProcess wells_process(const GridPath& p) {
    std::vector<WellCandidate> cs = well_candidates(p);
    std::erase_if(cs, [](const WellCandidate& c) { return !c.contains; });
    std::sort(cs.begin(), cs.end(), [](const WellCandidate& x, const WellCandidate& y) {
        std::size_t lx = x.ic - x.ia, ly = y.ic - y.ia;
        return lx != ly ? lx < ly : x.im < y.im;
    });
    WellProcess w;
    double D = 0;
    for (auto& c : cs) {
        double d = c.depth();
        if (c.left_complete && c.right_complete) w.resolved_depth = std::max(w.resolved_depth, d);
        if (d > D) {
            w.jumps.emplace_back(D, p.time(c.im));
            D = d;
        }
    }
    w.max_depth = D;
    w.resolved_depth = std::min(w.resolved_depth, D);
    return w;
}

WellCertificate certify_depth(const GridPath& p, double h) { return certify_depth(p, well_candidates(p), h); }

WellCertificate certify_depth(const GridPath& p, const std::vector<WellCandidate>& cs, double h) {
    if (!(h > 0)) throw std::invalid_argument("certify_depth: h must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t o = p.origin();
    WellCertificate cert;
    const WellCandidate* W = nullptr;
    std::size_t best = 0;
    for (auto& c : cs) {
        if (!c.contains || c.depth() < h) continue;
        std::size_t len = c.ic - c.ia;
        if (!W || len < best || (len == best && c.im < W->im)) {
            W = &c;
            best = len;
        }
    }
    if (!W) {
        cert.extend_left = cert.extend_right = true;
        return cert;
    }
    cert.location = p.time(W->im);
    // wells with a higher bottom whose depth or containment can still move
    for (auto& c : cs) {
        if (&c == W || !(c.value > W->value)) continue;
        double pl = c.left_complete ? c.asc_left : inf;
        double pr = c.right_complete ? c.asc_right : inf;
        if (!(c.contains || !c.containment_fixed) || std::min(pl, pr) < h) continue;
        if (!c.left_complete) cert.extend_left = true;
        if (!c.right_complete) cert.extend_right = true;
    }
    // bottoms not yet sampled: only beyond a wing that W's scan has not closed,
    // and only when W's bottom sits on the other side of 0
    const auto& v = p.values;
    auto wing_max = [&](bool right) {
        double m = v[o];
        if (right) for (std::size_t i = o; i < v.size(); ++i) m = std::max(m, v[i]);
        else for (std::size_t i = 0; i <= o; ++i) m = std::max(m, v[i]);
        return m;
    };
    auto span_max = [&](std::size_t i, std::size_t j) {
        return *std::max_element(v.begin() + std::ptrdiff_t(i), v.begin() + std::ptrdiff_t(j) + 1);
    };
    if (!W->right_complete && W->im < o) {
        double P = span_max(W->im, o);
        if (P >= wing_max(true) && P - W->value >= h) cert.extend_right = true;
    }
    if (!W->left_complete && W->im > o) {
        double P = span_max(o, W->im);
        if (P >= wing_max(false) && P - W->value >= h) cert.extend_left = true;
    }
    if (W->im == o || (W->left_complete && W->right_complete)) cert.extend_left = cert.extend_right = false;
    cert.certain = !cert.extend_left && !cert.extend_right;
    return cert;
}

bool x_scaling_check(const GridPath& p, double c) {
    if (!(c > 0)) throw std::invalid_argument("x_scaling_check: c must be positive");
    WellProcess a = wells_process(p), b = wells_process(p.brownian_scaled(c));
    if (a.jumps.size() != b.jumps.size()) return false;
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
    if (!close(b.max_depth, c * a.max_depth)) return false;
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        if (!close(b.jumps[k].first, c * a.jumps[k].first)) return false;
        if (!close(b.jumps[k].second, c * c * a.jumps[k].second)) return false;
    }
    return true;
}

double jump_prob_exact(double r) {
    if (!(r >= 1)) throw std::invalid_argument("jump_prob_exact: ratio must be >= 1");
    return (5.0 - 2.0 * std::exp(1.0 - r)) / (3.0 * r * r);
}

void write_csv(const WellProcess& w, std::ostream& os) {
    os << "h,x\n";
    os.precision(17);
    for (auto& [h, x] : w.jumps) os << h << ',' << x << '\n';
}

std::string to_json(const WellProcess& w) {
    nlohmann::json j;
    j["jumps"] = nlohmann::json::array();
    for (auto& [h, x] : w.jumps) j["jumps"].push_back({h, x});
    j["max_depth"] = w.max_depth;
    j["resolved_depth"] = w.resolved_depth;
    j["truncated"] = w.truncated();
    return j.dump(2);
}

} // namespace sinai
