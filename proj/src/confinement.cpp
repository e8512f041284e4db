#include "sinai/confinement.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sinai {

namespace {
constexpr double kPi = M_PI;
constexpr double kInfD = std::numeric_limits<double>::infinity();

void check_time(double tp, const char* who) {
    if (!(tp >= 0.01))
        throw std::domain_error(std::string(who) +
                                ": t/h^2 < 0.01 needs the short-time (image) representation, not the eigen-series");
}

double Phi(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }
} // namespace

double q_kernel(double t, double x, double y, double h, double tol, int n_max) {
    if (!(t > 0 && h > 0)) throw std::domain_error("q_kernel: need t > 0, h > 0");
    if (!(x > 0 && x < h && y > 0 && y < h)) throw std::domain_error("q_kernel: positions outside (0,h)");
    double tp = t / (h * h), xp = x / h, yp = y / h;
    check_time(tp, "q_kernel");
    double s = 0;
    for (int n = 1;; ++n) {
        double e = std::exp(-double(n) * n * kPi * kPi * tp / 2);
        if (n > 1 && e < tol * std::exp(-kPi * kPi * tp / 2)) break;
        if (n > n_max) throw std::domain_error("q_kernel: more than n_max terms needed");
        s += e * (std::sin(n * kPi * xp) * std::sin(n * kPi * yp));
    }
    return 2 * s / h;
}

double confinement_window_prob(double t, double x, double h, double lo, double hi) {
    if (!(t > 0 && h > 0)) throw std::domain_error("confinement_window_prob: need t > 0, h > 0");
    if (!(x > 0 && x < h)) return 0.0;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, h);
    if (!(lo < hi)) return 0.0;
    double tp = t / (h * h), xp = x / h, lp = lo / h, hp = hi / h;
    check_time(tp, "confinement_window_prob");
    double s = 0;
    for (int n = 1;; ++n) {
        double e = std::exp(-double(n) * n * kPi * kPi * tp / 2);
        if (n > 1 && e < 1e-17 * std::exp(-kPi * kPi * tp / 2)) break;
        s += 2 * e * std::sin(n * kPi * xp) * (std::cos(n * kPi * lp) - std::cos(n * kPi * hp)) / (n * kPi);
    }
    return s;
}

double confinement_prob(double t, double x, double h) {
    if (!(t > 0 && h > 0)) throw std::domain_error("confinement_prob: need t > 0, h > 0");
    if (!(x > 0 && x < h)) return 0.0;
    double tp = t / (h * h);
    check_time(tp, "confinement_prob");
    double s = 0;
    for (int n = 1;; n += 2) {
        double e = std::exp(-double(n) * n * kPi * kPi * tp / 2);
        if (n > 1 && e < 1e-17 * std::exp(-kPi * kPi * tp / 2)) break;
        s += e * std::sin(n * kPi * x / h) / n;
    }
    return 4 / kPi * s;
}

double interval_survival(double t, double x, double lo, double hi) {
    if (!(x > lo && x < hi)) return 0.0;
    double L = hi - lo, tp = t / (L * L);
    if (tp >= 0.01) return confinement_prob(t, x - lo, L);
    double y = x - lo, st = std::sqrt(t), s = 0;
    for (int k = -4; k <= 4; ++k) {
        double o = 2 * k * L;
        s += Phi((L - y + o) / st) - Phi((-y + o) / st) - Phi((L + y + o) / st) + Phi((y + o) / st);
    }
    return std::clamp(s, 0.0, 1.0);
}

double fit_c2(int lattice) {
    double c = 0;
    for (int it = 0; it <= lattice; ++it) {
        double t = 1 + 4.0 * it / lattice;
        for (int i = 1; i < lattice; ++i)
            for (int j = 1; j < lattice; ++j) {
                double x = double(i) / lattice, y = double(j) / lattice;
                c = std::max(c, q_kernel(t, x, y) * std::exp(kPi * kPi * t / 2));
            }
    }
    return c;
}

double fit_c1(double eps, int lattice) {
    double c = kInfD;
    for (int it = 0; it <= lattice; ++it) {
        double t = 1 + 4.0 * it / lattice;
        for (int i = 0; i <= lattice; ++i)
            for (int j = 0; j <= lattice; ++j) {
                double x = eps + (1 - 2 * eps) * i / lattice, y = eps + (1 - 2 * eps) * j / lattice;
                c = std::min(c, q_kernel(t, x, y) * std::exp(kPi * kPi * t / 2));
            }
    }
    return c;
}

double fit_exit_constant(double x_max, int lattice) {
    double c = 0;
    for (int i = 1; i <= lattice; ++i) {
        double x = x_max * i / lattice;
        c = std::max(c, interval_survival(x, 0, -1, 1) * std::exp(x * kPi * kPi / 8));
    }
    return c;
}

ConfinementEvent::Kind ConfinementEvent::parse(const std::string& s) {
    if (s == "a" || s == "interval") return Kind::interval;
    if (s == "b" || s == "reflected") return Kind::reflected;
    if (s == "c" || s == "reflected_floor") return Kind::reflected_floor;
    throw std::invalid_argument("unknown confinement event '" + s + "' (a, b or c)");
}

double confinement_target(const ConfinementEvent& e) {
    double h2 = e.h * e.h;
    return e.kind == ConfinementEvent::Kind::reflected ? -kPi * kPi / (8 * h2) : -kPi * kPi / (2 * h2);
}

namespace {
double start_of(const ConfinementEvent& e) {
    if (e.start >= 0) return e.start;
    return e.kind == ConfinementEvent::Kind::interval ? e.h / 2 : 0.0;
}
} // namespace

double confinement_exact(const ConfinementEvent& e, double t) {
    double s = start_of(e);
    switch (e.kind) {
    case ConfinementEvent::Kind::interval:
        return confinement_window_prob(t, s, e.h, e.eps * e.h, (1 - e.eps) * e.h);
    case ConfinementEvent::Kind::reflected:
        // |B| started at w stays below h and ends below (1-eps)h
        return confinement_window_prob(t, s + e.h, 2 * e.h, e.eps * e.h, (2 - e.eps) * e.h);
    default:
        return std::numeric_limits<double>::quiet_NaN();
    }
}

Course confinement_course(const ConfinementEvent& e, double t) {
    Course c;
    Leg l;
    l.duration = t;
    double s = start_of(e);
    switch (e.kind) {
    case ConfinementEvent::Kind::interval:
        c.start = s;
        l.lo = 0;
        l.hi = e.h;
        l.end_lo = e.eps * e.h;
        l.end_hi = (1 - e.eps) * e.h;
        l.label = "interval";
        break;
    case ConfinementEvent::Kind::reflected:
        c.start = s;
        l.lo = -e.h;
        l.hi = e.h;
        l.end_abs = true;
        l.end_lo = 0;
        l.end_hi = (1 - e.eps) * e.h;
        l.label = "reflected";
        break;
    case ConfinementEvent::Kind::reflected_floor:
        c.start = 0;
        l.reflected = true;
        l.reflect_anchor = true;
        l.lo = 0;
        l.hi = e.h;
        l.floor = -e.K;
        l.label = "reflected with floor";
        break;
    }
    c.legs.push_back(l);
    return c;
}

Course reflected_course_via_min(const ConfinementEvent& e, double t) {
    Course c;
    c.start = 0;
    c.start_reflected = start_of(e);
    Leg l;
    l.duration = t;
    l.reflected = true;
    l.reflect_anchor = true;
    l.lo = 0;
    l.hi = e.h;
    l.end_lo = 0;
    l.end_hi = (1 - e.eps) * e.h;
    l.label = "reflected (running-min form)";
    c.legs.push_back(l);
    return c;
}

namespace {
McEstimate estimate(const Course& c, const McConfig& cfg, uint64_t seed, uint64_t stream, double expected) {
    if (cfg.mode == McMode::naive) {
        double hits = expected * double(cfg.naive_samples);
        if (std::isfinite(hits) && hits < 100)
            throw std::invalid_argument("sample size too small: about " + std::to_string(hits) +
                                        " hits expected, need >= 100 (use the particle mode or more samples)");
        return run_course_naive(c, cfg.naive_samples, cfg.smc.dt, seed, stream);
    }
    if (cfg.smc.particles < 100) throw std::invalid_argument("particle mode needs >= 100 particles");
    return run_course(c, cfg.smc, seed, stream);
}
} // namespace

RateFit mc_rate(const ConfinementEvent& e, const std::vector<double>& t_grid, const McConfig& cfg, uint64_t seed) {
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("mc_rate: t_grid must increase");
    std::vector<McEstimate> est;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double t = t_grid[i];
        double expected = e.kind == ConfinementEvent::Kind::reflected_floor ? std::exp(confinement_target(e) * t)
                                                                            : confinement_exact(e, t);
        auto m = estimate(confinement_course(e, t), cfg, seed, i, expected);
        m.meta = "event " + std::string("abc").substr(std::size_t(e.kind), 1) + ", t=" + std::to_string(t) + "; " +
                 m.meta;
        est.push_back(m);
    }
    return fit_rate(t_grid, est);
}

BlockKind parse_block_kind(const std::string& s) {
    if (s == "C") return BlockKind::C;
    if (s == "H") return BlockKind::H;
    if (s == "HR" || s == "H^R") return BlockKind::HR;
    if (s == "B") return BlockKind::B;
    if (s == "Gamma" || s == "G") return BlockKind::Gamma;
    throw std::invalid_argument("unknown block kind '" + s + "' (C, H, HR, B, Gamma)");
}

std::string block_name(BlockKind k) {
    switch (k) {
    case BlockKind::C: return "C";
    case BlockKind::H: return "H";
    case BlockKind::HR: return "HR";
    case BlockKind::B: return "B";
    case BlockKind::Gamma: return "Gamma";
    }
    return "?";
}

double block_target(BlockKind k, const BlockGeometry& g, double eps, double d) {
    const double a = kPi * kPi / 2, r = kPi * kPi / 8;
    double x = g.x, y = g.y, h = g.h;
    switch (k) {
    case BlockKind::C: return -a * (y - x - d * (x + y)) / (h * h * std::pow(1 + eps * eps, 2));
    case BlockKind::H: return -a * d * y / (h * h * std::pow(1 + eps, 2));
    case BlockKind::HR: return -r * d * y / (h * h);
    case BlockKind::B: return -a * d * y / (h * h * std::pow(1 + eps + eps * eps, 2));
    case BlockKind::Gamma:
        return -r * ((y - x - d * x) / (h * h) + d * y / (g.h2 * g.h2 * std::pow(1 + eps, 2)));
    }
    return 0;
}

namespace {
void check_geometry(BlockKind k, const BlockGeometry& g, double eps, double d) {
    if (!(eps > 0 && eps < 1 && d > 0 && d < 1)) throw std::invalid_argument("block: eps, delta must lie in (0,1)");
    if (!(g.x >= 0 && g.x < g.y)) throw std::invalid_argument("block: need 0 <= x < y");
    if (!(g.h > 0)) throw std::invalid_argument("block: need h > 0");
    if (k == BlockKind::C && !(g.x * (1 + d) < g.y * (1 - d)))
        throw std::invalid_argument("block C: x(1+delta) must precede y(1-delta)");
    if (k == BlockKind::Gamma) {
        if (!(g.h < g.h2)) throw std::invalid_argument("block Gamma: need h1 < h2");
        if (!(g.w >= 0 && g.w <= g.x * (1 + d))) throw std::invalid_argument("block Gamma: need 0 <= w <= x(1+delta)");
        if (!(g.x * (1 + d) < g.y * (1 - d)))
            throw std::invalid_argument("block Gamma: x(1+delta) must precede y(1-delta)");
    }
}
} // namespace

Course block_course(BlockKind k, const BlockGeometry& g, double eps, double d, double M) {
    check_geometry(k, g, eps, d);
    Course c;
    double h = g.h;
    c.start = g.z >= 0 ? g.z : (1 - eps) * h / 2;
    Leg l;
    l.end_lo = 0;
    l.end_hi = h - eps * h;
    switch (k) {
    case BlockKind::C:
        l.duration = M * (g.y * (1 - d) - g.x * (1 + d));
        l.lo = -eps * eps * h;
        l.hi = h;
        l.label = "C";
        c.legs.push_back(l);
        break;
    case BlockKind::H:
        l.duration = M * g.y * d;
        l.lo = -eps * h;
        l.hi = h;
        l.visit = Leg::Visit::below;
        l.visit_level = -eps * h + eps * eps * h;
        l.guide = true;
        l.label = "H";
        c.legs.push_back(l);
        break;
    case BlockKind::HR:
        c.start_reflected = c.start;
        c.start = 0;
        l.duration = M * g.y * d;
        l.reflected = l.reflect_anchor = true;
        l.lo = 0;
        l.hi = h;
        l.visit = Leg::Visit::below;
        l.label = "HR";
        c.legs.push_back(l);
        break;
    case BlockKind::B:
        l.duration = M * g.y * d;
        l.lo = -eps * eps * h;
        l.hi = h + eps * h;
        l.visit = Leg::Visit::above;
        l.visit_level = h;
        l.guide = true;
        l.label = "B";
        c.legs.push_back(l);
        break;
    case BlockKind::Gamma: {
        double x1 = g.x * (1 + d), y0 = g.y * (1 - d), y1 = g.y * (1 + d);
        bool free_leg = g.w < x1;
        if (free_leg) {
            Leg f;
            f.duration = M * (x1 - g.w);
            f.reflected = f.reflect_anchor = true;
            f.label = "Gamma lead-in";
            c.legs.push_back(f);
        }
        Leg cr;
        cr.duration = M * (y0 - x1);
        cr.reflected = true;
        cr.reflect_anchor = !free_leg;
        cr.cap_anchor = true;
        cr.cap = eps * eps;
        cr.lo = -eps * eps * h;
        cr.hi = h;
        cr.end_lo = 0;
        cr.end_hi = h - eps * h;
        cr.label = "Gamma C";
        c.legs.push_back(cr);
        Leg hr = cr;
        hr.duration = M * (g.y - y0);
        hr.reflect_anchor = hr.cap_anchor = false;
        hr.lo = 0;
        hr.visit = Leg::Visit::below;
        hr.label = "Gamma HR";
        c.legs.push_back(hr);
        Leg b = hr;
        b.duration = M * (y1 - g.y);
        b.lo = -eps * eps * g.h2;
        b.hi = g.h2 + eps * g.h2;
        b.visit = Leg::Visit::above;
        b.visit_level = g.h2;
        b.end_hi = g.h2 - eps * g.h2;
        b.guide = true;
        b.label = "Gamma B";
        c.legs.push_back(b);
        break;
    }
    }
    return c;
}

RateFit mc_block_cost(BlockKind k, const BlockGeometry& g, double eps, double d, const std::vector<double>& M_grid,
                      const McConfig& cfg, uint64_t seed) {
    std::vector<McEstimate> est;
    for (std::size_t i = 0; i < M_grid.size(); ++i) {
        double M = M_grid[i];
        auto m = estimate(block_course(k, g, eps, d, M), cfg, seed, i, std::exp(block_target(k, g, eps, d) * M));
        m.meta = "block " + block_name(k) + ", M=" + std::to_string(M) + "; " + m.meta;
        est.push_back(m);
    }
    return fit_rate(M_grid, est);
}

} // namespace sinai
