#include "sinai/env.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sinai {

GridPath::GridPath(double dt_, std::size_t left, std::vector<double> vals)
    : dt(dt_), left_n(left), values(std::move(vals)) {
    if (!(dt > 0)) throw std::invalid_argument("GridPath: dt must be positive");
    if (values.empty() || left_n >= values.size()) throw std::invalid_argument("GridPath: origin outside values");
    right_n = values.size() - 1 - left_n;
}

double GridPath::at(double t) const {
    double x = t / dt + double(left_n);
    if (x <= 0) return values.front();
    if (x >= double(values.size() - 1)) return values.back();
    std::size_t i = std::size_t(x);
    double w = x - double(i);
    return values[i] * (1 - w) + values[i + 1] * w;
}

GridPath GridPath::brownian_scaled(double c) const {
    if (!(c > 0)) throw std::invalid_argument("brownian_scaled: c must be positive");
    std::vector<double> v(values);
    for (auto& x : v) x *= c;
    return GridPath(dt * c * c, left_n, std::move(v));
}

GridPath GridPath::mirrored() const {
    std::vector<double> v(values.rbegin(), values.rend());
    return GridPath(dt, right_n, std::move(v));
}

GridPath StepPotential::as_path() const { return GridPath(1.0, std::size_t(-lo), V); }

std::string EnvDistribution::name() const {
    if (kind == Kind::brownian) return "brownian";
    return law == LogOddsLaw::two_point ? "two-point" : "logistic-gaussian";
}

EnvDistribution EnvDistribution::parse(const std::string& name) {
    EnvDistribution d;
    if (name == "brownian") d.kind = Kind::brownian;
    else if (name == "two-point") d.law = LogOddsLaw::two_point;
    else if (name == "logistic-gaussian") d.law = LogOddsLaw::logistic_gaussian;
    else throw std::invalid_argument("unknown environment distribution: " + name);
    return d;
}

void extend_wing(std::vector<double>& wing, std::size_t n, double dt, Rng& rng) {
    if (wing.empty()) wing.push_back(0.0);
    double s = std::sqrt(dt), x = wing.back();
    wing.reserve(wing.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
        x += s * rng.normal();
        wing.push_back(x);
    }
}

GridPath join_wings(double dt, const std::vector<double>& left, const std::vector<double>& right) {
    std::vector<double> v;
    v.reserve(left.size() + right.size());
    for (std::size_t i = left.size(); i-- > 1;) v.push_back(left[i]);
    v.insert(v.end(), right.begin(), right.end());
    return GridPath(dt, left.empty() ? 0 : left.size() - 1, std::move(v));
}

GridPath sample_brownian(double dt, std::size_t left_n, std::size_t right_n, Rng& rng) {
    if (!(dt > 0)) throw std::invalid_argument("sample_brownian: dt must be positive");
    // right wing from sub-stream 0, left from sub-stream 1
    Rng r = rng.child(0), l = rng.child(1);
    std::vector<double> rw{0.0}, lw{0.0};
    extend_wing(rw, right_n, dt, r);
    extend_wing(lw, left_n, dt, l);
    return join_wings(dt, lw, rw);
}

StepPotential potential_from_probs(long lo, const std::vector<double>& probs) {
    if (lo > 0) throw std::invalid_argument("potential: site range must contain 0");
    long hi = lo + long(probs.size()) - 1;
    if (hi < 0) throw std::invalid_argument("potential: site range must contain 0");
    for (double p : probs)
        if (!(p > 0 && p < 1)) throw std::invalid_argument("potential: p_k must lie in (0,1)");
    StepPotential s;
    s.lo = lo;
    s.hi = hi;
    s.probs = probs;
    s.V.assign(probs.size(), 0.0);
    auto rho = [&](long k) { double p = s.p(k); return std::log((1 - p) / p); };
    for (long k = 1; k <= hi; ++k) s.V[std::size_t(k - lo)] = s.v(k - 1) + rho(k);
    for (long k = -1; k >= lo; --k) s.V[std::size_t(k - lo)] = s.v(k + 1) - rho(k + 1);
    return s;
}

StepPotential potential_from_probs(const std::vector<double>& probs_right) {
    std::vector<double> p{0.5};
    p.insert(p.end(), probs_right.begin(), probs_right.end());
    return potential_from_probs(0, p);
}

double sample_log_odds(const EnvDistribution& dist, Rng& rng) {
    if (dist.kind == EnvDistribution::Kind::brownian) return rng.normal();
    if (dist.law == LogOddsLaw::two_point) return rng.uniform() < 0.5 ? -1.0 : 1.0;
    // truncated normal rescaled to unit variance
    double T = dist.truncation;
    double phi = std::exp(-0.5 * T * T) / std::sqrt(2 * M_PI);
    double mass = std::erf(T / std::sqrt(2.0));
    double var = 1.0 - 2.0 * T * phi / mass;
    double z;
    do z = rng.normal();
    while (std::abs(z) > T);
    return z / std::sqrt(var);
}

StepPotential sample_env(const EnvDistribution& dist, long n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_env: n must be >= 1");
    std::vector<double> p(std::size_t(2 * n + 1));
    // site k uses sub-stream k so that widening the range keeps existing sites
    for (long k = -n; k <= n; ++k) {
        Rng r = rng.child(uint64_t(k + (1ll << 40)));
        double rho = sample_log_odds(dist, r);
        p[std::size_t(k + n)] = 1.0 / (1.0 + std::exp(rho));
    }
    return potential_from_probs(-n, p);
}

namespace {
static_assert(std::endian::native == std::endian::little, "SINP I/O assumes a little-endian host");

template <class T> void put(std::ofstream& os, T v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
template <class T> T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("SINP: truncated file");
    return v;
}
} // namespace

void write_sinp(const GridPath& p, const std::string& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file);
    os.write("SINP", 4);
    put<uint32_t>(os, 1);
    put<double>(os, p.dt);
    put<uint64_t>(os, p.left_n);
    put<uint64_t>(os, p.right_n);
    os.write(reinterpret_cast<const char*>(p.values.data()), std::streamsize(p.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + file);
}

GridPath read_sinp(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SINP", 4) != 0) throw std::runtime_error("SINP: bad magic");
    if (get<uint32_t>(is) != 1) throw std::runtime_error("SINP: unsupported version");
    double dt = get<double>(is);
    auto l = get<uint64_t>(is), r = get<uint64_t>(is);
    std::vector<double> v(l + r + 1);
    is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
    if (!is) throw std::runtime_error("SINP: truncated values");
    return GridPath(dt, l, std::move(v));
}

void write_csv(const GridPath& p, std::ostream& os) {
    os << "t,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < p.size(); ++i) os << p.time(i) << ',' << p.values[i] << '\n';
}

} // namespace sinai
