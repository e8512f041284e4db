#include "sinai/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

#include <boost/uuid/detail/sha1.hpp>

namespace sinai::cli {

namespace {

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("not finite: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char c) {
    std::vector<std::string> out;
    std::size_t a = 0;
    for (;;) {
        std::size_t b = s.find(c, a);
        out.push_back(s.substr(a, b == std::string::npos ? std::string::npos : b - a));
        if (b == std::string::npos) break;
        a = b + 1;
    }
    return out;
}

Field num(std::string name, std::string help, json fallback, double min = -1e300, bool open = false,
          double max = 1e300) {
    Field f;
    f.name = std::move(name);
    f.help = std::move(help);
    f.fallback = std::move(fallback);
    f.min = min;
    f.min_open = open;
    f.max = max;
    return f;
}

Field typed(FieldType t, std::string name, std::string help, json fallback = nullptr) {
    Field f;
    f.type = t;
    f.name = std::move(name);
    f.help = std::move(help);
    f.fallback = std::move(fallback);
    return f;
}

Field choice(std::string name, std::string help, std::vector<std::string> choices, json fallback) {
    Field f = typed(FieldType::choice, std::move(name), std::move(help), std::move(fallback));
    f.choices = std::move(choices);
    return f;
}

Field count(std::string name, std::string help, json fallback, double min = 0) {
    Field f = typed(FieldType::count, std::move(name), std::move(help), std::move(fallback));
    f.min = min;
    return f;
}

std::vector<VerbSchema> build() {
    const double eps_max = 0.5;
    std::vector<VerbSchema> v = {
        {"env",
         "sample an environment",
         {choice("dist", "environment law", {"brownian", "two-point", "logistic-gaussian"}, "brownian"),
          count("n", "cells (or sites) per side", 1000, 1), num("dt", "grid spacing of the Brownian path", 0.01, 0, true),
          num("truncation", "logistic-gaussian truncation in standard deviations", 4.0, 0, true)}},
        {"wells",
         "process of wells of a path",
         {typed(FieldType::text, "input", "SINP path file; a Brownian path is sampled when empty", ""),
          count("n", "cells per side when sampling", 1000, 1), num("dt", "grid spacing when sampling", 0.01, 0, true),
          typed(FieldType::grid, "depths", "depths at which x(h) is tabulated", "")}},
        {"rate",
         "rate function of a step spec, both routes",
         {typed(FieldType::list, "h", "jump times h_1 < ... < h_N"), typed(FieldType::list, "x", "values x_1..x_N"),
          num("shrink", "also evaluate the shrunk measure at this eps", 0.0, 0, false, 1),
          num("scale", "also evaluate the rescaled measure at this factor", 1.0, 0, true)}},
        {"confine",
         "confinement probabilities and their decay rate",
         {choice("event", "a: interval, b: reflected, c: reflected with floor", {"a", "b", "c"}, "a"),
          num("h", "band height", 1.0, 0, true), num("eps", "end-window margin", 0.1, 0, false, eps_max),
          num("start", "start point (negative: default)", -1.0), num("K", "floor depth for (c)", 1.0, 0, true),
          typed(FieldType::grid, "t-grid", "times"), choice("mode", "estimator", {"particles", "naive"}, "particles"),
          count("samples", "paths per point (particles times replicas in particle mode)", 64000, 2),
          count("replicas", "independent particle systems", 16, 2), num("dt", "time step", 0.01, 0, true)}},
        {"blocks",
         "cost of one restriction block",
         {choice("kind", "block kind", {"C", "H", "HR", "B", "Gamma"}, "C"), num("x", "band start x", 0.0),
          num("y", "band end y", 1.0), num("h", "height (h1 for Gamma)", 1.0, 0, true),
          num("h2", "Gamma barrier height", 1.2, 0, true), num("w", "Gamma reflection start", 0.0, 0),
          num("z", "start value (negative: default)", -1.0), num("eps", "eps", 0.1, 0, true, eps_max),
          num("delta", "delta", 0.05, 0, true, 1), typed(FieldType::grid, "M-grid", "scales M"),
          choice("fit", "fit with a 1/M term (auto: Gamma only)", {"auto", "linear", "inverse"}, "auto"),
          count("samples", "particles times replicas per point", 64000, 2),
          count("replicas", "independent particle systems", 16, 2), num("dt", "time step", 0.01, 0, true)}},
        {"vessel",
         "vessel membership, witness and probability",
         {choice("mode", "action", {"check", "witness", "mc"}, "witness"), typed(FieldType::list, "h", "jump times"),
          typed(FieldType::list, "x", "values"), num("delta", "delta", 0.05, 0, true, 1),
          num("eps", "eps", 0.05, 0, true, 1), typed(FieldType::text, "input", "SINP path for check", ""),
          typed(FieldType::grid, "M-grid", "scales M for mc", ""),
          count("samples", "particles times replicas per point", 64000, 2),
          count("replicas", "independent particle systems", 16, 2), num("dt", "time step", 0.05, 0, true),
          num("band", "relative band around -I", 0.35, 0, true)}},
        {"walk",
         "Sinai's walk: a trajectory or the localization experiment",
         {choice("mode", "action", {"run", "localize"}, "run"),
          choice("dist", "log-odds law", {"two-point", "logistic-gaussian"}, "two-point"),
          num("a-max", "run length log n_max", 10.0, 0, true, 40),
          num("log-step", "checkpoint spacing in log n", 0.01, 0, true, 1),
          count("width", "sites per side (0: minimal)", 0), count("envs", "environments for localize", 50, 1),
          count("n", "walk length for localize", 1000000, 1)}},
        {"corollary",
         "variational problem for gamma(t) = t^r",
         {num("r", "exponent", 0.0, 0), count("grid", "grid points", 10000, 10)}},
        {"jumpprob",
         "P(x_B(1) = x_B(ratio)) by simulation",
         {num("ratio", "second depth", 2.0, 1), count("samples", "environments", 100000, 10),
          num("dt", "grid spacing", 1e-3, 0, true, 0.1), typed(FieldType::flag, "raw-grid", "skip the extreme shift", false)}},
        {"tightness",
         "first-strip exit probability of the occupation measure",
         {num("a", "strip width", 2.0, 0, true), typed(FieldType::grid, "M-grid", "scales M", "2:8:1"),
          count("samples", "samples per M", 2000, 10), num("dt", "time step", 0.004, 0, true, 0.1)}},
    };
    for (auto& s : v) {
        s.fields.push_back(count("seed", "master seed", 1));
        s.fields.push_back(choice("format", "data file format besides result.json", {"json", "csv"}, "json"));
    }
    v.push_back({"report", "aggregate run directories by criterion", {}});
    return v;
}

json number_value(const Field& f, double v, std::vector<std::string>& errors) {
    bool low = f.min_open ? !(v > f.min) : !(v >= f.min);
    if (low) errors.push_back(f.name + ": must be " + (f.min_open ? "> " : ">= ") + json(f.min).dump());
    if (v > f.max) errors.push_back(f.name + ": must be <= " + json(f.max).dump());
    return v;
}

} // namespace

std::vector<double> parse_grid(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty grid");
    if (s.find(':') != std::string::npos) {
        auto p = split(s, ':');
        if (p.size() != 3) throw std::invalid_argument("range must be start:stop:step: '" + s + "'");
        double a = parse_number(p[0]), b = parse_number(p[1]), h = parse_number(p[2]);
        if (!(h > 0)) throw std::invalid_argument("range step must be positive: '" + s + "'");
        if (b < a) throw std::invalid_argument("range stop below start: '" + s + "'");
        double n = std::floor((b - a) / h + 1e-9);
        if (n > 1e7) throw std::invalid_argument("range too long: '" + s + "'");
        std::vector<double> out;
        for (long k = 0; k <= long(n); ++k) out.push_back(a + double(k) * h);
        return out;
    }
    std::vector<double> out;
    for (auto& t : split(s, ',')) out.push_back(parse_number(t));
    return out;
}

uint64_t parse_count(const std::string& s) {
    double v = parse_number(s);
    if (v < 0 || v != std::floor(v) || v > 9.007199254740992e15)
        throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    return uint64_t(v);
}

const std::vector<VerbSchema>& verb_schemas() {
    static const std::vector<VerbSchema> s = build();
    return s;
}

const VerbSchema& schema_for(const std::string& verb) {
    for (auto& s : verb_schemas())
        if (s.verb == verb) return s;
    throw std::out_of_range("unknown verb: " + verb);
}

json schema_document(const VerbSchema& s) {
    json d = {{"$schema", "http://json-schema.org/draft-07/schema#"},
              {"title", "sinai_lab " + s.verb},
              {"description", s.help},
              {"type", "object"},
              {"additionalProperties", false}};
    json props = json::object(), req = json::array();
    for (auto& f : s.fields) {
        json p = {{"description", f.help}};
        switch (f.type) {
        case FieldType::number:
            p["type"] = "number";
            (f.min_open ? p["exclusiveMinimum"] : p["minimum"]) = f.min;
            if (f.max < 1e300) p["maximum"] = f.max;
            if (f.min <= -1e300) p.erase(f.min_open ? "exclusiveMinimum" : "minimum");
            break;
        case FieldType::integer:
        case FieldType::count:
            p["type"] = "integer";
            p["minimum"] = f.min;
            break;
        case FieldType::grid:
        case FieldType::list:
            p["type"] = "array";
            p["items"] = {{"type", "number"}};
            break;
        case FieldType::choice:
            p["enum"] = f.choices;
            break;
        case FieldType::text:
            p["type"] = "string";
            break;
        case FieldType::flag:
            p["type"] = "boolean";
            break;
        }
        if (f.fallback.is_null()) req.push_back(f.name);
        else if (!(f.fallback == "" && (f.type == FieldType::grid || f.type == FieldType::list)))
            p["default"] = f.fallback;
        props[f.name] = p;
    }
    d["properties"] = props;
    d["required"] = req;
    return d;
}

Validation validate(const VerbSchema& s, const json& raw) {
    Validation out;
    out.config = json::object();
    if (!raw.is_object()) {
        out.errors.push_back("config: must be an object");
        return out;
    }
    for (auto& [k, _] : raw.items()) {
        bool known = false;
        for (auto& f : s.fields) known = known || f.name == k;
        if (!known) out.errors.push_back(k + ": unknown field for verb " + s.verb);
    }
    for (auto& f : s.fields) {
        json v = raw.contains(f.name) ? raw.at(f.name) : f.fallback;
        if (v.is_null()) {
            out.errors.push_back(f.name + ": required");
            continue;
        }
        try {
            switch (f.type) {
            case FieldType::number: {
                double d = v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>();
                out.config[f.name] = number_value(f, d, out.errors);
                break;
            }
            case FieldType::integer:
            case FieldType::count: {
                uint64_t c;
                if (v.is_string()) c = parse_count(v.get<std::string>());
                else if (v.is_number_unsigned()) c = v.get<uint64_t>();
                else if (v.is_number()) c = parse_count(v.dump());
                else throw std::invalid_argument("not a count");
                if (double(c) < f.min) out.errors.push_back(f.name + ": must be >= " + json(f.min).dump());
                out.config[f.name] = c;
                break;
            }
            case FieldType::grid:
            case FieldType::list: {
                std::vector<double> g;
                if (v.is_string()) {
                    if (v.get<std::string>().empty()) {
                        out.config[f.name] = json::array();
                        break;
                    }
                    g = parse_grid(v.get<std::string>());
                } else if (v.is_number()) {
                    g = {v.get<double>()};
                } else {
                    g = v.get<std::vector<double>>();
                }
                for (double x : g)
                    if (!std::isfinite(x)) throw std::invalid_argument("non-finite entry");
                out.config[f.name] = g;
                break;
            }
            case FieldType::choice: {
                std::string c = v.get<std::string>();
                bool ok = false;
                for (auto& x : f.choices) ok = ok || x == c;
                if (!ok) {
                    std::string all;
                    for (auto& x : f.choices) all += (all.empty() ? "" : ", ") + x;
                    out.errors.push_back(f.name + ": '" + c + "' is not one of " + all);
                }
                out.config[f.name] = c;
                break;
            }
            case FieldType::text:
                out.config[f.name] = v.get<std::string>();
                break;
            case FieldType::flag:
                if (v.is_string()) {
                    auto t = v.get<std::string>();
                    if (t == "true" || t == "1") out.config[f.name] = true;
                    else if (t == "false" || t == "0") out.config[f.name] = false;
                    else throw std::invalid_argument("not a boolean: '" + t + "'");
                } else {
                    out.config[f.name] = v.get<bool>();
                }
                break;
            }
        } catch (const std::exception& e) {
            out.errors.push_back(f.name + ": " + e.what());
        }
    }
    return out;
}

std::string git_blob_hash(std::string_view content) {
    boost::uuids::detail::sha1 h;
    std::string head = "blob " + std::to_string(content.size());
    h.process_bytes(head.data(), head.size() + 1); // includes the terminating NUL
    h.process_bytes(content.data(), content.size());
    unsigned int d[5];
    h.get_digest(d);
    char buf[41];
    for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", d[i]);
    return std::string(buf, 40);
}

void write_atomic_with(const std::string& path, const std::function<void(const std::string& tmp)>& writer) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    try {
        writer(tmp);
        fs::rename(tmp, p);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void write_atomic(const std::string& path, std::string_view content) {
    write_atomic_with(path, [&](const std::string& tmp) {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp + ": " + std::strerror(errno));
        os.write(content.data(), std::streamsize(content.size()));
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + tmp);
    });
}

} // namespace sinai::cli
