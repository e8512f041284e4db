// sinai_lab: experiments over environments, wells, rates, vessels and walks.
// Every run writes result.json, data files and manifest.json into one directory.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "sinai/cli.hpp"
#include "sinai/confinement.hpp"
#include "sinai/rate.hpp"
#include "sinai/targets.hpp"
#include "sinai/tightness.hpp"
#include "sinai/vessel.hpp"
#include "sinai/walk.hpp"
#include "sinai/wells.hpp"

using namespace sinai;
using namespace sinai::cli;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Check {
    int criterion = 0;
    std::string name;
    double value = 0, target = 0, tolerance = 0;
    bool relative = false;
    bool bound = false; // value must not exceed target (or stay above it when tolerance < 0)
    bool pass = false;

    json to_json() const {
        double dev = relative ? std::fabs(value / target - 1) : std::fabs(value - target);
        return {{"criterion", criterion}, {"name", name},         {"value", value},
                {"target", target},       {"tolerance", tolerance}, {"relative", relative},
                {"deviation", bound ? value - target : dev},       {"pass", pass}};
    }
};

Check within(int id, const std::string& name, double value, double target, double tol, bool relative) {
    Check c{id, name, value, target, tol, relative};
    double dev = relative ? std::fabs(value / target - 1) : std::fabs(value - target);
    c.pass = dev <= tol;
    return c;
}

const AcceptanceTarget& table(int id, const std::string& name) {
    for (auto& t : acceptance_targets())
        if (t.criterion == id && t.name == name) return t;
    throw std::logic_error("missing target " + name);
}

struct Output {
    json result = json::object();
    std::map<std::string, std::string> files;     // name -> content
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>> writers;
    std::vector<Check> checks;
};

std::string csv_of(const std::function<void(std::ostream&)>& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

json parsed(const std::string& s) { return json::parse(s); }

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("input: cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

StepSpec spec_of(const json& c) {
    try {
        return StepSpec(c["h"].get<std::vector<double>>(), c["x"].get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("h/x: ") + e.what());
    }
}

json fit_json(const RateFit& f) { return parsed(f.to_json()); }

void add_sinp(Output& o, const std::string& name, const GridPath& p) {
    o.writers.emplace_back(name, [p](const std::string& tmp) { write_sinp(p, tmp); });
}

// ---- verbs ----------------------------------------------------------------

Output run_env(const json& c, unsigned) {
    Output o;
    auto dist = EnvDistribution::parse(c["dist"]);
    dist.truncation = c["truncation"];
    Rng rng(c["seed"].get<uint64_t>());
    std::size_t n = c["n"];
    GridPath p = dist.kind == EnvDistribution::Kind::brownian ? sample_brownian(c["dt"], n, n, rng)
                                                              : sample_env(dist, long(n), rng).as_path();
    auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
    o.result = {{"dist", dist.name()}, {"points", p.size()}, {"dt", p.dt}, {"t_min", p.t_min()},
                {"t_max", p.t_max()},  {"min", *lo},         {"max", *hi}};
    add_sinp(o, "env.sinp", p);
    if (c["format"] == "csv") o.files["env.csv"] = csv_of([&](std::ostream& os) { write_csv(p, os); });
    return o;
}

Output run_wells(const json& c, unsigned) {
    Output o;
    GridPath p;
    std::string in = c["input"];
    if (!in.empty()) {
        if (!fs::exists(in)) throw ValidationError("input: no such file " + in);
        p = read_sinp(in);
    } else {
        Rng rng(c["seed"].get<uint64_t>());
        p = sample_brownian(c["dt"], c["n"], c["n"], rng);
    }
    WellProcess w = wells_process(p);
    o.result = parsed(to_json(w));
    json tab = json::array();
    for (double h : c["depths"].get<std::vector<double>>()) {
        if (!(h > 0)) throw ValidationError("depths: must be positive");
        tab.push_back({{"h", h}, {"x", w(h)}, {"resolved", h <= w.resolved_depth}});
    }
    o.result["table"] = tab;
    if (c["format"] == "csv") o.files["wells.csv"] = csv_of([&](std::ostream& os) { write_csv(w, os); });
    return o;
}

Output run_rate(const json& c, unsigned) {
    Output o;
    StepSpec sp = spec_of(c);
    RateValue a = rate_of_spec(sp);
    auto mu = occupation(sp);
    RateValue b = rate_of_envelopes(envelopes(mu));
    double gap = (a.infinite() && b.infinite()) ? 0.0 : std::fabs(a.value - b.value);
    o.result = {{"spec", parsed(a.to_json())}, {"envelopes", b.value}, {"dual_gap", gap}, {"in_K", in_K(sp)}};
    o.checks.push_back(within(7, "rate dual path", gap, 0, table(7, "rate dual path").tolerance, false));
    if (!a.infinite()) {
        double e = c["shrink"], s = c["scale"];
        if (e > 0) {
            double v = rate_of_measure(shrink(mu, e)).value;
            o.result["shrink"] = {{"eps", e}, {"value", v}, {"expected", (1 - e) * a.value}};
            o.checks.push_back(within(7, "rate shrink identity", v, (1 - e) * a.value, 1e-12, true));
        }
        if (s != 1.0) {
            double v = rate_of_measure(rescale_measure(mu, s)).value;
            o.result["scale"] = {{"a", s}, {"value", v}};
            o.checks.push_back(within(7, "rate scaling invariance", v, a.value, 1e-12, true));
        }
    }
    return o;
}

Output run_confine(const json& c, unsigned workers) {
    Output o;
    ConfinementEvent e;
    e.kind = ConfinementEvent::parse(c["event"]);
    e.h = c["h"];
    e.eps = c["eps"];
    e.start = c["start"];
    e.K = c["K"];
    auto grid = c["t-grid"].get<std::vector<double>>();
    if (grid.size() < 2) throw ValidationError("t-grid: need at least two times");
    McConfig cfg;
    cfg.mode = c["mode"] == "naive" ? McMode::naive : McMode::particles;
    std::size_t samples = c["samples"], reps = c["replicas"];
    cfg.naive_samples = samples;
    cfg.smc.replicas = reps;
    cfg.smc.particles = std::max<std::size_t>(2, samples / reps);
    cfg.smc.dt = c["dt"];
    cfg.smc.workers = workers;
    RateFit f = mc_rate(e, grid, cfg, c["seed"]);
    double target = confinement_target(e);
    o.result = fit_json(f);
    o.result["target"] = target;
    json ex = json::array();
    for (double t : grid) ex.push_back(confinement_exact(e, t));
    o.result["exact"] = ex;
    if (c["event"] == "a") {
        auto& t = table(3, "confinement (a) slope");
        o.checks.push_back(within(3, t.name, f.slope, target, t.tolerance, true));
    } else if (c["event"] == "b") {
        auto& t = table(4, "confinement (b) slope");
        o.checks.push_back(within(4, t.name, f.slope, target, t.tolerance, true));
    }
    if (c["format"] == "csv") {
        std::ostringstream os;
        os << "t,estimate,std_error,exact\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << grid[i] << ',' << f.estimates[i].estimate << ',' << f.estimates[i].std_error << ','
               << confinement_exact(e, grid[i]) << '\n';
        o.files["confine.csv"] = os.str();
    }
    return o;
}

Output run_blocks(const json& c, unsigned workers) {
    Output o;
    BlockKind k = parse_block_kind(c["kind"]);
    BlockGeometry g;
    g.x = c["x"];
    g.y = c["y"];
    g.h = c["h"];
    g.h2 = c["h2"];
    g.w = c["w"];
    g.z = c["z"];
    auto M = c["M-grid"].get<std::vector<double>>();
    if (M.size() < (c["fit"] == "linear" ? 2u : 3u)) throw ValidationError("M-grid: too few scales for the fit");
    McConfig cfg;
    std::size_t samples = c["samples"], reps = c["replicas"];
    cfg.smc.replicas = reps;
    cfg.smc.particles = std::max<std::size_t>(2, samples / reps);
    cfg.smc.dt = c["dt"];
    cfg.smc.workers = workers;
    double eps = c["eps"], delta = c["delta"];
    double target;
    try {
        target = block_target(k, g, eps, delta);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("geometry: ") + e.what());
    }
    RateFit f = mc_block_cost(k, g, eps, delta, M, cfg, c["seed"]);
    bool inv = c["fit"] == "inverse" || (c["fit"] == "auto" && k == BlockKind::Gamma);
    if (inv) f = fit_rate(M, f.estimates, true);
    o.result = fit_json(f);
    o.result["target"] = target;
    o.result["block"] = block_name(k);
    if (k == BlockKind::C) {
        auto& t = table(6, "block C slope");
        o.checks.push_back(within(6, t.name, f.slope, target, t.tolerance, true));
    } else if (k == BlockKind::Gamma) {
        auto& t = table(6, "block Gamma slope");
        o.checks.push_back(within(6, t.name, f.slope, target, t.tolerance, true));
    }
    return o;
}

json profile_json(const VProfile& p) {
    json v = json::array();
    for (std::size_t i = 1; i < p.v.size(); ++i)
        v.push_back({{"i", i}, {"value", p.v[i].value}, {"lo", p.v[i].lo}, {"hi", p.v[i].hi}, {"ok", p.v[i].ok}});
    return {{"v", v}, {"h1_tilde", p.h1_tilde}, {"z1", p.z1}, {"all_ok", p.all_ok}};
}

json closeness_json(const Closeness& c) {
    return {{"distance", c.distance}, {"bound", c.bound}, {"sandwich_ok", c.sandwich_ok},
            {"sandwich_failure", c.sandwich_failure}};
}

Output run_vessel(const json& c, unsigned workers) {
    Output o;
    StepSpec sp = spec_of(c);
    std::optional<VesselSpec> vs;
    try {
        vs.emplace(sp, c["delta"], c["eps"]);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("delta/eps: ") + e.what());
    }
    const VesselSpec& v = *vs;
    o.result["vessel"] = parsed(v.to_json());
    std::string mode = c["mode"];
    if (mode == "mc") {
        auto M = c["M-grid"].get<std::vector<double>>();
        if (M.size() < 3) throw ValidationError("M-grid: need at least three scales");
        SmcOptions opt;
        std::size_t samples = c["samples"], reps = c["replicas"];
        opt.replicas = reps;
        opt.particles = std::max<std::size_t>(2, samples / reps);
        opt.dt = c["dt"];
        opt.workers = workers;
        VesselMc r;
        try {
            r = mc_vessel_prob(v, M, opt, c["seed"], c["band"]);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("M-grid: ") + e.what());
        }
        o.result["mc"] = parsed(r.to_json());
        Check k = within(9, "vessel slope", r.fit.slope, r.target, c["band"], true);
        k.pass = r.in_band;
        o.checks.push_back(k);
        return o;
    }
    GridPath p;
    if (mode == "check") {
        std::string in = c["input"];
        if (in.empty()) throw ValidationError("input: required for mode check");
        if (!fs::exists(in)) throw ValidationError("input: no such file " + in);
        p = read_sinp(in);
    } else {
        p = construct_witness(v);
        add_sinp(o, "witness.sinp", p);
    }
    MembershipReport m;
    try {
        m = vessel_membership(p, v);
    } catch (const std::domain_error& e) {
        throw ValidationError(std::string("input: ") + e.what());
    }
    o.result["membership"] = parsed(m.to_json());
    if (m.member) {
        VProfile prof = v_profile(p, v);
        Closeness cl = skorokhod_closeness(p, v);
        o.result["profile"] = profile_json(prof);
        o.result["closeness"] = closeness_json(cl);
        Check k{9, "vessel member assertions", double(prof.all_ok && cl.sandwich_ok && cl.distance <= cl.bound), 1,
                0, false};
        k.pass = k.value == 1;
        o.checks.push_back(k);
    }
    if (mode == "witness") {
        Check k{9, "vessel witness membership", double(m.member), 1, 0, false};
        k.pass = m.member;
        o.checks.push_back(k);
    }
    if (c["format"] == "csv") o.files["path.csv"] = csv_of([&](std::ostream& os) { write_csv(p, os); });
    return o;
}

Output run_walk(const json& c, unsigned workers) {
    Output o;
    auto dist = EnvDistribution::parse(c["dist"]);
    uint64_t seed = c["seed"];
    if (c["mode"] == "localize") {
        auto r = localization_experiment(dist, c["envs"], c["n"], seed, workers);
        o.result = parsed(r.to_json());
        auto& t = table(11, "localization median");
        Check k{11, t.name, r.median, t.value, 0, false, true};
        k.pass = r.median <= t.value;
        o.checks.push_back(k);
        return o;
    }
    WalkOptions opt;
    opt.a_max = c["a-max"];
    opt.log_step = c["log-step"];
    uint64_t nmax = uint64_t(std::ceil(std::exp(opt.a_max)));
    long width = c["width"].get<long>();
    long need = required_width(nmax, opt.width_margin);
    if (width == 0) width = need;
    if (width < need)
        throw ValidationError("width: " + std::to_string(width) + " sites per side; a walk of " + std::to_string(nmax) +
                              " steps needs " + std::to_string(need));
    Rng env(seed, 0, 0), walk(seed, 1, 0);
    auto pot = sample_env(dist, width, env);
    auto traj = simulate_walk(pot, opt, walk);
    o.result = {{"n_max", traj.max_time},
                {"width", width},
                {"checkpoints", traj.checkpoints.size()},
                {"final_position", traj.checkpoints.back().position},
                {"min_site", traj.min_site},
                {"max_site", traj.max_site}};
    if (c["format"] == "csv") {
        o.files["walk.csv"] = csv_of([&](std::ostream& os) { write_csv(traj, os); });
    } else {
        json cp = json::array();
        for (auto& k : traj.checkpoints) cp.push_back({k.n, k.position});
        o.result["path"] = cp;
    }
    return o;
}

Output run_corollary(const json& c, unsigned) {
    Output o;
    double r = c["r"];
    auto v = variational_sup([r](double t) { return std::pow(t, r); }, c["grid"]);
    double target = corollary_value(r), s0 = corollary_s0(r);
    o.result = parsed(v.to_json());
    o.result["target"] = target;
    o.result["target_s0"] = s0;
    double tol = table(8, "corollary value").tolerance;
    o.checks.push_back(within(8, "corollary LP", v.lp, target, tol, false));
    o.checks.push_back(within(8, "corollary greedy", v.greedy, target, tol, false));
    if (v.closed_form) o.checks.push_back(within(8, "corollary closed form", *v.closed_form, target, tol, false));
    o.checks.push_back(within(8, "corollary s0", v.s0, s0, table(8, "corollary s0").tolerance, false));
    return o;
}

Output run_jumpprob(const json& c, unsigned workers) {
    Output o;
    double ratio = c["ratio"];
    McEstimate e = jump_prob_mc(ratio, c["samples"], c["dt"], c["seed"], workers, !c["raw-grid"].get<bool>());
    double exact = jump_prob_exact(ratio);
    o.result = parsed(e.to_json());
    o.result["exact"] = exact;
    o.result["z"] = (e.estimate - exact) / e.std_error;
    Check k = within(2, "jump probability", e.estimate, exact, 3 * e.std_error, false);
    o.checks.push_back(k);
    return o;
}

Output run_tightness(const json& c, unsigned workers) {
    Output o;
    auto M = c["M-grid"].get<std::vector<double>>();
    if (M.size() < 2) throw ValidationError("M-grid: need at least two scales");
    auto r = tightness_mc(c["a"], M, c["samples"], c["dt"], c["seed"], workers);
    o.result = parsed(r.to_json());
    std::size_t bad = 0;
    for (auto& p : r.points) bad += p.inconsistent;
    auto& t = table(10, "tightness slope");
    Check k = within(10, t.name, r.fit.slope, r.target, t.tolerance, true);
    k.pass = k.pass && bad == 0;
    o.checks.push_back(k);
    return o;
}

using Runner = Output (*)(const json&, unsigned);
const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m = {
        {"env", run_env},         {"wells", run_wells},         {"rate", run_rate},         {"confine", run_confine},
        {"blocks", run_blocks},   {"vessel", run_vessel},       {"walk", run_walk},         {"corollary", run_corollary},
        {"jumpprob", run_jumpprob}, {"tightness", run_tightness}};
    return m;
}

// ---- driver ---------------------------------------------------------------

std::string default_root() {
    const char* d = std::getenv("SINAI_LAB_DIR");
    return d && *d ? d : "sinai_runs";
}

int execute(const std::string& verb, const json& raw, std::string out, unsigned workers) {
    Validation v = validate(schema_for(verb), raw);
    if (!v.ok()) {
        for (auto& e : v.errors) std::cerr << "error: " << e << "\n";
        return 2;
    }
    const json& cfg = v.config;
    json inputs = json::object();
    for (const char* key : {"input"})
        if (cfg.contains(key) && !cfg[key].get<std::string>().empty() && fs::exists(cfg[key].get<std::string>()))
            inputs[cfg[key].get<std::string>()] = git_blob_hash(slurp(cfg[key]));
    json ident = {{"verb", verb}, {"config", cfg}, {"inputs", inputs}};
    std::string input_hash = git_blob_hash(ident.dump());
    if (out.empty()) out = (fs::path(default_root()) / (verb + "-" + input_hash.substr(0, 12))).string();

    Output o;
    try {
        o = runners().at(verb)(cfg, workers);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    json checks = json::array();
    bool pass = true;
    for (auto& c : o.checks) {
        checks.push_back(c.to_json());
        pass = pass && c.pass;
    }
    json result = {{"verb", verb}, {"config", cfg}, {"result", o.result}, {"acceptance", checks}};
    o.files["result.json"] = result.dump(2) + "\n";

    fs::create_directories(out);
    json artifacts = json::object();
    for (auto& [name, content] : o.files) {
        write_atomic((fs::path(out) / name).string(), content);
        artifacts[name] = git_blob_hash(content);
    }
    for (auto& [name, w] : o.writers) {
        std::string path = (fs::path(out) / name).string();
        write_atomic_with(path, w);
        artifacts[name] = git_blob_hash(slurp(path));
    }
    json manifest = {{"tool", "sinai_lab"},
                     {"version", kVersion},
                     {"target_table_version", kTargetTableVersion},
                     {"verb", verb},
                     {"config", cfg},
                     {"inputs", inputs},
                     {"input_hash", input_hash},
                     {"artifacts", artifacts},
                     {"acceptance_pass", pass},
                     {"execution", {{"workers", workers}, {"output_dir", out}}}};
    write_atomic((fs::path(out) / "manifest.json").string(), manifest.dump(2) + "\n");

    for (auto& c : o.checks)
        std::printf("%s criterion %d %s: %.10g (target %.10g)\n", c.pass ? "PASS" : "FAIL", c.criterion,
                    c.name.c_str(), c.value, c.target);
    std::printf("%s\n", out.c_str());
    return pass ? 0 : 3;
}

json load_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

int report(const std::vector<std::string>& dirs, const std::string& out, const std::string& format) {
    json rows = json::array();
    for (auto& d : dirs) {
        json r = load_json((fs::path(d) / "result.json").string());
        for (auto c : r["acceptance"]) {
            c["run"] = d;
            c["verb"] = r["verb"];
            rows.push_back(c);
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const json& a, const json& b) { return a["criterion"].get<int>() < b["criterion"].get<int>(); });
    json groups = json::array();
    for (auto& r : rows) {
        if (groups.empty() || groups.back()["criterion"] != r["criterion"])
            groups.push_back({{"criterion", r["criterion"]}, {"rows", json::array()}, {"pass", true}});
        groups.back()["rows"].push_back(r);
        groups.back()["pass"] = groups.back()["pass"].get<bool>() && r["pass"].get<bool>();
    }
    json rep = {{"target_table_version", kTargetTableVersion}, {"criteria", groups}};
    std::printf("%-4s %-30s %-10s %16s %16s %12s %s\n", "crit", "name", "verb", "value", "target", "deviation", "");
    for (auto& g : groups)
        for (auto& r : g["rows"])
            std::printf("%-4d %-30s %-10s %16.8g %16.8g %12.3g %s\n", r["criterion"].get<int>(),
                        r["name"].get<std::string>().c_str(), r["verb"].get<std::string>().c_str(),
                        r["value"].get<double>(), r["target"].get<double>(), r["deviation"].get<double>(),
                        r["pass"].get<bool>() ? "PASS" : "FAIL");
    if (!out.empty()) {
        write_atomic((fs::path(out) / "report.json").string(), rep.dump(2) + "\n");
        if (format == "csv") {
            std::ostringstream os;
            os << "criterion,name,verb,value,target,tolerance,deviation,pass,run\n";
            for (auto& r : rows)
                os << r["criterion"] << ',' << r["name"].get<std::string>() << ',' << r["verb"].get<std::string>()
                   << ',' << r["value"] << ',' << r["target"] << ',' << r["tolerance"] << ',' << r["deviation"] << ','
                   << r["pass"] << ',' << r["run"].get<std::string>() << '\n';
            write_atomic((fs::path(out) / "report.csv").string(), os.str());
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sinai_lab: reproducible experiments on Sinai's walk and its environment"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string out, config_file;
    unsigned workers = 1;
    std::map<std::string, std::map<std::string, std::string>> flags;
    std::map<std::string, CLI::App*> subs;
    for (auto& s : verb_schemas()) {
        if (s.verb == "report") continue;
        auto* sub = app.add_subcommand(s.verb, s.help);
        sub->set_help_flag("--help", "print this help message and exit"); // -h clashes with --h
        subs[s.verb] = sub;
        for (auto& f : s.fields) {
            std::string desc = f.help;
            if (f.type == FieldType::choice) {
                desc += " {";
                for (std::size_t i = 0; i < f.choices.size(); ++i) desc += (i ? "," : "") + f.choices[i];
                desc += "}";
            }
            if (!f.fallback.is_null()) desc += " [" + (f.fallback.is_string() ? f.fallback.get<std::string>()
                                                                               : f.fallback.dump()) + "]";
            else desc += " (required)";
            sub->add_option("--" + f.name, flags[s.verb][f.name], desc);
        }
        sub->add_option("--config", config_file, "JSON config or manifest; flags override it");
        sub->add_option("--out", out, "output directory [$SINAI_LAB_DIR/<verb>-<hash>]");
        sub->add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));
    }

    std::vector<std::string> dirs;
    std::string report_format = "json";
    auto* rep = app.add_subcommand("report", "aggregate run directories into one table by criterion");
    rep->add_option("runs", dirs, "run directories");
    rep->add_option("--out", out, "directory for report.json");
    rep->add_option("--format", report_format, "also write report.csv when csv")->check(CLI::IsMember({"json", "csv"}));

    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run the configuration recorded in a manifest");
    replay->add_option("manifest", manifest_path, "manifest.json")->required();
    replay->add_option("--out", out, "output directory");
    replay->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));

    std::string schema_dir;
    auto* schema = app.add_subcommand("schema", "write the JSON schema of every verb");
    schema->add_option("dir", schema_dir, "target directory")->required();

    auto* targets = app.add_subcommand("targets", "print the embedded acceptance target table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (rep->parsed()) return report(dirs, out, report_format);
        if (schema->parsed()) {
            for (auto& s : verb_schemas())
                write_atomic((fs::path(schema_dir) / (s.verb + ".schema.json")).string(),
                             schema_document(s).dump(2) + "\n");
            return 0;
        }
        if (targets->parsed()) {
            json t = json::array();
            for (auto& x : acceptance_targets())
                t.push_back({{"criterion", x.criterion}, {"name", x.name}, {"value", x.value},
                             {"tolerance", x.tolerance}, {"relative", x.relative}, {"note", x.note}});
            std::cout << json{{"version", kTargetTableVersion}, {"targets", t}}.dump(2) << "\n";
            return 0;
        }
        if (replay->parsed()) {
            json m = load_json(manifest_path);
            if (!m.contains("verb") || !m.contains("config")) {
                std::cerr << "error: " << manifest_path << " is not a manifest\n";
                return 2;
            }
            std::string verb = m["verb"];
            if (!runners().count(verb)) {
                std::cerr << "error: verb: unknown verb " << verb << "\n";
                return 2;
            }
            return execute(verb, m["config"], out, workers);
        }
        for (auto& [verb, sub] : subs) {
            if (!sub->parsed()) continue;
            json raw = json::object();
            if (!config_file.empty()) {
                json f = load_json(config_file);
                if (f.contains("config") && f.contains("verb")) {
                    if (f["verb"] != verb) {
                        std::cerr << "error: config: manifest is for verb " << f["verb"].get<std::string>() << "\n";
                        return 2;
                    }
                    f = f["config"];
                }
                raw = f;
            }
            for (auto& [name, value] : flags[verb])
                if (sub->count("--" + name)) raw[name] = value;
            return execute(verb, raw, out, workers);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
