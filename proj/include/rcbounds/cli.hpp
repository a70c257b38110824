#pragma once

#include "rcbounds/bounds.hpp"
#include "rcbounds/json_util.hpp"
#include "rcbounds/learning.hpp"
#include "rcbounds/processes.hpp"
#include "rcbounds/reservoir.hpp"
#include "rcbounds/validation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace rcb::cli {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kConfig = 2, kRuntime = 3, kAssert = 4 };

struct Context {
    json cfg;
    fs::path out = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
};

// --set a.b.c=value; the value is parsed as JSON and falls back to a string.
inline void apply_override(json& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    require(eq != std::string::npos && eq > 0, "--set expects KEY=VALUE, got '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json v;
    try {
        v = json::parse(val);
    } catch (const json::exception&) {
        v = val;
    }
    json* node = &cfg;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        require(node->is_object(), "--set: '" + key + "' walks through a non-object");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = json::object();
    }
    require(node->is_object(), "--set: '" + key + "' walks through a non-object");
    (*node)[parts.back()] = v;
}

inline json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

inline void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw RuntimeError("cannot write '" + p.string() + "'");
    os << s;
}

inline void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

template <class W>
void write_csv_file(const fs::path& p, const W& w) {
    std::ostringstream os;
    w(os);
    write_text(p, os.str());
}

// ---------------------------------------------------------------------------
// Shared config pieces

struct Model {
    HypothesisClass cls;
    Loss loss;
    JointModel joint;
};

inline Model model_from(const json& cfg) {
    require(cfg.contains("class") && cfg.contains("loss") && cfg.contains("joint"),
            "config needs class, loss and joint");
    Model m{class_from_json(cfg["class"]), loss_from_json(cfg["loss"]), joint_from_json(cfg["joint"])};
    require(m.loss.certified(), "loss '" + loss_name(m.loss.kind) + "' is not Lipschitz; bounds are not valid for it");
    require(m.loss.m == m.cls.m, "loss m must equal class m");
    return m;
}

// Explicit "inputs", or derived from class/loss/joint with Monte Carlo moments.
inline BoundInputs inputs_from(const json& cfg, std::uint64_t seed, int jobs) {
    if (cfg.contains("inputs")) return bound_inputs_from_json(cfg["inputs"]);
    Model m = model_from(cfg);
    int n_mc = get_or<int>(cfg, "n_mc_moments", 20000);
    DependenceProfile pz = dependence_params(m.joint.input, n_mc, derive_seed(seed, 11), jobs);
    DependenceProfile py = m.joint.target_profile(pz);
    MeanSe ez2 = moment(m.joint.input, 2, n_mc, derive_seed(seed, 12), m.joint.burn_in, jobs);
    MeanSe ey2 = target_second_moment(m.joint, n_mc, derive_seed(seed, 13));
    MeanSe el0 = zero_predictor_risk(m.joint, m.loss, n_mc, derive_seed(seed, 14));
    BoundInputs in = make_bound_inputs(m.cls, m.loss, pz, py, ez2.mean, ey2.mean, el0.mean);
    in.estimated = {"EZ2", "EY2", "EL0Y", "C_RC"};
    return in;
}

inline GapOptions gap_options_from(const json& cfg) {
    GapOptions o;
    o.n = get_or<long long>(cfg, "n", o.n);
    o.n_trials = get_or<int>(cfg, "n_trials", o.n_trials);
    o.n_candidates = get_or<int>(cfg, "n_candidates", o.n_candidates);
    std::string ora = get_or<std::string>(cfg, "oracle", "pool");
    if (ora == "pool") o.oracle = GapOptions::Pool;
    else if (ora == "ergodic") o.oracle = GapOptions::Ergodic;
    else throw ConfigError("oracle must be pool|ergodic");
    o.n_mc_risk = get_or<int>(cfg, "n_mc_risk", o.n_mc_risk);
    o.ergodic_T = get_or<long long>(cfg, "ergodic_T", o.ergodic_T);
    o.history = get_or<int>(cfg, "history", o.history);
    o.erm = get_or<bool>(cfg, "erm", o.erm);
    o.erm_opt.restarts = get_or<int>(cfg, "erm_restarts", o.erm_opt.restarts);
    o.erm_opt.max_iter = get_or<int>(cfg, "erm_max_iter", o.erm_opt.max_iter);
    require(o.erm_opt.restarts >= 1 && o.erm_opt.max_iter >= 1, "erm budgets must be >= 1");
    return o;
}

inline double delta_from(const json& cfg) {
    double d = get_req<double>(cfg, "delta", "config");
    require(d > 0.0 && d < 1.0, "delta must lie in (0,1)");
    return d;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_simulate(const Context& c) {
    check_keys(c.cfg, {"process", "n", "burn_in", "n_mc", "seed", "jobs"}, "simulate");
    require(c.cfg.contains("process"), "simulate: missing process");
    ProcessModel m = process_from_json(c.cfg["process"]);
    int n = get_req<int>(c.cfg, "n", "simulate");
    require(n >= 1, "simulate: n must be >= 1");
    int burn = get_or<int>(c.cfg, "burn_in", 500);
    require(burn >= 0, "simulate: burn_in must be >= 0");
    Path p = generate_path(m, n, burn, c.seed);
    write_csv_file(c.out / "path.csv", [&](std::ostream& os) { write_path_csv(os, p); });
    DependenceProfile prof = dependence_params(m, get_or<int>(c.cfg, "n_mc", 20000), c.seed, c.jobs);
    write_json(c.out / "profile.json",
               {{"process", process_to_json(m)}, {"n", n}, {"seed", c.seed}, {"profile", profile_to_json(prof)}});
    return kOk;
}

inline int cmd_bound(const Context& c, const std::string& curve) {
    check_keys(c.cfg, {"inputs", "class", "loss", "joint", "n_mc_moments", "case", "n", "delta", "seed", "jobs"},
               "bound");
    BoundCase bc = case_from_name(get_req<std::string>(c.cfg, "case", "bound"));
    double delta = delta_from(c.cfg);
    BoundInputs in = inputs_from(c.cfg, c.seed, c.jobs);
    if (c.cfg.contains("n")) {
        double n = get_req<double>(c.cfg, "n", "bound");
        require(n >= 1.0 && n == std::floor(n), "bound: n must be a positive integer");
        json j = theorem1_bound(in, bc, n, delta).to_json();
        j["inputs"] = bound_inputs_to_json(in);
        write_json(c.out / "bound.json", j);
    }
    if (!curve.empty()) {
        long long n1 = 0, n2 = 0;
        int steps = 0;
        char tail = 0;
        if (std::sscanf(curve.c_str(), "%lld:%lld:%d%c", &n1, &n2, &steps, &tail) != 3)
            throw ConfigError("--curve expects n1:n2:steps");
        auto cv = bound_curve(in, bc, delta, n1, n2, steps);
        write_csv_file(c.out / "curve.csv", [&](std::ostream& os) { write_curve_csv(os, cv); });
    } else {
        require(c.cfg.contains("n"), "bound: give n in the config or --curve");
    }
    return kOk;
}

inline int cmd_samplesize(const Context& c) {
    check_keys(c.cfg, {"inputs", "class", "loss", "joint", "n_mc_moments", "case", "epsilon", "delta", "n_cap",
                       "seed", "jobs"},
               "samplesize");
    BoundCase bc = case_from_name(get_req<std::string>(c.cfg, "case", "samplesize"));
    double delta = delta_from(c.cfg);
    double eps = get_req<double>(c.cfg, "epsilon", "samplesize");
    require(eps > 0.0, "samplesize: epsilon must be > 0");
    long long cap = get_or<long long>(c.cfg, "n_cap", 1000000000000LL);
    BoundInputs in = inputs_from(c.cfg, c.seed, c.jobs);
    SampleSize s = min_sample_size(in, bc, eps, delta, cap);
    json j{{"case", case_name(bc)}, {"epsilon", eps}, {"delta", delta}, {"n_cap", cap}, {"reachable", s.reachable}};
    if (s.reachable) {
        j["n"] = s.n;
        j["bound"] = s.bound;
    }
    write_json(c.out / "samplesize.json", j);
    if (!s.reachable) {
        std::cerr << "samplesize: epsilon unreachable below n_cap = " << cap << "\n";
        return kRuntime;
    }
    return kOk;
}

inline int validate_rademacher(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "class", "input", "k_grid", "n_candidates", "n_mc", "history", "EZ2", "spread_tol",
                   "seed", "jobs"},
               "validate.rademacher");
    HypothesisClass cls = class_from_json(get_req<json>(g, "class", "rademacher"));
    ProcessModel in = process_from_json(get_req<json>(g, "input", "rademacher"));
    auto ks = get_or<std::vector<int>>(g, "k_grid", {16, 64, 256, 1024});
    int nc = get_or<int>(g, "n_candidates", 20), nmc = get_or<int>(g, "n_mc", 100);
    int hist = get_or<int>(g, "history", 40);
    double tol = get_or<double>(g, "spread_tol", 0.25);
    double ez2 = g.contains("EZ2") ? get_req<double>(g, "EZ2", "rademacher")
                                   : moment(in, 2, 20000, derive_seed(c.seed, 12), 500, c.jobs).mean;
    double crc = rademacher_constant(cls, std::sqrt(ez2));
    json rows = json::array();
    bool env = true;
    double lo = kInf, hi = 0.0;
    std::ostringstream csv;
    csv << "k,estimate,se,envelope\n";
    for (int k : ks) {
        MeanSe e = mc_rademacher(cls, in, k, nc, nmc, hist, c.seed, c.jobs);
        double envk = crc / std::sqrt(double(k));
        env = env && e.mean <= envk + 3.0 * e.se;
        lo = std::min(lo, e.mean * std::sqrt(double(k)));
        hi = std::max(hi, e.mean * std::sqrt(double(k)));
        rows.push_back({{"k", k}, {"estimate", e.mean}, {"se", e.se}, {"envelope", envk}});
        csv << k << "," << detail::fmt17(e.mean) << "," << detail::fmt17(e.se) << "," << detail::fmt17(envk) << "\n";
    }
    double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    bool pass = env && spread < tol;
    write_json(c.out / "rademacher.json", {{"C_RC", crc}, {"rows", rows}, {"within_envelope", env},
                                           {"scaled_spread", spread}, {"pass", pass}});
    write_text(c.out / "rademacher.csv", csv.str());
    return pass ? kOk : kAssert;
}

inline int validate_coverage(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "class", "loss", "joint", "inputs", "n_mc_moments", "case", "delta", "n", "n_trials",
                   "n_candidates", "oracle", "n_mc_risk", "ergodic_T", "history", "erm", "erm_restarts",
                   "erm_max_iter", "seed", "jobs"},
               "validate.coverage");
    Model m = model_from(g);
    BoundCase bc = case_from_name(get_req<std::string>(g, "case", "coverage"));
    double delta = delta_from(g);
    GapOptions o = gap_options_from(g);
    BoundInputs in = inputs_from(g, c.seed, c.jobs);
    CoverageResult r = risk_gap_experiment(m.cls, m.joint, m.loss, in, bc, delta, o, c.seed, c.jobs);
    bool pass = r.coverage >= 1.0 - delta;
    json j = r.to_json();
    j["case"] = case_name(bc);
    j["pass"] = pass;
    write_json(c.out / "coverage.json", j);
    write_csv_file(c.out / "coverage.csv", [&](std::ostream& os) { r.write_csv(os); });
    return pass ? kOk : kAssert;
}

inline int validate_truncation(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "class", "loss", "joint", "n_grid", "n_trials", "n_candidates", "P", "seed", "jobs"},
               "validate.truncation");
    Model m = model_from(g);
    auto grid = get_or<std::vector<long long>>(g, "n_grid", {10, 100, 1000});
    int trials = get_or<int>(g, "n_trials", 100), nc = get_or<int>(g, "n_candidates", 50);
    int P = get_or<int>(g, "P", 200);
    json rows = json::array();
    bool pass = true;
    std::ostringstream csv;
    csv << "n,trial,max_gap\n";
    for (long long n : grid) {
        TruncationResult r = truncation_gap_experiment(m.cls, m.joint, m.loss, n, trials, nc, P, c.seed, c.jobs);
        pass = pass && r.pass();
        rows.push_back(r.to_json());
        for (std::size_t t = 0; t < r.per_trial.size(); ++t)
            csv << n << "," << t << "," << detail::fmt17(r.per_trial[t]) << "\n";
    }
    write_json(c.out / "truncation.json", {{"rows", rows}, {"pass", pass}});
    write_text(c.out / "truncation.csv", csv.str());
    return pass ? kOk : kAssert;
}

inline int validate_lipschitz(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "class", "n_pairs", "i_max", "history", "seed", "jobs"}, "validate.lipschitz");
    HypothesisClass cls = class_from_json(get_req<json>(g, "class", "lipschitz"));
    LipschitzResult r = lipschitz_lemma_check(cls, get_or<int>(g, "n_pairs", 1000), get_or<int>(g, "i_max", 30),
                                              c.seed, get_or<int>(g, "history", 60));
    write_json(c.out / "lipschitz.json", r.to_json());
    write_text(c.out / "lipschitz.csv",
               "pairs,worst_ratio\n" + std::to_string(r.pairs) + "," + detail::fmt17(r.worst_ratio) + "\n");
    return r.pass() ? kOk : kAssert;
}

inline int validate_theta(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "process", "taus", "n_mc", "tol", "seed", "jobs"}, "validate.theta");
    ProcessModel m = process_from_json(get_req<json>(g, "process", "theta"));
    auto taus = get_or<std::vector<int>>(g, "taus", {1, 2, 4, 8, 16, 32, 64, 128});
    for (int t : taus) require(t >= 1, "theta: taus must be >= 1");
    ThetaValidation v = theta_validation(m, taus, get_or<int>(g, "n_mc", 10000), get_or<double>(g, "tol", 0.03),
                                         c.seed, c.jobs);
    write_json(c.out / "theta.json", v.to_json());
    write_csv_file(c.out / "theta.csv", [&](std::ostream& os) { v.write_csv(os); });
    return v.pass ? kOk : kAssert;
}

inline int validate_consistency(const Context& c) {
    const json& g = c.cfg;
    check_keys(g, {"kind", "class", "loss", "joint", "inputs", "n_mc_moments", "case", "delta", "n_grid",
                   "n_trials", "n_candidates", "oracle", "n_mc_risk", "ergodic_T", "history", "erm", "erm_restarts",
                   "erm_max_iter", "seed", "jobs"},
               "validate.consistency");
    Model m = model_from(g);
    BoundCase bc = case_from_name(get_req<std::string>(g, "case", "consistency"));
    double delta = delta_from(g);
    json gg = g;
    if (!gg.contains("oracle")) gg["oracle"] = "ergodic";
    GapOptions o = gap_options_from(gg);
    auto grid = get_or<std::vector<long long>>(g, "n_grid", {1000, 10000, 100000});
    BoundInputs in = inputs_from(g, c.seed, c.jobs);
    ConsistencyResult r = consistency_curve(m.cls, m.joint, m.loss, in, bc, grid, delta, o, c.seed, c.jobs);
    json j = r.to_json();
    bool pass = r.bound_decreasing && r.gap_decreasing;
    j["pass"] = pass;
    write_json(c.out / "consistency.json", j);
    write_csv_file(c.out / "consistency.csv", [&](std::ostream& os) { r.write_csv(os); });
    return pass ? kOk : kAssert;
}

inline int cmd_validate(const Context& c) {
    std::string kind = get_req<std::string>(c.cfg, "kind", "validate");
    if (kind == "rademacher") return validate_rademacher(c);
    if (kind == "coverage") return validate_coverage(c);
    if (kind == "truncation") return validate_truncation(c);
    if (kind == "lipschitz") return validate_lipschitz(c);
    if (kind == "theta") return validate_theta(c);
    if (kind == "consistency") return validate_consistency(c);
    throw ConfigError("validate: kind must be rademacher|coverage|truncation|lipschitz|theta|consistency");
}

// ---------------------------------------------------------------------------

inline int run(int argc, char** argv) {
    CLI::App app{"Reservoir computing risk bounds"};
    app.require_subcommand(1);
    std::string config, out = ".", curve;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1;
    std::vector<std::string> sets;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", config, "JSON config")->required();
        s->add_option("--out", out, "output directory");
        s->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; },
                                               "random seed");
        s->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--set", sets, "override KEY=VALUE (dotted keys)");
    };
    CLI::App* sim = app.add_subcommand("simulate", "simulate a process path and its dependence profile");
    CLI::App* bnd = app.add_subcommand("bound", "evaluate the risk bound");
    CLI::App* ss = app.add_subcommand("samplesize", "smallest n whose bound is below epsilon");
    CLI::App* val = app.add_subcommand("validate", "Monte Carlo validation experiments");
    for (auto* s : {sim, bnd, ss, val}) add_common(s);
    bnd->add_option("--curve", curve, "n1:n2:steps bound-vs-n CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        Context c;
        c.cfg = load_config(config);
        require(c.cfg.is_object(), "config must be a JSON object");
        for (auto& kv : sets) apply_override(c.cfg, kv);
        c.seed = seed_given ? seed : get_or<std::uint64_t>(c.cfg, "seed", 0);
        c.jobs = jobs;
        if (c.cfg.contains("jobs") && !(sim->count("--jobs") || bnd->count("--jobs") || ss->count("--jobs") ||
                                        val->count("--jobs")))
            c.jobs = get_or<int>(c.cfg, "jobs", 1);
        require(c.jobs >= 1, "jobs must be >= 1");
        c.out = out;
        std::error_code ec;
        fs::create_directories(c.out, ec);
        if (ec) throw RuntimeError("cannot create output directory '" + out + "': " + ec.message());
        if (app.got_subcommand(sim)) return cmd_simulate(c);
        if (app.got_subcommand(bnd)) return cmd_bound(c, curve);
        if (app.got_subcommand(ss)) return cmd_samplesize(c);
        return cmd_validate(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kRuntime;
    }
}

} // namespace rcb::cli
