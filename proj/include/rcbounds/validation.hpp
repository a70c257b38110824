#pragma once

#include "rcbounds/bounds.hpp"
#include "rcbounds/common.hpp"
#include "rcbounds/json_util.hpp"
#include "rcbounds/learning.hpp"
#include "rcbounds/processes.hpp"
#include "rcbounds/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace rcb {

namespace detail {

// seed streams
constexpr std::uint64_t kCandStream = 1, kGhostStream = 2, kTrialStream = 3, kErmStream = 4,
                        kOracleStream = 5, kPairStream = 6, kSignStream = 7;

inline std::string fmt17(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

using Candidate = std::pair<ReservoirSystem, Readout>;

// Random class members; every other readout is pushed onto its caps.
inline std::vector<Candidate> draw_candidates(const HypothesisClass& c, int count, std::uint64_t seed) {
    std::vector<Candidate> out;
    for (int i = 0; i < count; ++i) {
        Candidate k = sample_from_class(c, derive_seed(seed, kCandStream, std::uint64_t(i)));
        if (i % 2 == 1) {
            double w = spectral_norm(k.second.W), a = k.second.a.norm();
            if (w > 0.0) k.second.W *= c.Lh / w;
            if (a > 0.0) k.second.a *= c.Lh0 / a;
        }
        out.push_back(std::move(k));
    }
    return out;
}

// History length so that the zero-padding error 2 r^H M_F L_L Lh stays below tol.
inline int oracle_history(const HypothesisClass& c, const Loss& L, double tol = 1e-8) {
    double r = c.r(), scale = 2.0 * c.M_F() * c.Lh * L.L_L;
    if (r == 0.0 || scale <= tol) return 1;
    return std::clamp(int(std::ceil(std::log(tol / scale) / std::log(r))), 1, 5000);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Rademacher complexity

// For a fixed reservoir the readout sup is explicit:
// sup ||W u + a s|| over the caps equals Lh ||u|| + Lh0 |s|.
inline MeanSe mc_rademacher(const HypothesisClass& c, const ProcessModel& input, int k, int n_candidates,
                            int n_mc, int history, std::uint64_t seed, int jobs = 1) {
    c.validate();
    require(k >= 1, "rademacher: k must be >= 1");
    require(n_candidates >= 1 && n_mc >= 2 && history >= 1, "rademacher: budgets must be positive");
    require(input.out_dim() == c.d, "rademacher: input dimension must equal the class d");
    std::vector<ReservoirSystem> sys;
    for (int i = 0; i < n_candidates; ++i)
        sys.push_back(sample_from_class(c, derive_seed(seed, detail::kCandStream, std::uint64_t(i))).first);
    std::vector<double> vals(static_cast<std::size_t>(n_mc));
    parallel_for(vals.size(), jobs, [&](std::size_t rep) {
        Rng g = trial_rng(derive_seed(seed, detail::kSignStream), rep);
        std::vector<Vec> u(sys.size(), Vec::Zero(c.N));
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            double eps = (g() & 1) ? 1.0 : -1.0;
            Path z = generate_path(input, history, 200,
                                   derive_seed(seed, detail::kGhostStream, rep * std::uint64_t(k) + std::uint64_t(j)));
            for (std::size_t q = 0; q < sys.size(); ++q) u[q] += eps * last_state(sys[q], z);
            s += eps;
        }
        double best = 0.0;
        for (auto& v : u) best = std::max(best, c.Lh * v.norm() + c.Lh0 * std::fabs(s));
        vals[rep] = best / double(k);
    });
    return mean_se(vals);
}

// ---------------------------------------------------------------------------
// Risk-gap coverage

struct GapOptions {
    long long n = 512;
    int n_trials = 200;
    int n_candidates = 50;
    enum Oracle { Pool, Ergodic } oracle = Pool;
    int n_mc_risk = 4000;       // pool oracle: independent draws
    long long ergodic_T = 1000000;  // ergodic oracle: long-path length
    int history = -1;           // pool history; -1 picks it from r
    bool erm = true;
    ErmOptions erm_opt{2, 400, 25, 0};
};

struct RiskOracle {
    std::vector<detail::Candidate> cands;
    std::vector<MeanSe> risk;  // per fixed candidate
    Mat X0, Y0;                // oracle states of candidate 0 (rows), for the ERM readout
    int history = 0;
    std::string kind;

    MeanSe risk_of(const Readout& h, const Loss& L) const {
        std::vector<double> v(std::size_t(X0.rows()));
        Vec out(h.W.rows());
        for (Eigen::Index i = 0; i < X0.rows(); ++i) {
            out.noalias() = h.W * X0.row(i).transpose();
            out += h.a;
            v[std::size_t(i)] = L(out, Y0.row(i).transpose());
        }
        return mean_se(v);
    }
};

inline RiskOracle build_risk_oracle(const HypothesisClass& c, const JointModel& jm, const Loss& L,
                                    const GapOptions& o, std::uint64_t seed, int jobs = 1) {
    c.validate();
    jm.validate();
    require(jm.d() == c.d && jm.m() == c.m, "coverage: joint model dimensions must match the class");
    require(o.n_candidates >= 1, "coverage: n_candidates must be >= 1");
    RiskOracle R;
    R.cands = detail::draw_candidates(c, o.n_candidates, seed);
    R.risk.resize(R.cands.size());
    std::uint64_t os = derive_seed(seed, detail::kOracleStream);
    if (o.oracle == GapOptions::Pool) {
        R.kind = "pool";
        R.history = o.history > 0 ? o.history : detail::oracle_history(c, L);
        RiskDraws d = draw_risk_pool(jm, o.n_mc_risk, R.history, os, jobs);
        for (std::size_t i = 0; i < R.cands.size(); ++i) {
            Path st = pool_states(R.cands[i].first, d, -1, jobs);
            R.risk[i] = risk_on_states(st, d.y, R.cands[i].second, L);
            if (i == 0) {
                R.X0 = stack_rows(st);
                R.Y0 = stack_rows(d.y);
            }
        }
        return R;
    }
    R.kind = "ergodic";
    require(o.ergodic_T >= 2 && o.ergodic_T <= 100000000, "coverage: ergodic_T must lie in [2, 1e8]");
    TrainingSample S = jm.generate(int(o.ergodic_T), os);
    parallel_for(R.cands.size(), jobs, [&](std::size_t i) {
        Path st = run_filter(R.cands[i].first, S.z);
        std::vector<double> v(st.size());
        for (std::size_t t = 0; t < st.size(); ++t) v[t] = L(R.cands[i].second.apply(st[t]), S.y[t]);
        R.risk[i] = mean_se(v);
        if (i == 0) R.X0 = stack_rows(st);
    });
    R.Y0 = stack_rows(S.y);
    return R;
}

struct CoverageResult {
    int n_trials = 0;
    long long n = 0;
    double delta = 0.0;
    double bound = 0.0;
    std::vector<double> gaps;
    double coverage = 0.0;
    int candidates = 0;
    std::string oracle;
    double oracle_max_se = 0.0;

    double max_gap() const { return gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end()); }
    double median_gap() const { return gaps.empty() ? 0.0 : median(gaps); }
    double slack_ratio() const { return max_gap() > 0.0 ? bound / max_gap() : kInf; }

    json to_json() const {
        return {{"n_trials", n_trials},   {"n", n},
                {"delta", delta},         {"bound", num(bound)},
                {"coverage", coverage},   {"max_gap", max_gap()},
                {"median_gap", median_gap()}, {"slack_ratio", num(slack_ratio())},
                {"candidates", candidates}, {"oracle", oracle},
                {"oracle_max_se", oracle_max_se}};
    }

    void write_csv(std::ostream& os) const {
        os << "trial,sup_gap\n";
        for (std::size_t i = 0; i < gaps.size(); ++i) os << i << "," << detail::fmt17(gaps[i]) << "\n";
    }
};

// Trials against a prebuilt oracle; several sample sizes can share one oracle.
inline CoverageResult run_gap_trials(const RiskOracle& R, const HypothesisClass& c, const JointModel& jm,
                                     const Loss& L, long long n, int n_trials, double bound, const GapOptions& o,
                                     std::uint64_t seed, int jobs = 1) {
    require(n >= 1 && n <= 100000000, "coverage: n must lie in [1, 1e8]");
    require(n_trials >= 1, "coverage: n_trials must be >= 1");
    CoverageResult out;
    out.n = n;
    out.n_trials = n_trials;
    out.bound = bound;
    out.oracle = R.kind;
    out.candidates = int(R.cands.size()) + (o.erm ? 1 : 0);
    out.gaps.assign(std::size_t(n_trials), 0.0);
    std::vector<double> erm_se(std::size_t(n_trials), 0.0);
    parallel_for(out.gaps.size(), jobs, [&](std::size_t t) {
        TrainingSample S = jm.generate(int(n), derive_seed(seed, detail::kTrialStream, std::uint64_t(n) * 1000003ULL + t));
        double worst = 0.0;
        for (std::size_t i = 0; i < R.cands.size(); ++i) {
            Path st = run_filter(R.cands[i].first, S.z);
            double emp = risk_from_states(st, S.y, R.cands[i].second, L);
            worst = std::max(worst, std::fabs(emp - R.risk[i].mean));
            if (i == 0 && o.erm) {
                ErmOptions eo = o.erm_opt;
                eo.seed = derive_seed(seed, detail::kErmStream, t);
                ErmResult fit = fit_readout_erm(stack_rows(st), stack_rows(S.y), c.Lh, c.Lh0, L, eo);
                double e2 = risk_from_states(st, S.y, fit.readout, L);
                MeanSe r2 = R.risk_of(fit.readout, L);
                erm_se[t] = r2.se;
                worst = std::max(worst, std::fabs(e2 - r2.mean));
            }
        }
        out.gaps[t] = worst;
    });
    for (auto& r : R.risk) out.oracle_max_se = std::max(out.oracle_max_se, r.se);
    for (double s : erm_se) out.oracle_max_se = std::max(out.oracle_max_se, s);
    long covered = std::count_if(out.gaps.begin(), out.gaps.end(), [&](double g) { return g <= bound; });
    out.coverage = double(covered) / double(n_trials);
    return out;
}

inline CoverageResult risk_gap_experiment(const HypothesisClass& c, const JointModel& jm, const Loss& L,
                                          double bound, const GapOptions& o, std::uint64_t seed, int jobs = 1) {
    RiskOracle R = build_risk_oracle(c, jm, L, o, seed, jobs);
    return run_gap_trials(R, c, jm, L, o.n, o.n_trials, bound, o, seed, jobs);
}

inline CoverageResult risk_gap_experiment(const HypothesisClass& c, const JointModel& jm, const Loss& L,
                                          const BoundInputs& in, BoundCase bc, double delta, const GapOptions& o,
                                          std::uint64_t seed, int jobs = 1) {
    double b = theorem1_bound(in, bc, double(o.n), delta).bound;
    CoverageResult r = risk_gap_experiment(c, jm, L, b, o, seed, jobs);
    r.delta = delta;
    return r;
}

// ---------------------------------------------------------------------------
// Truncation gap

struct TruncationResult {
    long long n = 0;
    int P = 0, n_trials = 0, n_candidates = 0;
    double bound = 0.0;  // C_0 (1 - r^n) / n
    double slack = 0.0;  // pre-history slack L_L Lh 2 r^P M_F
    std::vector<double> per_trial;
    int violations = 0;

    double max_gap() const { return per_trial.empty() ? 0.0 : *std::max_element(per_trial.begin(), per_trial.end()); }
    bool pass() const { return violations == 0; }

    json to_json() const {
        return {{"n", n},          {"P", P},
                {"n_trials", n_trials}, {"n_candidates", n_candidates},
                {"max_gap", max_gap()}, {"bound", bound},
                {"slack", slack},  {"violations", violations},
                {"pass", pass()}};
    }
    void write_csv(std::ostream& os) const {
        os << "trial,max_gap\n";
        for (std::size_t i = 0; i < per_trial.size(); ++i) os << i << "," << detail::fmt17(per_trial[i]) << "\n";
    }
};

inline TruncationResult truncation_gap_experiment(const HypothesisClass& c, const JointModel& jm, const Loss& L,
                                                  long long n, int n_trials, int n_candidates, int P,
                                                  std::uint64_t seed, int jobs = 1) {
    c.validate();
    require(n >= 1 && n_trials >= 1 && n_candidates >= 1 && P >= 0, "truncation: bad budgets");
    require(jm.d() == c.d && jm.m() == c.m, "truncation: joint model dimensions must match the class");
    TruncationResult R;
    R.n = n;
    R.P = P;
    R.n_trials = n_trials;
    R.n_candidates = n_candidates;
    double r = c.r(), MF = c.M_F();
    double C0 = 2.0 * r * L.L_L * c.Lh * MF / (1.0 - r);
    R.bound = C0 * (1.0 - std::pow(r, double(n))) / double(n);
    R.slack = L.L_L * c.Lh * 2.0 * std::pow(r, double(P)) * MF;
    auto cands = detail::draw_candidates(c, n_candidates, seed);
    R.per_trial.assign(std::size_t(n_trials), 0.0);
    std::vector<int> viol(std::size_t(n_trials), 0);
    const double limit = R.bound + R.slack + 1e-9;
    parallel_for(R.per_trial.size(), jobs, [&](std::size_t t) {
        TrainingSample full = jm.generate(int(n) + P, derive_seed(seed, detail::kTrialStream, t));
        Path pre(full.z.begin(), full.z.begin() + P);
        TrainingSample S{Path(full.z.begin() + P, full.z.end()), Path(full.y.begin() + P, full.y.end())};
        double worst = 0.0;
        for (auto& [s, h] : cands) {
            double g = std::fabs(empirical_risk(s, h, S, L) - idealized_empirical_risk(s, h, S, pre, L));
            worst = std::max(worst, g);
            if (g > limit) ++viol[t];
        }
        R.per_trial[t] = worst;
    });
    for (int v : viol) R.violations += v;
    return R;
}

// ---------------------------------------------------------------------------
// Lipschitz estimate of the state functional

struct LipschitzResult {
    int pairs = 0;
    double worst_ratio = 0.0;
    bool pass() const { return worst_ratio <= 1.0 + 1e-9; }
    json to_json() const { return {{"pairs", pairs}, {"worst_ratio", worst_ratio}, {"pass", pass()}}; }
};

namespace detail {

// Inputs inside K_M when M is finite (uniform in the ball), Gaussian otherwise.
inline Vec draw_input(const HypothesisClass& c, Rng& g) {
    Vec z(c.d);
    for (int i = 0; i < c.d; ++i) z(i) = gauss(g);
    if (!std::isfinite(c.M)) return z;
    double n = z.norm();
    if (n == 0.0) return z;
    return z * (c.M * std::pow(uniform(g, 0.0, 1.0), 1.0 / c.d) / n);
}

} // namespace detail

inline LipschitzResult lipschitz_lemma_check(const HypothesisClass& c, int n_pairs, int i_max, std::uint64_t seed,
                                             int history = 60) {
    c.validate();
    require(n_pairs >= 1 && i_max >= 0 && history >= 1, "lipschitz check: bad budgets");
    double r = c.r(), MF = c.M_F(), LR = c.L_R();
    LipschitzResult out;
    out.pairs = n_pairs;
    for (int p = 0; p < n_pairs; ++p) {
        Rng g = trial_rng(derive_seed(seed, detail::kPairStream), std::uint64_t(p));
        ReservoirSystem s = sample_from_class(c, g).first;
        int i = int(g() % std::uint64_t(i_max + 1));
        bool recent_only = (g() & 1) != 0;
        Path z(static_cast<std::size_t>(history)), zb(static_cast<std::size_t>(history));
        for (int t = 0; t < history; ++t) z[std::size_t(t)] = detail::draw_input(c, g);
        for (int t = 0; t < history; ++t) {
            bool recent = history - 1 - t < i;
            zb[std::size_t(t)] = (recent_only && !recent) ? z[std::size_t(t)] : detail::draw_input(c, g);
        }
        double lhs = (last_state(s, z) - last_state(s, zb)).norm();
        double rhs = 2.0 * std::pow(r, i) * MF;
        for (int j = 0; j < std::min(i, history); ++j) {
            std::size_t t = std::size_t(history - 1 - j);
            rhs += LR * std::pow(r, j) * (z[t] - zb[t]).norm();
        }
        double ratio = lhs == 0.0 ? 0.0 : (rhs > 0.0 ? lhs / rhs : kInf);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Consistency

struct ConsistencyRow {
    long long n = 0;
    double median_gap = 0.0, bound = 0.0;
};

struct ConsistencyResult {
    std::vector<ConsistencyRow> rows;
    bool bound_decreasing = true, gap_decreasing = true;

    json to_json() const {
        json r = json::array();
        for (auto& row : rows) r.push_back({{"n", row.n}, {"median_gap", row.median_gap}, {"bound", num(row.bound)}});
        return {{"rows", r}, {"bound_decreasing", bound_decreasing}, {"gap_decreasing", gap_decreasing}};
    }
    void write_csv(std::ostream& os) const {
        os << "n,median_gap,bound\n";
        for (auto& row : rows) os << row.n << "," << detail::fmt17(row.median_gap) << "," << detail::fmt17(row.bound) << "\n";
    }
};

// Gap column uses one shared risk oracle for every n.
inline ConsistencyResult consistency_curve(const HypothesisClass& c, const JointModel& jm, const Loss& L,
                                           const BoundInputs& in, BoundCase bc, const std::vector<long long>& n_grid,
                                           double delta, const GapOptions& o, std::uint64_t seed, int jobs = 1) {
    require(!n_grid.empty(), "consistency: n_grid must be non-empty");
    RiskOracle R = build_risk_oracle(c, jm, L, o, seed, jobs);
    ConsistencyResult out;
    for (long long n : n_grid) {
        ConsistencyRow row;
        row.n = n;
        row.bound = detail::bound_or_inf(in, bc, double(n), delta);
        row.median_gap = run_gap_trials(R, c, jm, L, n, o.n_trials, row.bound, o, seed, jobs).median_gap();
        out.rows.push_back(row);
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        out.bound_decreasing = out.bound_decreasing && out.rows[i].bound < out.rows[i - 1].bound;
        out.gap_decreasing = out.gap_decreasing && out.rows[i].median_gap < out.rows[i - 1].median_gap;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dependence decay

struct ThetaValidation {
    Regime regime = Regime::Geometric;
    std::vector<int> taus;
    std::vector<MeanSe> theta;
    DecayFit fit;
    double expected = 0.0;  // analytic lambda or alpha
    double tol = 0.0;
    bool pass = false;

    json to_json() const {
        json pts = json::array();
        for (std::size_t i = 0; i < taus.size(); ++i)
            pts.push_back({{"tau", taus[i]}, {"theta", theta[i].mean}, {"se", theta[i].se}});
        return {{"regime", regime_name(regime)}, {"points", pts},
                {"fit_C", fit.C},                {"fit_rate", fit.rate},
                {"exact_zero", fit.exact_zero},  {"expected_rate", expected},
                {"tol", tol},                    {"pass", pass}};
    }
    void write_csv(std::ostream& os) const {
        os << "tau,theta,se\n";
        for (std::size_t i = 0; i < taus.size(); ++i)
            os << taus[i] << "," << detail::fmt17(theta[i].mean) << "," << detail::fmt17(theta[i].se) << "\n";
    }
};

// Geometric fits pass when the rate is at most the analytic one plus tol;
// algebraic fits must land within tol of the analytic exponent.
inline ThetaValidation theta_validation(const ProcessModel& m, const std::vector<int>& taus, int n_mc, double tol,
                                        std::uint64_t seed, int jobs = 1) {
    require(!taus.empty(), "theta: taus must be non-empty");
    ThetaValidation v;
    v.taus = taus;
    v.tol = tol;
    int hist = default_theta_history(*std::max_element(taus.begin(), taus.end()));
    v.theta = estimate_theta_curve(m, taus, n_mc, hist, seed, jobs);
    v.regime = m.kind == ProcessKind::ARFIMA ? Regime::Algebraic : Regime::Geometric;
    DependenceProfile p = dependence_params(m, 2000, seed, jobs);
    v.expected = v.regime == Regime::Algebraic ? p.alpha : p.lambda;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < taus.size(); ++i) pts.emplace_back(double(taus[i]), v.theta[i].mean);
    std::size_t positive = std::count_if(pts.begin(), pts.end(), [](auto& q) { return q.second > 0.0; });
    if (positive == 0) {
        v.fit.exact_zero = true;
        v.pass = true;
        return v;
    }
    if (positive < 3) {
        // too few nonzero lags to fit; accept only if the analytic profile says finite memory
        v.pass = p.exact_zero || m.kind == ProcessKind::MAFinite;
        return v;
    }
    v.fit = fit_theta_decay(pts, v.regime);
    v.pass = v.regime == Regime::Algebraic ? std::fabs(v.fit.rate - v.expected) <= tol
                                           : v.fit.rate <= v.expected + tol;
    return v;
}

} // namespace rcb
