#pragma once

#include "rcbounds/common.hpp"
#include "rcbounds/json_util.hpp"
#include "rcbounds/processes.hpp"
#include "rcbounds/reservoir.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace rcb {

// ---------------------------------------------------------------------------
// Losses L(x, y) = sum_i f(x_i - y_i), f being (L_L / sqrt m)-Lipschitz, f(0) = 0.

enum class LossKind { Absolute, Huber, Pinball, Squared };

struct Loss {
    LossKind kind = LossKind::Absolute;
    double L_L = 1.0;
    int m = 1;
    double delta = 1.0;  // huber
    double q = 0.5;      // pinball

    bool certified() const { return kind != LossKind::Squared; }
    double slope() const { return L_L / std::sqrt(double(m)); }

    double f(double u) const {
        double s = slope();
        switch (kind) {
        case LossKind::Absolute: return s * std::fabs(u);
        case LossKind::Huber: {
            double a = std::fabs(u);
            return s * (a <= delta ? 0.5 * u * u / delta : a - 0.5 * delta);
        }
        case LossKind::Pinball: {
            double k = s / std::max(q, 1.0 - q);
            return k * (u >= 0 ? q * u : (q - 1.0) * u);
        }
        case LossKind::Squared: return u * u;
        }
        return 0.0;
    }

    double df(double u) const {
        double s = slope();
        switch (kind) {
        case LossKind::Absolute: return u > 0 ? s : (u < 0 ? -s : 0.0);
        case LossKind::Huber: return std::fabs(u) <= delta ? s * u / delta : (u > 0 ? s : -s);
        case LossKind::Pinball: {
            double k = s / std::max(q, 1.0 - q);
            return u > 0 ? k * q : (u < 0 ? k * (q - 1.0) : 0.0);
        }
        case LossKind::Squared: return 2.0 * u;
        }
        return 0.0;
    }

    template <class A, class B>
    double operator()(const A& x, const B& y) const {
        require(x.size() == y.size(), "loss: dimension mismatch");
        double v = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) v += f(x(i) - y(i));
        return v;
    }

    void validate() const {
        require(L_L > 0.0 && m >= 1, "loss: L_L > 0 and m >= 1 required");
        if (kind == LossKind::Huber) require(delta > 0.0, "loss: huber delta must be > 0");
        if (kind == LossKind::Pinball) require(q > 0.0 && q < 1.0, "loss: pinball q in (0,1)");
    }
};

inline double loss(const Loss& L, const Vec& x, const Vec& y) { return L(x, y); }

inline std::string loss_name(LossKind k) {
    switch (k) {
    case LossKind::Absolute: return "absolute";
    case LossKind::Huber: return "huber";
    case LossKind::Pinball: return "pinball";
    case LossKind::Squared: return "squared";
    }
    return "?";
}

inline Loss loss_from_json(const json& j) {
    check_keys(j, {"kind", "L_L", "m", "delta", "q"}, "loss");
    Loss L;
    std::string k = get_or<std::string>(j, "kind", "absolute");
    if (k == "absolute") L.kind = LossKind::Absolute;
    else if (k == "huber") L.kind = LossKind::Huber;
    else if (k == "pinball") L.kind = LossKind::Pinball;
    else if (k == "squared") L.kind = LossKind::Squared;
    else throw ConfigError("loss: unknown kind '" + k + "'");
    L.L_L = get_or<double>(j, "L_L", 1.0);
    L.m = get_or<int>(j, "m", 1);
    L.delta = get_or<double>(j, "delta", 1.0);
    L.q = get_or<double>(j, "q", 0.5);
    L.validate();
    return L;
}

inline json loss_to_json(const Loss& L) {
    json j{{"kind", loss_name(L.kind)}, {"L_L", L.L_L}, {"m", L.m}};
    if (L.kind == LossKind::Huber) j["delta"] = L.delta;
    if (L.kind == LossKind::Pinball) j["q"] = L.q;
    if (!L.certified()) j["note"] = "bounds not valid for this loss";
    return j;
}

// ---------------------------------------------------------------------------
// Samples and joint input/target models

struct TrainingSample {
    Path z, y;
    std::size_t n() const { return z.size(); }
    void validate() const {
        require(!z.empty() && z.size() == y.size(), "sample: inputs and targets must have equal length >= 1");
    }
};

// Y_t = B Z_t + noise_t with iid noise (scale 0 disables it).
struct JointModel {
    ProcessModel input;
    Mat B;
    InnovationLaw noise{LawKind::Gaussian, 0.0};
    int burn_in = 500;

    int d() const { return input.out_dim(); }
    int m() const { return int(B.rows()); }

    void validate() const {
        input.validate();
        require(B.cols() == d() && B.rows() >= 1, "joint: B must be m x d");
        require(noise.scale >= 0.0, "joint: noise scale must be >= 0");
    }

    TrainingSample generate(int n, std::uint64_t seed) const {
        validate();
        TrainingSample s;
        s.z = generate_path(input, n, burn_in, seed);
        Rng g = trial_rng(seed, 1);
        s.y.reserve(s.z.size());
        for (const Vec& z : s.z) {
            Vec y = B * z;
            if (noise.scale > 0.0)
                for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise.sample(g);
            s.y.push_back(std::move(y));
        }
        return s;
    }

    // theta^y(tau) <= |||B|||_2 theta^z(tau): the noise enters at lag 0 only.
    DependenceProfile target_profile(const DependenceProfile& pz) const {
        DependenceProfile p = pz;
        double b = spectral_norm(B);
        p.C *= b;
        p.C_se *= b;
        p.L *= b;
        if (p.regime == Regime::Lipschitz && noise.scale > 0.0) {
            // innovations of Y are (xi^z, noise); the noise has weight w_0 = 1
            p.L = std::max(p.L, 1.0);
            NormLaw nl{noise, m()};
            p.mean_norm_xi += nl.mean_norm();
        }
        p.note = "target profile from the linear map of the input";
        return p;
    }
};

inline JointModel joint_from_json(const json& j) {
    check_keys(j, {"input", "B", "noise", "noise_scale", "burn_in"}, "joint");
    JointModel jm;
    require(j.contains("input"), "joint: missing input process");
    jm.input = process_from_json(j["input"]);
    if (j.contains("B"))
        jm.B = mat_from_json(j["B"], "joint.B");
    else
        jm.B = Mat::Identity(1, jm.d());
    jm.noise.kind = law_from_name(get_or<std::string>(j, "noise", "gaussian"));
    jm.noise.scale = get_or<double>(j, "noise_scale", 0.0);
    jm.burn_in = get_or<int>(j, "burn_in", 500);
    jm.validate();
    return jm;
}

inline json joint_to_json(const JointModel& jm) {
    return {{"input", process_to_json(jm.input)},
            {"B", mat_to_json(jm.B)},
            {"noise", law_name(jm.noise.kind)},
            {"noise_scale", jm.noise.scale},
            {"burn_in", jm.burn_in}};
}

// ---------------------------------------------------------------------------
// Risks

inline double risk_from_states(const Path& states, const Path& y, const Readout& h, const Loss& L) {
    double s = 0.0;
    Vec out(h.W.rows());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.noalias() = h.W * states[i];
        out += h.a;
        s += L(out, y[i]);
    }
    return s / double(states.size());
}

// Truncated empirical risk: zero-padded histories, one forward pass.
inline double empirical_risk(const ReservoirSystem& s, const Readout& h, const TrainingSample& S,
                             const Loss& L, int washout = -1) {
    S.validate();
    require(h.W.cols() == s.N() && h.W.rows() == S.y[0].size(), "empirical risk: readout shape mismatch");
    return risk_from_states(run_filter(s, S.z, washout), S.y, h, L);
}

// Same sum with states carried in from a generated pre-history.
inline double idealized_empirical_risk(const ReservoirSystem& s, const Readout& h,
                                       const TrainingSample& S, const Path& pre_history,
                                       const Loss& L, int washout = -1) {
    S.validate();
    Path all = pre_history;
    all.insert(all.end(), S.z.begin(), S.z.end());
    Path st = run_filter(s, all, washout);
    Path tail(st.end() - std::ptrdiff_t(S.z.size()), st.end());
    return risk_from_states(tail, S.y, h, L);
}

// Independent draws (Z history, Y_0) for Monte Carlo risks.
struct RiskDraws {
    std::vector<Path> z;
    Path y;
};

inline RiskDraws draw_risk_pool(const JointModel& jm, int n_mc, int history, std::uint64_t seed,
                                int jobs = 1) {
    require(n_mc >= 2, "risk: n_mc must be >= 2");
    require(history >= 1, "risk: history must be >= 1");
    RiskDraws d;
    d.z.resize(std::size_t(n_mc));
    d.y.resize(std::size_t(n_mc));
    parallel_for(std::size_t(n_mc), jobs, [&](std::size_t i) {
        TrainingSample s = jm.generate(history, seed + i);
        d.y[i] = s.y.back();
        d.z[i] = std::move(s.z);
    });
    return d;
}

// Time-0 states of one reservoir over a pool; readouts can then be scored cheaply.
inline Path pool_states(const ReservoirSystem& s, const RiskDraws& d, int washout = -1, int jobs = 1) {
    s.validate();
    washout = washout_or_default(s, washout);
    Path out(d.z.size());
    parallel_for(d.z.size(), jobs, [&](std::size_t i) { out[i] = last_state(s, d.z[i], washout); });
    return out;
}

inline MeanSe risk_on_states(const Path& states, const Path& y, const Readout& h, const Loss& L) {
    std::vector<double> v(states.size());
    Vec out(h.W.rows());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.noalias() = h.W * states[i];
        out += h.a;
        v[i] = L(out, y[i]);
    }
    return mean_se(v);
}

inline MeanSe statistical_risk_mc(const ReservoirSystem& s, const Readout& h, const JointModel& jm,
                                  const Loss& L, int n_mc, int history, std::uint64_t seed,
                                  int jobs = 1) {
    RiskDraws d = draw_risk_pool(jm, n_mc, history, seed, jobs);
    return risk_on_states(pool_states(s, d, -1, jobs), d.y, h, L);
}

// E|L(0, Y_0)| and E||Y_0||^2 by Monte Carlo.
inline MeanSe zero_predictor_risk(const JointModel& jm, const Loss& L, int n_mc, std::uint64_t seed) {
    std::vector<double> v(static_cast<std::size_t>(n_mc));
    Vec zero = Vec::Zero(jm.m());
    for (int i = 0; i < n_mc; ++i) v[std::size_t(i)] = L(zero, jm.generate(1, seed + std::uint64_t(i)).y[0]);
    return mean_se(v);
}

inline MeanSe target_second_moment(const JointModel& jm, int n_mc, std::uint64_t seed) {
    std::vector<double> v(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) v[std::size_t(i)] = jm.generate(1, seed + std::uint64_t(i)).y[0].squaredNorm();
    return mean_se(v);
}

// ---------------------------------------------------------------------------
// Constrained ERM for the readout

struct ErmOptions {
    int restarts = 5;
    int max_iter = 3000;
    int epoch = 25;
    std::uint64_t seed = 0;
};

struct ErmResult {
    Readout readout;
    double objective = 0.0;
    int iterations = 0;
};

namespace detail {

inline double erm_objective(const Mat& X, const Mat& Y, const Mat& W, const Vec& a, const Loss& L,
                            Mat& R) {
    R.noalias() = X * W.transpose();
    R.rowwise() += a.transpose();
    R -= Y;
    double s = 0.0;
    for (Eigen::Index i = 0; i < R.size(); ++i) s += L.f(R.data()[i]);
    return s / double(X.rows());
}

} // namespace detail

// Projected subgradient with normalized steps; the step halves after every
// epoch without improvement of the best objective.
inline ErmResult fit_readout_erm(const Mat& X, const Mat& Y, double Lh, double Lh0, const Loss& L,
                                 const ErmOptions& opt = {}) {
    require(X.rows() >= 1 && X.rows() == Y.rows(), "erm: X and Y need the same number of rows >= 1");
    require(Lh >= 0.0 && Lh0 >= 0.0, "erm: caps must be >= 0");
    if (!X.allFinite() || !Y.allFinite()) throw RuntimeError("erm: non-finite states or targets");
    const Eigen::Index m = Y.cols(), N = X.cols();
    ErmResult best;
    best.readout.W = Mat::Zero(m, N);
    best.readout.a = Vec::Zero(m);
    Mat R(X.rows(), m);
    best.objective = detail::erm_objective(X, Y, best.readout.W, best.readout.a, L, R);
    if (Lh == 0.0 && Lh0 == 0.0) return best;

    double xscale = std::sqrt(X.rowwise().squaredNorm().mean());
    double eta0 = 0.5 * (Lh * std::max(xscale, 1e-12) + Lh0);
    Rng g = trial_rng(opt.seed, 0);
    for (int rs = 0; rs < std::max(1, opt.restarts); ++rs) {
        Mat W = Mat::Zero(m, N);
        Vec a = Vec::Zero(m);
        if (rs > 0) {
            W = clip_spectral(random_uniform_matrix(g, m, N) * Lh, Lh * uniform(g, 0, 1));
            a = clip_norm(random_uniform_matrix(g, m, 1).col(0) * Lh0, Lh0 * uniform(g, 0, 1));
        }
        double f = detail::erm_objective(X, Y, W, a, L, R);
        Mat bW = W;
        Vec ba = a;
        double bf = f, epoch_start = f, eta = eta0;
        Mat G(m, N);
        Vec ga(m);
        int it = 0;
        for (; it < opt.max_iter && eta > 1e-12 * eta0; ++it) {
            for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = L.df(R.data()[i]);
            G.noalias() = R.transpose() * X;
            ga = R.colwise().sum().transpose();
            if (Lh == 0.0) G.setZero();
            if (Lh0 == 0.0) ga.setZero();
            // normalized step in (W * xscale, a) so both blocks move in output units
            double s2 = std::max(xscale * xscale, 1e-24);
            double gn = std::sqrt(G.squaredNorm() / s2 + ga.squaredNorm());
            if (gn == 0.0) break;
            W = clip_spectral(W - (eta / gn / s2) * G, Lh);
            a = clip_norm(a - (eta / gn) * ga, Lh0);
            f = detail::erm_objective(X, Y, W, a, L, R);
            if (f < bf) {
                bf = f;
                bW = W;
                ba = a;
            }
            if ((it + 1) % opt.epoch == 0) {
                if (bf >= epoch_start - 1e-12 * std::max(1.0, std::fabs(epoch_start))) eta *= 0.5;
                epoch_start = bf;
            }
        }
        best.iterations += it;
        if (bf < best.objective) {
            best.objective = bf;
            best.readout.W = bW;
            best.readout.a = ba;
        }
    }
    return best;
}

inline Mat stack_rows(const Path& p) {
    if (p.empty()) return Mat(0, 0);
    Mat M(Eigen::Index(p.size()), p[0].size());
    for (std::size_t i = 0; i < p.size(); ++i) M.row(Eigen::Index(i)) = p[i].transpose();
    return M;
}

// ---------------------------------------------------------------------------
// CSV

// Columns z_1..z_d, y_1..y_m; the header names decide the split.
inline TrainingSample read_sample_csv(std::istream& is) {
    std::string line;
    require(bool(std::getline(is, line)), "csv: empty input");
    std::vector<char> col_is_y;
    {
        std::stringstream ss(line);
        std::string name;
        while (std::getline(ss, name, ',')) {
            while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
            require(!name.empty() && (name[0] == 'z' || name[0] == 'y'),
                    "csv: header columns must be z_* or y_*");
            col_is_y.push_back(name[0] == 'y');
        }
    }
    int dz = 0, dy = 0;
    for (char c : col_is_y) (c ? dy : dz)++;
    require(dz >= 1 && dy >= 1, "csv: need at least one z and one y column");
    TrainingSample s;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        Vec z(dz), y(dy);
        int iz = 0, iy = 0;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            require(c < col_is_y.size(), "csv: too many cells in a row");
            double v;
            try {
                v = std::stod(cell);
            } catch (...) {
                throw ConfigError("csv: bad number '" + cell + "'");
            }
            require(std::isfinite(v), "csv: non-finite entry");
            if (col_is_y[c]) y(iy++) = v;
            else z(iz++) = v;
            ++c;
        }
        require(c == col_is_y.size(), "csv: too few cells in a row");
        s.z.push_back(z);
        s.y.push_back(y);
    }
    s.validate();
    return s;
}

} // namespace rcb
