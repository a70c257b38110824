#pragma once

#include "rcbounds/common.hpp"
#include "rcbounds/json_util.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rcb {

// ---------------------------------------------------------------------------
// Innovation laws

enum class LawKind { Gaussian, Uniform, Laplace };

struct InnovationLaw {
    LawKind kind = LawKind::Gaussian;
    double scale = 1.0;  // sd for gaussian, half-width for uniform, b for laplace

    double sample(Rng& g) const {
        switch (kind) {
        case LawKind::Gaussian: return scale * gauss(g);
        case LawKind::Uniform: return uniform(g, -scale, scale);
        case LawKind::Laplace: {
            double u = uniform(g, -0.5, 0.5);
            double s = u < 0 ? -1.0 : 1.0;
            return -scale * s * std::log1p(-2.0 * std::fabs(u));
        }
        }
        return 0.0;
    }

    double mean_abs() const {
        switch (kind) {
        case LawKind::Gaussian: return scale * std::sqrt(2.0 / M_PI);
        case LawKind::Uniform: return 0.5 * scale;
        case LawKind::Laplace: return scale;
        }
        return 0.0;
    }

    double second_moment() const {
        switch (kind) {
        case LawKind::Gaussian: return scale * scale;
        case LawKind::Uniform: return scale * scale / 3.0;
        case LawKind::Laplace: return 2.0 * scale * scale;
        }
        return 0.0;
    }

    // E|x|^q for one coordinate.
    double abs_moment(double q) const {
        switch (kind) {
        case LawKind::Gaussian:
            return std::pow(scale, q) * std::pow(2.0, q / 2) * std::tgamma((q + 1) / 2) /
                   std::sqrt(M_PI);
        case LawKind::Uniform: return std::pow(scale, q) / (q + 1);
        case LawKind::Laplace: return std::pow(scale, q) * std::tgamma(q + 1);
        }
        return 0.0;
    }

    // E exp(t|x|), t >= 0, one coordinate.
    double abs_mgf(double t) const {
        if (t == 0.0) return 1.0;
        switch (kind) {
        case LawKind::Gaussian: {
            double ts = t * scale;
            return 2.0 * std::exp(0.5 * ts * ts) * 0.5 * std::erfc(-ts / std::sqrt(2.0));
        }
        case LawKind::Uniform: return std::expm1(t * scale) / (t * scale);
        case LawKind::Laplace: return t * scale < 1.0 ? 1.0 / (1.0 - t * scale) : kInf;
        }
        return kInf;
    }

    bool bounded() const { return kind == LawKind::Uniform; }
    double bound() const { return bounded() ? scale : kInf; }
};

inline std::string law_name(LawKind k) {
    switch (k) {
    case LawKind::Gaussian: return "gaussian";
    case LawKind::Uniform: return "uniform";
    case LawKind::Laplace: return "laplace";
    }
    return "?";
}

inline LawKind law_from_name(const std::string& s) {
    if (s == "gaussian" || s == "normal") return LawKind::Gaussian;
    if (s == "uniform") return LawKind::Uniform;
    if (s == "laplace") return LawKind::Laplace;
    throw ConfigError("unknown innovation law '" + s + "'");
}

// Norm of a d-vector with iid coordinates drawn from a law.
struct NormLaw {
    InnovationLaw law;
    int dim = 1;
    bool exact = true;  // false when mean_norm is the Jensen upper bound

    double mean_norm() {
        if (dim == 1) return law.mean_abs();
        if (law.kind == LawKind::Gaussian)
            return law.scale * std::sqrt(2.0) * std::exp(std::lgamma((dim + 1) / 2.0) -
                                                          std::lgamma(dim / 2.0));
        exact = false;
        return std::sqrt(dim * law.second_moment());
    }
    double bound() const { return law.bound() * std::sqrt(double(dim)); }

    // E||x||^q
    double norm_moment(double q) const {
        if (dim == 1) return law.abs_moment(q);
        require(law.kind == LawKind::Gaussian,
                "norm moments for dim > 1 are available for gaussian laws only");
        return std::pow(law.scale, q) * std::pow(2.0, q / 2) *
               std::exp(std::lgamma((dim + q) / 2.0) - std::lgamma(dim / 2.0));
    }
    double norm_mgf(double t) const {
        require(dim == 1, "exponential moments of the norm need dim = 1");
        return law.abs_mgf(t);
    }
};

// ---------------------------------------------------------------------------
// Weighting sequences

struct WeightingSequence {
    enum Kind { Geometric, Polynomial } kind = Geometric;
    double param = 0.5;  // lambda for geometric, exponent p for (1+j)^-p

    static WeightingSequence geometric(double lambda) {
        require(lambda > 0.0 && lambda < 1.0, "geometric weighting needs lambda in (0,1)");
        return {Geometric, lambda};
    }
    static WeightingSequence polynomial(double p) {
        require(p > 0.0, "polynomial weighting needs p > 0");
        return {Polynomial, p};
    }

    double value(long j) const {
        return kind == Geometric ? std::pow(param, double(j)) : std::pow(1.0 + double(j), -param);
    }
    double inverse_decay_ratio() const {  // L_w
        return kind == Geometric ? 1.0 / param : std::pow(2.0, param);
    }
    double decay_ratio() const {  // D_w
        return kind == Geometric ? param : 1.0;
    }
    double l1_norm() const {
        if (kind == Geometric) return 1.0 / (1.0 - param);
        return param > 1.0 ? std::riemann_zeta(param) : kInf;
    }
};

// ---------------------------------------------------------------------------
// Process models

enum class ProcessKind { IID, VAR1TV, GARCH11, ARFIMA, MAFinite };

inline std::string kind_name(ProcessKind k) {
    switch (k) {
    case ProcessKind::IID: return "iid";
    case ProcessKind::VAR1TV: return "var1_tv";
    case ProcessKind::GARCH11: return "garch11";
    case ProcessKind::ARFIMA: return "arfima";
    case ProcessKind::MAFinite: return "ma";
    }
    return "?";
}

struct ProcessModel {
    ProcessKind kind = ProcessKind::IID;
    InnovationLaw law;
    int dim = 1;  // for iid and ma

    // VAR1-TV: Z_t = g_t A Z_{t-1} + eta_t, g_t ~ U[scale_low, scale_high]
    Mat A;
    double scale_low = 1.0, scale_high = 1.0;

    // GARCH11
    double omega = 0.1, alpha = 0.1, beta = 0.8;
    bool squares = false;  // output (r^2, sigma^2) instead of r

    // ARFIMA(0, dbar, 0) truncated at K coefficients
    double dbar = 0.3;
    int K = 10000;

    // MA-finite: Z_t = xi_t + sum_j coeffs[j-1] xi_{t-j}
    std::vector<double> coeffs;

    int out_dim() const {
        switch (kind) {
        case ProcessKind::IID:
        case ProcessKind::MAFinite: return dim;
        case ProcessKind::VAR1TV: return int(A.rows());
        case ProcessKind::GARCH11: return squares ? 2 : 1;
        case ProcessKind::ARFIMA: return 1;
        }
        return 1;
    }

    // Length of one innovation vector.
    int innov_dim() const {
        switch (kind) {
        case ProcessKind::VAR1TV: return int(A.rows()) + 1;
        case ProcessKind::GARCH11:
        case ProcessKind::ARFIMA: return 1;
        default: return dim;
        }
    }

    // E|g| for g ~ U[lo, hi]
    double mean_abs_scale() const {
        double lo = scale_low, hi = scale_high;
        if (hi == lo) return std::fabs(lo);
        if (lo >= 0) return 0.5 * (lo + hi);
        if (hi <= 0) return -0.5 * (lo + hi);
        return (lo * lo + hi * hi) / (2.0 * (hi - lo));
    }

    void validate() const {
        require(law.scale > 0.0, "innovation scale must be positive");
        switch (kind) {
        case ProcessKind::IID:
        case ProcessKind::MAFinite: require(dim >= 1, "dim must be >= 1"); break;
        case ProcessKind::VAR1TV:
            require(A.rows() >= 1 && A.rows() == A.cols(), "var1_tv: A must be square");
            require(scale_low <= scale_high, "var1_tv: scale_low > scale_high");
            require(mean_abs_scale() * spectral_norm(A) < 1.0,
                    "var1_tv: expected spectral norm of A_t must be < 1");
            break;
        case ProcessKind::GARCH11:
            require(omega >= 0 && alpha >= 0 && beta >= 0, "garch11: parameters must be >= 0");
            require(alpha + beta < 1.0, "garch11: alpha + beta must be < 1");
            break;
        case ProcessKind::ARFIMA:
            require(dbar > -0.5 && dbar < 0.5 && dbar != 0.0,
                    "arfima: dbar must lie in (-1/2, 1/2) and be nonzero");
            require(K >= 1, "arfima: K must be >= 1");
            break;
        }
    }

    double garch_stationary_var() const { return omega / (1.0 - alpha - beta); }

    Vec draw_innovation(Rng& g) const {
        Vec xi(innov_dim());
        if (kind == ProcessKind::VAR1TV) {
            xi(0) = scale_low == scale_high ? scale_low : uniform(g, scale_low, scale_high);
            for (Eigen::Index i = 1; i < xi.size(); ++i) xi(i) = law.sample(g);
        } else {
            for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = law.sample(g);
        }
        return xi;
    }
};

// phi_k = Gamma(k + d) / (Gamma(k + 1) Gamma(d)) via the ratio recursion.
inline std::vector<double> arfima_coefficients(double dbar, int K) {
    std::vector<double> phi(std::size_t(std::max(K, 1)));
    phi[0] = 1.0;
    for (std::size_t k = 1; k < phi.size(); ++k)
        phi[k] = phi[k - 1] * (double(k) - 1.0 + dbar) / double(k);
    return phi;
}

namespace detail {

// Linear filters Z_0 = sum_k c_k xi_{-k}; coefficient list for iid/ma/arfima.
inline std::vector<double> linear_coeffs(const ProcessModel& m) {
    switch (m.kind) {
    case ProcessKind::IID: return {1.0};
    case ProcessKind::MAFinite: {
        std::vector<double> c{1.0};
        c.insert(c.end(), m.coeffs.begin(), m.coeffs.end());
        return c;
    }
    case ProcessKind::ARFIMA: return arfima_coefficients(m.dbar, m.K);
    default: return {};
    }
}

inline bool is_linear(const ProcessModel& m) {
    return m.kind == ProcessKind::IID || m.kind == ProcessKind::MAFinite ||
           m.kind == ProcessKind::ARFIMA;
}

// Output at time 0 of a recursive model run over xi (oldest first) from its
// initial state.
inline Vec recursive_value(const ProcessModel& m, const Path& xi) {
    if (m.kind == ProcessKind::VAR1TV) {
        Vec z = Vec::Zero(m.A.rows()), tmp(m.A.rows());
        for (const Vec& e : xi) {
            tmp.noalias() = m.A * z;
            z = e(0) * tmp + e.tail(e.size() - 1);
        }
        return z;
    }
    double s2 = m.garch_stationary_var(), r2 = s2, r = 0.0;
    for (const Vec& e : xi) {
        s2 = m.omega + m.alpha * r2 + m.beta * s2;
        r = std::sqrt(s2) * e(0);
        r2 = r * r;
    }
    if (m.squares) return (Vec(2) << r2, s2).finished();
    return Vec::Constant(1, r);
}

} // namespace detail

// Stationary-approximating sample path. Recursive models start from their
// zero/stationary state and discard burn_in steps; linear models (iid, ma,
// arfima) need no burn-in since their truncated MA form is used directly.
inline Path generate_path(const ProcessModel& m, int n, int burn_in, std::uint64_t seed) {
    m.validate();
    require(n >= 1, "n must be >= 1");
    require(burn_in >= 0, "burn_in must be >= 0");
    Rng g = trial_rng(seed, 0);
    Path out;
    out.reserve(std::size_t(n));
    if (detail::is_linear(m)) {
        auto c = detail::linear_coeffs(m);
        std::size_t q = c.size();
        Path xi;
        xi.reserve(q - 1 + std::size_t(n));
        for (std::size_t t = 0; t < q - 1 + std::size_t(n); ++t) xi.push_back(m.draw_innovation(g));
        for (int t = 0; t < n; ++t) {
            std::size_t now = q - 1 + std::size_t(t);
            Vec z = Vec::Zero(xi[0].size());
            for (std::size_t k = 0; k < q; ++k) z += c[k] * xi[now - k];
            out.push_back(std::move(z));
        }
        return out;
    }
    if (m.kind == ProcessKind::VAR1TV) {
        Vec z = Vec::Zero(m.A.rows()), tmp(m.A.rows());
        for (int t = -burn_in; t < n; ++t) {
            Vec e = m.draw_innovation(g);
            tmp.noalias() = m.A * z;
            z = e(0) * tmp + e.tail(e.size() - 1);
            if (t >= 0) out.push_back(z);
        }
        return out;
    }
    double s2 = m.garch_stationary_var(), r2 = s2;
    for (int t = -burn_in; t < n; ++t) {
        s2 = m.omega + m.alpha * r2 + m.beta * s2;
        double r = std::sqrt(s2) * m.law.sample(g);
        r2 = r * r;
        if (t < 0) continue;
        if (m.squares)
            out.push_back((Vec(2) << r2, s2).finished());
        else
            out.push_back(Vec::Constant(1, r));
    }
    return out;
}

inline int default_theta_history(int tau) { return std::max(200, 10 * tau); }

// Coupling estimate of theta(tau) for every tau in taus. Linear models reuse
// one innovation copy per trial for all lags; recursive models are simulated
// per lag over the shared finite history.
inline std::vector<MeanSe> estimate_theta_curve(const ProcessModel& m, const std::vector<int>& taus,
                                                int n_mc, int history, std::uint64_t seed,
                                                int jobs = 1) {
    m.validate();
    require(n_mc >= 2, "n_mc must be >= 2");
    for (int t : taus) {
        require(t >= 1, "tau must be >= 1");
        require(history >= t, "history must be >= tau");
    }
    std::vector<std::vector<double>> samples(taus.size(), std::vector<double>(std::size_t(n_mc)));
    if (m.kind == ProcessKind::IID) {
        std::vector<MeanSe> zero(taus.size());
        return zero;
    }
    if (detail::is_linear(m)) {
        auto c = detail::linear_coeffs(m);
        std::size_t H = std::min<std::size_t>(std::size_t(history), c.size());
        int dz = m.innov_dim();
        parallel_for(std::size_t(n_mc), jobs, [&](std::size_t trial) {
            Rng g = trial_rng(seed, trial);
            // suffix[k] = sum_{j >= k} c_j (xi_{-j} - xi~_{-j})
            std::vector<Vec> diff(H);
            for (std::size_t k = 0; k < H; ++k) {
                Vec d(dz);
                for (int i = 0; i < dz; ++i) {
                    if (m.law.kind == LawKind::Gaussian)
                        d(i) = std::sqrt(2.0) * m.law.sample(g);
                    else
                        d(i) = m.law.sample(g) - m.law.sample(g);
                }
                diff[k] = std::move(d);
            }
            Vec acc = Vec::Zero(dz);
            std::vector<double> tail_norm(H + 1, 0.0);
            for (std::size_t k = H; k-- > 0;) {
                acc += c[k] * diff[k];
                tail_norm[k] = acc.norm();
            }
            for (std::size_t i = 0; i < taus.size(); ++i) {
                std::size_t t = std::size_t(taus[i]);
                samples[i][trial] = t < H ? tail_norm[t] : 0.0;
            }
        });
    } else {
        parallel_for(std::size_t(n_mc), jobs, [&](std::size_t trial) {
            Rng g = trial_rng(seed, trial);
            Path xi;
            xi.reserve(std::size_t(history));
            for (int t = 0; t < history; ++t) xi.push_back(m.draw_innovation(g));
            Vec base = detail::recursive_value(m, xi);
            Path alt(xi.size());
            for (std::size_t i = 0; i < taus.size(); ++i) {
                // xi[j] is time j - history + 1; times <= -tau get replaced
                std::size_t cut = std::size_t(history - taus[i]);
                for (std::size_t j = 0; j < xi.size(); ++j)
                    alt[j] = j < cut ? m.draw_innovation(g) : xi[j];
                samples[i][trial] = (base - detail::recursive_value(m, alt)).norm();
            }
        });
    }
    std::vector<MeanSe> out;
    for (auto& s : samples) out.push_back(mean_se(s));
    return out;
}

inline MeanSe estimate_theta(const ProcessModel& m, int tau, int n_mc, int history,
                             std::uint64_t seed, int jobs = 1) {
    return estimate_theta_curve(m, {tau}, n_mc, history, seed, jobs)[0];
}

// MC estimate of E||Z_0||^order from independent stationary draws.
inline MeanSe moment(const ProcessModel& m, int order, int n_mc, std::uint64_t seed,
                     int burn_in = 500, int jobs = 1) {
    require(order == 1 || order == 2, "moment order must be 1 or 2");
    require(n_mc >= 2, "n_mc must be >= 2");
    m.validate();
    std::vector<double> v(static_cast<std::size_t>(n_mc));
    parallel_for(std::size_t(n_mc), jobs, [&](std::size_t i) {
        Path p = generate_path(m, 1, burn_in, seed + i);
        double x = p.back().norm();
        v[i] = order == 1 ? x : x * x;
    });
    return mean_se(v);
}

// ---------------------------------------------------------------------------
// Dependence profiles

enum class Regime { Lipschitz, Geometric, Algebraic };

inline std::string regime_name(Regime r) {
    switch (r) {
    case Regime::Lipschitz: return "lipschitz";
    case Regime::Geometric: return "geometric";
    case Regime::Algebraic: return "algebraic";
    }
    return "?";
}

inline Regime regime_from_name(const std::string& s) {
    if (s == "lipschitz") return Regime::Lipschitz;
    if (s == "geometric") return Regime::Geometric;
    if (s == "algebraic") return Regime::Algebraic;
    throw ConfigError("unknown regime '" + s + "'");
}

struct DependenceProfile {
    Regime regime = Regime::Geometric;
    double C = 0.0;
    double lambda = 0.0;  // geometric rate
    double alpha = 0.0;   // algebraic exponent
    bool exact_zero = false;
    bool estimated = false;  // C involves an MC moment
    double C_se = 0.0;
    // Lipschitz-Bernoulli data
    double L = 0.0;
    WeightingSequence w;
    double mean_norm_xi = 0.0;
    std::string note;

    double theta_envelope(double tau) const {
        if (exact_zero) return 0.0;
        switch (regime) {
        case Regime::Geometric: return C * std::pow(lambda, tau);
        case Regime::Algebraic: return C * std::pow(tau, -alpha);
        case Regime::Lipschitz:
            return lipschitz_C() * std::pow(w.decay_ratio(), tau);
        }
        return 0.0;
    }

    // Geometric constants implied by Lipschitz-Bernoulli data.
    double lipschitz_C() const { return 2.0 * L * mean_norm_xi / (1.0 - w.decay_ratio()); }

    DependenceProfile as_geometric() const {
        if (regime != Regime::Lipschitz) return *this;
        DependenceProfile g = *this;
        g.regime = Regime::Geometric;
        g.C = lipschitz_C();
        g.lambda = w.decay_ratio();
        return g;
    }
};

inline DependenceProfile dependence_params(const ProcessModel& m, int n_mc = 20000,
                                           std::uint64_t seed = 0, int jobs = 1) {
    m.validate();
    DependenceProfile p;
    switch (m.kind) {
    case ProcessKind::IID:
        p.regime = Regime::Geometric;
        p.exact_zero = true;
        p.note = "theta vanishes identically";
        return p;
    case ProcessKind::MAFinite: {
        // theta(tau) <= 2 E||xi|| sum_{j>=tau} |c_j|, zero beyond the order;
        // packed into a geometric envelope with rate 1/2.
        NormLaw nl{m.law, m.dim};
        double exi = nl.mean_norm();
        p.regime = Regime::Geometric;
        p.lambda = 0.5;
        std::size_t q = m.coeffs.size();
        for (std::size_t tau = 1; tau <= q; ++tau) {
            double s = 0.0;
            for (std::size_t j = tau; j <= q; ++j) s += std::fabs(m.coeffs[j - 1]);
            p.C = std::max(p.C, 2.0 * exi * s / std::pow(0.5, double(tau)));
        }
        p.exact_zero = p.C == 0.0;
        p.note = "theta is zero beyond the moving-average order";
        return p;
    }
    case ProcessKind::VAR1TV: {
        p.regime = Regime::Geometric;
        p.lambda = m.mean_abs_scale() * spectral_norm(m.A);
        MeanSe e = moment(m, 1, n_mc, seed, 500, jobs);
        p.C = 2.0 * e.mean;
        p.C_se = 2.0 * e.se;
        p.estimated = true;
        p.note = "C = 2 E||Z_0|| estimated by Monte Carlo";
        return p;
    }
    case ProcessKind::GARCH11: {
        require(m.omega > 0.0, "garch11: omega must be > 0 for a dependence profile");
        double ab = m.alpha + m.beta;
        p.regime = Regime::Geometric;
        p.lambda = ab;
        if (!m.squares) {
            // |r - r~| = |eps_0| |sigma^2 - sigma~^2| / (sigma + sigma~) with
            // sigma^2 >= omega, and E|sigma_0^2 - sigma~_0^2| <= 2 (a+b)^tau E sigma^2.
            p.C = m.law.mean_abs() * std::sqrt(m.omega) / (1.0 - ab);
            p.note = "returns output; analytic constant";
            return p;
        }
        // A_t = u_t v^T with u_t = (eps_t^2, 1), v = (alpha, beta): products of
        // tau factors have norm ||u_0|| ||v|| prod (alpha eps^2 + beta).
        require(ab > 0.0, "garch11: alpha + beta must be > 0 for squared output");
        std::vector<double> u(static_cast<std::size_t>(n_mc));
        Rng g = trial_rng(seed, 1);
        for (auto& x : u) {
            double e = m.law.sample(g);
            x = std::sqrt(e * e * e * e + 1.0);
        }
        MeanSe eu = mean_se(u);
        MeanSe ez = moment(m, 1, n_mc, seed + 7, 500, jobs);
        double k = 2.0 * std::hypot(m.alpha, m.beta) / ab;
        p.C = k * eu.mean * ez.mean;
        p.C_se = k * std::hypot(eu.se * ez.mean, eu.mean * ez.se);
        p.estimated = true;
        p.note = "squared output; C from rank-one coefficient products, moments by Monte Carlo";
        return p;
    }
    case ProcessKind::ARFIMA: {
        // theta(tau) <= sqrt(2 E eps^2) (sum_{k>=tau} phi_k^2)^{1/2} and
        // phi_k^2 <= S^2 k^{2d-2}, sum_{k>=tau} k^{2d-2} <= tau^{2d-1}(1 + 1/(1-2d)).
        auto phi = arfima_coefficients(m.dbar, m.K);
        double S = 0.0;
        for (std::size_t k = 1; k < phi.size(); ++k)
            S = std::max(S, std::pow(double(k), 1.0 - m.dbar) * std::fabs(phi[k]));
        p.regime = Regime::Algebraic;
        p.alpha = 0.5 - m.dbar;
        p.C = std::sqrt(2.0 * m.law.second_moment()) * S *
              std::sqrt(1.0 + 1.0 / (1.0 - 2.0 * m.dbar));
        p.note = "analytic constant from the MA coefficients";
        return p;
    }
    }
    throw ConfigError("unsupported process kind");
}

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
    double C = 0.0;
    double rate = 0.0;  // lambda (geometric) or alpha (algebraic)
    bool exact_zero = false;
    int points = 0;
};

inline DecayFit fit_theta_decay(const std::vector<std::pair<double, double>>& pts, Regime regime) {
    require(regime != Regime::Lipschitz, "fit regime must be geometric or algebraic");
    std::vector<double> xs, ys;
    for (auto [tau, th] : pts) {
        if (th <= 0.0) continue;
        xs.push_back(regime == Regime::Geometric ? tau : std::log(tau));
        ys.push_back(std::log(th));
    }
    DecayFit f;
    if (xs.empty()) {
        f.exact_zero = true;
        return f;
    }
    require(xs.size() >= 3, "decay fit needs at least 3 positive points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    require(sxx > 0.0, "decay fit needs distinct lags");
    double slope = sxy / sxx;
    f.C = std::exp(my - slope * mx);
    f.rate = regime == Regime::Geometric ? std::exp(slope) : -slope;
    f.points = int(xs.size());
    return f;
}

// ---------------------------------------------------------------------------
// JSON and CSV

inline ProcessModel process_from_json(const json& j) {
    check_keys(j, {"kind", "innovation", "scale", "dim", "A", "scale_low", "scale_high", "omega",
                   "alpha", "beta", "output", "dbar", "K", "coeffs"},
               "process");
    ProcessModel m;
    std::string k = get_req<std::string>(j, "kind", "process");
    if (k == "iid") m.kind = ProcessKind::IID;
    else if (k == "var1_tv") m.kind = ProcessKind::VAR1TV;
    else if (k == "garch11") m.kind = ProcessKind::GARCH11;
    else if (k == "arfima") m.kind = ProcessKind::ARFIMA;
    else if (k == "ma") m.kind = ProcessKind::MAFinite;
    else throw ConfigError("process: unknown kind '" + k + "'");
    m.law.kind = law_from_name(get_or<std::string>(j, "innovation", "gaussian"));
    m.law.scale = get_or<double>(j, "scale", 1.0);
    m.dim = get_or<int>(j, "dim", 1);
    if (j.contains("A")) m.A = mat_from_json(j["A"], "process.A");
    m.scale_low = get_or<double>(j, "scale_low", 1.0);
    m.scale_high = get_or<double>(j, "scale_high", m.scale_low);
    m.omega = get_or<double>(j, "omega", m.omega);
    m.alpha = get_or<double>(j, "alpha", m.alpha);
    m.beta = get_or<double>(j, "beta", m.beta);
    std::string out = get_or<std::string>(j, "output", "returns");
    require(out == "returns" || out == "squares", "process.output must be returns|squares");
    m.squares = out == "squares";
    m.dbar = get_or<double>(j, "dbar", m.dbar);
    m.K = get_or<int>(j, "K", m.K);
    m.coeffs = get_or<std::vector<double>>(j, "coeffs", {});
    if (m.kind == ProcessKind::VAR1TV) require(j.contains("A"), "process: var1_tv needs A");
    m.validate();
    return m;
}

inline json process_to_json(const ProcessModel& m) {
    json j;
    j["kind"] = kind_name(m.kind);
    j["innovation"] = law_name(m.law.kind);
    j["scale"] = m.law.scale;
    switch (m.kind) {
    case ProcessKind::IID: j["dim"] = m.dim; break;
    case ProcessKind::MAFinite: j["dim"] = m.dim; j["coeffs"] = m.coeffs; break;
    case ProcessKind::VAR1TV:
        j["A"] = mat_to_json(m.A);
        j["scale_low"] = m.scale_low;
        j["scale_high"] = m.scale_high;
        break;
    case ProcessKind::GARCH11:
        j["omega"] = m.omega;
        j["alpha"] = m.alpha;
        j["beta"] = m.beta;
        j["output"] = m.squares ? "squares" : "returns";
        break;
    case ProcessKind::ARFIMA: j["dbar"] = m.dbar; j["K"] = m.K; break;
    }
    return j;
}

inline json profile_to_json(const DependenceProfile& p) {
    json j;
    j["regime"] = regime_name(p.regime);
    j["C"] = num(p.C);
    if (p.regime == Regime::Geometric) j["lambda"] = p.lambda;
    if (p.regime == Regime::Algebraic) j["alpha"] = p.alpha;
    if (p.regime == Regime::Lipschitz) {
        j["L"] = p.L;
        j["w"] = {{"kind", p.w.kind == WeightingSequence::Geometric ? "geometric" : "polynomial"},
                  {"param", p.w.param}};
        j["mean_norm_xi"] = p.mean_norm_xi;
    }
    j["exact_zero"] = p.exact_zero;
    j["provenance"] = p.estimated ? "estimated" : "analytic";
    if (p.estimated) j["C_se"] = p.C_se;
    if (!p.note.empty()) j["note"] = p.note;
    return j;
}

inline DependenceProfile profile_from_json(const json& j, const std::string& where) {
    check_keys(j, {"regime", "C", "lambda", "alpha", "L", "w", "mean_norm_xi", "exact_zero",
                   "provenance", "C_se", "note"},
               where);
    DependenceProfile p;
    p.regime = regime_from_name(get_req<std::string>(j, "regime", where));
    p.C = j.contains("C") ? num_from(j["C"], where + ".C") : 0.0;
    p.lambda = get_or<double>(j, "lambda", 0.0);
    p.alpha = get_or<double>(j, "alpha", 0.0);
    p.exact_zero = get_or<bool>(j, "exact_zero", false);
    p.estimated = get_or<std::string>(j, "provenance", "analytic") == "estimated";
    p.C_se = get_or<double>(j, "C_se", 0.0);
    p.note = get_or<std::string>(j, "note", "");
    if (p.regime == Regime::Lipschitz) {
        p.L = get_req<double>(j, "L", where);
        p.mean_norm_xi = get_req<double>(j, "mean_norm_xi", where);
        require(j.contains("w"), where + ": lipschitz regime needs w");
        const json& w = j["w"];
        check_keys(w, {"kind", "param"}, where + ".w");
        std::string wk = get_req<std::string>(w, "kind", where + ".w");
        double par = get_req<double>(w, "param", where + ".w");
        if (wk == "geometric") p.w = WeightingSequence::geometric(par);
        else if (wk == "polynomial") p.w = WeightingSequence::polynomial(par);
        else throw ConfigError(where + ".w: unknown kind '" + wk + "'");
        require(p.w.decay_ratio() < 1.0, where + ": weighting sequence needs D_w < 1");
    } else if (p.regime == Regime::Geometric && !p.exact_zero) {
        require(p.lambda > 0.0 && p.lambda < 1.0, where + ": lambda must lie in (0,1)");
    } else if (p.regime == Regime::Algebraic) {
        require(p.alpha > 0.0, where + ": alpha must be > 0");
    }
    require(p.C >= 0.0, where + ": C must be >= 0");
    return p;
}

inline void write_path_csv(std::ostream& os, const Path& p) {
    if (p.empty()) return;
    auto d = p[0].size();
    for (Eigen::Index i = 0; i < d; ++i) os << (i ? "," : "") << "z_" << (i + 1);
    os << "\n";
    char buf[32];
    for (const Vec& v : p) {
        for (Eigen::Index i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v(i));
            os << (i ? "," : "") << buf;
        }
        os << "\n";
    }
}

} // namespace rcb
