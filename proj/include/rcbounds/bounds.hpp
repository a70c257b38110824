#pragma once

#include "rcbounds/common.hpp"
#include "rcbounds/json_util.hpp"
#include "rcbounds/learning.hpp"
#include "rcbounds/processes.hpp"
#include "rcbounds/reservoir.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace rcb {

// ---------------------------------------------------------------------------
// Rademacher constants

inline double rademacher_constant(const HypothesisClass& c, double sqrt_EZ2) {
    c.validate();
    require(sqrt_EZ2 >= 0.0, "rademacher: E||Z||^2 must be >= 0");
    switch (c.family) {
    case Family::LRC:
        require(c.lamA > 0.0, "rademacher: lrc class needs 0 < lamA < 1");
        return c.Lh * (c.lamC * sqrt_EZ2 + c.lamZeta) / (1.0 - c.lamA) + c.Lh0;
    case Family::ESN: {
        double la = c.row_lamA();
        require(la > 0.0 && la < 1.0, "rademacher: esn class needs 0 < L_sigma sum rowA < 1");
        require(activation_info(c.act).odd, "rademacher: esn class needs an odd activation");
        return c.Lh * (c.row_lamC() * sqrt_EZ2 + c.row_lamZeta()) / (1.0 - la) + c.Lh0;
    }
    case Family::SAS: {
        double I = double(c.support.size());
        return c.Lh * c.cSAS * I / (1.0 - I * c.lamSAS) + c.Lh0;
    }
    }
    return kInf;
}

// Randomly generated reservoirs with expected scaled caps.
inline double rademacher_constant_random(double a, double E_lamC, double E_lamZeta, double Lh,
                                         double Lh0, double sqrt_EZ2) {
    require(a > 0.0 && a < 1.0, "rademacher: a must lie in (0,1)");
    return Lh / (1.0 - a) * (E_lamC * sqrt_EZ2 + E_lamZeta) + Lh0;
}

struct RandomEsnMoments {
    MeanSe lamC, lamZeta;
};

inline RandomEsnMoments random_esn_expectations(const RandomEsnSpec& sp, int draws, std::uint64_t seed) {
    std::vector<double> c, z;
    for (int i = 0; i < draws; ++i) {
        Rng g = trial_rng(seed, std::uint64_t(i));
        double L = activation_info(sp.act).lipschitz, sc = 0.0, sz = 0.0;
        for (int l = 0; l < sp.N; ++l) {
            double rn = 0.0;
            for (int k = 0; k < sp.d; ++k) {
                double v = sp.distC.sample(g);
                rn += v * v;
            }
            sc += std::sqrt(rn);
            sz += std::fabs(sp.distZeta.sample(g));
        }
        c.push_back(sp.c * L * sc);
        z.push_back(sp.s * L * sz);
    }
    return {mean_se(c), mean_se(z)};
}

// ---------------------------------------------------------------------------
// Inputs

struct Phi {
    enum Kind { Power, ExpM1 } kind = Power;
    double p = 3.0;
    double apply(double x) const { return kind == Power ? std::pow(x, p) : std::expm1(x); }
    double inverse(double y) const {
        require(y >= 0.0, "phi inverse: argument must be >= 0");
        return kind == Power ? std::pow(y, 1.0 / p) : std::log1p(y);
    }
};

inline double phi_inverse(const Phi& phi, double y) { return phi.inverse(y); }

struct BoundInputs {
    double r = 0.5, L_R = 1.0, Lh = 1.0, Lh0 = 0.0, M_F = 1.0, C_RC = 1.0;
    int m = 1;
    double L_L = 1.0;
    DependenceProfile z, y;
    double EZ2 = 1.0, EY2 = 1.0, EL0Y = 1.0;
    double Mbar = kInf;  // bound on ||xi_t|| for case ia
    Phi phi;
    std::optional<NormLaw> xi_z, xi_y;  // laws for the Phi moments of case ib
    std::vector<std::string> estimated;  // names of MC-estimated inputs

    void validate() const {
        require(r >= 0.0 && r < 1.0, "inputs: r must lie in [0,1)");
        require(L_R >= 0 && Lh >= 0 && Lh0 >= 0 && M_F >= 0 && C_RC >= 0,
                "inputs: class constants must be >= 0");
        require(m >= 1 && L_L > 0.0, "inputs: m >= 1 and L_L > 0 required");
        require(EZ2 >= 0 && EY2 >= 0 && EL0Y >= 0, "inputs: moments must be >= 0");
    }
};

inline BoundInputs make_bound_inputs(const HypothesisClass& c, const Loss& L, const DependenceProfile& pz,
                                     const DependenceProfile& py, double EZ2, double EY2, double EL0Y) {
    BoundInputs in;
    in.r = c.r();
    in.L_R = c.L_R();
    in.Lh = c.Lh;
    in.Lh0 = c.Lh0;
    in.M_F = c.M_F();
    in.C_RC = rademacher_constant(c, std::sqrt(EZ2));
    in.m = c.m;
    in.L_L = L.L_L;
    in.z = pz;
    in.y = py;
    in.EZ2 = EZ2;
    in.EY2 = EY2;
    in.EL0Y = EL0Y;
    return in;
}

// ---------------------------------------------------------------------------
// Constant chain

enum class BoundCase { Ia, Ib, II, III };

inline std::string case_name(BoundCase c) {
    switch (c) {
    case BoundCase::Ia: return "ia";
    case BoundCase::Ib: return "ib";
    case BoundCase::II: return "ii";
    case BoundCase::III: return "iii";
    }
    return "?";
}

inline BoundCase case_from_name(const std::string& s) {
    if (s == "ia") return BoundCase::Ia;
    if (s == "ib") return BoundCase::Ib;
    if (s == "ii") return BoundCase::II;
    if (s == "iii") return BoundCase::III;
    throw ConfigError("unknown bound case '" + s + "'");
}

inline double truncation_constant(const BoundInputs& in) {  // C_0
    return 2.0 * in.r * in.L_L * in.Lh * in.M_F / (1.0 - in.r);
}

inline double constant_B(const BoundInputs& in) { return 2.0 * std::sqrt(double(in.m)) * in.L_L; }

inline double constant_M(const BoundInputs& in) {
    return in.L_L * in.Lh * in.M_F + in.EL0Y + in.Lh0 * in.L_L;
}

// theta envelope used by a_tau; Lipschitz data enter through their geometric form.
inline double theta_bound(const DependenceProfile& p, double tau) {
    return p.as_geometric().theta_envelope(tau);
}

inline double a_tau(const BoundInputs& in, int tau) {
    require(tau >= 1, "a_tau: tau must be >= 1");
    double s = 0.0;
    for (int l = 0; l < tau; ++l) s += std::pow(in.r, l) * theta_bound(in.z, double(tau - l));
    return in.L_L * (2.0 * std::pow(in.r, tau) * in.M_F * in.Lh + theta_bound(in.y, double(tau)) +
                     in.L_R * in.Lh * s);
}

// max over tau >= 1 of log(tau) alpha_z / log(1/r) - tau / 4
inline double gamma_alpha(double r, double alpha_z) {
    require(r >= 0.0 && r < 1.0, "gamma_alpha: r must lie in [0,1)");
    require(alpha_z > 0.0, "gamma_alpha: alpha_z must be > 0");
    double lr = r == 0.0 ? kInf : std::log(1.0 / r);
    // the increment of the first term is below alpha_z / (tau log(1/r)); past
    // tau* it is below 1/4 and the objective decreases.
    long tstar = std::isfinite(lr) ? long(std::floor(4.0 * alpha_z / lr)) + 1 : 1;
    double best = -kInf;
    for (long t = 1; t <= 4 * tstar; ++t)
        best = std::max(best, std::log(double(t)) * alpha_z / lr - double(t) / 4.0);
    return best;
}

inline double C_alpha(double r, double alpha_z, double gamma) {
    return std::max(std::pow(2.0, alpha_z), std::pow(r, -gamma)) / (1.0 - std::sqrt(r));
}

struct BlockLength {
    long long tau = 1, k = 1;
};

inline bool admissible(double n, double lambda_max) {
    return std::log(n) < n * std::log(1.0 / lambda_max);
}

inline BlockLength block_length(double n, double lambda_max) {
    require(n >= 1.0, "block length: n must be >= 1");
    require(lambda_max > 0.0 && lambda_max < 1.0, "block length: lambda_max must lie in (0,1)");
    if (!admissible(n, lambda_max)) throw ConfigError("n too small for this lambda_max");
    BlockLength b;
    b.tau = std::max(1LL, (long long)std::floor(std::log(n) / std::log(1.0 / lambda_max)));
    b.k = (long long)std::floor(n / double(b.tau));
    return b;
}

inline double alg_beta(double alpha) { return 1.0 / (2.0 * (alpha + 0.5)); }

inline BlockLength block_length_algebraic(double n, double alpha) {
    require(n >= 1.0 && alpha > 0.0, "block length: n >= 1 and alpha > 0 required");
    BlockLength b;
    b.tau = std::max(1LL, (long long)std::floor(std::pow(n, alg_beta(alpha))));
    b.k = (long long)std::floor(n / double(b.tau));
    return b;
}

struct CorollaryConstants {
    double lambda_max = 0.0, M = 0.0, B = 0.0;
    double C_y = 0.0, C_z = 0.0;
    double C1 = 0.0, C2 = 0.0, C3 = 0.0, C3abs = 0.0;
    double alpha = 0.0, alpha_z = 0.0, gamma = 0.0, Calpha = 0.0, C1abs = 0.0, beta = 0.0;
};

enum class CorCase { I, II, III };

inline CorollaryConstants corollary_constants(const BoundInputs& in, CorCase cc) {
    in.validate();
    CorollaryConstants k;
    k.M = constant_M(in);
    k.B = constant_B(in);
    if (cc == CorCase::I || cc == CorCase::II) {
        if (cc == CorCase::I)
            require(in.y.regime == Regime::Lipschitz && in.z.regime == Regime::Lipschitz,
                    "case i needs Lipschitz-Bernoulli profiles for y and z");
        else
            require(in.y.regime != Regime::Algebraic && in.z.regime != Regime::Algebraic,
                    "case ii needs geometric profiles for y and z");
        DependenceProfile gy = in.y.as_geometric(), gz = in.z.as_geometric();
        double ly = gy.exact_zero ? 0.0 : gy.lambda, lz = gz.exact_zero ? 0.0 : gz.lambda;
        k.C_y = gy.exact_zero ? 0.0 : gy.C;
        k.C_z = gz.exact_zero ? 0.0 : gz.C;
        k.lambda_max = std::max({in.r, ly, lz});
        if (!(k.lambda_max > 0.0 && k.lambda_max < 1.0))
            throw ConfigError("lambda_max must lie in (0,1); got " + std::to_string(k.lambda_max));
        double ll = std::log(1.0 / k.lambda_max);
        k.C1 = (2.0 * in.M_F * in.L_L * in.Lh + in.L_L * k.C_y) / k.lambda_max;
        k.C2 = 2.0 * k.M / ll + in.L_L * in.L_R * in.Lh * k.C_z / (k.lambda_max * ll);
        k.C3 = 2.0 * std::sqrt(double(in.m)) * in.L_L * in.C_RC / std::sqrt(ll);
        k.C3abs = 2.0 * k.C3 + 4.0 * in.L_L * std::sqrt(in.EY2) / std::sqrt(ll);
        return k;
    }
    require(in.y.regime == Regime::Algebraic || in.y.exact_zero, "case iii needs an algebraic y profile");
    require(in.z.regime == Regime::Algebraic || in.z.exact_zero, "case iii needs an algebraic z profile");
    require(!(in.y.exact_zero && in.z.exact_zero), "case iii needs at least one algebraic profile");
    k.C_y = in.y.exact_zero ? 0.0 : in.y.C;
    k.C_z = in.z.exact_zero ? 0.0 : in.z.C;
    // a vanishing theta satisfies any algebraic rate; it borrows the other exponent
    double ay = in.y.exact_zero ? in.z.alpha : in.y.alpha;
    double az = in.z.exact_zero ? in.y.alpha : in.z.alpha;
    require(ay > 0.0 && az > 0.0, "case iii: alpha exponents must be > 0");
    k.alpha = std::min(ay, az);
    k.alpha_z = az;
    k.beta = alg_beta(k.alpha);
    k.gamma = gamma_alpha(in.r, az);
    k.Calpha = C_alpha(in.r, az, k.gamma);
    k.C1 = in.L_L * (2.0 * in.M_F * in.Lh * std::pow(in.r, -k.gamma) + in.L_R * in.Lh * k.C_z * k.Calpha + k.C_y) +
           k.B * in.C_RC;
    k.C2 = 2.0 * k.M;
    k.C1abs = k.C1 + 4.0 * in.L_L * std::sqrt(in.EY2) + k.B * in.C_RC;
    return k;
}

// Block-level expectation bound at block length tau.
inline double expectation_bound_generic(const BoundInputs& in, long long n, long long tau) {
    require(tau >= 1 && tau <= n, "generic bound: need 1 <= tau <= n");
    long long k = n / tau;
    double kt = double(k) * double(tau), nn = double(n);
    return kt / nn * a_tau(in, int(std::min<long long>(tau, 1 << 30))) +
           constant_B(in) * kt / nn * in.C_RC / std::sqrt(double(k)) + 2.0 * constant_M(in) * (nn - kt) / nn;
}

// Packaged expectation bound for geometric dependence.
inline double expectation_bound_corollary(const CorollaryConstants& k, double n) {
    return k.C1 / n + k.C2 * std::log(n) / n + k.C3 * std::sqrt(std::log(n)) / std::sqrt(n);
}

// ---------------------------------------------------------------------------
// High-probability bound

struct BoundReport {
    BoundCase bcase = BoundCase::II;
    double n = 0.0, delta = 0.0;
    std::map<std::string, double> constants;
    double bound = 0.0;
    std::vector<std::string> provenance;

    json to_json() const {
        json j;
        j["case"] = case_name(bcase);
        j["n"] = n;
        j["delta"] = delta;
        for (auto& [k, v] : constants) j[k] = num(v);
        j["bound"] = num(bound);
        j["estimated_inputs"] = provenance;
        return j;
    }
};

namespace detail {

inline double phi_moment_sq(const Phi& phi, const NormLaw& nl, double c) {  // E[Phi(c||xi||)^2]
    if (phi.kind == Phi::Power) return std::pow(c, 2.0 * phi.p) * nl.norm_moment(2.0 * phi.p);
    return nl.norm_mgf(2.0 * c) - 2.0 * nl.norm_mgf(c) + 1.0;
}

inline double phi_moment(const Phi& phi, const NormLaw& nl) {  // E[Phi(||xi||)]
    if (phi.kind == Phi::Power) return nl.norm_moment(phi.p);
    return nl.norm_mgf(1.0) - 1.0;
}

} // namespace detail

inline BoundReport theorem1_bound(const BoundInputs& in, BoundCase bc, double n, double delta) {
    in.validate();
    require(n >= 1.0, "n must be >= 1");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    BoundReport R;
    R.bcase = bc;
    R.n = n;
    R.delta = delta;
    R.provenance = in.estimated;
    if (in.z.estimated) R.provenance.push_back("C_z");
    if (in.y.estimated) R.provenance.push_back("C_y");

    double C0 = truncation_constant(in);
    double trunc = (1.0 - std::pow(in.r, n)) * C0 / n;
    auto& c = R.constants;
    c["C_RC"] = in.C_RC;
    c["C0"] = C0;
    c["r"] = in.r;
    c["M_F"] = in.M_F;

    if (bc == BoundCase::III) {
        CorollaryConstants k = corollary_constants(in, CorCase::III);
        BlockLength b = block_length_algebraic(n, k.alpha);
        double e = 1.0 / (2.0 + 1.0 / k.alpha);
        c["C1"] = k.C1;
        c["C2"] = k.C2;
        c["C1abs"] = k.C1abs;
        c["gamma_alpha"] = k.gamma;
        c["C_alpha"] = k.Calpha;
        c["alpha"] = k.alpha;
        c["beta"] = k.beta;
        c["M"] = k.M;
        c["B"] = k.B;
        c["tau"] = double(b.tau);
        c["k"] = double(b.k);
        R.bound = trunc + (2.0 / delta) * (k.C1abs * std::pow(n, -e) + k.C2 * std::pow(n, -2.0 * e));
        return R;
    }

    CorollaryConstants k = corollary_constants(in, bc == BoundCase::II ? CorCase::II : CorCase::I);
    if (!admissible(n, k.lambda_max))
        throw ConfigError("n = " + std::to_string((long long)n) +
                          " violates log(n) < n log(1/lambda_max) for lambda_max = " +
                          std::to_string(k.lambda_max));
    BlockLength b = block_length(n, k.lambda_max);
    c["lambda_max"] = k.lambda_max;
    c["tau"] = double(b.tau);
    c["k"] = double(b.k);
    c["C1"] = k.C1;
    c["C2"] = k.C2;
    c["C3"] = k.C3;
    c["M"] = k.M;
    c["B"] = k.B;
    c["C_y"] = k.C_y;
    c["C_z"] = k.C_z;
    double ln = std::log(n);

    if (bc == BoundCase::II) {
        c["C3abs"] = k.C3abs;
        R.bound = trunc + (2.0 / delta) * (k.C1 / n + k.C2 * ln / n + k.C3abs * std::sqrt(ln) / std::sqrt(n));
        return R;
    }

    double head = ((1.0 - std::pow(in.r, n)) * C0 + k.C1) / n + k.C2 * ln / n + k.C3 * std::sqrt(ln) / std::sqrt(n);
    double wz = in.z.w.l1_norm(), wy = in.y.w.l1_norm();
    if (bc == BoundCase::Ia) {
        require(std::isfinite(in.Mbar), "case ia needs bounded innovations (Mbar)");
        double Cbd = 2.0 * in.L_L *
                     (in.Lh / (1.0 - in.r) * (in.M_F * in.r + in.L_R * in.Mbar * in.z.L * wz) + in.Mbar * in.y.L * wy);
        c["C_bd"] = Cbd;
        c["Mbar"] = in.Mbar;
        R.bound = head + Cbd * std::sqrt(std::log(4.0 / delta)) / std::sqrt(2.0 * n);
        return R;
    }
    require(in.xi_z && in.xi_y, "case ib needs innovation laws for the Phi moments");
    double Cmz = in.L_L * in.Lh * in.L_R * in.z.L * wz / (1.0 - in.r);
    double Cmy = in.L_L * in.y.L * wy;
    double CPhi = std::sqrt(detail::phi_moment_sq(in.phi, *in.xi_z, 2.0 * Cmz)) *
                      std::sqrt(detail::phi_moment(in.phi, *in.xi_z)) +
                  std::sqrt(detail::phi_moment_sq(in.phi, *in.xi_y, 2.0 * Cmy)) *
                      std::sqrt(detail::phi_moment(in.phi, *in.xi_y));
    require(std::isfinite(CPhi), "case ib: Phi moments are infinite for these innovations");
    double t1 = (C0 + 2.0 * in.phi.inverse(n) * (Cmz + Cmy)) * std::sqrt(std::log(8.0 / delta)) / std::sqrt(2.0 * n);
    double t2 = in.phi.inverse(2.0 * CPhi / (delta * std::sqrt(n)));
    double BPhi = 5.0 * std::max(t1, t2);
    c["Cmom_z"] = Cmz;
    c["Cmom_y"] = Cmy;
    c["C_Phi"] = CPhi;
    c["B_Phi"] = BPhi;
    R.bound = head + BPhi;
    return R;
}

// ---------------------------------------------------------------------------
// Sample size

struct SampleSize {
    bool reachable = false;
    long long n = 0;
    double bound = 0.0;
};

namespace detail {

// bound(n) or +inf when n is inadmissible
inline double bound_or_inf(const BoundInputs& in, BoundCase bc, double n, double delta) {
    try {
        return theorem1_bound(in, bc, n, delta).bound;
    } catch (const ConfigError& e) {
        std::string w = e.what();
        if (w.find("violates") != std::string::npos) return kInf;
        throw;
    }
}

} // namespace detail

// Linear scan over small n, then doubling and bisection on the tail where
// every term of the bound is non-increasing in n.
inline SampleSize min_sample_size(const BoundInputs& in, BoundCase bc, double eps, double delta,
                                  long long n_cap = 1000000000000LL) {
    require(eps >= 0.0, "epsilon must be >= 0");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    require(n_cap >= 1, "n_cap must be >= 1");
    SampleSize out;
    if (eps == 0.0) return out;
    const long long scan = std::min<long long>(n_cap, 1024);
    for (long long n = 1; n <= scan; ++n) {
        double b = detail::bound_or_inf(in, bc, double(n), delta);
        if (b <= eps) return {true, n, b};
    }
    if (n_cap <= scan) return out;
    // first admissible point of the tail
    long long lo = scan;
    long long hi = scan + 1;
    while (hi <= n_cap && !std::isfinite(detail::bound_or_inf(in, bc, double(hi), delta))) {
        lo = hi;
        hi = std::min(n_cap + 1, hi * 2);
    }
    if (hi > n_cap) return out;
    if (lo > scan) {
        while (hi - lo > 1) {
            long long mid = lo + (hi - lo) / 2;
            if (std::isfinite(detail::bound_or_inf(in, bc, double(mid), delta))) hi = mid;
            else lo = mid;
        }
    }
    // hi is admissible with everything beyond admissible too
    double bh = detail::bound_or_inf(in, bc, double(hi), delta);
    if (bh <= eps) return {true, hi, bh};
    lo = hi;
    while (true) {
        if (hi >= n_cap) return out;
        lo = hi;
        hi = std::min(n_cap, hi * 2);
        bh = detail::bound_or_inf(in, bc, double(hi), delta);
        if (bh <= eps) break;
    }
    while (hi - lo > 1) {
        long long mid = lo + (hi - lo) / 2;
        double bm = detail::bound_or_inf(in, bc, double(mid), delta);
        if (bm <= eps) hi = mid, bh = bm;
        else lo = mid;
    }
    return {true, hi, bh};
}

// Bound values on a log-spaced grid from n1 to n2 (inclusive), `steps` points.
inline std::vector<std::pair<long long, double>> bound_curve(const BoundInputs& in, BoundCase bc, double delta,
                                                             long long n1, long long n2, int steps) {
    require(n1 >= 1 && n2 >= n1 && steps >= 1, "curve: need 1 <= n1 <= n2 and steps >= 1");
    std::vector<std::pair<long long, double>> out;
    for (int i = 0; i < steps; ++i) {
        double t = steps == 1 ? 0.0 : double(i) / double(steps - 1);
        long long n = (long long)std::llround(std::exp(std::log(double(n1)) * (1 - t) + std::log(double(n2)) * t));
        if (!out.empty() && out.back().first == n) continue;
        out.emplace_back(n, detail::bound_or_inf(in, bc, double(n), delta));
    }
    return out;
}

inline void write_curve_csv(std::ostream& os, const std::vector<std::pair<long long, double>>& c) {
    os << "n,bound\n";
    char buf[40];
    for (auto& [n, b] : c) {
        std::snprintf(buf, sizeof buf, "%.17g", b);
        os << n << "," << buf << "\n";
    }
}

// ---------------------------------------------------------------------------
// JSON

inline BoundInputs bound_inputs_from_json(const json& j) {
    check_keys(j, {"class", "r", "L_R", "Lh", "Lh0", "M_F", "C_RC", "m", "L_L", "EZ2", "EY2", "EL0Y", "z", "y",
                   "Mbar", "phi", "xi_z", "xi_y", "estimated"},
               "inputs");
    BoundInputs in;
    if (j.contains("class")) {
        HypothesisClass c = class_from_json(j["class"]);
        in.r = c.r();
        in.L_R = c.L_R();
        in.Lh = c.Lh;
        in.Lh0 = c.Lh0;
        in.M_F = c.M_F();
        in.m = c.m;
        in.EZ2 = get_or<double>(j, "EZ2", 1.0);
        in.C_RC = rademacher_constant(c, std::sqrt(in.EZ2));
    }
    in.r = get_or<double>(j, "r", in.r);
    in.L_R = get_or<double>(j, "L_R", in.L_R);
    in.Lh = get_or<double>(j, "Lh", in.Lh);
    in.Lh0 = get_or<double>(j, "Lh0", in.Lh0);
    in.M_F = get_or<double>(j, "M_F", in.M_F);
    in.C_RC = get_or<double>(j, "C_RC", in.C_RC);
    in.m = get_or<int>(j, "m", in.m);
    in.L_L = get_or<double>(j, "L_L", in.L_L);
    in.EZ2 = get_or<double>(j, "EZ2", in.EZ2);
    in.EY2 = get_or<double>(j, "EY2", in.EY2);
    in.EL0Y = get_or<double>(j, "EL0Y", in.EL0Y);
    require(j.contains("z") && j.contains("y"), "inputs: dependence profiles z and y are required");
    in.z = profile_from_json(j["z"], "inputs.z");
    in.y = profile_from_json(j["y"], "inputs.y");
    if (j.contains("Mbar")) in.Mbar = num_from(j["Mbar"], "inputs.Mbar");
    if (j.contains("phi")) {
        const json& p = j["phi"];
        check_keys(p, {"kind", "p"}, "inputs.phi");
        std::string k = get_or<std::string>(p, "kind", "power");
        if (k == "power") in.phi.kind = Phi::Power;
        else if (k == "expm1") in.phi.kind = Phi::ExpM1;
        else throw ConfigError("inputs.phi: kind must be power|expm1");
        in.phi.p = get_or<double>(p, "p", 3.0);
        require(in.phi.kind != Phi::Power || in.phi.p > 1.0, "inputs.phi: p must be > 1");
    }
    auto law = [&](const char* key) -> std::optional<NormLaw> {
        if (!j.contains(key)) return std::nullopt;
        const json& l = j[key];
        check_keys(l, {"law", "scale", "dim"}, std::string("inputs.") + key);
        NormLaw nl;
        nl.law.kind = law_from_name(get_or<std::string>(l, "law", "gaussian"));
        nl.law.scale = get_or<double>(l, "scale", 1.0);
        nl.dim = get_or<int>(l, "dim", 1);
        return nl;
    };
    in.xi_z = law("xi_z");
    in.xi_y = law("xi_y");
    in.estimated = get_or<std::vector<std::string>>(j, "estimated", {});
    in.validate();
    return in;
}

inline json bound_inputs_to_json(const BoundInputs& in) {
    json j{{"r", in.r},     {"L_R", in.L_R},   {"Lh", in.Lh},       {"Lh0", in.Lh0}, {"M_F", in.M_F},
           {"C_RC", in.C_RC}, {"m", in.m},     {"L_L", in.L_L},     {"EZ2", in.EZ2}, {"EY2", in.EY2},
           {"EL0Y", in.EL0Y}, {"z", profile_to_json(in.z)}, {"y", profile_to_json(in.y)}};
    if (std::isfinite(in.Mbar)) j["Mbar"] = in.Mbar;
    j["phi"] = {{"kind", in.phi.kind == Phi::Power ? "power" : "expm1"}, {"p", in.phi.p}};
    auto law = [](const NormLaw& nl) {
        return json{{"law", law_name(nl.law.kind)}, {"scale", nl.law.scale}, {"dim", nl.dim}};
    };
    if (in.xi_z) j["xi_z"] = law(*in.xi_z);
    if (in.xi_y) j["xi_y"] = law(*in.xi_y);
    j["estimated"] = in.estimated;
    return j;
}

} // namespace rcb
