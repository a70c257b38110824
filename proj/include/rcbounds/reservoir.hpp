#pragma once

#include "rcbounds/common.hpp"
#include "rcbounds/json_util.hpp"
#include "rcbounds/processes.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace rcb {

enum class Family { LRC, ESN, SAS };
enum class Activation { Identity, Tanh, Clipped };

inline std::string family_name(Family f) {
    switch (f) {
    case Family::LRC: return "lrc";
    case Family::ESN: return "esn";
    case Family::SAS: return "sas";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "lrc") return Family::LRC;
    if (s == "esn") return Family::ESN;
    if (s == "sas") return Family::SAS;
    throw ConfigError("unknown reservoir family '" + s + "'");
}

struct ActivationInfo {
    double lipschitz = 1.0;
    bool bounded = false;
    double lo = -kInf, hi = kInf;
    double at_zero = 0.0;
    bool odd = true;
};

inline ActivationInfo activation_info(Activation a) {
    switch (a) {
    case Activation::Identity: return {1.0, false, -kInf, kInf, 0.0, true};
    case Activation::Tanh: return {1.0, true, -1.0, 1.0, 0.0, true};
    case Activation::Clipped: return {1.0, true, -1.0, 1.0, 0.0, true};
    }
    return {};
}

inline double activate(Activation a, double x) {
    switch (a) {
    case Activation::Identity: return x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Clipped: return std::clamp(x, -1.0, 1.0);
    }
    return x;
}

inline std::string activation_name(Activation a) {
    switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Clipped: return "clipped";
    }
    return "?";
}

inline Activation activation_from_name(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "tanh") return Activation::Tanh;
    if (s == "clipped" || s == "clipped_linear") return Activation::Clipped;
    throw ConfigError("unknown activation '" + s + "'");
}

using MultiIndex = std::vector<int>;

inline double monomial(const MultiIndex& a, const Vec& z) {
    double v = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < a[i]; ++k) v *= z(Eigen::Index(i));
    return v;
}

// Matrix-coefficient polynomial sum_alpha z^alpha A_alpha.
struct SasPoly {
    Eigen::Index rows = 0, cols = 0;
    std::vector<MultiIndex> alphas;
    std::vector<Mat> coeffs;

    void add(MultiIndex a, Mat c) {
        if (alphas.empty()) rows = c.rows(), cols = c.cols();
        require(c.rows() == rows && c.cols() == cols, "sas polynomial: coefficient shape mismatch");
        alphas.push_back(std::move(a));
        coeffs.push_back(std::move(c));
    }

    Mat eval(const Vec& z) const {
        Mat out = Mat::Zero(rows, cols);
        for (std::size_t i = 0; i < alphas.size(); ++i) out += monomial(alphas[i], z) * coeffs[i];
        return out;
    }

    // max_alpha |||A_alpha|||_2
    double norm() const {
        double m = 0.0;
        for (const Mat& c : coeffs) m = std::max(m, spectral_norm(c));
        return m;
    }

    // Bound on sup over the unit box of |||p(z)|||_2.
    double sup_norm() const {
        double s = 0.0;
        for (const Mat& c : coeffs) s += spectral_norm(c);
        return s;
    }
};


inline Mat sas_eval_poly(const SasPoly& p, const Vec& z) { return p.eval(z); }

// ---------------------------------------------------------------------------
// Systems

struct ReservoirSystem {
    Family family = Family::LRC;
    Mat A, C;
    Vec zeta;
    Activation act = Activation::Identity;
    SasPoly p, q;

    int N() const { return int(family == Family::SAS ? p.rows : A.rows()); }
    int d() const {
        if (family != Family::SAS) return int(C.cols());
        std::size_t d = 0;
        for (auto& a : p.alphas) d = std::max(d, a.size());
        for (auto& a : q.alphas) d = std::max(d, a.size());
        return int(d);
    }

    // out = F(x, z); out must not alias x.
    void step(const Vec& x, const Vec& z, Vec& out) const {
        switch (family) {
        case Family::LRC:
            out.noalias() = A * x;
            out.noalias() += C * z;
            out += zeta;
            break;
        case Family::ESN:
            out.noalias() = A * x;
            out.noalias() += C * z;
            out += zeta;
            if (act != Activation::Identity)
                for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = activate(act, out(i));
            break;
        case Family::SAS:
            out.noalias() = p.eval(z) * x;
            out += q.eval(z).col(0);
            break;
        }
    }

    // Contraction constant of x -> F(x, z), uniform over admissible z.
    double contraction() const {
        switch (family) {
        case Family::LRC: return spectral_norm(A);
        case Family::ESN: return activation_info(act).lipschitz * spectral_norm(A);
        case Family::SAS: return p.sup_norm();
        }
        return kInf;
    }

    void validate() const {
        if (family == Family::SAS) {
            require(!p.alphas.empty() && !q.alphas.empty(), "sas: p and q must be non-empty");
            require(p.rows == p.cols, "sas: p must be square");
            require(q.rows == p.rows && q.cols == 1, "sas: q must be N x 1");
        } else {
            require(A.rows() == A.cols() && A.rows() >= 1, "reservoir: A must be square");
            require(C.rows() == A.rows(), "reservoir: C must have N rows");
            require(zeta.size() == A.rows(), "reservoir: zeta must have length N");
        }
        require(contraction() < 1.0, family_name(family) + ": contraction condition violated (r = " +
                                         std::to_string(contraction()) + ")");
    }

    // Washout so that the zero-input transient is below 1e-10.
    int default_washout() const {
        double r = contraction();
        Vec x0 = Vec::Zero(N()), f(N());
        step(x0, Vec::Zero(d()), f);
        double b = f.norm() / (1.0 - r);
        if (b == 0.0) return 0;
        if (r == 0.0) return 1;
        if (b <= 1e-10) return 0;
        return std::min(100000, int(std::ceil(std::log(1e-10 / b) / std::log(r))));
    }
};

struct Readout {
    Mat W;
    Vec a;
    Vec apply(const Vec& x) const { return W * x + a; }
};

inline int washout_or_default(const ReservoirSystem& s, int washout) {
    return washout < 0 ? s.default_washout() : washout;
}

// States for the inputs z, started from zero with `washout` zero inputs in front.
inline Path run_filter(const ReservoirSystem& s, const Path& z, int washout = -1) {
    s.validate();
    washout = washout_or_default(s, washout);
    Vec x = Vec::Zero(s.N()), nx(s.N()), zero = Vec::Zero(s.d());
    for (int t = 0; t < washout; ++t) {
        s.step(x, zero, nx);
        x.swap(nx);
    }
    Path out;
    out.reserve(z.size());
    for (const Vec& zt : z) {
        require(zt.size() == s.d(), "run_filter: input dimension mismatch");
        s.step(x, zt, nx);
        x.swap(nx);
        if (!all_finite(x)) throw RuntimeError("run_filter: non-finite state");
        out.push_back(x);
    }
    return out;
}

inline Vec last_state(const ReservoirSystem& s, const Path& z, int washout = -1) {
    washout = washout_or_default(s, washout);
    Vec x = Vec::Zero(s.N()), nx(s.N()), zero = Vec::Zero(s.d());
    for (int t = 0; t < washout; ++t) {
        s.step(x, zero, nx);
        x.swap(nx);
    }
    for (const Vec& zt : z) {
        s.step(x, zt, nx);
        x.swap(nx);
    }
    if (!all_finite(x)) throw RuntimeError("reservoir: non-finite state");
    return x;
}

inline Vec functional(const ReservoirSystem& s, const Readout& h, const Path& z, int washout = -1) {
    s.validate();
    return h.apply(last_state(s, z, washout));
}

inline std::vector<double> esp_convergence_check(const ReservoirSystem& s, const Path& z,
                                                 const Vec& xa, const Vec& xb, int T) {
    s.validate();
    require(int(z.size()) >= T, "esp check: input shorter than T");
    Vec a = xa, b = xb, na(s.N()), nb(s.N());
    std::vector<double> gaps;
    gaps.reserve(std::size_t(T));
    for (int t = 0; t < T; ++t) {
        s.step(a, z[std::size_t(t)], na);
        s.step(b, z[std::size_t(t)], nb);
        a.swap(na);
        b.swap(nb);
        gaps.push_back((a - b).norm());
    }
    return gaps;
}

// ---------------------------------------------------------------------------
// Hypothesis classes

struct HypothesisClass {
    Family family = Family::LRC;
    int N = 4, d = 1, m = 1;
    Activation act = Activation::Tanh;

    // LRC: spectral caps on A, C and the norm cap on zeta
    double lamA = 0.5, lamC = 1.0, lamZeta = 0.0;

    // ESN: spectral cap on A (contraction) and per-row caps (Rademacher)
    double specA = 0.5;
    Vec rowA, rowC, rowZeta;

    // SAS: common support and coefficient caps
    std::vector<MultiIndex> support;
    double lamSAS = 0.0, cSAS = 0.0;

    double Lh = 1.0, Lh0 = 0.0;
    double M = kInf;  // inputs satisfy ||z_t|| <= M

    double lipschitz_sigma() const {
        return family == Family::ESN ? activation_info(act).lipschitz : 1.0;
    }
    double esn_specC() const { return rowC.norm(); }
    double esn_specZeta() const { return rowZeta.norm(); }

    // Row-sum quantities of the ESN Rademacher constant.
    double row_lamA() const { return lipschitz_sigma() * rowA.sum(); }
    double row_lamC() const { return lipschitz_sigma() * rowC.sum(); }
    double row_lamZeta() const { return lipschitz_sigma() * rowZeta.sum(); }

    double r() const {
        switch (family) {
        case Family::LRC: return lamA;
        case Family::ESN: return lipschitz_sigma() * specA;
        case Family::SAS: return double(support.size()) * lamSAS;
        }
        return kInf;
    }

    double M_F() const;

    double L_R() const {
        switch (family) {
        case Family::LRC: return lamC;
        case Family::ESN: return lipschitz_sigma() * esn_specC();
        case Family::SAS: {
            // |z^a - w^a| <= ||a||_2 ||z - w|| on the unit box, so
            // ||F(x,z) - F(x,w)|| <= (M_F lamSAS + cSAS) sum_a ||a||_2 ||z - w||.
            double s = 0.0;
            for (auto& a : support) {
                double n2 = 0.0;
                for (int k : a) n2 += double(k) * k;
                s += std::sqrt(n2);
            }
            return (M_F() * lamSAS + cSAS) * s;
        }
        }
        return kInf;
    }

    void validate() const {
        require(N >= 1 && d >= 1 && m >= 1, "class: N, d, m must be >= 1");
        require(Lh >= 0.0 && Lh0 >= 0.0, "class: readout caps must be >= 0");
        switch (family) {
        case Family::LRC:
            require(lamA >= 0.0 && lamA < 1.0, "lrc class: lamA must lie in [0,1)");
            require(lamC >= 0.0 && lamZeta >= 0.0, "lrc class: caps must be >= 0");
            break;
        case Family::ESN:
            require(rowA.size() == N && rowC.size() == N && rowZeta.size() == N,
                    "esn class: row caps must have length N");
            require(rowA.minCoeff() >= 0 && rowC.minCoeff() >= 0 && rowZeta.minCoeff() >= 0,
                    "esn class: row caps must be >= 0");
            require(specA >= 0.0 && lipschitz_sigma() * specA < 1.0,
                    "esn class: L_sigma * specA must be < 1");
            break;
        case Family::SAS:
            require(!support.empty(), "sas class: support must be non-empty");
            for (auto& a : support) require(int(a.size()) <= d, "sas class: multi-index longer than d");
            require(lamSAS >= 0.0 && lamSAS * double(support.size()) < 1.0,
                    "sas class: lamSAS must be < 1/|I_max|");
            require(cSAS >= 0.0, "sas class: cSAS must be >= 0");
            require(M <= 1.0, "sas class: inputs must lie in the unit ball (M <= 1)");
            break;
        }
    }
};

inline double bound_M_F(const HypothesisClass& c) {
    c.validate();
    switch (c.family) {
    case Family::LRC:
        require(std::isfinite(c.M), "lrc class: M_F needs a finite input bound M");
        return (c.lamC * c.M + c.lamZeta) / (1.0 - c.lamA);
    case Family::ESN: {
        ActivationInfo ai = activation_info(c.act);
        double best = kInf;
        if (std::isfinite(c.M))
            best = (ai.lipschitz * (c.esn_specC() * c.M + c.esn_specZeta()) +
                    std::sqrt(double(c.N)) * std::fabs(ai.at_zero)) /
                   (1.0 - ai.lipschitz * c.specA);
        if (ai.bounded)
            best = std::min(best, std::sqrt(double(c.N)) * std::max(std::fabs(ai.lo), std::fabs(ai.hi)));
        require(std::isfinite(best), "esn class: M_F needs bounded inputs or a bounded activation");
        return best;
    }
    case Family::SAS: {
        double I = double(c.support.size());
        return I * c.cSAS / (1.0 - I * c.lamSAS);
    }
    }
    return kInf;
}

inline double HypothesisClass::M_F() const { return bound_M_F(*this); }

namespace detail {

inline Mat scaled_direction(Rng& g, Eigen::Index r, Eigen::Index c, double radius) {
    if (radius <= 0.0 || r == 0 || c == 0) return Mat::Zero(r, c);
    Mat D = random_uniform_matrix(g, r, c);
    double n = spectral_norm(D);
    if (n == 0.0) return Mat::Zero(r, c);
    return D * (radius / n);
}

} // namespace detail

// Uniform draw of a class member: random direction times a uniform fraction
// of each cap, then clipped so every cap holds.
inline std::pair<ReservoirSystem, Readout> sample_from_class(const HypothesisClass& c, Rng& g) {
    c.validate();
    ReservoirSystem s;
    s.family = c.family;
    switch (c.family) {
    case Family::LRC:
        s.A = clip_spectral(detail::scaled_direction(g, c.N, c.N, c.lamA * uniform(g, 0, 1)), c.lamA);
        s.C = clip_spectral(detail::scaled_direction(g, c.N, c.d, c.lamC * uniform(g, 0, 1)), c.lamC);
        s.zeta = clip_norm(detail::scaled_direction(g, c.N, 1, c.lamZeta * uniform(g, 0, 1)).col(0),
                           c.lamZeta);
        break;
    case Family::ESN: {
        s.act = c.act;
        s.A.resize(c.N, c.N);
        s.C.resize(c.N, c.d);
        s.zeta.resize(c.N);
        for (int l = 0; l < c.N; ++l) {
            for (int k = 0; k < c.N; ++k) s.A(l, k) = uniform(g, -c.rowA(l), c.rowA(l));
            s.C.row(l) = detail::scaled_direction(g, 1, c.d, c.rowC(l) * uniform(g, 0, 1));
            s.zeta(l) = uniform(g, -c.rowZeta(l), c.rowZeta(l));
        }
        double n = spectral_norm(s.A);
        if (n > c.specA) s.A *= c.specA / n;
        break;
    }
    case Family::SAS:
        for (auto& a : c.support) {
            s.p.add(a, detail::scaled_direction(g, c.N, c.N, c.lamSAS * uniform(g, 0, 1)));
            s.q.add(a, detail::scaled_direction(g, c.N, 1, c.cSAS * uniform(g, 0, 1)));
        }
        s.p.rows = s.p.cols = c.N;
        s.q.rows = c.N;
        s.q.cols = 1;
        break;
    }
    Readout h;
    h.W = clip_spectral(detail::scaled_direction(g, c.m, c.N, c.Lh * uniform(g, 0, 1)), c.Lh);
    h.a = clip_norm(detail::scaled_direction(g, c.m, 1, c.Lh0 * uniform(g, 0, 1)).col(0), c.Lh0);
    return {s, h};
}

inline std::pair<ReservoirSystem, Readout> sample_from_class(const HypothesisClass& c,
                                                             std::uint64_t seed) {
    Rng g = trial_rng(seed, 0);
    return sample_from_class(c, g);
}

// ---------------------------------------------------------------------------
// Randomly generated echo state networks

using EntryDist = InnovationLaw;

struct RandomEsnSpec {
    int N = 10, d = 1, m = 1;
    EntryDist distA, distC, distZeta;
    double a = 0.5, c = 1.0, s = 1.0;
    Activation act = Activation::Tanh;
    double Lh = 1.0, Lh0 = 0.0, M = kInf;
};

struct RandomEsn {
    HypothesisClass cls;
    Mat A0, C0;
    Vec zeta0;
    double lamA_draw = 0.0;  // L_sigma sum_l ||A_l||_inf of the draw
    double lamC = 0.0;       // c L_sigma sum_l ||C_l||_2
    double lamZeta = 0.0;    // s L_sigma sum_l |zeta_l|
};

inline RandomEsn random_esn(const RandomEsnSpec& sp, std::uint64_t seed) {
    require(activation_info(sp.act).odd, "random esn: activation must be odd");
    require(sp.a > 0.0 && sp.a < 1.0, "random esn: a must lie in (0,1)");
    require(sp.c > 0.0 && sp.s > 0.0, "random esn: c and s must be > 0");
    Rng g = trial_rng(seed, 0);
    RandomEsn out;
    out.A0.resize(sp.N, sp.N);
    out.C0.resize(sp.N, sp.d);
    out.zeta0.resize(sp.N);
    for (int l = 0; l < sp.N; ++l) {
        for (int k = 0; k < sp.N; ++k) out.A0(l, k) = sp.distA.sample(g);
        for (int k = 0; k < sp.d; ++k) out.C0(l, k) = sp.distC.sample(g);
        out.zeta0(l) = sp.distZeta.sample(g);
    }
    double L = activation_info(sp.act).lipschitz;
    double rowsum = 0.0;
    for (int l = 0; l < sp.N; ++l) rowsum += out.A0.row(l).lpNorm<Eigen::Infinity>();
    out.lamA_draw = L * rowsum;
    require(out.lamA_draw > 0.0, "random esn: degenerate draw with zero reservoir matrix");
    double rho = sp.a / out.lamA_draw;

    HypothesisClass& c = out.cls;
    c.family = Family::ESN;
    c.N = sp.N;
    c.d = sp.d;
    c.m = sp.m;
    c.act = sp.act;
    c.Lh = sp.Lh;
    c.Lh0 = sp.Lh0;
    c.M = sp.M;
    c.rowA.resize(sp.N);
    c.rowC.resize(sp.N);
    c.rowZeta.resize(sp.N);
    for (int l = 0; l < sp.N; ++l) {
        c.rowA(l) = rho * out.A0.row(l).lpNorm<Eigen::Infinity>();
        c.rowC(l) = sp.c * out.C0.row(l).norm();
        c.rowZeta(l) = sp.s * std::fabs(out.zeta0(l));
    }
    c.specA = rho * spectral_norm(out.A0);
    out.lamC = L * c.rowC.sum();
    out.lamZeta = L * c.rowZeta.sum();
    if (L * c.specA >= 1.0)
        throw RuntimeError("random esn: scaled draw is not a spectral contraction; use another seed");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline Vec row_caps(const json& j, const char* key, int N, const std::string& where) {
    if (!j.contains(key)) return Vec::Zero(N);
    if (j[key].is_number()) return Vec::Constant(N, j[key].get<double>());
    Vec v = vec_from_json(j[key], where + "." + key);
    require(v.size() == N, where + "." + key + ": length must equal N");
    return v;
}

inline json poly_to_json(const SasPoly& p) {
    json out = json::array();
    for (std::size_t i = 0; i < p.alphas.size(); ++i)
        out.push_back({{"alpha", p.alphas[i]}, {"coeff", mat_to_json(p.coeffs[i])}});
    return out;
}

inline SasPoly poly_from_json(const json& j, const std::string& where) {
    require(j.is_array(), where + ": polynomial must be a list of terms");
    SasPoly p;
    for (auto& t : j) {
        check_keys(t, {"alpha", "coeff"}, where);
        p.add(get_req<MultiIndex>(t, "alpha", where), mat_from_json(t.at("coeff"), where + ".coeff"));
    }
    return p;
}

} // namespace detail

inline HypothesisClass class_from_json(const json& j) {
    check_keys(j, {"family", "N", "d", "m", "activation", "lamA", "lamC", "lamZeta", "specA", "rowA",
                   "rowC", "rowZeta", "support", "lamSAS", "cSAS", "Lh", "Lh0", "M"},
               "class");
    HypothesisClass c;
    c.family = family_from_name(get_req<std::string>(j, "family", "class"));
    c.N = get_or<int>(j, "N", c.N);
    c.d = get_or<int>(j, "d", c.d);
    c.m = get_or<int>(j, "m", c.m);
    c.act = activation_from_name(get_or<std::string>(j, "activation", "tanh"));
    c.lamA = get_or<double>(j, "lamA", c.lamA);
    c.lamC = get_or<double>(j, "lamC", c.lamC);
    c.lamZeta = get_or<double>(j, "lamZeta", c.lamZeta);
    c.specA = get_or<double>(j, "specA", c.specA);
    c.rowA = detail::row_caps(j, "rowA", c.N, "class");
    c.rowC = detail::row_caps(j, "rowC", c.N, "class");
    c.rowZeta = detail::row_caps(j, "rowZeta", c.N, "class");
    if (j.contains("support")) c.support = get_or<std::vector<MultiIndex>>(j, "support", {});
    c.lamSAS = get_or<double>(j, "lamSAS", c.lamSAS);
    c.cSAS = get_or<double>(j, "cSAS", c.cSAS);
    c.Lh = get_or<double>(j, "Lh", c.Lh);
    c.Lh0 = get_or<double>(j, "Lh0", c.Lh0);
    c.M = j.contains("M") ? num_from(j["M"], "class.M") : kInf;
    if (c.family == Family::SAS && !j.contains("M")) c.M = 1.0;
    c.validate();
    return c;
}

inline json class_to_json(const HypothesisClass& c) {
    json j;
    j["family"] = family_name(c.family);
    j["N"] = c.N;
    j["d"] = c.d;
    j["m"] = c.m;
    j["Lh"] = c.Lh;
    j["Lh0"] = c.Lh0;
    j["M"] = num(c.M);
    switch (c.family) {
    case Family::LRC:
        j["lamA"] = c.lamA;
        j["lamC"] = c.lamC;
        j["lamZeta"] = c.lamZeta;
        break;
    case Family::ESN:
        j["activation"] = activation_name(c.act);
        j["specA"] = c.specA;
        j["rowA"] = vec_to_json(c.rowA);
        j["rowC"] = vec_to_json(c.rowC);
        j["rowZeta"] = vec_to_json(c.rowZeta);
        break;
    case Family::SAS:
        j["support"] = c.support;
        j["lamSAS"] = c.lamSAS;
        j["cSAS"] = c.cSAS;
        break;
    }
    return j;
}

inline json system_to_json(const ReservoirSystem& s) {
    json j;
    j["family"] = family_name(s.family);
    if (s.family == Family::SAS) {
        j["p"] = detail::poly_to_json(s.p);
        j["q"] = detail::poly_to_json(s.q);
        return j;
    }
    if (s.family == Family::ESN) j["activation"] = activation_name(s.act);
    j["A"] = mat_to_json(s.A);
    j["C"] = mat_to_json(s.C);
    j["zeta"] = vec_to_json(s.zeta);
    return j;
}

inline ReservoirSystem system_from_json(const json& j) {
    check_keys(j, {"family", "activation", "A", "C", "zeta", "p", "q"}, "system");
    ReservoirSystem s;
    s.family = family_from_name(get_req<std::string>(j, "family", "system"));
    if (s.family == Family::SAS) {
        require(j.contains("p") && j.contains("q"), "system: sas needs p and q");
        s.p = detail::poly_from_json(j["p"], "system.p");
        s.q = detail::poly_from_json(j["q"], "system.q");
    } else {
        require(j.contains("A") && j.contains("C"), "system: A and C are required");
        s.A = mat_from_json(j["A"], "system.A");
        s.C = mat_from_json(j["C"], "system.C");
        s.zeta = j.contains("zeta") ? vec_from_json(j["zeta"], "system.zeta") : Vec::Zero(s.A.rows());
        if (s.family == Family::ESN) s.act = activation_from_name(get_or<std::string>(j, "activation", "tanh"));
    }
    s.validate();
    return s;
}

inline json readout_to_json(const Readout& h) {
    return {{"W", mat_to_json(h.W)}, {"a", vec_to_json(h.a)}};
}

inline Readout readout_from_json(const json& j) {
    check_keys(j, {"W", "a"}, "readout");
    Readout h;
    h.W = mat_from_json(j.at("W"), "readout.W");
    h.a = j.contains("a") ? vec_from_json(j["a"], "readout.a") : Vec::Zero(h.W.rows());
    require(h.a.size() == h.W.rows(), "readout: a must have m entries");
    return h;
}

} // namespace rcb
