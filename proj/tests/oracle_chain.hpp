#pragma once

// Second, deliberately naive evaluation of the risk-bound chain. Shares no
// code with rcbounds/bounds.hpp beyond the fixture -> BoundInputs adapter.

#include "rcbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oracle {

struct Fixture {
    std::string name;
    double r, LR, Lh, Lh0, MF, CRC;
    int m;
    double LL, EY2, EL0Y;
    // Lipschitz-Bernoulli data (case i): geometric weights, gaussian innovations
    double Ly, Lz, wy, wz, sig_y, sig_z, Mbar;
    double phi_p;  // 0 selects exp(x) - 1
    // geometric data (case ii)
    double Cy, ly, Cz, lz;
    // algebraic data (case iii)
    double Cya, ay, Cza, az;
};

inline Fixture fixtures(int i) {
    switch (i) {
    case 0:
        return {"balanced", 0.5, 1.0, 1.0, 0.5, 2.0, 3.0, 1, 1.0, 2.0, 0.8,
                0.7, 0.9, 0.4, 0.3, 1.0, 1.0, 2.5, 3.0,
                1.2, 0.6, 0.8, 0.7,
                1.5, 0.4, 1.1, 0.3};
    case 1:
        return {"multi_output", 0.8, 2.5, 1.7, 0.2, 4.0, 7.5, 3, 2.2, 5.0, 3.1,
                1.3, 0.5, 0.6, 0.75, 0.5, 1.5, 4.0, 2.5,
                0.0, 0.3, 2.0, 0.85,
                0.7, 1.5, 2.2, 0.9};
    default:
        return {"exp_moments", 0.3, 0.4, 0.6, 1.0, 1.1, 0.9, 2, 0.5, 0.4, 0.2,
                0.4, 0.2, 0.5, 0.2, 0.3, 0.25, 1.0, 0.0,
                0.5, 0.9, 0.1, 0.2,
                3.0, 0.2, 0.4, 2.5};
    }
}

// Library inputs built from the fixture, per case.
inline rcb::BoundInputs to_inputs(const Fixture& f, rcb::BoundCase bc) {
    rcb::BoundInputs in;
    in.r = f.r;
    in.L_R = f.LR;
    in.Lh = f.Lh;
    in.Lh0 = f.Lh0;
    in.M_F = f.MF;
    in.C_RC = f.CRC;
    in.m = f.m;
    in.L_L = f.LL;
    in.EY2 = f.EY2;
    in.EL0Y = f.EL0Y;
    using rcb::Regime;
    auto lip = [](double L, double w, double sig) {
        rcb::DependenceProfile p;
        p.regime = Regime::Lipschitz;
        p.L = L;
        p.w = rcb::WeightingSequence::geometric(w);
        p.mean_norm_xi = sig * std::sqrt(2.0 / M_PI);
        return p;
    };
    auto geo = [](double C, double l) {
        rcb::DependenceProfile p;
        p.regime = Regime::Geometric;
        p.C = C;
        p.lambda = l;
        p.exact_zero = C == 0.0;
        return p;
    };
    auto alg = [](double C, double a) {
        rcb::DependenceProfile p;
        p.regime = Regime::Algebraic;
        p.C = C;
        p.alpha = a;
        return p;
    };
    switch (bc) {
    case rcb::BoundCase::Ia:
    case rcb::BoundCase::Ib:
        in.y = lip(f.Ly, f.wy, f.sig_y);
        in.z = lip(f.Lz, f.wz, f.sig_z);
        in.Mbar = f.Mbar;
        in.phi.kind = f.phi_p > 0 ? rcb::Phi::Power : rcb::Phi::ExpM1;
        in.phi.p = f.phi_p > 0 ? f.phi_p : 3.0;
        in.xi_y = rcb::NormLaw{{rcb::LawKind::Gaussian, f.sig_y}, 1};
        in.xi_z = rcb::NormLaw{{rcb::LawKind::Gaussian, f.sig_z}, 1};
        break;
    case rcb::BoundCase::II:
        in.y = geo(f.Cy, f.ly);
        in.z = geo(f.Cz, f.lz);
        break;
    case rcb::BoundCase::III:
        in.y = alg(f.Cya, f.ay);
        in.z = alg(f.Cza, f.az);
        break;
    }
    return in;
}

// E g(|X|), X ~ N(0, s^2), composite Simpson on [0, hi].
template <class G>
double half_normal_expect(double s, G g, double hi) {
    const int N = 400000;
    double h = hi / N, acc = 0.0;
    for (int i = 0; i <= N; ++i) {
        double x = i * h;
        double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * g(x) * std::exp(-0.5 * x * x / (s * s));
    }
    return acc * h / 3.0 * 2.0 / (s * std::sqrt(2.0 * M_PI));
}

inline double bound(const Fixture& f, rcb::BoundCase bc, double n, double delta) {
    const double C0 = 2.0 * f.r * f.LL * f.Lh * f.MF / (1.0 - f.r);
    const double M = f.LL * f.Lh * f.MF + f.EL0Y + f.Lh0 * f.LL;
    const double B = 2.0 * std::sqrt(double(f.m)) * f.LL;
    const double first = (1.0 - std::pow(f.r, n)) * C0 / n;

    if (bc == rcb::BoundCase::III) {
        double alpha = std::min(f.ay, f.az);
        double gamma = -1e300;
        for (int t = 1; t <= 100000; ++t)
            gamma = std::max(gamma, std::log(double(t)) * f.az / std::log(1.0 / f.r) - t / 4.0);
        double Ca = std::max(std::pow(2.0, f.az), std::pow(f.r, -gamma)) / (1.0 - std::sqrt(f.r));
        double C1 = f.LL * (2.0 * f.MF * f.Lh * std::pow(f.r, -gamma) + f.LR * f.Lh * f.Cza * Ca + f.Cya) + B * f.CRC;
        double C2 = 2.0 * M;
        double C1abs = C1 + 4.0 * f.LL * std::sqrt(f.EY2) + B * f.CRC;
        double e = 1.0 / (2.0 + 1.0 / alpha);
        return first + (2.0 / delta) * (C1abs * std::pow(n, -e) + C2 * std::pow(n, -2.0 * e));
    }

    double Cy, ly, Cz, lz;
    if (bc == rcb::BoundCase::II) {
        Cy = f.Cy, ly = f.ly, Cz = f.Cz, lz = f.lz;
    } else {
        double ey = f.sig_y * std::sqrt(2.0 / M_PI), ez = f.sig_z * std::sqrt(2.0 / M_PI);
        Cy = 2.0 * f.Ly * ey / (1.0 - f.wy), ly = f.wy;
        Cz = 2.0 * f.Lz * ez / (1.0 - f.wz), lz = f.wz;
    }
    double lmax = std::max(f.r, std::max(Cy > 0 ? ly : 0.0, Cz > 0 ? lz : 0.0));
    double lg = std::log(1.0 / lmax);
    double C1 = (2.0 * f.MF * f.LL * f.Lh + f.LL * Cy) / lmax;
    double C2 = 2.0 * M / lg + f.LL * f.LR * f.Lh * Cz / (lmax * lg);
    double C3 = 2.0 * std::sqrt(double(f.m)) * f.LL * f.CRC / std::sqrt(lg);
    double ln = std::log(n);

    if (bc == rcb::BoundCase::II) {
        double C3abs = 2.0 * C3 + 4.0 * f.LL * std::sqrt(f.EY2) / std::sqrt(lg);
        return first + (2.0 / delta) * (C1 / n + C2 * ln / n + C3abs * std::sqrt(ln) / std::sqrt(n));
    }

    double head = ((1.0 - std::pow(f.r, n)) * C0 + C1) / n + C2 * ln / n + C3 * std::sqrt(ln / n);
    double l1y = 1.0 / (1.0 - f.wy), l1z = 1.0 / (1.0 - f.wz);
    if (bc == rcb::BoundCase::Ia) {
        double Cbd = 2.0 * f.LL * (f.Lh / (1.0 - f.r) * (f.MF * f.r + f.LR * f.Mbar * f.Lz * l1z) + f.Mbar * f.Ly * l1y);
        return head + Cbd * std::sqrt(std::log(4.0 / delta) / (2.0 * n));
    }
    double Cmz = f.LL * f.Lh * f.LR / (1.0 - f.r) * f.Lz * l1z;
    double Cmy = f.LL * f.Ly * l1y;
    auto Phi = [&](double x) { return f.phi_p > 0 ? std::pow(x, f.phi_p) : std::exp(x) - 1.0; };
    auto Phi_inv = [&](double y) { return f.phi_p > 0 ? std::pow(y, 1.0 / f.phi_p) : std::log(1.0 + y); };
    auto term = [&](double Cm, double s) {
        double hi = 40.0 * s + 8.0 * Cm * s * s;
        double a = half_normal_expect(s, [&](double x) { double v = Phi(2.0 * Cm * x); return v * v; }, hi);
        double b = half_normal_expect(s, [&](double x) { return Phi(x); }, hi);
        return std::sqrt(a) * std::sqrt(b);
    };
    double CPhi = term(Cmz, f.sig_z) + term(Cmy, f.sig_y);
    double t1 = (C0 + 2.0 * Phi_inv(n) * (Cmz + Cmy)) * std::sqrt(std::log(8.0 / delta)) / std::sqrt(2.0 * n);
    double t2 = Phi_inv(2.0 * CPhi / (delta * std::sqrt(n)));
    return head + 5.0 * std::max(t1, t2);
}

} // namespace oracle
