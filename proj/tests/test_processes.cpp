#include "rcbounds/processes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace rcb;

namespace {

ProcessModel iid(int dim = 1, LawKind k = LawKind::Gaussian, double scale = 1.0) {
    ProcessModel m;
    m.kind = ProcessKind::IID;
    m.dim = dim;
    m.law = {k, scale};
    return m;
}

ProcessModel garch(double omega, double a, double b) {
    ProcessModel m;
    m.kind = ProcessKind::GARCH11;
    m.omega = omega;
    m.alpha = a;
    m.beta = b;
    return m;
}

ProcessModel ma(std::vector<double> c) {
    ProcessModel m;
    m.kind = ProcessKind::MAFinite;
    m.coeffs = std::move(c);
    return m;
}

ProcessModel arfima(double d, int K = 10000) {
    ProcessModel m;
    m.kind = ProcessKind::ARFIMA;
    m.dbar = d;
    m.K = K;
    return m;
}

} // namespace

TEST(Processes, GarchWithoutDynamicsIsIid) {
    Path g = generate_path(garch(1.0, 0.0, 0.0), 50, 0, 7);
    Path e = generate_path(iid(), 50, 0, 7);
    for (std::size_t t = 0; t < g.size(); ++t) EXPECT_DOUBLE_EQ(g[t](0), e[t](0));
}

TEST(Processes, VarWithZeroMatrixIsIid) {
    ProcessModel m;
    m.kind = ProcessKind::VAR1TV;
    m.A = Mat::Zero(2, 2);
    Path v = generate_path(m, 30, 0, 3);
    Path e = generate_path(iid(2), 30, 0, 3);
    for (std::size_t t = 0; t < v.size(); ++t) EXPECT_TRUE(v[t].isApprox(e[t]));
}

TEST(Processes, ArfimaCoefficients) {
    auto phi = arfima_coefficients(0.3, 10);
    EXPECT_DOUBLE_EQ(phi[0], 1.0);
    EXPECT_NEAR(phi[1], 0.3, 1e-15);
    EXPECT_NEAR(phi[2], 0.195, 1e-15);
    for (std::size_t k = 1; k < phi.size(); ++k)
        EXPECT_NEAR(phi[k], std::tgamma(k + 0.3) / (std::tgamma(k + 1.0) * std::tgamma(0.3)), 1e-12);
}

TEST(Processes, ArfimaCoefficientAsymptotics) {
    auto phi = arfima_coefficients(0.3, 10001);
    double k = 10000;
    EXPECT_LE(std::fabs(std::tgamma(0.3) * std::pow(k, 0.7) * phi[10000] - 1.0), 0.05);
}

TEST(Processes, InvalidParametersRejected) {
    EXPECT_THROW(generate_path(garch(0.1, 0.5, 0.5), 10, 0, 0), ConfigError);
    EXPECT_THROW(generate_path(arfima(0.5), 10, 0, 0), ConfigError);
    ProcessModel v;
    v.kind = ProcessKind::VAR1TV;
    v.A = Mat::Identity(2, 2);
    EXPECT_THROW(generate_path(v, 10, 0, 0), ConfigError);
    EXPECT_THROW(generate_path(iid(), 0, 0, 0), ConfigError);
}

TEST(Processes, PathsAreSeedDeterministic) {
    for (auto m : {garch(0.1, 0.1, 0.85), arfima(0.3, 500), ma({0.5, 0.2}), iid(3)}) {
        Path a = generate_path(m, 40, 20, 99), b = generate_path(m, 40, 20, 99), c = generate_path(m, 40, 20, 100);
        bool same = true, diff = false;
        for (std::size_t t = 0; t < a.size(); ++t) {
            same = same && (a[t].array() == b[t].array()).all();
            diff = diff || !(a[t].array() == c[t].array()).all();
        }
        EXPECT_TRUE(same);
        EXPECT_TRUE(diff);
    }
}

TEST(Theta, IidIsExactlyZero) {
    auto th = estimate_theta_curve(iid(2), {1, 2, 5}, 500, 50, 1);
    for (auto& t : th) EXPECT_EQ(t.mean, 0.0);
}

TEST(Theta, MovingAverageBeyondOrderIsZero) {
    EXPECT_EQ(estimate_theta(ma({0.5}), 2, 1000, 50, 1).mean, 0.0);
}

TEST(Theta, MovingAverageLagOne) {
    MeanSe t = estimate_theta(ma({0.5}), 1, 40000, 50, 2);
    EXPECT_NEAR(t.mean, 0.5 * 2.0 / std::sqrt(M_PI), 3.0 * t.se);
}

TEST(Theta, BelowAnalyticEnvelope) {
    ProcessModel v;
    v.kind = ProcessKind::VAR1TV;
    v.A = (Mat(2, 2) << 0.5, 0.1, 0.0, 0.4).finished();
    v.scale_low = 0.5;
    v.scale_high = 1.5;
    std::vector<int> taus{1, 3, 6, 10};
    for (auto m : {garch(0.1, 0.1, 0.85), v, arfima(0.3, 2000), ma({0.8, -0.4, 0.2})}) {
        DependenceProfile p = dependence_params(m, 4000, 5);
        auto th = estimate_theta_curve(m, taus, 3000, 200, 6);
        for (std::size_t i = 0; i < taus.size(); ++i)
            EXPECT_LE(th[i].mean, p.theta_envelope(taus[i]) + 3.0 * th[i].se + 3.0 * p.C_se)
                << kind_name(m.kind) << " tau=" << taus[i];
    }
}

TEST(Theta, GarchFittedRate) {
    std::vector<int> taus;
    for (int t = 1; t <= 20; ++t) taus.push_back(t);
    auto th = estimate_theta_curve(garch(0.1, 0.1, 0.85), taus, 4000, 200, 11);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < taus.size(); ++i) pts.emplace_back(taus[i], th[i].mean);
    EXPECT_LE(fit_theta_decay(pts, Regime::Geometric).rate, 0.95 + 0.03);
}

TEST(Dependence, ReferenceExamples) {
    EXPECT_NEAR(dependence_params(garch(0.1, 0.10, 0.85)).lambda, 0.95, 1e-15);
    DependenceProfile a = dependence_params(arfima(0.3, 1000));
    EXPECT_EQ(a.regime, Regime::Algebraic);
    EXPECT_NEAR(a.alpha, 0.2, 1e-15);
    DependenceProfile i = dependence_params(iid());
    EXPECT_TRUE(i.exact_zero);
    EXPECT_EQ(i.theta_envelope(1), 0.0);
}

TEST(Dependence, GarchSquaresIsEstimated) {
    ProcessModel m = garch(0.1, 0.1, 0.85);
    m.squares = true;
    DependenceProfile p = dependence_params(m, 2000, 1);
    EXPECT_TRUE(p.estimated);
    EXPECT_GT(p.C, 0.0);
    EXPECT_NEAR(p.lambda, 0.95, 1e-15);
}

TEST(Moment, Examples) {
    MeanSe a = moment(iid(), 2, 20000, 1);
    EXPECT_NEAR(a.mean, 1.0, 3.0 * a.se);
    MeanSe b = moment(garch(1.0, 0.0, 0.0), 2, 20000, 2);
    EXPECT_NEAR(b.mean, 1.0, 3.0 * b.se);
    MeanSe c = moment(garch(0.1, 0.1, 0.8), 2, 20000, 3);
    EXPECT_NEAR(c.mean, 1.0, 3.0 * c.se + 0.02);
}

TEST(DecayFit, ExactCurves) {
    std::vector<std::pair<double, double>> g, a, z;
    for (int t = 1; t <= 10; ++t) {
        g.emplace_back(t, std::pow(0.95, t));
        a.emplace_back(t, 2.0 * std::pow(t, -0.2));
        z.emplace_back(t, 0.0);
    }
    EXPECT_NEAR(fit_theta_decay(g, Regime::Geometric).rate, 0.95, 1e-12);
    DecayFit fa = fit_theta_decay(a, Regime::Algebraic);
    EXPECT_NEAR(fa.C, 2.0, 1e-12);
    EXPECT_NEAR(fa.rate, 0.2, 1e-12);
    EXPECT_TRUE(fit_theta_decay(z, Regime::Geometric).exact_zero);
}

TEST(Weighting, GeometricRatios) {
    WeightingSequence w = WeightingSequence::geometric(0.6);
    EXPECT_DOUBLE_EQ(w.value(0), 1.0);
    EXPECT_NEAR(w.inverse_decay_ratio(), 1.0 / 0.6, 1e-12);
    EXPECT_NEAR(w.decay_ratio(), 0.6, 1e-12);
    EXPECT_NEAR(w.l1_norm(), 1.0 / 0.4, 1e-12);
    WeightingSequence p = WeightingSequence::polynomial(3.0);
    EXPECT_GT(p.value(1), p.value(2));
    EXPECT_LE(p.decay_ratio(), 1.0);
}

TEST(ProcessJson, RoundTripAndUnknownKeys) {
    json j = json::parse(R"({"kind":"garch11","omega":0.1,"alpha":0.1,"beta":0.85,"innovation":"gaussian"})");
    ProcessModel m = process_from_json(j);
    EXPECT_EQ(m.kind, ProcessKind::GARCH11);
    ProcessModel r = process_from_json(process_to_json(m));
    EXPECT_DOUBLE_EQ(r.beta, 0.85);
    j["bogus"] = 1;
    EXPECT_THROW(process_from_json(j), ConfigError);
}

TEST(ProcessCsv, HeaderAndRows) {
    std::ostringstream os;
    write_path_csv(os, generate_path(iid(2), 3, 0, 1));
    std::string s = os.str();
    EXPECT_EQ(s.substr(0, 8), "z_1,z_2\n");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}
