#include "rcbounds/reservoir.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rcb;

namespace {

ReservoirSystem lrc(Mat A, Mat C, Vec zeta) {
    ReservoirSystem s;
    s.family = Family::LRC;
    s.A = std::move(A);
    s.C = std::move(C);
    s.zeta = std::move(zeta);
    return s;
}

ReservoirSystem scalar_lrc(double a, double c) { return lrc(Mat::Constant(1, 1, a), Mat::Constant(1, 1, c), Vec::Zero(1)); }

Path random_inputs(int n, int d, std::uint64_t seed, double radius = 1.0) {
    Rng g = trial_rng(seed, 0);
    Path z;
    for (int t = 0; t < n; ++t) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = uniform(g, -1, 1);
        if (v.norm() > 0) v *= radius * uniform(g, 0, 1) / v.norm();
        z.push_back(v);
    }
    return z;
}

HypothesisClass lrc_class(int N = 4, int d = 2) {
    HypothesisClass c;
    c.family = Family::LRC;
    c.N = N;
    c.d = d;
    c.lamA = 0.5;
    c.lamC = 1.0;
    c.lamZeta = 0.3;
    c.M = 1.0;
    return c;
}

HypothesisClass esn_class(int N = 4, int d = 2) {
    HypothesisClass c;
    c.family = Family::ESN;
    c.N = N;
    c.d = d;
    c.act = Activation::Tanh;
    c.specA = 0.8;
    c.rowA = Vec::Constant(N, 0.2);
    c.rowC = Vec::Constant(N, 0.5);
    c.rowZeta = Vec::Constant(N, 0.1);
    return c;
}

HypothesisClass sas_class(int N = 3) {
    HypothesisClass c;
    c.family = Family::SAS;
    c.N = N;
    c.d = 1;
    c.support = {{0}, {1}, {2}};
    c.lamSAS = 0.25;
    c.cSAS = 0.5;
    c.M = 1.0;
    return c;
}

} // namespace

TEST(Filter, LrcWithoutMemory) {
    Mat C = (Mat(2, 1) << 1.0, -2.0).finished();
    Vec zeta = (Vec(2) << 0.5, 0.25).finished();
    ReservoirSystem s = lrc(Mat::Zero(2, 2), C, zeta);
    Path z = random_inputs(10, 1, 1);
    Path x = run_filter(s, z, 5);
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_TRUE(x[t].isApprox(C * z[t] + zeta));
}

TEST(Filter, EsnAllZero) {
    ReservoirSystem s;
    s.family = Family::ESN;
    s.act = Activation::Tanh;
    s.A = Mat::Zero(3, 3);
    s.C = Mat::Zero(3, 2);
    s.zeta = Vec::Zero(3);
    for (const Vec& x : run_filter(s, random_inputs(8, 2, 2), 3)) EXPECT_EQ(x.norm(), 0.0);
}

TEST(Filter, GeometricSeries) {
    Path z(60, Vec::Ones(1));
    Path x = run_filter(scalar_lrc(0.5, 1.0), z, 50);
    EXPECT_NEAR(x.back()(0), 2.0, 1e-12);
}

TEST(Filter, RejectsNonContraction) {
    EXPECT_THROW(run_filter(scalar_lrc(1.0, 1.0), Path(3, Vec::Ones(1)), 0), ConfigError);
}

TEST(Filter, DefaultWashoutReachesFixedPoint) {
    ReservoirSystem s = lrc(Mat::Constant(1, 1, 0.9), Mat::Constant(1, 1, 1.0), Vec::Constant(1, 1.0));
    Path x = run_filter(s, Path(1, Vec::Zero(1)));
    EXPECT_NEAR(x[0](0), 10.0, 1e-9);
}

TEST(Functional, ConstantReadout) {
    Readout h{Mat::Zero(2, 1), (Vec(2) << 3.0, -1.0).finished()};
    EXPECT_TRUE(functional(scalar_lrc(0.5, 1.0), h, random_inputs(5, 1, 3)).isApprox(h.a));
}

TEST(Functional, MemorylessLrcIdentityReadout) {
    Mat C = (Mat(2, 2) << 1.0, 2.0, 0.0, 1.0).finished();
    Vec zeta = (Vec(2) << 0.1, 0.2).finished();
    Path z = random_inputs(4, 2, 4);
    Readout h{Mat::Identity(2, 2), Vec::Zero(2)};
    EXPECT_TRUE(functional(lrc(Mat::Zero(2, 2), C, zeta), h, z).isApprox(C * z.back() + zeta));
}

TEST(Functional, SasConstantPolynomials) {
    ReservoirSystem s;
    s.family = Family::SAS;
    Mat P0 = (Mat(2, 2) << 0.3, 0.1, -0.2, 0.2).finished();
    Mat q0 = (Mat(2, 1) << 1.0, 0.5).finished();
    s.p.add({0}, P0);
    s.q.add({0}, q0);
    Readout h{Mat::Identity(2, 2), Vec::Zero(2)};
    Vec expect = (Mat::Identity(2, 2) - P0).inverse() * q0;
    EXPECT_TRUE(functional(s, h, random_inputs(50, 1, 5)).isApprox(expect, 1e-9));
}

TEST(Esp, EqualStartsStayEqual) {
    auto gaps = esp_convergence_check(scalar_lrc(0.5, 1.0), random_inputs(20, 1, 6), Vec::Ones(1), Vec::Ones(1), 20);
    for (double g : gaps) EXPECT_EQ(g, 0.0);
}

TEST(Esp, ScalarLinearGaps) {
    auto gaps = esp_convergence_check(scalar_lrc(0.5, 1.0), random_inputs(30, 1, 7), Vec::Constant(1, 2.0),
                                      Vec::Constant(1, -1.0), 30);
    for (int t = 1; t <= 30; ++t) EXPECT_NEAR(gaps[std::size_t(t - 1)], std::pow(0.5, t) * 3.0, 1e-12);
}

TEST(Esp, TanhContraction) {
    Rng g = trial_rng(8, 0);
    for (int rep = 0; rep < 5; ++rep) {
        ReservoirSystem s;
        s.family = Family::ESN;
        s.act = Activation::Tanh;
        s.A = random_uniform_matrix(g, 5, 5);
        s.A *= 0.9 / spectral_norm(s.A);
        s.C = random_uniform_matrix(g, 5, 2);
        s.zeta = random_uniform_matrix(g, 5, 1).col(0);
        Vec a = random_uniform_matrix(g, 5, 1).col(0), b = random_uniform_matrix(g, 5, 1).col(0);
        double g0 = (a - b).norm();
        auto gaps = esp_convergence_check(s, random_inputs(100, 2, 9), a, b, 100);
        for (int t = 1; t <= 100; ++t) EXPECT_LE(gaps[std::size_t(t - 1)], std::pow(0.9, t) * g0 * (1 + 1e-9));
    }
}

TEST(MF, ReferenceValues) {
    HypothesisClass c = lrc_class();
    c.lamZeta = 0.0;
    EXPECT_NEAR(bound_M_F(c), 2.0, 1e-12);
    HypothesisClass e = esn_class(4);
    EXPECT_NEAR(bound_M_F(e), 2.0, 1e-12);
    HypothesisClass s;
    s.family = Family::SAS;
    s.d = 1;
    s.support = {{0}};
    s.lamSAS = 0.4;
    s.cSAS = 1.2;
    s.M = 1.0;
    EXPECT_NEAR(bound_M_F(s), 2.0, 1e-12);
}

TEST(MF, EsnTakesSmallerFormula) {
    HypothesisClass e = esn_class(4);
    e.M = 0.1;
    // |||C||| <= ||rowC||_2 = 1, ||zeta|| <= 0.2: (0.1 + 0.2) / 0.2 beats sqrt(4)
    EXPECT_NEAR(bound_M_F(e), 1.5, 1e-12);
}

TEST(MF, StatesStayInBall) {
    for (HypothesisClass c : {lrc_class(), esn_class(), sas_class()}) {
        double MF = bound_M_F(c);
        for (int k = 0; k < 20; ++k) {
            auto [s, h] = sample_from_class(c, std::uint64_t(k));
            for (const Vec& x : run_filter(s, random_inputs(100, c.d, 100 + k, 1.0)))
                EXPECT_LE(x.norm(), MF + 1e-9) << family_name(c.family);
        }
    }
}

TEST(SasPoly, Evaluation) {
    Mat A = (Mat(2, 2) << 1, 2, 3, 4).finished();
    SasPoly c;
    c.add({0, 0}, A);
    EXPECT_TRUE(sas_eval_poly(c, (Vec(2) << 0.3, 0.7).finished()).isApprox(A));
    SasPoly l;
    l.add({1}, A);
    EXPECT_TRUE(sas_eval_poly(l, (Vec(2) << 0.5, 0.9).finished()).isApprox(0.5 * A));
    SasPoly q;
    q.add({1, 2}, A);
    EXPECT_TRUE(sas_eval_poly(q, (Vec(2) << 0.5, -0.5).finished()).isApprox(0.125 * A));
}

TEST(SasPoly, FilterMatchesSeries) {
    HypothesisClass c = sas_class();
    auto [s, h] = sample_from_class(c, std::uint64_t(3));
    Path z = random_inputs(40, 1, 11);
    Vec x = run_filter(s, z, 0).back();
    const int J = 25;
    Vec series = Vec::Zero(c.N);
    Mat prod = Mat::Identity(c.N, c.N);
    for (int j = 0; j <= J; ++j) {
        const Vec& zj = z[z.size() - 1 - std::size_t(j)];
        series += prod * s.q.eval(zj).col(0);
        prod = prod * s.p.eval(zj);
    }
    double r = c.r();
    EXPECT_LE((x - series).norm(), bound_M_F(c) * std::pow(r, J + 1) / (1 - r) + 1e-12);
}

TEST(Sampling, ConstantFunctionals) {
    HypothesisClass c = lrc_class(3, 1);
    c.lamA = c.lamC = c.lamZeta = 0.0;
    c.Lh = 0.0;
    c.Lh0 = 2.0;
    for (int k = 0; k < 20; ++k) {
        auto [s, h] = sample_from_class(c, std::uint64_t(k));
        EXPECT_LE(h.a.norm(), 2.0 + 1e-12);
        Vec v1 = functional(s, h, random_inputs(5, 1, k)), v2 = functional(s, h, random_inputs(5, 1, k + 50));
        EXPECT_TRUE(v1.isApprox(h.a));
        EXPECT_TRUE(v2.isApprox(h.a));
    }
}

TEST(Sampling, CapsHold) {
    HypothesisClass c = lrc_class();
    c.Lh = 1.5;
    c.Lh0 = 0.5;
    double mx = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto [s, h] = sample_from_class(c, std::uint64_t(k));
        double a = spectral_norm(s.A);
        EXPECT_LE(a, c.lamA + 1e-12);
        EXPECT_LE(spectral_norm(s.C), c.lamC + 1e-12);
        EXPECT_LE(s.zeta.norm(), c.lamZeta + 1e-12);
        EXPECT_LE(spectral_norm(h.W), c.Lh + 1e-12);
        EXPECT_LE(h.a.norm(), c.Lh0 + 1e-12);
        mx = std::max(mx, a);
    }
    EXPECT_GE(mx, 0.9 * c.lamA);
}

TEST(Sampling, EsnRowCaps) {
    HypothesisClass c = esn_class(5, 2);
    for (int k = 0; k < 200; ++k) {
        auto [s, h] = sample_from_class(c, std::uint64_t(k));
        EXPECT_LE(spectral_norm(s.A), c.specA + 1e-12);
        for (int l = 0; l < c.N; ++l) {
            EXPECT_LE(s.A.row(l).lpNorm<Eigen::Infinity>(), c.rowA(l) + 1e-12);
            EXPECT_LE(s.C.row(l).norm(), c.rowC(l) + 1e-12);
            EXPECT_LE(std::fabs(s.zeta(l)), c.rowZeta(l) + 1e-12);
        }
    }
}

TEST(Sampling, Deterministic) {
    auto a = sample_from_class(esn_class(), std::uint64_t(42)), b = sample_from_class(esn_class(), std::uint64_t(42));
    EXPECT_TRUE((a.first.A.array() == b.first.A.array()).all());
    EXPECT_TRUE((a.second.W.array() == b.second.W.array()).all());
}

TEST(HLipschitz, LemmaOnRandomPairs) {
    for (HypothesisClass c : {lrc_class(), esn_class(), sas_class()}) {
        double r = c.r(), MF = bound_M_F(c), LR = c.L_R();
        for (int k = 0; k < 100; ++k) {
            auto [s, h] = sample_from_class(c, std::uint64_t(500 + k));
            Path z = random_inputs(40, c.d, 1000 + k), zb = z;
            int i = k % 12;
            Path fresh = random_inputs(i, c.d, 3000 + k);
            for (int j = 0; j < i; ++j) zb[zb.size() - 1 - std::size_t(j)] = fresh[std::size_t(j)];
            double lhs = (last_state(s, z) - last_state(s, zb)).norm();
            double rhs = 2 * std::pow(r, i) * MF;
            for (int j = 0; j < i; ++j)
                rhs += LR * std::pow(r, j) * (z[z.size() - 1 - std::size_t(j)] - zb[zb.size() - 1 - std::size_t(j)]).norm();
            EXPECT_LE(lhs, rhs * (1 + 1e-9)) << family_name(c.family);
        }
    }
}

TEST(RandomEsn, ZeroMatrixRejected) {
    RandomEsnSpec sp;
    sp.distA = {LawKind::Uniform, 1.0};
    sp.N = 3;
    RandomEsn ok = random_esn(sp, 1);
    EXPECT_GT(ok.lamA_draw, 0.0);
    RandomEsnSpec zero = sp;
    zero.distA.scale = 0.0;
    EXPECT_THROW(random_esn(zero, 1), std::exception);
}

TEST(RandomEsn, RowSumCapEqualsA) {
    RandomEsnSpec sp;
    sp.N = 6;
    sp.d = 2;
    sp.distA = {LawKind::Uniform, 1.0};
    sp.distC = {LawKind::Uniform, 1.0};
    sp.distZeta = {LawKind::Uniform, 1.0};
    sp.a = 0.5;
    RandomEsn r = random_esn(sp, 4);
    EXPECT_NEAR(r.cls.row_lamA(), 0.5, 1e-12);
    EXPECT_LE(r.cls.r(), 0.5 + 1e-12);
    r.cls.validate();
}

TEST(RandomEsn, ExpectedInputCapMatchesAnalytic) {
    RandomEsnSpec sp;
    sp.N = 10;
    sp.d = 1;
    sp.distA = {LawKind::Uniform, 1.0};
    sp.distC = {LawKind::Uniform, 1.0};
    sp.distZeta = {LawKind::Uniform, 1.0};
    sp.c = 1.0;
    std::vector<double> v;
    for (int k = 0; k < 2000; ++k) v.push_back(random_esn(sp, std::uint64_t(k)).lamC);
    MeanSe m = mean_se(v);
    EXPECT_NEAR(m.mean, 10 * 0.5, 3 * m.se);
}

TEST(ClassJson, RoundTripAndValidation) {
    json j = json::parse(R"({"family":"esn","N":3,"d":1,"activation":"tanh","specA":0.5,
                             "rowA":0.2,"rowC":[0.1,0.2,0.3],"rowZeta":0.0,"Lh":1,"Lh0":0.5})");
    HypothesisClass c = class_from_json(j);
    EXPECT_NEAR(c.rowC(2), 0.3, 0);
    HypothesisClass r = class_from_json(class_to_json(c));
    EXPECT_NEAR(r.row_lamC(), c.row_lamC(), 1e-15);
    j["specA"] = 1.5;
    EXPECT_THROW(class_from_json(j), ConfigError);
    json s = json::parse(R"({"family":"sas","d":1,"N":2,"support":[[0],[1]],"lamSAS":0.6,"cSAS":1})");
    EXPECT_THROW(class_from_json(s), ConfigError);
}

TEST(SystemJson, RoundTrip) {
    auto [s, h] = sample_from_class(sas_class(), std::uint64_t(1));
    ReservoirSystem t = system_from_json(system_to_json(s));
    Vec z = Vec::Constant(1, 0.3);
    EXPECT_TRUE(t.p.eval(z).isApprox(s.p.eval(z)));
    Readout g = readout_from_json(readout_to_json(h));
    EXPECT_TRUE(g.W.isApprox(h.W));
}
