#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rcb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Path = std::vector<Vec>;
using Rng = std::mt19937_64;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bad parameters or malformed configuration. Maps to CLI exit code 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Failure during a computation (overflow, unreachable target, ...). Exit code 3.
struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / double(v.size());
    if (v.size() < 2) return r;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
    return r;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double spectral_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    if (A.rows() == 1 || A.cols() == 1) return A.norm();
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

// Euclidean projection onto the spectral-norm ball of radius cap.
inline Mat clip_spectral(const Mat& A, double cap) {
    if (A.size() == 0) return A;
    if (cap <= 0.0) return Mat::Zero(A.rows(), A.cols());
    if (A.rows() == 1 || A.cols() == 1) {
        double n = A.norm();
        return n > cap ? Mat(A * (cap / n)) : A;
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec s = svd.singularValues();
    if (s(0) <= cap) return A;
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(s(i), cap);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

inline Vec clip_norm(const Vec& a, double cap) {
    if (cap <= 0.0) return Vec::Zero(a.size());
    double n = a.norm();
    return n > cap ? Vec(a * (cap / n)) : a;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Per-trial generator; results depend only on (seed, index).
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                      std::uint32_t(index), std::uint32_t(index >> 32)};
    return Rng(seq);
}

// splitmix64 finalizer over (seed, stream, index); streams keep experiment parts apart
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream * 0x100000001b3ULL + index + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform(Rng& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double gauss(Rng& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

inline Mat random_uniform_matrix(Rng& g, Eigen::Index r, Eigen::Index c) {
    Mat M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = uniform(g, -1.0, 1.0);
    return M;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once, so output stored by index is scheduling independent.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(std::size_t(jobs), count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += nt) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace rcb
