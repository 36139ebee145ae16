// hermite.hpp: generalized Hermite polynomials
//
//     H_n(a, x) = (−1)^n e^{ax²} dⁿ/dxⁿ e^{−ax²}
//               = Σ_{m ≤ n/2} (−1)^m n! a^{n−m} / (m! (n−2m)!) (2x)^{n−2m},
//
// their generating function Σ H_n(a,x) tⁿ/n! = exp(2atx − at²), the growth
// bound |H_n(a,x)| ≤ a^{n/2} √(2ⁿ n!) e^{ax²/2}, and the generating operator
// exp(−a(S² − 2xS)) for a finite symmetric S.
//
// Recurrence: the classical H_{k+1}(y) = 2yH_k(y) − 2kH_{k−1}(y) at y = √a·x,
// multiplied by a^{(k+1)/2} and combined with H_n(a,x) = a^{n/2}H_n(1,√a·x),
// gives H_{k+1}(a,x) = 2ax·H_k(a,x) − 2ak·H_{k−1}(a,x).

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfwcl/errors.hpp"

namespace pfwcl {

namespace detail {

/// Neumaier-compensated accumulator.
struct CompensatedSum {
    long double sum = 0.0L;
    long double carry = 0.0L;

    void add(long double v) {
        const long double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    long double value() const { return sum + carry; }
};

inline void check_hermite_args(int n, double a) {
    if (n < 0) throw std::invalid_argument("hermite: degree must be nonnegative");
    if (!(a > 0.0)) throw std::invalid_argument("hermite: parameter a must be positive");
}

inline long double hermite_recurrence(int n, long double a, long double x) {
    long double prev = 1.0L;
    if (n == 0) return prev;
    long double cur = 2.0L * a * x;
    for (int k = 1; k < n; ++k) {
        const long double next = 2.0L * a * x * cur - 2.0L * a * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace detail

/// H_n(a, x) by the three-term recurrence in extended precision.
inline double hermite(int n, double a, double x) {
    detail::check_hermite_args(n, a);
    const long double v = detail::hermite_recurrence(n, a, x);
    if (!std::isfinite(static_cast<double>(v)))
        throw NumericalError("hermite", "H_" + std::to_string(n) + " overflows double precision");
    return static_cast<double>(v);
}

struct HermiteSum {
    double value = 0.0;
    /// Σ|terms|; the natural scale for comparing against other evaluations.
    double abs_scale = 0.0;
};

/// H_n(a, x) from the explicit sum with compensated accumulation.
inline HermiteSum hermite_explicit(int n, double a, double x) {
    detail::check_hermite_args(n, a);
    detail::CompensatedSum sum;
    long double scale = 0.0L;
    const long double lgn = std::lgamma(static_cast<long double>(n) + 1.0L);
    const long double two_x = 2.0L * x;
    for (int m = 0; 2 * m <= n; ++m) {
        const int p = n - 2 * m;
        long double mag = std::exp(lgn - std::lgamma(m + 1.0L) - std::lgamma(p + 1.0L)) *
                          std::pow(static_cast<long double>(a), n - m);
        mag *= (p == 0) ? 1.0L : std::pow(two_x, p);
        const long double term = (m % 2 == 0) ? mag : -mag;
        sum.add(term);
        scale += std::fabs(term);
    }
    return {static_cast<double>(sum.value()), static_cast<double>(scale)};
}

/// |Σ_{n=0}^{N} H_n(a,x) tⁿ/n! − exp(2atx − at²)|.
inline double generating_function_residual(double a, double x, double t, int N) {
    detail::check_hermite_args(0, a);
    if (N < 0) throw std::invalid_argument("generating_function_residual: N must be nonnegative");
    detail::CompensatedSum sum;
    long double prev = 0.0L;
    long double cur = 1.0L;        // H_0
    long double power = 1.0L;      // tⁿ/n!
    const long double la = a;
    const long double lx = x;
    for (int n = 0; n <= N; ++n) {
        sum.add(cur * power);
        const long double next = 2.0L * la * lx * cur - 2.0L * la * n * prev;
        prev = cur;
        cur = next;
        power *= static_cast<long double>(t) / (n + 1);
        if (!std::isfinite(static_cast<double>(cur * power)) && n < N)
            throw NumericalError("generating_function_residual", "series terms overflow");
    }
    const long double exact = std::exp(2.0L * la * t * lx - la * t * t);
    return static_cast<double>(std::fabs(sum.value() - exact));
}

/// a^{n/2} √(2ⁿ n!) e^{ax²/2}.
inline long double hermite_bound(int n, double a, double x) {
    const long double log_rhs = 0.5L * n * std::log(static_cast<long double>(a)) +
                                0.5L * (n * std::log(2.0L) + std::lgamma(n + 1.0L)) +
                                0.5L * a * static_cast<long double>(x) * x;
    return std::exp(log_rhs);
}

/// Whether |H_n(a,x)| ≤ a^{n/2} √(2ⁿ n!) e^{ax²/2}.
inline bool bound_check(int n, double a, double x) {
    detail::check_hermite_args(n, a);
    return std::fabs(detail::hermite_recurrence(n, a, x)) <= hermite_bound(n, a, x);
}

/// ‖Σ_{n=0}^{N} H_n(a,x) Sⁿ Φ / n! − exp(−a(S² − 2xS)) Φ‖₂ for symmetric S.
inline double generating_operator_residual(const Eigen::MatrixXd& S, double a, double x, const Eigen::VectorXd& phi,
                                           int N) {
    detail::check_hermite_args(0, a);
    if (S.rows() != S.cols() || S.rows() != phi.size())
        throw std::invalid_argument("generating_operator_residual: dimension mismatch");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("generating_operator_residual: S must be symmetric");

    Eigen::VectorXd series = Eigen::VectorXd::Zero(phi.size());
    Eigen::VectorXd v = phi;  // Sⁿ Φ / n!
    long double prev = 0.0L;
    long double cur = 1.0L;
    for (int n = 0; n <= N; ++n) {
        series += static_cast<double>(cur) * v;
        const long double next = 2.0L * a * x * cur - 2.0L * a * n * prev;
        prev = cur;
        cur = next;
        v = S * v / static_cast<double>(n + 1);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw NumericalError("generating_operator_residual", "eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::VectorXd f(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) f[i] = std::exp(-a * (lam[i] * lam[i] - 2.0 * x * lam[i]));
    const Eigen::VectorXd exact = es.eigenvectors() * f.asDiagonal() * (es.eigenvectors().transpose() * phi);
    return (series - exact).norm();
}

/// Σ_{n>N} a^{n/2}√(2ⁿn!)e^{ax²/2} rⁿ/n! · ‖Φ‖: an a-priori bound on the
/// generating-operator residual when the spectral radius of S is r.
inline double generating_operator_envelope(double a, double x, double radius, int N, double phi_norm) {
    long double total = 0.0L;
    for (int n = N + 1; n < N + 2000; ++n) {
        const long double log_term = std::log(hermite_bound(n, a, x)) +
                                     n * std::log(static_cast<long double>(radius)) - std::lgamma(n + 1.0L);
        const long double term = std::exp(log_term);
        total += term;
        if (n > N + 10 && term < 1e-30L * total) break;
    }
    return static_cast<double>(total) * phi_norm;
}

/// Seeded random symmetric matrix rescaled to the given spectral radius.
inline Eigen::MatrixXd random_symmetric(int dim, double spectral_radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd S(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = unif(rng);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double r = es.eigenvalues().cwiseAbs().maxCoeff();
    S *= spectral_radius / r;
    // restore exact symmetry after scaling
    return 0.5 * (S + S.transpose());
}

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string detail;
};

/// The invariant grid behind the `hermite-check` report.
inline std::vector<CheckResult> run_hermite_checks(std::uint64_t seed) {
    std::vector<CheckResult> out;

    {  // explicit sum vs recurrence, n ≤ 60, |x| ≤ 10, a ≤ 10
        double worst = 0.0;
        for (int n = 0; n <= 60; ++n)
            for (double a : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
                for (int k = -20; k <= 20; ++k) {
                    const double x = 0.5 * k;
                    const HermiteSum e = hermite_explicit(n, a, x);
                    const double r = static_cast<double>(detail::hermite_recurrence(n, a, x));
                    worst = std::max(worst, std::abs(r - e.value) / e.abs_scale);
                }
        out.push_back({"explicit_vs_recurrence", worst, 1e-12, worst <= 1e-12, "max |rec - sum| / sum|terms|"});
    }
    {  // scaling relation H_n(a,x) = a^{n/2} H_n(1, √a x)
        double worst = 0.0;
        for (int n = 0; n <= 60; ++n)
            for (double a : {0.25, 0.5, 2.0, 4.0, 10.0})
                for (int k = -20; k <= 20; ++k) {
                    const double x = 0.5 * k;
                    const long double lhs = detail::hermite_recurrence(n, a, x);
                    const long double rhs =
                        std::pow(static_cast<long double>(a), 0.5L * n) * detail::hermite_recurrence(n, 1.0L, std::sqrt(static_cast<long double>(a)) * x);
                    const double scale = hermite_explicit(n, a, x).abs_scale;
                    worst = std::max(worst, static_cast<double>(std::fabs(lhs - rhs)) / scale);
                }
        out.push_back({"scaling_relation", worst, 1e-12, worst <= 1e-12, "max |H_n(a,x) - a^{n/2}H_n(1,sqrt(a)x)| / scale"});
    }
    {  // growth bound
        int violations = 0;
        std::string first;
        for (int n = 0; n <= 40; ++n)
            for (double a : {0.25, 1.0, 4.0})
                for (int k = -50; k <= 50; ++k) {
                    const double x = 0.1 * k;
                    if (!bound_check(n, a, x)) {
                        if (violations++ == 0)
                            first = "n=" + std::to_string(n) + " a=" + std::to_string(a) + " x=" + std::to_string(x);
                    }
                }
        out.push_back({"bound_grid", static_cast<double>(violations), 0.0, violations == 0,
                       violations ? "first violation " + first : "n<=40, a in {0.25,1,4}, x in [-5,5] step 0.1"});
    }
    {
        const double r = generating_function_residual(0.5, 0.3, 0.7, 60);
        out.push_back({"generating_function", r, 1e-12, r <= 1e-12, "a=0.5 x=0.3 t=0.7 N=60"});
    }
    {
        const Eigen::MatrixXd S = random_symmetric(8, 2.0, seed);
        Eigen::VectorXd phi = Eigen::VectorXd::Ones(8) / std::sqrt(8.0);
        const double r = generating_operator_residual(S, 0.25, 0.4, phi, 80);
        out.push_back({"generating_operator", r, 1e-10, r <= 1e-10,
                       "8x8 random symmetric, spectral radius 2, a=0.25 x=0.4 N=80, seed " + std::to_string(seed)});
    }
    return out;
}

}  // namespace pfwcl
