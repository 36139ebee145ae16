// lanczos.hpp: smallest eigenpair of a large symmetric operator by Lanczos
// with full reorthogonalization and explicit restarts from the Ritz vector.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pfwcl/errors.hpp"

namespace pfwcl {

struct LanczosResult {
    double eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
    double residual = 0.0;  // ‖Hx − θx‖ for the returned unit vector
    int matvecs = 0;
};

struct LanczosOptions {
    double tol = 1e-9;
    int max_krylov = 200;
    int max_restarts = 60;
    std::uint64_t seed = 7;
};

/// `apply(x, y)` must write H·x into y.
template <class Apply>
LanczosResult lanczos_smallest(Apply&& apply, Eigen::Index dim, const LanczosOptions& opt = {}) {
    if (dim <= 0) throw std::invalid_argument("lanczos_smallest: empty operator");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd start(dim);
    for (Eigen::Index i = 0; i < dim; ++i) start[i] = unif(rng);
    start.normalize();

    LanczosResult best;
    const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.max_krylov, dim));
    Eigen::MatrixXd V(dim, kmax);
    Eigen::VectorXd w(dim);
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha, beta;
        V.col(0) = start;
        int k = 0;
        bool invariant = false;
        for (; k < kmax; ++k) {
            apply(V.col(k), w);
            ++best.matvecs;
            const double a = V.col(k).dot(w);
            alpha.push_back(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
            const double b = w.norm();
            if (k + 1 == kmax) break;
            if (b < 1e-13 * std::max(1.0, std::abs(a))) {
                invariant = true;
                break;
            }
            beta.push_back(b);
            V.col(k + 1) = w / b;
        }
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()[0];
        Eigen::VectorXd x = V.leftCols(m) * es.eigenvectors().col(0);
        x.normalize();
        apply(x, w);
        ++best.matvecs;
        const double res = (w - theta * x).norm();
        best.eigenvalue = theta;
        best.eigenvector = x;
        best.residual = res;
        if (res <= opt.tol * std::max(1.0, std::abs(theta)) || invariant) return best;
        start = x;
    }
    throw NumericalError("lanczos_smallest", "no convergence within restart budget", best.residual);
}

}  // namespace pfwcl
