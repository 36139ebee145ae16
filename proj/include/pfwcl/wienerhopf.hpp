// wienerhopf.hpp: Nyström discretization of the truncated Wiener-Hopf
// operator (C_T u)(t) = ∫_0^T ρ(t−s) u(s) ds on composite 8-point
// Gauss-Legendre panels, symmetrized as M = W^{1/2} K W^{1/2}.
//
// log det(I + κ²C_T)/T tends to the log-spectral energy and
// (1/T)⟨1, (I + κ²C_T)^{−1} 1⟩ tends to 1/m_eff as T → ∞.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "pfwcl/energy.hpp"
#include "pfwcl/errors.hpp"
#include "pfwcl/formfactor.hpp"
#include "pfwcl/scan.hpp"

namespace pfwcl {

inline constexpr std::size_t kPanelOrder = 8;
inline constexpr std::size_t kMaxNodes = 4000;

/// 40 nodes per unit horizon, rounded up to whole panels and capped.
inline std::size_t default_node_count(double T, double density = 40.0) {
    const double raw = std::ceil(density * T / kPanelOrder) * kPanelOrder;
    return static_cast<std::size_t>(std::clamp<double>(raw, kPanelOrder, kMaxNodes));
}

class WienerHopfGrid {
public:
    WienerHopfGrid(const RadialMeasure& ff, double kappa, double T, std::size_t n)
        : T_(T), kappa_(kappa), components_(ff.component_count()) {
        if (!(T > 0.0)) throw ConfigError("build_grid: horizon T must be positive");
        if (!(kappa >= 0.0)) throw ConfigError("build_grid: kappa must be nonnegative");
        if (n < kPanelOrder || n % kPanelOrder != 0)
            throw ConfigError("build_grid: node count must be a positive multiple of 8, got " + std::to_string(n));

        const std::size_t panels = n / kPanelOrder;
        const double h = T / static_cast<double>(panels);
        std::array<double, kPanelOrder> x{};  // reference nodes on [0, 1]
        std::array<double, kPanelOrder> w{};
        {
            const auto& gx = boost::math::quadrature::gauss<double, kPanelOrder>::abscissa();
            const auto& gw = boost::math::quadrature::gauss<double, kPanelOrder>::weights();
            constexpr std::size_t half = kPanelOrder / 2;
            for (std::size_t i = 0; i < half; ++i) {
                x[half - 1 - i] = 0.5 * (1.0 - gx[i]);
                x[half + i] = 0.5 * (1.0 + gx[i]);
                w[half - 1 - i] = w[half + i] = 0.5 * gw[i];
            }
        }
        nodes_.resize(static_cast<Eigen::Index>(n));
        weights_.resize(static_cast<Eigen::Index>(n));
        for (std::size_t p = 0; p < panels; ++p) {
            for (std::size_t i = 0; i < kPanelOrder; ++i) {
                const auto k = static_cast<Eigen::Index>(p * kPanelOrder + i);
                nodes_[k] = (static_cast<double>(p) + x[i]) * h;
                weights_[k] = w[i] * h;
            }
        }
        sqrt_weights_ = weights_.cwiseSqrt();

        // ρ(t_i − t_j) depends only on the panel offset and the two local nodes
        kernel_.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        if (ff.is_null()) return;
        const SpectralFunctions sf(ff, kappa);
        std::vector<double> table(panels * kPanelOrder * kPanelOrder);
        auto at = [&](std::size_t m, std::size_t i, std::size_t j) -> double& {
            return table[(m * kPanelOrder + i) * kPanelOrder + j];
        };
        for (std::size_t m = 0; m < panels; ++m) {
            for (std::size_t i = 0; i < kPanelOrder; ++i) {
                for (std::size_t j = 0; j < kPanelOrder; ++j) {
                    if (m == 0 && j < i) {
                        at(0, i, j) = at(0, j, i);
                        continue;
                    }
                    at(m, i, j) = rho(sf, (static_cast<double>(m) + x[i] - x[j]) * h);
                }
            }
        }
        for (std::size_t a = 0; a < panels; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                for (std::size_t i = 0; i < kPanelOrder; ++i) {
                    for (std::size_t j = 0; j < kPanelOrder; ++j) {
                        const auto r = static_cast<Eigen::Index>(a * kPanelOrder + i);
                        const auto c = static_cast<Eigen::Index>(b * kPanelOrder + j);
                        const double v = sqrt_weights_[r] * at(a - b, i, j) * sqrt_weights_[c];
                        kernel_(r, c) = v;
                        kernel_(c, r) = v;
                    }
                }
            }
        }
    }

    double T() const { return T_; }
    double kappa() const { return kappa_; }
    std::size_t size() const { return static_cast<std::size_t>(nodes_.size()); }
    /// Number of identical field components (d for continuum measures, 1 for atoms).
    double component_count() const { return components_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::VectorXd& sqrt_weights() const { return sqrt_weights_; }
    /// Symmetrized kernel M_ij = √w_i ρ(t_i − t_j) √w_j.
    const Eigen::MatrixXd& kernel() const { return kernel_; }

private:
    double T_;
    double kappa_;
    double components_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd sqrt_weights_;
    Eigen::MatrixXd kernel_;
};

inline WienerHopfGrid build_grid(const RadialMeasure& ff, double kappa, double T, std::size_t n) {
    return WienerHopfGrid(ff, kappa, T, n);
}

/// Eigenvalues of M; throws when M is not numerically positive semidefinite.
inline Eigen::VectorXd kernel_spectrum(const WienerHopfGrid& grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(grid.kernel(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("log_det", "eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double norm = ev.cwiseAbs().maxCoeff();
    if (ev.size() > 0 && ev.minCoeff() < -1e-10 * norm) {
        throw NumericalError("log_det", "kernel matrix is not positive semidefinite (min eigenvalue " +
                                            std::to_string(ev.minCoeff()) + ")",
                             -ev.minCoeff());
    }
    return ev;
}

/// log det(I + κ²M).
inline double log_det(const WienerHopfGrid& grid) {
    const double k2 = grid.kappa() * grid.kappa();
    if (k2 == 0.0) return 0.0;
    const Eigen::VectorXd ev = kernel_spectrum(grid);
    double sum = 0.0;
    for (double lam : ev) sum += std::log1p(k2 * std::max(lam, 0.0));
    return sum;
}

/// Node values of u_T = (I + κ²C_T)^{−1} 1.
inline Eigen::VectorXd solve_uT(const WienerHopfGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double k2 = grid.kappa() * grid.kappa();
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + k2 * grid.kernel();
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("solve_uT", "I + kappa^2 M is not positive definite");
    const Eigen::VectorXd y = llt.solve(grid.sqrt_weights());
    Eigen::VectorXd u = y.cwiseQuotient(grid.sqrt_weights());
    // residual of u_i + κ² Σ_j ρ(t_i − t_j) w_j u_j = 1
    const Eigen::VectorXd ku = (grid.kernel() * y).cwiseQuotient(grid.sqrt_weights());
    const double residual = (u + k2 * ku - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    if (residual > 1e-10) throw NumericalError("solve_uT", "integral-equation residual too large", residual);
    return u;
}

/// (1/T)⟨1, (I + κ²C_T)^{−1} 1⟩.
inline double mass_functional(const WienerHopfGrid& grid) {
    if (grid.kappa() == 0.0 || grid.kernel().isZero(0.0)) return 1.0;
    return grid.weights().dot(solve_uT(grid)) / grid.T();
}

/// det(I + κ²C̃_T)^{−1/2} exp(−½p²⟨1,(I + κ²C_T)^{−1}1⟩), C̃_T = d copies of C_T.
inline double vacuum_amplitude(const WienerHopfGrid& grid, double p) {
    const double exponent =
        -0.5 * grid.component_count() * log_det(grid) - 0.5 * p * p * grid.T() * mass_functional(grid);
    return std::exp(exponent);
}

inline double vacuum_amplitude(const RadialMeasure& ff, double kappa, double p, double T, std::size_t n = 0) {
    return vacuum_amplitude(WienerHopfGrid(ff, kappa, T, n ? n : default_node_count(T)), p);
}

/// One row per horizon: T, n, logdet_per_T, ak_target, ak_dev, mass_fn, mass_target, mass_dev.
inline std::vector<ScanRecord> ak_convergence_report(const RadialMeasure& ff, double kappa,
                                                     const std::vector<double>& T_list, double density = 40.0) {
    for (std::size_t i = 1; i < T_list.size(); ++i) {
        if (!(T_list[i] > T_list[i - 1])) throw ConfigError("ak_convergence_report: T list must be increasing");
    }
    const double ak_target = log_spectral_energy(ff, kappa);
    const double mass_target = 1.0 / moment_report(ff).m_eff;
    std::vector<ScanRecord> rows;
    for (double T : T_list) {
        const std::size_t n = default_node_count(T, density);
        const WienerHopfGrid grid(ff, kappa, T, n);
        const double ld = log_det(grid) / T;
        const double mf = mass_functional(grid);
        ScanRecord r;
        r.set("T", T).set("n", static_cast<double>(n));
        r.set("logdet_per_T", ld).set("ak_target", ak_target).set("ak_dev", ld - ak_target);
        r.set("mass_fn", mf).set("mass_target", mass_target).set("mass_dev", mf - mass_target);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace pfwcl
