// fockdesk.hpp: truncated bosonic Fock space of M modes with occupation
// numbers n_j, Σn_j ≤ N_tot. Each mode has a frequency ω_j, a coupling
// weight W_j (polarization factor included) and a scalar momentum label q_j.
//
//   H_f = Σ ω_j n_j,   P_f = Σ q_j n_j,   A = Σ g_j (a_j + a_j†)/√2,  g_j = √(W_j/ω_j)
//   Π̃  = i K,          K = Σ (g_j/ω_j) (a_j† − a_j)/√2
//
// Fiber Hamiltonian with the interpolation parameter ε ∈ [0, 1]:
//   H_κ(p, ε) = ½(p − εP_f − κA)² + κ²H_f.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "pfwcl/errors.hpp"
#include "pfwcl/lanczos.hpp"
#include "pfwcl/parallel.hpp"
#include "pfwcl/scan.hpp"

namespace pfwcl {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Mode {
    double omega = 1.0;
    double weight = 0.0;
    double q = 0.0;
};

inline constexpr std::size_t kMaxFockDimension = 200000;
inline constexpr Eigen::Index kDenseLimit = 2000;

/// C(M + N, M), saturating at SIZE_MAX.
inline std::size_t fock_dimension(std::size_t modes, std::size_t n_tot) {
    long double c = 1.0L;
    for (std::size_t k = 1; k <= modes; ++k) c = c * static_cast<long double>(n_tot + k) / static_cast<long double>(k);
    if (c > static_cast<long double>(SIZE_MAX)) return SIZE_MAX;
    return static_cast<std::size_t>(std::llround(c));
}

class FockBasis {
public:
    FockBasis(std::vector<Mode> modes, int n_tot) : modes_(std::move(modes)), n_tot_(n_tot) {
        if (modes_.empty()) throw ConfigError("build_basis: need at least one mode");
        if (n_tot_ < 1) throw ConfigError("build_basis: total occupation cutoff must be >= 1");
        for (const Mode& m : modes_) {
            if (!(m.omega > 0.0) || !std::isfinite(m.omega)) throw ConfigError("build_basis: mode frequencies must be positive");
            if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) throw ConfigError("build_basis: mode weights must be nonnegative");
            if (!std::isfinite(m.q)) throw ConfigError("build_basis: mode momenta must be finite");
        }
        const std::size_t dim = fock_dimension(modes_.size(), static_cast<std::size_t>(n_tot_));
        if (dim > kMaxFockDimension) {
            std::ostringstream os;
            os << "build_basis: dimension C(" << modes_.size() + n_tot_ << "," << modes_.size() << ") = " << dim
               << " exceeds the limit " << kMaxFockDimension;
            throw ConfigError(os.str());
        }
        occupations_.reserve(dim * modes_.size());
        // layers of increasing total occupation, lexicographic inside a layer; the vacuum is state 0
        std::vector<std::uint16_t> current(modes_.size(), 0);
        for (int total = 0; total <= n_tot_; ++total) enumerate(0, total, current);
        for (std::size_t i = 0; i < dimension(); ++i) lookup_.emplace(occupation_vector(i), i);
    }

    std::size_t dimension() const { return occupations_.size() / modes_.size(); }
    std::size_t num_modes() const { return modes_.size(); }
    int n_tot() const { return n_tot_; }
    const std::vector<Mode>& modes() const { return modes_; }

    std::uint16_t occupation(std::size_t state, std::size_t mode) const {
        return occupations_[state * modes_.size() + mode];
    }

    std::vector<std::uint16_t> occupation_vector(std::size_t state) const {
        auto first = occupations_.begin() + static_cast<std::ptrdiff_t>(state * modes_.size());
        return {first, first + static_cast<std::ptrdiff_t>(modes_.size())};
    }

    int total(std::size_t state) const {
        int t = 0;
        for (std::size_t j = 0; j < modes_.size(); ++j) t += occupation(state, j);
        return t;
    }

    std::optional<std::size_t> index(const std::vector<std::uint16_t>& occ) const {
        auto it = lookup_.find(occ);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

private:
    void enumerate(std::size_t mode, int remaining, std::vector<std::uint16_t>& current) {
        if (mode + 1 == modes_.size()) {
            current[mode] = static_cast<std::uint16_t>(remaining);
            occupations_.insert(occupations_.end(), current.begin(), current.end());
            return;
        }
        for (int n = remaining; n >= 0; --n) {
            current[mode] = static_cast<std::uint16_t>(n);
            enumerate(mode + 1, remaining - n, current);
        }
        current[mode] = 0;
    }

    std::vector<Mode> modes_;
    int n_tot_;
    std::vector<std::uint16_t> occupations_;
    std::map<std::vector<std::uint16_t>, std::size_t> lookup_;
};

inline FockBasis build_basis(std::vector<Mode> modes, int n_tot) { return FockBasis(std::move(modes), n_tot); }

/// Second-quantized operators on a truncated basis.
struct FiberOperators {
    explicit FiberOperators(FockBasis b) : basis(std::move(b)) {
        const auto dim = static_cast<Eigen::Index>(basis.dimension());
        const std::size_t M = basis.num_modes();
        for (const Mode& m : basis.modes()) couplings.push_back(std::sqrt(m.weight / m.omega));

        std::vector<Eigen::Triplet<double>> hf, pf, num, a_trip, k_trip;
        std::vector<std::vector<Eigen::Triplet<double>>> lower(M);
        for (std::size_t s = 0; s < basis.dimension(); ++s) {
            const auto i = static_cast<Eigen::Index>(s);
            double e = 0.0;
            double p = 0.0;
            int n = 0;
            for (std::size_t j = 0; j < M; ++j) {
                const int nj = basis.occupation(s, j);
                e += nj * basis.modes()[j].omega;
                p += nj * basis.modes()[j].q;
                n += nj;
            }
            hf.emplace_back(i, i, e);
            pf.emplace_back(i, i, p);
            num.emplace_back(i, i, static_cast<double>(n));
            if (n >= basis.n_tot()) continue;
            auto occ = basis.occupation_vector(s);
            for (std::size_t j = 0; j < M; ++j) {
                ++occ[j];
                const auto up = static_cast<Eigen::Index>(*basis.index(occ));
                --occ[j];
                const double amp = std::sqrt(static_cast<double>(occ[j] + 1));  // ⟨n+e_j| a_j† |n⟩
                lower[j].emplace_back(i, up, amp);                              // ⟨n| a_j |n+e_j⟩
                const double g = couplings[j] * amp / std::sqrt(2.0);
                if (g != 0.0) {
                    a_trip.emplace_back(up, i, g);
                    a_trip.emplace_back(i, up, g);
                }
                const double c = couplings[j] / basis.modes()[j].omega * amp / std::sqrt(2.0);
                if (c != 0.0) {
                    k_trip.emplace_back(up, i, c);
                    k_trip.emplace_back(i, up, -c);
                }
            }
        }
        auto make = [dim](const std::vector<Eigen::Triplet<double>>& t) {
            SparseMatrix m(dim, dim);
            m.setFromTriplets(t.begin(), t.end());
            return m;
        };
        Hf = make(hf);
        Pf = make(pf);
        N = make(num);
        A = make(a_trip);
        Pi_generator = make(k_trip);
        for (const auto& t : lower) annihilators.push_back(make(t));
    }

    std::size_t dimension() const { return basis.dimension(); }

    /// m_eff = 1 + Σ W_j/ω_j².
    double m_eff() const {
        double m = 1.0;
        for (const Mode& md : basis.modes()) m += md.weight / (md.omega * md.omega);
        return m;
    }

    FockBasis basis;
    std::vector<double> couplings;  // g_j
    SparseMatrix Hf, Pf, N, A;
    /// K with Π̃ = iK; real antisymmetric.
    SparseMatrix Pi_generator;
    std::vector<SparseMatrix> annihilators;
};

inline SparseMatrix symmetrized(const SparseMatrix& m) {
    SparseMatrix t = m.transpose();
    return 0.5 * (m + t);
}

/// ½(p − εP_f − κA)² + κ²H_f.
inline SparseMatrix fiber_hamiltonian(const FiberOperators& ops, double kappa, double p, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("fiber_hamiltonian: epsilon must lie in [0, 1]");
    const auto dim = static_cast<Eigen::Index>(ops.dimension());
    SparseMatrix id(dim, dim);
    id.setIdentity();
    const SparseMatrix X = p * id - epsilon * ops.Pf - kappa * ops.A;
    const SparseMatrix X2 = X * X;
    return symmetrized(0.5 * X2 + (kappa * kappa) * ops.Hf);
}

/// ½A² + H_f.
inline SparseMatrix field_hamiltonian(const FiberOperators& ops) {
    const SparseMatrix A2 = ops.A * ops.A;
    return symmetrized(0.5 * A2 + ops.Hf);
}

/// Smallest eigenvalue: dense for dim ≤ 2000, Lanczos above.
inline double ground_energy(const SparseMatrix& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("ground_energy: matrix must be square");
    if (H.rows() <= kDenseLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("ground_energy", "dense eigensolver failed");
        return es.eigenvalues()[0];
    }
    auto apply = [&H](const auto& x, Eigen::VectorXd& y) { y.noalias() = H * x; };
    return lanczos_smallest(apply, H.rows()).eigenvalue;
}

inline double ground_energy(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("ground_energy", "dense eigensolver failed");
    return es.eigenvalues()[0];
}

/// Exact ground energy of ½A² + H_f for the untruncated modes:
/// ½Σ(√μ_i − ω_i), μ eigenvalues of diag(ω²) + v vᵀ with v_j = √W_j.
inline double bogoliubov_energy(const std::vector<Mode>& modes) {
    if (modes.empty()) throw std::invalid_argument("bogoliubov_energy: no modes");
    const auto M = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(M, M);
    Eigen::VectorXd v(M);
    double sum_w = 0.0;
    for (Eigen::Index j = 0; j < M; ++j) {
        const Mode& m = modes[static_cast<std::size_t>(j)];
        F(j, j) = m.omega * m.omega;
        v[j] = std::sqrt(m.weight);
        sum_w += m.omega;
    }
    F += v * v.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double mu : es.eigenvalues()) s += std::sqrt(mu);
    return 0.5 * (s - sum_w);
}

namespace detail {

inline void require_dense(const FiberOperators& ops, const char* op) {
    if (static_cast<Eigen::Index>(ops.dimension()) > kDenseLimit)
        throw ConfigError(std::string(op) + ": dense matrix functions need dimension <= 2000, got " +
                          std::to_string(ops.dimension()));
}

/// Largest singular value.
inline double operator_norm(const Eigen::MatrixXd& R) {
    const Eigen::MatrixXd G = R.cols() <= R.rows() ? Eigen::MatrixXd(R.transpose() * R) : Eigen::MatrixXd(R * R.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

/// ‖U_p⁻¹ H_dip,κ(p) U_p − (p²/(2m_eff) + κ²(½A² + H_f))‖ restricted to Σn_j ≤ N_tot/2,
/// with U_p = exp(−i p Π̃/(κ m_eff)) = exp(p K/(κ m_eff)).
inline double conjugation_residual(const FiberOperators& ops, double kappa, double p) {
    if (!(kappa > 0.0)) throw ConfigError("conjugation_residual: kappa must be positive");
    if (p == 0.0) return 0.0;
    detail::require_dense(ops, "conjugation_residual");
    const double m = ops.m_eff();
    const Eigen::MatrixXd generator = (p / (kappa * m)) * Eigen::MatrixXd(ops.Pi_generator);
    const Eigen::MatrixXd U = generator.exp();
    const Eigen::MatrixXd H = Eigen::MatrixXd(fiber_hamiltonian(ops, kappa, p, 0.0));
    const auto dim = static_cast<Eigen::Index>(ops.dimension());
    const Eigen::MatrixXd target = Eigen::MatrixXd(fiber_hamiltonian(ops, kappa, 0.0, 0.0)) +
                                   (p * p / (2.0 * m)) * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd R = U.transpose() * H * U - target;
    std::vector<Eigen::Index> low;
    for (std::size_t s = 0; s < ops.dimension(); ++s) {
        if (2 * ops.basis.total(s) <= ops.basis.n_tot()) low.push_back(static_cast<Eigen::Index>(s));
    }
    Eigen::MatrixXd B(dim, static_cast<Eigen::Index>(low.size()));
    for (std::size_t c = 0; c < low.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = R.col(low[c]);
    return detail::operator_norm(B);
}

/// ‖e^{−T(H_κ(p,ε) − κ²𝓔_disc)} − P_g e^{−T(p − εP_f)²/(2m_eff)}‖ with P_g the ground
/// projector of ½A² + H_f and 𝓔_disc the Bogoliubov energy.
inline double semigroup_wcl_residual(const FiberOperators& ops, double kappa, double p, double T, double epsilon = 1.0) {
    if (!(T >= 0.0)) throw ConfigError("semigroup_wcl_residual: T must be nonnegative");
    detail::require_dense(ops, "semigroup_wcl_residual");
    const auto dim = static_cast<Eigen::Index>(ops.dimension());
    const double e_disc = bogoliubov_energy(ops.basis.modes());
    const double m = ops.m_eff();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> field(Eigen::MatrixXd(field_hamiltonian(ops)));
    if (field.info() != Eigen::Success) throw NumericalError("semigroup_wcl_residual", "eigensolver failed");
    const Eigen::VectorXd g = field.eigenvectors().col(0);

    Eigen::MatrixXd H = Eigen::MatrixXd(fiber_hamiltonian(ops, kappa, p, epsilon));
    H.diagonal().array() -= kappa * kappa * e_disc;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("semigroup_wcl_residual", "eigensolver failed");
    const Eigen::VectorXd decay = (-T * es.eigenvalues().array()).exp();
    const Eigen::MatrixXd semigroup = es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose();

    Eigen::VectorXd free(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double shift = p - epsilon * ops.Pf.coeff(i, i);
        free[i] = std::exp(-T * shift * shift / (2.0 * m));
    }
    const Eigen::MatrixXd limit = g * g.cwiseProduct(free).transpose();
    return detail::operator_norm(semigroup - limit);
}

struct WclScanOptions {
    double epsilon = 1.0;
    /// When set, each row also carries the semigroup residual at this horizon.
    std::optional<double> semigroup_T;
    unsigned jobs = 1;
};

/// Rows: kappa, p, epsilon, E_p, E_0, gap, target, gap_dev, E0_dev[, semigroup_res].
template <class Sink>
void wcl_scan(const FiberOperators& ops, const std::vector<double>& kappas, const std::vector<double>& ps,
              const WclScanOptions& opt, Sink&& sink) {
    if (kappas.empty() || ps.empty()) throw ConfigError("wcl_scan: kappa and p lists must be nonempty");
    const double m = ops.m_eff();
    const double e_disc = bogoliubov_energy(ops.basis.modes());
    // E_κ(0) per κ first, so rows with p ≠ 0 reuse it
    std::vector<double> e0(kappas.size());
    ordered_parallel_for(kappas.size(), opt.jobs,
                         [&](std::size_t i) { return ground_energy(fiber_hamiltonian(ops, kappas[i], 0.0, opt.epsilon)); },
                         [&](std::size_t i, double v) { e0[i] = v; });
    const std::size_t count = kappas.size() * ps.size();
    auto compute = [&](std::size_t idx) {
        const std::size_t ki = idx / ps.size();
        const double kappa = kappas[ki];
        const double p = ps[idx % ps.size()];
        const double ep = p == 0.0 ? e0[ki] : ground_energy(fiber_hamiltonian(ops, kappa, p, opt.epsilon));
        const double target = p * p / (2.0 * m);
        ScanRecord r;
        r.set("kappa", kappa).set("p", p).set("epsilon", opt.epsilon);
        r.set("E_p", ep).set("E_0", e0[ki]).set("gap", ep - e0[ki]).set("target", target);
        r.set("gap_dev", ep - e0[ki] - target).set("E0_dev", e0[ki] - kappa * kappa * e_disc);
        if (opt.semigroup_T) r.set("semigroup_res", semigroup_wcl_residual(ops, kappa, p, *opt.semigroup_T, opt.epsilon));
        return r;
    };
    ordered_parallel_for(count, opt.jobs, compute, [&](std::size_t, ScanRecord&& r) { sink(std::move(r)); });
}

inline std::vector<ScanRecord> wcl_scan(const FiberOperators& ops, const std::vector<double>& kappas,
                                        const std::vector<double>& ps, const WclScanOptions& opt = {}) {
    std::vector<ScanRecord> rows;
    wcl_scan(ops, kappas, ps, opt, [&](ScanRecord&& r) { rows.push_back(std::move(r)); });
    return rows;
}

struct DiamagneticRow {
    double p = 0.0;
    double E_0 = 0.0;
    double E_p = 0.0;
    double excess = 0.0;  // E_0 − E_p
    bool holds = true;
};

struct DiamagneticReport {
    double allowance = 0.0;
    std::vector<DiamagneticRow> rows;

    bool holds() const {
        return std::all_of(rows.begin(), rows.end(), [](const DiamagneticRow& r) { return r.holds; });
    }
};

/// E_κ(0) ≤ E_κ(p) + allowance for every p; violations are reported, not thrown.
inline DiamagneticReport diamagnetic_check(const FiberOperators& ops, double kappa, const std::vector<double>& ps,
                                           double epsilon = 1.0, double allowance = 1e-6) {
    DiamagneticReport rep;
    rep.allowance = allowance;
    const double e0 = ground_energy(fiber_hamiltonian(ops, kappa, 0.0, epsilon));
    for (double p : ps) {
        DiamagneticRow row;
        row.p = p;
        row.E_0 = e0;
        row.E_p = p == 0.0 ? e0 : ground_energy(fiber_hamiltonian(ops, kappa, p, epsilon));
        row.excess = row.E_0 - row.E_p;
        row.holds = row.excess <= allowance;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace pfwcl
