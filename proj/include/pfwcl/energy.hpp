// energy.hpp: spectral functions of the dipole field and the ground-state
// energy of ½A(0)² + H_f.
//
//   ρ(t)  = ∫ e^{−|t|κ²ω} / (2ω) dμ(ω)                 (kernel of C_T)
//   ρ̂(t)  = ∫ κ² / (κ⁴ω² + t²) dμ(ω)                   (its Fourier transform)
//   G(t)  = ∫ t²/(t²+ω²)² dμ / (1 + ∫ 1/(t²+ω²) dμ)
//
// The energy 𝓔 = (d/2π)∫G dt is computed from G; the log-spectral integral
// (1/2π)∫log(1+κ²ρ̂) dt = (κ²/π)∫G dt is computed separately from ρ̂ and
// serves as the cross-check.

#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "pfwcl/formfactor.hpp"
#include "pfwcl/quadrature.hpp"

namespace pfwcl {

namespace detail {

inline QuadOptions inner_options() {
    QuadOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-300;
    return o;
}

inline QuadOptions outer_options() {
    QuadOptions o;
    o.rel_tol = 1e-11;
    o.abs_tol = 1e-13;
    return o;
}

}  // namespace detail

struct SpectralFunctions {
    SpectralFunctions(RadialMeasure measure, double kappa, QuadOptions tolerance = detail::inner_options())
        : source(std::move(measure)), kappa(kappa), tolerance(tolerance) {
        if (!(kappa >= 0.0)) throw ConfigError("spectral functions: kappa must be nonnegative");
    }

    RadialMeasure source;
    double kappa;
    QuadOptions tolerance;
};

struct EnergyResult {
    double calE = 0.0;
    double log_spectral = 0.0;
    double estimated_abs_error = 0.0;
};

inline double rho(const SpectralFunctions& sf, double t) {
    const double decay = std::abs(t) * sf.kappa * sf.kappa;
    std::vector<double> hints;
    if (decay > 0.0) hints.push_back(1.0 / decay);
    auto f = [decay](double w) { return std::exp(-decay * w) / (2.0 * w); };
    return sf.source.integrate_measure(f, sf.tolerance, hints, "rho").value;
}

inline double rho_hat(const SpectralFunctions& sf, double t) {
    const double k2 = sf.kappa * sf.kappa;
    if (k2 == 0.0) return 0.0;
    const double k4 = k2 * k2;
    const double t2 = t * t;
    std::vector<double> hints;
    if (t != 0.0) hints.push_back(std::abs(t) / k2);
    auto f = [=](double w) { return k2 / (k4 * w * w + t2); };
    return sf.source.integrate_measure(f, sf.tolerance, hints, "rho_hat").value;
}

inline double G_function(const RadialMeasure& ff, double t, const QuadOptions& opt = detail::inner_options()) {
    if (t == 0.0) return 0.0;
    const double t2 = t * t;
    const std::vector<double> hints{std::abs(t)};
    auto num = [t2](double w) {
        const double s = t2 + w * w;
        return t2 / (s * s);
    };
    auto den = [t2](double w) { return 1.0 / (t2 + w * w); };
    const double n = ff.integrate_measure(num, opt, hints, "G_function").value;
    const double d = 1.0 + ff.integrate_measure(den, opt, hints, "G_function").value;
    return n / d;
}

/// (1/2π)∫ log(1 + κ²ρ̂_κ(t)) dt.
inline QuadResult log_spectral_integral(const RadialMeasure& ff, double kappa) {
    if (ff.is_null()) return {};
    const SpectralFunctions sf(ff, kappa);
    const double k2 = kappa * kappa;
    auto f = [&](double t) { return std::log1p(k2 * rho_hat(sf, t)); };
    const QuadResult half = integrate_half_line(f, k2 * ff.frequency_scale(), detail::outer_options(),
                                                "log_spectral_energy");
    return (1.0 / std::numbers::pi) * half;
}

inline double log_spectral_energy(const RadialMeasure& ff, double kappa) {
    if (!(kappa >= 0.0)) throw ConfigError("log_spectral_energy: kappa must be nonnegative");
    if (kappa == 0.0) return 0.0;
    return log_spectral_integral(ff, kappa).value;
}

/// (1/π)∫_{−∞}^{∞} G(t) dt, i.e. the right side of the log-spectral identity at κ = 1.
inline QuadResult G_integral(const RadialMeasure& ff) {
    if (ff.is_null()) return {};
    auto f = [&](double t) { return G_function(ff, t); };
    const QuadResult half = integrate_half_line(f, ff.frequency_scale(), detail::outer_options(), "ground_energy");
    return (2.0 / std::numbers::pi) * half;
}

/// Ground-state energy of ½A(0)² + H_f. Point-mass measures model one scalar
/// component (prefactor 1 instead of d).
inline EnergyResult ground_energy(const RadialMeasure& ff) {
    EnergyResult r;
    if (ff.is_null()) return r;
    const QuadResult g = G_integral(ff);
    const QuadResult l = log_spectral_integral(ff, 1.0);
    const double comp = ff.component_count();
    r.calE = 0.5 * comp * g.value;
    r.log_spectral = l.value;
    r.estimated_abs_error = 0.5 * comp * g.abs_error + l.abs_error;
    return r;
}

/// inf σ(H_dip,κ(p)) = p²/(2m_eff) + κ²𝓔.
inline double dipole_dispersion(const RadialMeasure& ff, double kappa, double p) {
    const double m_eff = moment_report(ff).m_eff;
    return p * p / (2.0 * m_eff) + kappa * kappa * ground_energy(ff).calE;
}

namespace detail {

/// Integrand of E(Λ)/(4Λ²) written as n3/(1 + (8π/3)Λ·d1) with
/// n3 = (arctan u − u/(1+u²))/u³ and d1 = (u − arctan u)/u.
inline double cutoff_integrand(double u, double lambda) {
    constexpr double c = 8.0 * std::numbers::pi / 3.0;
    double n3 = 0.0;
    double d1 = 0.0;
    if (u < 0.1) {
        // arctan u − u/(1+u²) = Σ_{k≥1} (−1)^{k+1} 2k/(2k+1) u^{2k+1}
        // u − arctan u       = Σ_{k≥1} (−1)^{k+1} 1/(2k+1) u^{2k+1}
        const double u2 = u * u;
        double pw = 1.0;
        double sign = 1.0;
        for (int k = 1; k <= 14; ++k) {
            n3 += sign * (2.0 * k) / (2.0 * k + 1.0) * pw;
            d1 += sign / (2.0 * k + 1.0) * pw * u2;
            pw *= u2;
            sign = -sign;
        }
    } else {
        const double at = std::atan(u);
        n3 = (at - u / (1.0 + u * u)) / (u * u * u);
        d1 = (u - at) / u;
    }
    return n3 / (1.0 + c * lambda * d1);
}

/// ∫_a^b of the cutoff integrand; b may be +∞.
inline QuadResult cutoff_piece(double lambda, double a, double b) {
    constexpr double c = 8.0 * std::numbers::pi / 3.0;
    auto f = [lambda](double u) { return cutoff_integrand(u, lambda); };
    // break points at multiples of the peak width √(3/(cΛ))
    const double width = std::sqrt(3.0 / (c * lambda));
    std::vector<double> breaks{a};
    for (double s = width * 0.25; s < 1.0; s *= 4.0) {
        if (s > a && s < b) breaks.push_back(s);
    }
    if (1.0 > a && 1.0 < b) breaks.push_back(1.0);
    const QuadOptions opt = outer_options();
    if (std::isinf(b)) {
        QuadResult r = integrate_pieces(f, breaks, opt, "cutoff_energy_3d");
        r += integrate_tail(f, breaks.back(), opt, "cutoff_energy_3d");
        return r;
    }
    breaks.push_back(b);
    return integrate_pieces(f, breaks, opt, "cutoff_energy_3d");
}

}  // namespace detail

/// d = 3, φ = 1_{[0,Λ]}, κ = 1:
/// E(Λ) = 4Λ²∫₀^∞ [arctan u − u/(1+u²)] / [u + (8π/3)Λ(u − arctan u)] du/u².
inline double cutoff_energy_3d(double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("cutoff_energy_3d: lambda must be positive");
    const double e = 4.0 * lambda * lambda * detail::cutoff_piece(lambda, 0.0, kInfinity).value;
    if (!std::isfinite(e) || !(e > 0.0))
        throw NumericalError("cutoff_energy_3d", "E(lambda) not representable in double precision at lambda = " +
                                                     std::to_string(lambda));
    return e;
}

struct CutoffSplit {
    double I1 = 0.0;
    double I2 = 0.0;
};

/// E(Λ)/(4Λ) = I1 + I2 with the split at u = Λ^{−1/4}.
inline CutoffSplit cutoff_split_I1_I2(double lambda) {
    if (!(lambda > 1.0)) throw ConfigError("cutoff_split_I1_I2: lambda must exceed 1");
    const double split = std::pow(lambda, -0.25);
    return {lambda * detail::cutoff_piece(lambda, 0.0, split).value,
            lambda * detail::cutoff_piece(lambda, split, kInfinity).value};
}

}  // namespace pfwcl
