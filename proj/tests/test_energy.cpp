#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pfwcl/energy.hpp"
#include "pfwcl/quadrature.hpp"

using namespace pfwcl;
constexpr double pi = std::numbers::pi;

namespace {

RadialMeasure atom13() { return RadialMeasure::atoms({{1.0, 3.0}}); }

// independent oracle: E/Λ² as Λ → 0, ∫₀^∞ (arctan u − u/(1+u²))/u³ du = π/4, times 4
constexpr double kSmallLambdaLimit = pi;

}  // namespace

TEST(Rho, SpecExamples) {
    const SpectralFunctions atom(atom13(), 1.0);
    EXPECT_DOUBLE_EQ(rho(atom, 0.0), 1.5);
    EXPECT_NEAR(rho(atom, 2.0), 1.5 * std::exp(-2.0), 1e-15);
    const SpectralFunctions sharp(RadialMeasure(3, SharpCutoff{1.0}), 1.0);
    EXPECT_NEAR(rho(sharp, 0.0), 2 * pi / 3, 1e-12);
}

TEST(Rho, SharpCutoffClosedForm) {
    // (2/3)·4π·½∫₀¹ r e^{−tr} dr
    const SpectralFunctions sharp(RadialMeasure(3, SharpCutoff{1.0}), 1.0);
    for (double t : {0.1, 1.0, 5.0}) {
        const double exact = (4 * pi / 3) * (1 - std::exp(-t) * (1 + t)) / (t * t);
        EXPECT_NEAR(rho(sharp, t), exact, 1e-12 * exact);
        EXPECT_EQ(rho(sharp, t), rho(sharp, -t));
    }
}

TEST(RhoHat, SpecExamples) {
    const SpectralFunctions atom(atom13(), 1.0);
    EXPECT_DOUBLE_EQ(rho_hat(atom, 0.0), 3.0);
    EXPECT_DOUBLE_EQ(rho_hat(atom, 1.0), 1.5);
    const RadialMeasure g(3, GaussianProfile{1.0});
    const double s = 0.7, kappa = 3.0;
    const double lhs = kappa * kappa * rho_hat(SpectralFunctions(g, kappa), kappa * kappa * s);
    const double rhs = rho_hat(SpectralFunctions(g, 1.0), s);
    EXPECT_NEAR(lhs, rhs, 1e-11 * rhs);
}

TEST(RhoHat, EvenAndPositive) {
    const SpectralFunctions sf(RadialMeasure(3, GaussianProfile{0.8}), 1.4);
    for (double t : {0.0, 0.3, 2.0, 40.0}) {
        EXPECT_GT(rho_hat(sf, t), 0.0);
        EXPECT_EQ(rho_hat(sf, t), rho_hat(sf, -t));
        // log(1+κ²ρ̂) ≤ κ²ρ̂
        EXPECT_LE(std::log1p(sf.kappa * sf.kappa * rho_hat(sf, t)), sf.kappa * sf.kappa * rho_hat(sf, t));
    }
}

TEST(GFunction, SpecExamples) {
    EXPECT_EQ(G_function(atom13(), 0.0), 0.0);
    EXPECT_EQ(G_function(RadialMeasure(3, SharpCutoff{1.0}), 0.0), 0.0);
    EXPECT_NEAR(G_function(atom13(), 1.0), 0.3, 1e-15);
    EXPECT_EQ(G_function(RadialMeasure::null(), 2.0), 0.0);
    const RadialMeasure g(3, GaussianProfile{1.0});
    for (double t : {0.2, 1.0, 9.0}) {
        EXPECT_GE(G_function(g, t), 0.0);
        EXPECT_EQ(G_function(g, t), G_function(g, -t));
    }
}

TEST(GFunction, PointwiseBoundsFromMoments) {
    // ‖tφ̂/(t²+ω²)‖² ≤ ¼M₋₂ and ‖φ̂/√(t²+ω²)‖² ≤ M₋₂, measured with the unified measure
    const RadialMeasure ff(3, SharpCutoff{2.0});
    const double m2 = ff.polarization_factor() * moment(ff, -2);
    for (double t : {0.01, 0.5, 1.0, 3.0, 50.0}) {
        const double num = ff.integrate_measure([t](double w) { return t * t / std::pow(t * t + w * w, 2); }).value;
        const double den = ff.integrate_measure([t](double w) { return 1.0 / (t * t + w * w); }).value;
        EXPECT_LE(num, 0.25 * m2 * (1 + 1e-12));
        EXPECT_LE(den, m2 * (1 + 1e-12));
    }
}

TEST(GroundEnergy, SpecExamples) {
    const EnergyResult a = ground_energy(atom13());
    EXPECT_NEAR(a.calE, 0.5, 1e-12);
    EXPECT_NEAR(a.log_spectral, 1.0, 1e-12);
    EXPECT_EQ(ground_energy(RadialMeasure::null()).calE, 0.0);
    const double e1 = ground_energy(RadialMeasure(3, SharpCutoff{1.0})).calE;
    EXPECT_NEAR(e1, cutoff_energy_3d(1.0), 1e-6 * e1);
}

TEST(GroundEnergy, AtomListsMatchBogoliubovFormula) {
    // two atoms: ½(√μ₁+√μ₂−ω₁−ω₂), μ eigenvalues of diag(ω²)+vvᵀ, done here by the 2×2 closed form
    const double w1 = 1.0, w2 = 2.0, W1 = 1.0, W2 = 2.0;
    const double a = w1 * w1 + W1, d = w2 * w2 + W2, b = std::sqrt(W1 * W2);
    const double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    const double exact = 0.5 * (std::sqrt(mid + rad) + std::sqrt(mid - rad) - w1 - w2);
    const double e = ground_energy(RadialMeasure::atoms({{w1, W1}, {w2, W2}})).calE;
    EXPECT_NEAR(e, exact, 1e-9 * exact);
}

TEST(LogSpectral, SpecExamples) {
    EXPECT_NEAR(log_spectral_energy(atom13(), 1.0), 1.0, 1e-12);
    EXPECT_EQ(log_spectral_energy(RadialMeasure::null(), 3.0), 0.0);
    const RadialMeasure g(3, GaussianProfile{1.0});
    EXPECT_NEAR(log_spectral_energy(g, 2.0), 4 * log_spectral_energy(g, 1.0), 1e-10 * log_spectral_energy(g, 2.0));
}

TEST(LogSpectral, IdentityWithGIntegral) {
    for (const Profile& p : {Profile{SharpCutoff{1.0}}, Profile{GaussianProfile{1.0}}, Profile{SharpCutoff{5.0}}}) {
        const RadialMeasure ff(3, p);
        const double gi = G_integral(ff).value;
        for (double kappa : {0.5, 1.0, 2.0}) {
            const double lhs = log_spectral_energy(ff, kappa);
            const double rhs = kappa * kappa * gi;
            EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, rhs));
        }
        const EnergyResult r = ground_energy(ff);
        EXPECT_NEAR(r.log_spectral, 2.0 / 3.0 * r.calE, 1e-9 * r.calE + r.estimated_abs_error);
    }
}

TEST(Dispersion, SpecExamples) {
    EXPECT_NEAR(dipole_dispersion(atom13(), 1.0, 0.0), 0.5, 1e-12);
    EXPECT_NEAR(dipole_dispersion(atom13(), 2.0, 2.0), 2.5, 1e-12);
    EXPECT_NEAR(dipole_dispersion(atom13(), 0.0, 2.0), 0.5, 1e-15);  // mass term survives κ=0
}

TEST(Cutoff, SmallLambdaLimit) {
    for (double lambda : {1e-4, 1e-6}) {
        EXPECT_NEAR(cutoff_energy_3d(lambda) / (lambda * lambda), kSmallLambdaLimit, 1e-2 * kSmallLambdaLimit * lambda / 1e-4);
    }
    // the small-Λ oracle itself, by plain quadrature of the undamped integrand
    auto f = [](double u) { return u < 1e-3 ? 2.0 / 3.0 - 0.8 * u * u : (std::atan(u) - u / (1 + u * u)) / (u * u * u); };
    const double oracle = 4 * (integrate(f, 0.0, 1.0).value + integrate_tail(f, 1.0).value);
    EXPECT_NEAR(oracle, kSmallLambdaLimit, 1e-9);
}

TEST(Cutoff, CorollaryBracketAndSplit) {
    const double lo = std::sqrt(2 * pi / 3), hi = std::sqrt(2 * pi);
    const double e6 = cutoff_energy_3d(1e6) / std::pow(1e6, 1.5);
    EXPECT_GE(e6, lo);
    EXPECT_LE(e6, hi);

    const auto s4 = cutoff_split_I1_I2(1e4);
    EXPECT_NEAR(s4.I1 + s4.I2, cutoff_energy_3d(1e4) / 4e4, 1e-9 * (s4.I1 + s4.I2));
    const auto s6 = cutoff_split_I1_I2(1e6);
    EXPECT_LT(s6.I2 / 1e3, s4.I2 / 1e2);
    const auto s2 = cutoff_split_I1_I2(1e2);
    EXPECT_GT(s2.I1, 0.0);
    EXPECT_GT(s2.I2, 0.0);
    EXPECT_THROW(cutoff_split_I1_I2(1.0), ConfigError);
    EXPECT_THROW(cutoff_energy_3d(0.0), ConfigError);
}

TEST(Cutoff, MatchesGroundEnergyAcrossLambda) {
    for (double lambda : {0.1, 3.0, 30.0}) {
        const double a = cutoff_energy_3d(lambda);
        const double b = ground_energy(RadialMeasure(3, SharpCutoff{lambda})).calE;
        EXPECT_NEAR(a, b, 1e-6 * a) << lambda;
    }
}

TEST(Cutoff, SeriesBranchIsContinuous) {
    for (double lambda : {1e-3, 1.0, 1e6}) {
        const double below = detail::cutoff_integrand(std::nextafter(0.1, 0.0), lambda);
        const double above = detail::cutoff_integrand(0.1, lambda);
        EXPECT_NEAR(below, above, 1e-13 * above);
    }
}
