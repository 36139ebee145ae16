#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pfwcl/formfactor.hpp"

using namespace pfwcl;
constexpr double pi = std::numbers::pi;

TEST(Moment, SpecExamples) {
    const RadialMeasure sharp(3, SharpCutoff{1.0});
    EXPECT_NEAR(moment(sharp, -2), 4 * pi, 1e-12 * 4 * pi);
    EXPECT_TRUE(std::isinf(moment(sharp, -3)));
    EXPECT_EQ(moment(RadialMeasure::atoms({{1.0, 3.0}}), -2), 3.0);
    EXPECT_THROW(moment(sharp, 0), std::invalid_argument);
    EXPECT_THROW(moment(sharp, 2), std::invalid_argument);
}

TEST(Moment, SharpCutoffClosedForm) {
    for (int d : {2, 3, 4, 5})
        for (double lambda : {0.3, 1.0, 7.0})
            for (int s : {-3, -2, -1, 1}) {
                if (s + d <= 0) continue;
                const double exact = sphere_area(d) * std::pow(lambda, s + d) / (s + d);
                // d = 2 violates a2 (M₋₂ = ∞), so only the raw radial moment exists there
                const double m = d == 2 ? detail::raw_moment(d, SharpCutoff{lambda}, s) : moment(RadialMeasure(d, SharpCutoff{lambda}), s);
                EXPECT_NEAR(m, exact, 1e-12 * exact) << "d=" << d << " s=" << s << " L=" << lambda;
            }
}

TEST(Moment, GaussianAgainstGammaFunction) {
    // S_{d-1} ∫ e^{-r²/σ²} r^{p} dr = S_{d-1} σ^{p+1} Γ((p+1)/2)/2
    for (int d : {3, 4})
        for (int s : {-2, -1, 1}) {
            const double sigma = 1.7;
            const int p = s + d - 1;
            const double exact = sphere_area(d) * std::pow(sigma, p + 1) * std::tgamma(0.5 * (p + 1)) / 2;
            EXPECT_NEAR(moment(RadialMeasure(d, GaussianProfile{sigma}), s), exact, 1e-11 * exact);
        }
}

TEST(MomentReport, SpecExamples) {
    auto sharp = moment_report(RadialMeasure(3, SharpCutoff{1.0}));
    EXPECT_NEAR(sharp.delta_m, 8 * pi / 3, 1e-11);
    EXPECT_NEAR(sharp.m_eff, 1 + 8 * pi / 3, 1e-11);
    EXPECT_FALSE(sharp.ir_regular);

    auto atom = moment_report(RadialMeasure::atoms({{1.0, 3.0}}));
    EXPECT_EQ(atom.delta_m, 3.0);
    EXPECT_EQ(atom.m_eff, 4.0);
    EXPECT_TRUE(atom.ir_regular);

    // φ(0) ≠ 0 in d = 3 makes ∫φ²r⁻¹dr diverge at the origin: not IR-regular
    EXPECT_FALSE(moment_report(RadialMeasure(3, GaussianProfile{1.0})).ir_regular);
    EXPECT_TRUE(moment_report(RadialMeasure(4, GaussianProfile{1.0})).ir_regular);
    EXPECT_TRUE(moment_report(RadialMeasure(3, Tabulated{{0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}})).ir_regular);
}

TEST(MomentReport, NullMeasureHasUnitMass) {
    auto r = moment_report(RadialMeasure::null());
    EXPECT_EQ(r.m_eff, 1.0);
    EXPECT_EQ(r.delta_m, 0.0);
    auto z = moment_report(RadialMeasure(3, Tabulated{{0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}}));
    EXPECT_EQ(z.m_eff, 1.0);
    EXPECT_TRUE(RadialMeasure(3, Tabulated{{0.0, 1.0}, {0.0, 0.0}}).is_null());
}

TEST(MomentReport, WeightScalingIsExact) {
    const std::vector<Atom> atoms{{0.5, 0.2}, {1.5, 1.1}, {3.0, 0.7}};
    const double base = moment_report(RadialMeasure::atoms(atoms)).delta_m;
    for (double c : {0.5, 3.0, 16.0}) {
        std::vector<Atom> scaled = atoms;
        for (auto& a : scaled) a.weight *= c;
        EXPECT_NEAR(moment_report(RadialMeasure::atoms(scaled)).delta_m, c * base, 1e-15 * c * base);
    }
}

TEST(MomentReport, EffectiveMassAtLeastOne) {
    for (const Profile& p : {Profile{SharpCutoff{0.2}}, Profile{GaussianProfile{3.0}}, Profile{PointMasses{{{2.0, 0.1}}}},
                             Profile{Tabulated{{0.5, 1.0, 2.0}, {0.0, 1.0, 0.0}}}}) {
        auto r = moment_report(RadialMeasure(3, p));
        EXPECT_GE(r.m_minus2, 0.0);
        EXPECT_GT(r.m_eff, 1.0);
    }
}

TEST(MomentReport, NarrowSpikeMatchesAtom) {
    // triangle spike of half-width h around ω0; its M_{-2} approaches the atom with the same mass
    const double w0 = 1.3, h = 1e-3, d = 3;
    const RadialMeasure spike(3, Tabulated{{w0 - h, w0, w0 + h}, {0.0, 1.0, 0.0}});
    const double pf = (d - 1) / d;
    // mass of φ² r² over the spike, to O(h³): S·r0²·(2h/3)
    const double mass = pf * sphere_area(3) * w0 * w0 * (2 * h / 3);
    const double atom_dm = moment_report(RadialMeasure::atoms({{w0, mass}})).delta_m;
    EXPECT_NEAR(moment_report(spike).delta_m, atom_dm, 1e-5 * atom_dm);
}

TEST(Validate, SharpPassesAndTwoDimensionsFails) {
    EXPECT_TRUE(validate_assumptions(RadialMeasure(3, SharpCutoff{1.0})).ok());
    auto bad = validate_assumptions(2, SharpCutoff{1.0});
    EXPECT_FALSE(bad.ok());
    EXPECT_TRUE(bad.sqrt_omega_phi_l2);
    EXPECT_TRUE(bad.phi_over_sqrt_omega_l2);
    EXPECT_FALSE(bad.phi_over_omega_l2);
    ASSERT_EQ(bad.failures.size(), 1u);
    EXPECT_EQ(bad.failures[0], "phi/omega not square-integrable");
    try {
        RadialMeasure(2, SharpCutoff{1.0});
        FAIL();
    } catch (const AssumptionError& e) {
        EXPECT_NE(std::string(e.what()).find("Assumption a2"), std::string::npos);
    }
}

TEST(Validate, ZeroProfilePasses) {
    auto rep = validate_assumptions(3, Tabulated{{0.0, 1.0}, {0.0, 0.0}});
    EXPECT_TRUE(rep.ok());
}

TEST(Validate, StructuralErrorsThrow) {
    EXPECT_THROW(validate_assumptions(3, Tabulated{{1.0, 0.5}, {1.0, 1.0}}), ConfigError);
    EXPECT_THROW(RadialMeasure(3, SharpCutoff{-1.0}), ConfigError);
    EXPECT_THROW(RadialMeasure(1, SharpCutoff{1.0}), ConfigError);
    EXPECT_THROW(RadialMeasure::atoms({{0.0, 1.0}}), ConfigError);
    EXPECT_THROW(RadialMeasure::atoms({{1.0, -1.0}}), ConfigError);
}

TEST(Json, RoundTripsEveryProfile) {
    for (const Profile& p : {Profile{SharpCutoff{2.5}}, Profile{GaussianProfile{0.75}},
                             Profile{PointMasses{{{1.0, 3.0}, {2.0, 0.5}}}},
                             Profile{Tabulated{{0.0, 0.5, 1.0}, {1.0, 0.5, 0.0}}}}) {
        const RadialMeasure ff(4, p);
        const auto j = to_json(ff);
        const RadialMeasure back = measure_from_json(j);
        EXPECT_EQ(to_json(back), j);
        EXPECT_EQ(back.dimension(), 4);
    }
}

TEST(Json, RejectsUnknownKeysAndTypes) {
    using nlohmann::json;
    EXPECT_THROW(measure_from_json(json::parse(R"({"profile":{"type":"sharp","lambda":1,"x":2}})")), ConfigError);
    EXPECT_THROW(measure_from_json(json::parse(R"({"profile":{"type":"box"}})")), ConfigError);
    EXPECT_THROW(measure_from_json(json::parse(R"({"dim":3,"profile":{"type":"sharp","lambda":1}})")), ConfigError);
    EXPECT_THROW(measure_from_json(json::parse(R"({"profile":{"type":"sharp","lambda":"big"}})")), ConfigError);
    EXPECT_EQ(measure_from_json(json::parse(R"({"profile":{"type":"sharp","lambda":1}})")).dimension(), 3);
}
