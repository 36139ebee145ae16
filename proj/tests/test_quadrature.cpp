#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pfwcl/quadrature.hpp"

using namespace pfwcl;

TEST(Quadrature, PolynomialIsExact) {
    auto r = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
    EXPECT_NEAR(r.value, 9.0 - 3.0 + 3.0, 1e-13);
}

TEST(Quadrature, SquareRootSingularityConverges) {
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
    EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, HalfLineLorentzian) {
    auto r = integrate_half_line([](double t) { return 1.0 / (1.0 + t * t); }, 1.0);
    EXPECT_NEAR(r.value, std::numbers::pi / 2, 1e-13);
    auto s = integrate_half_line([](double t) { return 1.0 / (1e4 + t * t); }, 100.0);
    EXPECT_NEAR(s.value, std::numbers::pi / 200, 1e-15);
}

TEST(Quadrature, TailOfExponential) {
    auto r = integrate_tail([](double x) { return std::exp(-x); }, 2.0);
    EXPECT_NEAR(r.value, std::exp(-2.0), 1e-14);
}

TEST(Quadrature, PiecesAddUp) {
    auto f = [](double x) { return std::abs(x - 0.3); };
    const std::vector<double> breaks{0.0, 0.3, 1.0};
    EXPECT_NEAR(integrate_pieces(f, breaks).value, 0.5 * 0.09 + 0.5 * 0.49, 1e-15);
}

TEST(Quadrature, DivergentIntegralFailsLoudly) {
    QuadOptions opt;
    opt.max_panels = 200;
    EXPECT_THROW(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opt, "probe"), NumericalError);
    try {
        integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opt, "probe");
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.operation(), "probe");
        EXPECT_GT(e.residual(), 0.0);
    }
}
