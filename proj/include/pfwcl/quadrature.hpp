// quadrature.hpp: globally adaptive Gauss-Kronrod (21-point) integration on
// finite intervals, plus the two interval maps used throughout: t = c·tan(θ)
// for half-lines of an even spectral variable and u = 1/r for radial tails.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pfwcl/errors.hpp"

namespace pfwcl {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        abs_error += o.abs_error;
        return *this;
    }
};

inline QuadResult operator*(double s, QuadResult q) {
    return {s * q.value, std::abs(s) * q.abs_error};
}

struct QuadOptions {
    double rel_tol = 1e-11;
    double abs_tol = 0.0;
    /// Hard cap on the number of panels in one adaptive run.
    std::size_t max_panels = 4000;
    /// Accepted error may exceed the target by this factor before the call fails.
    double failure_factor = 1e3;
};

namespace detail {

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

/// 21-point Kronrod rule with its embedded 10-point Gauss rule on [a, b].
template <class F>
Panel gauss_kronrod_21(F& f, double a, double b, double& l1) {
    const auto& xk = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = wk[0] * f0;
    double g = 0.0;
    double abs_sum = wk[0] * std::abs(f0);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double dx = half * xk[i];
        const double fl = f(mid - dx);
        const double fr = f(mid + dx);
        k += wk[i] * (fl + fr);
        abs_sum += wk[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 1) g += wg[i / 2] * (fl + fr);
    }
    l1 = half * abs_sum;
    const double err = std::max(half * std::abs(k - g), 50.0 * std::numeric_limits<double>::epsilon() * l1);
    return {a, b, half * k, err};
}

}  // namespace detail

/// ∫_a^b f by globally adaptive bisection of the worst panel.
/// Throws NumericalError when the panel cap is hit far from the target.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     const char* operation = "integrate") {
    if (!(b > a)) return {};
    std::priority_queue<detail::Panel> heap;
    double l1 = 0.0;
    double l1_total = 0.0;
    heap.push(detail::gauss_kronrod_21(f, a, b, l1));
    l1_total = l1;
    double value = heap.top().value;
    double error = heap.top().error;
    auto target = [&] {
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1_total;
        return std::max({opt.abs_tol, opt.rel_tol * std::abs(value), floor});
    };
    while (error > target() && heap.size() < opt.max_panels) {
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        double l1a = 0.0;
        double l1b = 0.0;
        const detail::Panel left = detail::gauss_kronrod_21(f, worst.a, mid, l1a);
        const detail::Panel right = detail::gauss_kronrod_21(f, mid, worst.b, l1b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1_total += l1a + l1b;  // coarse panels stay counted; only used for the roundoff floor
        heap.push(left);
        heap.push(right);
    }
    // resum to shed accumulated update roundoff
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    if (!std::isfinite(value) || error > opt.failure_factor * target()) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge (estimate " << value
           << ", error " << error << ", target " << target() << ")";
        throw NumericalError(operation, os.str(), error);
    }
    return {value, error};
}

/// ∫_a^b f over consecutive break points (which must be increasing).
template <class F, class Range>
QuadResult integrate_pieces(F&& f, const Range& breaks, const QuadOptions& opt = {},
                            const char* operation = "integrate") {
    QuadResult total;
    auto it = std::begin(breaks);
    auto end = std::end(breaks);
    if (it == end) return total;
    double lo = *it;
    for (++it; it != end; ++it) {
        const double hi = *it;
        total += integrate(f, lo, hi, opt, operation);
        lo = hi;
    }
    return total;
}

/// ∫_0^∞ f(t) dt with t = scale·tan(θ).
template <class F>
QuadResult integrate_half_line(F&& f, double scale, const QuadOptions& opt = {},
                               const char* operation = "integrate") {
    auto g = [&](double theta) {
        const double c = std::cos(theta);
        const double t = scale * std::tan(theta);
        return f(t) * scale / (c * c);
    };
    // the quarter split keeps nodes dense on both ends of the map
    constexpr double q = std::numbers::pi / 4.0;
    QuadResult r = integrate(g, 0.0, q, opt, operation);
    r += integrate(g, q, 2.0 * q, opt, operation);
    return r;
}

/// ∫_a^∞ f(r) dr with u = 1/r, a > 0.
template <class F>
QuadResult integrate_tail(F&& f, double a, const QuadOptions& opt = {},
                          const char* operation = "integrate") {
    auto g = [&](double u) { return f(1.0 / u) / (u * u); };
    return integrate(g, 0.0, 1.0 / a, opt, operation);
}

}  // namespace pfwcl
