// formfactor.hpp: rotation-invariant form factors φ̂(k) = φ(|k|) with the
// massless dispersion ω(k) = |k|.
//
// Every downstream formula only sees the push-forward of the polarization-
// averaged coupling density to the frequency axis,
//
//     dμ(ω) = (d−1)/d · S_{d−1} · φ(ω)² ω^{d−1} dω        (continuum profiles)
//     dμ(ω) = Σ_j W_j δ(ω − ω_j)                          (point masses)
//
// with S_{d−1} = 2π^{d/2}/Γ(d/2). Point-mass weights carry the (d−1)/d factor
// already, so both cases share integrate_measure().

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfwcl/errors.hpp"
#include "pfwcl/quadrature.hpp"

namespace pfwcl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// φ = 1 on [0, Λ].
struct SharpCutoff {
    double lambda = 1.0;
};

/// φ(r) = exp(−r²/(2σ²)).
struct GaussianProfile {
    double sigma = 1.0;
};

struct Atom {
    double omega = 1.0;
    double weight = 0.0;
};

/// Discrete spectral measure; weights already include the polarization average.
struct PointMasses {
    std::vector<Atom> atoms;
};

/// Piecewise-linear φ on [r_0, r_last], zero outside.
struct Tabulated {
    std::vector<double> r;
    std::vector<double> phi;
};

using Profile = std::variant<SharpCutoff, GaussianProfile, PointMasses, Tabulated>;

/// Surface area of the unit sphere in ℝ^d.
inline double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

struct MomentReport {
    double m_plus1 = 0.0;
    double m_minus1 = 0.0;
    double m_minus2 = 0.0;
    double m_minus3 = 0.0;
    bool ir_regular = true;
    double delta_m = 0.0;
    double m_eff = 1.0;
};

struct AssumptionReport {
    bool sqrt_omega_phi_l2 = true;      // M₊₁ < ∞
    bool phi_over_sqrt_omega_l2 = true;  // M₋₁ < ∞
    bool phi_over_omega_l2 = true;       // M₋₂ < ∞
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

namespace detail {

inline void check_structure(int dimension, const Profile& profile) {
    if (dimension < 2) throw ConfigError("measure: dimension must be >= 2, got " + std::to_string(dimension));
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SharpCutoff>) {
                if (!positive(p.lambda)) throw ConfigError("measure: sharp cutoff lambda must be positive");
            } else if constexpr (std::is_same_v<T, GaussianProfile>) {
                if (!positive(p.sigma)) throw ConfigError("measure: gaussian sigma must be positive");
            } else if constexpr (std::is_same_v<T, PointMasses>) {
                for (const Atom& a : p.atoms) {
                    if (!positive(a.omega) || !positive(a.weight))
                        throw ConfigError("measure: atom frequencies and weights must be strictly positive");
                }
            } else {
                if (p.r.size() != p.phi.size() || p.r.size() < 2)
                    throw ConfigError("measure: tabulated profile needs >= 2 matching (r, phi) pairs");
                if (!(p.r.front() >= 0.0)) throw ConfigError("measure: tabulated radii must be nonnegative");
                for (std::size_t i = 1; i < p.r.size(); ++i) {
                    if (!(p.r[i] > p.r[i - 1]))
                        throw ConfigError("measure: tabulated radii must be strictly increasing");
                }
                for (double v : p.phi) {
                    if (!std::isfinite(v)) throw ConfigError("measure: tabulated phi must be finite");
                }
            }
        },
        profile);
}

/// Whether φ is nonzero at the origin (decides small-r divergence of moments).
inline bool nonzero_at_origin(const Profile& profile) {
    if (const auto* t = std::get_if<Tabulated>(&profile)) return t->r.front() == 0.0 && t->phi.front() != 0.0;
    return std::holds_alternative<SharpCutoff>(profile) || std::holds_alternative<GaussianProfile>(profile);
}

inline double profile_value(const Profile& profile, double r) {
    if (const auto* s = std::get_if<SharpCutoff>(&profile)) return r <= s->lambda ? 1.0 : 0.0;
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) return std::exp(-r * r / (2.0 * g->sigma * g->sigma));
    if (const auto* t = std::get_if<Tabulated>(&profile)) {
        if (r < t->r.front() || r > t->r.back()) return 0.0;
        auto it = std::upper_bound(t->r.begin(), t->r.end(), r);
        if (it == t->r.end()) return t->phi.back();
        const std::size_t i = static_cast<std::size_t>(it - t->r.begin());
        const double x = (r - t->r[i - 1]) / (t->r[i] - t->r[i - 1]);
        return (1.0 - x) * t->phi[i - 1] + x * t->phi[i];
    }
    return 0.0;
}

/// Natural break points of the continuum support; the last entry may be +∞.
inline std::vector<double> support_breaks(const Profile& profile) {
    if (const auto* s = std::get_if<SharpCutoff>(&profile)) return {0.0, s->lambda};
    if (const auto* g = std::get_if<GaussianProfile>(&profile))
        return {0.0, 0.5 * g->sigma, g->sigma, 2.0 * g->sigma, 4.0 * g->sigma, kInfinity};
    if (const auto* t = std::get_if<Tabulated>(&profile)) return t->r;
    return {};
}

/// ∫ f(r) dr over the continuum support, refined at the interior hints.
template <class F>
QuadResult integrate_radial(const Profile& profile, F&& f, const QuadOptions& opt,
                            const std::vector<double>& hints, const char* op) {
    std::vector<double> breaks = support_breaks(profile);
    if (breaks.empty()) return {};
    const bool open_tail = std::isinf(breaks.back());
    const double hi = open_tail ? breaks[breaks.size() - 2] : breaks.back();
    for (double h : hints) {
        if (h > breaks.front() && h < hi) breaks.insert(std::upper_bound(breaks.begin(), breaks.end() - (open_tail ? 1 : 0), h), h);
    }
    QuadResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (std::isinf(b))
            total += integrate_tail(f, a, opt, op);
        else if (b > a)
            total += integrate(f, a, b, opt, op);
    }
    return total;
}

/// Radial moment without polarization factor: S_{d−1}∫φ²r^{s+d−1}dr, or Σ W ω^s.
inline double raw_moment(int dimension, const Profile& profile, int s) {
    if (const auto* pm = std::get_if<PointMasses>(&profile)) {
        double m = 0.0;
        for (const Atom& a : pm->atoms) m += a.weight * std::pow(a.omega, s);
        return m;
    }
    const int power = s + dimension - 1;
    if (power <= -1 && nonzero_at_origin(profile)) return kInfinity;
    auto f = [&](double r) {
        const double v = profile_value(profile, r);
        return v == 0.0 ? 0.0 : v * v * std::pow(r, power);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    return sphere_area(dimension) * integrate_radial(profile, f, opt, {}, "moment").value;
}

}  // namespace detail

/// Validated form factor. Construction enforces the structural invariants and the
/// finiteness of M₊₁, M₋₁, M₋₂.
class RadialMeasure {
public:
    RadialMeasure(int dimension, Profile profile) : dimension_(dimension), profile_(std::move(profile)) {
        detail::check_structure(dimension_, profile_);
        for (auto [s, label] : {std::pair{1, "sqrt(omega)*phi"}, std::pair{-1, "phi/sqrt(omega)"},
                                std::pair{-2, "phi/omega"}}) {
            if (std::isinf(detail::raw_moment(dimension_, profile_, s)))
                throw AssumptionError(std::string("Assumption a2 violated: ") + label + " not square-integrable");
        }
    }

    /// The zero measure (no coupling).
    static RadialMeasure null(int dimension = 3) { return RadialMeasure(dimension, PointMasses{}); }

    static RadialMeasure atoms(std::vector<Atom> atoms, int dimension = 3) {
        return RadialMeasure(dimension, PointMasses{std::move(atoms)});
    }

    int dimension() const { return dimension_; }
    const Profile& profile() const { return profile_; }
    bool is_discrete() const { return std::holds_alternative<PointMasses>(profile_); }

    double polarization_factor() const {
        return is_discrete() ? 1.0 : static_cast<double>(dimension_ - 1) / dimension_;
    }

    /// Number of identical field components entering the ground-state energy.
    /// Discrete measures model a single scalar component.
    double component_count() const { return is_discrete() ? 1.0 : static_cast<double>(dimension_); }

    bool is_null() const {
        if (const auto* pm = std::get_if<PointMasses>(&profile_)) return pm->atoms.empty();
        if (const auto* t = std::get_if<Tabulated>(&profile_))
            return std::all_of(t->phi.begin(), t->phi.end(), [](double v) { return v == 0.0; });
        return false;
    }

    /// A characteristic frequency, used to scale spectral-variable maps.
    double frequency_scale() const {
        if (const auto* s = std::get_if<SharpCutoff>(&profile_)) return s->lambda;
        if (const auto* g = std::get_if<GaussianProfile>(&profile_)) return g->sigma;
        if (const auto* pm = std::get_if<PointMasses>(&profile_)) {
            double w = 0.0;
            for (const Atom& a : pm->atoms) w = std::max(w, a.omega);
            return w > 0.0 ? w : 1.0;
        }
        const auto& t = std::get<Tabulated>(profile_);
        return t.r.back() > 0.0 ? t.r.back() : 1.0;
    }

    double phi(double r) const { return detail::profile_value(profile_, r); }

    /// Density of μ with respect to dω (continuum profiles only).
    double density(double omega) const {
        const double v = phi(omega);
        if (v == 0.0) return 0.0;
        return polarization_factor() * sphere_area(dimension_) * v * v * std::pow(omega, dimension_ - 1);
    }

    /// ∫ f(ω) dμ(ω). `hints` are frequencies where f varies quickly.
    template <class F>
    QuadResult integrate_measure(F&& f, const QuadOptions& opt = {}, const std::vector<double>& hints = {},
                                 const char* op = "integrate_measure") const {
        if (const auto* pm = std::get_if<PointMasses>(&profile_)) {
            QuadResult r;
            for (const Atom& a : pm->atoms) r.value += a.weight * f(a.omega);
            return r;
        }
        auto g = [&](double w) {
            const double dens = density(w);
            return dens == 0.0 ? 0.0 : dens * f(w);
        };
        return detail::integrate_radial(profile_, g, opt, hints, op);
    }

private:
    int dimension_;
    Profile profile_;
};

inline void check_moment_order(int s) {
    if (s != 1 && s != -1 && s != -2 && s != -3)
        throw std::invalid_argument("moment: order must be one of -3, -2, -1, +1; got " + std::to_string(s));
}

/// M_s = ∫|φ̂|²ω^s dk (continuum) or Σ W_j ω_j^s (atoms); +∞ when divergent.
inline double moment(const RadialMeasure& ff, int s) {
    check_moment_order(s);
    return detail::raw_moment(ff.dimension(), ff.profile(), s);
}

inline MomentReport moment_report(const RadialMeasure& ff) {
    MomentReport r;
    r.m_plus1 = moment(ff, 1);
    r.m_minus1 = moment(ff, -1);
    r.m_minus2 = moment(ff, -2);
    r.m_minus3 = moment(ff, -3);
    r.ir_regular = std::isfinite(r.m_minus3);
    r.delta_m = ff.polarization_factor() * r.m_minus2;
    r.m_eff = 1.0 + r.delta_m;
    return r;
}

/// Square-integrability checks on an unvalidated profile. Structural errors still throw.
inline AssumptionReport validate_assumptions(int dimension, const Profile& profile) {
    detail::check_structure(dimension, profile);
    AssumptionReport rep;
    rep.sqrt_omega_phi_l2 = std::isfinite(detail::raw_moment(dimension, profile, 1));
    rep.phi_over_sqrt_omega_l2 = std::isfinite(detail::raw_moment(dimension, profile, -1));
    rep.phi_over_omega_l2 = std::isfinite(detail::raw_moment(dimension, profile, -2));
    if (!rep.sqrt_omega_phi_l2) rep.failures.emplace_back("sqrt(omega)*phi not square-integrable");
    if (!rep.phi_over_sqrt_omega_l2) rep.failures.emplace_back("phi/sqrt(omega) not square-integrable");
    if (!rep.phi_over_omega_l2) rep.failures.emplace_back("phi/omega not square-integrable");
    return rep;
}

inline AssumptionReport validate_assumptions(const RadialMeasure& ff) {
    return validate_assumptions(ff.dimension(), ff.profile());
}

// JSON: {"dimension":3,"profile":{"type":"sharp","lambda":1.0}}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& item : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
}

}  // namespace detail

inline nlohmann::json profile_to_json(const Profile& profile) {
    using nlohmann::json;
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SharpCutoff>) {
                return {{"type", "sharp"}, {"lambda", p.lambda}};
            } else if constexpr (std::is_same_v<T, GaussianProfile>) {
                return {{"type", "gaussian"}, {"sigma", p.sigma}};
            } else if constexpr (std::is_same_v<T, PointMasses>) {
                json atoms = json::array();
                for (const Atom& a : p.atoms) atoms.push_back({{"omega", a.omega}, {"weight", a.weight}});
                return {{"type", "point_masses"}, {"atoms", atoms}};
            } else {
                return {{"type", "tabulated"}, {"r", p.r}, {"phi", p.phi}};
            }
        },
        profile);
}

inline Profile profile_from_json(const nlohmann::json& j) {
    const std::string where = "measure.profile";
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    const auto type = detail::require<std::string>(j, "type", where);
    if (type == "sharp") {
        detail::reject_unknown(j, {"type", "lambda"}, where);
        return SharpCutoff{detail::require<double>(j, "lambda", where)};
    }
    if (type == "gaussian") {
        detail::reject_unknown(j, {"type", "sigma"}, where);
        return GaussianProfile{detail::require<double>(j, "sigma", where)};
    }
    if (type == "point_masses") {
        detail::reject_unknown(j, {"type", "atoms"}, where);
        const auto& arr = j.at("atoms");
        if (!arr.is_array()) throw ConfigError(where + ".atoms: expected an array");
        PointMasses pm;
        for (const auto& a : arr) {
            detail::reject_unknown(a, {"omega", "weight"}, where + ".atoms[]");
            pm.atoms.push_back({detail::require<double>(a, "omega", where + ".atoms[]"),
                                detail::require<double>(a, "weight", where + ".atoms[]")});
        }
        return pm;
    }
    if (type == "tabulated") {
        detail::reject_unknown(j, {"type", "r", "phi"}, where);
        return Tabulated{detail::require<std::vector<double>>(j, "r", where),
                         detail::require<std::vector<double>>(j, "phi", where)};
    }
    throw ConfigError(where + ": unknown profile type '" + type + "'");
}

inline nlohmann::json to_json(const RadialMeasure& ff) {
    return {{"dimension", ff.dimension()}, {"profile", profile_to_json(ff.profile())}};
}

/// Parses the dimension and profile without the square-integrability check.
inline std::pair<int, Profile> parse_measure(const nlohmann::json& j) {
    detail::reject_unknown(j, {"dimension", "profile"}, "measure");
    const int d = j.contains("dimension") ? detail::require<int>(j, "dimension", "measure") : 3;
    if (!j.contains("profile")) throw ConfigError("measure: missing key 'profile'");
    return {d, profile_from_json(j.at("profile"))};
}

inline RadialMeasure measure_from_json(const nlohmann::json& j) {
    auto [d, profile] = parse_measure(j);
    return RadialMeasure(d, std::move(profile));
}

}  // namespace pfwcl
