#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "acoustics.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace acasimir {

struct LumpedDevice {
    double k_spring = 1.0;  // N/m
    double D = 60e-6;       // rest gap, m
    double A = 1e-8;        // plate area, m^2
};

inline void validate(const LumpedDevice& dev) {
    if (!std::isfinite(dev.k_spring) || !(dev.k_spring > 0.0))
        throw InvalidArgument("LumpedDevice.k_spring must be positive");
    if (!std::isfinite(dev.D) || !(dev.D > 0.0))
        throw InvalidArgument("LumpedDevice.D must be positive");
    if (!std::isfinite(dev.A) || !(dev.A > 0.0))
        throw InvalidArgument("LumpedDevice.A must be positive");
}

struct Actuation {
    double V = 0.0;  // volts
    AcousticEnvironment env;
    Bandwidth band;
};

inline void validate(const Actuation& act) {
    if (!std::isfinite(act.V) || act.V < 0.0)
        throw InvalidArgument("Actuation.V must be nonnegative");
    validate(act.env);
    validate(act.band);
}

struct DimensionlessState {
    double L_tilde = 1.0;   // gap fraction L/D
    double lambda1 = 0.0;   // electrostatic/elastic ratio
    double lambda2 = 0.0;   // acoustic/elastic ratio
    double f_value = 0.0;   // dimensionless acoustic shape term at L_tilde
};

inline void validate(const DimensionlessState& s) {
    if (!std::isfinite(s.L_tilde) || !(s.L_tilde > 0.0) || !(s.L_tilde <= 1.0))
        throw InvalidArgument("DimensionlessState.L_tilde must lie in (0, 1]");
    if (!std::isfinite(s.lambda1) || s.lambda1 < 0.0)
        throw InvalidArgument("DimensionlessState.lambda1 must be nonnegative");
    if (!std::isfinite(s.lambda2) || s.lambda2 < 0.0)
        throw InvalidArgument("DimensionlessState.lambda2 must be nonnegative");
}

struct PullInResult {
    double L_in = 0.0;          // pull-in gap, m
    double V_in = 0.0;          // classic pull-in voltage, V
    double V_star = 0.0;        // acoustically modified pull-in voltage, V
    double V_star_closed = 0.0; // closed-form route to V_star
    double L_tilde_star = 0.0;  // argmax of the bifurcation curve
    double lambda1_star = 0.0;  // maximum of the bifurcation curve
    bool argmax_shifted = false;
};

struct EquilibriumPoint {
    double L = 0.0;
    bool stable = false;
};

// Electrostatic/elastic load ratio: eps0 A V^2 / (2 k D^3).
inline double lambda1(const LumpedDevice& dev, double V) {
    validate(dev);
    if (!std::isfinite(V) || V < 0.0) throw InvalidArgument("lambda1: V must be nonnegative");
    return epsilon0 * dev.A * V * V / (2.0 * dev.k_spring * dev.D * dev.D * dev.D);
}

// Acoustic/elastic load ratio: I_omega A / (k D^2).
inline double lambda2(const LumpedDevice& dev, const AcousticEnvironment& env) {
    validate(dev);
    validate(env);
    return env.intensity * dev.A / (dev.k_spring * dev.D * dev.D);
}

// Dimensionless acoustic shape term: f(L~) = L~^2 (D / I_omega) P(L~ D).
// The pressure is evaluated at unit intensity, so the result is independent
// of env.intensity (including zero) and lambda2 * f restores the exact
// dimensional acoustic force term A L~^2 P / (k D).
inline QuadResult f_dimensionless_full(double L_tilde, const LumpedDevice& dev,
                                       const AcousticEnvironment& env, const Bandwidth& band,
                                       const Tolerance& tol = {},
                                       DomainMode mode = DomainMode::printed) {
    validate(dev);
    validate(env);
    validate(band);
    validate(tol);
    if (!std::isfinite(L_tilde) || !(L_tilde > 0.0) || !(L_tilde <= 1.0))
        throw InvalidArgument("f_dimensionless: L_tilde must lie in (0, 1]");
    AcousticEnvironment unit = env;
    unit.intensity = 1.0;
    QuadResult q = acp_pressure_full(L_tilde * dev.D, band, unit, tol, mode);
    const double scale = L_tilde * L_tilde * dev.D;
    q.value *= scale;
    q.error_bound *= scale;
    return q;
}

inline double f_dimensionless(double L_tilde, const LumpedDevice& dev,
                              const AcousticEnvironment& env, const Bandwidth& band,
                              const Tolerance& tol = {}, DomainMode mode = DomainMode::printed) {
    return f_dimensionless_full(L_tilde, dev, env, band, tol, mode).value;
}

// Gap-closing force on the movable plate (positive closes the gap):
// spring restoring toward D, electrostatic attraction, and the plate-area
// acoustic force -A P (attractive pressure P < 0 closes, repulsive opposes).
inline double net_force(double L, const LumpedDevice& dev, const Actuation& act,
                        const Tolerance& tol = {}, DomainMode mode = DomainMode::printed) {
    validate(dev);
    validate(act);
    validate(tol);
    if (!std::isfinite(L) || !(L > 0.0)) throw InvalidGeometry("net_force: L must be positive");
    const double spring = -dev.k_spring * (dev.D - L);
    const double electrostatic = epsilon0 * act.V * act.V * dev.A / (2.0 * L * L);
    const double acoustic = -dev.A * acp_pressure(L, act.band, act.env, tol, mode);
    return spring + electrostatic + acoustic;
}

// Convenience assembly of the dimensionless description at separation L.
inline DimensionlessState dimensionless_state(double L, const LumpedDevice& dev,
                                              const Actuation& act, const Tolerance& tol = {},
                                              DomainMode mode = DomainMode::printed) {
    validate(dev);
    validate(act);
    if (!std::isfinite(L) || !(L > 0.0) || !(L <= dev.D))
        throw InvalidArgument("dimensionless_state: L must lie in (0, D]");
    const double L_tilde = L / dev.D;
    return DimensionlessState{L_tilde, lambda1(dev, act.V), lambda2(dev, act.env),
                              f_dimensionless(L_tilde, dev, act.env, act.band, tol, mode)};
}

// Equilibrium locus lambda1(L~) = L~^2 (1 - L~) + lambda2 f(L~), evaluated
// pointwise over the grid with a caller-supplied shape function.
template <class F>
std::vector<double> bifurcation_curve(std::span<const double> L_tilde_grid, double lambda2_value,
                                      F&& f) {
    if (!std::isfinite(lambda2_value) || lambda2_value < 0.0)
        throw InvalidArgument("bifurcation_curve: lambda2 must be nonnegative");
    std::vector<double> out;
    out.reserve(L_tilde_grid.size());
    for (const double t : L_tilde_grid) {
        if (!std::isfinite(t) || !(t > 0.0) || !(t <= 1.0))
            throw InvalidArgument("bifurcation_curve: grid values must lie in (0, 1]");
        const double cubic = t * t * (1.0 - t);
        out.push_back(lambda2_value == 0.0 ? cubic : cubic + lambda2_value * f(t));
    }
    return out;
}

// Closed-form pull-in of the purely electrostatic device:
// V_in = sqrt(8 k D^3 / (27 eps0 A)), L_in = (2/3) D, lambda1* = 4/27.
inline PullInResult pull_in_classic(const LumpedDevice& dev) {
    validate(dev);
    PullInResult out;
    out.V_in = std::sqrt(8.0 * dev.k_spring * dev.D * dev.D * dev.D / (27.0 * epsilon0 * dev.A));
    out.L_in = 2.0 * dev.D / 3.0;
    out.V_star = out.V_in;
    out.V_star_closed = out.V_in;
    out.L_tilde_star = 2.0 / 3.0;
    out.lambda1_star = 4.0 / 27.0;
    out.argmax_shifted = false;
    return out;
}

// Pull-in from an arbitrary shape function and bare lambda2: maximizes the
// bifurcation curve over (0.01, 1], converts the peak to voltages, and also
// evaluates the closed-form route V*_closed = V_in sqrt(1 + (27/4) lambda2 f(2/3)).
// lambda2 = 0 reduces to the classic closed form exactly.
template <class F>
PullInResult pull_in_shape(const LumpedDevice& dev, double lambda2_value, F&& f,
                           const Tolerance& tol = {}) {
    validate(dev);
    validate(tol);
    if (!std::isfinite(lambda2_value) || lambda2_value < 0.0)
        throw InvalidArgument("pull_in_shape: lambda2 must be nonnegative");
    PullInResult out = pull_in_classic(dev);
    if (lambda2_value == 0.0) return out;

    auto curve = [&](double t) { return t * t * (1.0 - t) + lambda2_value * f(t); };
    const auto [t_star, peak] = find_max(curve, Interval{0.01, 1.0}, tol);
    if (!(peak > 0.0))
        throw NoEquilibrium("pull_in_shape: bifurcation curve has no positive maximum");
    const double f23 = f(2.0 / 3.0);
    out.V_star =
        std::sqrt(2.0 * dev.k_spring * dev.D * dev.D * dev.D * peak / (epsilon0 * dev.A));
    out.V_star_closed = out.V_in * std::sqrt(std::max(0.0, 1.0 + 6.75 * lambda2_value * f23));
    out.L_tilde_star = t_star;
    out.lambda1_star = peak;
    out.L_in = t_star * dev.D;
    out.argmax_shifted = std::abs(t_star - 2.0 / 3.0) > 1e-3;
    return out;
}

// Pull-in with the physical acoustic load lambda2(dev, env) and the shape
// function induced by the band.
inline PullInResult pull_in_acoustic(const LumpedDevice& dev, const AcousticEnvironment& env,
                                     const Bandwidth& band, const Tolerance& tol = {},
                                     DomainMode mode = DomainMode::printed) {
    validate(dev);
    validate(env);
    validate(band);
    validate(tol);
    auto f = [&](double t) { return f_dimensionless(t, dev, env, band, tol, mode); };
    return pull_in_shape(dev, lambda2(dev, env), f, tol);
}

// All force-balance roots on (0.01 D, D]: 1024-point sign scan, find_root on
// each sign change, exact grid zeros kept as roots. Stability follows the
// force-derivative sign at the root (positive d(net_force)/dL restores).
inline std::vector<EquilibriumPoint> equilibrium_gaps(const LumpedDevice& dev,
                                                      const Actuation& act,
                                                      const Tolerance& tol = {},
                                                      DomainMode mode = DomainMode::printed) {
    validate(dev);
    validate(act);
    validate(tol);
    auto force = [&](double L) { return net_force(L, dev, act, tol, mode); };

    constexpr int n = 1024;
    const double L_min = 0.01 * dev.D;
    const double step = (dev.D - L_min) / (n - 1);
    std::vector<double> xs(n);
    std::vector<double> fs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = (i == n - 1) ? dev.D : L_min + step * i;
        fs[i] = force(xs[i]);
    }

    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        if (fs[i] == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (i + 1 < n && fs[i] * fs[i + 1] < 0.0)
            roots.push_back(find_root(force, Interval{xs[i], xs[i + 1]}, tol));
    }
    if (roots.empty())
        throw NoEquilibrium("equilibrium_gaps: no force balance below the rest gap (above pull-in)");

    const double h = 1e-6 * dev.D;
    std::vector<EquilibriumPoint> out;
    out.reserve(roots.size());
    for (const double root : roots)
        out.push_back(EquilibriumPoint{root, derivative(force, root, h) > 0.0});
    return out;
}

}  // namespace acasimir
