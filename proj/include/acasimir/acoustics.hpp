#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace acasimir {

struct Bandwidth {
    double omega1 = 9e7;  // rad/s
    double omega2 = 1e8;
};

inline void validate(const Bandwidth& b) {
    if (!std::isfinite(b.omega1) || !std::isfinite(b.omega2) || !(b.omega1 > 0.0) ||
        !(b.omega2 > b.omega1))
        throw InvalidArgument("Bandwidth requires 0 < omega1 < omega2, both finite");
}

struct AcousticEnvironment {
    double c = 340.0;        // sound speed, m/s
    double intensity = 1e-4; // spectral intensity I_omega, W s^-1 m^-2
    double r1 = 0.8944271909999159;  // sqrt(0.8): default plate pair reflects r1*r2 = 0.8
    double r2 = 0.8944271909999159;
};

inline void validate(const AcousticEnvironment& env) {
    if (!std::isfinite(env.c) || !(env.c > 0.0))
        throw InvalidArgument("AcousticEnvironment.c must be positive");
    if (!std::isfinite(env.intensity) || env.intensity < 0.0)
        throw InvalidArgument("AcousticEnvironment.intensity must be nonnegative");
    if (!std::isfinite(env.r1) || env.r1 < 0.0 || env.r1 >= 1.0)
        throw InvalidArgument("AcousticEnvironment.r1 must lie in [0, 1)");
    if (!std::isfinite(env.r2) || env.r2 < 0.0 || env.r2 >= 1.0)
        throw InvalidArgument("AcousticEnvironment.r2 must lie in [0, 1)");
}

// Wavevector decomposition of one acoustic mode: k_z normal to the plates,
// Q in-plane, k = |(k_z, Q)| tied to the frequency by k = omega/c.
struct ModeCoordinates {
    double k_z = 0.0;
    double Q = 0.0;
    double k() const { return std::sqrt(k_z * k_z + Q * Q); }
};

inline void validate(const ModeCoordinates& m) {
    if (!std::isfinite(m.k_z) || m.k_z < 0.0 || !std::isfinite(m.Q) || m.Q < 0.0)
        throw InvalidArgument("ModeCoordinates requires k_z >= 0 and Q >= 0");
}

// Which wavevector set the band [omega1, omega2] selects. `printed` keeps
// k_z >= omega1/c; `annulus` lets k_z start at 0 and enforces the band purely
// through the Q limits.
enum class DomainMode { printed, annulus };

struct PressureProfile {
    std::vector<double> gaps;       // separations L, m; strictly increasing
    std::vector<double> pressures;  // P(L), Pa
    AcousticEnvironment env;
    Bandwidth band;
    Tolerance tol;
    DomainMode mode = DomainMode::printed;
};

inline void validate(const PressureProfile& p) {
    if (p.gaps.empty() || p.gaps.size() != p.pressures.size())
        throw InvalidArgument("PressureProfile requires equal-length nonempty gaps and pressures");
    for (std::size_t i = 0; i < p.gaps.size(); ++i) {
        if (!std::isfinite(p.gaps[i]) || !(p.gaps[i] > 0.0))
            throw InvalidArgument("PressureProfile gaps must be positive and finite");
        if (i > 0 && !(p.gaps[i] > p.gaps[i - 1]))
            throw InvalidArgument("PressureProfile gaps must be strictly increasing");
    }
    validate(p.env);
    validate(p.band);
    validate(p.tol);
}

// Re(1/(xi - 1)) for xi = (r^2 exp(2 i theta))^-1, in closed form:
// (rho cos2theta - rho^2) / (1 - 2 rho cos2theta + rho^2) with rho = r_product^2.
// Equals the summed standing-wave series sum_{n>=1} rho^n cos(2 n theta).
inline double reflection_factor(double r_product, double theta) {
    if (!std::isfinite(r_product) || r_product < 0.0 || r_product >= 1.0)
        throw InvalidArgument("reflection_factor: r_product must lie in [0, 1)");
    if (!std::isfinite(theta)) throw InvalidArgument("reflection_factor: theta must be finite");
    const double rho = r_product * r_product;
    const double c2 = std::cos(2.0 * theta);
    return (rho * c2 - rho * rho) / (1.0 - 2.0 * rho * c2 + rho * rho);
}

namespace detail {

// k_z grid points at multiples of pi/(2L): one per quarter phase period of
// reflection_factor's cos(2 k_z L), so adaptivity never straddles a full
// oscillation with a single starting panel.
inline std::vector<double> phase_breakpoints(const Interval& kz, double L,
                                             std::uint64_t max_points) {
    const double step = std::numbers::pi / (2.0 * L);
    std::vector<double> pts;
    for (double m = std::floor(kz.lo / step) + 1.0; m * step < kz.hi; m += 1.0) {
        const double x = m * step;
        if (x > kz.lo) pts.push_back(x);
        if (pts.size() >= max_points) break;
    }
    return pts;
}

[[noreturn]] inline void rethrow_for_gap(const std::exception_ptr& failure, std::size_t index,
                                         double L) {
    const std::string tag = "gap " + std::to_string(index) + " (L = " + std::to_string(L) + " m)";
    try {
        std::rethrow_exception(failure);
    } catch (const BudgetExhausted& e) {
        throw BudgetExhausted(e.level + " at " + tag, e.estimate, e.error_bound);
    } catch (const NonFiniteValue& e) {
        throw NonFiniteValue(tag, e.abscissa);
    } catch (const InvalidGeometry& e) {
        throw InvalidGeometry(tag + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(tag + ": " + e.what());
    } catch (...) {
        throw;
    }
}

}  // namespace detail

// Band-limited acoustic Casimir pressure between parallel plates:
//   P = -(I_omega/pi) int dk_z int dQ (k_z^2 Q / k^4) Re[1/(xi - 1)]
// over the wavevector set selected by `mode`. Negative = attractive,
// positive = repulsive.
inline QuadResult acp_pressure_full(double L, const Bandwidth& band,
                                    const AcousticEnvironment& env, const Tolerance& tol = {},
                                    DomainMode mode = DomainMode::printed) {
    validate(band);
    validate(env);
    validate(tol);
    if (!std::isfinite(L) || !(L > 0.0))
        throw InvalidGeometry("acp_pressure: L must be positive");

    const double r_product = env.r1 * env.r2;
    if (env.intensity == 0.0 || r_product == 0.0) return {0.0, 0.0, 0};

    const double k1 = band.omega1 / env.c;
    const double k2 = band.omega2 / env.c;
    const Interval outer{mode == DomainMode::printed ? k1 : 0.0, k2};
    const double prefactor = -env.intensity / std::numbers::pi;

    auto integrand = [=](double k_z, double Q) {
        const ModeCoordinates m{k_z, Q};
        const double kk = m.k_z * m.k_z + m.Q * m.Q;
        return prefactor * m.k_z * m.k_z * m.Q / (kk * kk) *
               reflection_factor(r_product, m.k_z * L);
    };
    auto inner_of = [=](double k_z) {
        return Interval{std::sqrt(std::max(0.0, k1 * k1 - k_z * k_z)),
                        std::sqrt(std::max(0.0, k2 * k2 - k_z * k_z))};
    };
    const std::vector<double> seams = detail::phase_breakpoints(outer, L, tol.max_evals / 15 + 2);
    return integrate_2d_full(integrand, outer, inner_of, tol, seams);
}

inline double acp_pressure(double L, const Bandwidth& band, const AcousticEnvironment& env,
                           const Tolerance& tol = {}, DomainMode mode = DomainMode::printed) {
    return acp_pressure_full(L, band, env, tol, mode).value;
}

struct SeriesResult {
    double value = 0.0;
    double remainder_bound = 0.0;
    int terms_used = 0;
};

// Independent evaluation of the same pressure: expand the reflection factor
// as sum rho^n cos(2 n k_z L), integrate each term in closed form over the
// printed domain (the Q integral collapses to (1 - k_z^2/k2^2)/2), and sum
// until the geometric remainder bound drops below tol or n_terms is reached.
inline SeriesResult acp_pressure_series_full(double L, const Bandwidth& band,
                                             const AcousticEnvironment& env, int n_terms,
                                             const Tolerance& tol = {}) {
    if (std::isfinite(env.r1) && std::isfinite(env.r2) && env.r1 * env.r2 >= 1.0)
        throw SeriesDivergence("acp_pressure_series: requires r1*r2 < 1");
    validate(band);
    validate(env);
    validate(tol);
    if (!std::isfinite(L) || !(L > 0.0))
        throw InvalidGeometry("acp_pressure_series: L must be positive");
    if (n_terms < 1) throw InvalidArgument("acp_pressure_series: n_terms must be at least 1");

    const double rho = (env.r1 * env.r2) * (env.r1 * env.r2);
    if (env.intensity == 0.0 || rho == 0.0) return {0.0, 0.0, 0};

    const double k1 = band.omega1 / env.c;
    const double k2 = band.omega2 / env.c;
    const double pref = env.intensity / (2.0 * std::numbers::pi);
    // integral of the Q-reduced weight (1 - k^2/k2^2) over [k1, k2]
    const double weight_mass = (k2 - k1) - (k2 * k2 * k2 - k1 * k1 * k1) / (3.0 * k2 * k2);

    auto antiderivative = [k2](double a, double k) {
        // of (1 - k^2/k2^2) cos(a k)
        const double s = std::sin(a * k);
        const double c = std::cos(a * k);
        return s / a - (k * k * s / a + 2.0 * k * c / (a * a) - 2.0 * s / (a * a * a)) / (k2 * k2);
    };

    SeriesResult out;
    double sum = 0.0;
    double rho_n = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
        rho_n *= rho;
        const double a = 2.0 * n * L;
        sum += rho_n * (antiderivative(a, k2) - antiderivative(a, k1));
        out.terms_used = n;
        out.value = -pref * sum;
        out.remainder_bound = pref * rho_n * rho / (1.0 - rho) * weight_mass;
        if (out.remainder_bound <= std::max(tol.abs, tol.rel * std::abs(out.value))) break;
    }
    return out;
}

inline double acp_pressure_series(double L, const Bandwidth& band, const AcousticEnvironment& env,
                                  int n_terms, const Tolerance& tol = {}) {
    return acp_pressure_series_full(L, band, env, n_terms, tol).value;
}

// Infinite-bandwidth perfect-reflector limit: P0 = -pi I_omega / (4 L).
inline double ideal_pressure(double L, double intensity) {
    if (!std::isfinite(L) || !(L > 0.0))
        throw InvalidGeometry("ideal_pressure: L must be positive");
    if (!std::isfinite(intensity) || intensity < 0.0)
        throw InvalidArgument("ideal_pressure: intensity must be nonnegative");
    return -std::numbers::pi * intensity / (4.0 * L);
}

// Parallel-plate electrostatic pressure magnitude eps0 V^2 / (2 L^2).
inline double electrostatic_pressure(double L, double V) {
    if (!std::isfinite(L) || !(L > 0.0))
        throw InvalidGeometry("electrostatic_pressure: L must be positive");
    if (!std::isfinite(V)) throw InvalidArgument("electrostatic_pressure: V must be finite");
    return epsilon0 * V * V / (2.0 * L * L);
}

// Separations n pi c / omega1 (integer half-wavelength counts of the band's
// lower edge) where the pressure is expected to turn repulsive.
inline std::vector<double> repulsive_peak_locations(const Bandwidth& band, double c, int n_max) {
    validate(band);
    if (!std::isfinite(c) || !(c > 0.0))
        throw InvalidArgument("repulsive_peak_locations: c must be positive");
    if (n_max < 1) throw InvalidArgument("repulsive_peak_locations: n_max must be at least 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        out.push_back(static_cast<double>(n) * std::numbers::pi * c / band.omega1);
    return out;
}

// Inverse of repulsive_peak_locations: choose the band whose n-th peak lands
// at L_target, with omega2 = omega1 (1 + rel_width).
inline Bandwidth design_bandwidth(double L_target, int n, double c, double rel_width) {
    if (!std::isfinite(L_target) || !(L_target > 0.0))
        throw InvalidGeometry("design_bandwidth: L_target must be positive");
    if (n < 1) throw InvalidArgument("design_bandwidth: n must be at least 1");
    if (!std::isfinite(c) || !(c > 0.0))
        throw InvalidArgument("design_bandwidth: c must be positive");
    if (!std::isfinite(rel_width) || !(rel_width > 0.0) || !(rel_width < 1.0))
        throw InvalidArgument("design_bandwidth: rel_width must lie in (0, 1)");
    const double omega1 = static_cast<double>(n) * std::numbers::pi * c / L_target;
    return Bandwidth{omega1, omega1 * (1.0 + rel_width)};
}

struct ProfileResult {
    PressureProfile profile;
    std::uint64_t evaluations = 0;
    double max_error_bound = 0.0;
};

// Evaluates acp_pressure over a strictly increasing gap list. Gaps are
// distributed over up to max_workers threads (0 = hardware default); results
// are assembled by input index, so the output is identical for any worker
// count. The first failing gap (by index) is reported.
inline ProfileResult pressure_profile_full(std::vector<double> gaps, const Bandwidth& band,
                                           const AcousticEnvironment& env,
                                           const Tolerance& tol = {},
                                           DomainMode mode = DomainMode::printed,
                                           unsigned max_workers = 0) {
    validate(band);
    validate(env);
    validate(tol);
    if (gaps.empty()) throw InvalidArgument("pressure_profile: gaps must be nonempty");
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (!std::isfinite(gaps[i]) || !(gaps[i] > 0.0))
            throw InvalidArgument("pressure_profile: gaps must be positive and finite");
        if (i > 0 && !(gaps[i] > gaps[i - 1]))
            throw InvalidArgument("pressure_profile: gaps must be strictly increasing");
    }

    const std::size_t n = gaps.size();
    std::vector<double> pressures(n, 0.0);
    std::vector<double> bounds(n, 0.0);
    std::vector<std::uint64_t> evals(n, 0);
    std::vector<std::exception_ptr> failures(n);

    auto run_one = [&](std::size_t i) {
        try {
            const QuadResult q = acp_pressure_full(gaps[i], band, env, tol, mode);
            pressures[i] = q.value;
            bounds[i] = q.error_bound;
            evals[i] = q.evaluations;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };

    unsigned hardware = std::thread::hardware_concurrency();
    if (hardware == 0) hardware = 1;
    const unsigned requested = (max_workers == 0) ? hardware : max_workers;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(requested, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
            });
        for (auto& worker : pool) worker.join();
    }

    for (std::size_t i = 0; i < n; ++i)
        if (failures[i]) detail::rethrow_for_gap(failures[i], i, gaps[i]);

    ProfileResult out;
    out.profile = PressureProfile{std::move(gaps), std::move(pressures), env, band, tol, mode};
    for (std::size_t i = 0; i < n; ++i) {
        out.evaluations += evals[i];
        out.max_error_bound = std::max(out.max_error_bound, bounds[i]);
    }
    return out;
}

inline PressureProfile pressure_profile(std::vector<double> gaps, const Bandwidth& band,
                                        const AcousticEnvironment& env, const Tolerance& tol = {},
                                        DomainMode mode = DomainMode::printed,
                                        unsigned max_workers = 0) {
    return pressure_profile_full(std::move(gaps), band, env, tol, mode, max_workers).profile;
}

struct RefinementResult {
    std::vector<double> locations;
    std::uint64_t evaluations = 0;
    double max_error_bound = 0.0;
};

// Zero crossings of P(L): each adjacent sample pair with opposite signs is
// refined by find_root against the profile's own band/environment/mode.
inline RefinementResult sign_changes_full(const PressureProfile& profile, const Tolerance& tol) {
    validate(profile);
    validate(tol);
    RefinementResult out;
    auto pressure_at = [&](double L) {
        const QuadResult q = acp_pressure_full(L, profile.band, profile.env, tol, profile.mode);
        out.evaluations += q.evaluations;
        out.max_error_bound = std::max(out.max_error_bound, q.error_bound);
        return q.value;
    };
    for (std::size_t i = 0; i + 1 < profile.gaps.size(); ++i) {
        if (profile.pressures[i] * profile.pressures[i + 1] < 0.0)
            out.locations.push_back(
                find_root(pressure_at, Interval{profile.gaps[i], profile.gaps[i + 1]}, tol));
    }
    return out;
}

inline std::vector<double> sign_changes(const PressureProfile& profile, const Tolerance& tol) {
    return sign_changes_full(profile, tol).locations;
}

// Interior local maxima of |P(L)|: discrete scan of the profile, then
// find_max on |P| over the bracketing grid cells.
inline RefinementResult extremum_locations_full(const PressureProfile& profile,
                                                const Tolerance& tol) {
    validate(profile);
    validate(tol);
    RefinementResult out;
    auto magnitude_at = [&](double L) {
        const QuadResult q = acp_pressure_full(L, profile.band, profile.env, tol, profile.mode);
        out.evaluations += q.evaluations;
        out.max_error_bound = std::max(out.max_error_bound, q.error_bound);
        return std::abs(q.value);
    };
    const auto& g = profile.gaps;
    const auto& p = profile.pressures;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double left = std::abs(p[i - 1]);
        const double here = std::abs(p[i]);
        const double right = std::abs(p[i + 1]);
        if (here >= left && here >= right && (here > left || here > right)) {
            const auto [x, fx] = find_max(magnitude_at, Interval{g[i - 1], g[i + 1]}, tol);
            out.locations.push_back(x);
        }
    }
    return out;
}

inline std::vector<double> extremum_locations(const PressureProfile& profile,
                                              const Tolerance& tol) {
    return extremum_locations_full(profile, tol).locations;
}

}  // namespace acasimir
