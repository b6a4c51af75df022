#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "../acoustics.hpp"
#include "../mems.hpp"
#include "config.hpp"
#include "report.hpp"

namespace acasimir::cli {

namespace detail {

inline int peaks_up_to(double L_max, double omega1, double c) {
    const double n = std::floor(L_max * omega1 / (std::numbers::pi * c));
    return std::max(1, static_cast<int>(std::min(n, 64.0)));
}

struct QuadStats {
    std::uint64_t evaluations = 0;
    double max_error_bound = 0.0;

    void add(std::uint64_t evals, double bound) {
        evaluations += evals;
        max_error_bound = std::max(max_error_bound, bound);
    }
};

inline ordered_json to_json(const QuadStats& s) {
    return {{"evaluations", s.evaluations}, {"max_error_bound", s.max_error_bound}};
}

}  // namespace detail

// Fig. 3 / Fig. 4 style data: P(L) and the ideal-limit pressure over the
// configured sweep, plus refined sign changes and the predicted repulsive
// separations in the manifest.
inline void cmd_pressure_sweep(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    StageTimer timer;
    detail::QuadStats stats;
    std::vector<std::string> warnings;

    const auto profile_run = pressure_profile_full(sweep_gaps(cfg), band_of(cfg),
                                                   environment_of(cfg), cfg.tol, cfg.mode,
                                                   cfg.threads);
    const PressureProfile& profile = profile_run.profile;
    stats.add(profile_run.evaluations, profile_run.max_error_bound);
    timer.lap("sweep");

    const auto crossings = sign_changes_full(profile, cfg.tol);
    stats.add(crossings.evaluations, crossings.max_error_bound);
    const auto peaks = repulsive_peak_locations(
        band_of(cfg), cfg.c, detail::peaks_up_to(cfg.L_max, cfg.omega1, cfg.c));
    const ordered_json signs = sign_report(cfg, 3, stats.evaluations, stats.max_error_bound,
                                           warnings);
    timer.lap("analyze");

    CsvWriter csv(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    const std::vector<std::string> header = {"L_m", "P_Pa", "P_ideal_Pa"};
    csv.text_row(header);
    for (std::size_t i = 0; i < profile.gaps.size(); ++i) {
        const std::vector<double> row = {profile.gaps[i], profile.pressures[i],
                                         ideal_pressure(profile.gaps[i], cfg.intensity)};
        csv.value_row(row);
    }
    csv.finish();
    timer.lap("write");

    ordered_json m = manifest_skeleton("pressure-sweep", cfg);
    m["timings_ms"] = timer.finish();
    m["quadrature"] = detail::to_json(stats);
    m["sign_report"] = signs;
    m["warnings"] = warnings;
    m["predicted_peaks_m"] = peaks;
    m["sign_changes_m"] = crossings.locations;
    write_manifest(cfg, m);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Fig. 2 style comparison: ideal-limit acoustic pressure against the
// electrostatic pressure for each configured voltage.
inline void cmd_compare_electrostatic(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    StageTimer timer;
    detail::QuadStats stats;
    std::vector<std::string> warnings;

    const auto gaps = sweep_gaps(cfg);
    const ordered_json signs = sign_report(cfg, 3, stats.evaluations, stats.max_error_bound,
                                           warnings);
    timer.lap("evaluate");

    CsvWriter csv(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    std::vector<std::string> header = {"L_m", "P0_Pa"};
    for (std::size_t j = 0; j < cfg.voltages.size(); ++j)
        header.push_back("P_es_V" + std::to_string(j + 1) + "_Pa");
    csv.text_row(header);
    std::vector<double> row(2 + cfg.voltages.size());
    for (const double L : gaps) {
        row[0] = L;
        row[1] = ideal_pressure(L, cfg.intensity);
        for (std::size_t j = 0; j < cfg.voltages.size(); ++j)
            row[2 + j] = electrostatic_pressure(L, cfg.voltages[j]);
        csv.value_row(row);
    }
    csv.finish();
    timer.lap("write");

    ordered_json m = manifest_skeleton("compare-electrostatic", cfg);
    m["timings_ms"] = timer.finish();
    m["quadrature"] = detail::to_json(stats);
    m["sign_report"] = signs;
    m["warnings"] = warnings;
    write_manifest(cfg, m);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Fig. 5 style bifurcation diagram: one lambda1(L~) column per configured
// lambda2, all sharing the band-induced shape function.
inline void cmd_bifurcation(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    StageTimer timer;
    detail::QuadStats stats;
    std::vector<std::string> warnings;

    const LumpedDevice dev = device_of(cfg);
    const Bandwidth band = band_of(cfg);
    const AcousticEnvironment env = environment_of(cfg);

    const std::size_t n = static_cast<std::size_t>(cfg.n_points);
    std::vector<double> grid(n);
    const double t_lo = 0.01;
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = t_lo + (1.0 - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    grid.back() = 1.0;

    // shape values on the grid, reusing the sweep parallelism at unit intensity
    AcousticEnvironment unit = env;
    unit.intensity = 1.0;
    std::vector<double> shape_gaps(n);
    for (std::size_t i = 0; i < n; ++i) shape_gaps[i] = grid[i] * dev.D;
    const auto shape_run =
        pressure_profile_full(shape_gaps, band, unit, cfg.tol, cfg.mode, cfg.threads);
    stats.add(shape_run.evaluations, shape_run.max_error_bound);
    std::vector<double> shape(n);
    for (std::size_t i = 0; i < n; ++i)
        shape[i] = grid[i] * grid[i] * dev.D * shape_run.profile.pressures[i];

    const double dt = (1.0 - t_lo) / static_cast<double>(n - 1);
    auto shape_on_grid = [&](double t) {
        return shape[static_cast<std::size_t>(std::llround((t - t_lo) / dt))];
    };
    std::vector<std::vector<double>> columns;
    columns.reserve(cfg.lambda2_values.size());
    for (const double l2 : cfg.lambda2_values)
        columns.push_back(bifurcation_curve(grid, l2, shape_on_grid));
    timer.lap("curves");

    ordered_json curve_reports = ordered_json::array();
    for (const double l2 : cfg.lambda2_values) {
        PullInResult r{};
        if (l2 == 0.0) {
            r = pull_in_classic(dev);
        } else {
            auto f = [&](double t) {
                const QuadResult q = f_dimensionless_full(t, dev, env, band, cfg.tol, cfg.mode);
                stats.add(q.evaluations, q.error_bound);
                return q.value;
            };
            r = pull_in_shape(dev, l2, f, cfg.tol);
        }
        ordered_json entry;
        entry["lambda2"] = l2;
        entry["L_tilde_star"] = r.L_tilde_star;
        entry["lambda1_star"] = r.lambda1_star;
        entry["argmax_at_two_thirds"] = !r.argmax_shifted;
        curve_reports.push_back(entry);
    }
    const ordered_json signs = sign_report(cfg, 3, stats.evaluations, stats.max_error_bound,
                                           warnings);
    timer.lap("maxima");

    CsvWriter csv(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    std::vector<std::string> header = {"L_tilde"};
    for (const double l2 : cfg.lambda2_values) header.push_back("lambda1_" + format_short(l2));
    csv.text_row(header);
    std::vector<double> row(1 + columns.size());
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = grid[i];
        for (std::size_t jcol = 0; jcol < columns.size(); ++jcol) row[1 + jcol] = columns[jcol][i];
        csv.value_row(row);
    }
    csv.finish();
    timer.lap("write");

    ordered_json m = manifest_skeleton("bifurcation", cfg);
    m["timings_ms"] = timer.finish();
    m["quadrature"] = detail::to_json(stats);
    m["sign_report"] = signs;
    m["warnings"] = warnings;
    m["curves"] = curve_reports;
    write_manifest(cfg, m);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Pull-in analysis of the configured device in the configured acoustic field:
// classic closed form, maximizer route, and the closed-form acoustic
// correction, printed and recorded.
inline void cmd_pull_in(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    StageTimer timer;
    detail::QuadStats stats;
    std::vector<std::string> warnings;

    const LumpedDevice dev = device_of(cfg);
    const Bandwidth band = band_of(cfg);
    const AcousticEnvironment env = environment_of(cfg);
    const double l2 = lambda2(dev, env);
    auto f = [&](double t) {
        const QuadResult q = f_dimensionless_full(t, dev, env, band, cfg.tol, cfg.mode);
        stats.add(q.evaluations, q.error_bound);
        return q.value;
    };
    const PullInResult r = pull_in_shape(dev, l2, f, cfg.tol);
    const double f_at_L_in = f(2.0 / 3.0);
    const ordered_json signs = sign_report(cfg, 3, stats.evaluations, stats.max_error_bound,
                                           warnings);
    timer.lap("analyze");

    std::cout << "V_in = " << format_short(r.V_in) << " V\n"
              << "L_in = " << format_short(r.L_in) << " m\n"
              << "lambda2 = " << format_short(l2) << "\n"
              << "f(L_in/D) = " << format_short(f_at_L_in) << "\n"
              << "V_star = " << format_short(r.V_star) << " V\n"
              << "V_star_closed = " << format_short(r.V_star_closed) << " V\n"
              << "argmax_shifted = " << (r.argmax_shifted ? "true" : "false") << "\n";

    ordered_json m = manifest_skeleton("pull-in", cfg);
    m["timings_ms"] = timer.finish();
    m["quadrature"] = detail::to_json(stats);
    m["sign_report"] = signs;
    m["warnings"] = warnings;
    m["pull_in"] = {{"V_in", r.V_in},
                    {"L_in_m", r.L_in},
                    {"lambda2", l2},
                    {"f_at_L_in", f_at_L_in},
                    {"V_star", r.V_star},
                    {"V_star_closed", r.V_star_closed},
                    {"L_tilde_star", r.L_tilde_star},
                    {"lambda1_star", r.lambda1_star},
                    {"argmax_shifted", r.argmax_shifted}};
    write_manifest(cfg, m);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Designs the band that parks the n-th repulsive separation at L_target,
// then verifies by sweeping around the target and refining the nearest
// pressure extremum.
inline void cmd_design_bandwidth(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    StageTimer timer;
    detail::QuadStats stats;
    std::vector<std::string> warnings;

    const Bandwidth band =
        design_bandwidth(cfg.L_target, static_cast<int>(cfg.n_harmonic), cfg.c, cfg.rel_width);
    RunConfig resolved = cfg;
    resolved.omega1 = band.omega1;
    resolved.omega2 = band.omega2;
    resolved.L_min = 0.5 * cfg.L_target;
    resolved.L_max = 1.5 * cfg.L_target;
    const AcousticEnvironment env = environment_of(resolved);

    const auto profile_run = pressure_profile_full(sweep_gaps(resolved), band, env, cfg.tol,
                                                   cfg.mode, cfg.threads);
    const PressureProfile& profile = profile_run.profile;
    stats.add(profile_run.evaluations, profile_run.max_error_bound);
    timer.lap("sweep");

    const auto extrema = extremum_locations_full(profile, cfg.tol);
    stats.add(extrema.evaluations, extrema.max_error_bound);
    if (extrema.locations.empty())
        throw Error("design-bandwidth: no pressure extremum found in the verification sweep");
    double nearest = extrema.locations.front();
    for (const double x : extrema.locations)
        if (std::abs(x - cfg.L_target) < std::abs(nearest - cfg.L_target)) nearest = x;
    const double placement_error = std::abs(nearest - cfg.L_target) / cfg.L_target;
    const ordered_json signs = sign_report(resolved, 3, stats.evaluations, stats.max_error_bound,
                                           warnings);
    timer.lap("verify");

    CsvWriter csv(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    const std::vector<std::string> header = {"L_m", "P_Pa", "P_ideal_Pa"};
    csv.text_row(header);
    for (std::size_t i = 0; i < profile.gaps.size(); ++i) {
        const std::vector<double> row = {profile.gaps[i], profile.pressures[i],
                                         ideal_pressure(profile.gaps[i], cfg.intensity)};
        csv.value_row(row);
    }
    csv.finish();
    timer.lap("write");

    std::cout << "omega1 = " << format_short(band.omega1) << " rad/s\n"
              << "omega2 = " << format_short(band.omega2) << " rad/s\n"
              << "nearest_extremum = " << format_short(nearest) << " m\n"
              << "placement_rel_error = " << format_short(placement_error) << "\n";

    ordered_json m = manifest_skeleton("design-bandwidth", cfg);
    m["timings_ms"] = timer.finish();
    m["quadrature"] = detail::to_json(stats);
    m["sign_report"] = signs;
    m["warnings"] = warnings;
    m["design"] = {{"omega1", band.omega1},
                   {"omega2", band.omega2},
                   {"L_target_m", cfg.L_target},
                   {"nearest_extremum_m", nearest},
                   {"placement_rel_error", placement_error}};
    write_manifest(cfg, m);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace acasimir::cli
