#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "../constants.hpp"
#include "../errors.hpp"
#include "config.hpp"

namespace acasimir::cli {

using ordered_json = nlohmann::ordered_json;

// 17 significant digits, lowercase scientific: enough to round-trip any
// double, independent of locale.
inline std::string format_sci(double v) {
    std::array<char, 40> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
    return std::string(buf.data(), res.ptr);
}

// Shortest round-trip form, for report lines and column labels.
inline std::string format_short(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    }

    void text_row(std::span<const std::string> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void value_row(std::span<const double> values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << format_sci(values[i]);
        }
        out_ << '\n';
    }

    void finish() {
        out_.flush();
        if (!out_) throw IoError("failed writing '" + path_.string() + "'");
    }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

class StageTimer {
  public:
    StageTimer() : start_(clock::now()), last_(start_) {}

    void lap(const char* name) {
        const auto now = clock::now();
        stages_[name] = round_ms(now - last_);
        last_ = now;
    }

    ordered_json finish() {
        stages_["total"] = round_ms(clock::now() - start_);
        return stages_;
    }

  private:
    using clock = std::chrono::steady_clock;

    static double round_ms(clock::duration d) {
        const double ms = std::chrono::duration<double, std::milli>(d).count();
        return std::round(ms * 1000.0) / 1000.0;
    }

    clock::time_point start_;
    clock::time_point last_;
    ordered_json stages_ = ordered_json::object();
};

inline ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["device"] = {{"k_spring", cfg.k_spring}, {"D", cfg.D}, {"A", cfg.A}};
    j["environment"] = {
        {"c", cfg.c}, {"intensity", cfg.intensity}, {"r1", cfg.r1}, {"r2", cfg.r2}};
    j["band"] = {{"omega1", cfg.omega1}, {"omega2", cfg.omega2}};
    j["design"] = {{"L_target", cfg.L_target},
                   {"n_harmonic", cfg.n_harmonic},
                   {"rel_width", cfg.rel_width}};
    j["sweep"] = {{"L_min", cfg.L_min},
                  {"L_max", cfg.L_max},
                  {"n_points", cfg.n_points},
                  {"spacing", cfg.log_spacing ? "log" : "linear"}};
    j["voltages"] = cfg.voltages;
    j["lambda2_values"] = cfg.lambda2_values;
    j["tolerance"] = {{"rel_tol", cfg.tol.rel},
                      {"abs_tol", cfg.tol.abs},
                      {"max_evals", cfg.tol.max_evals}};
    j["domain_mode"] = cfg.mode == DomainMode::printed ? "printed" : "annulus";
    j["out_dir"] = cfg.out_dir;
    j["threads"] = cfg.threads;
    return j;
}

// Probes P at the first predicted repulsive separations and records whether
// the computed sign actually is repulsive there. Never gates a run; mismatches
// go to `warnings` so no sweep silently hides a sign flip.
inline ordered_json sign_report(const RunConfig& cfg, int n_peaks, std::uint64_t& evaluations,
                                double& max_error_bound, std::vector<std::string>& warnings) {
    const Bandwidth band = band_of(cfg);
    const AcousticEnvironment env = environment_of(cfg);
    const auto peaks = repulsive_peak_locations(band, env.c, n_peaks);
    ordered_json report = ordered_json::array();
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const QuadResult q = acp_pressure_full(peaks[i], band, env, cfg.tol, cfg.mode);
        evaluations += q.evaluations;
        max_error_bound = std::max(max_error_bound, q.error_bound);
        const bool repulsive = q.value > 0.0;
        ordered_json entry;
        entry["n"] = i + 1;
        entry["L_predicted_m"] = peaks[i];
        entry["pressure_Pa"] = q.value;
        entry["sign"] = q.value > 0.0 ? "+" : (q.value < 0.0 ? "-" : "0");
        entry["matches_repulsive_label"] = repulsive;
        report.push_back(entry);
        if (!repulsive && env.intensity > 0.0 && env.r1 * env.r2 > 0.0)
            warnings.push_back("sign mismatch: P(" + format_short(peaks[i]) +
                               " m) = " + format_short(q.value) +
                               " Pa is not repulsive at predicted peak n=" +
                               std::to_string(i + 1));
    }
    return report;
}

inline ordered_json manifest_skeleton(const std::string& command, const RunConfig& cfg) {
    ordered_json m;
    m["tool"] = {{"name", tool_name}, {"version", tool_version}};
    m["command"] = command;
    m["config"] = config_json(cfg);
    return m;
}

inline void write_manifest(const RunConfig& cfg, ordered_json manifest) {
    const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "manifest.json";
    write_text_file(path, manifest.dump(2) + "\n");
}

inline void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
}

}  // namespace acasimir::cli
