#pragma once

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "../acoustics.hpp"
#include "../errors.hpp"
#include "../mems.hpp"
#include "../numerics.hpp"

namespace acasimir::cli {

struct RunConfig {
    // device
    double k_spring = 1.0;
    double D = 60e-6;
    double A = 1e-8;
    // environment
    double c = 340.0;
    double intensity = 1e-4;
    double r1 = 0.8944271909999159;  // sqrt(0.8)
    double r2 = 0.8944271909999159;
    // band
    double omega1 = 9e7;
    double omega2 = 1e8;
    // design target
    double L_target = 40e-6;
    long n_harmonic = 1;
    double rel_width = 0.075;
    // sweep
    double L_min = 5e-6;
    double L_max = 150e-6;
    long n_points = 200;
    bool log_spacing = false;
    // actuation / curve families
    std::vector<double> voltages = {3.0, 6.0};
    std::vector<double> lambda2_values = {0.2, 0.015, 0.005, 0.0};
    // numerics
    Tolerance tol{};
    DomainMode mode = DomainMode::printed;
    // plumbing
    std::string out_dir = "out";
    unsigned threads = 0;  // 0 = hardware default
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_number(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(field, "expected a number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(field, "expected a finite number, got '" + t + "'");
    return v;
}

inline long parse_integer(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(field, "expected an integer");
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(field, "expected an integer, got '" + t + "'");
    return v;
}

inline std::vector<double> parse_number_list(const std::string& field, const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::size_t start = 0;
    const std::string t = trim(text);
    while (start <= t.size()) {
        const std::size_t comma = t.find(',', start);
        item = (comma == std::string::npos) ? t.substr(start) : t.substr(start, comma - start);
        out.push_back(parse_number(field, item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError(field, "expected a comma-separated number list");
    return out;
}

inline DomainMode parse_domain_mode(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    if (t == "printed") return DomainMode::printed;
    if (t == "annulus") return DomainMode::annulus;
    throw ConfigError(field, "expected 'printed' or 'annulus', got '" + t + "'");
}

inline bool parse_spacing(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    if (t == "linear") return false;
    if (t == "log") return true;
    throw ConfigError(field, "expected 'linear' or 'log', got '" + t + "'");
}

}  // namespace detail

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_domain_mode;
    using detail::parse_integer;
    using detail::parse_number;
    using detail::parse_number_list;
    using detail::parse_spacing;
    if (key == "k_spring") cfg.k_spring = parse_number(key, value);
    else if (key == "D") cfg.D = parse_number(key, value);
    else if (key == "A") cfg.A = parse_number(key, value);
    else if (key == "c") cfg.c = parse_number(key, value);
    else if (key == "intensity") cfg.intensity = parse_number(key, value);
    else if (key == "r") cfg.r1 = cfg.r2 = parse_number(key, value);
    else if (key == "r1") cfg.r1 = parse_number(key, value);
    else if (key == "r2") cfg.r2 = parse_number(key, value);
    else if (key == "omega1") cfg.omega1 = parse_number(key, value);
    else if (key == "omega2") cfg.omega2 = parse_number(key, value);
    else if (key == "L_target") cfg.L_target = parse_number(key, value);
    else if (key == "n_harmonic") cfg.n_harmonic = parse_integer(key, value);
    else if (key == "rel_width") cfg.rel_width = parse_number(key, value);
    else if (key == "L_min") cfg.L_min = parse_number(key, value);
    else if (key == "L_max") cfg.L_max = parse_number(key, value);
    else if (key == "n_points") cfg.n_points = parse_integer(key, value);
    else if (key == "spacing") cfg.log_spacing = parse_spacing(key, value);
    else if (key == "voltages") cfg.voltages = parse_number_list(key, value);
    else if (key == "lambda2_values") cfg.lambda2_values = parse_number_list(key, value);
    else if (key == "rel_tol") cfg.tol.rel = parse_number(key, value);
    else if (key == "abs_tol") cfg.tol.abs = parse_number(key, value);
    else if (key == "max_evals") {
        const long v = parse_integer(key, value);
        if (v < 0) throw ConfigError(key, "must be nonnegative");
        cfg.tol.max_evals = static_cast<std::uint64_t>(v);
    } else if (key == "domain_mode") cfg.mode = parse_domain_mode(key, value);
    else if (key == "out_dir") cfg.out_dir = detail::trim(value);
    else throw ConfigError(key, "unknown key");
}

// Flat `key = value` file; '#' starts a comment; blank lines ignored.
inline RunConfig parse_config_file(const std::string& path, RunConfig cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read file '" + path + "'");
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) +
                                            ": expected 'key = value'");
        apply_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline void validate_config(const RunConfig& cfg) {
    auto require = [](bool ok, const std::string& field, const std::string& msg) {
        if (!ok) throw ConfigError(field, msg);
    };
    require(std::isfinite(cfg.k_spring) && cfg.k_spring > 0.0, "device.k_spring",
            "must be positive");
    require(std::isfinite(cfg.D) && cfg.D > 0.0, "device.D", "must be positive");
    require(std::isfinite(cfg.A) && cfg.A > 0.0, "device.A", "must be positive");
    require(std::isfinite(cfg.c) && cfg.c > 0.0, "environment.c", "must be positive");
    require(std::isfinite(cfg.intensity) && cfg.intensity >= 0.0, "environment.intensity",
            "must be nonnegative");
    require(std::isfinite(cfg.r1) && cfg.r1 >= 0.0 && cfg.r1 < 1.0, "environment.r1",
            "must lie in [0, 1)");
    require(std::isfinite(cfg.r2) && cfg.r2 >= 0.0 && cfg.r2 < 1.0, "environment.r2",
            "must lie in [0, 1)");
    require(std::isfinite(cfg.omega1) && cfg.omega1 > 0.0, "band.omega1", "must be positive");
    require(std::isfinite(cfg.omega2) && cfg.omega2 > cfg.omega1, "band.omega2",
            "must exceed omega1");
    require(std::isfinite(cfg.L_target) && cfg.L_target > 0.0, "design.L_target",
            "must be positive");
    require(cfg.n_harmonic >= 1, "design.n_harmonic", "must be at least 1");
    require(std::isfinite(cfg.rel_width) && cfg.rel_width > 0.0 && cfg.rel_width < 1.0,
            "design.rel_width", "must lie in (0, 1)");
    require(std::isfinite(cfg.L_min) && cfg.L_min > 0.0, "sweep.L_min", "must be positive");
    require(std::isfinite(cfg.L_max) && cfg.L_max > cfg.L_min, "sweep.L_max",
            "must exceed L_min");
    require(cfg.n_points >= 2, "sweep.n_points", "must be at least 2");
    require(!cfg.voltages.empty(), "voltages", "must be nonempty");
    for (std::size_t i = 0; i < cfg.voltages.size(); ++i)
        require(std::isfinite(cfg.voltages[i]) && cfg.voltages[i] >= 0.0,
                "voltages[" + std::to_string(i) + "]", "must be nonnegative");
    require(!cfg.lambda2_values.empty(), "lambda2_values", "must be nonempty");
    for (std::size_t i = 0; i < cfg.lambda2_values.size(); ++i)
        require(std::isfinite(cfg.lambda2_values[i]) && cfg.lambda2_values[i] >= 0.0,
                "lambda2_values[" + std::to_string(i) + "]", "must be nonnegative");
    require(std::isfinite(cfg.tol.rel) && cfg.tol.rel > 0.0, "tolerance.rel_tol",
            "must be positive");
    require(std::isfinite(cfg.tol.abs) && cfg.tol.abs >= 0.0, "tolerance.abs_tol",
            "must be nonnegative");
    require(cfg.tol.max_evals >= 100, "tolerance.max_evals", "must be at least 100");
    require(!cfg.out_dir.empty(), "out_dir", "must be nonempty");
}

// ACASIMIR_THREADS: worker cap for sweep parallelism; 0 or unset keeps the
// hardware default.
inline unsigned threads_from_environment() {
    const char* raw = std::getenv("ACASIMIR_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    errno = 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(raw, &end, 10);
    if (end == raw || *end != '\0' || errno == ERANGE || v > 4096)
        throw ConfigError("ACASIMIR_THREADS", std::string("expected a small nonnegative integer, got '") + raw + "'");
    return static_cast<unsigned>(v);
}

inline LumpedDevice device_of(const RunConfig& cfg) { return {cfg.k_spring, cfg.D, cfg.A}; }

inline AcousticEnvironment environment_of(const RunConfig& cfg) {
    return {cfg.c, cfg.intensity, cfg.r1, cfg.r2};
}

inline Bandwidth band_of(const RunConfig& cfg) { return {cfg.omega1, cfg.omega2}; }

inline std::vector<double> sweep_gaps(const RunConfig& cfg) {
    const std::size_t n = static_cast<std::size_t>(cfg.n_points);
    std::vector<double> gaps(n);
    if (cfg.log_spacing) {
        const double lo = std::log(cfg.L_min);
        const double hi = std::log(cfg.L_max);
        for (std::size_t i = 0; i < n; ++i)
            gaps[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                        static_cast<double>(n - 1));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            gaps[i] = cfg.L_min + (cfg.L_max - cfg.L_min) * static_cast<double>(i) /
                                      static_cast<double>(n - 1);
    }
    gaps.front() = cfg.L_min;
    gaps.back() = cfg.L_max;
    return gaps;
}

}  // namespace acasimir::cli
