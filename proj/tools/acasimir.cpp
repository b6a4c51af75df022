#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <acasimir/cli/commands.hpp>

namespace {

struct FlagSet {
    std::string config_path;
    std::string out_dir;
    double k_spring = 0.0;
    double D = 0.0;
    double A = 0.0;
    double c = 0.0;
    double intensity = 0.0;
    double r = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    double L_target = 0.0;
    double rel_width = 0.0;
    double L_min = 0.0;
    double L_max = 0.0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    long n_harmonic = 0;
    long n_points = 0;
    long max_evals = 0;
    std::string spacing;
    std::string domain_mode;
    std::vector<double> voltages;
    std::vector<double> lambda2_values;
    bool um = false;
    bool nm = false;
    bool mega = false;
    bool giga = false;
};

void add_options(CLI::App* sub, FlagSet& f) {
    sub->add_option("--config", f.config_path, "key = value config file (SI units)");
    sub->add_option("--out", f.out_dir, "output directory for sweep.csv / manifest.json");
    sub->add_option("--k_spring", f.k_spring, "spring constant, N/m");
    sub->add_option("--D", f.D, "rest gap (length)");
    sub->add_option("--A", f.A, "plate area, m^2");
    sub->add_option("--c", f.c, "sound speed, m/s");
    sub->add_option("--intensity", f.intensity, "spectral intensity I_omega");
    sub->add_option("--r", f.r, "reflectivity applied to both plates");
    sub->add_option("--r1", f.r1, "plate 1 reflectivity");
    sub->add_option("--r2", f.r2, "plate 2 reflectivity");
    sub->add_option("--omega1", f.omega1, "band lower edge (frequency)");
    sub->add_option("--omega2", f.omega2, "band upper edge (frequency)");
    sub->add_option("--L_target", f.L_target, "design target separation (length)");
    sub->add_option("--n_harmonic", f.n_harmonic, "design harmonic index");
    sub->add_option("--rel_width", f.rel_width, "design fractional bandwidth");
    sub->add_option("--L_min", f.L_min, "sweep start (length)");
    sub->add_option("--L_max", f.L_max, "sweep end (length)");
    sub->add_option("--n_points", f.n_points, "sweep sample count");
    sub->add_option("--spacing", f.spacing, "sweep spacing: linear | log");
    sub->add_option("--voltages", f.voltages, "comparison voltages, V")->delimiter(',');
    sub->add_option("--lambda2_values", f.lambda2_values, "bifurcation lambda2 list")
        ->delimiter(',');
    sub->add_option("--rel_tol", f.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs_tol", f.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--max_evals", f.max_evals, "quadrature evaluation budget");
    sub->add_option("--domain_mode", f.domain_mode, "printed | annulus");
    auto* um = sub->add_flag("--um", f.um, "lengths on the command line are micrometers");
    auto* nm = sub->add_flag("--nm", f.nm, "lengths on the command line are nanometers");
    auto* mega = sub->add_flag("--mega", f.mega, "frequencies on the command line are 1e6 rad/s");
    auto* giga = sub->add_flag("--giga", f.giga, "frequencies on the command line are 1e9 rad/s");
    um->excludes(nm);
    nm->excludes(um);
    mega->excludes(giga);
    giga->excludes(mega);
}

acasimir::cli::RunConfig resolve(CLI::App* active, const FlagSet& f) {
    acasimir::cli::RunConfig cfg;
    auto given = [&](const char* name) { return active->count(name) > 0; };
    if (given("--config")) cfg = acasimir::cli::parse_config_file(f.config_path, cfg);

    const double length_scale = f.um ? 1e-6 : (f.nm ? 1e-9 : 1.0);
    const double freq_scale = f.mega ? 1e6 : (f.giga ? 1e9 : 1.0);
    if (given("--k_spring")) cfg.k_spring = f.k_spring;
    if (given("--D")) cfg.D = f.D * length_scale;
    if (given("--A")) cfg.A = f.A;
    if (given("--c")) cfg.c = f.c;
    if (given("--intensity")) cfg.intensity = f.intensity;
    if (given("--r")) cfg.r1 = cfg.r2 = f.r;
    if (given("--r1")) cfg.r1 = f.r1;
    if (given("--r2")) cfg.r2 = f.r2;
    if (given("--omega1")) cfg.omega1 = f.omega1 * freq_scale;
    if (given("--omega2")) cfg.omega2 = f.omega2 * freq_scale;
    if (given("--L_target")) cfg.L_target = f.L_target * length_scale;
    if (given("--n_harmonic")) cfg.n_harmonic = f.n_harmonic;
    if (given("--rel_width")) cfg.rel_width = f.rel_width;
    if (given("--L_min")) cfg.L_min = f.L_min * length_scale;
    if (given("--L_max")) cfg.L_max = f.L_max * length_scale;
    if (given("--n_points")) cfg.n_points = f.n_points;
    if (given("--spacing"))
        cfg.log_spacing = acasimir::cli::detail::parse_spacing("spacing", f.spacing);
    if (given("--voltages")) cfg.voltages = f.voltages;
    if (given("--lambda2_values")) cfg.lambda2_values = f.lambda2_values;
    if (given("--rel_tol")) cfg.tol.rel = f.rel_tol;
    if (given("--abs_tol")) cfg.tol.abs = f.abs_tol;
    if (given("--max_evals")) {
        if (f.max_evals < 0) throw acasimir::ConfigError("max_evals", "must be nonnegative");
        cfg.tol.max_evals = static_cast<std::uint64_t>(f.max_evals);
    }
    if (given("--domain_mode"))
        cfg.mode = acasimir::cli::detail::parse_domain_mode("domain_mode", f.domain_mode);
    if (given("--out")) cfg.out_dir = f.out_dir;
    cfg.threads = acasimir::cli::threads_from_environment();
    acasimir::cli::validate_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"band-limited acoustic Casimir pressure and MEMS pull-in analysis"};
    app.require_subcommand(1);
    FlagSet flags;
    CLI::App* sweep = app.add_subcommand("pressure-sweep", "P(L) sweep with sign analysis");
    CLI::App* compare =
        app.add_subcommand("compare-electrostatic", "ideal-limit ACP vs electrostatic pressure");
    CLI::App* bifurcation =
        app.add_subcommand("bifurcation", "lambda1(L_tilde) curves for each lambda2");
    CLI::App* pull_in =
        app.add_subcommand("pull-in", "pull-in voltages with and without the acoustic field");
    CLI::App* design =
        app.add_subcommand("design-bandwidth", "band placement for a target separation");
    for (CLI::App* sub : {sweep, compare, bifurcation, pull_in, design})
        add_options(sub, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const acasimir::cli::RunConfig cfg = resolve(active, flags);
        if (active == sweep) acasimir::cli::cmd_pressure_sweep(cfg);
        else if (active == compare) acasimir::cli::cmd_compare_electrostatic(cfg);
        else if (active == bifurcation) acasimir::cli::cmd_bifurcation(cfg);
        else if (active == pull_in) acasimir::cli::cmd_pull_in(cfg);
        else acasimir::cli::cmd_design_bandwidth(cfg);
        return 0;
    } catch (const acasimir::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const acasimir::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const acasimir::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
