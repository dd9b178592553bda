// Command-line front end: every library operation as a subcommand, scalar
// results as JSON on stdout, tables as CSV. Exit codes: 0 success, 1 usage,
// 2 numerical or data error.
#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "biphoton/amplitude.hpp"
#include "biphoton/crystal.hpp"
#include "biphoton/csv.hpp"
#include "biphoton/oracle.hpp"
#include "biphoton/rates.hpp"
#include "biphoton/sweep.hpp"
#include "biphoton/tags.hpp"
#include "biphoton/units.hpp"

using nlohmann::json;
namespace bp = biphoton;

namespace {

struct GlobalOptions {
    std::string config_path;
    double tol = 1e-9;
    std::uint64_t seed = 1;

    bp::CrystalConfig crystal;
    std::optional<bp::FilterSpec> config_filter;
    bp::quad::Settings quadrature() const {
        bp::quad::Settings s;
        s.rel_tol = tol;
        return s;
    }
};

// Config JSON: {crystal:{L_mm,n1,n2,lambda0_nm,lambda_pump_nm,Lc_mm,T_opt_C,a},
//               filter:{kind,Z|W_nm}, quadrature:{rel_tol}}
void load_config(GlobalOptions& opts) {
    if (opts.config_path.empty()) return;
    std::ifstream in(opts.config_path);
    if (!in) throw std::runtime_error("cannot open config '" + opts.config_path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::parse_error& err) {
        throw std::runtime_error("config '" + opts.config_path +
                                 "' is not valid JSON: " + err.what());
    }

    if (doc.contains("crystal")) {
        const json& c = doc["crystal"];
        bp::CrystalConfig& cfg = opts.crystal;
        if (c.contains("L_mm")) cfg.length = c["L_mm"].get<double>() * 1e-3;
        if (c.contains("n1")) cfg.n1 = c["n1"].get<double>();
        if (c.contains("n2")) cfg.n2 = c["n2"].get<double>();
        if (c.contains("lambda0_nm")) cfg.lambda0 = c["lambda0_nm"].get<double>() * 1e-9;
        if (c.contains("lambda_pump_nm"))
            cfg.lambda_pump = c["lambda_pump_nm"].get<double>() * 1e-9;
        if (c.contains("Lc_mm")) cfg.compensator_length = c["Lc_mm"].get<double>() * 1e-3;
        if (c.contains("T_opt_C")) cfg.t_opt = c["T_opt_C"].get<double>();
        if (c.contains("a")) cfg.slope_a = c["a"].get<double>();
        cfg.validate();
    }
    if (doc.contains("filter")) {
        const json& f = doc["filter"];
        const std::string kind = f.value("kind", "none");
        if (kind == "none") {
            opts.config_filter = bp::FilterSpec::none();
        } else if (f.contains("W_nm")) {
            bp::PhysicalFilter phys;
            phys.center_wavelength = opts.crystal.lambda0;
            phys.gaussian_width = f["W_nm"].get<double>() * 1e-9;
            const double z = bp::dimensionless_filter_width(opts.crystal, phys);
            opts.config_filter = (kind == "rect" || kind == "rectangular")
                                     ? bp::FilterSpec::rectangular(z)
                                     : bp::FilterSpec::gaussian(z);
        } else if (f.contains("Z")) {
            const double z = f["Z"].get<double>();
            opts.config_filter = (kind == "rect" || kind == "rectangular")
                                     ? bp::FilterSpec::rectangular(z)
                                     : bp::FilterSpec::gaussian(z);
        } else {
            throw std::runtime_error("config filter needs Z or W_nm");
        }
    }
    if (doc.contains("quadrature") && doc["quadrature"].contains("rel_tol"))
        opts.tol = doc["quadrature"]["rel_tol"].get<double>();
}

json rates_json(const bp::CoincidenceRates& rates) {
    return {{"rpp", rates.rpp}, {"rpm", rates.rpm}, {"rmp", rates.rmp}, {"rmm", rates.rmm}};
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

// Operating point from either --m or --t-celsius (through the config).
double resolve_m(const GlobalOptions& opts, std::optional<double> m,
                 std::optional<double> t_celsius) {
    if (m && t_celsius)
        throw std::invalid_argument("give either --m or --t-celsius, not both");
    if (t_celsius) return bp::m_of_temperature(opts.crystal, *t_celsius);
    return m.value_or(0.0);
}

bp::FilterSpec resolve_filter(const GlobalOptions& opts, const std::string& flag) {
    if (!flag.empty()) return bp::parse_filter(flag);
    if (opts.config_filter) return *opts.config_filter;
    return bp::FilterSpec::gaussian(7.8);  // the 1 nm experiment filter
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Type-II downconversion two-photon interference: coincidence rates, "
        "temperature sweeps, slope fits, amplitude maps, time-tag simulation "
        "and coincidence analysis"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path,
                   "JSON config: crystal geometry (mm/nm), filter, quadrature");
    app.add_option("--tol", opts.tol, "relative quadrature tolerance (default 1e-9)");
    app.add_option("--seed", opts.seed, "random seed for simulation (integer)");

    std::string alpha_text = "22.5deg", beta_text = "22.5deg", filter_text;
    std::optional<double> m_opt, t_opt;
    double d_shift = -1.0;

    auto add_point_options = [&](CLI::App* cmd, bool with_d = false) {
        cmd->add_option("--m", m_opt, "dimensionless detuning m = mu*D*L");
        cmd->add_option("--t-celsius", t_opt,
                        "crystal temperature in Celsius (mapped through the config)");
        cmd->add_option("--filter", filter_text,
                        "filter: none, gaussian:<Z> or rect:<Z> (dimensionless Z)");
        if (with_d)
            cmd->add_option("--d", d_shift,
                            "compensator shift d = delta/(D*L), default -1");
    };
    auto add_angle_options = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", alpha_text, "Alice HWP angle, e.g. 22.5deg or 0.39rad");
        cmd->add_option("--beta", beta_text, "Bob HWP angle, e.g. 22.5deg or 0.39rad");
    };

    auto* cmd_corr = app.add_subcommand(
        "correlation", "correlation E(alpha, beta) and rates at one operating point");
    add_point_options(cmd_corr, true);
    add_angle_options(cmd_corr);

    auto* cmd_sweep =
        app.add_subcommand("sweep", "diagonal-basis correlation versus temperature (CSV)");
    double t_min = 5.0, t_max = 35.1, t_step = 0.05;
    std::string out_path;
    cmd_sweep->add_option("--t-min", t_min, "sweep start, Celsius");
    cmd_sweep->add_option("--t-max", t_max, "sweep end, Celsius");
    cmd_sweep->add_option("--step", t_step, "sweep step, Celsius");
    cmd_sweep->add_option("--filter", filter_text, "filter: none, gaussian:<Z> or rect:<Z>");
    cmd_sweep->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* cmd_fit = app.add_subcommand(
        "fit", "fit the temperature coefficient a to measured E(T) data");
    std::string data_path;
    bool fit_t_opt = false;
    double a_lo = 1e10, a_hi = 1e14;
    cmd_fit->add_option("--data", data_path, "CSV with columns T_C,E[,sigma]")->required();
    cmd_fit->add_option("--filter", filter_text, "filter: none, gaussian:<Z> or rect:<Z>");
    cmd_fit->add_flag("--fit-topt", fit_t_opt, "fit T_opt (Celsius) together with a");
    cmd_fit->add_option("--a-lo", a_lo, "slope bracket lower edge, rad/s/K");
    cmd_fit->add_option("--a-hi", a_hi, "slope bracket upper edge, rad/s/K");

    auto* cmd_map = app.add_subcommand(
        "amplitude-map", "two-photon amplitude over the (tau_A, tau_B) plane (CSV)");
    bp::GridSpec grid;
    double carrier = 40.0;
    add_point_options(cmd_map, true);
    cmd_map->add_option("--carrier", carrier,
                        "dimensionless carrier frequency for wavefronts (0 = envelope)");
    cmd_map->add_option("--tau-a-min", grid.tau_a_min, "grid edge, units of D*L");
    cmd_map->add_option("--tau-a-max", grid.tau_a_max, "grid edge, units of D*L");
    cmd_map->add_option("--tau-b-min", grid.tau_b_min, "grid edge, units of D*L");
    cmd_map->add_option("--tau-b-max", grid.tau_b_max, "grid edge, units of D*L");
    cmd_map->add_option("--na", grid.na, "samples along tau_A");
    cmd_map->add_option("--nb", grid.nb, "samples along tau_B");
    cmd_map->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* cmd_asym = app.add_subcommand(
        "asymptotic", "narrow rectangular-filter closed form near m = 4*pi*n");
    double delta_m = 0.0, asym_z = 0.1;
    cmd_asym->add_option("--delta-m", delta_m, "detuning from the 4*pi*n peak")->required();
    cmd_asym->add_option("--z", asym_z, "rectangular half-width Z (dimensionless)")
        ->required();

    auto* cmd_chsh = app.add_subcommand("chsh", "CHSH S for four analyzer settings");
    std::string sa = "0deg", sap = "22.5deg", sb = "11.25deg", sbp = "33.75deg";
    add_point_options(cmd_chsh);
    cmd_chsh->add_option("--a", sa, "setting a (deg/rad suffix)");
    cmd_chsh->add_option("--a-prime", sap, "setting a' (deg/rad suffix)");
    cmd_chsh->add_option("--b", sb, "setting b (deg/rad suffix)");
    cmd_chsh->add_option("--b-prime", sbp, "setting b' (deg/rad suffix)");

    auto* cmd_sim = app.add_subcommand(
        "simulate", "Monte Carlo time-tag stream from the model rates");
    bp::SimConfig sim;
    std::string sim_out = "tags.bin", sim_format = "binary";
    cmd_sim->add_option("--pairs", sim.pair_rate, "produced pairs per second");
    cmd_sim->add_option("--duration", sim.duration, "acquisition length, seconds");
    add_point_options(cmd_sim);
    add_angle_options(cmd_sim);
    cmd_sim->add_option("--efficiency", sim.efficiency, "detector efficiency in [0,1]");
    cmd_sim->add_option("--dark-rate", sim.dark_rate, "dark counts per detector per second");
    cmd_sim->add_option("--jitter", sim.jitter_sigma, "timing jitter sigma, ps");
    cmd_sim->add_option("--out", sim_out, "output tag file");
    cmd_sim->add_option("--format", sim_format, "binary or csv");

    auto* cmd_an = app.add_subcommand(
        "analyze", "coincidence analysis of a tag stream (JSON report)");
    std::string in_path;
    double window = 1000.0;
    std::array<std::int64_t, 4> offsets{};
    std::vector<std::int64_t> offsets_flag;
    cmd_an->add_option("--in", in_path, "tag file (binary or CSV)")->required();
    cmd_an->add_option("--window", window, "coincidence window, ps");
    cmd_an->add_option("--offsets", offsets_flag,
                       "four per-channel timing offsets in ps (A+ A- B+ B-)")
        ->expected(4);

    auto* cmd_oracle = app.add_subcommand(
        "oracle-check", "closed-form rates versus the brute-force rate integral");
    double oracle_grid_ppu = 256.0;
    add_point_options(cmd_oracle);
    add_angle_options(cmd_oracle);
    cmd_oracle->add_option("--points-per-unit", oracle_grid_ppu,
                           "tau grid resolution per unit of D*L");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        load_config(opts);
        const bp::quad::Settings quadrature = opts.quadrature();
        json result;

        if (cmd_corr->parsed()) {
            const bp::OperatingPoint point{resolve_m(opts, m_opt, t_opt), d_shift};
            const bp::FilterSpec filter = resolve_filter(opts, filter_text);
            const bp::HwpAngles angles{bp::parse_angle(alpha_text),
                                       bp::parse_angle(beta_text)};
            if (point.d != -1.0) {
                const double rpp = bp::rate_general_delta(point, filter, quadrature);
                result = {{"m", point.m},
                          {"d", point.d},
                          {"filter", bp::to_string(filter)},
                          {"rpp", rpp},
                          {"units", "R0"}};
            } else {
                const bp::PairIntegrals pair =
                    bp::pair_integrals(point, filter, quadrature);
                const bp::CoincidenceRates rates = bp::general_rates(angles, pair);
                result = {{"m", point.m},
                          {"d", point.d},
                          {"filter", bp::to_string(filter)},
                          {"alpha_rad", angles.alpha},
                          {"beta_rad", angles.beta},
                          {"E", rates.correlation()},
                          {"I1", pair.i1},
                          {"I2", pair.i2},
                          {"rates", rates_json(rates)}};
            }
            std::cout << result.dump(2) << '\n';
        } else if (cmd_sweep->parsed()) {
            const auto rows = bp::temperature_sweep(opts.crystal,
                                                    resolve_filter(opts, filter_text),
                                                    {t_min, t_max, t_step}, quadrature);
            std::ofstream file;
            bp::write_sweep_csv(open_or_stdout(file, out_path), rows);
        } else if (cmd_fit->parsed()) {
            const auto data = bp::read_measured_csv(data_path);
            bp::FitOptions fit_options;
            fit_options.fit_t_opt = fit_t_opt;
            fit_options.a_lo = a_lo;
            fit_options.a_hi = a_hi;
            const auto fit =
                bp::fit_slope(data, opts.crystal, resolve_filter(opts, filter_text),
                              fit_options, quadrature);
            result = {{"a", fit.slope_a},
                      {"residual", fit.residual},
                      {"points", data.size()}};
            if (fit.t_opt) result["T_opt_C"] = *fit.t_opt;
            std::cout << result.dump(2) << '\n';
        } else if (cmd_map->parsed()) {
            const bp::OperatingPoint point{resolve_m(opts, m_opt, t_opt), d_shift};
            const auto samples = bp::amplitude_map(
                grid, point, resolve_filter(opts, filter_text), carrier, quadrature);
            std::ofstream file;
            bp::write_amplitude_csv(open_or_stdout(file, out_path), samples);
        } else if (cmd_asym->parsed()) {
            const bp::PairIntegrals pair = bp::asymptotic_pair_integrals(delta_m, asym_z);
            result = {{"delta_m", delta_m},
                      {"Z", asym_z},
                      {"I1", pair.i1},
                      {"I2", pair.i2},
                      {"E", bp::asymptotic_correlation(delta_m, asym_z)}};
            std::cout << result.dump(2) << '\n';
        } else if (cmd_chsh->parsed()) {
            const bp::OperatingPoint point{resolve_m(opts, m_opt, t_opt), -1.0};
            const bp::ChshSettings settings{bp::parse_angle(sa), bp::parse_angle(sap),
                                            bp::parse_angle(sb), bp::parse_angle(sbp)};
            const double s = bp::chsh(point, resolve_filter(opts, filter_text), settings,
                                      quadrature);
            result = {{"S", s},
                      {"m", point.m},
                      {"settings",
                       {{"a_rad", settings.a},
                        {"a_prime_rad", settings.a_prime},
                        {"b_rad", settings.b},
                        {"b_prime_rad", settings.b_prime}}}};
            std::cout << result.dump(2) << '\n';
        } else if (cmd_sim->parsed()) {
            sim.point = {resolve_m(opts, m_opt, t_opt), -1.0};
            sim.filter = resolve_filter(opts, filter_text);
            sim.angles = {bp::parse_angle(alpha_text), bp::parse_angle(beta_text)};
            sim.seed = opts.seed;
            const bp::TagStream stream = bp::simulate_tags(sim, quadrature);
            bp::write_tags(stream, sim_out,
                           sim_format == "csv" ? bp::TagFormat::csv
                                               : bp::TagFormat::binary);
            result = {{"events", stream.events.size()},
                      {"duration_s", stream.duration_seconds()},
                      {"seed", sim.seed},
                      {"out", sim_out}};
            std::cout << result.dump(2) << '\n';
        } else if (cmd_an->parsed()) {
            if (!offsets_flag.empty())
                for (int i = 0; i < 4; ++i) offsets[i] = offsets_flag[i];
            const bp::TagStream stream = bp::read_tags(in_path);
            const bp::CoincidenceReport report = bp::analyze(stream, window, offsets);
            result = {{"singles", report.singles},
                      {"coincidences",
                       {{"rpp", report.rpp},
                        {"rpm", report.rpm},
                        {"rmp", report.rmp},
                        {"rmm", report.rmm}}},
                      {"doubles", {{"aa", report.doubles_aa}, {"bb", report.doubles_bb}}},
                      {"triples", report.triples},
                      {"window_ps", report.window},
                      {"offsets_ps", report.offsets},
                      {"duration_s", report.duration_seconds},
                      {"ambiguous", report.ambiguous}};
            if (report.coincidences() > 0) {
                const auto estimate = bp::correlation_from_report(report);
                result["E"] = estimate.e;
                result["E_std_error"] = estimate.std_error;
            }
            std::cout << result.dump(2) << '\n';
        } else if (cmd_oracle->parsed()) {
            const bp::OperatingPoint point{resolve_m(opts, m_opt, t_opt), -1.0};
            const bp::FilterSpec filter = resolve_filter(opts, filter_text);
            const bp::HwpAngles angles{bp::parse_angle(alpha_text),
                                       bp::parse_angle(beta_text)};
            const bp::CoincidenceRates closed =
                bp::general_rates(angles, point, filter, quadrature);
            bp::OracleOptions oracle_options;
            oracle_options.points_per_unit = oracle_grid_ppu;
            const bp::OracleResult oracle =
                bp::oracle_rates(angles, point, filter, oracle_options);
            const double scale = closed.total();
            const double dev = std::max({std::fabs(closed.rpp - oracle.rates.rpp),
                                         std::fabs(closed.rpm - oracle.rates.rpm),
                                         std::fabs(closed.rmp - oracle.rates.rmp),
                                         std::fabs(closed.rmm - oracle.rates.rmm)}) /
                               scale;
            result = {{"m", point.m},
                      {"filter", bp::to_string(filter)},
                      {"alpha_rad", angles.alpha},
                      {"beta_rad", angles.beta},
                      {"closed_form", rates_json(closed)},
                      {"oracle", rates_json(oracle.rates)},
                      {"grid", oracle.grid_resolution},
                      {"estimated_error", oracle.estimated_error},
                      {"max_relative_deviation", dev}};
            std::cout << result.dump(2) << '\n';
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
