// Command-line front end: wires JSON run configurations to the simulation,
// scan, efficiency and fitting pipelines and writes plot-ready CSV/JSON.
//
// Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicsim/slicsim.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double require_number(const json& j, const std::string& path, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw ConfigError(path + "." + field + ": expected a number");
    return j.at(field).get<double>();
}

double optional_number(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number()) throw ConfigError(std::string(field) + ": expected a number");
    return j.at(field).get<double>();
}

std::string require_string(const json& j, const std::string& path, const char* field) {
    if (!j.contains(field) || !j.at(field).is_string())
        throw ConfigError(path + "." + field + ": expected a string");
    return j.at(field).get<std::string>();
}

slicsim::SpinSystem parse_system(const json& cfg) {
    if (!cfg.contains("system") || !cfg.at("system").is_object())
        throw ConfigError("system: expected an object");
    const json& sys = cfg.at("system");
    // compact pair form or the general matrix form
    if (sys.contains("j_hz") && sys.at("j_hz").is_number()) {
        const double j = require_number(sys, "system", "j_hz");
        const double dnu = require_number(sys, "system", "delta_nu_hz");
        if (sys.contains("j13_hz") || sys.contains("j23_hz") || sys.contains("offset3_hz")) {
            const double j13 = optional_number(sys, "j13_hz", 0.0);
            const double j23 = optional_number(sys, "j23_hz", 0.0);
            const double off3 = optional_number(sys, "offset3_hz", 0.0);
            return slicsim::SpinSystem::pair_with_spectator(j, dnu, j13, j23, off3);
        }
        return slicsim::SpinSystem::pair(j, dnu);
    }
    if (!sys.contains("offsets_hz") || !sys.at("offsets_hz").is_array())
        throw ConfigError("system.offsets_hz: expected an array of numbers");
    const auto offsets = sys.at("offsets_hz").get<std::vector<double>>();
    const int n = static_cast<int>(offsets.size());
    if (!sys.contains("j_matrix_hz") || !sys.at("j_matrix_hz").is_array())
        throw ConfigError("system.j_matrix_hz: expected an n x n array");
    Eigen::MatrixXd jm(n, n);
    const auto& rows = sys.at("j_matrix_hz");
    if (static_cast<int>(rows.size()) != n)
        throw ConfigError("system.j_matrix_hz: expected " + std::to_string(n) + " rows");
    for (int r = 0; r < n; ++r) {
        const auto row = rows.at(r).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != n)
            throw ConfigError("system.j_matrix_hz: row " + std::to_string(r) +
                              " has the wrong length");
        for (int c = 0; c < n; ++c) jm(r, c) = row[c];
    }
    try {
        return slicsim::SpinSystem(n, offsets, jm);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
}

std::optional<slicsim::RelaxationParams> parse_relaxation(const json& cfg) {
    if (!cfg.contains("relaxation")) return std::nullopt;
    const json& r = cfg.at("relaxation");
    if (!r.is_object()) throw ConfigError("relaxation: expected an object");
    try {
        std::optional<double> t2, tcoh, lock;
        if (r.contains("t2_s")) t2 = require_number(r, "relaxation", "t2_s");
        if (r.contains("t_st_coherence_s")) tcoh = require_number(r, "relaxation", "t_st_coherence_s");
        if (r.contains("lock_damping_s")) lock = require_number(r, "relaxation", "lock_damping_s");
        return slicsim::RelaxationParams(require_number(r, "relaxation", "t1_s"),
                                         require_number(r, "relaxation", "ts_s"), t2, tcoh, lock);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("relaxation: ") + e.what());
    }
}

slicsim::PulseSequence parse_sequence(const json& cfg, const slicsim::SpinSystem& sys) {
    if (!cfg.contains("sequence") || !cfg.at("sequence").is_object())
        throw ConfigError("sequence: expected an object");
    const json& sq = cfg.at("sequence");
    const std::string type = require_string(sq, "sequence", "type");
    slicsim::PulseSequence seq;
    try {
        if (type == "slic") {
            seq = slicsim::build_slic(require_number(sq, "sequence", "nu_n_hz"),
                                      optional_number(sq, "phase_rad", 0.0),
                                      require_number(sq, "sequence", "tau_sl_s"),
                                      optional_number(sq, "tau_evolve_s", 0.0),
                                      sq.value("readout", false));
        } else if (type == "m2s") {
            slicsim::M2SParams p;
            if (sq.contains("n1") || sq.contains("tau_s")) {
                // explicit overrides for shortened trains
                p.n1 = static_cast<int>(optional_number(sq, "n1", 0));
                p.n2 = static_cast<int>(optional_number(sq, "n2", std::lround(p.n1 / 2.0)));
                p.tau_s = require_number(sq, "sequence", "tau_s");
                p.nu_e_hz = 1.0 / (4.0 * p.tau_s);
            } else {
                const double j = require_number(sq, "sequence", "j_hz");
                const double dnu = require_number(sq, "sequence", "delta_nu_hz");
                const auto mode = sq.value("tau_mode", std::string("nu_e")) == std::string("j")
                                      ? slicsim::M2STauMode::j_coupling
                                      : slicsim::M2STauMode::effective_frequency;
                p = slicsim::m2s_params(j, dnu, mode);
            }
            seq = slicsim::build_m2s(p, optional_number(sq, "tau_evolve_s", 0.0),
                                     sq.value("readout", false),
                                     optional_number(sq, "phase_rad", 0.0));
        } else if (type == "elements") {
            seq = slicsim::sequence_from_json(sq);
        } else {
            throw ConfigError("sequence.type: expected slic, m2s or elements");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sequence: ") + e.what());
    }
    const int points = static_cast<int>(optional_number(cfg, "record_points", 512));
    if (points < 1) throw ConfigError("record_points: must be >= 1");
    if (seq.record_points_s.empty() && !seq.elements.empty()) seq.with_uniform_grid(points);
    (void)sys;
    return seq;
}

std::vector<double> parse_grid(const json& g, const std::string& path) {
    if (g.is_array()) {
        const auto v = g.get<std::vector<double>>();
        if (v.empty()) throw ConfigError(path + ": empty grid");
        return v;
    }
    if (!g.is_object()) throw ConfigError(path + ": expected an array or {start, stop, count}");
    const double start = require_number(g, path, "start");
    const double stop = require_number(g, path, "stop");
    const int count = static_cast<int>(require_number(g, path, "count"));
    if (count < 1) throw ConfigError(path + ".count: must be >= 1");
    if (count == 1) return {start};
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = start + (stop - start) * double(i) / double(count - 1);
    return v;
}

std::pair<int, int> parse_pair(const json& cfg, const slicsim::SpinSystem& sys) {
    if (!cfg.contains("system") || !cfg.at("system").contains("pair")) return {0, 1};
    const auto pr = cfg.at("system").at("pair").get<std::vector<int>>();
    if (pr.size() != 2 || pr[0] < 1 || pr[1] < 1 || pr[0] > sys.n_spins || pr[1] > sys.n_spins ||
        pr[0] == pr[1])
        throw ConfigError("system.pair: expected two distinct 1-based spin indices");
    return {pr[0] - 1, pr[1] - 1};
}

std::string format_from(const json& cfg, const std::string& cli_format) {
    if (!cli_format.empty()) return cli_format;
    if (cfg.contains("output") && cfg.at("output").contains("format"))
        return cfg.at("output").at("format").get<std::string>();
    return "csv";
}

std::string output_path(const json& cfg, const std::string& cli_output) {
    if (!cli_output.empty()) return cli_output;
    if (cfg.contains("output") && cfg.at("output").contains("path"))
        return cfg.at("output").at("path").get<std::string>();
    return "";
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
}

std::string fmt_full(double v) { return slicsim::detail::fmt_full(v); }

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
    if (cfg.contains("schema") && cfg.at("schema").get<std::string>() != "slicsim-config/1")
        throw ConfigError("schema: expected slicsim-config/1");
    return cfg;
}

// ---- simulate ---------------------------------------------------------

std::string trajectory_csv(const slicsim::Trajectory& tr) {
    std::ostringstream os;
    os << "# slicsim-trajectory v1\n";
    os << "# units: SI (Hz, s)\n";
    os << "# normalization: observables divided by the initial transverse deviation;"
          " populations and coherences reported as magnitudes\n";
    os << "t_s,mx,my,mz,p_s0,p_t0,p_tp,p_tm,st_coherence\n";
    const double m0 = tr.initial_transverse > 0 ? tr.initial_transverse : 1.0;
    const double sref = tr.reference_mx >= 0 ? 1.0 : -1.0;
    for (const auto& p : tr.points) {
        os << fmt_full(p.t_s) << "," << fmt_full(sref * p.mx / m0) << ","
           << fmt_full(sref * p.my / m0) << "," << fmt_full(sref * p.mz / m0) << ","
           << fmt_full(std::abs(p.p_s0) / m0) << "," << fmt_full(std::abs(p.p_t0) / m0) << ","
           << fmt_full(std::abs(p.p_tp) / m0) << "," << fmt_full(std::abs(p.p_tm) / m0) << ","
           << fmt_full(p.st_coherence / m0) << "\n";
    }
    return os.str();
}

json trajectory_json(const slicsim::Trajectory& tr) {
    const double m0 = tr.initial_transverse > 0 ? tr.initial_transverse : 1.0;
    const double sref = tr.reference_mx >= 0 ? 1.0 : -1.0;
    json cols{{"t_s", json::array()},      {"mx", json::array()},
              {"my", json::array()},       {"mz", json::array()},
              {"p_s0", json::array()},     {"p_t0", json::array()},
              {"p_tp", json::array()},     {"p_tm", json::array()},
              {"st_coherence", json::array()}};
    for (const auto& p : tr.points) {
        cols["t_s"].push_back(p.t_s);
        cols["mx"].push_back(sref * p.mx / m0);
        cols["my"].push_back(sref * p.my / m0);
        cols["mz"].push_back(sref * p.mz / m0);
        cols["p_s0"].push_back(std::abs(p.p_s0) / m0);
        cols["p_t0"].push_back(std::abs(p.p_t0) / m0);
        cols["p_tp"].push_back(std::abs(p.p_tp) / m0);
        cols["p_tm"].push_back(std::abs(p.p_tm) / m0);
        cols["st_coherence"].push_back(p.st_coherence / m0);
    }
    return json{{"schema", "slicsim-trajectory/1"}, {"columns", cols}};
}

int cmd_simulate(const std::string& config_path, const std::string& cli_output,
                 const std::string& cli_format) {
    const json cfg = load_config(config_path);
    const auto sys = parse_system(cfg);
    const auto relax = parse_relaxation(cfg);
    const auto [pi_, pj_] = parse_pair(cfg, sys);
    auto seq = parse_sequence(cfg, sys);
    const auto tr = slicsim::execute(seq, sys, relax, pi_, pj_);
    const std::string fmt = format_from(cfg, cli_format);
    if (fmt == "csv")
        write_text(output_path(cfg, cli_output), trajectory_csv(tr));
    else if (fmt == "json")
        write_text(output_path(cfg, cli_output), trajectory_json(tr).dump(2) + "\n");
    else
        throw ConfigError("format: expected csv or json");
    return 0;
}

// ---- scan -------------------------------------------------------------

int cmd_scan(const std::string& config_path, const std::string& cli_output,
             const std::string& cli_format, std::optional<uint64_t> cli_seed,
             unsigned threads) {
    const json cfg = load_config(config_path);
    const auto sys = parse_system(cfg);
    const auto relax = parse_relaxation(cfg);
    if (!cfg.contains("scan") || !cfg.at("scan").is_object())
        throw ConfigError("scan: expected an object");
    const json& sc = cfg.at("scan");
    const std::string type = require_string(sc, "scan", "type");
    const double phase = optional_number(sc, "phase_rad", 0.0);

    slicsim::ScanCurve curve;
    if (type == "dip") {
        curve = slicsim::dip_scan(sys, require_number(sc, "scan", "tau_sl_s"),
                                  parse_grid(sc.at("grid"), "scan.grid"), relax, phase, threads);
    } else if (type == "duration") {
        curve = slicsim::duration_scan(sys, require_number(sc, "scan", "nu_n_hz"),
                                       parse_grid(sc.at("grid"), "scan.grid"),
                                       optional_number(sc, "tau_evolve_s", 0.0), relax, phase,
                                       threads);
    } else if (type == "evolve") {
        if (!relax) throw ConfigError("scan: evolve scan requires relaxation parameters");
        curve = slicsim::evolve_scan(sys, require_number(sc, "scan", "nu_n_hz"),
                                     require_number(sc, "scan", "tau_sl_s"),
                                     parse_grid(sc.at("grid"), "scan.grid"), *relax, phase,
                                     threads);
    } else {
        throw ConfigError("scan.type: expected dip, duration or evolve");
    }

    const double sigma = optional_number(cfg, "noise_sigma", 0.0);
    uint64_t seed = cli_seed.value_or(
        static_cast<uint64_t>(optional_number(cfg, "seed", 0.0)));
    if (sigma > 0.0) curve = slicsim::add_noise(curve, sigma, seed);

    const std::string fmt = format_from(cfg, cli_format);
    if (fmt == "csv")
        write_text(output_path(cfg, cli_output), slicsim::curve_to_csv(curve));
    else if (fmt == "json")
        write_text(output_path(cfg, cli_output), slicsim::curve_to_json(curve).dump(2) + "\n");
    else
        throw ConfigError("format: expected csv or json");
    return 0;
}

// ---- efficiency -------------------------------------------------------

int cmd_efficiency(const std::string& config_path, const std::string& cli_output,
                   const std::string& cli_format) {
    const json cfg = load_config(config_path);
    if (!cfg.contains("efficiency") || !cfg.at("efficiency").is_object())
        throw ConfigError("efficiency: expected an object");
    const json& ef = cfg.at("efficiency");
    const auto grid = parse_grid(ef.at("t1_dnu"), "efficiency.t1_dnu");
    std::vector<double> ratios{1000.0};
    if (ef.contains("ts_over_t1")) ratios = ef.at("ts_over_t1").get<std::vector<double>>();
    const bool optimize = ef.value("optimize_duration", false);

    std::ostringstream csv;
    csv << "# slicsim-efficiency v1\n";
    csv << "# units: dimensionless\n";
    csv << "t1_dnu,ts_over_t1,eff_m2s,eff_slic\n";
    json rows = json::array();
    for (double ratio : ratios) {
        const auto m2s = slicsim::efficiency_curve(slicsim::SequenceKind::m2s, grid, ratio);
        const auto slic =
            slicsim::efficiency_curve(slicsim::SequenceKind::slic, grid, ratio, optimize);
        for (size_t i = 0; i < grid.size(); ++i) {
            csv << fmt_full(grid[i]) << "," << fmt_full(ratio) << "," << fmt_full(m2s.y[i])
                << "," << fmt_full(slic.y[i]) << "\n";
            rows.push_back(json{{"t1_dnu", grid[i]},
                                {"ts_over_t1", ratio},
                                {"eff_m2s", m2s.y[i]},
                                {"eff_slic", slic.y[i]}});
        }
    }
    const std::string fmt = format_from(cfg, cli_format);
    if (fmt == "csv")
        write_text(output_path(cfg, cli_output), csv.str());
    else if (fmt == "json")
        write_text(output_path(cfg, cli_output),
                   json{{"schema", "slicsim-efficiency/1"}, {"rows", rows}}.dump(2) + "\n");
    else
        throw ConfigError("format: expected csv or json");
    return 0;
}

// ---- fit --------------------------------------------------------------

json fit_to_json(const slicsim::FitResult& fit) {
    json params = json::object(), errors = json::object();
    for (size_t i = 0; i < fit.param_names.size(); ++i) {
        params[fit.param_names[i]] = fit.params(static_cast<int>(i));
        errors[fit.param_names[i]] = fit.std_errors(static_cast<int>(i));
    }
    return json{{"schema", "slicsim-fit/1"},
                {"params", params},
                {"std_errors", errors},
                {"residual_norm", fit.residual_norm},
                {"converged", fit.converged},
                {"iterations", fit.iterations}};
}

int cmd_fit(const std::string& curve_path, const std::string& model,
            bool with_offset, const std::string& cli_output) {
    slicsim::ScanCurve curve;
    try {
        curve = slicsim::load_curve(curve_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    slicsim::FitResult fit;
    if (model == "lorentzian")
        fit = slicsim::fit_lorentzian_dip(curve);
    else if (model == "sin4")
        fit = slicsim::fit_sin4(curve, with_offset);
    else if (model == "exponential")
        fit = slicsim::fit_exponential(curve);
    else
        throw ConfigError("--model: expected lorentzian, sin4 or exponential");
    const std::string text = fit_to_json(fit).dump(2) + "\n";
    std::cout << text;
    if (!cli_output.empty()) write_text(cli_output, text);
    return 0;  // an unconverged fit still reports its result
}

// ---- m2s-params -------------------------------------------------------

int cmd_m2s_params(double j, double dnu, const std::string& tau_mode) {
    if (!(j > dnu) || !(dnu > 0.0)) throw ConfigError("requires --j > --dnu > 0");
    const auto mode = tau_mode == "j" ? slicsim::M2STauMode::j_coupling
                                      : slicsim::M2STauMode::effective_frequency;
    const auto p = slicsim::m2s_params(j, dnu, mode);
    const double t_lock = slicsim::optimal_slic_duration(dnu);
    const double t_train_ideal = 3.0 * std::numbers::pi / (8.0 * dnu);
    std::printf("n1                 %d\n", p.n1);
    std::printf("n2                 %d\n", p.n2);
    std::printf("tau                %.6g ms\n", 1e3 * p.tau_s);
    std::printf("nu_e               %.6g Hz\n", p.nu_e_hz);
    std::printf("train duration     %.6g s  (2 tau (n1+n2))\n", p.duration());
    std::printf("ideal train time   %.6g s  (3 pi / (8 dnu))\n", t_train_ideal);
    std::printf("ideal lock time    %.6g s  (1 / (sqrt(2) dnu))\n", t_lock);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singlet-state pulse sequence simulator (matched spin locks and echo trains)"};
    app.require_subcommand(1);

    std::string config_path, output, format, curve_path, model = "lorentzian",
                             tau_mode = "nu_e";
    bool with_offset = false;
    unsigned threads = 1;
    std::optional<uint64_t> seed;
    double j = 0.0, dnu = 0.0;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
        cmd->add_option("--output", output, "output path (default from config, else stdout)");
        cmd->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json", ""}));
    };

    auto* simulate = app.add_subcommand("simulate", "trajectory of a pulse sequence");
    add_common(simulate, true);

    auto* scan = app.add_subcommand("scan", "dip, duration or evolve scan");
    add_common(scan, true);
    scan->add_option("--seed", seed, "noise seed override");
    scan->add_option("--threads", threads, "worker threads for scan points");

    auto* efficiency = app.add_subcommand("efficiency", "transfer-efficiency curves");
    add_common(efficiency, true);

    auto* fit = app.add_subcommand("fit", "fit a model to a curve file");
    fit->add_option("curve", curve_path, "curve file (CSV or JSON)")->required();
    fit->add_option("--model", model, "lorentzian, sin4 or exponential")
        ->check(CLI::IsMember({"lorentzian", "sin4", "exponential"}));
    fit->add_flag("--with-offset", with_offset, "add a constant offset to the sin4 model");
    fit->add_option("--output", output, "also write the result JSON to this path");

    auto* m2s = app.add_subcommand("m2s-params", "echo-train parameters for a given pair");
    m2s->add_option("--j", j, "J coupling (Hz)")->required();
    m2s->add_option("--dnu", dnu, "chemical-shift difference (Hz)")->required();
    m2s->add_option("--tau-mode", tau_mode, "tau from nu_e (default) or j")
        ->check(CLI::IsMember({"nu_e", "j"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, output, format);
        if (scan->parsed()) return cmd_scan(config_path, output, format, seed, threads);
        if (efficiency->parsed()) return cmd_efficiency(config_path, output, format);
        if (fit->parsed()) return cmd_fit(curve_path, model, with_offset, output);
        if (m2s->parsed()) return cmd_m2s_params(j, dnu, tau_mode);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
