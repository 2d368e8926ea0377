// recabs: spectra, compensation planning and enhancement analysis for
// inhomogeneously broadened multilevel absorbers.
//
// Subcommands: spectrum | plan | predict | optimize | sweep | figure | selftest
// Exit codes: 0 success, 1 physics/validation error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "recabs/acceptance.hpp"
#include "recabs/ensemble.hpp"
#include "recabs/figures.hpp"
#include "recabs/io.hpp"
#include "recabs/optimize.hpp"
#include "recabs/recovery.hpp"

namespace {

using nlohmann::ordered_json;
using namespace recabs;

void require_keys(const ordered_json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

double get_num(const ordered_json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ValidationError("'" + key + "' must be a number");
    return j.at(key).get<double>();
}

struct RunConfig {
    LevelScheme scheme;
    std::string scheme_kind;  // preset name or "file"
    PresetParams params;      // meaningful when scheme came from a preset
    int grid_n = 4001;
    double grid_span = 5.0;
    int workers = 0;
    std::string output;
    double scan_min = 0.0, scan_max = 0.0;
    int scan_points = 0;
    double window_min = 0.0, window_max = 0.0;
    bool has_window = false;
    ordered_json raw;  // command-specific sections
};

PresetParams params_from_json(const ordered_json& j) {
    require_keys(j,
                 {"omega", "delta", "omega_r", "delta_r", "gamma", "gamma_r", "gamma_sg",
                  "sigma", "sigma2", "eta", "probe_amplitude", "e_branch_to_g",
                  "s_decay_rate", "extra_splitting"},
                 "scheme.params");
    PresetParams p;
    p.omega = get_num(j, "omega", p.omega);
    p.delta = get_num(j, "delta", p.delta);
    p.omega_r = get_num(j, "omega_r", p.omega_r);
    p.delta_r = get_num(j, "delta_r", p.delta_r);
    p.gamma = get_num(j, "gamma", p.gamma);
    p.gamma_r = get_num(j, "gamma_r", p.gamma_r);
    p.gamma_sg = get_num(j, "gamma_sg", p.gamma_sg);
    p.sigma = get_num(j, "sigma", p.sigma);
    p.sigma2 = get_num(j, "sigma2", p.sigma2);
    p.eta = get_num(j, "eta", p.eta);
    if (j.contains("probe_amplitude")) p.probe_amplitude = j.at("probe_amplitude").get<double>();
    p.e_branch_to_g = get_num(j, "e_branch_to_g", p.e_branch_to_g);
    p.s_decay_rate = get_num(j, "s_decay_rate", p.s_decay_rate);
    p.extra_splitting = get_num(j, "extra_splitting", p.extra_splitting);
    return p;
}

void apply_param_override(PresetParams& p, const std::string& key, double v) {
    if (key == "omega") p.omega = v;
    else if (key == "delta") p.delta = v;
    else if (key == "omega_r") p.omega_r = v;
    else if (key == "delta_r") p.delta_r = v;
    else if (key == "gamma") p.gamma = v;
    else if (key == "gamma_r") p.gamma_r = v;
    else if (key == "gamma_sg") p.gamma_sg = v;
    else if (key == "sigma") p.sigma = v;
    else if (key == "sigma2") p.sigma2 = v;
    else if (key == "eta") p.eta = v;
    else if (key == "probe_amplitude") p.probe_amplitude = v;
    else if (key == "e_branch_to_g") p.e_branch_to_g = v;
    else if (key == "s_decay_rate") p.s_decay_rate = v;
    else if (key == "extra_splitting") p.extra_splitting = v;
    else throw ValidationError("unknown scheme parameter '" + key + "'");
}

struct Overrides {
    std::vector<std::pair<std::string, double>> set_params;
    std::optional<std::string> output;
    std::optional<int> workers, grid_n, points;
    std::optional<double> grid_span, scan_min, scan_max, window_min, window_max;
};

RunConfig parse_config(const std::string& config_path, const Overrides& ov,
                       bool needs_scheme) {
    RunConfig cfg;
    ordered_json j = ordered_json::object();
    if (!config_path.empty()) {
        if (!std::filesystem::exists(config_path)) {
            throw ValidationError("config file does not exist: " + config_path);
        }
        try {
            j = ordered_json::parse(read_text_file(config_path));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("config " + config_path + ": " + e.what());
        }
    }
    require_keys(j, {"scheme", "grid", "workers", "output", "spectrum", "window", "sweep",
                     "optimize"},
                 "config");

    // Scheme: preset + params, inline definition, or external file.
    if (j.contains("scheme")) {
        const auto& sj = j.at("scheme");
        require_keys(sj, {"preset", "params", "file", "inline"}, "scheme");
        if (sj.contains("preset")) {
            cfg.scheme_kind = sj.at("preset").get<std::string>();
            cfg.params = sj.contains("params") ? params_from_json(sj.at("params"))
                                               : PresetParams{};
            for (const auto& [key, value] : ov.set_params) {
                apply_param_override(cfg.params, key, value);
            }
            cfg.scheme = preset(cfg.scheme_kind, cfg.params);
        } else if (sj.contains("file")) {
            const std::string path = sj.at("file").get<std::string>();
            if (!std::filesystem::exists(path)) {
                throw ValidationError("scheme file does not exist: " + path);
            }
            cfg.scheme_kind = "file";
            if (!ov.set_params.empty()) {
                throw ValidationError("--set overrides require a preset scheme");
            }
            cfg.scheme = load_scheme(path);
        } else if (sj.contains("inline")) {
            cfg.scheme_kind = "inline";
            if (!ov.set_params.empty()) {
                throw ValidationError("--set overrides require a preset scheme");
            }
            cfg.scheme = scheme_from_json(sj.at("inline").dump());
        } else {
            throw ValidationError("scheme needs 'preset', 'file' or 'inline'");
        }
    } else if (needs_scheme) {
        cfg.scheme_kind = "n_type";
        for (const auto& [key, value] : ov.set_params) {
            apply_param_override(cfg.params, key, value);
        }
        cfg.scheme = preset(cfg.scheme_kind, cfg.params);
    }

    if (j.contains("grid")) {
        require_keys(j.at("grid"), {"n", "span"}, "grid");
        cfg.grid_n = static_cast<int>(get_num(j.at("grid"), "n", cfg.grid_n));
        cfg.grid_span = get_num(j.at("grid"), "span", cfg.grid_span);
    }
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("spectrum")) {
        require_keys(j.at("spectrum"), {"min", "max", "points"}, "spectrum");
        cfg.scan_min = get_num(j.at("spectrum"), "min", -400.0);
        cfg.scan_max = get_num(j.at("spectrum"), "max", 150.0);
        cfg.scan_points = static_cast<int>(get_num(j.at("spectrum"), "points", 551));
    }
    if (j.contains("window")) {
        require_keys(j.at("window"), {"min", "max"}, "window");
        cfg.window_min = get_num(j.at("window"), "min", 0.0);
        cfg.window_max = get_num(j.at("window"), "max", 0.0);
        cfg.has_window = true;
    }
    cfg.raw = j;

    if (ov.output) cfg.output = *ov.output;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.grid_n) cfg.grid_n = *ov.grid_n;
    if (ov.grid_span) cfg.grid_span = *ov.grid_span;
    if (ov.points) cfg.scan_points = *ov.points;
    if (ov.scan_min) cfg.scan_min = *ov.scan_min;
    if (ov.scan_max) cfg.scan_max = *ov.scan_max;
    if (ov.window_min) {
        cfg.window_min = *ov.window_min;
        cfg.has_window = true;
    }
    if (ov.window_max) {
        cfg.window_max = *ov.window_max;
        cfg.has_window = true;
    }
    return cfg;
}

void emit(const std::string& output, const std::string& text) {
    if (output.empty() || output == "-") {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(output, text);
    }
}

int cmd_spectrum(const RunConfig& cfg) {
    if (cfg.scan_points < 2) throw ValidationError("spectrum.points must be at least 2");
    if (!(cfg.scan_max > cfg.scan_min)) {
        throw ValidationError("spectrum range is degenerate");
    }
    const QuadratureGrid grid = quadrature_grid(cfg.grid_n, cfg.grid_span);
    const Spectrum s = spectrum(cfg.scheme, cfg.scan_min, cfg.scan_max, cfg.scan_points,
                                grid, cfg.workers);
    const std::string out = cfg.output.empty() ? "spectrum.csv" : cfg.output;
    write_spectrum_csv(s, out);
    std::printf("wrote %s (%d points)\n", out.c_str(), cfg.scan_points);
    return 0;
}

int cmd_plan(double omega, double delta, double eta, const std::string& output) {
    const CompensationPlan plan = compensation_plan(omega, delta, eta);
    std::ostringstream out;
    out << "{\n  \"omega_r\": " << fmt9(plan.omega_r) << ",\n  \"delta_r\": "
        << fmt9(plan.delta_r) << ",\n  \"eta\": " << fmt9(plan.eta) << "\n}\n";
    emit(output, out.str());
    return 0;
}

int cmd_predict(double omega, double delta, double sigma, double gamma, double omega_r,
                double delta_r, double sigma_r, double gamma_r, double gamma_sg,
                const std::string& output) {
    const ScatteringRates rates =
        scattering_rates(omega, delta, sigma, gamma, omega_r, delta_r, sigma_r, gamma_r);
    const double beta0 = inhomogeneous_limit(sigma, gamma);
    const EnhancementPrediction p = predicted_beta(rates, gamma_sg, beta0);
    std::ostringstream out;
    out << "{\n  \"beta0\": " << fmt9(p.beta0) << ",\n  \"gamma_sc\": " << fmt9(p.gamma_sc)
        << ",\n  \"gamma_sc_r\": " << fmt9(p.gamma_sc_r) << ",\n  \"mu\": " << fmt9(p.mu)
        << ",\n  \"beta\": " << fmt9(p.beta) << "\n}\n";
    emit(output, out.str());
    return 0;
}

int cmd_optimize(const RunConfig& cfg) {
    if (!cfg.raw.contains("optimize")) {
        throw ValidationError("optimize command needs an 'optimize' config section");
    }
    const auto& oj = cfg.raw.at("optimize");
    require_keys(oj, {"omega_r_min", "omega_r_max", "delta_r_min", "delta_r_max",
                      "scan_step", "coarse_points"},
                 "optimize");
    if (!cfg.has_window) throw ValidationError("optimize needs a 'window' section");

    OptimizeBounds bounds;
    // Bounds are drive amplitudes (matrix-element units); the scheme stores
    // twice that.
    bounds.omega_r_min = 2.0 * get_num(oj, "omega_r_min", 0.0);
    bounds.omega_r_max = 2.0 * get_num(oj, "omega_r_max", 0.0);
    bounds.delta_r_min = get_num(oj, "delta_r_min", 0.0);
    bounds.delta_r_max = get_num(oj, "delta_r_max", 0.0);

    OptimizeSettings settings;
    settings.eval.window_min = cfg.window_min;
    settings.eval.window_max = cfg.window_max;
    settings.eval.scan_step = get_num(oj, "scan_step", 0.1);
    settings.eval.grid_n = cfg.grid_n;
    settings.eval.grid_span = cfg.grid_span;
    settings.eval.workers = cfg.workers;
    settings.coarse_points = static_cast<int>(get_num(oj, "coarse_points", 11));

    const OptimumReport r = maximize_beta(cfg.scheme, bounds, settings);
    std::ostringstream out;
    out << "{\n  \"omega_r\": " << fmt9(r.omega_r / 2.0) << ",\n  \"delta_r\": "
        << fmt9(r.delta_r) << ",\n  \"beta\": " << fmt9(r.beta)
        << ",\n  \"evaluations\": " << r.evaluations << ",\n  \"bounds_exclude_plan\": "
        << (r.bounds_exclude_plan ? "true" : "false") << ",\n  \"trace\": [";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        out << "\n    [" << fmt9(r.trace[i][0] / 2.0) << ", " << fmt9(r.trace[i][1]) << ", "
            << fmt9(r.trace[i][2]) << "]" << (i + 1 < r.trace.size() ? "," : "");
    }
    out << "\n  ]\n}\n";
    emit(cfg.output, out.str());
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    if (!cfg.raw.contains("sweep")) {
        throw ValidationError("sweep command needs a 'sweep' config section");
    }
    const auto& sj = cfg.raw.at("sweep");
    require_keys(sj, {"quantity", "axes", "scan_step", "threshold"}, "sweep");

    SweepSpec spec;
    spec.base = cfg.scheme;
    spec.quantity = derived_quantity_from_string(
        sj.contains("quantity") ? sj.at("quantity").get<std::string>() : "beta");
    if (!sj.contains("axes") || !sj.at("axes").is_array() || sj.at("axes").empty()) {
        throw ValidationError("sweep.axes must be a non-empty array");
    }
    for (const auto& aj : sj.at("axes")) {
        require_keys(aj, {"path", "values"}, "sweep axis");
        SweepAxis axis;
        axis.path = aj.at("path").get<std::string>();
        for (const auto& v : aj.at("values")) axis.values.push_back(v.get<double>());
        spec.axes.push_back(std::move(axis));
    }
    if (!cfg.has_window) throw ValidationError("sweep needs a 'window' section");
    spec.eval.window_min = cfg.window_min;
    spec.eval.window_max = cfg.window_max;
    spec.eval.scan_step = get_num(sj, "scan_step", 0.1);
    spec.eval.threshold = get_num(sj, "threshold", 0.5);
    spec.eval.grid_n = cfg.grid_n;
    spec.eval.grid_span = cfg.grid_span;

    const auto rows = sweep(spec, cfg.workers);
    const std::string out = cfg.output.empty() ? "sweep.csv" : cfg.output;
    write_text_file(out, sweep_table_csv(spec, rows));

    std::ostringstream manifest;
    manifest << "{\n  \"command\": \"sweep\",\n  \"quantity\": \""
             << to_string(spec.quantity) << "\",\n  \"rows\": " << rows.size()
             << ",\n  \"files\": [\"" << out << "\"]\n}\n";
    write_text_file(out + ".manifest.json", manifest.str());
    std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
    return 0;
}

int cmd_figure(const std::string& id, const std::string& out_dir, bool fast, int workers) {
    FigureSettings fs;
    fs.out_dir = out_dir;
    fs.fast = fast;
    fs.workers = workers;
    const auto files = reproduce_figure(figure_id_from_string(id), fs);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return 0;
}

int cmd_selftest(const std::string& criteria, const std::string& out_dir, int workers) {
    AcceptanceOptions options;
    options.out_dir = out_dir;
    options.workers = workers;
    if (!criteria.empty()) {
        std::istringstream in(criteria);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            options.criteria.push_back(std::stoi(tok));
        }
    }
    const auto results = run_acceptance(options);
    return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recabs: absorption recovery in inhomogeneously broadened media"};
    app.require_subcommand(1);

    std::string config_path, output, criteria, figure_id_arg;
    std::string out_dir = "figures";
    bool fast = false;
    Overrides ov;
    std::vector<std::string> set_args;
    int workers_flag = -1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--set", set_args,
                        "override a scheme parameter, e.g. --set delta_r=-300");
        cmd->add_option("--output", [&](const auto& v) { ov.output = v[0]; return true; },
                        "output path");
        cmd->add_option("--workers", [&](const auto& v) { ov.workers = std::stoi(v[0]); return true; },
                        "worker threads (0 = auto)");
        cmd->add_option("--grid-n", [&](const auto& v) { ov.grid_n = std::stoi(v[0]); return true; },
                        "ensemble grid size");
        cmd->add_option("--grid-span", [&](const auto& v) { ov.grid_span = std::stod(v[0]); return true; },
                        "ensemble grid span in sigma units");
    };

    auto* sp = app.add_subcommand("spectrum", "ensemble absorption spectrum CSV");
    add_common(sp);
    sp->add_option("--min", [&](const auto& v) { ov.scan_min = std::stod(v[0]); return true; },
                   "probe detuning min (MHz)");
    sp->add_option("--max", [&](const auto& v) { ov.scan_max = std::stod(v[0]); return true; },
                   "probe detuning max (MHz)");
    sp->add_option("--points", [&](const auto& v) { ov.points = std::stoi(v[0]); return true; },
                   "number of scan points");

    double omega = 29.0, delta = -270.0, eta = 1.0;
    auto* pl = app.add_subcommand("plan", "compensation-condition recovery parameters");
    pl->add_option("--omega", omega, "coupling amplitude (MHz)")->required();
    pl->add_option("--delta", delta, "coupling detuning (MHz)")->required();
    pl->add_option("--eta", eta, "wavevector ratio k_r/k");
    pl->add_option("--out", output, "output path (default stdout)");

    double p_sigma = 220.0, p_gamma = 2.875, p_omega_r = 29.0, p_delta_r = -270.0,
           p_sigma_r = 220.0, p_gamma_r = 3.033, p_gamma_sg = 0.35;
    auto* pr = app.add_subcommand("predict", "closed-form enhancement prediction");
    pr->add_option("--omega", omega, "coupling amplitude (MHz)")->required();
    pr->add_option("--delta", delta, "coupling detuning (MHz)")->required();
    pr->add_option("--sigma", p_sigma, "one-photon inhomogeneous std (MHz)");
    pr->add_option("--gamma", p_gamma, "probe-line HWHM (MHz)");
    pr->add_option("--omega-r", p_omega_r, "recovery amplitude (MHz)")->required();
    pr->add_option("--delta-r", p_delta_r, "recovery detuning (MHz)")->required();
    pr->add_option("--sigma-r", p_sigma_r, "recovery-transition std (MHz)");
    pr->add_option("--gamma-r", p_gamma_r, "recovery-line HWHM (MHz)");
    pr->add_option("--gamma-sg", p_gamma_sg, "bare two-photon width (MHz)");
    pr->add_option("--out", output, "output path (default stdout)");

    auto* op = app.add_subcommand("optimize", "maximize beta over the recovery field");
    add_common(op);
    auto* sw = app.add_subcommand("sweep", "Cartesian parameter sweep");
    add_common(sw);

    auto* fg = app.add_subcommand("figure", "emit a dataset family");
    fg->add_option("--id", figure_id_arg, "fig1bd | fig2 | fig3a | fig3b | fig4 | fig5")
        ->required();
    fg->add_option("--out-dir", out_dir, "output directory");
    fg->add_flag("--fast", fast, "coarse grids for a quick look");
    fg->add_option("--workers", workers_flag, "worker threads (0 = auto)");

    auto* st = app.add_subcommand("selftest", "run the acceptance criteria");
    st->add_option("--criteria", criteria, "comma-separated criterion ids (default all)");
    st->add_option("--out-dir", out_dir, "artifact directory")->capture_default_str();
    st->add_option("--workers", workers_flag, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (const auto& kv : set_args) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ValidationError("--set expects key=value, got '" + kv + "'");
            }
            ov.set_params.emplace_back(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
        }

        if (sp->parsed()) return cmd_spectrum(parse_config(config_path, ov, true));
        if (pl->parsed()) return cmd_plan(omega, delta, eta, output);
        if (pr->parsed()) {
            return cmd_predict(omega, delta, p_sigma, p_gamma, p_omega_r, p_delta_r,
                               p_sigma_r, p_gamma_r, p_gamma_sg, output);
        }
        if (op->parsed()) return cmd_optimize(parse_config(config_path, ov, true));
        if (sw->parsed()) return cmd_sweep(parse_config(config_path, ov, true));
        if (fg->parsed()) {
            return cmd_figure(figure_id_arg, out_dir, fast, std::max(workers_flag, 0));
        }
        if (st->parsed()) {
            return cmd_selftest(criteria, out_dir == "figures" ? "selftest_out" : out_dir,
                                std::max(workers_flag, 0));
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
