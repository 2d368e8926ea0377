#include "recabs/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "recabs/io.hpp"
#include "recabs/liouville.hpp"
#include "recabs/parallel.hpp"
#include "recabs/recovery.hpp"

namespace recabs {

namespace {

std::vector<double> merged_scan(double coarse_min, double coarse_max, double coarse_step,
                                double fine_min, double fine_max, double fine_step) {
    std::vector<double> pts;
    for (double x = coarse_min; x <= coarse_max + 1e-9; x += coarse_step) pts.push_back(x);
    for (double x = fine_min; x <= fine_max + 1e-9; x += fine_step) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              pts.end());
    return pts;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_table(const std::string& path, const std::vector<std::string>& headers,
                 const std::vector<std::vector<double>>& columns) {
    std::ostringstream out;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        out << headers[c] << (c + 1 < headers.size() ? ',' : '\n');
    }
    for (std::size_t r = 0; r < columns.front().size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << fmt9(columns[c][r]) << (c + 1 < columns.size() ? ',' : '\n');
        }
    }
    write_text_file(path, out.str());
}

struct ManifestEntry {
    std::string key;
    std::string value;  // already formatted (number or quoted string)
};

void write_manifest(const std::string& path, FigureId id,
                    const std::vector<std::string>& files,
                    const std::vector<ManifestEntry>& params) {
    std::ostringstream out;
    out << "{\n  \"figure\": \"" << to_string(id) << "\",\n  \"files\": [";
    for (std::size_t i = 0; i < files.size(); ++i) {
        out << '"' << std::filesystem::path(files[i]).filename().string() << '"'
            << (i + 1 < files.size() ? ", " : "");
    }
    out << "],\n  \"parameters\": {";
    for (std::size_t i = 0; i < params.size(); ++i) {
        out << "\n    \"" << params[i].key << "\": " << params[i].value
            << (i + 1 < params.size() ? "," : "\n  ");
    }
    out << "}\n}\n";
    write_text_file(path, out.str());
}

}  // namespace

FigureId figure_id_from_string(const std::string& name) {
    if (name == "fig1bd") return FigureId::Fig1bd;
    if (name == "fig2") return FigureId::Fig2;
    if (name == "fig3a") return FigureId::Fig3a;
    if (name == "fig3b") return FigureId::Fig3b;
    if (name == "fig4") return FigureId::Fig4;
    if (name == "fig5") return FigureId::Fig5;
    throw UnknownFigure("unknown figure id: " + name);
}

std::string to_string(FigureId id) {
    switch (id) {
        case FigureId::Fig1bd: return "fig1bd";
        case FigureId::Fig2: return "fig2";
        case FigureId::Fig3a: return "fig3a";
        case FigureId::Fig3b: return "fig3b";
        case FigureId::Fig4: return "fig4";
        case FigureId::Fig5: return "fig5";
    }
    throw UnknownFigure("bad figure id value");
}

PresetParams ladder_defaults() {
    PresetParams p;
    p.omega = 55.0;
    p.delta = 0.0;
    p.omega_r = 45.0;
    p.delta_r = 0.0;
    p.gamma = 3.033;    // D2 probe line
    p.gamma_r = 1.0;    // Rydberg level
    p.gamma_sg = 1.25;  // includes the |s> radiative decay
    p.sigma = 220.0;
    p.sigma2 = 1.0;
    // Recovery-to-coupling wavevector ratio matching the compensation
    // condition for the default amplitude pair.
    p.eta = (45.0 * 45.0) / (55.0 * 55.0);
    p.s_decay_rate = 0.66;
    return p;
}

PresetParams far_detuned_symmetric(double mu) {
    PresetParams p;
    p.delta = -5000.0;
    p.delta_r = -5000.0;
    p.gamma = 2.875;
    p.gamma_r = 2.875;
    p.gamma_sg = 0.35;
    p.sigma = 220.0;
    p.eta = 1.0;
    p.omega = mu * std::sqrt((p.delta * p.delta + p.sigma * p.sigma) * p.gamma_sg /
                             (p.gamma + p.gamma_r));
    p.omega_r = p.omega;
    return p;
}

std::vector<Fig4Point> saturation_dataset(const std::vector<double>& mus, int grid_n,
                                          int workers) {
    std::vector<Fig4Point> points(mus.size());
    const QuadratureGrid grid = quadrature_grid(grid_n, 5.0);
    const double reference =
        reference_peak_height(preset(PresetKind::NType, far_detuned_symmetric(1.0)), grid,
                              workers);
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const double mu = mus[i];
        const PresetParams p = far_detuned_symmetric(mu);
        const LevelScheme scheme = preset(PresetKind::NType, p);

        EvalSettings eval;
        const double half_width =
            std::clamp(5.0 * p.gamma_sg * (1.0 + mu * mu), 10.0, 40.0);
        eval.window_min = p.delta - half_width;
        eval.window_max = p.delta + half_width;
        eval.scan_step = std::max(0.05, half_width / 150.0);
        eval.grid_n = grid_n;
        eval.workers = workers;

        points[i] = {mu, p.omega, evaluate_beta(scheme, eval, reference)};
    }
    return points;
}

namespace {

std::vector<std::string> figure_1bd(const FigureSettings& fs) {
    const PresetParams p;  // vapor defaults, recovery at the compensation point
    const int grid_n = fs.fast ? 501 : 4001;
    const QuadratureGrid grid = quadrature_grid(grid_n, 5.0);
    const double step = fs.fast ? 0.2 : 0.05;
    std::vector<double> detunings;
    for (double x = p.delta - 15.0; x <= p.delta + 15.0 + 1e-9; x += step) {
        detunings.push_back(x);
    }
    const std::vector<double> absorbers{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};

    std::vector<std::string> files;
    const LevelScheme lambda = preset(PresetKind::Lambda, p);
    const LevelScheme ntype = preset(PresetKind::NType, p);
    const double limit_peak = reference_peak_height(ntype, grid, fs.workers);

    for (const auto& [scheme, tag] :
         {std::pair<const LevelScheme&, const char*>{lambda, "fig1b"},
          std::pair<const LevelScheme&, const char*>{ntype, "fig1d"}}) {
        const AbsorberModel model(scheme);
        std::vector<std::vector<double>> cols{detunings};
        std::vector<std::string> headers{"probe_detuning_mhz"};
        for (double u : absorbers) {
            std::vector<double> col(detunings.size());
            parallel_for(static_cast<int>(detunings.size()), fs.workers, [&](int i) {
                col[i] = model.absorption(u, detunings[i]);
            });
            std::ostringstream h;
            h << "absorber_u_" << u;
            headers.push_back(h.str());
            cols.push_back(std::move(col));
        }
        const Spectrum sum = spectrum_at(model, detunings, grid, fs.workers);
        headers.push_back("ensemble_sum");
        cols.push_back(sum.absorption);

        const std::string path = join_path(fs.out_dir, std::string(tag) + ".csv");
        write_table(path, headers, cols);
        files.push_back(path);
    }

    const std::string manifest = join_path(fs.out_dir, "fig1bd_manifest.json");
    write_manifest(manifest, FigureId::Fig1bd, files,
                   {{"omega", fmt9(p.omega)},
                    {"delta", fmt9(p.delta)},
                    {"omega_r", fmt9(p.omega_r)},
                    {"delta_r", fmt9(p.delta_r)},
                    {"sigma", fmt9(p.sigma)},
                    {"grid_n", std::to_string(grid_n)},
                    {"inhomogeneous_limit_peak", fmt9(limit_peak)}});
    files.push_back(manifest);
    return files;
}

std::vector<std::string> figure_2(const FigureSettings& fs) {
    const PresetParams p;
    const int grid_n = fs.fast ? 501 : 4001;
    const QuadratureGrid grid = quadrature_grid(grid_n, 5.0);
    const std::vector<double> detunings =
        fs.fast ? merged_scan(-450.0, 150.0, 10.0, -280.0, -260.0, 0.5)
                : merged_scan(-450.0, 150.0, 1.0, -280.0, -260.0, 0.05);

    const Spectrum off =
        spectrum_at(AbsorberModel(preset(PresetKind::Lambda, p)), detunings, grid, fs.workers);
    const Spectrum on =
        spectrum_at(AbsorberModel(preset(PresetKind::NType, p)), detunings, grid, fs.workers);
    const double limit_peak =
        reference_peak_height(preset(PresetKind::NType, p), grid, fs.workers);

    const std::string path = join_path(fs.out_dir, "fig2.csv");
    write_table(path, {"probe_detuning_mhz", "absorption_no_recovery",
                       "absorption_with_recovery"},
                {off.probe_detunings, off.absorption, on.absorption});

    const std::string manifest = join_path(fs.out_dir, "fig2_manifest.json");
    write_manifest(manifest, FigureId::Fig2, {path},
                   {{"omega", fmt9(p.omega)},
                    {"delta", fmt9(p.delta)},
                    {"omega_r", fmt9(p.omega_r)},
                    {"delta_r", fmt9(p.delta_r)},
                    {"grid_n", std::to_string(grid_n)},
                    {"inhomogeneous_limit_peak", fmt9(limit_peak)}});
    return {path, manifest};
}

std::vector<std::string> figure_3(FigureId id, const FigureSettings& fs) {
    const bool vs_omega = (id == FigureId::Fig3a);
    const int grid_n = fs.fast ? 501 : 4001;

    SweepSpec spec;
    spec.quantity = DerivedQuantity::Beta;
    spec.eval.grid_n = grid_n;
    spec.eval.scan_step = fs.fast ? 0.4 : 0.1;
    spec.eval.workers = 1;

    std::vector<std::string> files;
    std::vector<std::vector<double>> cols;
    std::vector<std::string> headers;

    if (vs_omega) {
        // One family per coupling amplitude; the recovery detuning stays at
        // the compensation point.
        const std::vector<double> omegas = fs.fast ? std::vector<double>{29.0}
                                                   : std::vector<double>{15.0, 22.0, 29.0, 36.0};
        std::vector<double> omega_r_axis;
        for (double w = 5.0; w <= 55.0 + 1e-9; w += fs.fast ? 10.0 : 2.5) {
            omega_r_axis.push_back(w);
        }
        headers.push_back("omega_r");
        cols.push_back(omega_r_axis);
        for (double omega : omegas) {
            PresetParams p;
            p.omega = omega;
            spec.base = preset(PresetKind::NType, p);
            spec.eval.window_min = p.delta - 15.0;
            spec.eval.window_max = p.delta + 15.0;
            spec.axes = {{"field:recovery:rabi", {}}};
            for (double w : omega_r_axis) spec.axes[0].values.push_back(2.0 * w);
            const auto rows = sweep(spec, fs.workers);
            std::vector<double> beta_col;
            for (const auto& row : rows) beta_col.push_back(row.ok ? row.value : NAN);
            std::ostringstream h;
            h << "beta_omega_" << omega;
            headers.push_back(h.str());
            cols.push_back(std::move(beta_col));
        }
    } else {
        PresetParams p;
        spec.base = preset(PresetKind::NType, p);
        spec.eval.window_min = p.delta - 15.0;
        spec.eval.window_max = p.delta + 15.0;
        std::vector<double> delta_r_axis;
        for (double d = -330.0; d <= -210.0 + 1e-9; d += fs.fast ? 20.0 : 4.0) {
            delta_r_axis.push_back(d);
        }
        spec.axes = {{"field:recovery:detuning", delta_r_axis}};
        const auto rows = sweep(spec, fs.workers);
        std::vector<double> beta_col;
        for (const auto& row : rows) beta_col.push_back(row.ok ? row.value : NAN);
        headers = {"delta_r", "beta"};
        cols = {delta_r_axis, std::move(beta_col)};
    }

    const std::string name = to_string(id);
    const std::string path = join_path(fs.out_dir, name + ".csv");
    write_table(path, headers, cols);
    files.push_back(path);

    const std::string manifest = join_path(fs.out_dir, name + "_manifest.json");
    write_manifest(manifest, id, files,
                   {{"delta", fmt9(-270.0)}, {"grid_n", std::to_string(grid_n)}});
    files.push_back(manifest);
    return files;
}

std::vector<std::string> figure_4(const FigureSettings& fs) {
    std::vector<double> mus;
    const int n_mu = fs.fast ? 4 : 9;
    for (int i = 0; i < n_mu; ++i) {
        mus.push_back(0.3 * std::pow(3.0 / 0.3, double(i) / (n_mu - 1)));
    }
    mus.push_back(4.0);  // deep-saturation point

    const int grid_n = fs.fast ? 501 : 4001;
    const auto points = saturation_dataset(mus, grid_n, fs.workers);

    std::vector<double> mu_col, omega_col, beta_col;
    for (const auto& pt : points) {
        mu_col.push_back(pt.mu);
        omega_col.push_back(pt.omega);
        beta_col.push_back(pt.beta);
    }
    const std::string sim_path = join_path(fs.out_dir, "fig4_sim.csv");
    write_table(sim_path, {"mu", "omega", "beta"}, {mu_col, omega_col, beta_col});

    // Saturation-form curve and its asymptote.
    const PresetParams p = far_detuned_symmetric(1.0);
    const double beta0 = inhomogeneous_limit(p.sigma, p.gamma);
    std::vector<double> mu_curve, beta_curve;
    for (double m = 0.05; m <= 5.0 + 1e-9; m += 0.05) {
        mu_curve.push_back(m);
        beta_curve.push_back(beta_saturation_form(beta0, p.gamma, p.gamma_r, m));
    }
    const std::string curve_path = join_path(fs.out_dir, "fig4_saturation_form.csv");
    write_table(curve_path, {"mu", "beta"}, {mu_curve, beta_curve});

    const std::string manifest = join_path(fs.out_dir, "fig4_manifest.json");
    write_manifest(manifest, FigureId::Fig4, {sim_path, curve_path},
                   {{"delta", fmt9(p.delta)},
                    {"beta0", fmt9(beta0)},
                    {"asymptote", fmt9(beta0 * p.gamma / (p.gamma + p.gamma_r))},
                    {"grid_n", std::to_string(grid_n)}});
    return {sim_path, curve_path, manifest};
}

std::vector<std::string> figure_5(const FigureSettings& fs) {
    const PresetParams p = ladder_defaults();
    const int grid_n = fs.fast ? 501 : 4001;
    const QuadratureGrid grid = quadrature_grid(grid_n, 5.0);
    const std::vector<double> detunings =
        fs.fast ? merged_scan(-300.0, 300.0, 10.0, -12.0, 12.0, 0.5)
                : merged_scan(-300.0, 300.0, 1.5, -12.0, 12.0, 0.1);

    PresetParams off_params = p;
    off_params.omega_r = 0.0;
    const Spectrum off = spectrum_at(AbsorberModel(preset(PresetKind::LadderRydberg, off_params)),
                                     detunings, grid, fs.workers);
    const Spectrum on = spectrum_at(AbsorberModel(preset(PresetKind::LadderRydberg, p)),
                                    detunings, grid, fs.workers);
    const double limit_peak =
        reference_peak_height(preset(PresetKind::LadderRydberg, p), grid, fs.workers);

    const std::string path = join_path(fs.out_dir, "fig5.csv");
    write_table(path, {"probe_detuning_mhz", "absorption_no_recovery",
                       "absorption_with_recovery"},
                {on.probe_detunings, off.absorption, on.absorption});

    const std::string manifest = join_path(fs.out_dir, "fig5_manifest.json");
    write_manifest(manifest, FigureId::Fig5, {path},
                   {{"omega", fmt9(p.omega)},
                    {"omega_r", fmt9(p.omega_r)},
                    {"sigma2", fmt9(p.sigma2)},
                    {"grid_n", std::to_string(grid_n)},
                    {"inhomogeneous_limit_peak", fmt9(limit_peak)}});
    return {path, manifest};
}

}  // namespace

std::vector<std::string> reproduce_figure(FigureId id, const FigureSettings& settings) {
    std::filesystem::create_directories(settings.out_dir);
    switch (id) {
        case FigureId::Fig1bd: return figure_1bd(settings);
        case FigureId::Fig2: return figure_2(settings);
        case FigureId::Fig3a: return figure_3(FigureId::Fig3a, settings);
        case FigureId::Fig3b: return figure_3(FigureId::Fig3b, settings);
        case FigureId::Fig4: return figure_4(settings);
        case FigureId::Fig5: return figure_5(settings);
    }
    throw UnknownFigure("bad figure id value");
}

}  // namespace recabs
