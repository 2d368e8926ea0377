#include "recabs/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "recabs/io.hpp"
#include "recabs/parallel.hpp"

namespace recabs {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

}  // namespace

void set_parameter(LevelScheme& scheme, const std::string& path, double value) {
    const auto parts = split(path, ':');
    if (parts.size() == 3 && parts[0] == "field") {
        DriveField* f = scheme.field(parts[1]);
        if (f == nullptr) throw BadSweepSpec("no field '" + parts[1] + "' in scheme");
        if (parts[2] == "rabi") {
            f->rabi = value;
            return;
        }
        if (parts[2] == "detuning") {
            f->detuning = value;
            return;
        }
        if (parts[2] == "shift_coefficient") {
            f->shift_coefficient = value;
            return;
        }
    } else if (parts.size() == 3 && parts[0] == "level" &&
               parts[2] == "population_decay_rate") {
        for (auto& lv : scheme.levels) {
            if (lv.label == parts[1]) {
                lv.population_decay_rate = value;
                return;
            }
        }
        throw BadSweepSpec("no level '" + parts[1] + "' in scheme");
    } else if (parts.size() == 3 && parts[0] == "dephasing" && parts[2] == "rate") {
        const int idx = std::stoi(parts[1]);
        if (idx < 0 || idx >= static_cast<int>(scheme.dephasing.size())) {
            throw BadSweepSpec("dephasing index out of range in '" + path + "'");
        }
        scheme.dephasing[idx].rate = value;
        return;
    } else if (parts.size() == 2 && parts[0] == "inhom" && parts[1] == "sigma") {
        scheme.inhom.sigma = value;
        return;
    }
    throw BadSweepSpec("unknown parameter path '" + path + "'");
}

LevelScheme bare_reference_scheme(const LevelScheme& scheme) {
    const DriveField& pr = scheme.probe();
    std::vector<Level> levels{
        {0, "g", 0.0, {}},
        {1, "e", 2.0 * scheme.probe_gamma(), {{0, 1.0}}},
    };
    std::vector<DriveField> fields{
        {"probe", 0, 1, pr.rabi, 0.0, std::abs(pr.shift_coefficient)},
    };
    return build_scheme(levels, fields, {}, scheme.inhom);
}

double reference_peak_height(const LevelScheme& scheme, const QuadratureGrid& grid,
                             int workers) {
    const LevelScheme ref = bare_reference_scheme(scheme);
    const Spectrum s = spectrum(ref, -5.0, 5.0, 21, grid, workers);
    return peak(s, -5.0, 5.0).height;
}

double evaluate_beta(const LevelScheme& scheme, const EvalSettings& e,
                     double reference_peak) {
    if (!(reference_peak > 0.0)) throw Error("reference peak must be positive");
    const QuadratureGrid grid = quadrature_grid(e.grid_n, e.grid_span);
    const int n_points =
        std::max(5, static_cast<int>(std::lround((e.window_max - e.window_min) / e.scan_step)) + 1);
    const Spectrum s =
        spectrum(scheme, e.window_min, e.window_max, n_points, grid, e.workers);
    return peak(s, e.window_min, e.window_max).height / reference_peak;
}

DerivedQuantity derived_quantity_from_string(const std::string& name) {
    if (name == "beta") return DerivedQuantity::Beta;
    if (name == "peak") return DerivedQuantity::Peak;
    if (name == "window_width") return DerivedQuantity::WindowWidth;
    throw BadSweepSpec("unknown derived quantity '" + name + "'");
}

std::string to_string(DerivedQuantity q) {
    switch (q) {
        case DerivedQuantity::Beta: return "beta";
        case DerivedQuantity::Peak: return "peak";
        case DerivedQuantity::WindowWidth: return "window_width";
    }
    throw BadSweepSpec("bad derived quantity value");
}

namespace {

double evaluate_quantity(const LevelScheme& scheme, DerivedQuantity q,
                         const EvalSettings& e, double reference_peak) {
    switch (q) {
        case DerivedQuantity::Beta:
            return evaluate_beta(scheme, e, reference_peak);
        case DerivedQuantity::Peak: {
            const QuadratureGrid grid = quadrature_grid(e.grid_n, e.grid_span);
            const int n = std::max(
                5, static_cast<int>(std::lround((e.window_max - e.window_min) / e.scan_step)) + 1);
            const Spectrum s = spectrum(scheme, e.window_min, e.window_max, n, grid, e.workers);
            return peak(s, e.window_min, e.window_max).height;
        }
        case DerivedQuantity::WindowWidth: {
            const QuadratureGrid grid = quadrature_grid(e.grid_n, e.grid_span);
            const int n = std::max(
                5, static_cast<int>(std::lround((e.window_max - e.window_min) / e.scan_step)) + 1);
            const Spectrum s = spectrum(scheme, e.window_min, e.window_max, n, grid, e.workers);
            return at_window_width(s, e.threshold);
        }
    }
    throw BadSweepSpec("bad derived quantity value");
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, int workers) {
    if (spec.axes.empty()) throw BadSweepSpec("sweep needs at least one axis");
    for (const auto& ax : spec.axes) {
        if (ax.values.empty()) throw BadSweepSpec("sweep axis '" + ax.path + "' has no values");
        LevelScheme probe_resolution = spec.base;
        set_parameter(probe_resolution, ax.path, ax.values.front());
    }

    std::size_t total = 1;
    for (const auto& ax : spec.axes) total *= ax.values.size();

    double reference_peak = 0.0;
    if (spec.quantity == DerivedQuantity::Beta) {
        reference_peak = reference_peak_height(
            spec.base, quadrature_grid(spec.eval.grid_n, spec.eval.grid_span), spec.eval.workers);
    }

    std::vector<SweepRow> rows(total);
    parallel_for(static_cast<int>(total), workers, [&](int r) {
        SweepRow& row = rows[r];
        row.axis_values.resize(spec.axes.size());
        std::size_t rem = static_cast<std::size_t>(r);
        for (int a = static_cast<int>(spec.axes.size()) - 1; a >= 0; --a) {
            const auto& values = spec.axes[a].values;
            row.axis_values[a] = values[rem % values.size()];
            rem /= values.size();
        }
        try {
            LevelScheme s = spec.base;
            for (std::size_t a = 0; a < spec.axes.size(); ++a) {
                set_parameter(s, spec.axes[a].path, row.axis_values[a]);
            }
            EvalSettings eval = spec.eval;
            eval.workers = 1;  // rows already run concurrently
            row.value = evaluate_quantity(s, spec.quantity, eval, reference_peak);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
    });
    return rows;
}

std::string sweep_table_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    for (const auto& ax : spec.axes) out << ax.path << ',';
    out << to_string(spec.quantity) << ",status\n";
    for (const auto& row : rows) {
        for (double v : row.axis_values) out << fmt9(v) << ',';
        if (row.ok) {
            out << fmt9(row.value) << ",ok\n";
        } else {
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << "nan,error: " << msg << "\n";
        }
    }
    return out.str();
}

OptimumReport maximize_beta(const LevelScheme& scheme, const OptimizeBounds& bounds,
                            const OptimizeSettings& settings) {
    if (scheme.field("recovery") == nullptr) {
        throw Error("maximize_beta needs a scheme with a recovery field");
    }
    if (bounds.omega_r_min > bounds.omega_r_max || bounds.delta_r_min > bounds.delta_r_max) {
        throw Error("maximize_beta bounds are inverted");
    }

    OptimumReport report;

    // Compensation-plan point in stored units, used only for the warning flag.
    if (const DriveField* coupling = scheme.field("coupling")) {
        const DriveField& rec = *scheme.field("recovery");
        if (coupling->shift_coefficient != 0.0) {
            const double eta = rec.shift_coefficient / coupling->shift_coefficient;
            if (eta > 0.0) {
                const double plan_rabi = coupling->rabi * std::sqrt(eta);
                const double plan_detuning = coupling->detuning * eta;
                report.bounds_exclude_plan =
                    plan_rabi < bounds.omega_r_min || plan_rabi > bounds.omega_r_max ||
                    plan_detuning < bounds.delta_r_min || plan_detuning > bounds.delta_r_max;
            }
        }
    }

    const double reference_peak = reference_peak_height(
        scheme, quadrature_grid(settings.eval.grid_n, settings.eval.grid_span),
        settings.eval.workers);

    const auto objective = [&](double omega_r, double delta_r) {
        LevelScheme s = scheme;
        set_parameter(s, "field:recovery:rabi", omega_r);
        set_parameter(s, "field:recovery:detuning", delta_r);
        const double beta = evaluate_beta(s, settings.eval, reference_peak);
        report.evaluations += 1;
        report.trace.push_back({omega_r, delta_r, beta});
        if (beta > report.beta) {
            report.beta = beta;
            report.omega_r = omega_r;
            report.delta_r = delta_r;
        }
        return beta;
    };

    // Coarse scan.
    const auto axis_values = [&](double lo, double hi) {
        std::vector<double> v;
        if (hi <= lo) {
            v.push_back(lo);
            return v;
        }
        for (int i = 0; i < settings.coarse_points; ++i) {
            v.push_back(lo + (hi - lo) * i / (settings.coarse_points - 1));
        }
        return v;
    };
    for (double w : axis_values(bounds.omega_r_min, bounds.omega_r_max)) {
        for (double d : axis_values(bounds.delta_r_min, bounds.delta_r_max)) {
            objective(w, d);
        }
    }

    const double span_w = bounds.omega_r_max - bounds.omega_r_min;
    const double span_d = bounds.delta_r_max - bounds.delta_r_min;
    if (span_w <= 0.0 && span_d <= 0.0) return report;  // degenerate bounds

    const auto clamp = [&](std::array<double, 2> p) {
        p[0] = std::clamp(p[0], bounds.omega_r_min, bounds.omega_r_max);
        p[1] = std::clamp(p[1], bounds.delta_r_min, bounds.delta_r_max);
        return p;
    };

    // Nelder-Mead around the best coarse point, clamped to the bounds.
    struct Vertex {
        std::array<double, 2> x;
        double f;  // negated beta
    };
    const double step_w = std::max(span_w / (settings.coarse_points - 1) * 0.5, 1e-6);
    const double step_d = std::max(span_d / (settings.coarse_points - 1) * 0.5, 1e-6);
    std::array<double, 2> start{report.omega_r, report.delta_r};
    std::vector<Vertex> simplex;
    for (const auto& offset : {std::array<double, 2>{0.0, 0.0},
                               std::array<double, 2>{step_w, 0.0},
                               std::array<double, 2>{0.0, step_d}}) {
        const auto x = clamp({start[0] + offset[0], start[1] + offset[1]});
        simplex.push_back({x, -objective(x[0], x[1])});
    }

    for (int it = 0; it < settings.max_iterations; ++it) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const double diameter =
            std::max(std::hypot(simplex[1].x[0] - simplex[0].x[0],
                                simplex[1].x[1] - simplex[0].x[1]),
                     std::hypot(simplex[2].x[0] - simplex[0].x[0],
                                simplex[2].x[1] - simplex[0].x[1]));
        const double spread = std::abs(simplex[2].f - simplex[0].f) /
                              std::max(std::abs(simplex[0].f), 1e-12);
        if (diameter < settings.param_tol && spread < settings.beta_tol) break;

        const std::array<double, 2> centroid{(simplex[0].x[0] + simplex[1].x[0]) / 2.0,
                                             (simplex[0].x[1] + simplex[1].x[1]) / 2.0};
        const auto point_at = [&](double t) {
            return clamp({centroid[0] + t * (centroid[0] - simplex[2].x[0]),
                          centroid[1] + t * (centroid[1] - simplex[2].x[1])});
        };

        const auto reflected = point_at(1.0);
        const double fr = -objective(reflected[0], reflected[1]);
        if (fr < simplex[0].f) {
            const auto expanded = point_at(2.0);
            const double fe = -objective(expanded[0], expanded[1]);
            simplex[2] = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
        } else if (fr < simplex[1].f) {
            simplex[2] = {reflected, fr};
        } else {
            const auto contracted = point_at(fr < simplex[2].f ? 0.5 : -0.5);
            const double fc = -objective(contracted[0], contracted[1]);
            if (fc < std::min(fr, simplex[2].f)) {
                simplex[2] = {contracted, fc};
            } else {
                for (int k = 1; k < 3; ++k) {
                    const auto x = clamp({(simplex[k].x[0] + simplex[0].x[0]) / 2.0,
                                          (simplex[k].x[1] + simplex[0].x[1]) / 2.0});
                    simplex[k] = {x, -objective(x[0], x[1])};
                }
            }
        }
    }
    return report;
}

}  // namespace recabs
