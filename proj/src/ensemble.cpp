#include "recabs/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "recabs/io.hpp"
#include "recabs/parallel.hpp"

namespace recabs {

QuadratureGrid quadrature_grid(int n, double span) {
    if (n < 3 || n % 2 == 0) {
        throw BadGridParams("grid size must be an odd integer >= 3, got " + std::to_string(n));
    }
    if (span < 4.0) {
        throw BadGridParams("grid span must be at least 4 sigma, got " + std::to_string(span));
    }
    QuadratureGrid g;
    g.span = span;
    g.nodes.resize(n);
    g.weights.resize(n);
    const double step = 2.0 * span / (n - 1);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = -span + i * step;
        g.nodes[i] = u;
        g.weights[i] = std::exp(-0.5 * u * u);
        total += g.weights[i];
    }
    for (double& w : g.weights) w /= total;
    return g;
}

double ensemble_absorption(const AbsorberModel& model, double probe_detuning,
                           const QuadratureGrid& grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        sum += grid.weights[i] * model.absorption(grid.nodes[i], probe_detuning);
    }
    return sum;
}

double ensemble_absorption(const LevelScheme& scheme, double probe_detuning,
                           const QuadratureGrid& grid) {
    return ensemble_absorption(AbsorberModel(scheme), probe_detuning, grid);
}

Spectrum spectrum_at(const AbsorberModel& model, std::vector<double> probe_detunings,
                     const QuadratureGrid& grid, int workers) {
    Spectrum s;
    s.probe_detunings = std::move(probe_detunings);
    s.absorption.assign(s.probe_detunings.size(), 0.0);
    s.scheme_digest = scheme_digest(model.scheme());
    s.grid_n = static_cast<int>(grid.nodes.size());
    s.grid_span = grid.span;
    s.probe_rabi = model.scheme().probe().rabi;

    parallel_for(static_cast<int>(s.probe_detunings.size()), workers, [&](int i) {
        s.absorption[i] = ensemble_absorption(model, s.probe_detunings[i], grid);
    });
    return s;
}

Spectrum spectrum(const AbsorberModel& model, double detuning_min, double detuning_max,
                  int n_points, const QuadratureGrid& grid, int workers) {
    if (n_points < 2) throw Error("spectrum needs at least 2 points");
    std::vector<double> detunings(n_points);
    const double step = (detuning_max - detuning_min) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) detunings[i] = detuning_min + i * step;
    return spectrum_at(model, std::move(detunings), grid, workers);
}

Spectrum spectrum(const LevelScheme& scheme, double detuning_min, double detuning_max,
                  int n_points, const QuadratureGrid& grid, int workers) {
    return spectrum(AbsorberModel(scheme), detuning_min, detuning_max, n_points, grid, workers);
}

Spectrum intensity_average(const LevelScheme& scheme, double detuning_min, double detuning_max,
                           int n_points, const QuadratureGrid& grid,
                           const std::vector<std::pair<double, double>>& beam_profile,
                           int workers) {
    if (beam_profile.empty()) throw BadProfile("beam profile is empty");
    double weight_sum = 0.0;
    for (const auto& [fraction, weight] : beam_profile) {
        if (fraction <= 0.0) throw BadProfile("intensity fractions must be positive");
        if (weight < 0.0) throw BadProfile("profile weights must be nonnegative");
        weight_sum += weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw BadProfile("profile weights must sum to 1, got " + std::to_string(weight_sum));
    }

    Spectrum out;
    bool first = true;
    for (const auto& [fraction, weight] : beam_profile) {
        LevelScheme scaled = scheme;
        const double amp = std::sqrt(fraction);
        for (auto& f : scaled.fields) {
            if (f.id != "probe") f.rabi *= amp;
        }
        Spectrum part = spectrum(scaled, detuning_min, detuning_max, n_points, grid, workers);
        if (first) {
            out = part;
            out.scheme_digest = scheme_digest(scheme);
            for (double& a : out.absorption) a *= weight;
            first = false;
        } else {
            for (std::size_t i = 0; i < out.absorption.size(); ++i) {
                out.absorption[i] += weight * part.absorption[i];
            }
        }
    }
    return out;
}

PeakResult peak(const Spectrum& s, double window_min, double window_max) {
    int lo = -1, hi = -1;
    for (int i = 0; i < static_cast<int>(s.probe_detunings.size()); ++i) {
        if (s.probe_detunings[i] >= window_min && s.probe_detunings[i] <= window_max) {
            if (lo < 0) lo = i;
            hi = i;
        }
    }
    if (lo < 0) throw EmptyWindow("no spectrum samples inside the requested window");

    int imax = lo;
    for (int i = lo + 1; i <= hi; ++i) {
        if (s.absorption[i] > s.absorption[imax]) imax = i;
    }

    PeakResult r;
    r.detuning = s.probe_detunings[imax];
    r.height = s.absorption[imax];
    if (imax == lo || imax == hi) {
        r.at_edge = true;
        return r;
    }

    // Quadratic through the three samples around the maximum (spacing may be
    // nonuniform when scans were merged).
    const double x0 = s.probe_detunings[imax - 1], x1 = s.probe_detunings[imax],
                 x2 = s.probe_detunings[imax + 1];
    const double y0 = s.absorption[imax - 1], y1 = s.absorption[imax],
                 y2 = s.absorption[imax + 1];
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double curv = (d1 - d0) / (x2 - x0);
    if (curv < 0.0) {
        const double xv = 0.5 * (x0 + x1) - 0.5 * d0 / curv;
        if (xv > x0 && xv < x2) {
            // Newton form p(x) = y0 + d0 (x-x0) + curv (x-x0)(x-x1)
            r.detuning = xv;
            r.height = y0 + d0 * (xv - x0) + curv * (xv - x0) * (xv - x1);
        }
    }
    return r;
}

}  // namespace recabs
