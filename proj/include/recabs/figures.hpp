#pragma once

#include <string>
#include <vector>

#include "recabs/optimize.hpp"
#include "recabs/scheme.hpp"

namespace recabs {

enum class FigureId { Fig1bd, Fig2, Fig3a, Fig3b, Fig4, Fig5 };
FigureId figure_id_from_string(const std::string& name);
std::string to_string(FigureId id);

/// Hot-vapor ladder configuration: resonant drives, D2 probe line, Rydberg
/// recovery transition, residual two-photon broadening sigma2.
PresetParams ladder_defaults();

/// Ideal symmetric four-level configuration far detuned from the
/// inhomogeneous line, parametrized by the saturation parameter mu:
/// omega = mu * sqrt((delta^2 + sigma^2) * gamma_sg / (gamma + gamma_r)).
PresetParams far_detuned_symmetric(double mu);

struct Fig4Point {
    double mu = 0.0;        // nominal saturation parameter
    double omega = 0.0;     // drive amplitude (matrix-element units)
    double beta = 0.0;      // simulated enhancement
};

/// Simulated enhancement of the ideal far-detuned scheme at each mu.
std::vector<Fig4Point> saturation_dataset(const std::vector<double>& mus, int grid_n,
                                          int workers);

struct FigureSettings {
    std::string out_dir = ".";
    bool fast = false;  // coarse grids for quick runs
    int workers = 0;
};

/// Emits the CSV datasets for one figure plus a manifest.json; returns the
/// written file paths (manifest last). Throws UnknownFigure.
std::vector<std::string> reproduce_figure(FigureId id, const FigureSettings& settings);

}  // namespace recabs
