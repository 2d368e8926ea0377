#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "recabs/liouville.hpp"
#include "recabs/scheme.hpp"

namespace recabs {

/// Uniform nodes over [-span, span] in units of the dimensionless ensemble
/// variable u with Gaussian weights renormalized to 1.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double span = 0.0;  // in units of sigma
};

/// Throws BadGridParams unless n >= 3 is odd and span >= 4.
QuadratureGrid quadrature_grid(int n = 4001, double span = 5.0);

/// Ensemble-averaged normalized absorption versus probe detuning.
struct Spectrum {
    std::vector<double> probe_detunings;  // MHz
    std::vector<double> absorption;       // dimensionless, homogeneous peak = 1
    std::uint64_t scheme_digest = 0;
    int grid_n = 0;
    double grid_span = 0.0;
    double probe_rabi = 0.0;
};

/// Fixed-order weighted sum of per-absorber absorption over the grid.
double ensemble_absorption(const AbsorberModel& model, double probe_detuning,
                           const QuadratureGrid& grid);
double ensemble_absorption(const LevelScheme& scheme, double probe_detuning,
                           const QuadratureGrid& grid);

/// Evaluates the ensemble absorption at the given detunings, parallel over
/// points with deterministic output for any worker count.
Spectrum spectrum_at(const AbsorberModel& model, std::vector<double> probe_detunings,
                     const QuadratureGrid& grid, int workers = 0);

/// Uniform probe-detuning grid of n_points over [min, max].
Spectrum spectrum(const AbsorberModel& model, double detuning_min, double detuning_max,
                  int n_points, const QuadratureGrid& grid, int workers = 0);
Spectrum spectrum(const LevelScheme& scheme, double detuning_min, double detuning_max,
                  int n_points, const QuadratureGrid& grid, int workers = 0);

/// Weighted average of spectra with every non-probe Rabi frequency scaled by
/// sqrt(intensity fraction). beam_profile entries are (intensity fraction,
/// weight); weights must sum to 1. Throws BadProfile.
Spectrum intensity_average(const LevelScheme& scheme, double detuning_min, double detuning_max,
                           int n_points, const QuadratureGrid& grid,
                           const std::vector<std::pair<double, double>>& beam_profile,
                           int workers = 0);

struct PeakResult {
    double detuning = 0.0;
    double height = 0.0;
    bool at_edge = false;  // maximal sample sat on the window boundary
};

/// Maximal sample inside [window_min, window_max] with parabolic refinement;
/// edge peaks are returned unrefined and flagged. Throws EmptyWindow.
PeakResult peak(const Spectrum& s, double window_min, double window_max);

}  // namespace recabs
