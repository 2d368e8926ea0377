#pragma once

#include <array>
#include <string>
#include <vector>

#include "recabs/ensemble.hpp"
#include "recabs/recovery.hpp"

namespace recabs {

/// Sets one scheme parameter by path. Supported paths:
///   field:<id>:rabi | field:<id>:detuning | field:<id>:shift_coefficient
///   level:<label>:population_decay_rate
///   dephasing:<index>:rate
///   inhom:sigma
/// Throws BadSweepSpec for unknown paths.
void set_parameter(LevelScheme& scheme, const std::string& path, double value);

/// Settings shared by every beta / peak / window evaluation: the probe scan
/// covering the two-photon feature and the ensemble grid.
struct EvalSettings {
    double window_min = 0.0;
    double window_max = 0.0;
    double scan_step = 0.1;    // MHz
    double threshold = 0.5;    // window-width extraction
    int grid_n = 4001;
    double grid_span = 5.0;
    int workers = 0;
};

/// One-photon peak of the bare two-level reference built from the scheme's
/// probe transition (same probe Rabi, gamma and shift coefficient).
double reference_peak_height(const LevelScheme& scheme, const QuadratureGrid& grid,
                             int workers = 0);
LevelScheme bare_reference_scheme(const LevelScheme& scheme);

/// Two-photon peak inside the window divided by the bare reference peak.
double evaluate_beta(const LevelScheme& scheme, const EvalSettings& settings,
                     double reference_peak);

enum class DerivedQuantity { Beta, Peak, WindowWidth };
DerivedQuantity derived_quantity_from_string(const std::string& name);
std::string to_string(DerivedQuantity q);

struct SweepAxis {
    std::string path;
    std::vector<double> values;
};

struct SweepSpec {
    LevelScheme base;
    std::vector<SweepAxis> axes;
    DerivedQuantity quantity = DerivedQuantity::Beta;
    EvalSettings eval;
};

struct SweepRow {
    std::vector<double> axis_values;
    double value = 0.0;
    bool ok = false;
    std::string error;
};

/// Full Cartesian evaluation, rows in lexicographic axis order, evaluated
/// concurrently with deterministic output. Simulation errors are recorded
/// per row instead of aborting the sweep.
std::vector<SweepRow> sweep(const SweepSpec& spec, int workers = 0);

std::string sweep_table_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

struct OptimizeBounds {
    double omega_r_min = 0.0, omega_r_max = 0.0;  // stored rabi units
    double delta_r_min = 0.0, delta_r_max = 0.0;  // MHz
};

struct OptimumReport {
    double omega_r = 0.0;  // stored rabi units
    double delta_r = 0.0;
    double beta = 0.0;
    int evaluations = 0;
    bool bounds_exclude_plan = false;
    std::vector<std::array<double, 3>> trace;  // (omega_r, delta_r, beta)
};

struct OptimizeSettings {
    EvalSettings eval;
    int coarse_points = 11;     // per axis
    double param_tol = 0.1;     // MHz
    double beta_tol = 1e-3;     // relative
    int max_iterations = 200;
};

/// Coarse grid scan over the bounds followed by Nelder-Mead refinement of
/// the recovery field's (rabi, detuning). Deterministic; never returns a
/// beta below the best grid point.
OptimumReport maximize_beta(const LevelScheme& scheme, const OptimizeBounds& bounds,
                            const OptimizeSettings& settings);

}  // namespace recabs
