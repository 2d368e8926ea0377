#pragma once

#include "recabs/ensemble.hpp"

namespace recabs {

/// Factor sqrt(2/pi) * sigma / gamma by which the resonant absorption drops
/// under Gaussian inhomogeneous broadening; also the maximal recovery
/// enhancement. Throws NonPositiveInput.
double inhomogeneous_limit(double sigma, double gamma);

/// Recovery-field parameters that equalize the coupling- and recovery-field
/// light shifts for every absorber when the recovery shift tracks the
/// coupling shift with ratio eta.
struct CompensationPlan {
    double omega_r = 0.0;  // = omega * sqrt(eta)
    double delta_r = 0.0;  // = delta * eta
    double eta = 1.0;
};

CompensationPlan compensation_plan(double omega, double delta, double eta);

struct ScatteringRates {
    double gamma_sc = 0.0;    // coupling field, MHz
    double gamma_sc_r = 0.0;  // recovery field, MHz
};

/// Ensemble-averaged scattering rates Omega^2/(Delta^2+sigma^2) * gamma for
/// each dressing field. Throws NonPositiveInput.
ScatteringRates scattering_rates(double omega, double delta, double sigma, double gamma,
                                 double omega_r, double delta_r, double sigma_r,
                                 double gamma_r);

struct EnhancementPrediction {
    double beta0 = 0.0;
    double gamma_sc = 0.0;
    double gamma_sc_r = 0.0;
    double mu = 0.0;   // saturation parameter, sqrt((G + G_r)/gamma_sg)
    double beta = 0.0; // beta0 * G / (G + G_r + gamma_sg)
};

EnhancementPrediction predicted_beta(const ScatteringRates& rates, double gamma_sg,
                                     double beta0);

/// Saturation form beta0 * gamma/(gamma+gamma_r) * mu^2/(1+mu^2); coincides
/// with predicted_beta in the symmetric configuration.
double beta_saturation_form(double beta0, double gamma, double gamma_r, double mu);

/// Ratio of the two-photon peak of `with_fields` (inside the window) to the
/// one-photon peak of the bare reference spectrum. Throws EmptyWindow.
double extract_beta(const Spectrum& with_fields, const Spectrum& reference_bare,
                    double window_min, double window_max);

/// Width of the transmission window bracketing the enhanced peak: the peak
/// inside [peak_min, peak_max] is located, and on each side the first
/// crossing of threshold x (local one-photon background) after the dip marks
/// the window edge. The background is read off the outermost samples of the
/// scan. Throws NoWindowFound.
double at_window_width(const Spectrum& s, double threshold,
                       double peak_min = -1e300, double peak_max = 1e300);

}  // namespace recabs
