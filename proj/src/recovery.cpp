#include "recabs/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recabs {

double inhomogeneous_limit(double sigma, double gamma) {
    if (!(sigma > 0.0) || !(gamma > 0.0)) {
        throw NonPositiveInput("inhomogeneous_limit needs sigma > 0 and gamma > 0");
    }
    return std::sqrt(2.0 / M_PI) * sigma / gamma;
}

CompensationPlan compensation_plan(double omega, double delta, double eta) {
    if (!(eta > 0.0)) throw NonPositiveEta("eta must be positive");
    return {omega * std::sqrt(eta), delta * eta, eta};
}

ScatteringRates scattering_rates(double omega, double delta, double sigma, double gamma,
                                 double omega_r, double delta_r, double sigma_r,
                                 double gamma_r) {
    if (!(gamma > 0.0) || !(gamma_r > 0.0) || !(sigma > 0.0) || !(sigma_r > 0.0)) {
        throw NonPositiveInput("scattering_rates needs positive gamma and sigma values");
    }
    ScatteringRates r;
    r.gamma_sc = omega * omega / (delta * delta + sigma * sigma) * gamma;
    r.gamma_sc_r = omega_r * omega_r / (delta_r * delta_r + sigma_r * sigma_r) * gamma_r;
    return r;
}

EnhancementPrediction predicted_beta(const ScatteringRates& rates, double gamma_sg,
                                     double beta0) {
    if (gamma_sg < 0.0) throw NonPositiveInput("gamma_sg must be nonnegative");
    EnhancementPrediction p;
    p.beta0 = beta0;
    p.gamma_sc = rates.gamma_sc;
    p.gamma_sc_r = rates.gamma_sc_r;
    const double total = rates.gamma_sc + rates.gamma_sc_r;
    p.mu = (gamma_sg > 0.0) ? std::sqrt(total / gamma_sg)
                            : std::numeric_limits<double>::infinity();
    p.beta = (total + gamma_sg > 0.0) ? beta0 * rates.gamma_sc / (total + gamma_sg) : 0.0;
    return p;
}

double beta_saturation_form(double beta0, double gamma, double gamma_r, double mu) {
    const double mu2 = mu * mu;
    return beta0 * gamma / (gamma + gamma_r) * mu2 / (1.0 + mu2);
}

double extract_beta(const Spectrum& with_fields, const Spectrum& reference_bare,
                    double window_min, double window_max) {
    const PeakResult two_photon = peak(with_fields, window_min, window_max);
    const PeakResult one_photon =
        peak(reference_bare, -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity());
    if (!(one_photon.height > 0.0)) {
        throw Error("reference spectrum has no absorption peak");
    }
    return two_photon.height / one_photon.height;
}

double at_window_width(const Spectrum& s, double threshold, double peak_min,
                       double peak_max) {
    const int n = static_cast<int>(s.probe_detunings.size());
    if (n < 8) throw NoWindowFound("spectrum too short to bracket a window");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw Error("threshold must lie in (0, 1)");
    }

    const PeakResult p = peak(s, std::max(peak_min, s.probe_detunings.front()),
                              std::min(peak_max, s.probe_detunings.back()));
    int ip = 0;
    for (int i = 1; i < n; ++i) {
        if (std::abs(s.probe_detunings[i] - p.detuning) <
            std::abs(s.probe_detunings[ip] - p.detuning)) {
            ip = i;
        }
    }

    // Local one-photon background from the outermost 5% of samples per side.
    const int edge = std::max(1, n / 20);
    double bg_left = 0.0, bg_right = 0.0;
    for (int i = 0; i < edge; ++i) {
        bg_left += s.absorption[i];
        bg_right += s.absorption[n - 1 - i];
    }
    bg_left /= edge;
    bg_right /= edge;
    if (!(bg_left > 0.0) || !(bg_right > 0.0)) {
        throw NoWindowFound("scan does not reach the one-photon background");
    }

    const auto crossing = [&](int from, int step, double level) -> double {
        bool dipped = false;
        for (int i = from; i >= 0 && i < n; i += step) {
            if (!dipped) {
                if (s.absorption[i] < level) dipped = true;
                continue;
            }
            if (s.absorption[i] >= level) {
                // Linear interpolation between the last sub-level sample and i.
                const int j = i - step;
                const double x0 = s.probe_detunings[j], x1 = s.probe_detunings[i];
                const double y0 = s.absorption[j], y1 = s.absorption[i];
                return x0 + (level - y0) / (y1 - y0) * (x1 - x0);
            }
        }
        throw NoWindowFound(dipped ? "window is not bracketed by the scan range"
                                   : "no transmission dip below threshold");
    };

    const double left = crossing(ip, -1, threshold * bg_left);
    const double right = crossing(ip, +1, threshold * bg_right);
    return right - left;
}

}  // namespace recabs
