#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>

#include "recabs/scheme.hpp"

namespace recabs {

/// Steady-state density matrix for one absorber at one probe detuning.
struct SteadyStateSolution {
    Eigen::MatrixXcd rho;
    double residual_norm = 0.0;  // ||L rho|| / ||L||_F
    std::complex<double> probe_coherence{0.0, 0.0};  // rho(probe lower, probe upper)
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    bool psd_ok = true;
};

/// Rotating-frame level values in MHz. The probe's lower level sits at 0 and
/// every drive edge satisfies value(upper) - value(lower) = -(detuning - shift),
/// so a level reached by climbing a ladder accumulates the (negated) sum of
/// one-photon detunings. `probe_detuning` overrides the scheme's stored value.
std::map<int, double> rotating_frame_detunings(
    const LevelScheme& scheme, const ShiftSample& sample,
    std::optional<double> probe_detuning = std::nullopt);

Eigen::MatrixXcd build_hamiltonian(const LevelScheme& scheme, const ShiftSample& sample,
                                   double probe_detuning);

/// Lindblad superoperator acting on column-major vec(rho):
/// -i[H,rho] + sum_c (L_c rho L_c^dag - {L_c^dag L_c, rho}/2) with one jump
/// operator per decay branch (rate = population_decay_rate * fraction) and
/// one per dephasing channel, normalized so the channel's coherence decays at
/// exactly the channel rate.
Eigen::MatrixXcd build_liouvillian(const Eigen::MatrixXcd& hamiltonian,
                                   const LevelScheme& scheme);

/// Dense steady-state solve with one row replaced by the trace constraint.
/// Passing the scheme fills probe_coherence. Throws SingularLiouvillian when
/// the steady state is not unique and NumericalViolation when the solution
/// breaks the trace/Hermiticity/positivity tolerances.
SteadyStateSolution steady_state(const Eigen::MatrixXcd& liouvillian,
                                 const LevelScheme* scheme = nullptr);

/// Adaptive RK45 integration of d(rho)/dt = L(rho); the independent oracle
/// for steady_state. Throws StepFailure if the step size underflows.
Eigen::MatrixXcd evolve_oracle(const Eigen::MatrixXcd& liouvillian,
                               const Eigen::MatrixXcd& rho0, double t);

/// |Im probe_coherence| * 2*gamma_probe / probe_rabi, normalized so the
/// homogeneous two-level resonant value is 1. Throws ZeroProbe.
double normalized_absorption(const SteadyStateSolution& sol, const LevelScheme& scheme);

/// Per-scheme precomputation for repeated steady-state solves. The
/// Hamiltonian diagonal is affine in (probe_detuning, u), so one constant
/// superoperator plus a diagonal update gives the Liouvillian of any
/// absorber. Immutable and safe to share between threads.
class AbsorberModel {
public:
    explicit AbsorberModel(const LevelScheme& scheme);

    int dim() const { return n_; }
    const LevelScheme& scheme() const { return scheme_; }

    Eigen::MatrixXcd hamiltonian(double u, double probe_detuning) const;
    Eigen::MatrixXcd liouvillian(double u, double probe_detuning) const;
    SteadyStateSolution steady_state(double u, double probe_detuning) const;
    double absorption(double u, double probe_detuning) const;

private:
    LevelScheme scheme_;
    int n_ = 0;
    int probe_lower_ = 0;
    int probe_upper_ = 0;
    double probe_rabi_ = 0.0;
    double probe_hwhm_ = 0.0;
    Eigen::MatrixXd h_offdiag_;           // constant off-diagonal part of H
    Eigen::VectorXd diag_base_, diag_probe_, diag_u_;  // affine H diagonal
    Eigen::MatrixXcd l_const_;            // Liouvillian with zero H diagonal
};

}  // namespace recabs
