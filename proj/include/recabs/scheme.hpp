#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recabs/errors.hpp"

namespace recabs {

// All rates, Rabi frequencies and detunings are in MHz. A level's
// homogeneous half-linewidth gamma is population_decay_rate/2, so a bare
// optical coherence decays at exactly gamma.

struct DecayBranch {
    int target = 0;
    double fraction = 0.0;
};

struct Level {
    int id = 0;
    std::string label;
    double population_decay_rate = 0.0;  // MHz, total (= 2 x HWHM)
    std::vector<DecayBranch> decay_branches;
};

/// One classical drive field on a single optical transition.
///
/// `rabi` is the full Rabi frequency: the Hamiltonian off-diagonal element
/// is rabi/2 and the resonant Autler-Townes splitting equals rabi.
/// `shift_coefficient` maps the dimensionless ensemble variable u to this
/// field's one-photon frequency shift in MHz (sign encodes propagation
/// direction or strain coupling).
struct DriveField {
    std::string id;          // "probe", "coupling", "recovery", ...
    int lower_level = 0;
    int upper_level = 0;
    double rabi = 0.0;       // MHz
    double detuning = 0.0;   // MHz (probe's value is overridden per scan point)
    double shift_coefficient = 0.0;  // MHz per unit u
};

struct DephasingChannel {
    int level_a = 0;
    int level_b = 0;
    double rate = 0.0;  // MHz, pure dephasing of the a-b coherence
};

struct InhomogeneityModel {
    double sigma = 0.0;  // MHz, std of the primary shift distribution (Gaussian)
};

/// Places a level outside the drive tree at a fixed offset above a tree
/// level, e.g. a second hyperfine excited state.
struct FrameAnchor {
    int level = 0;
    int reference_level = 0;
    double offset = 0.0;  // MHz
};

/// An additional transition driven by an existing field's laser (same
/// frequency and shift), contributing an off-diagonal element
/// rabi * amplitude_scale / 2. Same-laser loops are always frame-consistent,
/// so these do not participate in the drive-tree check.
struct ExtraCoupling {
    std::string field_id;
    int lower_level = 0;
    int upper_level = 0;
    double amplitude_scale = 1.0;
};

/// One absorber's frequency shifts for a given ensemble variable u.
struct ShiftSample {
    double u = 0.0;
    std::map<std::string, double> per_field_shift;  // field id -> MHz
};

struct LevelScheme {
    std::vector<Level> levels;
    std::vector<DriveField> fields;
    std::vector<DephasingChannel> dephasing;
    InhomogeneityModel inhom;
    std::vector<FrameAnchor> anchors;
    std::vector<ExtraCoupling> extra_couplings;

    int dimension() const { return static_cast<int>(levels.size()); }
    const DriveField& probe() const;
    const DriveField* field(const std::string& id) const;
    DriveField* field(const std::string& id);
    const Level& level(int id) const;

    /// HWHM of the probe's upper level.
    double probe_gamma() const;

    ShiftSample shift_sample(double u) const;

    /// u-derivative of the two-photon (probe lower <-> far end of the probe
    /// upper level's other drive) rotating-frame level value; 0 for n-type
    /// geometry, sigma2 for the counter-propagating ladder.
    double two_photon_shift_coefficient() const;
};

/// Validates all invariants and returns the scheme.
/// Throws CyclicDriveGraph, DisconnectedDriveGraph, MissingProbe, BadBranching.
LevelScheme build_scheme(std::vector<Level> levels, std::vector<DriveField> fields,
                         std::vector<DephasingChannel> dephasing, InhomogeneityModel inhom,
                         std::vector<FrameAnchor> anchors = {},
                         std::vector<ExtraCoupling> extra_couplings = {});

enum class PresetKind {
    TwoLevel,
    Lambda,
    NType,
    LadderRydberg,
    NTypeExtraHf,
};

PresetKind preset_kind_from_string(const std::string& name);
std::string to_string(PresetKind kind);

/// Parameters for the bundled level-scheme presets.
///
/// Drive amplitudes (omega, omega_r, probe_amplitude) are coupling matrix
/// elements, the convention in which experimental values are usually quoted;
/// the stored DriveField::rabi is twice the amplitude, so that the resonant
/// Autler-Townes splitting of a drive quoted as "omega" comes out as 2*omega.
struct PresetParams {
    double omega = 29.0;      // coupling amplitude, MHz
    double delta = -270.0;    // coupling detuning, MHz
    double omega_r = 29.0;    // recovery amplitude, MHz
    double delta_r = -270.0;  // recovery detuning, MHz
    double gamma = 2.875;     // HWHM of the probe's upper level, MHz
    double gamma_r = 3.033;   // HWHM of the recovery's upper level, MHz
    double gamma_sg = 0.35;   // two-photon bare width, MHz
    double sigma = 220.0;     // one-photon inhomogeneous std, MHz
    double sigma2 = 1.0;      // residual two-photon std (ladder only), MHz
    double eta = 1.0;         // wavevector ratio k_r/k
    std::optional<double> probe_amplitude;  // default 0.01*gamma
    double e_branch_to_g = 0.5;     // lambda / n-type branching of |e>
    double s_decay_rate = 0.66;     // ladder |s> population decay, MHz
    double extra_splitting = 814.5; // n_type_extra_hf second excited level, MHz
};

/// Builds one of the named level schemes. Throws UnknownKind, NonPhysicalParams.
LevelScheme preset(PresetKind kind, const PresetParams& params = {});
LevelScheme preset(const std::string& kind, const PresetParams& params = {});

}  // namespace recabs
