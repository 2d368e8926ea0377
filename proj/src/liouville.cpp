#include "recabs/liouville.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>

namespace recabs {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

constexpr complex<double> kI{0.0, 1.0};

constexpr double kResidualTol = 1e-9;
constexpr double kTraceTol = 1e-10;
constexpr double kHermTol = 1e-10;
constexpr double kPsdTol = 1e-8;

struct FrameAffine {
    VectorXd base;   // value at probe_detuning = 0, u = 0
    VectorXd probe;  // d(value)/d(probe_detuning)
    VectorXd shift;  // d(value)/du
};

// One tree walk from the probe's lower level; anchored levels copy their
// reference level's coefficients plus a constant offset.
FrameAffine frame_affine(const LevelScheme& s) {
    const int n = s.dimension();
    FrameAffine fa{VectorXd::Zero(n), VectorXd::Zero(n), VectorXd::Zero(n)};

    std::vector<std::vector<int>> edges_at(n);
    for (int f = 0; f < static_cast<int>(s.fields.size()); ++f) {
        edges_at[s.fields[f].lower_level].push_back(f);
        edges_at[s.fields[f].upper_level].push_back(f);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{s.probe().lower_level};
    seen[s.probe().lower_level] = true;
    while (!stack.empty()) {
        const int at = stack.back();
        stack.pop_back();
        for (int fi : edges_at[at]) {
            const DriveField& f = s.fields[fi];
            const bool upward = (f.lower_level == at);
            const int next = upward ? f.upper_level : f.lower_level;
            if (seen[next]) continue;
            seen[next] = true;
            const double sgn = upward ? 1.0 : -1.0;
            const bool is_probe = (f.id == "probe");
            fa.base[next] = fa.base[at] + sgn * (is_probe ? 0.0 : -f.detuning);
            fa.probe[next] = fa.probe[at] + sgn * (is_probe ? -1.0 : 0.0);
            fa.shift[next] = fa.shift[at] + sgn * f.shift_coefficient;
            stack.push_back(next);
        }
    }
    for (const auto& a : s.anchors) {
        fa.base[a.level] = fa.base[a.reference_level] + a.offset;
        fa.probe[a.level] = fa.probe[a.reference_level];
        fa.shift[a.level] = fa.shift[a.reference_level];
    }
    return fa;
}

MatrixXd offdiagonal_hamiltonian(const LevelScheme& s) {
    const int n = s.dimension();
    MatrixXd h = MatrixXd::Zero(n, n);
    for (const auto& f : s.fields) {
        h(f.lower_level, f.upper_level) += f.rabi / 2.0;
        h(f.upper_level, f.lower_level) += f.rabi / 2.0;
    }
    for (const auto& x : s.extra_couplings) {
        const double amp = s.field(x.field_id)->rabi * x.amplitude_scale / 2.0;
        h(x.lower_level, x.upper_level) += amp;
        h(x.upper_level, x.lower_level) += amp;
    }
    return h;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

void add_dissipator(MatrixXcd& l, const MatrixXcd& jump) {
    const int n = jump.rows();
    const MatrixXcd id = MatrixXcd::Identity(n, n);
    const MatrixXcd jj = jump.adjoint() * jump;
    l += kron(jump.conjugate(), jump);
    l -= 0.5 * kron(id, jj);
    l -= 0.5 * kron(jj.transpose(), id);
}

std::vector<MatrixXcd> jump_operators(const LevelScheme& s) {
    const int n = s.dimension();
    std::vector<MatrixXcd> jumps;
    for (const auto& lv : s.levels) {
        for (const auto& br : lv.decay_branches) {
            const double rate = lv.population_decay_rate * br.fraction;
            if (rate <= 0.0) continue;
            MatrixXcd j = MatrixXcd::Zero(n, n);
            j(br.target, lv.id) = std::sqrt(rate);
            jumps.push_back(std::move(j));
        }
    }
    for (const auto& d : s.dephasing) {
        if (d.rate <= 0.0) continue;
        MatrixXcd j = MatrixXcd::Zero(n, n);
        const double amp = std::sqrt(d.rate / 2.0);
        j(d.level_a, d.level_a) = amp;
        j(d.level_b, d.level_b) = -amp;
        jumps.push_back(std::move(j));
    }
    return jumps;
}

}  // namespace

std::map<int, double> rotating_frame_detunings(const LevelScheme& scheme,
                                               const ShiftSample& sample,
                                               std::optional<double> probe_detuning) {
    const FrameAffine fa = frame_affine(scheme);
    const double dp = probe_detuning.value_or(scheme.probe().detuning);
    std::map<int, double> values;
    for (int i = 0; i < scheme.dimension(); ++i) {
        values[i] = fa.base[i] + dp * fa.probe[i] + sample.u * fa.shift[i];
    }
    return values;
}

Eigen::MatrixXcd build_hamiltonian(const LevelScheme& scheme, const ShiftSample& sample,
                                   double probe_detuning) {
    const int n = scheme.dimension();
    MatrixXcd h = offdiagonal_hamiltonian(scheme).cast<complex<double>>();
    const auto values = rotating_frame_detunings(scheme, sample, probe_detuning);
    for (int i = 0; i < n; ++i) h(i, i) = values.at(i);
    return h;
}

Eigen::MatrixXcd build_liouvillian(const Eigen::MatrixXcd& hamiltonian,
                                   const LevelScheme& scheme) {
    const int n = static_cast<int>(hamiltonian.rows());
    const MatrixXcd id = MatrixXcd::Identity(n, n);
    MatrixXcd l = -kI * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
    for (const auto& jump : jump_operators(scheme)) add_dissipator(l, jump);
    return l;
}

SteadyStateSolution steady_state(const Eigen::MatrixXcd& liouvillian,
                                 const LevelScheme* scheme) {
    const int nn = static_cast<int>(liouvillian.rows());
    const int n = static_cast<int>(std::lround(std::sqrt(double(nn))));

    const double l_norm = liouvillian.norm();
    if (!(l_norm > 0.0)) {
        throw SingularLiouvillian("zero Liouvillian has no unique steady state");
    }

    MatrixXcd m = liouvillian;
    m.row(0).setZero();
    for (int i = 0; i < n; ++i) m(0, i * n + i) = 1.0;
    VectorXcd b = VectorXcd::Zero(nn);
    b(0) = 1.0;

    const VectorXcd x = Eigen::PartialPivLU<MatrixXcd>(m).solve(b);
    if (!x.allFinite()) {
        throw SingularLiouvillian("steady-state solve produced non-finite values");
    }

    SteadyStateSolution sol;
    sol.residual_norm = (liouvillian * x).norm() / l_norm;
    if (sol.residual_norm > kResidualTol) {
        throw SingularLiouvillian("steady state not unique or ill-conditioned (residual " +
                                  std::to_string(sol.residual_norm) + ")");
    }

    sol.rho = Eigen::Map<const MatrixXcd>(x.data(), n, n);
    sol.trace_error = std::abs(sol.rho.trace() - 1.0);
    sol.hermiticity_error = (sol.rho - sol.rho.adjoint()).cwiseAbs().maxCoeff();

    const MatrixXcd herm = 0.5 * (sol.rho + sol.rho.adjoint()) +
                           kPsdTol * MatrixXcd::Identity(n, n);
    sol.psd_ok = (Eigen::LLT<MatrixXcd>(herm).info() == Eigen::Success);

    if (sol.trace_error > kTraceTol || sol.hermiticity_error > kHermTol || !sol.psd_ok) {
        throw NumericalViolation("steady state breaks tolerances: trace err " +
                                 std::to_string(sol.trace_error) + ", herm err " +
                                 std::to_string(sol.hermiticity_error) +
                                 (sol.psd_ok ? "" : ", negative eigenvalue"));
    }

    if (scheme != nullptr) {
        const auto& pr = scheme->probe();
        sol.probe_coherence = sol.rho(pr.lower_level, pr.upper_level);
    }
    return sol;
}

Eigen::MatrixXcd evolve_oracle(const Eigen::MatrixXcd& liouvillian,
                               const Eigen::MatrixXcd& rho0, double t) {
    // Dormand-Prince 5(4) with standard step control.
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const int n = static_cast<int>(rho0.rows());
    VectorXcd y = Eigen::Map<const VectorXcd>(rho0.data(), n * n);
    if (t <= 0.0) return rho0;

    const double tol = 1e-10;
    const double scale = liouvillian.cwiseAbs().rowwise().sum().maxCoeff();
    double dt = (scale > 0.0) ? std::min(t, 0.1 / scale) : t;
    double time = 0.0;

    VectorXcd k1 = liouvillian * y;
    while (time < t) {
        dt = std::min(dt, t - time);
        if (dt < 1e-14 || dt < 1e-15 * t) {
            throw StepFailure("integration step size underflow at t = " + std::to_string(time));
        }
        const VectorXcd k2 = liouvillian * (y + dt * (a21 * k1));
        const VectorXcd k3 = liouvillian * (y + dt * (a31 * k1 + a32 * k2));
        const VectorXcd k4 = liouvillian * (y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const VectorXcd k5 =
            liouvillian * (y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const VectorXcd k6 = liouvillian *
                             (y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const VectorXcd ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const VectorXcd k7 = liouvillian * ynew;
        const VectorXcd err =
            dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err_norm = err.cwiseAbs().maxCoeff() / tol;
        if (err_norm <= 1.0) {
            time += dt;
            y = ynew;
            k1 = k7;  // first-same-as-last
        }
        const double factor = (err_norm > 0.0)
                                  ? 0.9 * std::pow(err_norm, -0.2)
                                  : 5.0;
        dt *= std::clamp(factor, 0.2, 5.0);
    }
    return Eigen::Map<const MatrixXcd>(y.data(), n, n);
}

double normalized_absorption(const SteadyStateSolution& sol, const LevelScheme& scheme) {
    const auto& pr = scheme.probe();
    if (pr.rabi <= 0.0) throw ZeroProbe("probe Rabi frequency is zero");
    const double gamma_probe = scheme.probe_gamma();
    return std::abs(sol.probe_coherence.imag()) * 2.0 * gamma_probe / pr.rabi;
}

AbsorberModel::AbsorberModel(const LevelScheme& scheme)
    : scheme_(scheme), n_(scheme.dimension()) {
    const auto& pr = scheme_.probe();
    probe_lower_ = pr.lower_level;
    probe_upper_ = pr.upper_level;
    probe_rabi_ = pr.rabi;
    probe_hwhm_ = scheme_.probe_gamma();

    h_offdiag_ = offdiagonal_hamiltonian(scheme_);
    const FrameAffine fa = frame_affine(scheme_);
    diag_base_ = fa.base;
    diag_probe_ = fa.probe;
    diag_u_ = fa.shift;

    l_const_ = build_liouvillian(h_offdiag_.cast<complex<double>>(), scheme_);
}

Eigen::MatrixXcd AbsorberModel::hamiltonian(double u, double probe_detuning) const {
    MatrixXcd h = h_offdiag_.cast<complex<double>>();
    for (int i = 0; i < n_; ++i) {
        h(i, i) = diag_base_[i] + probe_detuning * diag_probe_[i] + u * diag_u_[i];
    }
    return h;
}

Eigen::MatrixXcd AbsorberModel::liouvillian(double u, double probe_detuning) const {
    MatrixXcd l = l_const_;
    VectorXd v = diag_base_ + probe_detuning * diag_probe_ + u * diag_u_;
    for (int col = 0; col < n_; ++col) {
        for (int row = 0; row < n_; ++row) {
            const int m = col * n_ + row;
            l(m, m) += -kI * (v[row] - v[col]);
        }
    }
    return l;
}

SteadyStateSolution AbsorberModel::steady_state(double u, double probe_detuning) const {
    const auto context = [&](const char* what) {
        return std::string(what) + " (at u = " + std::to_string(u) +
               ", probe detuning = " + std::to_string(probe_detuning) + ")";
    };
    try {
        return recabs::steady_state(liouvillian(u, probe_detuning), &scheme_);
    } catch (const SingularLiouvillian& e) {
        throw SingularLiouvillian(context(e.what()));
    } catch (const NumericalViolation& e) {
        throw NumericalViolation(context(e.what()));
    }
}

double AbsorberModel::absorption(double u, double probe_detuning) const {
    return normalized_absorption(steady_state(u, probe_detuning), scheme_);
}

}  // namespace recabs
