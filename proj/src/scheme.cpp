#include "recabs/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace recabs {

namespace {

constexpr double kBranchingTol = 1e-9;

void check_level(const Level& lv, int n_levels) {
    if (lv.population_decay_rate < 0.0) {
        throw NonPhysicalParams("level " + lv.label + ": negative population decay rate");
    }
    double sum = 0.0;
    for (const auto& br : lv.decay_branches) {
        if (br.fraction < 0.0) {
            throw BadBranching("level " + lv.label + ": negative branching fraction");
        }
        if (br.target == lv.id) {
            throw BadBranching("level " + lv.label + ": self-branching");
        }
        if (br.target < 0 || br.target >= n_levels) {
            throw BadBranching("level " + lv.label + ": branch target out of range");
        }
        sum += br.fraction;
    }
    if (lv.population_decay_rate > 0.0 && std::abs(sum - 1.0) > kBranchingTol) {
        throw BadBranching("level " + lv.label + ": branching fractions sum to " +
                           std::to_string(sum) + ", expected 1");
    }
}

// Walks the drive tree from the probe's lower level; visit(level, parent,
// field, upward) is called once per edge with upward = true when the edge is
// traversed from its lower to its upper level.
template <typename Visit>
void walk_drive_tree(const LevelScheme& s, Visit visit) {
    const int n = s.dimension();
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
        for (int f : edges_at[at]) {
            const DriveField& fld = s.fields[f];
            const bool upward = (fld.lower_level == at);
            const int next = upward ? fld.upper_level : fld.lower_level;
            if (seen[next]) continue;
            seen[next] = true;
            visit(next, at, fld, upward);
            stack.push_back(next);
        }
    }
}

}  // namespace

const DriveField& LevelScheme::probe() const {
    for (const auto& f : fields) {
        if (f.id == "probe") return f;
    }
    throw MissingProbe("scheme has no probe field");
}

const DriveField* LevelScheme::field(const std::string& id) const {
    for (const auto& f : fields) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

DriveField* LevelScheme::field(const std::string& id) {
    for (auto& f : fields) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

const Level& LevelScheme::level(int id) const {
    if (id < 0 || id >= dimension()) throw Error("level id out of range");
    return levels[id];
}

double LevelScheme::probe_gamma() const {
    return level(probe().upper_level).population_decay_rate / 2.0;
}

ShiftSample LevelScheme::shift_sample(double u) const {
    ShiftSample sample;
    sample.u = u;
    for (const auto& f : fields) {
        sample.per_field_shift[f.id] = f.shift_coefficient * u;
    }
    return sample;
}

double LevelScheme::two_photon_shift_coefficient() const {
    const DriveField* coupling = field("coupling");
    if (coupling == nullptr) return 0.0;
    const int e = probe().upper_level;
    const int two_photon_level =
        (coupling->lower_level == e) ? coupling->upper_level : coupling->lower_level;

    // d(rotating-frame value)/du along the tree; the traversal rule is
    // value(upper) - value(lower) = -(detuning - shift), so the u-derivative
    // picks up +coefficient going up an edge and -coefficient going down.
    std::vector<double> deriv(dimension(), 0.0);
    walk_drive_tree(*this, [&](int next, int parent, const DriveField& fld, bool upward) {
        deriv[next] = deriv[parent] + (upward ? fld.shift_coefficient : -fld.shift_coefficient);
    });
    return deriv[two_photon_level];
}

LevelScheme build_scheme(std::vector<Level> levels, std::vector<DriveField> fields,
                         std::vector<DephasingChannel> dephasing, InhomogeneityModel inhom,
                         std::vector<FrameAnchor> anchors,
                         std::vector<ExtraCoupling> extra_couplings) {
    LevelScheme s;
    s.levels = std::move(levels);
    s.fields = std::move(fields);
    s.dephasing = std::move(dephasing);
    s.inhom = inhom;
    s.anchors = std::move(anchors);
    s.extra_couplings = std::move(extra_couplings);

    const int n = s.dimension();
    if (n < 2) throw Error("scheme needs at least 2 levels");
    if (n > 6) throw Error("scheme limited to 6 levels");
    for (int i = 0; i < n; ++i) {
        if (s.levels[i].id != i) {
            throw Error("level ids must be 0..N-1 in order");
        }
        check_level(s.levels[i], n);
    }

    int probes = 0;
    for (const auto& f : s.fields) {
        if (f.id == "probe") ++probes;
        if (f.lower_level == f.upper_level) {
            throw Error("field " + f.id + ": lower and upper level coincide");
        }
        if (f.lower_level < 0 || f.lower_level >= n || f.upper_level < 0 || f.upper_level >= n) {
            throw Error("field " + f.id + ": level id out of range");
        }
        if (f.rabi < 0.0) throw NonPhysicalParams("field " + f.id + ": negative Rabi frequency");
    }
    if (probes != 1) {
        throw MissingProbe("scheme must have exactly one probe field, found " +
                           std::to_string(probes));
    }

    // The drive multigraph must be a tree over the levels it touches so a
    // rotating frame exists; union-find detects any loop, including
    // parallel edges on the same pair.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::set<int> driven;
    for (const auto& f : s.fields) {
        driven.insert(f.lower_level);
        driven.insert(f.upper_level);
        const int a = find(f.lower_level), b = find(f.upper_level);
        if (a == b) {
            throw CyclicDriveGraph("drive fields form a loop through field " + f.id);
        }
        parent[a] = b;
    }
    const int root = find(s.probe().lower_level);
    for (int lv : driven) {
        if (find(lv) != root) {
            throw DisconnectedDriveGraph("drive graph splits into disconnected pieces");
        }
    }

    std::set<int> anchored;
    for (const auto& a : s.anchors) {
        if (a.level < 0 || a.level >= n || a.reference_level < 0 || a.reference_level >= n) {
            throw Error("frame anchor level out of range");
        }
        if (driven.count(a.level) != 0) {
            throw Error("level " + s.levels[a.level].label + " is both driven and anchored");
        }
        if (driven.count(a.reference_level) == 0) {
            throw Error("frame anchor must reference a driven level");
        }
        if (!anchored.insert(a.level).second) {
            throw Error("level " + s.levels[a.level].label + " anchored twice");
        }
    }
    for (int i = 0; i < n; ++i) {
        if (driven.count(i) == 0 && anchored.count(i) == 0) {
            throw DisconnectedDriveGraph("level " + s.levels[i].label +
                                         " is neither driven nor anchored");
        }
    }
    for (const auto& x : s.extra_couplings) {
        if (s.field(x.field_id) == nullptr) {
            throw Error("extra coupling references unknown field " + x.field_id);
        }
        if (x.lower_level == x.upper_level || x.lower_level < 0 || x.lower_level >= n ||
            x.upper_level < 0 || x.upper_level >= n) {
            throw Error("extra coupling has a bad level pair");
        }
        if (x.amplitude_scale < 0.0) {
            throw NonPhysicalParams("extra coupling amplitude scale must be nonnegative");
        }
    }

    for (const auto& d : s.dephasing) {
        if (d.rate < 0.0) throw NonPhysicalParams("negative dephasing rate");
        if (d.level_a == d.level_b || d.level_a < 0 || d.level_a >= n || d.level_b < 0 ||
            d.level_b >= n) {
            throw Error("dephasing channel has a bad level pair");
        }
    }
    if (s.inhom.sigma <= 0.0) throw NonPhysicalParams("inhomogeneous sigma must be positive");
    return s;
}

PresetKind preset_kind_from_string(const std::string& name) {
    if (name == "two_level") return PresetKind::TwoLevel;
    if (name == "lambda") return PresetKind::Lambda;
    if (name == "n_type") return PresetKind::NType;
    if (name == "ladder_rydberg") return PresetKind::LadderRydberg;
    if (name == "n_type_extra_hf") return PresetKind::NTypeExtraHf;
    throw UnknownKind("unknown preset kind: " + name);
}

std::string to_string(PresetKind kind) {
    switch (kind) {
        case PresetKind::TwoLevel: return "two_level";
        case PresetKind::Lambda: return "lambda";
        case PresetKind::NType: return "n_type";
        case PresetKind::LadderRydberg: return "ladder_rydberg";
        case PresetKind::NTypeExtraHf: return "n_type_extra_hf";
    }
    throw UnknownKind("bad preset kind value");
}

namespace {

void check_positive(double v, const char* what) {
    if (!(v > 0.0)) throw NonPhysicalParams(std::string(what) + " must be positive");
}

void check_nonnegative(double v, const char* what) {
    if (v < 0.0) throw NonPhysicalParams(std::string(what) + " must be nonnegative");
}

}  // namespace

LevelScheme preset(PresetKind kind, const PresetParams& p) {
    check_positive(p.gamma, "gamma");
    check_positive(p.sigma, "sigma");
    check_nonnegative(p.gamma_sg, "gamma_sg");
    check_nonnegative(p.omega, "omega");
    check_nonnegative(p.omega_r, "omega_r");
    if (p.eta <= 0.0) throw NonPositiveEta("eta must be positive");
    const double probe_amp = p.probe_amplitude.value_or(0.01 * p.gamma);
    check_nonnegative(probe_amp, "probe amplitude");

    // Quoted drive amplitudes are matrix elements; stored rabi is the full
    // Autler-Townes splitting.
    const double probe_rabi = 2.0 * probe_amp;
    const double coupling_rabi = 2.0 * p.omega;
    const double recovery_rabi = 2.0 * p.omega_r;

    InhomogeneityModel inhom{p.sigma};

    switch (kind) {
        case PresetKind::TwoLevel: {
            std::vector<Level> levels{
                {0, "g", 0.0, {}},
                {1, "e", 2.0 * p.gamma, {{0, 1.0}}},
            };
            std::vector<DriveField> fields{
                {"probe", 0, 1, probe_rabi, 0.0, p.sigma},
            };
            return build_scheme(levels, fields, {}, inhom);
        }
        case PresetKind::Lambda:
        case PresetKind::NType:
        case PresetKind::NTypeExtraHf: {
            if (p.e_branch_to_g < 0.0 || p.e_branch_to_g > 1.0) {
                throw NonPhysicalParams("e_branch_to_g must lie in [0,1]");
            }
            std::vector<Level> levels{
                {0, "g", 0.0, {}},
                {1, "s", 0.0, {}},
                {2, "e", 2.0 * p.gamma, {{0, p.e_branch_to_g}, {1, 1.0 - p.e_branch_to_g}}},
            };
            std::vector<DriveField> fields{
                {"probe", 0, 2, probe_rabi, 0.0, p.sigma},
                {"coupling", 1, 2, coupling_rabi, p.delta, p.sigma},
            };
            std::vector<DephasingChannel> deph{{0, 1, p.gamma_sg}};
            if (kind != PresetKind::Lambda) {
                check_positive(p.gamma_r, "gamma_r");
                levels.push_back({3, "r", 2.0 * p.gamma_r, {{0, 1.0}}});
                fields.push_back({"recovery", 0, 3, recovery_rabi, p.delta_r, p.eta * p.sigma});
            }
            std::vector<FrameAnchor> anchors;
            std::vector<ExtraCoupling> extra;
            if (kind == PresetKind::NTypeExtraHf) {
                check_positive(p.extra_splitting, "extra_splitting");
                levels.push_back(
                    {4, "e2", 2.0 * p.gamma, {{0, p.e_branch_to_g}, {1, 1.0 - p.e_branch_to_g}}});
                anchors.push_back({4, 2, p.extra_splitting});
                extra.push_back({"probe", 0, 4, 1.0});
                extra.push_back({"coupling", 1, 4, 1.0});
            }
            return build_scheme(levels, fields, deph, inhom, anchors, extra);
        }
        case PresetKind::LadderRydberg: {
            check_positive(p.gamma_r, "gamma_r");
            check_positive(p.sigma2, "sigma2");
            if (p.sigma2 >= p.sigma) {
                throw NonPhysicalParams("ladder preset requires sigma2 << sigma");
            }
            check_nonnegative(p.s_decay_rate, "s_decay_rate");
            const double pure_dephasing = p.gamma_sg - 0.5 * p.s_decay_rate;
            if (pure_dephasing < 0.0) {
                throw NonPhysicalParams("gamma_sg smaller than the |s> decay contribution");
            }
            std::vector<Level> levels{
                {0, "g", 0.0, {}},
                {1, "e", 2.0 * p.gamma, {{0, 1.0}}},
                {2, "s", p.s_decay_rate, {{1, 1.0}}},
                {3, "r", 2.0 * p.gamma_r, {{2, 1.0}}},
            };
            // Probe counter-propagates the coupling and recovery beams; the
            // signed coefficients leave a residual two-photon std of sigma2.
            const double c_probe = p.sigma;
            const double c_coupling = -(p.sigma - p.sigma2);
            const double c_recovery = p.eta * c_coupling;
            std::vector<DriveField> fields{
                {"probe", 0, 1, probe_rabi, 0.0, c_probe},
                {"coupling", 1, 2, coupling_rabi, p.delta, c_coupling},
                {"recovery", 2, 3, recovery_rabi, p.delta_r, c_recovery},
            };
            std::vector<DephasingChannel> deph{{0, 2, pure_dephasing}};
            return build_scheme(levels, fields, deph, inhom);
        }
    }
    throw UnknownKind("bad preset kind value");
}

LevelScheme preset(const std::string& kind, const PresetParams& params) {
    return preset(preset_kind_from_string(kind), params);
}

}  // namespace recabs
