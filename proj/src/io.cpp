#include "recabs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace recabs {

using nlohmann::ordered_json;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string scheme_to_json(const LevelScheme& s) {
    ordered_json j;
    j["levels"] = ordered_json::array();
    for (const auto& lv : s.levels) {
        ordered_json branches = ordered_json::array();
        for (const auto& br : lv.decay_branches) {
            branches.push_back({{"target", br.target}, {"fraction", br.fraction}});
        }
        j["levels"].push_back({{"id", lv.id},
                               {"label", lv.label},
                               {"population_decay_rate", lv.population_decay_rate},
                               {"decay_branches", branches}});
    }
    j["fields"] = ordered_json::array();
    for (const auto& f : s.fields) {
        j["fields"].push_back({{"id", f.id},
                               {"lower_level", f.lower_level},
                               {"upper_level", f.upper_level},
                               {"rabi", f.rabi},
                               {"detuning", f.detuning},
                               {"shift_coefficient", f.shift_coefficient}});
    }
    j["dephasing"] = ordered_json::array();
    for (const auto& d : s.dephasing) {
        j["dephasing"].push_back(
            {{"level_pair", {d.level_a, d.level_b}}, {"rate", d.rate}});
    }
    j["inhom"] = {{"sigma", s.inhom.sigma}, {"distribution", "gaussian"}};
    if (!s.anchors.empty()) {
        j["anchors"] = ordered_json::array();
        for (const auto& a : s.anchors) {
            j["anchors"].push_back({{"level", a.level},
                                    {"reference_level", a.reference_level},
                                    {"offset", a.offset}});
        }
    }
    if (!s.extra_couplings.empty()) {
        j["extra_couplings"] = ordered_json::array();
        for (const auto& x : s.extra_couplings) {
            j["extra_couplings"].push_back({{"field_id", x.field_id},
                                            {"lower_level", x.lower_level},
                                            {"upper_level", x.upper_level},
                                            {"amplitude_scale", x.amplitude_scale}});
        }
    }
    return j.dump(2) + "\n";
}

namespace {

void require_keys(const ordered_json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

LevelScheme scheme_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("scheme JSON: ") + e.what());
    }
    require_keys(j, {"levels", "fields", "dephasing", "inhom", "anchors", "extra_couplings"},
                 "scheme");

    std::vector<Level> levels;
    for (const auto& lj : j.at("levels")) {
        require_keys(lj, {"id", "label", "population_decay_rate", "decay_branches"}, "level");
        Level lv;
        lv.id = lj.at("id").get<int>();
        lv.label = lj.at("label").get<std::string>();
        lv.population_decay_rate = lj.at("population_decay_rate").get<double>();
        for (const auto& bj : lj.at("decay_branches")) {
            require_keys(bj, {"target", "fraction"}, "decay branch");
            lv.decay_branches.push_back(
                {bj.at("target").get<int>(), bj.at("fraction").get<double>()});
        }
        levels.push_back(std::move(lv));
    }
    std::vector<DriveField> fields;
    for (const auto& fj : j.at("fields")) {
        require_keys(fj, {"id", "lower_level", "upper_level", "rabi", "detuning",
                          "shift_coefficient"},
                     "field");
        fields.push_back({fj.at("id").get<std::string>(), fj.at("lower_level").get<int>(),
                          fj.at("upper_level").get<int>(), fj.at("rabi").get<double>(),
                          fj.at("detuning").get<double>(),
                          fj.at("shift_coefficient").get<double>()});
    }
    std::vector<DephasingChannel> dephasing;
    if (j.contains("dephasing")) {
        for (const auto& dj : j.at("dephasing")) {
            require_keys(dj, {"level_pair", "rate"}, "dephasing channel");
            dephasing.push_back({dj.at("level_pair").at(0).get<int>(),
                                 dj.at("level_pair").at(1).get<int>(),
                                 dj.at("rate").get<double>()});
        }
    }
    const auto& ij = j.at("inhom");
    require_keys(ij, {"sigma", "distribution"}, "inhom");
    if (ij.contains("distribution") && ij.at("distribution") != "gaussian") {
        throw ValidationError("only gaussian inhomogeneity is supported");
    }
    InhomogeneityModel inhom{ij.at("sigma").get<double>()};

    std::vector<FrameAnchor> anchors;
    if (j.contains("anchors")) {
        for (const auto& aj : j.at("anchors")) {
            require_keys(aj, {"level", "reference_level", "offset"}, "anchor");
            anchors.push_back({aj.at("level").get<int>(), aj.at("reference_level").get<int>(),
                               aj.at("offset").get<double>()});
        }
    }
    std::vector<ExtraCoupling> extra;
    if (j.contains("extra_couplings")) {
        for (const auto& xj : j.at("extra_couplings")) {
            require_keys(xj, {"field_id", "lower_level", "upper_level", "amplitude_scale"},
                         "extra coupling");
            extra.push_back({xj.at("field_id").get<std::string>(),
                             xj.at("lower_level").get<int>(), xj.at("upper_level").get<int>(),
                             xj.at("amplitude_scale").get<double>()});
        }
    }
    return build_scheme(levels, fields, dephasing, inhom, anchors, extra);
}

void save_scheme(const LevelScheme& scheme, const std::string& path) {
    write_text_file(path, scheme_to_json(scheme));
}

LevelScheme load_scheme(const std::string& path) {
    return scheme_from_json(read_text_file(path));
}

std::uint64_t scheme_digest(const LevelScheme& scheme) {
    const std::string text = scheme_to_json(scheme);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
    std::ostringstream csv;
    csv << "probe_detuning_mhz,absorption_norm\n";
    for (std::size_t i = 0; i < s.probe_detunings.size(); ++i) {
        csv << fmt9(s.probe_detunings[i]) << ',' << fmt9(s.absorption[i]) << '\n';
    }
    write_text_file(path, csv.str());

    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(s.scheme_digest));
    std::ostringstream meta;
    meta << "{\n"
         << "  \"scheme_digest\": \"" << digest << "\",\n"
         << "  \"grid_n\": " << s.grid_n << ",\n"
         << "  \"grid_span\": " << fmt9(s.grid_span) << ",\n"
         << "  \"probe_rabi\": " << fmt9(s.probe_rabi) << ",\n"
         << "  \"points\": " << s.probe_detunings.size() << "\n"
         << "}\n";
    write_text_file(path + ".meta.json", meta.str());
}

Spectrum read_spectrum_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "probe_detuning_mhz,absorption_norm") {
        throw ParseError(path + ": missing spectrum CSV header");
    }
    Spectrum s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path + ": malformed CSV row");
        s.probe_detunings.push_back(std::stod(line.substr(0, comma)));
        s.absorption.push_back(std::stod(line.substr(comma + 1)));
    }
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw Error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.good()) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace recabs
