#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recabs/ensemble.hpp"
#include "recabs/scheme.hpp"

namespace recabs {

/// Fixed result formatting: 9 significant digits.
std::string fmt9(double v);

/// Scheme serialization. Doubles use shortest round-trip formatting, so
/// save -> load -> save is bit-exact.
std::string scheme_to_json(const LevelScheme& scheme);
LevelScheme scheme_from_json(const std::string& text);
void save_scheme(const LevelScheme& scheme, const std::string& path);
LevelScheme load_scheme(const std::string& path);

/// FNV-1a over the canonical serialization.
std::uint64_t scheme_digest(const LevelScheme& scheme);

/// CSV with header `probe_detuning_mhz,absorption_norm` plus a sidecar
/// `<path>.meta.json` carrying the scheme digest, grid and probe Rabi.
void write_spectrum_csv(const Spectrum& s, const std::string& path);
Spectrum read_spectrum_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace recabs
