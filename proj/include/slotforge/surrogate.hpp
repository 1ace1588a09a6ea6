#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "slotforge/geometry.hpp"

// Analytic forward model: the slot and the backing cavity each contribute a
// family of Lorentzian notches; their superposition (clamped at -40 dB) is the
// reflection-coefficient spectrum. This stands in for a full-wave solver and
// is deliberately smooth, deterministic and identifiable in (S1, Sw1, theta).

namespace slotforge {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDbFloor = -40.0;

/// One Lorentzian notch of the surrogate response.
struct Mode {
  enum class Kind { slot, cavity };
  Kind kind;
  double center_ghz;
  double depth_db;  // positive, notch depth
  double q;         // quality factor; bandwidth = center / q

  double bandwidth_ghz() const { return center_ghz / q; }
};

/// Resonant modes excited by a given geometry, slot modes first (ascending
/// harmonic), then cavity modes ascending in frequency. Modes more than
/// 0.5 GHz above the grid stop are dropped.
inline std::vector<Mode> enumerate_modes(const SlotGeometry& geom,
                                         const FixedGeometry& fixed,
                                         const FrequencyGrid& grid) {
  geom.validate();
  fixed.validate();
  grid.validate();

  const double theta = geom.theta_deg * std::numbers::pi / 180.0;
  const double sin2 = std::sin(theta) * std::sin(theta);
  const double cos2 = std::cos(theta) * std::cos(theta);
  const double cutoff_ghz = grid.stop_ghz + 0.5;

  std::vector<Mode> modes;

  // Slot resonances: half-wave harmonics of the slot perimeter length, with a
  // small angle-dependent frequency pull.
  const double slot_len_m = (geom.s1_mm + geom.sw1_mm) * 1e-3;
  const double slot_depth = 25.0 * (0.15 + 0.85 * cos2);
  const double slot_q = std::clamp(8.0 * geom.s1_mm / geom.sw1_mm, 5.0, 400.0);
  for (int k = 1; k <= 5; ++k) {
    const double f_ghz =
        k * kSpeedOfLight / (2.0 * slot_len_m) * (1.0 + 0.02 * sin2) / 1e9;
    if (f_ghz > cutoff_ghz) continue;
    modes.push_back({Mode::Kind::slot, f_ghz, slot_depth, slot_q});
  }

  // Rectangular-cavity TE(m,n) resonances of the backing volume.
  const double len_m = fixed.length_mm * 1e-3;
  const double wid_m = fixed.width_mm * 1e-3;
  const double cavity_depth = 12.0 * (0.15 + 0.85 * sin2);
  std::vector<Mode> cavity;
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      const double f_ghz = kSpeedOfLight / 2.0 *
                           std::sqrt((m / len_m) * (m / len_m) +
                                     (n / wid_m) * (n / wid_m)) /
                           1e9;
      if (f_ghz > cutoff_ghz) continue;
      cavity.push_back({Mode::Kind::cavity, f_ghz, cavity_depth, 120.0});
    }
  }
  std::stable_sort(cavity.begin(), cavity.end(),
                   [](const Mode& a, const Mode& b) { return a.center_ghz < b.center_ghz; });
  modes.insert(modes.end(), cavity.begin(), cavity.end());
  return modes;
}

/// Reflection coefficient (dB) of the superposed mode set, clamped at -40 dB.
/// Pure function: identical inputs give bit-identical output.
inline Spectrum forward_spectrum(const SlotGeometry& geom,
                                 const FixedGeometry& fixed,
                                 const FrequencyGrid& grid) {
  const std::vector<Mode> modes = enumerate_modes(geom, fixed, grid);
  Spectrum spec;
  spec.grid = grid;
  spec.s11_db.resize(static_cast<size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    const double f = grid.point(i);
    double sum = 0.0;
    for (const Mode& m : modes) {
      const double u = 2.0 * (f - m.center_ghz) / m.bandwidth_ghz();
      sum += m.depth_db / (1.0 + u * u);
    }
    spec.s11_db[static_cast<size_t>(i)] = std::max(kDbFloor, -sum);
  }
  return spec;
}

/// Voltage standing wave ratio per grid point. A 0 dB sample maps to +inf
/// (perfect reflection), reported as a value rather than an error.
inline std::vector<double> vswr(const Spectrum& spectrum) {
  spectrum.validate();
  std::vector<double> out(spectrum.s11_db.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const double gamma = std::pow(10.0, spectrum.s11_db[i] / 20.0);
    out[i] = gamma < 1.0 ? (1.0 + gamma) / (1.0 - gamma)
                         : std::numeric_limits<double>::infinity();
  }
  return out;
}

/// True iff the slot's rotated bounding box fits the radiating face with the
/// given margin on every side.
inline bool slot_feasible(const SlotGeometry& geom, const FixedGeometry& fixed,
                          double margin_mm = 5.0) {
  geom.validate();
  fixed.validate();
  const double theta = geom.theta_deg * std::numbers::pi / 180.0;
  const double c = std::abs(std::cos(theta));
  const double s = std::abs(std::sin(theta));
  return geom.s1_mm * c + geom.sw1_mm * s <= fixed.length_mm - 2.0 * margin_mm &&
         geom.s1_mm * s + geom.sw1_mm * c <= fixed.width_mm - 2.0 * margin_mm;
}

}  // namespace slotforge
