#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "slotforge/pipeline.hpp"
#include "slotforge/surrogate.hpp"

// Inverse design: synthesize an idealized target spectrum with prescribed
// resonances, predict a geometry for it, re-simulate that geometry, and
// compare achieved resonances against the targets.

namespace slotforge {

/// A requested notch: center plus its -10 dB crossing frequencies.
struct ResonanceTarget {
  double center_ghz;
  double upper_ghz;
  double lower_ghz;

  double bandwidth_ghz() const { return upper_ghz - lower_ghz; }

  void validate(const FrequencyGrid& grid) const {
    if (!(lower_ghz < center_ghz && center_ghz < upper_ghz))
      throw validation_error("resonance target: requires lower < center < upper");
    if (lower_ghz < grid.start_ghz || upper_ghz > grid.stop_ghz)
      throw validation_error("resonance target: outside the frequency grid span");
  }
};

/// A notch extracted from a spectrum.
struct Resonance {
  double center_ghz;
  double depth_db;
  double bw10_ghz;
};

inline constexpr double kTargetNotchDepthDb = 25.0;
inline constexpr double kBandwidthThresholdDb = -10.0;

/// Idealized spectrum: one Lorentzian notch of depth 25 dB per target, with
/// the half-width chosen so the notch crosses -10 dB at the requested edges.
inline Spectrum synth_target_spectrum(const std::vector<ResonanceTarget>& targets,
                                      const FrequencyGrid& grid) {
  if (targets.empty()) throw validation_error("synth: at least one target required");
  for (const ResonanceTarget& t : targets) t.validate(grid);
  for (size_t i = 0; i < targets.size(); ++i)
    for (size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i].lower_ghz < targets[j].upper_ghz &&
          targets[j].lower_ghz < targets[i].upper_ghz)
        throw validation_error("synth: overlapping -10 dB intervals");

  // depth/(1+(w/gamma)^2) = 10 at the crossing => gamma = half_width/sqrt(D/10-1)
  const double edge_factor = std::sqrt(kTargetNotchDepthDb / 10.0 - 1.0);
  std::vector<double> gammas;
  gammas.reserve(targets.size());
  for (const ResonanceTarget& t : targets)
    gammas.push_back(t.bandwidth_ghz() / 2.0 / edge_factor);

  Spectrum spec;
  spec.grid = grid;
  spec.s11_db.resize(static_cast<size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    const double f = grid.point(i);
    double sum = 0.0;
    for (size_t k = 0; k < targets.size(); ++k) {
      const double u = (f - targets[k].center_ghz) / gammas[k];
      sum += kTargetNotchDepthDb / (1.0 + u * u);
    }
    spec.s11_db[static_cast<size_t>(i)] = std::max(kDbFloor, -sum);
  }
  return spec;
}

/// Local minima below `threshold_db`, centers refined by parabolic
/// interpolation, -10 dB edges by linear interpolation outward from the
/// minimum. Ascending in frequency; plateau ties go to the lowest index.
inline std::vector<Resonance> find_resonances(const Spectrum& spectrum,
                                              double threshold_db = kBandwidthThresholdDb) {
  spectrum.validate();
  const std::vector<double>& y = spectrum.s11_db;
  const FrequencyGrid& grid = spectrum.grid;
  const int n = grid.n_points;
  const double step = grid.step_ghz();

  std::vector<Resonance> out;
  for (int i = 1; i + 1 < n; ++i) {
    const double yi = y[static_cast<size_t>(i)];
    if (!(yi < threshold_db)) continue;
    if (!(yi < y[static_cast<size_t>(i - 1)] && yi <= y[static_cast<size_t>(i + 1)]))
      continue;

    // Parabola through the three neighbours; offset capped at half a step.
    const double a = y[static_cast<size_t>(i - 1)];
    const double c = y[static_cast<size_t>(i + 1)];
    const double denom = a - 2.0 * yi + c;
    double offset = denom > 0.0 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double center = grid.point(i) + offset * step;

    // Walk outward to the threshold crossings.
    auto cross = [&](int dir) -> double {
      int k = i;
      while (k + dir >= 0 && k + dir < n && y[static_cast<size_t>(k + dir)] < threshold_db)
        k += dir;
      if (k + dir < 0 || k + dir >= n) return grid.point(k);  // runs off the grid
      const double y0 = y[static_cast<size_t>(k)];
      const double y1 = y[static_cast<size_t>(k + dir)];
      const double frac = (threshold_db - y0) / (y1 - y0);
      return grid.point(k) + dir * frac * step;
    };
    const double lo = cross(-1);
    const double hi = cross(+1);
    out.push_back({center, yi, hi - lo});
  }
  return out;
}

struct TargetOutcome {
  ResonanceTarget target;
  bool matched = false;
  double achieved_center_ghz = 0.0;
  double achieved_bw10_ghz = 0.0;
  double center_delta_ghz = 0.0;
  double bandwidth_delta_ghz = 0.0;
};

struct RoundtripReport {
  DimPrediction prediction;
  Spectrum target_spectrum;
  Spectrum achieved_spectrum;
  std::vector<Resonance> achieved_resonances;
  std::vector<TargetOutcome> outcomes;
};

inline constexpr double kMatchToleranceGhz = 0.1;

/// Close the loop: target spectrum -> predicted dims -> re-simulated spectrum
/// -> resonance comparison.
inline RoundtripReport roundtrip(const TrainedPipeline& pipe,
                                 const std::vector<ResonanceTarget>& targets,
                                 const FixedGeometry& fixed = {}) {
  RoundtripReport rep;
  rep.target_spectrum = synth_target_spectrum(targets, pipe.grid);
  rep.prediction = predict_dims(pipe, rep.target_spectrum);

  const SlotGeometry geom{static_cast<double>(rep.prediction.rounded[0]),
                          static_cast<double>(rep.prediction.rounded[1]),
                          static_cast<double>(rep.prediction.rounded[2])};
  rep.achieved_spectrum = forward_spectrum(geom, fixed, pipe.grid);
  rep.achieved_resonances = find_resonances(rep.achieved_spectrum);

  for (const ResonanceTarget& t : targets) {
    TargetOutcome o;
    o.target = t;
    if (!rep.achieved_resonances.empty()) {
      const Resonance* best = &rep.achieved_resonances[0];
      for (const Resonance& r : rep.achieved_resonances)
        if (std::abs(r.center_ghz - t.center_ghz) <
            std::abs(best->center_ghz - t.center_ghz))
          best = &r;
      o.achieved_center_ghz = best->center_ghz;
      o.achieved_bw10_ghz = best->bw10_ghz;
      o.center_delta_ghz = best->center_ghz - t.center_ghz;
      o.bandwidth_delta_ghz = best->bw10_ghz - t.bandwidth_ghz();
      o.matched = std::abs(o.center_delta_ghz) <= kMatchToleranceGhz;
    }
    rep.outcomes.push_back(o);
  }
  return rep;
}

}  // namespace slotforge
