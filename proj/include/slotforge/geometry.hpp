#pragma once

#include <vector>

#include "slotforge/errors.hpp"

namespace slotforge {

/// Dimensions of the antenna that are held constant across the whole study.
/// Units: millimetres unless noted.
struct FixedGeometry {
  double length_mm = 140.0;
  double width_mm = 120.0;
  double face_thickness_mm = 2.5;
  double cavity_height_mm = 16.3;
  double s2_mm = 49.0;
  double sw2_mm = 6.0;
  double feed_inner_mm = 2.65;
  double feed_outer_mm = 9.91;
  double feed_eps_r = 2.5;

  void validate() const {
    const double dims[] = {length_mm,        width_mm, face_thickness_mm,
                           cavity_height_mm, s2_mm,    sw2_mm,
                           feed_inner_mm,    feed_outer_mm, feed_eps_r};
    for (double d : dims)
      if (!(d > 0.0)) throw validation_error("fixed geometry: all dimensions must be > 0");
    if (!(feed_inner_mm < feed_outer_mm))
      throw validation_error("fixed geometry: feed inner diameter must be < outer diameter");
  }
};

/// The three slot parameters that vary: length, width, rotation angle.
struct SlotGeometry {
  double s1_mm = 127.5;
  double sw1_mm = 6.0;
  double theta_deg = 0.0;

  void validate() const {
    if (!(s1_mm > 0.0)) throw validation_error("slot geometry: s1_mm must be > 0");
    if (!(sw1_mm > 0.0)) throw validation_error("slot geometry: sw1_mm must be > 0");
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
      throw validation_error("slot geometry: theta_deg must be in [0, 90]");
    // Sw1 < S1 is NOT enforced: the default parameter sweep contains rows
    // (e.g. S1 = 25 mm with Sw1 up to 60 mm) where the slot is wider than
    // long, and the surrogate is well defined there.
  }
};

/// Uniform frequency grid, inclusive of both endpoints.
struct FrequencyGrid {
  double start_ghz = 1.0;
  double stop_ghz = 8.0;
  int n_points = 1001;

  void validate() const {
    if (n_points < 2) throw validation_error("frequency grid: n_points must be >= 2");
    if (!(start_ghz < stop_ghz))
      throw validation_error("frequency grid: start must be < stop");
  }

  double step_ghz() const { return (stop_ghz - start_ghz) / (n_points - 1); }

  double point(int i) const {
    return start_ghz + i * (stop_ghz - start_ghz) / (n_points - 1);
  }

  std::vector<double> points() const {
    std::vector<double> f(static_cast<size_t>(n_points));
    for (int i = 0; i < n_points; ++i) f[static_cast<size_t>(i)] = point(i);
    return f;
  }

  bool operator==(const FrequencyGrid&) const = default;
};

/// Reflection-coefficient magnitude in dB sampled on a frequency grid.
struct Spectrum {
  FrequencyGrid grid;
  std::vector<double> s11_db;

  void validate() const {
    grid.validate();
    if (s11_db.size() != static_cast<size_t>(grid.n_points))
      throw shape_error("spectrum: sample count does not match grid");
    for (double v : s11_db)
      if (!(v >= -40.0 && v <= 0.0))
        throw validation_error("spectrum: values must be finite and in [-40, 0] dB");
  }
};

}  // namespace slotforge
