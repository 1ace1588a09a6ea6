#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "slotforge/surrogate.hpp"

namespace slotforge {

/// One angle row of the parameter sweep: inclusive arithmetic progressions in
/// S1 and Sw1 at a fixed slot angle.
struct GridRow {
  int theta_deg;
  int s1_min_mm, s1_max_mm, s1_step_mm;
  int sw1_min_mm, sw1_max_mm, sw1_step_mm;

  void validate() const {
    if (s1_min_mm > s1_max_mm || sw1_min_mm > sw1_max_mm)
      throw validation_error("grid row: min must be <= max");
    if (s1_step_mm < 1 || sw1_step_mm < 1)
      throw validation_error("grid row: steps must be >= 1");
  }
};

struct GridSpec {
  std::vector<GridRow> rows;
  bool apply_feasibility = false;
  double feasibility_margin_mm = 5.0;

  void validate() const {
    if (rows.empty()) throw validation_error("grid spec: at least one row required");
    for (size_t i = 0; i < rows.size(); ++i) {
      rows[i].validate();
      for (size_t j = i + 1; j < rows.size(); ++j)
        if (rows[i].theta_deg == rows[j].theta_deg)
          throw validation_error("grid spec: duplicate theta row");
    }
  }
};

/// The ten-angle default sweep used to build the dataset.
inline GridSpec default_grid() {
  GridSpec spec;
  spec.rows = {
      {0, 30, 130, 3, 5, 30, 2},  {10, 25, 125, 3, 5, 45, 3},
      {20, 25, 120, 3, 5, 37, 3}, {30, 25, 120, 3, 5, 35, 3},
      {40, 25, 110, 3, 5, 33, 3}, {50, 25, 110, 3, 5, 30, 3},
      {60, 25, 100, 3, 5, 33, 3}, {70, 25, 100, 3, 5, 35, 3},
      {80, 25, 100, 3, 5, 60, 3}, {90, 30, 130, 3, 5, 30, 2},
  };
  return spec;
}

/// Expand the sweep into concrete geometries. Rows are visited in spec order,
/// S1-major then Sw1 within a row, so the enumeration order is stable.
inline std::vector<SlotGeometry> enumerate_geometries(
    const GridSpec& spec, const FixedGeometry& fixed = {}) {
  spec.validate();
  std::vector<SlotGeometry> out;
  for (const GridRow& row : spec.rows) {
    for (int s1 = row.s1_min_mm; s1 <= row.s1_max_mm; s1 += row.s1_step_mm) {
      for (int sw1 = row.sw1_min_mm; sw1 <= row.sw1_max_mm; sw1 += row.sw1_step_mm) {
        SlotGeometry g{static_cast<double>(s1), static_cast<double>(sw1),
                       static_cast<double>(row.theta_deg)};
        if (spec.apply_feasibility &&
            !slot_feasible(g, fixed, spec.feasibility_margin_mm))
          continue;
        out.push_back(g);
      }
    }
  }
  return out;
}

/// n spectra (rows of `features`) paired with their generating slot
/// dimensions (columns of `targets`: S1 mm, Sw1 mm, theta deg).
struct DatasetTable {
  FrequencyGrid grid;
  Eigen::MatrixXd features;  // n x n_points, s11 in dB
  Eigen::MatrixXd targets;   // n x 3
  std::vector<std::int64_t> row_ids;

  Eigen::Index size() const { return features.rows(); }
};

/// Run the surrogate over every enumerated geometry. Row ids are assigned
/// 0..n-1 in enumeration order.
inline DatasetTable generate_dataset(const GridSpec& spec,
                                     const FrequencyGrid& grid = {},
                                     const FixedGeometry& fixed = {}) {
  const std::vector<SlotGeometry> geoms = enumerate_geometries(spec, fixed);
  if (geoms.empty()) throw validation_error("dataset: enumeration produced no geometries");
  grid.validate();

  DatasetTable table;
  table.grid = grid;
  const Eigen::Index n = static_cast<Eigen::Index>(geoms.size());
  table.features.resize(n, grid.n_points);
  table.targets.resize(n, 3);
  table.row_ids.resize(geoms.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const SlotGeometry& g = geoms[static_cast<size_t>(i)];
    const Spectrum s = forward_spectrum(g, fixed, grid);
    for (int j = 0; j < grid.n_points; ++j)
      table.features(i, j) = s.s11_db[static_cast<size_t>(j)];
    table.targets(i, 0) = g.s1_mm;
    table.targets(i, 1) = g.sw1_mm;
    table.targets(i, 2) = g.theta_deg;
    table.row_ids[static_cast<size_t>(i)] = i;
  }
  return table;
}

/// splitmix64: tiny, well-mixed 64-bit generator, pinned here so splits agree
/// across implementations and platforms.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// Fisher-Yates permutation of 0..n-1 driven by splitmix64.
inline std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  SplitMix64 rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        rng.next() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

inline DatasetTable take_rows(const DatasetTable& table,
                              const std::vector<Eigen::Index>& rows) {
  DatasetTable out;
  out.grid = table.grid;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), table.features.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()), table.targets.cols());
  out.row_ids.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = table.features.row(rows[i]);
    out.targets.row(static_cast<Eigen::Index>(i)) = table.targets.row(rows[i]);
    out.row_ids.push_back(table.row_ids[static_cast<size_t>(rows[i])]);
  }
  return out;
}

/// Deterministic train/test split: the last ceil(n * test_fraction) entries of
/// the seeded permutation form the test set.
inline std::pair<DatasetTable, DatasetTable> train_test_split(
    const DatasetTable& table, double test_fraction, std::uint64_t seed) {
  const Eigen::Index n = table.size();
  if (n < 2) throw validation_error("split: need at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw validation_error("split: test_fraction must be in (0, 1)");

  const std::vector<Eigen::Index> perm = shuffled_indices(n, seed);
  const auto n_test = static_cast<Eigen::Index>(
      std::ceil(static_cast<double>(n) * test_fraction));
  std::vector<Eigen::Index> train(perm.begin(), perm.end() - n_test);
  std::vector<Eigen::Index> test(perm.end() - n_test, perm.end());
  return {take_rows(table, train), take_rows(table, test)};
}

}  // namespace slotforge
