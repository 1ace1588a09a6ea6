#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "slotforge/datagen.hpp"

using namespace slotforge;

TEST_CASE("default grid matches the ten-angle sweep") {
  const GridSpec spec = default_grid();
  REQUIRE(spec.rows.size() == 10);
  const GridRow& r10 = spec.rows[1];
  CHECK(r10.theta_deg == 10);
  CHECK(r10.s1_min_mm == 25);
  CHECK(r10.s1_max_mm == 125);
  CHECK(r10.s1_step_mm == 3);
  CHECK(r10.sw1_min_mm == 5);
  CHECK(r10.sw1_max_mm == 45);
  CHECK(r10.sw1_step_mm == 3);
  const GridRow& r50 = spec.rows[5];
  CHECK(r50.theta_deg == 50);
  CHECK(r50.s1_min_mm == 25);
  CHECK(r50.s1_max_mm == 110);
  CHECK(r50.s1_step_mm == 3);
  CHECK(r50.sw1_min_mm == 5);
  CHECK(r50.sw1_max_mm == 30);
  CHECK(r50.sw1_step_mm == 3);
}

TEST_CASE("per-row enumeration counts under inclusive progressions") {
  GridSpec one_row;
  one_row.rows = {{10, 25, 125, 3, 5, 45, 3}};
  CHECK(enumerate_geometries(one_row).size() == 476);  // 34 * 14

  one_row.rows = {{0, 30, 130, 3, 5, 30, 2}};
  CHECK(enumerate_geometries(one_row).size() == 442);  // 34 * 13

  one_row.rows = {{45, 50, 50, 3, 7, 7, 2}};
  const auto single = enumerate_geometries(one_row);
  REQUIRE(single.size() == 1);
  CHECK(single[0].s1_mm == 50.0);
  CHECK(single[0].sw1_mm == 7.0);
  CHECK(single[0].theta_deg == 45.0);
}

TEST_CASE("full sweep yields 3655 geometries, ordered S1-major within rows") {
  const auto geoms = enumerate_geometries(default_grid());
  CHECK(geoms.size() == 3655);
  // first row block: theta 0, S1 30, Sw1 5,7,...
  CHECK(geoms[0].s1_mm == 30.0);
  CHECK(geoms[0].sw1_mm == 5.0);
  CHECK(geoms[1].sw1_mm == 7.0);
  CHECK(geoms[13].s1_mm == 33.0);  // 13 Sw1 values per S1 at theta 0
}

TEST_CASE("feasibility filter removes slots that do not fit") {
  GridSpec spec;
  spec.rows = {{90, 30, 130, 3, 5, 30, 2}};
  const size_t unfiltered = enumerate_geometries(spec).size();
  spec.apply_feasibility = true;
  const auto filtered = enumerate_geometries(spec);
  CHECK(filtered.size() < unfiltered);
  for (const SlotGeometry& g : filtered) CHECK(slot_feasible(g, FixedGeometry{}, 5.0));
}

TEST_CASE("dataset rows pair spectra with their generating dimensions") {
  GridSpec spec;
  spec.rows = {{30, 60, 66, 3, 5, 9, 2}};  // 3 * 3 = 9 geometries
  const FrequencyGrid grid{1.0, 8.0, 101};
  const DatasetTable table = generate_dataset(spec, grid);
  REQUIRE(table.size() == 9);
  CHECK(table.features.cols() == 101);
  CHECK(table.targets(0, 0) == 60.0);
  CHECK(table.targets(0, 1) == 5.0);
  CHECK(table.targets(0, 2) == 30.0);
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    CHECK(table.row_ids[static_cast<size_t>(i)] == i);
    const Spectrum direct = forward_spectrum(
        {table.targets(i, 0), table.targets(i, 1), table.targets(i, 2)}, {}, grid);
    for (int j = 0; j < grid.n_points; ++j)
      CHECK(table.features(i, j) == direct.s11_db[static_cast<size_t>(j)]);
  }
}

TEST_CASE("dataset feature values respect the clamp range") {
  GridSpec spec;
  spec.rows = {{0, 30, 60, 6, 5, 15, 4}};
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 201});
  CHECK(table.features.minCoeff() >= -40.0);
  CHECK(table.features.maxCoeff() <= 0.0);
}

TEST_CASE("splitmix64-driven split is pinned") {
  GridSpec spec;
  spec.rows = {{30, 60, 72, 3, 5, 5, 1}};  // 5 geometries
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 11});
  REQUIRE(table.size() == 5);
  auto [train_set, test_set] = train_test_split(table, 0.2, 42);
  REQUIRE(test_set.size() == 1);
  // Fisher-Yates over splitmix64(42) permutes [0..4] to [1,2,0,4,3].
  CHECK(test_set.row_ids[0] == 3);
  std::vector<std::int64_t> expected_train{1, 2, 0, 4};
  CHECK(train_set.row_ids == expected_train);
}

TEST_CASE("split sizes, partition and determinism") {
  GridSpec spec;
  spec.rows = {{10, 25, 52, 3, 5, 5, 1}};  // 10 geometries
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 11});
  REQUIRE(table.size() == 10);
  auto [tr1, te1] = train_test_split(table, 0.2, 42);
  CHECK(tr1.size() == 8);
  CHECK(te1.size() == 2);

  auto [tr2, te2] = train_test_split(table, 0.2, 42);
  CHECK(tr1.row_ids == tr2.row_ids);
  CHECK(te1.row_ids == te2.row_ids);

  std::set<std::int64_t> all(tr1.row_ids.begin(), tr1.row_ids.end());
  all.insert(te1.row_ids.begin(), te1.row_ids.end());
  CHECK(all.size() == 10);
}

TEST_CASE("split edge cases") {
  GridSpec spec;
  spec.rows = {{10, 25, 25, 3, 5, 5, 1}};
  const DatasetTable one = generate_dataset(spec, {1.0, 8.0, 11});
  CHECK_THROWS_AS(train_test_split(one, 0.2, 42), validation_error);
}

TEST_CASE("grid validation") {
  GridSpec empty;
  CHECK_THROWS_AS(enumerate_geometries(empty), validation_error);
  GridSpec dup;
  dup.rows = {{10, 25, 125, 3, 5, 45, 3}, {10, 30, 130, 3, 5, 30, 2}};
  CHECK_THROWS_AS(enumerate_geometries(dup), validation_error);
  GridSpec bad_step;
  bad_step.rows = {{10, 25, 125, 0, 5, 45, 3}};
  CHECK_THROWS_AS(enumerate_geometries(bad_step), validation_error);
}
