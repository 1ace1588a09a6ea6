#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slotforge/io.hpp"

using namespace slotforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("slotforge_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  ss << std::ifstream(path).rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("spectrum CSV round trip") {
  TempDir dir;
  const Spectrum spec = forward_spectrum({100.0, 8.0, 20.0}, {}, {1.0, 8.0, 101});
  io::write_spectrum_csv(spec, dir.file("s.csv"));
  const Spectrum back = io::read_spectrum(dir.file("s.csv"));
  REQUIRE(back.grid == spec.grid);
  for (size_t i = 0; i < spec.s11_db.size(); ++i)
    CHECK(back.s11_db[i] == Catch::Approx(spec.s11_db[i]).margin(1e-7));
}

TEST_CASE("touchstone export and read-back") {
  TempDir dir;
  const Spectrum spec = forward_spectrum({80.0, 10.0, 50.0}, {}, {1.0, 8.0, 51});
  io::write_touchstone_s1p(spec, dir.file("s.s1p"));

  const std::string text = slurp(dir.file("s.s1p"));
  CHECK(text.find("# GHz S DB R 50") != std::string::npos);

  const Spectrum back = io::read_spectrum(dir.file("s.s1p"));
  REQUIRE(back.grid == spec.grid);
  for (size_t i = 0; i < spec.s11_db.size(); ++i)
    CHECK(back.s11_db[i] == Catch::Approx(spec.s11_db[i]).margin(1e-7));
}

TEST_CASE("malformed spectrum files raise schema errors") {
  TempDir dir;
  std::ofstream(dir.file("bad.csv")) << "frequency,s11\n1,-3\n";
  CHECK_THROWS_AS(io::read_spectrum(dir.file("bad.csv")), schema_error);
  std::ofstream(dir.file("bad.s1p")) << "# MHz S MA R 50\n1 0.5 0\n";
  CHECK_THROWS_AS(io::read_spectrum(dir.file("bad.s1p")), schema_error);
  CHECK_THROWS_AS(io::read_spectrum(dir.file("missing.csv")), io_error);
  // non-uniform grid
  std::ofstream(dir.file("warp.csv")) << "freq_ghz,s11_db\n1,-1\n2,-1\n2.5,-1\n";
  CHECK_THROWS_AS(io::read_spectrum(dir.file("warp.csv")), schema_error);
}

TEST_CASE("dataset CSV + sidecar round trip at stored precision") {
  TempDir dir;
  GridSpec spec;
  spec.rows = {{30, 60, 72, 6, 5, 9, 4}};
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 41});
  io::write_dataset_csv(table, dir.file("d.csv"));
  io::write_dataset_sidecar(table, spec, dir.file("d.json"));

  const DatasetTable back = io::read_dataset(dir.file("d.csv"), dir.file("d.json"));
  REQUIRE(back.size() == table.size());
  REQUIRE(back.grid == table.grid);
  CHECK(back.row_ids == table.row_ids);
  CHECK((back.targets - table.targets).cwiseAbs().maxCoeff() == 0.0);
  // features stored at 6 decimal places
  CHECK((back.features - table.features).cwiseAbs().maxCoeff() <= 5e-7);

  // a second write of the read-back table is byte-identical to the first file
  io::write_dataset_csv(back, dir.file("d2.csv"));
  CHECK(slurp(dir.file("d2.csv")) == slurp(dir.file("d.csv")));
}

TEST_CASE("dataset schema violations are detected") {
  TempDir dir;
  std::ofstream(dir.file("bad.csv")) << "row_id,s1,sw1,theta,f_0001\n0,1,2,3,-1\n";
  CHECK_THROWS_AS(io::read_dataset_csv(dir.file("bad.csv")), schema_error);
  std::ofstream(dir.file("short.csv"))
      << "row_id,s1_mm,sw1_mm,theta_deg,f_0001,f_0002\n0,1,2,3,-1\n";
  CHECK_THROWS_AS(io::read_dataset_csv(dir.file("short.csv")), schema_error);
}

TEST_CASE("model save/load reproduces predictions bit-identically") {
  TempDir dir;
  GridSpec spec;
  spec.rows = {{0, 30, 120, 10, 5, 25, 5}, {60, 30, 100, 10, 5, 25, 5}};
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 151});
  auto [train_set, test_set] = train_test_split(table, 0.2, 42);
  const TrainedPipeline pipe = train(train_set, LassoConfig{}, 10);

  io::save_pipeline(pipe, dir.file("m.slotforge.json"));
  const TrainedPipeline loaded = io::load_pipeline(dir.file("m.slotforge.json"));

  CHECK(loaded.grid == pipe.grid);
  for (Eigen::Index i = 0; i < test_set.size(); ++i) {
    Spectrum s;
    s.grid = table.grid;
    s.s11_db.resize(static_cast<size_t>(s.grid.n_points));
    for (int j = 0; j < s.grid.n_points; ++j)
      s.s11_db[static_cast<size_t>(j)] = test_set.features(i, j);
    const DimPrediction a = predict_dims(pipe, s);
    const DimPrediction b = predict_dims(loaded, s);
    CHECK(a.raw == b.raw);
  }

  // saving the loaded model again gives identical bytes
  io::save_pipeline(loaded, dir.file("m2.slotforge.json"));
  CHECK(slurp(dir.file("m2.slotforge.json")) == slurp(dir.file("m.slotforge.json")));
}

TEST_CASE("format_version mismatch is an error, not a migration") {
  TempDir dir;
  GridSpec spec;
  spec.rows = {{0, 30, 120, 10, 5, 25, 5}};
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 51});
  auto [train_set, test_set] = train_test_split(table, 0.2, 42);
  TrainedPipeline pipe = train(train_set, LassoConfig{}, 6);
  pipe.format_version = 999;
  io::save_pipeline(pipe, dir.file("m.json"));
  CHECK_THROWS_AS(io::load_pipeline(dir.file("m.json")), schema_error);
}

TEST_CASE("targets CSV parsing with comments") {
  TempDir dir;
  std::ofstream(dir.file("t.csv")) << "center_ghz,upper_ghz,lower_ghz\n"
                                      "# single S-band notch\n"
                                      "2.493,2.501,2.485\n"
                                      "3.757,3.789,3.726  # trailing comment\n";
  const auto targets = io::read_targets_csv(dir.file("t.csv"));
  REQUIRE(targets.size() == 2);
  CHECK(targets[0].center_ghz == 2.493);
  CHECK(targets[1].upper_ghz == 3.789);

  std::ofstream(dir.file("bad.csv")) << "2.5;2.6;2.4\n";
  CHECK_THROWS_AS(io::read_targets_csv(dir.file("bad.csv")), schema_error);
}

TEST_CASE("eval report files") {
  TempDir dir;
  GridSpec spec;
  // two theta rows so no evaluation target is constant (R2 needs variance)
  spec.rows = {{0, 30, 120, 10, 5, 25, 5}, {40, 30, 120, 10, 5, 25, 5}};
  const DatasetTable table = generate_dataset(spec, {1.0, 8.0, 51});
  auto [train_set, test_set] = train_test_split(table, 0.2, 42);
  const TrainedPipeline pipe = train(train_set, LassoConfig{}, 6);
  const EvalReport rep = evaluate(pipe, test_set);
  io::write_eval_report_csv(rep, dir.file("r.csv"));
  io::write_eval_summary_json(rep, dir.file("r.json"));

  const std::string head = slurp(dir.file("r.csv")).substr(0, 70);
  CHECK(head.rfind("row_id,s1_true,sw1_true,theta_true,s1_pred,sw1_pred,theta_pred", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(dir.file("r.json")));
  CHECK(j.at("n_samples").get<int>() == test_set.size());
  CHECK(j.at("r2_per_target").size() == 3);
}
