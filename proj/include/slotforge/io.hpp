#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "slotforge/inverse.hpp"
#include "slotforge/pipeline.hpp"

// File formats: spectrum CSV / Touchstone .s1p, dataset CSV + JSON sidecar,
// versioned model JSON, evaluation reports, resonance-target CSV.

namespace slotforge::io {

using nlohmann::json;

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

// ---------------------------------------------------------------- spectrum

inline void write_spectrum_csv(const Spectrum& spec, const std::string& path) {
  auto out = open_out(path);
  out << "freq_ghz,s11_db\n";
  for (int i = 0; i < spec.grid.n_points; ++i)
    out << fmt("%.9g", spec.grid.point(i)) << ','
        << fmt("%.9g", spec.s11_db[static_cast<size_t>(i)]) << '\n';
}

/// Touchstone v1, magnitude-only: phase column fixed at 0.
inline void write_touchstone_s1p(const Spectrum& spec, const std::string& path) {
  auto out = open_out(path);
  out << "! slotforge magnitude-only spectrum\n";
  out << "# GHz S DB R 50\n";
  for (int i = 0; i < spec.grid.n_points; ++i)
    out << fmt("%.9g", spec.grid.point(i)) << ' '
        << fmt("%.9g", spec.s11_db[static_cast<size_t>(i)]) << " 0.0\n";
}

inline FrequencyGrid grid_from_points(const std::vector<double>& freqs,
                                      const std::string& path) {
  if (freqs.size() < 2) throw schema_error("spectrum file has fewer than 2 points: " + path);
  FrequencyGrid grid{freqs.front(), freqs.back(), static_cast<int>(freqs.size())};
  grid.validate();
  const double step = grid.step_ghz();
  for (size_t i = 0; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - grid.point(static_cast<int>(i))) > 1e-6 * step + 1e-12)
      throw schema_error("spectrum frequency grid is not uniform: " + path);
  return grid;
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("freq_ghz,s11_db", 0) != 0)
    throw schema_error("bad spectrum CSV header in " + path);
  std::vector<double> freqs, vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double f, v;
    if (std::sscanf(line.c_str(), "%lf,%lf", &f, &v) != 2)
      throw schema_error("bad spectrum CSV row in " + path + ": " + line);
    freqs.push_back(f);
    vals.push_back(v);
  }
  Spectrum spec{grid_from_points(freqs, path), std::move(vals)};
  spec.validate();
  return spec;
}

inline Spectrum read_touchstone_s1p(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  bool saw_option = false;
  std::vector<double> freqs, vals;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '!') continue;
    if (line[0] == '#') {
      std::istringstream opt(line.substr(1));
      std::string unit, param, format;
      opt >> unit >> param >> format;
      if (unit != "GHz" || param != "S" || format != "DB")
        throw schema_error("unsupported Touchstone option line in " + path + ": " + line);
      saw_option = true;
      continue;
    }
    double f, v, phase;
    if (std::sscanf(line.c_str(), "%lf %lf %lf", &f, &v, &phase) != 3)
      throw schema_error("bad Touchstone data row in " + path + ": " + line);
    freqs.push_back(f);
    vals.push_back(v);
  }
  if (!saw_option) throw schema_error("missing Touchstone option line in " + path);
  Spectrum spec{grid_from_points(freqs, path), std::move(vals)};
  spec.validate();
  return spec;
}

/// Dispatch on extension: .s1p is Touchstone, anything else is CSV.
inline Spectrum read_spectrum(const std::string& path) {
  if (std::filesystem::path(path).extension() == ".s1p")
    return read_touchstone_s1p(path);
  return read_spectrum_csv(path);
}

// ----------------------------------------------------------------- dataset

inline std::string feature_column_name(int i, int n_points) {
  const int width = n_points >= 10000 ? 5 : 4;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "f_%0*d", width, i + 1);
  return buf;
}

inline void write_dataset_csv(const DatasetTable& table, const std::string& path) {
  auto out = open_out(path);
  out << "row_id,s1_mm,sw1_mm,theta_deg";
  for (int j = 0; j < table.grid.n_points; ++j)
    out << ',' << feature_column_name(j, table.grid.n_points);
  out << '\n';
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    out << table.row_ids[static_cast<size_t>(i)] << ','
        << fmt("%g", table.targets(i, 0)) << ',' << fmt("%g", table.targets(i, 1))
        << ',' << fmt("%g", table.targets(i, 2));
    for (Eigen::Index j = 0; j < table.features.cols(); ++j)
      out << ',' << fmt("%.6f", table.features(i, j));
    out << '\n';
  }
}

inline json grid_to_json(const FrequencyGrid& grid) {
  return {{"start_ghz", grid.start_ghz}, {"stop_ghz", grid.stop_ghz},
          {"n_points", grid.n_points}};
}

inline FrequencyGrid grid_from_json(const json& j) {
  FrequencyGrid g{j.at("start_ghz").get<double>(), j.at("stop_ghz").get<double>(),
                  j.at("n_points").get<int>()};
  g.validate();
  return g;
}

inline void write_dataset_sidecar(const DatasetTable& table, const GridSpec& spec,
                                  const std::string& path) {
  json rows = json::array();
  for (const GridRow& r : spec.rows)
    rows.push_back({{"theta_deg", r.theta_deg},
                    {"s1", {r.s1_min_mm, r.s1_max_mm, r.s1_step_mm}},
                    {"sw1", {r.sw1_min_mm, r.sw1_max_mm, r.sw1_step_mm}}});
  json j{{"generator_version", kModelFormatVersion},
         {"n_samples", table.size()},
         {"grid", grid_to_json(table.grid)},
         {"spec_rows", rows},
         {"apply_feasibility", spec.apply_feasibility},
         {"feasibility_margin_mm", spec.feasibility_margin_mm}};
  open_out(path) << j.dump(2) << '\n';
}

inline DatasetTable read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header)) throw schema_error("empty dataset file: " + path);
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 5 || cols[0] != "row_id" || cols[1] != "s1_mm" ||
      cols[2] != "sw1_mm" || cols[3] != "theta_deg")
    throw schema_error("bad dataset CSV header in " + path);
  const int n_points = static_cast<int>(cols.size()) - 4;
  for (int j = 0; j < n_points; ++j)
    if (cols[static_cast<size_t>(j) + 4] != feature_column_name(j, n_points))
      throw schema_error("bad feature column name in " + path + ": " +
                         cols[static_cast<size_t>(j) + 4]);

  std::vector<std::int64_t> row_ids;
  std::vector<double> values;  // row-major, 3 targets + features per row
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    if (!std::getline(ls, cell, ',')) throw schema_error("bad dataset row in " + path);
    row_ids.push_back(std::stoll(cell));
    int got = 0;
    while (std::getline(ls, cell, ',')) {
      values.push_back(std::stod(cell));
      ++got;
    }
    if (got != n_points + 3)
      throw schema_error("dataset row has wrong cell count in " + path);
  }
  const auto n = static_cast<Eigen::Index>(row_ids.size());
  DatasetTable table;
  table.row_ids = std::move(row_ids);
  table.features.resize(n, n_points);
  table.targets.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const size_t base = static_cast<size_t>(i) * (static_cast<size_t>(n_points) + 3);
    for (int t = 0; t < 3; ++t) table.targets(i, t) = values[base + static_cast<size_t>(t)];
    for (int j = 0; j < n_points; ++j)
      table.features(i, j) = values[base + 3 + static_cast<size_t>(j)];
  }
  return table;  // grid must come from the sidecar (or caller default)
}

inline DatasetTable read_dataset(const std::string& csv_path,
                                 const std::string& sidecar_path) {
  DatasetTable table = read_dataset_csv(csv_path);
  const json j = json::parse(open_in(sidecar_path));
  table.grid = grid_from_json(j.at("grid"));
  if (table.grid.n_points != table.features.cols())
    throw schema_error("dataset sidecar grid disagrees with CSV width: " + sidecar_path);
  return table;
}

// ------------------------------------------------------------------- model

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw schema_error("ragged matrix in model file");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<size_t>(j)].get<double>();
  }
  return m;
}

inline void save_pipeline(const TrainedPipeline& pipe, const std::string& path) {
  json clamps = json::array();
  for (const TargetClamp& c : pipe.target_clamps) clamps.push_back({c.lo, c.hi});
  json j{
      {"format_version", pipe.format_version},
      {"grid", grid_to_json(pipe.grid)},
      {"target_names", pipe.target_names},
      {"target_clamps", clamps},
      {"preprocessor",
       {{"iqr",
         {{"multiplier", pipe.preprocessor.iqr.multiplier},
          {"max_outlier_feature_fraction", pipe.preprocessor.iqr.max_outlier_feature_fraction},
          {"lower", vector_to_json(pipe.preprocessor.iqr.lower)},
          {"upper", vector_to_json(pipe.preprocessor.iqr.upper)}}},
        {"std1",
         {{"means", vector_to_json(pipe.preprocessor.std1.means)},
          {"stds", vector_to_json(pipe.preprocessor.std1.stds)}}},
        {"pca",
         {{"mean", vector_to_json(pipe.preprocessor.pca.mean)},
          {"components", matrix_to_json(pipe.preprocessor.pca.components)},
          {"explained_variances", vector_to_json(pipe.preprocessor.pca.explained_variances)}}},
        {"poly", {{"degree", 2}, {"include_bias", true},
                  {"input_dim", pipe.preprocessor.poly.input_dim}}},
        {"std2",
         {{"means", vector_to_json(pipe.preprocessor.std2.means)},
          {"stds", vector_to_json(pipe.preprocessor.std2.stds)}}}}},
      {"lasso",
       {{"weights", matrix_to_json(pipe.model.weights)},
        {"intercepts", vector_to_json(pipe.model.intercepts)},
        {"sweeps_used", pipe.model.sweeps_used},
        {"converged", pipe.model.converged}}}};
  open_out(path) << j.dump() << '\n';
}

inline TrainedPipeline load_pipeline(const std::string& path) {
  const json j = json::parse(open_in(path));
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw schema_error("unsupported model format_version in " + path);
  TrainedPipeline pipe;
  pipe.format_version = j.at("format_version").get<int>();
  pipe.grid = grid_from_json(j.at("grid"));
  for (size_t t = 0; t < 3; ++t) {
    pipe.target_names[t] = j.at("target_names")[t].get<std::string>();
    pipe.target_clamps[t] = {j.at("target_clamps")[t][0].get<double>(),
                             j.at("target_clamps")[t][1].get<double>()};
  }
  const json& pp = j.at("preprocessor");
  pipe.preprocessor.iqr.multiplier = pp.at("iqr").at("multiplier").get<double>();
  pipe.preprocessor.iqr.max_outlier_feature_fraction =
      pp.at("iqr").at("max_outlier_feature_fraction").get<double>();
  pipe.preprocessor.iqr.lower = vector_from_json(pp.at("iqr").at("lower"));
  pipe.preprocessor.iqr.upper = vector_from_json(pp.at("iqr").at("upper"));
  pipe.preprocessor.std1.means = vector_from_json(pp.at("std1").at("means"));
  pipe.preprocessor.std1.stds = vector_from_json(pp.at("std1").at("stds"));
  pipe.preprocessor.pca.mean = vector_from_json(pp.at("pca").at("mean"));
  pipe.preprocessor.pca.components = matrix_from_json(pp.at("pca").at("components"));
  pipe.preprocessor.pca.explained_variances =
      vector_from_json(pp.at("pca").at("explained_variances"));
  pipe.preprocessor.poly.input_dim = pp.at("poly").at("input_dim").get<Eigen::Index>();
  pipe.preprocessor.std2.means = vector_from_json(pp.at("std2").at("means"));
  pipe.preprocessor.std2.stds = vector_from_json(pp.at("std2").at("stds"));
  pipe.model.weights = matrix_from_json(j.at("lasso").at("weights"));
  pipe.model.intercepts = vector_from_json(j.at("lasso").at("intercepts"));
  pipe.model.sweeps_used = j.at("lasso").at("sweeps_used").get<std::vector<int>>();
  pipe.model.converged = j.at("lasso").at("converged").get<std::vector<bool>>();
  return pipe;
}

// ----------------------------------------------------------------- reports

inline void write_eval_report_csv(const EvalReport& rep, const std::string& path) {
  auto out = open_out(path);
  out << "row_id,s1_true,sw1_true,theta_true,s1_pred,sw1_pred,theta_pred,"
         "s1_pct,sw1_pct,theta_pct\n";
  for (const EvalRow& r : rep.rows) {
    out << r.row_id;
    for (size_t t = 0; t < 3; ++t) out << ',' << fmt("%g", r.truth[t]);
    for (size_t t = 0; t < 3; ++t) out << ',' << fmt("%.9g", r.predicted_raw[t]);
    for (size_t t = 0; t < 3; ++t)
      out << ',' << (std::isnan(r.pct_error[t]) ? std::string("nan")
                                                : fmt("%.9g", r.pct_error[t]));
    out << '\n';
  }
}

inline void write_eval_summary_json(const EvalReport& rep, const std::string& path) {
  json j{{"n_samples", rep.n_samples},
         {"r2_per_target", rep.r2_per_target},
         {"r2_uniform_mean", rep.r2_uniform_mean},
         {"mse_per_target", rep.mse_per_target},
         {"mse_overall", rep.mse_overall}};
  open_out(path) << j.dump(2) << '\n';
}

// ------------------------------------------------------------------ targets

/// CSV `center_ghz,upper_ghz,lower_ghz`; '#' starts a comment. Rows are NOT
/// validated here; callers validate against a grid and report offenders.
inline std::vector<ResonanceTarget> read_targets_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<ResonanceTarget> targets;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_skipped && line.rfind("center_ghz", 0) == 0) {
      header_skipped = true;
      continue;
    }
    double c, u, l;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &c, &u, &l) != 3)
      throw schema_error("bad target row in " + path + ": " + line);
    targets.push_back({c, u, l});
  }
  return targets;
}

inline void write_roundtrip_report_json(const RoundtripReport& rep,
                                        const std::string& path) {
  json outcomes = json::array();
  for (const TargetOutcome& o : rep.outcomes)
    outcomes.push_back({{"target",
                         {{"center_ghz", o.target.center_ghz},
                          {"upper_ghz", o.target.upper_ghz},
                          {"lower_ghz", o.target.lower_ghz},
                          {"bandwidth_ghz", o.target.bandwidth_ghz()}}},
                        {"matched", o.matched},
                        {"achieved_center_ghz", o.achieved_center_ghz},
                        {"achieved_bw10_ghz", o.achieved_bw10_ghz},
                        {"center_delta_ghz", o.center_delta_ghz},
                        {"bandwidth_delta_ghz", o.bandwidth_delta_ghz}});
  json resonances = json::array();
  for (const Resonance& r : rep.achieved_resonances)
    resonances.push_back({{"center_ghz", r.center_ghz},
                          {"depth_db", r.depth_db},
                          {"bw10_ghz", r.bw10_ghz}});
  json j{{"predicted_raw", rep.prediction.raw},
         {"predicted_rounded", rep.prediction.rounded},
         {"achieved_resonances", resonances},
         {"outcomes", outcomes}};
  open_out(path) << j.dump(2) << '\n';
}

}  // namespace slotforge::io
