// slotforge: generate surrogate reflection-coefficient datasets, train the
// preprocessing + Lasso pipeline, and run inverse-design round trips.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "slotforge/io.hpp"
#include "slotforge/svg.hpp"

namespace fs = std::filesystem;
using namespace slotforge;

namespace {

// Exit codes: 0 success, 2 IO, 3 schema, 4 shape/grid, 5 validation.
constexpr int kExitIo = 2;
constexpr int kExitSchema = 3;
constexpr int kExitShape = 4;
constexpr int kExitValidation = 5;

struct RunConfig {
  FrequencyGrid grid;
  std::vector<std::string> row_specs;  // theta:s1min:s1max:s1step:sw1min:sw1max:sw1step
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  int pca_d = 150;
  double alpha = 0.01;
  double tol = 1e-6;
  int max_iter = 10000;
  std::string out_dir = ".";
  bool feasibility = false;
  double margin_mm = 5.0;
};

GridRow parse_row_spec(const std::string& s) {
  GridRow r{};
  if (std::sscanf(s.c_str(), "%d:%d:%d:%d:%d:%d:%d", &r.theta_deg, &r.s1_min_mm,
                  &r.s1_max_mm, &r.s1_step_mm, &r.sw1_min_mm, &r.sw1_max_mm,
                  &r.sw1_step_mm) != 7)
    throw validation_error("bad --rows value (want theta:s1min:s1max:s1step:sw1min:sw1max:sw1step): " + s);
  r.validate();
  return r;
}

GridSpec grid_spec_from(const RunConfig& cfg) {
  GridSpec spec = default_grid();
  if (!cfg.row_specs.empty()) {
    spec.rows.clear();
    for (const std::string& s : cfg.row_specs) spec.rows.push_back(parse_row_spec(s));
  }
  spec.apply_feasibility = cfg.feasibility;
  spec.feasibility_margin_mm = cfg.margin_mm;
  return spec;
}

/// Fill config fields from a JSON document wherever the matching CLI flag was
/// not given on the command line.
void merge_config_file(const CLI::App& cmd, const std::string& path, RunConfig& cfg) {
  const nlohmann::json j = nlohmann::json::parse(io::open_in(path));
  auto absent = [&](const std::string& flag) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  if (j.contains("grid") && absent("--start-ghz")) cfg.grid.start_ghz = j["grid"].value("start_ghz", cfg.grid.start_ghz);
  if (j.contains("grid") && absent("--stop-ghz")) cfg.grid.stop_ghz = j["grid"].value("stop_ghz", cfg.grid.stop_ghz);
  if (j.contains("grid") && absent("--n-points")) cfg.grid.n_points = j["grid"].value("n_points", cfg.grid.n_points);
  if (j.contains("seed") && absent("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("test_fraction") && absent("--test-fraction")) cfg.test_fraction = j["test_fraction"].get<double>();
  if (j.contains("pca_d") && absent("--pca-d")) cfg.pca_d = j["pca_d"].get<int>();
  if (j.contains("alpha") && absent("--alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("tol") && absent("--tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("max_iter") && absent("--max-iter")) cfg.max_iter = j["max_iter"].get<int>();
  if (j.contains("out_dir") && absent("--out")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("feasibility") && absent("--feasibility")) cfg.feasibility = j["feasibility"].get<bool>();
  if (j.contains("margin_mm") && absent("--margin")) cfg.margin_mm = j["margin_mm"].get<double>();
  if (j.contains("rows") && absent("--rows")) {
    cfg.row_specs.clear();
    for (const auto& r : j["rows"]) cfg.row_specs.push_back(r.get<std::string>());
  }
}

void apply_env_seed(const CLI::App& cmd, RunConfig& cfg) {
  const CLI::Option* opt = cmd.get_option_no_throw("--seed");
  if (opt != nullptr && opt->count() > 0) return;  // flag wins over env
  if (const char* env = std::getenv("SLOTFORGE_SEED"))
    cfg.seed = std::stoull(env);
}

void add_common_flags(CLI::App& cmd, RunConfig& cfg, std::string& config_path) {
  cmd.add_option("--config", config_path, "JSON config file; flags override its fields");
  cmd.add_option("--start-ghz", cfg.grid.start_ghz, "grid start (GHz)")->capture_default_str();
  cmd.add_option("--stop-ghz", cfg.grid.stop_ghz, "grid stop (GHz)")->capture_default_str();
  cmd.add_option("--n-points", cfg.grid.n_points, "grid point count")->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "split RNG seed (env SLOTFORGE_SEED overrides config)")->capture_default_str();
  cmd.add_option("--test-fraction", cfg.test_fraction, "held-out fraction")->capture_default_str();
  cmd.add_option("--pca-d", cfg.pca_d, "PCA component count")->capture_default_str();
  cmd.add_option("--alpha", cfg.alpha, "Lasso L1 penalty")->capture_default_str();
  cmd.add_option("--tol", cfg.tol, "Lasso convergence tolerance")->capture_default_str();
  cmd.add_option("--max-iter", cfg.max_iter, "Lasso max sweeps")->capture_default_str();
  cmd.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  cmd.add_option("--rows", cfg.row_specs,
                 "sweep row theta:s1min:s1max:s1step:sw1min:sw1max:sw1step (repeatable; "
                 "default is the full ten-angle sweep)");
  cmd.add_flag("--feasibility", cfg.feasibility, "drop slots that do not fit the face");
  cmd.add_option("--margin", cfg.margin_mm, "feasibility margin (mm)")->capture_default_str();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io_error("cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

int cmd_generate(const RunConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  const GridSpec spec = grid_spec_from(cfg);
  const DatasetTable table = generate_dataset(spec, cfg.grid);
  io::write_dataset_csv(table, join(cfg.out_dir, "dataset.csv"));
  io::write_dataset_sidecar(table, spec, join(cfg.out_dir, "dataset.json"));
  std::cout << "generated " << table.size() << " samples -> "
            << join(cfg.out_dir, "dataset.csv") << '\n';
  return 0;
}

std::string sidecar_for(const std::string& dataset_csv) {
  return fs::path(dataset_csv).replace_extension(".json").string();
}

int cmd_train(const RunConfig& cfg, const std::string& dataset_path) {
  ensure_out_dir(cfg.out_dir);
  const DatasetTable table = io::read_dataset(dataset_path, sidecar_for(dataset_path));
  auto [train_set, test_set] = train_test_split(table, cfg.test_fraction, cfg.seed);

  LassoConfig lcfg{cfg.alpha, cfg.tol, cfg.max_iter, true};
  const Eigen::Index pca_d =
      std::min<Eigen::Index>(cfg.pca_d, train_set.size() - 1);
  const TrainedPipeline pipe = train(train_set, lcfg, pca_d);
  io::save_pipeline(pipe, join(cfg.out_dir, "model.slotforge.json"));

  const EvalReport train_rep = evaluate(pipe, train_set);
  const EvalReport test_rep = evaluate(pipe, test_set);
  io::write_eval_report_csv(train_rep, join(cfg.out_dir, "train_report.csv"));
  io::write_eval_summary_json(train_rep, join(cfg.out_dir, "train_report.json"));
  io::write_eval_report_csv(test_rep, join(cfg.out_dir, "test_report.csv"));
  io::write_eval_summary_json(test_rep, join(cfg.out_dir, "test_report.json"));

  std::cout << "train R2 " << train_rep.r2_uniform_mean << "  train MSE "
            << train_rep.mse_overall << "  test R2 " << test_rep.r2_uniform_mean
            << "  test MSE " << test_rep.mse_overall << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& model_path,
                 const std::string& dataset_path) {
  ensure_out_dir(cfg.out_dir);
  const TrainedPipeline pipe = io::load_pipeline(model_path);
  const DatasetTable table = io::read_dataset(dataset_path, sidecar_for(dataset_path));
  const EvalReport rep = evaluate(pipe, table);
  io::write_eval_report_csv(rep, join(cfg.out_dir, "eval_report.csv"));
  io::write_eval_summary_json(rep, join(cfg.out_dir, "eval_report.json"));
  std::cout << "R2 " << rep.r2_uniform_mean << "  MSE " << rep.mse_overall
            << "  over " << rep.n_samples << " samples\n";
  return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& model_path,
                const std::string& spectrum_path) {
  ensure_out_dir(cfg.out_dir);
  const TrainedPipeline pipe = io::load_pipeline(model_path);
  const Spectrum spec = io::read_spectrum(spectrum_path);
  const DimPrediction pred = predict_dims(pipe, spec);
  std::cout << "raw:     s1=" << pred.raw[0] << " mm  sw1=" << pred.raw[1]
            << " mm  theta=" << pred.raw[2] << " deg\n";
  std::cout << "rounded: s1=" << pred.rounded[0] << " mm  sw1=" << pred.rounded[1]
            << " mm  theta=" << pred.rounded[2] << " deg\n";
  nlohmann::json j{{"raw", pred.raw}, {"rounded", pred.rounded}};
  io::open_out(join(cfg.out_dir, "prediction.json")) << j.dump(2) << '\n';
  return 0;
}

std::vector<ResonanceTarget> load_valid_targets(const std::string& path,
                                                const FrequencyGrid& grid) {
  const std::vector<ResonanceTarget> targets = io::read_targets_csv(path);
  std::string bad;
  for (size_t i = 0; i < targets.size(); ++i) {
    try {
      targets[i].validate(grid);
    } catch (const validation_error& e) {
      bad += "  row " + std::to_string(i + 1) + ": " + e.what() + "\n";
    }
  }
  if (!bad.empty()) throw validation_error("invalid target rows:\n" + bad);
  return targets;
}

int cmd_synth(const RunConfig& cfg, const std::string& model_path,
              const std::string& targets_path) {
  ensure_out_dir(cfg.out_dir);
  const TrainedPipeline pipe = io::load_pipeline(model_path);
  const std::vector<ResonanceTarget> targets = load_valid_targets(targets_path, pipe.grid);
  const Spectrum spec = synth_target_spectrum(targets, pipe.grid);
  io::write_spectrum_csv(spec, join(cfg.out_dir, "target_spectrum.csv"));
  std::cout << "wrote " << join(cfg.out_dir, "target_spectrum.csv") << " ("
            << targets.size() << " notches)\n";
  return 0;
}

int cmd_roundtrip(const RunConfig& cfg, const std::string& model_path,
                  const std::string& targets_path) {
  ensure_out_dir(cfg.out_dir);
  const TrainedPipeline pipe = io::load_pipeline(model_path);
  const std::vector<ResonanceTarget> targets = load_valid_targets(targets_path, pipe.grid);
  const RoundtripReport rep = roundtrip(pipe, targets);
  io::write_roundtrip_report_json(rep, join(cfg.out_dir, "roundtrip.json"));
  io::write_spectrum_csv(rep.target_spectrum, join(cfg.out_dir, "target_spectrum.csv"));
  io::write_spectrum_csv(rep.achieved_spectrum, join(cfg.out_dir, "achieved_spectrum.csv"));
  svg::write_overlay_chart(
      {{"target", "#1f77b4", &rep.target_spectrum},
       {"achieved", "#d62728", &rep.achieved_spectrum}},
      "target vs achieved reflection coefficient",
      join(cfg.out_dir, "roundtrip.svg"));
  int matched = 0;
  for (const TargetOutcome& o : rep.outcomes) matched += o.matched ? 1 : 0;
  std::cout << "predicted (rounded): s1=" << rep.prediction.rounded[0]
            << " sw1=" << rep.prediction.rounded[1]
            << " theta=" << rep.prediction.rounded[2] << "; matched " << matched
            << "/" << rep.outcomes.size() << " targets\n";
  return 0;
}

int cmd_export_touchstone(const RunConfig& cfg, const std::string& spectrum_path,
                          const std::string& out_name) {
  ensure_out_dir(cfg.out_dir);
  const Spectrum spec = io::read_spectrum(spectrum_path);
  const std::string out = join(cfg.out_dir, out_name);
  io::write_touchstone_s1p(spec, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slotforge: surrogate-driven inverse design of cavity-backed slotted antennas"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, dataset_path, model_path, spectrum_path, targets_path;
  std::string s1p_name = "spectrum.s1p";

  CLI::App* gen = app.add_subcommand("generate", "sweep the parameter grid and write the dataset");
  add_common_flags(*gen, cfg, config_path);

  CLI::App* tr = app.add_subcommand("train", "split, train and evaluate on a dataset");
  add_common_flags(*tr, cfg, config_path);
  tr->add_option("dataset", dataset_path, "dataset CSV (JSON sidecar alongside)")->required();

  CLI::App* ev = app.add_subcommand("evaluate", "evaluate a saved model on a dataset");
  add_common_flags(*ev, cfg, config_path);
  ev->add_option("model", model_path, "model .slotforge.json")->required();
  ev->add_option("dataset", dataset_path, "dataset CSV")->required();

  CLI::App* pr = app.add_subcommand("predict", "predict slot dimensions from a spectrum file");
  add_common_flags(*pr, cfg, config_path);
  pr->add_option("model", model_path, "model .slotforge.json")->required();
  pr->add_option("spectrum", spectrum_path, "spectrum CSV or Touchstone .s1p")->required();

  CLI::App* sy = app.add_subcommand("synth", "synthesize an idealized target spectrum");
  add_common_flags(*sy, cfg, config_path);
  sy->add_option("model", model_path, "model .slotforge.json (supplies the grid)")->required();
  sy->add_option("targets", targets_path, "targets CSV center_ghz,upper_ghz,lower_ghz")->required();

  CLI::App* rt = app.add_subcommand("roundtrip", "synthesize, predict, re-simulate, compare");
  add_common_flags(*rt, cfg, config_path);
  rt->add_option("model", model_path, "model .slotforge.json")->required();
  rt->add_option("targets", targets_path, "targets CSV center_ghz,upper_ghz,lower_ghz")->required();

  CLI::App* xt = app.add_subcommand("export-touchstone", "convert a spectrum file to Touchstone .s1p");
  add_common_flags(*xt, cfg, config_path);
  xt->add_option("spectrum", spectrum_path, "spectrum CSV or .s1p")->required();
  xt->add_option("--name", s1p_name, "output file name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (!config_path.empty()) merge_config_file(*cmd, config_path, cfg);
    apply_env_seed(*cmd, cfg);
    cfg.grid.validate();

    if (cmd == gen) return cmd_generate(cfg);
    if (cmd == tr) return cmd_train(cfg, dataset_path);
    if (cmd == ev) return cmd_evaluate(cfg, model_path, dataset_path);
    if (cmd == pr) return cmd_predict(cfg, model_path, spectrum_path);
    if (cmd == sy) return cmd_synth(cfg, model_path, targets_path);
    if (cmd == rt) return cmd_roundtrip(cfg, model_path, targets_path);
    if (cmd == xt) return cmd_export_touchstone(cfg, spectrum_path, s1p_name);
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const schema_error& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const shape_error& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kExitShape;
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::out_of_range& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  }
  return 0;
}
