#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "slotforge/datagen.hpp"
#include "slotforge/lasso.hpp"
#include "slotforge/metrics.hpp"
#include "slotforge/preprocess.hpp"

// End-to-end model: frozen preprocessing chain + Lasso weights + the metadata
// needed to round, clamp and report predictions in physical units.

namespace slotforge {

inline constexpr int kModelFormatVersion = 1;

struct TargetClamp {
  double lo, hi;
};

struct TrainedPipeline {
  FittedPreprocessor preprocessor;
  LassoModel model;
  std::array<std::string, 3> target_names{"s1_mm", "sw1_mm", "theta_deg"};
  std::array<TargetClamp, 3> target_clamps{{{25.0, 130.0}, {5.0, 60.0}, {0.0, 90.0}}};
  FrequencyGrid grid;
  int format_version = kModelFormatVersion;
};

inline TrainedPipeline train(const DatasetTable& dataset,
                             const LassoConfig& lasso_config = {},
                             Eigen::Index pca_d = 150) {
  if (dataset.size() < pca_d + 2)
    throw validation_error("train: dataset needs at least pca_d + 2 rows");

  TrainedPipeline pipe;
  pipe.grid = dataset.grid;

  std::vector<Eigen::Index> kept;
  pipe.preprocessor = fit_pipeline(dataset.features, pca_d, &kept);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(kept.size()), dataset.features.cols());
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(kept.size()), dataset.targets.cols());
  for (size_t i = 0; i < kept.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = dataset.features.row(kept[i]);
    Y.row(static_cast<Eigen::Index>(i)) = dataset.targets.row(kept[i]);
  }
  pipe.model = fit_lasso(pipeline_transform(pipe.preprocessor, X), Y, lasso_config);
  return pipe;
}

struct EvalRow {
  std::int64_t row_id;
  std::array<double, 3> truth;
  std::array<double, 3> predicted_raw;
  std::array<int, 3> predicted_rounded;
  std::array<double, 3> pct_error;  // NaN where the true value is 0
};

struct EvalReport {
  std::array<double, 3> r2_per_target;
  double r2_uniform_mean;
  std::array<double, 3> mse_per_target;
  double mse_overall;
  Eigen::Index n_samples;
  std::vector<EvalRow> rows;
};

inline int round_clamped(double raw, const TargetClamp& clamp) {
  const double r = std::round(raw);
  return static_cast<int>(std::min(clamp.hi, std::max(clamp.lo, r)));
}

inline EvalReport evaluate(const TrainedPipeline& pipe, const DatasetTable& table) {
  if (!(table.grid == pipe.grid))
    throw shape_error("evaluate: dataset grid does not match pipeline grid");
  const Eigen::MatrixXd Yhat =
      predict(pipe.model, pipeline_transform(pipe.preprocessor, table.features));

  EvalReport rep;
  rep.n_samples = table.size();
  double r2_sum = 0.0, se_sum = 0.0;
  for (int t = 0; t < 3; ++t) {
    rep.r2_per_target[static_cast<size_t>(t)] = r2_score(table.targets.col(t), Yhat.col(t));
    rep.mse_per_target[static_cast<size_t>(t)] = mse(table.targets.col(t), Yhat.col(t));
    r2_sum += rep.r2_per_target[static_cast<size_t>(t)];
    se_sum += (table.targets.col(t) - Yhat.col(t)).squaredNorm();
  }
  rep.r2_uniform_mean = r2_sum / 3.0;
  rep.mse_overall = se_sum / (3.0 * static_cast<double>(table.size()));

  rep.rows.reserve(static_cast<size_t>(table.size()));
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    EvalRow row;
    row.row_id = table.row_ids[static_cast<size_t>(i)];
    for (size_t t = 0; t < 3; ++t) {
      const auto tc = static_cast<Eigen::Index>(t);
      row.truth[t] = table.targets(i, tc);
      row.predicted_raw[t] = Yhat(i, tc);
      row.predicted_rounded[t] = round_clamped(Yhat(i, tc), pipe.target_clamps[t]);
      row.pct_error[t] = row.truth[t] == 0.0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : percentage_error(row.truth[t], row.predicted_raw[t]);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

struct DimPrediction {
  std::array<double, 3> raw;
  std::array<int, 3> rounded;
};

inline DimPrediction predict_dims(const TrainedPipeline& pipe, const Spectrum& spectrum) {
  if (!(spectrum.grid == pipe.grid))
    throw shape_error("predict_dims: spectrum grid does not match pipeline grid");
  Eigen::MatrixXd X(1, static_cast<Eigen::Index>(spectrum.s11_db.size()));
  for (size_t j = 0; j < spectrum.s11_db.size(); ++j)
    X(0, static_cast<Eigen::Index>(j)) = spectrum.s11_db[j];
  const Eigen::MatrixXd yhat = predict(pipe.model, pipeline_transform(pipe.preprocessor, X));

  DimPrediction out;
  for (size_t t = 0; t < 3; ++t) {
    out.raw[t] = yhat(0, static_cast<Eigen::Index>(t));
    out.rounded[t] = round_clamped(out.raw[t], pipe.target_clamps[t]);
  }
  return out;
}

}  // namespace slotforge
