#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "slotforge/errors.hpp"

namespace slotforge {

/// Coefficient of determination, 1 - SS_res / SS_tot.
inline double r2_score(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) throw shape_error("r2_score: length mismatch");
  if (y_true.size() < 2) throw validation_error("r2_score: need at least 2 samples");
  const double mean = y_true.mean();
  const double ss_tot = (y_true.array() - mean).square().sum();
  if (ss_tot == 0.0) throw validation_error("r2_score: y_true has zero variance");
  const double ss_res = (y_true - y_pred).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

inline double mse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) throw shape_error("mse: length mismatch");
  if (y_true.size() < 1) throw validation_error("mse: need at least 1 sample");
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

/// 100 * |true - pred| / |true|. The true value is the denominator.
inline double percentage_error(double true_val, double pred_val) {
  if (true_val == 0.0) throw validation_error("percentage_error: true value is zero");
  return 100.0 * std::abs(true_val - pred_val) / std::abs(true_val);
}

}  // namespace slotforge
