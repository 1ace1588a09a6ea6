#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "slotforge/errors.hpp"

// Multi-output Lasso fitted by cyclic coordinate descent with
// soft-thresholding. Objective per target:
//   (1/(2n)) * ||y - Xw - b||^2 + alpha * ||w||_1
// with an unpenalized intercept. Each target is fitted independently.

namespace slotforge {

struct LassoConfig {
  double alpha = 0.01;
  double tol = 1e-6;      // max |delta w_j| over a sweep
  int max_iter = 10000;   // sweeps
  bool fit_intercept = true;

  void validate() const {
    if (alpha < 0.0) throw validation_error("lasso: alpha must be >= 0");
    if (!(tol > 0.0)) throw validation_error("lasso: tol must be > 0");
    if (max_iter < 1) throw validation_error("lasso: max_iter must be >= 1");
  }
};

struct LassoModel {
  Eigen::MatrixXd weights;    // p x m
  Eigen::VectorXd intercepts; // m
  std::vector<int> sweeps_used;
  std::vector<bool> converged;
};

inline double soft_threshold(double z, double g) {
  const double mag = std::abs(z) - g;
  if (mag <= 0.0) return 0.0;
  return z > 0.0 ? mag : -mag;
}

inline LassoModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                            const LassoConfig& config = {}) {
  config.validate();
  if (X.rows() == 0 || X.cols() == 0) throw validation_error("fit_lasso: empty X");
  if (Y.rows() != X.rows()) throw shape_error("fit_lasso: X/Y row mismatch");
  if (!X.allFinite() || !Y.allFinite())
    throw validation_error("fit_lasso: inputs must be finite");

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const Eigen::Index m = Y.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  // c_j = x_j^T x_j / n, precomputed once; features with c_j = 0 stay at 0.
  const Eigen::VectorXd col_scale = X.colwise().squaredNorm() * inv_n;

  LassoModel model;
  model.weights = Eigen::MatrixXd::Zero(p, m);
  model.intercepts = Eigen::VectorXd::Zero(m);
  model.sweeps_used.assign(static_cast<size_t>(m), 0);
  model.converged.assign(static_cast<size_t>(m), false);

  for (Eigen::Index t = 0; t < m; ++t) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    double b = config.fit_intercept ? Y.col(t).mean() : 0.0;
    Eigen::VectorXd r = Y.col(t).array() - b;  // residual y - Xw - b

    int sweep = 0;
    bool done = false;
    for (; sweep < config.max_iter && !done; ++sweep) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double cj = col_scale(j);
        if (cj == 0.0) continue;
        const double z = w(j) * cj + X.col(j).dot(r) * inv_n;
        const double wj_new = soft_threshold(z, config.alpha) / cj;
        const double delta = wj_new - w(j);
        if (delta != 0.0) {
          r -= X.col(j) * delta;
          w(j) = wj_new;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      if (config.fit_intercept) {
        const double db = r.mean();
        b += db;
        r.array() -= db;
      }
      done = max_delta < config.tol;
    }
    model.weights.col(t) = w;
    model.intercepts(t) = b;
    model.sweeps_used[static_cast<size_t>(t)] = sweep;
    model.converged[static_cast<size_t>(t)] = done;
  }
  return model;
}

inline Eigen::MatrixXd predict(const LassoModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.weights.rows())
    throw shape_error("predict: feature width does not match model");
  return (X * model.weights).rowwise() + model.intercepts.transpose();
}

/// Max violation of the stationarity conditions per target; a small value
/// certifies convergence independently of the sweep count.
inline Eigen::VectorXd kkt_residual(const LassoModel& model, const Eigen::MatrixXd& X,
                                    const Eigen::MatrixXd& Y, double alpha) {
  if (X.cols() != model.weights.rows() || Y.rows() != X.rows() ||
      Y.cols() != model.weights.cols())
    throw shape_error("kkt_residual: shape mismatch");
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  Eigen::VectorXd out(model.weights.cols());
  for (Eigen::Index t = 0; t < model.weights.cols(); ++t) {
    const Eigen::VectorXd r =
        Y.col(t) - X * model.weights.col(t) - Eigen::VectorXd::Constant(X.rows(), model.intercepts(t));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double g = X.col(j).dot(r) * inv_n;
      const double w = model.weights(j, t);
      const double viol = w == 0.0 ? std::max(0.0, std::abs(g) - alpha)
                                   : std::abs(g - alpha * (w > 0.0 ? 1.0 : -1.0));
      worst = std::max(worst, viol);
    }
    out(t) = worst;
  }
  return out;
}

/// Penalized objective, exposed for monotonicity checks.
inline double lasso_objective(const Eigen::VectorXd& w, double b,
                              const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              double alpha) {
  const Eigen::VectorXd r = y - X * w - Eigen::VectorXd::Constant(X.rows(), b);
  return r.squaredNorm() / (2.0 * static_cast<double>(X.rows())) +
         alpha * w.lpNorm<1>();
}

}  // namespace slotforge
