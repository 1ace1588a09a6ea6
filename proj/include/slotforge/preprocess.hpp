#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "slotforge/errors.hpp"

// Preprocessing chain: IQR outlier screen -> standardize -> PCA -> degree-2
// polynomial expansion -> second standardization. Every stage is a fit/apply
// pair with frozen state so the chain can be persisted and replayed exactly.

namespace slotforge {

/// Linear interpolation between order statistics ("type 7"), pinned so
/// quartiles agree across implementations. `sorted` must be ascending.
inline double quantile_type7(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
}

/// Per-feature Tukey fences; a row is an outlier when too large a fraction of
/// its features fall outside their fences.
struct IqrFilter {
  double multiplier = 1.5;
  double max_outlier_feature_fraction = 0.05;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

inline IqrFilter fit_iqr(const Eigen::MatrixXd& X, double multiplier = 1.5,
                         double max_outlier_feature_fraction = 0.05) {
  if (X.rows() < 4) throw validation_error("fit_iqr: need at least 4 rows");
  IqrFilter f;
  f.multiplier = multiplier;
  f.max_outlier_feature_fraction = max_outlier_feature_fraction;
  f.lower.resize(X.cols());
  f.upper.resize(X.cols());
  std::vector<double> col(static_cast<size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) col[static_cast<size_t>(i)] = X(i, j);
    std::sort(col.begin(), col.end());
    const double q1 = quantile_type7(col, 0.25);
    const double q3 = quantile_type7(col, 0.75);
    const double iqr = q3 - q1;
    f.lower(j) = q1 - multiplier * iqr;
    f.upper(j) = q3 + multiplier * iqr;
  }
  return f;
}

/// Indices (ascending) of rows whose outlier-feature fraction is acceptable.
inline std::vector<Eigen::Index> apply_iqr(const IqrFilter& filter,
                                           const Eigen::MatrixXd& X) {
  if (X.cols() != filter.lower.size())
    throw shape_error("apply_iqr: feature count does not match fitted bounds");
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index outside = 0;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (X(i, j) < filter.lower(j) || X(i, j) > filter.upper(j)) ++outside;
    const double frac = static_cast<double>(outside) / static_cast<double>(X.cols());
    if (frac <= filter.max_outlier_feature_fraction) kept.push_back(i);
  }
  return kept;
}

/// Per-feature affine rescaling to zero mean, unit (population) variance.
struct Standardizer {
  static constexpr double kStdFloor = 1e-12;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
};

inline Standardizer fit_standardizer(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) throw validation_error("fit_standardizer: need at least 2 rows");
  Standardizer s;
  s.means = X.colwise().mean();
  Eigen::VectorXd var =
      (X.rowwise() - s.means.transpose()).array().square().colwise().mean();
  s.stds = var.array().sqrt().max(Standardizer::kStdFloor);
  return s;
}

inline Eigen::MatrixXd standardize(const Standardizer& s, const Eigen::MatrixXd& X) {
  if (X.cols() != s.means.size())
    throw shape_error("standardize: feature count mismatch");
  return (X.rowwise() - s.means.transpose()).array().rowwise() /
         s.stds.transpose().array();
}

/// Principal components of the population covariance, sign-fixed so the
/// largest-magnitude entry of each column is positive.
struct PcaModel {
  Eigen::VectorXd mean;                  // length p
  Eigen::MatrixXd components;            // p x d, orthonormal columns
  Eigen::VectorXd explained_variances;   // length d, non-increasing
};

inline PcaModel fit_pca(const Eigen::MatrixXd& X, Eigen::Index d) {
  if (X.rows() < 2) throw validation_error("fit_pca: need at least 2 rows");
  const Eigen::Index p = X.cols();
  const Eigen::Index d_eff = std::min({d, p, X.rows() - 1});

  PcaModel m;
  m.mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - m.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(X.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigen returns eigenvalues ascending; take the top d_eff in reverse.
  m.components.resize(p, d_eff);
  m.explained_variances.resize(d_eff);
  for (Eigen::Index k = 0; k < d_eff; ++k) {
    const Eigen::Index src = p - 1 - k;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    m.components.col(k) = v;
    m.explained_variances(k) = std::max(0.0, eig.eigenvalues()(src));
  }
  return m;
}

inline Eigen::MatrixXd pca_transform(const PcaModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.mean.size()) throw shape_error("pca_transform: feature count mismatch");
  return (X.rowwise() - m.mean.transpose()) * m.components;
}

inline Eigen::MatrixXd pca_inverse(const PcaModel& m, const Eigen::MatrixXd& scores) {
  if (scores.cols() != m.components.cols())
    throw shape_error("pca_inverse: score width mismatch");
  return (scores * m.components.transpose()).rowwise() + m.mean.transpose();
}

/// Degree-2 polynomial expansion with bias: [1, x_1..x_d, x_i*x_j (i<=j)].
struct PolyExpander {
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim() const { return (input_dim + 1) * (input_dim + 2) / 2; }
};

inline Eigen::MatrixXd poly_expand(const Eigen::MatrixXd& X) {
  const Eigen::Index d = X.cols();
  const Eigen::Index out_dim = (d + 1) * (d + 2) / 2;
  Eigen::MatrixXd out(X.rows(), out_dim);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    Eigen::Index c = 0;
    out(r, c++) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) out(r, c++) = X(r, i);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i; j < d; ++j) out(r, c++) = X(r, i) * X(r, j);
  }
  return out;
}

inline Eigen::VectorXd poly_expand(const Eigen::VectorXd& x) {
  return poly_expand(Eigen::MatrixXd(x.transpose())).row(0);
}

/// Frozen preprocessing chain: p -> p -> d -> (d+1)(d+2)/2.
struct FittedPreprocessor {
  IqrFilter iqr;
  Standardizer std1;   // raw features
  PcaModel pca;
  PolyExpander poly;
  Standardizer std2;   // expanded features; bias column passes through as 1
};

/// Fit the whole chain. IQR row-dropping happens here only; `kept_rows`
/// receives the surviving row indices so callers can drop targets to match.
inline FittedPreprocessor fit_pipeline(const Eigen::MatrixXd& Xtrain,
                                       Eigen::Index pca_d = 150,
                                       std::vector<Eigen::Index>* kept_rows = nullptr) {
  FittedPreprocessor fp;
  fp.iqr = fit_iqr(Xtrain);
  std::vector<Eigen::Index> kept = apply_iqr(fp.iqr, Xtrain);
  // Outlier-screen fuse: a screen that rejects the majority of its own
  // fitting data is diagnosing a distribution mismatch, not outliers
  // (heavy-tailed spectral bins routinely sit outside Tukey fences).
  // In that regime dropping rows destroys the model, so keep everything.
  if (kept.size() * 2 < static_cast<size_t>(Xtrain.rows())) {
    kept.resize(static_cast<size_t>(Xtrain.rows()));
    for (size_t i = 0; i < kept.size(); ++i) kept[i] = static_cast<Eigen::Index>(i);
  }
  if (kept_rows) *kept_rows = kept;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(kept.size()), Xtrain.cols());
  for (size_t i = 0; i < kept.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = Xtrain.row(kept[i]);

  fp.std1 = fit_standardizer(X);
  const Eigen::MatrixXd Xs = standardize(fp.std1, X);
  fp.pca = fit_pca(Xs, pca_d);
  const Eigen::MatrixXd scores = pca_transform(fp.pca, Xs);
  fp.poly.input_dim = fp.pca.components.cols();
  const Eigen::MatrixXd expanded = poly_expand(scores);

  fp.std2 = fit_standardizer(expanded);
  fp.std2.means(0) = 0.0;  // bias column exempt
  fp.std2.stds(0) = 1.0;
  return fp;
}

/// Apply the frozen stages. No rows are ever dropped at transform time.
inline Eigen::MatrixXd pipeline_transform(const FittedPreprocessor& fp,
                                          const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd Xs = standardize(fp.std1, X);
  const Eigen::MatrixXd scores = pca_transform(fp.pca, Xs);
  return standardize(fp.std2, poly_expand(scores));
}

}  // namespace slotforge
