#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "slotforge/preprocess.hpp"

using namespace slotforge;

TEST_CASE("IQR fences from interpolated quartiles") {
  Eigen::MatrixXd X(5, 1);
  X << 1, 2, 3, 4, 100;
  const IqrFilter f = fit_iqr(X);
  CHECK(f.lower(0) == Catch::Approx(-1.0));
  CHECK(f.upper(0) == Catch::Approx(7.0));
  CHECK((100.0 > f.upper(0)));
}

TEST_CASE("constant column has degenerate fences") {
  Eigen::MatrixXd X(4, 1);
  X << 5, 5, 5, 5;
  const IqrFilter f = fit_iqr(X);
  CHECK(f.lower(0) == Catch::Approx(5.0));
  CHECK(f.upper(0) == Catch::Approx(5.0));
  CHECK(apply_iqr(f, X).size() == 4);  // identical rows drop nothing
}

TEST_CASE("row outlier-fraction threshold") {
  // 40 features; fences fitted on a tight cluster.
  const Eigen::Index p = 40;
  Eigen::MatrixXd X(20, p);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = u(rng);
  const IqrFilter f = fit_iqr(X);

  Eigen::MatrixXd probe = Eigen::MatrixXd::Zero(3, p);
  probe(1, 0) = 1000.0;                                // 1/40 = 2.5% outside -> kept
  for (int j = 0; j < 4; ++j) probe(2, j) = 1000.0;    // 10% outside -> dropped
  const auto kept = apply_iqr(f, probe);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == 0);
  CHECK(kept[1] == 1);
}

TEST_CASE("fit_iqr needs at least 4 rows, apply checks widths") {
  Eigen::MatrixXd X(3, 2);
  X.setZero();
  CHECK_THROWS_AS(fit_iqr(X), validation_error);
  Eigen::MatrixXd ok(4, 2);
  ok << 0, 0, 1, 1, 2, 2, 3, 3;
  const IqrFilter f = fit_iqr(ok);
  Eigen::MatrixXd wrong(2, 3);
  wrong.setZero();
  CHECK_THROWS_AS(apply_iqr(f, wrong), shape_error);
}

TEST_CASE("standardizer uses population statistics") {
  Eigen::MatrixXd X(2, 1);
  X << 0, 2;
  const Standardizer s = fit_standardizer(X);
  CHECK(s.means(0) == Catch::Approx(1.0));
  CHECK(s.stds(0) == Catch::Approx(1.0));
  const Eigen::MatrixXd Xs = standardize(s, X);
  CHECK(Xs(0, 0) == Catch::Approx(-1.0));
  CHECK(Xs(1, 0) == Catch::Approx(1.0));
}

TEST_CASE("constant column standardizes to zeros") {
  Eigen::MatrixXd X(4, 1);
  X << 5, 5, 5, 5;
  const Standardizer s = fit_standardizer(X);
  const Eigen::MatrixXd Xs = standardize(s, X);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(Xs(i, 0) == 0.0);
}

TEST_CASE("standardized training data has mean 0, std 1") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g(3.0, 2.5);
  Eigen::MatrixXd X(50, 4);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
  const Eigen::MatrixXd Xs = standardize(fit_standardizer(X), X);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    CHECK(Xs.col(j).mean() == Catch::Approx(0.0).margin(1e-10));
    CHECK(Xs.col(j).array().square().mean() == Catch::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("standardize is invertible above the floor") {
  std::mt19937 rng(13);
  std::normal_distribution<double> g(0.0, 7.0);
  Eigen::MatrixXd X(30, 3);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
  const Standardizer s = fit_standardizer(X);
  const Eigen::MatrixXd Xs = standardize(s, X);
  const Eigen::MatrixXd back =
      (Xs.array().rowwise() * s.stds.transpose().array()).rowwise() +
      s.means.transpose().array();
  CHECK((back - X).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("PCA on a 3-point line") {
  Eigen::MatrixXd X(3, 2);
  X << -1, -1, 0, 0, 1, 1;
  const PcaModel m = fit_pca(X, 2);
  REQUIRE(m.components.cols() == 2);  // min(2, p=2, n-1=2)
  CHECK(m.explained_variances(0) == Catch::Approx(4.0 / 3.0));
  CHECK(m.explained_variances(1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(m.components(0, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));
  CHECK(m.components(1, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));

  const Eigen::MatrixXd scores = pca_transform(m, X);
  CHECK(scores(0, 0) == Catch::Approx(-std::sqrt(2.0)));
  CHECK(scores(1, 0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(scores(2, 0) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("PCA of white data has near-unit explained variances") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(4000, 4);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
  // exact whitening so population covariance is the identity
  Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = C.transpose() * C / static_cast<double>(C.rows());
  const Eigen::MatrixXd Xw = C * cov.llt().matrixL().toDenseMatrix().inverse().transpose();
  const PcaModel m = fit_pca(Xw, 4);
  for (Eigen::Index k = 0; k < 4; ++k)
    CHECK(m.explained_variances(k) == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("PCA rank bound, orthonormality and reconstruction") {
  std::mt19937 rng(19);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(5, 8);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
  const PcaModel m = fit_pca(X, 100);
  CHECK(m.components.cols() == 4);  // n - 1
  const Eigen::MatrixXd gram = m.components.transpose() * m.components;
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
  for (Eigen::Index k = 1; k < 4; ++k)
    CHECK(m.explained_variances(k) <= m.explained_variances(k - 1) + 1e-12);
  // rank(centered X) <= n-1, so 4 components reconstruct exactly
  const Eigen::MatrixXd back = pca_inverse(m, pca_transform(m, X));
  CHECK((back - X).norm() / X.norm() < 1e-8);
}

TEST_CASE("PCA sign convention and mean centering") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 5, 2, 3, 3, 1;
  const PcaModel m = fit_pca(X, 2);
  for (Eigen::Index k = 0; k < m.components.cols(); ++k) {
    Eigen::Index imax;
    m.components.col(k).cwiseAbs().maxCoeff(&imax);
    CHECK(m.components(imax, k) > 0.0);
  }
  const Eigen::MatrixXd zero = pca_transform(m, m.mean.transpose());
  CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("polynomial expansion ordering and length") {
  Eigen::VectorXd x(2);
  x << 2, 3;
  const Eigen::VectorXd e = poly_expand(x);
  REQUIRE(e.size() == 6);
  CHECK(e(0) == 1.0);
  CHECK(e(1) == 2.0);
  CHECK(e(2) == 3.0);
  CHECK(e(3) == 4.0);
  CHECK(e(4) == 6.0);
  CHECK(e(5) == 9.0);

  const Eigen::MatrixXd empty = poly_expand(Eigen::MatrixXd(1, 0));
  REQUIRE(empty.cols() == 1);  // bias only
  CHECK(empty(0, 0) == 1.0);
}

TEST_CASE("polynomial length law for d in 0..200") {
  for (Eigen::Index d = 0; d <= 200; d += (d < 12 ? 1 : 17)) {
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(1, d);
    CHECK(poly_expand(X).cols() == (d + 1) * (d + 2) / 2);
  }
  PolyExpander pe;
  pe.input_dim = 150;
  CHECK(pe.output_dim() == 11476);
}

TEST_CASE("fitted chain: shapes, bias column, inference never drops rows") {
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(60, 12);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng) * (1.0 + j);

  std::vector<Eigen::Index> kept;
  const FittedPreprocessor fp = fit_pipeline(X, 5, &kept);
  const Eigen::MatrixXd out = pipeline_transform(fp, X);
  CHECK(out.cols() == 21);  // (5+1)(5+2)/2
  CHECK(out.rows() == X.rows());

  // bias column passes through std2 untouched
  for (Eigen::Index i = 0; i < out.rows(); ++i) CHECK(out(i, 0) == 1.0);

  // transformed training columns are centered (bias excepted)
  Eigen::MatrixXd Xkept(static_cast<Eigen::Index>(kept.size()), X.cols());
  for (size_t i = 0; i < kept.size(); ++i)
    Xkept.row(static_cast<Eigen::Index>(i)) = X.row(kept[i]);
  const Eigen::MatrixXd train_out = pipeline_transform(fp, Xkept);
  for (Eigen::Index j = 1; j < train_out.cols(); ++j)
    CHECK(train_out.col(j).mean() == Catch::Approx(0.0).margin(1e-9));

  // a pathological single row still transforms to 1 x width
  Eigen::MatrixXd extreme = Eigen::MatrixXd::Constant(1, 12, 1e6);
  CHECK(pipeline_transform(fp, extreme).rows() == 1);
}

TEST_CASE("transform is batch-size independent") {
  std::mt19937 rng(29);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(40, 6);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
  const FittedPreprocessor fp = fit_pipeline(X, 4);
  const Eigen::MatrixXd batch = pipeline_transform(fp, X);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::MatrixXd single = pipeline_transform(fp, X.row(i));
    CHECK((single.row(0) - batch.row(i)).cwiseAbs().maxCoeff() < 1e-12);
  }
}
