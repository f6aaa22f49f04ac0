#include <algorithm>
#include <random>

#include "doctest.h"
#include "erase/diagnostics.hpp"
#include "oracles.hpp"

TEST_CASE("stratified sampling honors quotas and is deterministic") {
  std::vector<int> labels;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 50; ++i) labels.push_back(j);

  const std::vector<int> a = erase::stratified_sample(labels, 4, 40, 3);
  const std::vector<int> b = erase::stratified_sample(labels, 4, 40, 3);
  CHECK(a == b);
  CHECK(a.size() == 40);  // quota 10 per class

  // Ordered by class, ascending node ids inside each class.
  for (std::size_t i = 1; i < a.size(); ++i) {
    const int prev_class = labels[a[i - 1]];
    const int cur_class = labels[a[i]];
    CHECK(prev_class <= cur_class);
    if (prev_class == cur_class) CHECK(a[i - 1] < a[i]);
  }

  const std::vector<int> c = erase::stratified_sample(labels, 4, 40, 4);
  CHECK(a != c);

  // Cap below the class count still yields one node per class.
  const std::vector<int> tiny = erase::stratified_sample(labels, 4, 2, 0);
  CHECK(tiny.size() == 4);

  // Cap above the population returns everything.
  const std::vector<int> all = erase::stratified_sample(labels, 4, 4000, 0);
  CHECK(all.size() == labels.size());
}

TEST_CASE("cosine matrix has unit diagonal for nonzero rows") {
  std::mt19937_64 rng(66);
  Eigen::MatrixXd z = oracle::random_matrix(6, 4, rng);
  z.row(2).setZero();
  std::vector<int> nodes{0, 1, 2, 3, 4, 5};
  const Eigen::MatrixXd cos = erase::cosine_matrix(z, nodes);
  CHECK(cos.rows() == 6);
  for (int i = 0; i < 6; ++i) {
    if (i == 2) {
      CHECK(cos.row(i).cwiseAbs().maxCoeff() == 0.0);
      CHECK(cos.col(i).cwiseAbs().maxCoeff() == 0.0);
    } else {
      CHECK(cos(i, i) == doctest::Approx(1.0));
    }
    for (int j = 0; j < 6; ++j) {
      CHECK(cos(i, j) == doctest::Approx(cos(j, i)));
      CHECK(std::abs(cos(i, j)) <= 1.0 + 1e-12);
    }
  }
  CHECK_THROWS(erase::cosine_matrix(z, {0, 99}));
}

TEST_CASE("pca recovers planar structure") {
  // Points on a known 2d plane embedded in 5 dimensions keep their pairwise
  // distances in the projection.
  std::mt19937_64 rng(67);
  const int n = 40;
  Eigen::MatrixXd coords2 = oracle::random_matrix(n, 2, rng);
  coords2.col(0) *= 4.0;  // make the spectrum unambiguous
  coords2.col(1) *= 2.0;
  Eigen::MatrixXd basis(2, 5);
  basis << 1, 0, 1, 0, 1,
           0, 1, 0, -1, 0;
  basis.row(0).normalize();
  basis.row(1).normalize();
  const Eigen::MatrixXd z = coords2 * basis;

  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i;
  const Eigen::MatrixXd p = erase::pca_2d(z, nodes);
  REQUIRE(p.rows() == n);
  REQUIRE(p.cols() == 2);

  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double want = (z.row(i) - z.row(j)).norm();
      const double got = (p.row(i) - p.row(j)).norm();
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }

  // Leading component captures at least as much variance as the second.
  const Eigen::MatrixXd centered = p.rowwise() - p.colwise().mean();
  CHECK(centered.col(0).squaredNorm() >= centered.col(1).squaredNorm());

  // Deterministic output, including the sign convention.
  const Eigen::MatrixXd q = erase::pca_2d(z, nodes);
  CHECK((p - q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prototype cosine extremes") {
  erase::PrototypeSet p;
  p.centers = Eigen::MatrixXd::Identity(3, 3);
  p.populated = {true, true, true};
  CHECK(erase::max_prototype_cosine(p) == doctest::Approx(0.0));

  p.centers.row(2) = -2.0 * p.centers.row(0);
  CHECK(erase::max_prototype_cosine(p) == doctest::Approx(1.0));

  p.populated = {true, true, false};  // ignore the parallel pair
  CHECK(erase::max_prototype_cosine(p) == doctest::Approx(0.0));

  p.populated = {true, false, false};
  CHECK(erase::max_prototype_cosine(p) == 0.0);
}
