// tests/test_data.cpp

// Copyright 2026  The sgpmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sgpmix/data.hpp"
#include "sgpmix/fcm.hpp"
#include "sgpmix/manifold.hpp"
#include "test_support.hpp"

using namespace sgpmix;
using namespace sgpmix::testing;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("isomap_embed") {
  SUBCASE("collinear points embed equally spaced and in order") {
    Matrix y(10, 3);
    for (Index i = 0; i < 10; ++i)
      y.row(i) << 2.0 * i, -1.0 * i, 0.5 * i;
    const Matrix e = isomap_embed(y, 2, 1, 0);
    // consecutive gaps all equal, single sign
    const double gap = e(1, 0) - e(0, 0);
    for (Index i = 1; i < 10; ++i)
      CHECK(e(i, 0) - e(i - 1, 0) == doctest::Approx(gap).epsilon(1e-9));
    CHECK(std::abs(gap) > 0.0);
  }
  SUBCASE("right triangle distances are reproduced") {
    Matrix y(3, 2);
    y << 0.0, 0.0, 3.0, 0.0, 0.0, 4.0;  // sides 3, 4, 5
    const Matrix e = isomap_embed(y, 2, 2, 0);
    const double d01 = (e.row(0) - e.row(1)).norm();
    const double d02 = (e.row(0) - e.row(2)).norm();
    const double d12 = (e.row(1) - e.row(2)).norm();
    CHECK(d01 == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(d02 == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(d12 == doctest::Approx(5.0).epsilon(1e-8));
  }
  SUBCASE("quarter-circle arc unrolls monotonically") {
    const Index n = 30;
    Matrix y(n, 2);
    for (Index i = 0; i < n; ++i) {
      const double t = 0.5 * kPi * i / (n - 1);
      y.row(i) << std::cos(t), std::sin(t);
    }
    const Matrix e = isomap_embed(y, 2, 1, 0);
    const double direction = e(1, 0) - e(0, 0) > 0 ? 1.0 : -1.0;
    for (Index i = 1; i < n; ++i)
      CHECK(direction * (e(i, 0) - e(i - 1, 0)) > 0.0);
  }
  SUBCASE("points in an affine subspace keep their distances") {
    std::mt19937_64 rng(31);
    const Matrix flat = random_matrix(25, 2, rng);
    const Matrix lift = random_matrix(2, 5, rng);
    Matrix y = flat * lift;  // 25 points in a 2-D plane inside R^5
    y.rowwise() += random_vector(5, rng).transpose();
    const Matrix e = isomap_embed(y, 24, 2, 0);  // complete graph
    for (Index i = 0; i < 25; ++i)
      for (Index j = i + 1; j < 25; ++j) {
        const double want = (y.row(i) - y.row(j)).norm();
        const double got = (e.row(i) - e.row(j)).norm();
        CHECK(std::abs(got - want) < 1e-6);
      }
  }
  SUBCASE("disconnected components are bridged") {
    Matrix y(6, 1);
    y << 0.0, 0.1, 0.2, 100.0, 100.1, 100.2;  // two far clusters, k=1
    const Matrix e = isomap_embed(y, 1, 1, 0);
    CHECK(e.allFinite());
  }
  SUBCASE("zero-padding beyond the positive spectrum") {
    Matrix y(3, 3);
    y << 0, 0, 0, 1, 0, 0, 2, 0, 0;  // a line: one positive eigenvalue
    const Matrix e = isomap_embed(y, 2, 3, 0);
    CHECK(e.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.col(2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fcm_cluster") {
  SUBCASE("single cluster converges to the mean") {
    std::mt19937_64 rng(37);
    const Matrix x = random_matrix(40, 3, rng);
    const FcmResult res = fcm_cluster(x, 1, 2.0, 300, 1e-10, 0);
    CHECK((res.centers.row(0) - x.colwise().mean()).norm() < 1e-6);
  }
  SUBCASE("two tight blobs are found") {
    std::mt19937_64 rng(38);
    Matrix x(40, 2);
    for (Index i = 0; i < 20; ++i) {
      x(i, 0) = 5.0 + 0.1 * random_vector(1, rng)(0);
      x(i, 1) = 0.1 * random_vector(1, rng)(0);
    }
    for (Index i = 20; i < 40; ++i) {
      x(i, 0) = -5.0 + 0.1 * random_vector(1, rng)(0);
      x(i, 1) = 0.1 * random_vector(1, rng)(0);
    }
    const FcmResult res = fcm_cluster(x, 2, 2.0, 300, 1e-8, 3);
    const double d0 = std::min((res.centers.row(0) - Eigen::RowVector2d(5, 0)).norm(),
                               (res.centers.row(0) - Eigen::RowVector2d(-5, 0)).norm());
    const double d1 = std::min((res.centers.row(1) - Eigen::RowVector2d(5, 0)).norm(),
                               (res.centers.row(1) - Eigen::RowVector2d(-5, 0)).norm());
    CHECK(d0 < 0.2);
    CHECK(d1 < 0.2);
    // one center per blob
    CHECK((res.centers.row(0) - res.centers.row(1)).norm() > 5.0);
  }
  SUBCASE("objective is non-increasing and memberships row-stochastic") {
    std::mt19937_64 rng(39);
    const Matrix x = random_matrix(50, 2, rng);
    const FcmResult res = fcm_cluster(x, 4, 2.0, 100, 1e-9, 5);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-9);
    const Vector sums = res.memberships.rowwise().sum();
    CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("a point sitting on a center keeps full membership there") {
    Matrix x(3, 1);
    x << 0.0, 1.0, 2.0;
    const FcmResult res = fcm_cluster(x, 3, 2.0, 50, 1e-9, 1);
    // after convergence each point coincides with one center
    for (Index i = 0; i < 3; ++i)
      CHECK(res.memberships.row(i).maxCoeff() == doctest::Approx(1.0));
  }
}

TEST_CASE("pca_variance_dims") {
  SUBCASE("equal eigenvalues split evenly") {
    // 8 rows whose columns are orthogonal, zero-mean, equal norm
    Matrix y(8, 4);
    y << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1, -1, 1, 1, -1,
        -1, 1, -1, 1, -1, -1, 1, 1, -1, -1, -1, -1;
    CHECK(pca_variance_dims(y, 50.0) == 2);
    CHECK(pca_variance_dims(y, 25.0) == 1);
    CHECK(pca_variance_dims(y, 100.0) == 4);
  }
  SUBCASE("monotone in the percentage") {
    std::mt19937_64 rng(41);
    const Matrix y = random_matrix(30, 6, rng);
    int prev = 0;
    for (double pct : {10.0, 30.0, 50.0, 70.0, 90.0, 99.0, 100.0}) {
      const int q = pca_variance_dims(y, pct);
      CHECK(q >= prev);
      prev = q;
    }
  }
  SUBCASE("iris retains 95% variance in two dimensions") {
    const Dataset iris =
        load_csv(std::string(SGPMIX_DATA_DIR) + "/iris.csv", "last");
    CHECK(pca_variance_dims(iris.y, 95.0) == 2);
  }
  SUBCASE("degenerate data is rejected") {
    const Matrix y = Matrix::Ones(5, 3);
    CHECK_THROWS_AS(pca_variance_dims(y, 95.0), std::invalid_argument);
  }
}

TEST_CASE("select_inducing") {
  std::mt19937_64 rng(43);
  const Matrix x = random_matrix(12, 2, rng);
  SUBCASE("full draw is a permutation") {
    const Matrix perm = select_inducing(x, 12, 7);
    std::set<double> orig, drawn;
    for (Index i = 0; i < 12; ++i) {
      orig.insert(x(i, 0));
      drawn.insert(perm(i, 0));
    }
    CHECK(orig == drawn);
  }
  SUBCASE("deterministic under a fixed seed") {
    const Matrix a = select_inducing(x, 5, 11);
    const Matrix b = select_inducing(x, 5, 11);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single row") {
    const Matrix one = select_inducing(x, 1, 3);
    CHECK(one.rows() == 1);
    bool found = false;
    for (Index i = 0; i < 12; ++i)
      found = found || (x.row(i) - one.row(0)).norm() == 0.0;
    CHECK(found);
  }
  SUBCASE("oversampling is rejected") {
    CHECK_THROWS_AS(select_inducing(x, 13, 0), std::invalid_argument);
  }
}

TEST_CASE("synthetic datasets") {
  SUBCASE("noise-free spiral satisfies x^2 + y^2 = z^2") {
    const Dataset d = synth_spiral3d(100, 0.0, 5);
    for (Index i = 0; i < d.n(); ++i) {
      const double lhs = d.y(i, 0) * d.y(i, 0) + d.y(i, 1) * d.y(i, 1);
      CHECK(lhs == doctest::Approx(d.y(i, 2) * d.y(i, 2)).epsilon(1e-10));
    }
    CHECK(d.num_classes() == 5);
  }
  SUBCASE("arcs carry exactly five labels") {
    const Dataset d = synth_circle_arcs(25, 9);
    CHECK(d.n() == 125);
    CHECK(d.num_classes() == 5);
  }
  SUBCASE("fixed seed gives byte-identical CSV export") {
    const std::string p1 = "/tmp/sgpmix_arcs_a.csv";
    const std::string p2 = "/tmp/sgpmix_arcs_b.csv";
    save_csv(synth_circle_arcs(30, 123), p1);
    save_csv(synth_circle_arcs(30, 123), p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(!slurp(p1).empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
  }
}

TEST_CASE("csv ingestion") {
  const std::string path = "/tmp/sgpmix_test.csv";
  SUBCASE("header and string labels") {
    {
      std::ofstream out(path);
      out << "a,b,species\n1.5,2.5,rose\n3.5,4.5,iris\n5.5,6.5,rose\n";
    }
    const Dataset d = load_csv(path, "last");
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    REQUIRE(d.labels.has_value());
    // lexicographic coding: iris -> 0, rose -> 1
    CHECK((*d.labels)[0] == 1);
    CHECK((*d.labels)[1] == 0);
    CHECK((*d.labels)[2] == 1);
    CHECK(d.y(2, 1) == doctest::Approx(6.5));
  }
  SUBCASE("headerless unlabeled matrix") {
    {
      std::ofstream out(path);
      out << "1,2\n3,4\n";
    }
    const Dataset d = load_csv(path, "");
    CHECK(d.n() == 2);
    CHECK(d.p() == 2);
    CHECK(!d.labels.has_value());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv("/tmp/definitely_not_here_417.csv", "last"),
                    std::invalid_argument);
  }
  SUBCASE("non-finite entries are rejected") {
    {
      std::ofstream out(path);
      out << "1,nan,0\n1,2,1\n";
    }
    CHECK_THROWS_AS(load_csv(path, "last"), NumericalError);
  }
  SUBCASE("ragged rows are rejected") {
    {
      std::ofstream out(path);
      out << "1,2,0\n1,1\n";
    }
    CHECK_THROWS(load_csv(path, "last"));
  }
  std::remove(path.c_str());
}

TEST_CASE("standardize_columns") {
  std::mt19937_64 rng(47);
  Matrix y = random_matrix(20, 3, rng);
  y.col(1) *= 13.0;
  const Matrix z = standardize_columns(y);
  CHECK(z.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  for (Index c = 0; c < 3; ++c) {
    const double var = z.col(c).squaredNorm() / 19.0;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
}
