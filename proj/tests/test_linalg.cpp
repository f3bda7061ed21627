#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "ozawa/linalg.hpp"

using namespace ozawa;

TEST_CASE("Jacobi eigenvalues agree with Eigen") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int n : {1, 2, 5, 17, 40}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    }
    const auto mine = jacobi_eigenvalues(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    REQUIRE(mine.eigenvalues.size() == static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) CHECK(mine.eigenvalues[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
  }
}

TEST_CASE("Gram matrices of unit vectors are positive semidefinite") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd v(30, 6);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 6; ++j) v(i, j) = u(rng);
    v.row(i).normalize();
  }
  const Eigen::MatrixXd gram = v * v.transpose();
  const auto r = jacobi_eigenvalues(gram);
  CHECK(r.eigenvalues.front() > -1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  CHECK(r.eigenvalues.back() == doctest::Approx(es.eigenvalues()(29)).epsilon(1e-12));
}

TEST_CASE("Jacobi works in single precision") {
  Eigen::Matrix3f a;
  a << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const auto r = jacobi_eigenvalues(a);
  CHECK(r.eigenvalues[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-5));
  CHECK(r.eigenvalues[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-5));
}

TEST_CASE("square-root series coefficients") {
  // sqrt(1 - x) = sum a_n x^n with a_0 = 1, a_n = a_{n-1} (2n - 3) / (2n).
  const auto a = sqrt_series_coefficients<double>(6);
  CHECK(a[0] == 1);
  double expect = 1;
  for (int n = 1; n <= 6; ++n) {
    expect *= static_cast<double>(2 * n - 3) / (2 * n);
    CHECK(a[static_cast<std::size_t>(n)] == doctest::Approx(expect));
  }
}

TEST_CASE("matrix polynomial squares to the argument") {
  Eigen::MatrixXd x(2, 2);
  x << 0.2, 0.05, 0.05, 0.1;
  const auto a = sqrt_series_coefficients<double>(80);
  const Eigen::MatrixXd s = matrix_polynomial(x, a);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK((s * s - (id - x)).norm() < 1e-12);
}
