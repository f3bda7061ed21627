#include <doctest.h>

#include "ozawa/kernels.hpp"

using namespace ozawa;

namespace {

WindowPtr line(int n) {
  IntegerLattice z(1);
  std::vector<Element> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Element{{i}});
  return std::make_shared<const MetricWindow>(group_window(z, pts));
}

}  // namespace

TEST_CASE("sparse vector algebra") {
  SparseVector a{{Element{{2}}, 1.0}, {Element{{1}}, 2.0}, {Element{{2}}, 1.0}};
  const auto c = canonicalize(a);
  REQUIRE(c.size() == 2);
  CHECK(c[0].first == Element{{1}});
  CHECK(c[1].second == 2.0);
  CHECK(dot(c, c) == doctest::Approx(8.0));
  CHECK(norm(normalized(c)) == doctest::Approx(1.0));
}

TEST_CASE("PSD check detects an indefinite matrix") {
  const auto w = line(3);
  KernelMatrix good{w, Eigen::MatrixXd::Identity(3, 3)};
  CHECK(check_psd(good).pass);
  KernelMatrix bad{w, Eigen::MatrixXd::Ones(3, 3) - 2 * Eigen::MatrixXd::Identity(3, 3) * 0.0};
  bad.values(0, 1) = bad.values(1, 0) = -1;
  const auto r = check_psd(bad);
  CHECK_FALSE(r.pass);
  CHECK(r.min_eigenvalue < -0.5);
}

TEST_CASE("unity and width checks") {
  const auto w = line(5);
  Eigen::MatrixXd v(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) v(i, j) = std::max(0.0, 1.0 - 0.25 * std::abs(i - j));
  }
  KernelMatrix km{w, v};
  const auto u = check_unity(km, 1, 0.3);
  CHECK(u.pass);
  CHECK(u.max_deviation == doctest::Approx(0.25));
  CHECK_FALSE(check_unity(km, 1, 0.25).pass);
  const auto wd = check_width(km, 3);
  CHECK(wd.observed_width == 3);
  CHECK(wd.pass);
  CHECK_FALSE(check_width(km, 2).pass);
}

TEST_CASE("kernel CSV and report round trip") {
  const auto w = line(4);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(4, 4);
  v(0, 1) = v(1, 0) = 1.0 / 3.0;
  KernelMatrix km{w, v};
  const auto [labels, back] = kernel_from_csv(kernel_to_csv(km));
  CHECK(labels == w->labels());
  CHECK((back - v).cwiseAbs().maxCoeff() == 0);

  const auto rep = verify_kernel(km, 1, 0.9, 1);
  const auto again = report_from_json(report_to_json(rep));
  CHECK(again.min_eigenvalue == rep.min_eigenvalue);
  CHECK(again.pass_width == rep.pass_width);
  CHECK(again.observed_width == 1);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("feature map validation") {
  FeatureMap ok({{{Element{{0}}, 1.0}}, {{Element{{0}}, 0.6}, {Element{{1}}, 0.8}}});
  CHECK_FALSE(ok.violation().has_value());
  FeatureMap bad({{{Element{{0}}, 0.5}}});
  CHECK(bad.violation().has_value());
  const auto km = kernel_from_feature_map(ok, line(2));
  CHECK(km.values(0, 1) == doctest::Approx(0.6));
}
