#include <doctest.h>

#include "ozawa/compression.hpp"

using namespace ozawa;

namespace {

WindowPtr line(int n) {
  IntegerLattice z(1);
  std::vector<Element> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Element{{i}});
  return std::make_shared<const MetricWindow>(group_window(z, pts));
}

}  // namespace

TEST_CASE("Gaussian kernel of the inclusion") {
  const auto w = line(6);
  const auto emb = inclusion_embedding_Z(*w);
  CHECK_FALSE(embedding_violation(emb, *w).has_value());
  const auto phi = gaussian_kernel(emb, 2.0, w);
  CHECK(phi.values(0, 3) == doctest::Approx(std::exp(-9.0 / 2.0)));
  const auto nb = operator_norm_bound(phi);
  CHECK(nb.top_eigenvalue <= nb.row_sum + 1e-12);
}

TEST_CASE("compression kernel on a short line") {
  const auto w = line(40);
  const auto emb = inclusion_embedding_Z(*w);
  const auto res = run_compression(emb, 1, 0.5, w);
  CHECK(res.max_entry_error < 0.25);
  CHECK(res.plan.M0 > 0);
  const Eigen::MatrixXd gram = res.W.transpose() * res.W;
  CHECK((gram - res.psi.values).cwiseAbs().maxCoeff() < 1e-12);
  // Oracle square root of the truncated Gaussian.
  const auto phi_m = truncate_kernel(gaussian_kernel(emb, res.plan.t, w), static_cast<double>(res.plan.M));
  const Eigen::MatrixXd v = exact_sqrt_oracle(phi_m.values);
  CHECK((v * v - phi_m.values).norm() < 1e-9);
}

TEST_CASE("plan overrides are honored") {
  const auto w = line(20);
  const auto emb = inclusion_embedding_Z(*w);
  PlanOverrides ov;
  ov.M0 = 30;
  const auto res = run_compression(emb, 1, 0.5, w, ov);
  CHECK(res.plan.M0 == 30);
  CHECK(res.plan.overridden);
}

TEST_CASE("invalid embeddings are rejected") {
  const auto w = line(5);
  UniformEmbedding emb = inclusion_embedding_Z(*w);
  emb.C = 0.1;
  CHECK(embedding_violation(emb, *w).has_value());
  CHECK_THROWS_AS(run_compression(emb, 1, 0.5, w), Error);
}
