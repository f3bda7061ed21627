#include <doctest.h>

#include <cmath>

#include "ozawa/extensions.hpp"

using namespace ozawa;

namespace {

SparseVector interval(std::vector<std::int64_t> base, std::size_t coord, std::int64_t S) {
  SparseVector v;
  for (std::int64_t i = 0; i <= S; ++i) {
    auto e = base;
    e[coord] += i;
    v.emplace_back(Element{e}, 1 / std::sqrt(static_cast<double>(S + 1)));
  }
  return v;
}

double overlap(std::int64_t a, std::int64_t b, std::int64_t S) {
  return static_cast<double>(std::max<std::int64_t>(0, S + 1 - std::abs(a - b))) / static_cast<double>(S + 1);
}

}  // namespace

TEST_CASE("product sequence splits the kernel") {
  const auto seq = product_sequence(20);
  const auto window = std::make_shared<const MetricWindow>(enumerate_ball(seq.gamma(), seq.gamma().identity(), 5));
  CHECK_FALSE(verify_sequence(seq, window->points()).has_value());
  const QuotientFeatures lambda = [](const Element& g) { return interval({g.v[0]}, 0, 3); };
  const SubgroupFeatures mu = [](const Element& h) { return interval({1, h.v[1], 0}, 1, 2); };
  const SubgroupKernel psi_h = [&](const Element& a, const Element& b) { return dot(mu(a), mu(b)); };
  const auto km = extension_kernel(seq, lambda, psi_h, window);
  const auto fm = extension_features(seq, lambda, mu, *window);
  const auto kf = kernel_from_feature_map(fm, window);
  for (std::size_t i = 0; i < window->size(); ++i) {
    for (std::size_t j = 0; j < window->size(); ++j) {
      const auto& x = window->point(i).v;
      const auto& y = window->point(j).v;
      const double expect = overlap(x[2], y[2], 3) * overlap(x[1], y[1], 2);
      CHECK(km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(kf.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("cocycle of the dihedral sequence lands in H") {
  const auto seq = dihedral_sequence(10);
  const auto ball = ball_elements(seq.gamma(), seq.gamma().identity(), 4);
  CHECK_FALSE(verify_sequence(seq, ball).has_value());
  for (const auto& x : ball) {
    for (const auto& g : seq.quotient_elements()) CHECK(seq.in_h(seq.cocycle(x, g)));
  }
}

TEST_CASE("distance lemma on exhaustive triples") {
  for (const auto& seq : {product_sequence(24), dihedral_sequence(24)}) {
    auto elements = ball_elements(seq.gamma(), seq.gamma().identity(), 3);
    elements.resize(std::min<std::size_t>(elements.size(), 20));
    std::vector<Element> quotient;
    for (const auto& g : seq.quotient_elements()) {
      if (seq.length_g(g) <= 12) quotient.push_back(g);
    }
    if (quotient.size() > 25) quotient.resize(25);
    const auto triples = all_triples(elements, quotient);
    const auto rep = verify_distance_lemma(seq, triples);
    CHECK(rep.triples == triples.size());
    CHECK(rep.ok());
  }
}

TEST_CASE("BS exponent sequence") {
  const auto seq = bs_exponent_sequence(1, 2, 8);
  const auto ball = ball_elements(seq.gamma(), seq.gamma().identity(), 3);
  CHECK_FALSE(verify_sequence(seq, ball).has_value());
  CHECK(seq.length_g(Element{{1}}) == 1);
}
