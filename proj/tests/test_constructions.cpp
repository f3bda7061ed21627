#include <doctest.h>

#include <set>

#include "ozawa/constructions.hpp"

using namespace ozawa;

namespace {

WindowPtr z_ball(std::int64_t r) {
  IntegerLattice z(1);
  return std::make_shared<const MetricWindow>(enumerate_ball(z, z.identity(), r));
}

AFamily interval_family(const MetricWindow& w, std::int64_t S, double R, double eps) {
  AFamily fam;
  fam.R = R;
  fam.epsilon = eps;
  fam.S = static_cast<double>(S);
  for (const auto& x : w.points()) {
    std::vector<AFamily::Entry> set;
    for (std::int64_t i = 0; i <= S; ++i) set.emplace_back(Element{{x.v[0] + i}}, 1);
    fam.sets.push_back(set);
  }
  return fam;
}

}  // namespace

TEST_CASE("interval family kernel is the overlap fraction") {
  IntegerLattice z(1);
  const auto w = z_ball(12);
  const auto fam = interval_family(*w, 9, 1, 0.25);
  const auto check = verify_a_family(fam, *w, group_distance(z));
  CHECK(check.ok());
  CHECK(check.max_ratio == doctest::Approx(2.0 / 9.0));
  const auto fk = kernel_from_a_family(fam, w, group_distance(z));
  const auto i0 = w->require_index(Element{{0}});
  const auto i3 = w->require_index(Element{{3}});
  CHECK(fk.kernel.values(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(i3)) == doctest::Approx(0.7));
  // Def.-1 fails at eps = 0.2 for this family.
  CHECK_FALSE(verify_a_family(interval_family(*w, 9, 1, 0.2), *w, group_distance(z)).ok());
}

TEST_CASE("Folner box for Z and its kernel") {
  IntegerLattice z(1);
  const auto box = folner_box_for_Zn(1, 2, 0.5);
  CHECK(folner_ratio(z, box, 2) < folner_target(0.5));
  const auto w = z_ball(10);
  const auto km = folner_kernel(z, box, w);
  const auto n = static_cast<double>(box.size());
  for (std::size_t i = 0; i < w->size(); ++i) {
    for (std::size_t j = 0; j < w->size(); ++j) {
      const double d = w->dist(i, j);
      const double expect = std::max(0.0, n - d) / n;
      CHECK(km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == doctest::Approx(expect));
    }
  }
}

TEST_CASE("Folner boxes in Z^2") {
  IntegerLattice z2(2);
  const auto box = folner_box_for_Zn(2, 1, 0.5);
  CHECK(folner_ratio(z2, box, 1) < folner_target(0.5));
}

TEST_CASE("tree-ray sets and kernel on F_2") {
  FreeGroup f(2);
  const auto parent = free_group_ray_parent(f);
  const auto set = tree_ray_set(parent, f.identity(), 3);
  CHECK(set.size() == 4);
  CHECK(std::set<Element>(set.begin(), set.end()).size() == 4);
  CHECK_THROWS_AS(check_tree_ray_parameters(2, 1, 1), Error);
  CHECK_NOTHROW(check_tree_ray_parameters(2, 1, 5));
  const auto w = std::make_shared<const MetricWindow>(enumerate_ball(f, f.identity(), 4));
  const auto fk = tree_ray_kernel(parent, 5, w, 2, 1);
  // The symmetric difference is 2 max(d1, d2), d1 and d2 the distances to
  // the point where the two rays merge, so it is at most 2 d(g, g') and can
  // exceed d(g, g').
  std::size_t above_d = 0;
  for (std::size_t i = 0; i < w->size(); ++i) {
    const auto a = tree_ray_set(parent, w->point(i), 5);
    const std::set<Element> sa(a.begin(), a.end());
    for (std::size_t j = 0; j < w->size(); j += 5) {
      const auto b = tree_ray_set(parent, w->point(j), 5);
      std::size_t common = 0;
      for (const auto& x : b) common += sa.count(x);
      const double sym = static_cast<double>(2 * (6 - common));
      CHECK(sym <= 2 * w->dist(i, j));
      if (sym > w->dist(i, j)) ++above_d;
      CHECK(fk.kernel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            doctest::Approx(static_cast<double>(common) / 6.0));
    }
  }
  CHECK(above_d > 0);
  // e and b^-3 a^-1: rays merge at e, symmetric difference 8 at distance 4.
  const auto x = tree_ray_set(parent, f.identity(), 5);
  const auto y = tree_ray_set(parent, Element{{-2, -2, -2, -1}}, 5);
  const std::set<Element> sx(x.begin(), x.end());
  std::size_t common = 0;
  for (const auto& e : y) common += sx.count(e);
  CHECK(common == 2);
}

TEST_CASE("interval covers of Z") {
  const auto w = z_ball(60);
  const auto cover = interval_cover_for_Z(w, 5);
  CHECK_FALSE(cover.uncovered().has_value());
  const auto mask = interior_mask(*w, Element{{0}}, 40, group_distance(IntegerLattice(1)));
  CHECK(cover.multiplicity(&mask) == 2);
  CHECK(cover.lebesgue_number(&mask) >= 5);
  CHECK(cover.max_diameter() == 19);
  const auto fk = cover_kernel(cover);
  const auto direct = cover_kernel_direct(cover);
  CHECK((fk.kernel.values - direct).cwiseAbs().maxCoeff() < 1e-12);
  const double leb = cover.lebesgue_number(&mask);
  for (std::size_t x = 0; x < w->size(); ++x) {
    if (!mask[x]) continue;
    for (std::size_t y = 0; y < w->size(); ++y) {
      if (!mask[y]) continue;
      const double dev = std::abs(1 - fk.kernel.values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
      CHECK(dev <= cover_deviation_bound(1, w->dist(x, y), leb) + 1e-10);
    }
  }
}

TEST_CASE("cover with a whole-window element gives psi = 1") {
  const auto w = z_ball(3);
  std::vector<std::size_t> all(w->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Cover c(w, {all, {0, 1}});
  CHECK(std::isinf(c.lebesgue_number()));
  const auto fk = cover_kernel(c);
  CHECK((fk.kernel.values.array() - 1).abs().maxCoeff() < 1e-15);
}
