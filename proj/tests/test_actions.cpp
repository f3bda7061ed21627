#include <doctest.h>

#include "ozawa/actions.hpp"

using namespace ozawa;

TEST_CASE("free group action on its tree") {
  auto f = std::make_shared<FreeGroup>(2);
  const auto act = free_group_on_tree(f);
  CHECK(act.free_action);
  CHECK(orbit_reach(act, 2) == 2);
  CHECK(orbit_ball(act, f->identity(), 2).size() == 17);
}

TEST_CASE("Bass-Serre tree of BS(2,3)") {
  auto bs = std::make_shared<BaumslagSolitar>(2, 3);
  const auto act = bs_on_bass_serre_tree(bs);
  CHECK_FALSE(act.free_action);
  CHECK(act.in_stabilizer(bs->b(7)));
  CHECK_FALSE(act.in_stabilizer(bs->a()));
  // 5-regular: B(v, 2) has 1 + 5 + 5*4 vertices.
  CHECK(orbit_ball(act, act.orbit(bs->identity()), 2).size() == 26);
  CHECK(orbit_reach(act, 1) == 1);
  const Element x0 = act.orbit(bs->identity());
  CHECK(bs_tree_parent(x0) == act.orbit(bs->a()));
  CHECK(act.orbit_distance(x0, bs_tree_parent(bs_tree_parent(x0))) == 2);
}

TEST_CASE("F_2 gluing with trivial stabilizer equals the pullback") {
  auto f = std::make_shared<FreeGroup>(2);
  const auto act = free_group_on_tree(f);
  GluingOverrides ov;
  ov.L = 6;
  ov.lambda_epsilon = 0.5;
  ov.mu_R = 1;
  ov.mu_epsilon = 0.5;
  const auto sched = make_schedule(act, 1, 0.5, 3, 0, ov);
  CHECK_FALSE(sched.conforming);
  CHECK(sched.L == 6);
  const auto win = std::make_shared<const MetricWindow>(enumerate_ball(*f, f->identity(), 2));
  GluingScaffold sc(act, free_tree_ray_features(*f, 3), trivial_stabilizer_features(), sched, win, 2, 4);
  const auto res = gluing_kernel(sc);
  const auto direct = gluing_kernel_direct(sc);
  CHECK((res.kernel.values - direct).cwiseAbs().maxCoeff() < 1e-12);
  const auto pb = orbit_pullback_kernel(act, free_tree_ray_features(*f, 3), 3, win, 2);
  CHECK((res.kernel.values - pb.result.kernel.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(pb.predicted_width == 6);
  const auto rep = check_scaffold(sc);
  CHECK(rep.max_alpha_defect < 1e-12);
  CHECK(rep.max_delta_defect < 1e-12);
  CHECK(rep.u_inside_x);
}

TEST_CASE("default schedule constants") {
  auto f = std::make_shared<FreeGroup>(2);
  const auto s = make_schedule(free_group_on_tree(f), 1, 0.5, 3, 0);
  CHECK(s.conforming);
  CHECK(s.L >= s.L_required);
  CHECK(s.L_required == doctest::Approx(48.0 * s.N * (2 * s.N + 1) / 0.25));
  CHECK(s.lambda_epsilon == doctest::Approx(0.25 / 8));
  CHECK(s.mu_epsilon == doctest::Approx(0.0625 / 512));
  CHECK(s.mu_R == doctest::Approx(2 * (s.L + 3)));
}

TEST_CASE("BS(2,3) gluing scaffold") {
  auto bs = std::make_shared<BaumslagSolitar>(2, 3);
  const auto act = bs_on_bass_serre_tree(bs);
  GluingOverrides ov;
  ov.L = 1;
  ov.lambda_epsilon = 0.5;
  ov.mu_R = 1;
  ov.mu_epsilon = 0.5;
  const double S1 = bs_stabilizer_support(*bs, 1);
  CHECK(S1 == 1);
  const auto sched = make_schedule(act, 1, 0.5, 2, S1, ov);
  const auto win = std::make_shared<const MetricWindow>(enumerate_ball(*bs, bs->identity(), 2));
  CHECK_THROWS_AS(GluingScaffold(act, bs_tree_ray_features(2), bs_stabilizer_features(1), sched, win, 2, 3), Error);
  GluingScaffold sc(act, bs_tree_ray_features(2), bs_stabilizer_features(1), sched, win, 2, 6);
  const auto res = gluing_kernel(sc);
  CHECK_FALSE(res.kappa.violation().has_value());
  const auto direct = gluing_kernel_direct(sc);
  CHECK((res.kernel.values - direct).cwiseAbs().maxCoeff() < 1e-12);
  const auto rep = check_scaffold(sc);
  CHECK(rep.max_alpha_defect < 1e-12);
  CHECK(rep.max_delta_defect < 1e-12);
  CHECK(rep.max_tau_reach <= 2 * (sched.S1 + sched.L) + 1e-12);
  const auto v = verify_kernel(res.kernel, 1, 0.5, sched.width());
  CHECK(v.pass_psd);
  CHECK(v.pass_width);
  // The stabilizer <b> is infinite, so the pullback is refused.
  CHECK_THROWS_AS(orbit_pullback_kernel(act, bs_tree_ray_features(2), 2, win, 2), Error);
}
