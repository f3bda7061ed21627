#include <doctest.h>

#include <algorithm>

#include "ozawa/apps.hpp"

using namespace ozawa;

namespace {

std::vector<std::vector<std::size_t>> sorted_sets(const Cover& c) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto s = c.set(i);
    std::sort(s.begin(), s.end());
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("free sphere net matches the greedy net") {
  FreeGroup f(2);
  for (std::int64_t r : {2, 3, 4}) {
    for (std::int64_t sep : {1, 2, 3}) {
      CHECK(free_sphere_net(f, r, sep) == greedy_sphere_net(f, r, sep));
    }
  }
}

TEST_CASE("covering number and L on F_2") {
  FreeGroup f(2);
  CHECK(measure_covering_number(f, 1, 0) == 1);
  CHECK(hyperbolic_L(1, 1, 1) == 21);
  CHECK(hyperbolic_L(2, 1, 0.5) == 110);
}

TEST_CASE("closed-form hyperbolic cover equals the generic path") {
  FreeGroup f(2);
  for (std::int64_t L : {1, 2}) {
    for (std::int64_t wr : {3, 4}) {
      auto win = std::make_shared<const MetricWindow>(enumerate_ball(f, f.identity(), wr));
      HyperbolicCoverParams p;
      p.N_delta = 1;
      p.L = L;
      const auto fast = build_hyperbolic_cover(f, p, win, wr);
      p.generic = true;
      const auto slow = build_hyperbolic_cover(f, p, win, wr);
      CHECK(sorted_sets(fast.cover) == sorted_sets(slow.cover));
      CHECK(fast.multiplicity == slow.multiplicity);
      CHECK(fast.net_sizes == slow.net_sizes);
    }
  }
}

TEST_CASE("hyperbolic cover multiplicity on F_2 at R = 1, eps = 1") {
  FreeGroup f(2);
  auto win = std::make_shared<const MetricWindow>(enumerate_ball(f, f.identity(), 5));
  HyperbolicCoverParams p;
  p.R = 1;
  p.epsilon = 1;
  const auto hc = build_hyperbolic_cover(f, p, win, 5);
  CHECK(hc.N_delta == 1);
  CHECK(hc.L == 21);
  CHECK(hc.multiplicity == 236197);
  CHECK_FALSE(hc.multiplicity_ok);
  CHECK(hc.lebesgue_ok);
  CHECK_THROWS_AS(hyperbolic_cover(f, p, win, 5), Error);
}

TEST_CASE("normal cube path on a line") {
  const auto ccw = path_complex(-20, 20);
  const std::size_t s = 23;
  REQUIRE(ccw.labels[s] == "3");
  const auto path = normal_cube_path(ccw, s);
  REQUIRE(path.size() == 3);
  const auto w = cube_weights(ccw, s);
  CHECK(w == std::map<std::int64_t, std::int64_t>{{0, 2}, {1, 3}, {2, 4}});
  CHECK(cube_weights(ccw, 20).empty());
}

TEST_CASE("closed-form weights on a product of trees") {
  const auto ccw = product_complex(tree_complex(2, 2), tree_complex(2, 2));
  REQUIRE(ccw.size() == 289);
  const auto cf = closed_form_weights(ccw);
  std::size_t bad = 0;
  for (std::size_t s = 0; s < ccw.size(); ++s) bad += cube_weights(ccw, s) != cf(s);
  CHECK(bad == 0);
  const auto m = cube_metric_window(ccw);
  CHECK(m.diameter() == 8);
}

TEST_CASE("cube embedding bounds and kernel") {
  const auto ccw = path_complex(-20, 20);
  auto win = std::make_shared<const MetricWindow>(cube_metric_window(ccw));
  const auto emb = cube_embedding(ccw, *win, 0.25);
  CHECK(emb.scale >= 1);
  CHECK(emb.embedding.alpha == 0.5);
  CHECK_FALSE(embedding_violation(emb.embedding, *win).has_value());
  const auto alt = cube_embedding(ccw, *win, 0.25, closed_form_weights(ccw));
  const auto a = cube_kernel(emb, 1, 0.5, win);
  const auto b = run_compression(alt.embedding, 1, 0.5, win);
  CHECK((a.psi.values - b.psi.values).cwiseAbs().maxCoeff() < 1e-12);
  const auto rep = verify_kernel(a.psi, 1, 0.5, a.plan.width());
  CHECK(rep.pass());
  CHECK_THROWS_AS(cube_embedding(ccw, *win, 0.5), Error);
}

TEST_CASE("cube complex from JSON") {
  const auto ccw = cube_complex_from_json(
      R"({"vertices": ["00", "10", "01", "11"], "edges": [[0, 1, 0], [2, 3, 0], [0, 2, 1], [1, 3, 1]], "basepoint": 0})");
  const auto m = cube_metric_window(ccw);
  CHECK(m.dist(0, 3) == 2);
  CHECK(normal_cube_path(ccw, 3).size() == 1);
  CHECK(cube_weights(ccw, 3) == std::map<std::int64_t, std::int64_t>{{0, 2}, {1, 2}});
  CHECK_THROWS_AS(cube_complex_from_json(R"({"vertices": ["a"], "edges": [[0, 3, 0]]})"), Error);
}

TEST_CASE("Bass-Serre tree is regular and equivariant") {
  auto bs = std::make_shared<BaumslagSolitar>(2, 3);
  const auto act = bs_on_bass_serre_tree(bs);
  const auto verts = orbit_ball(act, act.orbit(bs->identity()), 2);
  CHECK(bs_tree_degree_defects(*bs, verts).empty());
  const auto elems = enumerate_ball(*bs, bs->identity(), 2).points();
  CHECK(bs_tree_equivariance_defects(*bs, elems, verts) == 0);
  CHECK(britton_normal_form(*bs, {1, 2, 2, -1, 1, -2, -2, -1}) == bs->identity());
}

TEST_CASE("BS(1,1) gluing passes the kernel suite") {
  BsGluingParams p;
  p.p = 1;
  p.q = 1;
  p.k = 4;
  p.l = 2;
  p.window_radius = 3;
  p.overrides.L = 2;
  p.overrides.lambda_epsilon = 0.5;
  p.overrides.mu_R = 1;
  p.overrides.mu_epsilon = 0.5;
  const auto g = bs_gluing_kernel(p);
  const auto& sched = g.scaffold->schedule();
  const auto rep = verify_kernel(g.result.kernel, 1, 0.5, sched.width());
  CHECK(rep.pass_psd);
  CHECK(rep.pass_unity);
  CHECK(rep.pass_width);
  const auto direct = gluing_kernel_direct(*g.scaffold);
  CHECK((g.result.kernel.values - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("BS gluing with the default schedule is infeasible") {
  BsGluingParams p;
  CHECK_THROWS_AS(bs_gluing_kernel(p), Error);
  try {
    bs_gluing_kernel(p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlanInfeasible);
  }
}
