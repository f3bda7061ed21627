#include <doctest.h>

#include <cmath>

#include "ozawa/spaces.hpp"

using namespace ozawa;

namespace {

// |B(e, r)| in F_n: 1 + 2n((2n-1)^r - 1)/(2n-2).
std::size_t free_ball_size(int n, int r) {
  std::size_t k = 2 * static_cast<std::size_t>(n) - 1;
  std::size_t pow = 1;
  for (int i = 0; i < r; ++i) pow *= k;
  return 1 + 2 * static_cast<std::size_t>(n) * (pow - 1) / (k - 1);
}

// Affine image of a BS(p,q) word: a -> x * q/p, b -> x + 1 (a homomorphism).
std::pair<double, double> affine(const std::vector<int>& word, double p, double q) {
  double scale = 1;
  double shift = 0;
  for (int l : word) {
    double s = 1;
    double t = 0;
    if (l == 1) s = q / p;
    if (l == -1) s = p / q;
    if (l == 2) t = 1;
    if (l == -2) t = -1;
    // (scale, shift) o (s, t): x -> scale (s x + t) + shift
    shift += scale * t;
    scale *= s;
  }
  return {scale, shift};
}

}  // namespace

TEST_CASE("free group balls match the growth formula") {
  FreeGroup f(2);
  for (int r = 0; r <= 5; ++r) CHECK(ball_elements(f, f.identity(), r).size() == free_ball_size(2, r));
  FreeGroup f3(3);
  CHECK(ball_elements(f3, f3.identity(), 3).size() == free_ball_size(3, 3));
}

TEST_CASE("lattice balls and metric") {
  IntegerLattice z2(2);
  const auto w = enumerate_ball(z2, z2.identity(), 4);
  CHECK(w.size() == 41);  // 2r^2 + 2r + 1
  CHECK_FALSE(w.metric_violation().has_value());
  CHECK(w.diameter() == 8);
}

TEST_CASE("ball enumeration respects the cap") {
  FreeGroup f(2);
  CHECK_THROWS_AS(ball_elements(f, f.identity(), 8, 100), Error);
}

TEST_CASE("Gromov product on F_2 is the common prefix length") {
  FreeGroup f(2);
  const auto ball = ball_elements(f, f.identity(), 3);
  for (const auto& x : ball) {
    for (const auto& y : ball) {
      std::size_t c = 0;
      while (c < x.v.size() && c < y.v.size() && x.v[c] == y.v[c]) ++c;
      CHECK(gromov_product(f, x, y) == doctest::Approx(static_cast<double>(c)));
    }
  }
}

TEST_CASE("Baumslag-Solitar normal forms") {
  BaumslagSolitar bs12(1, 2);
  // a b a^-1 = b^2, so a b^2 a^-1 = b^4.
  CHECK(bs12.from_word({1, 2, 2, -1}) == bs12.b(4));
  CHECK(bs12.from_word({}) == bs12.identity());

  BaumslagSolitar bs(2, 3);
  CHECK(bs.from_word({1, 2, 2, -1, -2, -2, -2}) == bs.identity());
  // All words of length <= 4: equal normal forms give equal affine images,
  // and different affine images give different normal forms.
  std::vector<std::vector<int>> words{{}};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& w : words) {
      if (static_cast<int>(w.size()) != len - 1) continue;
      for (int l : {1, -1, 2, -2}) {
        auto v = w;
        v.push_back(l);
        next.push_back(v);
      }
    }
    words.insert(words.end(), next.begin(), next.end());
  }
  std::vector<Element> nf;
  std::vector<std::pair<double, double>> aff;
  for (const auto& w : words) {
    nf.push_back(bs.from_word(w));
    aff.push_back(affine(w, 2, 3));
  }
  std::size_t bad = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      const bool same_affine =
          std::abs(aff[i].first - aff[j].first) < 1e-12 && std::abs(aff[i].second - aff[j].second) < 1e-12;
      if (nf[i] == nf[j] && !same_affine) ++bad;
    }
  }
  CHECK(words.size() == 341);
  CHECK(bad == 0);
}

TEST_CASE("BS(2,3) products agree with word concatenation") {
  BaumslagSolitar bs(2, 3);
  const std::vector<std::vector<int>> ws{{1, 2}, {-2, -1, 2}, {2, 2, 1, -2}, {-1, -1, 2}};
  for (const auto& u : ws) {
    for (const auto& v : ws) {
      auto uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      CHECK(bs.multiply(bs.from_word(u), bs.from_word(v)) == bs.from_word(uv));
    }
    CHECK(bs.multiply(bs.from_word(u), bs.inverse(bs.from_word(u))) == bs.identity());
  }
}

TEST_CASE("window JSON round trip") {
  FreeGroup f(2);
  const auto w = enumerate_ball(f, f.identity(), 2);
  const auto back = window_from_json(window_to_json(w));
  CHECK(back.labels() == w.labels());
  CHECK((back.dist() - w.dist()).cwiseAbs().maxCoeff() == 0);
}
