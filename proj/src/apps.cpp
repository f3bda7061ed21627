#include "ozawa/apps.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <json.hpp>

#include "ozawa/parallel.hpp"

namespace ozawa {

namespace {

constexpr std::size_t kNetCap = 5'000'000;
constexpr std::size_t kBallCap = 2'000'000;

std::int64_t common_prefix(const Element& a, const Element& b) {
  const std::size_t n = std::min(a.v.size(), b.v.size());
  std::size_t i = 0;
  while (i < n && a.v[i] == b.v[i]) ++i;
  return static_cast<std::int64_t>(i);
}

// Letters of F_n in sorted token order.
std::vector<std::int64_t> sorted_letters(int rank) {
  std::vector<std::int64_t> out;
  for (int l = -rank; l <= rank; ++l) {
    if (l != 0) out.push_back(l);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperbolic groups

std::int64_t measure_covering_number(const Group& group, double R, double delta) {
  const auto target = ball_elements(group, group.identity(), static_cast<std::int64_t>(std::floor(R + 6 * delta)),
                                    kBallCap);
  std::vector<bool> covered(target.size(), false);
  std::int64_t count = 0;
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (covered[c]) continue;
    ++count;
    for (std::size_t t = 0; t < target.size(); ++t) {
      if (!covered[t] && static_cast<double>(group.distance(target[c], target[t])) <= R) covered[t] = true;
    }
  }
  return count;
}

std::int64_t hyperbolic_L(std::int64_t N_delta, double R, double epsilon) {
  if (N_delta < 1 || !(R > 0) || !(epsilon > 0)) throw Error(ErrorKind::Parameter, "hyperbolic_L: bad parameters");
  const double n = static_cast<double>(N_delta);
  return static_cast<std::int64_t>(std::ceil((2 * n + 1) * (4 * n + 3) * R / epsilon));
}

std::vector<Element> greedy_sphere_net(const Group& group, std::int64_t radius, std::int64_t separation) {
  std::vector<Element> net;
  for (const auto& x : ball_elements(group, group.identity(), radius, kBallCap)) {
    if (group.length(x) != radius) continue;
    bool far = true;
    for (const auto& y : net) {
      if (group.distance(x, y) <= separation) {
        far = false;
        break;
      }
    }
    if (far) net.push_back(x);
  }
  return net;
}

std::vector<Element> free_sphere_net(const FreeGroup& group, std::int64_t radius, std::int64_t separation) {
  if (radius < 0 || separation < 0) throw Error(ErrorKind::Parameter, "free_sphere_net: negative argument");
  const auto letters = sorted_letters(group.rank());
  auto extend = [&](Element w) {
    while (static_cast<std::int64_t>(w.v.size()) < radius) {
      for (auto l : letters) {
        if (w.v.empty() || l != -w.v.back()) {
          w.v.push_back(l);
          break;
        }
      }
    }
    return w;
  };
  const auto prefix = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::ceil(static_cast<double>(radius) - static_cast<double>(separation) / 2)));
  std::vector<Element> net;
  // Depth-first over reduced prefixes in sorted order.
  std::vector<Element> stack{Element{}};
  while (!stack.empty()) {
    Element w = std::move(stack.back());
    stack.pop_back();
    if (static_cast<std::int64_t>(w.v.size()) == prefix) {
      net.push_back(extend(std::move(w)));
      if (net.size() > kNetCap) throw Error(ErrorKind::ResourceLimit, "sphere net exceeds the cap");
      continue;
    }
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
      if (!w.v.empty() && *it == -w.v.back()) continue;
      Element next = w;
      next.v.push_back(*it);
      stack.push_back(std::move(next));
    }
  }
  return net;
}

HyperbolicCover build_hyperbolic_cover(const Group& group, const HyperbolicCoverParams& params, WindowPtr window,
                                       std::int64_t window_radius) {
  HyperbolicCover out;
  out.delta = params.delta;
  out.N_delta = params.N_delta > 0 ? params.N_delta : measure_covering_number(group, params.R, params.delta);
  out.L = params.L.value_or(hyperbolic_L(out.N_delta, params.R, params.epsilon));
  const std::int64_t L = out.L;
  if (L < 1) throw Error(ErrorKind::Parameter, "hyperbolic cover needs L >= 1");
  const auto& w = *window;
  std::vector<std::int64_t> len(w.size());
  for (std::size_t x = 0; x < w.size(); ++x) {
    len[x] = group.length(w.point(x));
    if (len[x] > window_radius) throw Error(ErrorKind::Parameter, "window is not inside the ball of the given radius");
  }

  const auto* free = dynamic_cast<const FreeGroup*>(&group);
  const bool closed_form = free != nullptr && params.delta == 0 && !params.generic;
  std::vector<Element> ball;
  std::vector<std::int64_t> ball_len;
  if (!closed_form) {
    ball = ball_elements(group, group.identity(), window_radius + 2 * L, kBallCap);
    for (const auto& g : ball) ball_len.push_back(group.length(g));
  }

  std::vector<std::vector<std::size_t>> sets;
  // Annulus k can reach the window only if kL - L <= window_radius.
  for (std::int64_t k = 0; k * L - L <= window_radius; ++k) {
    const std::int64_t lo = k * L;
    const std::int64_t hi = (k + 1) * L;
    const double threshold = (static_cast<double>(k) - 0.5) * static_cast<double>(L) - params.delta;
    const auto net = closed_form ? free_sphere_net(*free, lo, L) : greedy_sphere_net(group, lo, L);
    out.net_sizes.push_back(net.size());
    std::vector<std::vector<std::size_t>> local(net.size());
    if (closed_form) {
      // Gromov products are common-prefix lengths, so U_ik is the cone of
      // words sharing at least Q letters with the net point.
      const auto Q = static_cast<std::int64_t>(std::ceil(threshold));
      parallel_for(net.size(), [&](std::size_t i) {
        for (std::size_t x = 0; x < w.size(); ++x) {
          const std::int64_t c = common_prefix(w.point(x), net[i]);
          std::int64_t d;
          if (c >= Q) {
            d = len[x] < lo ? lo - len[x] : (len[x] > hi ? len[x] - hi : 0);
          } else {
            d = len[x] + lo - 2 * c;
          }
          if (d <= L) local[i].push_back(x);
        }
      });
    } else {
      parallel_for(net.size(), [&](std::size_t i) {
        std::vector<const Element*> u;
        for (std::size_t b = 0; b < ball.size(); ++b) {
          if (ball_len[b] >= lo && ball_len[b] <= hi && gromov_product(group, ball[b], net[i]) >= threshold) {
            u.push_back(&ball[b]);
          }
        }
        for (std::size_t x = 0; x < w.size(); ++x) {
          for (const auto* g : u) {
            if (group.distance(w.point(x), *g) <= L) {
              local[i].push_back(x);
              break;
            }
          }
        }
      });
    }
    for (auto& s : local) {
      if (!s.empty()) sets.push_back(std::move(s));
    }
  }
  out.cover = Cover(window, std::move(sets));
  out.multiplicity = out.cover.multiplicity();
  out.lebesgue = out.cover.lebesgue_number();
  out.multiplicity_ok = static_cast<std::int64_t>(out.multiplicity) <= 2 * out.N_delta;
  out.lebesgue_ok = out.lebesgue >= static_cast<double>(L);
  return out;
}

Cover hyperbolic_cover(const Group& group, const HyperbolicCoverParams& params, WindowPtr window,
                       std::int64_t window_radius) {
  auto hc = build_hyperbolic_cover(group, params, std::move(window), window_radius);
  if (!hc.multiplicity_ok) {
    throw Error(ErrorKind::CoverViolation, "multiplicity " + std::to_string(hc.multiplicity) + " exceeds 2 N_delta = " +
                                               std::to_string(2 * hc.N_delta));
  }
  if (!hc.lebesgue_ok) {
    throw Error(ErrorKind::CoverViolation,
                "Lebesgue number " + format_double(hc.lebesgue) + " is below L = " + std::to_string(hc.L));
  }
  return std::move(hc.cover);
}

// ---------------------------------------------------------------------------
// CAT(0) cube complexes

std::vector<std::int64_t> CubeComplexWindow::walls() const {
  std::set<std::int64_t> s;
  for (const auto& e : edges) s.insert(e.wall);
  return {s.begin(), s.end()};
}

CubeComplexWindow path_complex(std::int64_t lo, std::int64_t hi, std::int64_t base) {
  if (lo > hi || base < lo || base > hi) throw Error(ErrorKind::Parameter, "path complex needs lo <= base <= hi");
  CubeComplexWindow c;
  for (std::int64_t i = lo; i <= hi; ++i) c.labels.push_back(std::to_string(i));
  for (std::int64_t i = lo; i < hi; ++i) {
    c.edges.push_back({static_cast<std::size_t>(i - lo), static_cast<std::size_t>(i + 1 - lo), i});
    c.wall_factor[i] = 0;
  }
  c.basepoint = static_cast<std::size_t>(base - lo);
  return c;
}

CubeComplexWindow tree_complex(int rank, std::int64_t radius) {
  FreeGroup f(rank);
  const auto ball = ball_elements(f, f.identity(), radius, kBallCap);
  CubeComplexWindow c;
  std::map<Element, std::size_t> index;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    index.emplace(ball[i], i);
    c.labels.push_back(f.format(ball[i]));
  }
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (ball[i].v.empty()) {
      c.basepoint = i;
      continue;
    }
    Element parent = ball[i];
    parent.v.pop_back();
    const auto wall = static_cast<std::int64_t>(i);
    c.edges.push_back({index.at(parent), i, wall});
    c.wall_factor[wall] = 0;
  }
  return c;
}

CubeComplexWindow product_complex(const CubeComplexWindow& a, const CubeComplexWindow& b) {
  CubeComplexWindow c;
  const std::size_t nb = b.size();
  for (const auto& la : a.labels) {
    for (const auto& lb : b.labels) c.labels.push_back("(" + la + "," + lb + ")");
  }
  // Walls of a become even ids, walls of b odd ids.
  int factors_a = 0;
  for (const auto& [wall, f] : a.wall_factor) factors_a = std::max(factors_a, f + 1);
  for (const auto& e : a.edges) {
    for (std::size_t j = 0; j < nb; ++j) c.edges.push_back({e.u * nb + j, e.v * nb + j, 2 * e.wall});
  }
  for (const auto& e : b.edges) {
    for (std::size_t i = 0; i < a.size(); ++i) c.edges.push_back({i * nb + e.u, i * nb + e.v, 2 * e.wall + 1});
  }
  for (const auto& [wall, f] : a.wall_factor) c.wall_factor[2 * wall] = f;
  for (const auto& [wall, f] : b.wall_factor) c.wall_factor[2 * wall + 1] = f + factors_a;
  c.basepoint = a.basepoint * nb + b.basepoint;
  return c;
}

CubeComplexWindow cube_complex_from_json(const std::string& text) {
  CubeComplexWindow c;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& l : doc.at("vertices")) c.labels.push_back(l.get<std::string>());
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw Error(ErrorKind::Schema, "edge must be [u, v, wall]");
      c.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<std::int64_t>()});
    }
    c.basepoint = doc.value("basepoint", std::size_t{0});
    if (doc.contains("wall_factor")) {
      for (const auto& [k, v] : doc.at("wall_factor").items()) c.wall_factor[std::stoll(k)] = v.get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("cube complex JSON: ") + e.what());
  }
  for (const auto& e : c.edges) {
    if (e.u >= c.size() || e.v >= c.size() || e.u == e.v) throw Error(ErrorKind::Schema, "edge endpoint out of range");
    c.wall_factor.emplace(e.wall, 0);
  }
  if (c.basepoint >= c.size()) throw Error(ErrorKind::Schema, "basepoint out of range");
  return c;
}

namespace {

struct Adjacency {
  // (neighbor, wall) per vertex.
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> out;
};

Adjacency adjacency(const CubeComplexWindow& ccw) {
  Adjacency a;
  a.out.resize(ccw.size());
  for (const auto& e : ccw.edges) {
    a.out[e.u].emplace_back(e.v, e.wall);
    a.out[e.v].emplace_back(e.u, e.wall);
  }
  for (auto& v : a.out) std::sort(v.begin(), v.end());
  return a;
}

// Walls separating each vertex from the basepoint (BFS tree), and distances.
struct Separation {
  std::vector<std::set<std::int64_t>> sep;
  std::vector<std::int64_t> dist;
};

Separation separation(const CubeComplexWindow& ccw, const Adjacency& adj) {
  const std::size_t n = ccw.size();
  Separation s;
  s.sep.resize(n);
  s.dist.assign(n, -1);
  std::deque<std::size_t> queue{ccw.basepoint};
  s.dist[ccw.basepoint] = 0;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (const auto& [y, wall] : adj.out[x]) {
      if (s.dist[y] >= 0) continue;
      s.dist[y] = s.dist[x] + 1;
      s.sep[y] = s.sep[x];
      if (!s.sep[y].insert(wall).second) {
        throw Error(ErrorKind::Parameter, "a geodesic crosses wall " + std::to_string(wall) + " twice");
      }
      queue.push_back(y);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (s.dist[x] < 0) throw Error(ErrorKind::Parameter, "cube complex is not connected");
  }
  return s;
}

std::size_t symmetric_difference_size(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b) {
  std::size_t common = 0;
  for (auto h : a) common += b.count(h);
  return a.size() + b.size() - 2 * common;
}

}  // namespace

MetricWindow cube_metric_window(const CubeComplexWindow& ccw) {
  const std::size_t n = ccw.size();
  const auto adj = adjacency(ccw);
  const auto sep = separation(ccw, adj);
  for (const auto& e : ccw.edges) {
    std::set<std::int64_t> diff;
    std::set_symmetric_difference(sep.sep[e.u].begin(), sep.sep[e.u].end(), sep.sep[e.v].begin(),
                                  sep.sep[e.v].end(), std::inserter(diff, diff.begin()));
    if (diff != std::set<std::int64_t>{e.wall}) {
      throw Error(ErrorKind::Parameter, "edge " + ccw.labels[e.u] + " - " + ccw.labels[e.v] +
                                            " does not cross exactly its own wall");
    }
  }
  Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t src) {
    std::vector<std::int64_t> d(n, -1);
    std::deque<std::size_t> queue{src};
    d[src] = 0;
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      for (const auto& [y, wall] : adj.out[x]) {
        if (d[y] < 0) {
          d[y] = d[x] + 1;
          queue.push_back(y);
        }
      }
    }
    for (std::size_t y = 0; y < n; ++y) dist(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(y)) = static_cast<double>(d[y]);
  });
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (static_cast<double>(symmetric_difference_size(sep.sep[x], sep.sep[y])) !=
          dist(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))) {
        throw Error(ErrorKind::Parameter, "path distance differs from the number of separating walls at " +
                                              ccw.labels[x] + ", " + ccw.labels[y]);
      }
    }
  }
  std::vector<Element> points;
  for (std::size_t i = 0; i < n; ++i) points.push_back(Element{{static_cast<std::int64_t>(i)}});
  return MetricWindow(std::move(points), ccw.labels, std::move(dist));
}

std::vector<std::vector<std::int64_t>> normal_cube_path(const CubeComplexWindow& ccw, std::size_t s) {
  if (s >= ccw.size()) throw Error(ErrorKind::Parameter, "vertex out of range");
  const auto adj = adjacency(ccw);
  const auto sep = separation(ccw, adj);
  std::vector<std::vector<std::int64_t>> cubes;
  std::size_t cur = ccw.basepoint;
  while (cur != s) {
    // Walls at cur separating cur from s.
    std::vector<std::int64_t> cube;
    for (const auto& [y, wall] : adj.out[cur]) {
      if ((sep.sep[cur].count(wall) > 0) != (sep.sep[s].count(wall) > 0)) cube.push_back(wall);
    }
    std::sort(cube.begin(), cube.end());
    cube.erase(std::unique(cube.begin(), cube.end()), cube.end());
    if (cube.empty()) throw Error(ErrorKind::Parameter, "no separating wall at the current vertex");
    for (auto wall : cube) {
      auto it = std::find_if(adj.out[cur].begin(), adj.out[cur].end(),
                             [&](const auto& p) { return p.second == wall; });
      if (it == adj.out[cur].end()) {
        throw Error(ErrorKind::Parameter, "walls at " + ccw.labels[cur] + " do not span a cube in the window");
      }
      cur = it->first;
    }
    cubes.push_back(std::move(cube));
  }
  return cubes;
}

std::map<std::int64_t, std::int64_t> cube_weights(const CubeComplexWindow& ccw, std::size_t s) {
  std::map<std::int64_t, std::int64_t> w;
  const auto path = normal_cube_path(ccw, s);
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (auto h : path[i]) {
      if (!w.emplace(h, static_cast<std::int64_t>(i) + 2).second) {
        throw Error(ErrorKind::Parameter, "normal cube path crosses wall " + std::to_string(h) + " twice");
      }
    }
  }
  return w;
}

WeightFn closed_form_weights(const CubeComplexWindow& ccw) {
  const auto adj = adjacency(ccw);
  auto sep = std::make_shared<Separation>(separation(ccw, adj));
  // Distance from the basepoint to the near side of each wall.
  auto near = std::make_shared<std::map<std::int64_t, std::int64_t>>();
  for (const auto& e : ccw.edges) {
    const auto d = std::min(sep->dist[e.u], sep->dist[e.v]);
    auto it = near->find(e.wall);
    if (it == near->end() || d < it->second) (*near)[e.wall] = d;
  }
  auto factor = ccw.wall_factor;
  return [sep, near, factor](std::size_t s) {
    std::map<std::int64_t, std::int64_t> w;
    const auto& walls = sep->sep.at(s);
    for (auto h : walls) {
      std::int64_t position = 1;
      for (auto g : walls) {
        if (g != h && factor.at(g) == factor.at(h) && near->at(g) < near->at(h)) ++position;
      }
      w[h] = position + 1;
    }
    return w;
  };
}

CubeEmbedding cube_embedding(const CubeComplexWindow& ccw, const MetricWindow& metric, double alpha,
                             const WeightFn& weights) {
  if (!(alpha > 0 && alpha < 0.5)) throw Error(ErrorKind::Parameter, "cube embedding needs 0 < alpha < 1/2");
  const std::size_t n = ccw.size();
  if (metric.size() != n) throw Error(ErrorKind::Parameter, "metric window does not match the complex");
  CubeEmbedding out;
  out.alpha = alpha;
  out.walls = ccw.walls();
  std::map<std::int64_t, Eigen::Index> coord;
  for (std::size_t i = 0; i < out.walls.size(); ++i) coord[out.walls[i]] = static_cast<Eigen::Index>(i);
  std::vector<Eigen::VectorXd> f(n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.walls.size())));
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& [h, ws] : weights(s)) f[s](coord.at(h)) = std::pow(static_cast<double>(ws), alpha);
  }
  double kappa = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = metric.dist(i, j);
      const double df = (f[i] - f[j]).norm();
      if (d >= 1) kappa = std::max(kappa, std::pow(d, 0.5 + alpha) / df);
    }
  }
  double C = 0;
  for (auto& v : f) v *= kappa;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) C = std::max(C, (f[i] - f[j]).norm() / metric.dist(i, j));
  }
  out.scale = kappa;
  out.embedding.f = std::move(f);
  out.embedding.C = C;
  out.embedding.D = 0;
  out.embedding.alpha = 2 * alpha;
  out.embedding.n0 = 1;
  if (auto v = embedding_violation(out.embedding, metric)) throw Error(ErrorKind::EmbeddingInvalid, *v);
  return out;
}

CubeEmbedding cube_embedding(const CubeComplexWindow& ccw, const MetricWindow& metric, double alpha) {
  return cube_embedding(ccw, metric, alpha, [&ccw](std::size_t s) { return cube_weights(ccw, s); });
}

CompressionResult cube_kernel(const CubeEmbedding& emb, double R, double epsilon, WindowPtr window,
                              const PlanOverrides& overrides) {
  return run_compression(emb.embedding, R, epsilon, std::move(window), overrides);
}

// ---------------------------------------------------------------------------
// Baumslag-Solitar groups

Element britton_normal_form(const BaumslagSolitar& bs, const std::vector<int>& word) { return bs.from_word(word); }

std::vector<Element> bs_tree_degree_defects(const BaumslagSolitar& bs, const std::vector<Element>& vertices) {
  auto group = std::make_shared<BaumslagSolitar>(bs.p(), bs.q());
  const auto act = bs_on_bass_serre_tree(group);
  std::vector<Element> bad;
  for (const auto& v : vertices) {
    const auto nb = act.orbit_neighbors(v);
    const std::set<Element> distinct(nb.begin(), nb.end());
    bool ok = static_cast<std::int64_t>(distinct.size()) == bs.p() + bs.q();
    for (const auto& w : distinct) {
      ok = ok && act.orbit_distance(v, w) == 1;
      const auto back = act.orbit_neighbors(w);
      ok = ok && std::find(back.begin(), back.end(), v) != back.end();
    }
    if (!ok) bad.push_back(v);
  }
  return bad;
}

std::size_t bs_tree_equivariance_defects(const BaumslagSolitar& bs, const std::vector<Element>& elements,
                                         const std::vector<Element>& vertices) {
  auto group = std::make_shared<BaumslagSolitar>(bs.p(), bs.q());
  const auto act = bs_on_bass_serre_tree(group);
  std::size_t bad = 0;
  for (const auto& g : elements) {
    for (const auto& v : vertices) {
      std::set<Element> moved;
      for (const auto& w : act.orbit_neighbors(v)) moved.insert(BaumslagSolitar::coset_rep(bs.multiply(g, w)));
      const auto gv = BaumslagSolitar::coset_rep(bs.multiply(g, v));
      const auto nb = act.orbit_neighbors(gv);
      if (moved != std::set<Element>(nb.begin(), nb.end())) ++bad;
    }
  }
  return bad;
}

BsGluing bs_gluing_kernel(const BsGluingParams& params) {
  if (params.p < 1 || params.q < 1) throw Error(ErrorKind::Parameter, "BS(p,q) needs p, q >= 1");
  if (params.k < 0 || params.l < 0 || params.window_radius < 0) {
    throw Error(ErrorKind::Parameter, "k, l and the window radius must be >= 0");
  }
  BsGluing out;
  out.group = std::make_shared<BaumslagSolitar>(params.p, params.q);
  const auto act = bs_on_bass_serre_tree(out.group);
  const double S1 = bs_stabilizer_support(*out.group, params.l);
  const auto sched = make_schedule(act, params.R, params.epsilon, static_cast<double>(params.k), S1, params.overrides);
  const auto needed = static_cast<double>(params.window_radius) + 2 * (S1 + sched.L);
  const std::int64_t universe = params.overrides.universe_radius.value_or(static_cast<std::int64_t>(std::ceil(needed)));
  if (universe > 24) {
    throw Error(ErrorKind::PlanInfeasible, "gluing needs a universe ball of radius " + std::to_string(universe) +
                                               " (L = " + format_double(sched.L) + "); reduce the schedule");
  }
  out.window = std::make_shared<const MetricWindow>(
      enumerate_ball(*out.group, out.group->identity(), params.window_radius));
  out.scaffold = std::make_shared<GluingScaffold>(act, bs_tree_ray_features(params.k),
                                                  bs_stabilizer_features(params.l), sched, out.window,
                                                  params.window_radius, universe);
  out.result = gluing_kernel(*out.scaffold);
  return out;
}

}  // namespace ozawa
