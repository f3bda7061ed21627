#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ozawa/actions.hpp"
#include "ozawa/compression.hpp"
#include "ozawa/constructions.hpp"

namespace ozawa {

// ---------------------------------------------------------------------------
// Hyperbolic groups

struct HyperbolicCoverParams {
  double delta = 0;
  double R = 1;
  double epsilon = 1;
  std::int64_t N_delta = 0;  // 0 = measure by greedy covering
  std::optional<std::int64_t> L;  // default: ceil((2N+1)(4N+3)R/eps)
  bool generic = false;  // skip the free-group closed form
};

/// Greedy count of radius-R balls covering B(e, R + 6 delta), centers taken
/// from that ball in sorted order.
std::int64_t measure_covering_number(const Group& group, double R, double delta);

/// L from the covering number.
std::int64_t hyperbolic_L(std::int64_t N_delta, double R, double epsilon);

/// Maximal L-separated subset of the sphere of radius kL, chosen greedily in
/// sorted order.
std::vector<Element> greedy_sphere_net(const Group& group, std::int64_t radius, std::int64_t separation);

/// Same net for a free group without enumerating the sphere: one point per
/// class of words sharing a prefix of length ceil(radius - separation/2), the
/// least reduced extension of that prefix.
std::vector<Element> free_sphere_net(const FreeGroup& group, std::int64_t radius, std::int64_t separation);

struct HyperbolicCover {
  std::int64_t N_delta = 0;
  std::int64_t L = 0;
  double delta = 0;
  std::vector<std::size_t> net_sizes;  // per annulus k = 0, 1, ...
  Cover cover;
  std::size_t multiplicity = 0;
  double lebesgue = 0;
  bool multiplicity_ok = false;  // multiplicity <= 2 N_delta
  bool lebesgue_ok = false;      // Lebesgue number >= L

  bool ok() const { return multiplicity_ok && lebesgue_ok; }
};

/// U_ik = {g : kL <= |g| <= (k+1)L, (g | g_ik) >= (k - 1/2)L - delta} for
/// k = 0, 1, ..., clipped to the window after taking L-neighborhoods. The
/// window must be a ball around the identity of radius `window_radius`.
///
/// Generic path: enumerates the ball of radius window_radius + 2L, so it is
/// usable only for small L. Free groups with delta = 0 use the prefix form of
/// the Gromov product and closed-form distances to the cones.
HyperbolicCover build_hyperbolic_cover(const Group& group, const HyperbolicCoverParams& params, WindowPtr window,
                                       std::int64_t window_radius);

/// As build_hyperbolic_cover, throwing CoverViolation if multiplicity or the
/// Lebesgue number fails on the window.
Cover hyperbolic_cover(const Group& group, const HyperbolicCoverParams& params, WindowPtr window,
                       std::int64_t window_radius);

// ---------------------------------------------------------------------------
// CAT(0) cube complexes

/// Vertices and edges of a median graph, each edge labeled by its wall.
struct CubeComplexWindow {
  struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    std::int64_t wall = 0;
  };
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::size_t basepoint = 0;
  /// Factor index of each wall (all 0 for a single tree).
  std::map<std::int64_t, int> wall_factor;

  std::size_t size() const { return labels.size(); }
  std::vector<std::int64_t> walls() const;
};

/// Path graph on {lo, ..., hi}; wall of the edge (i, i+1) is i.
CubeComplexWindow path_complex(std::int64_t lo, std::int64_t hi, std::int64_t base = 0);
/// Ball of radius r in the Cayley tree of F_n; each edge is its own wall.
CubeComplexWindow tree_complex(int rank, std::int64_t radius);
/// Product of two complexes (vertices are pairs, walls of the factors kept
/// apart).
CubeComplexWindow product_complex(const CubeComplexWindow& a, const CubeComplexWindow& b);

/// Reads {"vertices": [...labels], "edges": [[u, v, wall], ...], "basepoint": i}.
CubeComplexWindow cube_complex_from_json(const std::string& text);

/// Path metric of the 1-skeleton; checks that every edge changes exactly one
/// wall and that walls are consistent with distances (median-graph sanity).
MetricWindow cube_metric_window(const CubeComplexWindow& ccw);

/// Normal cube path from the basepoint to s: at each step the cube spanned by
/// the walls adjacent to the current vertex that separate it from s.
std::vector<std::vector<std::int64_t>> normal_cube_path(const CubeComplexWindow& ccw, std::size_t s);

/// w_s(h) = i + 1 if h is a wall of the i-th cube (1-based), else 0.
std::map<std::int64_t, std::int64_t> cube_weights(const CubeComplexWindow& ccw, std::size_t s);

/// Closed-form weights for trees and products of trees: a wall at position j
/// (1-based) along the geodesic from the basepoint inside its factor gets
/// j + 1, positions ordered by the distance from the basepoint to the wall.
using WeightFn = std::function<std::map<std::int64_t, std::int64_t>(std::size_t s)>;
WeightFn closed_form_weights(const CubeComplexWindow& ccw);

struct CubeEmbedding {
  UniformEmbedding embedding;
  double alpha = 0;   // the paper's alpha: f(s) = sum_h w_s(h)^alpha delta_h
  double scale = 1;   // kappa, applied so that the lower bound holds on the window
  std::vector<std::int64_t> walls;  // coordinate order of f
};

/// f_alpha scaled by kappa = max(1, max_{d >= 1} d^{1/2+alpha} / ||f(s)-f(t)||);
/// C fitted as max ||kappa (f(s)-f(t))|| / d with D = 0, n0 = 1, and the
/// compression exponent 2 alpha. Throws EmbeddingInvalid if the bounds fail.
CubeEmbedding cube_embedding(const CubeComplexWindow& ccw, const MetricWindow& metric, double alpha,
                             const WeightFn& weights);
CubeEmbedding cube_embedding(const CubeComplexWindow& ccw, const MetricWindow& metric, double alpha);

/// Compression kernel of f_alpha on the vertex window.
CompressionResult cube_kernel(const CubeEmbedding& emb, double R, double epsilon, WindowPtr window,
                              const PlanOverrides& overrides = {});

// ---------------------------------------------------------------------------
// Baumslag-Solitar groups

/// Normal form of a word over {+-1 = a^+-1, +-2 = b^+-1}.
Element britton_normal_form(const BaumslagSolitar& bs, const std::vector<int>& word);

/// Vertices of the Bass-Serre tree whose neighbor count differs from p + q.
std::vector<Element> bs_tree_degree_defects(const BaumslagSolitar& bs, const std::vector<Element>& vertices);
/// Pairs (g, v) with g.(neighbors of v) != neighbors of g.v.
std::size_t bs_tree_equivariance_defects(const BaumslagSolitar& bs, const std::vector<Element>& elements,
                                         const std::vector<Element>& vertices);

struct BsGluingParams {
  std::int64_t p = 2;
  std::int64_t q = 3;
  double R = 1;
  double epsilon = 0.5;
  std::int64_t k = 2;  // ray length of lambda
  std::int64_t l = 1;  // window of mu on <b>
  std::int64_t window_radius = 4;
  GluingOverrides overrides;
};

struct BsGluing {
  std::shared_ptr<const BaumslagSolitar> group;
  WindowPtr window;
  std::shared_ptr<GluingScaffold> scaffold;
  GluingResult result;
};

/// lambda(v) = chi_{A_v}/sqrt(k+1), mu(z) = chi_{z B(e,l)}/sqrt(2l+1), then the
/// gluing kernel on the ball of radius window_radius.
BsGluing bs_gluing_kernel(const BsGluingParams& params);

}  // namespace ozawa
