#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ozawa/constructions.hpp"

namespace ozawa {

/// An isometric action of a group on a discrete space, seen through the
/// orbit of a basepoint x0. Orbit points are tokens; two group elements have
/// the same orbit point iff they lie in the same coset of the stabilizer G0.
struct GroupAction {
  GroupPtr group;
  /// g -> g.x0
  std::function<Element(const Element&)> orbit;
  /// d_X between orbit points.
  std::function<double(const Element&, const Element&)> orbit_distance;
  /// Orbit points adjacent to a given one (used to count balls of the orbit).
  std::function<std::vector<Element>(const Element&)> orbit_neighbors;
  /// Canonical representative of the coset g G0.
  std::function<Element(const Element&)> coset_rep;
  std::function<bool(const Element&)> in_stabilizer;
  /// Trivial stabilizer: the orbit point of g is g itself.
  bool free_action = false;
  std::string name;
};

/// F_n acting on its Cayley tree (free and transitive, trivial stabilizer).
GroupAction free_group_on_tree(std::shared_ptr<const FreeGroup> group);
/// BS(p,q) acting on its Bass-Serre tree; x0 = <b>, G0 = <b>.
GroupAction bs_on_bass_serre_tree(std::shared_ptr<const BaumslagSolitar> group);

/// Orbit points within `radius` of `center` (breadth-first search over
/// orbit_neighbors), sorted.
std::vector<Element> orbit_ball(const GroupAction& action, const Element& center, std::int64_t radius);

/// K(R) = max over |g| <= R of d_X(x0, g x0).
double orbit_reach(const GroupAction& action, std::int64_t R);

/// Feature map on orbit points; keys are orbit points.
using OrbitFeatures = std::function<SparseVector(const Element&)>;
/// Feature map on the stabilizer; keys are stabilizer elements.
using StabilizerFeatures = std::function<SparseVector(const Element&)>;

/// psi(g, g') = <lambda(g x0), lambda(g' x0)>. Requires a finite stabilizer
/// (checked on the ball of radius 2 * window_radius; growth means infinite).
/// Returns the kernel and the predicted width: the diameter of the union of
/// cosets g_i G0 with d_X(x0, g_i x0) <= S0.
struct PullbackResult {
  FeatureKernel result;
  double predicted_width = 0;
};
PullbackResult orbit_pullback_kernel(const GroupAction& action, const OrbitFeatures& lambda, double S0,
                                     WindowPtr window, std::int64_t window_radius);

/// Schedule constants of the gluing construction.
struct GluingSchedule {
  double R = 1;
  double epsilon = 0.5;
  double S0 = 0;  // support radius of lambda on the orbit
  double S1 = 0;  // support radius of mu in G
  std::int64_t N = 0;
  double K = 0;  // K(R)
  double L = 0;
  double L_required = 0;        // 48 N (2N+1) R / eps^2
  double lambda_epsilon = 0;    // eps^2 / 8 unless overridden
  double mu_R = 0;              // 2(L + 3R) unless overridden
  double mu_epsilon = 0;        // eps^4 / 512 unless overridden
  bool conforming = true;

  double R1() const { return 3 * R; }
  double epsilon1() const { return epsilon * epsilon / 4; }
  double width() const { return 4 * (S1 + L) + 2 * R; }
};

struct GluingOverrides {
  std::optional<double> L;
  std::optional<double> lambda_epsilon;
  std::optional<double> mu_R;
  std::optional<double> mu_epsilon;
  /// Radius of the group ball that every set is clipped to; defaults to
  /// window_radius + 2 (S1 + L).
  std::optional<std::int64_t> universe_radius;
};

/// Fills in the schedule from the paper's formulas, applying overrides (which
/// mark the run non-conforming).
GluingSchedule make_schedule(const GroupAction& action, double R, double epsilon, double S0, double S1,
                             const GluingOverrides& overrides = {});

/// All intermediate data of the gluing construction for one evaluation window.
///
/// The sum over g in G is indexed by orbit points y = g x0: every quantity
/// attached to g depends on g only through g x0 once the transporter of each
/// coset X_g^i is fixed to its canonical representative. Sets that are
/// infinite (cosets of an infinite stabilizer) are clipped to a finite group
/// ball, the universe.
class GluingScaffold {
 public:
  GluingScaffold(GroupAction action, OrbitFeatures lambda, StabilizerFeatures mu, GluingSchedule schedule,
                 WindowPtr window, std::int64_t window_radius, std::int64_t universe_radius);

  const GluingSchedule& schedule() const { return schedule_; }
  const GroupAction& action() const { return action_; }
  const MetricWindow& window() const { return *window_; }
  WindowPtr window_ptr() const { return window_; }
  std::int64_t universe_radius() const { return universe_radius_; }
  std::size_t universe_size() const { return universe_.size(); }
  const std::vector<Element>& universe() const { return universe_; }
  SparseVector mu_at(const Element& z) const { return mu_(z); }

  /// Orbit points y in supp lambda(g x0), with weights lambda(g x0)(y).
  SparseVector lambda_at(const Element& g) const;
  /// alpha_y(g) = lambda(g x0)(y)^2.
  double alpha(const Element& y, const Element& g) const;
  /// g in U_y, i.e. y in supp lambda(g x0).
  bool in_u(const Element& y, const Element& g) const;
  /// g in X_y: d_X(g x0, y) <= S0 (and g in the universe).
  bool in_x(const Element& y, const Element& g) const;
  bool in_universe(const Element& g) const;

  /// Cosets (as orbit points) of X_y within distance L of u.
  std::vector<Element> cosets_near(const Element& y, const Element& u) const;
  /// delta_y^i(u) for every coset i of X_y with a nonzero value.
  std::vector<std::pair<Element, double>> delta(const Element& y, const Element& u) const;
  /// d_G(u, X_y \ X_y^i(L)), +inf if the clipped complement is empty.
  double complement_distance(const Element& y, const Element& coset, const Element& u) const;
  /// Nearest point of the coset (within the universe) to z; lexicographic ties.
  Element p(const Element& coset, const Element& z) const;
  /// Nearest point of U_y (within the universe) to x; lexicographic ties.
  Element q(const Element& y, const Element& x) const;
  /// Nearest point of U_y to x, if within R.
  std::optional<Element> r(const Element& y, const Element& x) const;

  /// sigma_y(u) keyed by pair_key(coset, x).
  SparseVector sigma(const Element& y, const Element& u) const;
  /// Squared weights of tau_y(u): w -> sum_{(i,x): q(x) = w} sigma_y(u)(i,x)^2.
  std::map<Element, double> tau_squared(const Element& y, const Element& u) const;
  /// tau_y(u) keyed by points of U_y.
  SparseVector tau(const Element& y, const Element& u) const;
  /// nu_y(g) = tau_y(r_y(g)) on U_y(R), zero elsewhere.
  SparseVector nu(const Element& y, const Element& g) const;
  /// kappa(g)(y, w) = alpha_y(g)^{1/2} nu_y(g)(w), keyed by pair_key(y, w).
  SparseVector kappa(const Element& g) const;
  /// zeta_y(u, u') from the squared tau weights.
  double zeta(const Element& y, const Element& u1, const Element& u2) const;

  double dist(const Element& a, const Element& b) const;

 private:
  // (distance from u, universe index), sorted by distance then token.
  using DistanceList = std::vector<std::pair<std::int64_t, std::uint32_t>>;
  const DistanceList& universe_by_distance(const Element& u) const;
  DistanceList sort_universe(const Element& u) const;
  bool in_neighborhood(const Element& coset, const Element& x) const;
  // Coset ids of universe points within S0 of y on the orbit.
  const std::vector<char>& x_mask(const Element& y) const;
  bool in_x_index(const std::vector<char>& mask, std::uint32_t i) const { return mask[coset_of_[i]] != 0; }
  template <class Pred>
  std::optional<Element> nearest(const Element& z, std::int64_t max_radius, Pred pred) const;

  GroupAction action_;
  OrbitFeatures lambda_;
  StabilizerFeatures mu_;
  GluingSchedule schedule_;
  WindowPtr window_;
  std::int64_t universe_radius_;
  std::vector<Element> universe_;
  std::unordered_map<Element, std::size_t, ElementHash> universe_index_;
  std::vector<std::uint32_t> coset_of_;  // universe index -> coset id
  std::vector<Element> cosets_;          // coset id -> orbit point
  std::vector<std::vector<Element>> spheres_;  // spheres around the identity
  mutable std::mutex cache_mutex_;
  mutable std::map<Element, DistanceList> sorted_universe_;
  mutable std::map<Element, std::vector<char>> x_masks_;
};

struct GluingResult {
  FeatureMap kappa;
  KernelMatrix kernel;
};

/// psi(g1, g2) = <kappa(g1), kappa(g2)> over the scaffold window.
GluingResult gluing_kernel(const GluingScaffold& scaffold);

/// The double-sum formula evaluated directly:
/// sum_y chi chi lambda(g1 x0)(y) lambda(g2 x0)(y) zeta_y(r_y(g1), r_y(g2)).
Eigen::MatrixXd gluing_kernel_direct(const GluingScaffold& scaffold);

struct ScaffoldReport {
  double max_alpha_defect = 0;     // max |sum_y alpha_y(g) - 1|
  double max_delta_defect = 0;     // max |sum_i delta^i(u) - 1|
  double max_alpha_variation = 0;  // max over R-pairs of sum_y |alpha_y(g1) - alpha_y(g2)|
  double max_sigma_variation = 0;  // max over R1-pairs of ||sigma(z1) - sigma(z2)||^2
  double max_tau_reach = 0;        // max d(u, w) over w in supp tau_y(u)
  double max_nu_reach = 0;         // max d(g, w) over w in supp nu_y(g)
  bool u_inside_x = true;          // U_y within X_y on all sampled points
  double lambda_deviation = 0;     // max |1 - phi_0| over K(R)-pairs of orbit points
  double mu_deviation = 0;         // max |1 - psi_0| over mu_R-pairs of stabilizer points
};

/// Invariant checks over the window (all R-pairs and R1-pairs inside it).
ScaffoldReport check_scaffold(const GluingScaffold& scaffold);

/// Tree-ray feature map on the Bass-Serre tree: chi_{A_v} / sqrt(k+1) with A_v
/// the first k+1 vertices of the ray from v toward the end <b>, a<b>, a^2<b>, ...
OrbitFeatures bs_tree_ray_features(std::int64_t k);
/// Next vertex toward that end.
Element bs_tree_parent(const Element& coset);
/// Window indicator on <b>: mu(b^m) = chi_{b^{m-l} .. b^{m+l}} / sqrt(2l+1).
StabilizerFeatures bs_stabilizer_features(std::int64_t l);
/// max over |i| <= l of |b^i|_G.
double bs_stabilizer_support(const BaumslagSolitar& group, std::int64_t l);

/// Tree-ray features on the Cayley tree of a free group (end a, a^2, ...).
OrbitFeatures free_tree_ray_features(const FreeGroup& group, std::int64_t S);
/// mu(e) = delta_e on the trivial stabilizer.
StabilizerFeatures trivial_stabilizer_features();

}  // namespace ozawa
