#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ozawa/kernels.hpp"

namespace ozawa {

using DistanceFn = std::function<double(const Element&, const Element&)>;

DistanceFn group_distance(const Group& group);
/// Distance between two points of the window (both must belong to it).
DistanceFn window_distance(const MetricWindow& window);

/// A finite subset of points x levels for every window point.
struct AFamily {
  using Entry = std::pair<Element, std::int64_t>;
  std::vector<std::vector<Entry>> sets;  // indexed like the window
  double R = 0;
  double epsilon = 0;
  double S = 0;
};

struct AFamilyCheck {
  std::size_t support_violations = 0;
  std::size_t symdiff_violations = 0;
  /// R-pairs with A_x and A_y disjoint. The symmetric-difference condition
  /// cannot hold for them, so they are reported separately.
  std::vector<std::pair<std::size_t, std::size_t>> disjoint_pairs;
  /// max |A_x \triangle A_y| / |A_x \cap A_y| over R-pairs with nonempty
  /// intersection.
  double max_ratio = 0;
  std::string first_violation;

  bool ok() const { return support_violations == 0 && symdiff_violations == 0 && disjoint_pairs.empty(); }
};

/// Exhaustive check of both conditions of the definition on all window pairs.
AFamilyCheck verify_a_family(const AFamily& fam, const MetricWindow& window, const DistanceFn& dist);

struct FeatureKernel {
  FeatureMap features;
  KernelMatrix kernel;
};

/// eta_x(z) = (#{n : (z,n) in A_x} / |A_x|)^{1/2}. Verifies the family first
/// and throws DegenerateFamily if the check fails or some A_x is empty.
FeatureKernel kernel_from_a_family(const AFamily& fam, WindowPtr window, const DistanceFn& dist);

/// Same feature map without the prior verification (for families that are
/// known not to satisfy the definition, e.g. diagnostics).
FeatureMap a_family_features(const AFamily& fam);

/// |gA cap g'A| / |A| by translating and intersecting.
KernelMatrix folner_kernel(const Group& group, const std::vector<Element>& folner_set, WindowPtr window);

/// A_g = (gA) x {1} for every window point.
AFamily folner_family(const Group& group, const std::vector<Element>& folner_set, const MetricWindow& window);

/// 2 eps / (4 + eps): the symmetric-difference ratio a Følner set must beat.
double folner_target(double epsilon);

/// Smallest box {0..m-1}^n with |gA triangle A|/|A| < 2eps/(4+eps) for all
/// |g|_1 <= R, found and re-checked by enumeration. Returns the elements of Z^n.
std::vector<Element> folner_box_for_Zn(int n, std::int64_t R, double epsilon);
/// max over |g|_1 <= R of |gA triangle A| / |A|.
double folner_ratio(const IntegerLattice& group, const std::vector<Element>& set, std::int64_t R);

/// Next vertex on the ray toward a fixed end of a tree.
using ParentFn = std::function<Element(const Element&)>;

/// Ray toward the end a, a^2, a^3, ... of the Cayley tree of a free group.
ParentFn free_group_ray_parent(const FreeGroup& group, std::int64_t letter = 1);

/// A_g = {g, parent(g), ..., parent^S(g)}.
std::vector<Element> tree_ray_set(const ParentFn& parent, const Element& g, std::int64_t S);

/// Requires S > R/2 and 2R/(2(S+1)-R) < eps/2; throws Parameter otherwise.
void check_tree_ray_parameters(double R, double epsilon, std::int64_t S);

/// psi = |A_g cap A_g'| / (S+1) with feature map chi_{A_g}/sqrt(S+1).
FeatureKernel tree_ray_kernel(const ParentFn& parent, std::int64_t S, WindowPtr window, double R, double epsilon);

/// Cover of a window by index subsets.
class Cover {
 public:
  Cover() = default;
  Cover(WindowPtr window, std::vector<std::vector<std::size_t>> sets);

  const MetricWindow& window() const { return *window_; }
  WindowPtr window_ptr() const { return window_; }
  std::size_t size() const { return sets_.size(); }
  const std::vector<std::size_t>& set(std::size_t i) const { return sets_[i]; }
  /// d(x, X \ U_i) inside the window; 0 if x is not in U_i, +inf if U_i is
  /// the whole window.
  double complement_distance(std::size_t x, std::size_t i) const;
  /// Cover elements containing x (sorted).
  const std::vector<std::size_t>& members(std::size_t x) const { return members_[x]; }

  std::size_t multiplicity(const PointMask* mask = nullptr) const;
  /// inf over (masked) points of max_i d(x, X \ U_i).
  double lebesgue_number(const PointMask* mask = nullptr) const;
  double max_diameter() const;
  /// First uncovered point, if any.
  std::optional<std::size_t> uncovered() const;

 private:
  WindowPtr window_;
  std::vector<std::vector<std::size_t>> sets_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<double>> comp_dist_;  // per point, aligned with members_
};

/// lambda(x)_i = (d(x,X\U_i) / sum_j d(x,X\U_j))^{1/2}; keys are cover indices.
/// Points with some infinite distance spread uniformly over those elements.
FeatureKernel cover_kernel(const Cover& cover);

/// The same kernel summed directly from the closed formula
/// sum_i sqrt(d_i(x) d_i(y)) / sqrt(sum_j d_j(x) sum_j d_j(y)).
Eigen::MatrixXd cover_kernel_direct(const Cover& cover);

/// (k+1)(2k+3) d / L, the deviation bound of the cover kernel.
double cover_deviation_bound(int k, double d, double lebesgue);

/// Intervals [2Lm, 2Lm + 4L - 1] meeting a window of Z (multiplicity 2,
/// Lebesgue number >= L, diameter 4L-1).
Cover interval_cover_for_Z(WindowPtr window, std::int64_t L);
/// Products of such intervals on a window of Z^2 (multiplicity 4).
Cover interval_cover_for_Z2(WindowPtr window, std::int64_t L);

/// Window points within `radius` of `center`.
PointMask interior_mask(const MetricWindow& window, const Element& center, double radius,
                        const DistanceFn& dist);

}  // namespace ozawa
