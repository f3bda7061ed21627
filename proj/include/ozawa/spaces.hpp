#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ozawa/group.hpp"

namespace ozawa {

/// Default point cap for enumerated windows; OZAWA_MAX_WINDOW overrides it.
std::size_t window_cap();

/// A finite point sample with its full distance matrix. Points are opaque
/// Element tokens; labels are their printed forms.
class MetricWindow {
 public:
  MetricWindow() = default;
  MetricWindow(std::vector<Element> points, std::vector<std::string> labels, Eigen::MatrixXd dist);

  std::size_t size() const { return points_.size(); }
  const std::vector<Element>& points() const { return points_; }
  const Element& point(std::size_t i) const { return points_[i]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& dist() const { return dist_; }
  double dist(std::size_t i, std::size_t j) const { return dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }
  double diameter() const;

  std::optional<std::size_t> index_of(const Element& e) const;
  std::size_t require_index(const Element& e) const;

  /// Symmetry, zero diagonal, nonnegativity and every triangle inequality.
  /// Returns a description of the first violation, or nullopt.
  std::optional<std::string> metric_violation(double tol = 1e-9) const;

 private:
  std::vector<Element> points_;
  std::vector<std::string> labels_;
  Eigen::MatrixXd dist_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

using WindowPtr = std::shared_ptr<const MetricWindow>;

/// Elements of a group ball {g : d(center, g) <= radius}, sorted.
std::vector<Element> ball_elements(const Group& group, const Element& center, std::int64_t radius,
                                   std::size_t cap = window_cap());

/// Ball window with word-metric distances.
MetricWindow enumerate_ball(const Group& group, const Element& center, std::int64_t radius,
                            std::size_t cap = window_cap());

/// Window on an explicit element list (sorted and deduplicated) with the
/// group's word metric.
MetricWindow group_window(const Group& group, std::vector<Element> elements);

struct QuasiGeodesicParams {
  double delta = 1.0;
  double lambda = 1.0;
};

/// Hop-count metric of the delta-proximity graph.
MetricWindow integerize_metric(const MetricWindow& window, const QuasiGeodesicParams& params);

struct GrowthConstants {
  double B = 1.0;
  double L = 1.0;
};

/// Constants with |B(x,R)| <= B L^R for every basepoint and realized radius.
GrowthConstants growth_constants(const MetricWindow& window, const std::vector<std::size_t>& basepoints);

/// (|g1| + |g2| - d(g1,g2)) / 2; always a half-integer for word metrics.
double gromov_product(const Group& group, const Element& g1, const Element& g2);

/// {points, dist} JSON document.
std::string window_to_json(const MetricWindow& window);
MetricWindow window_from_json(const std::string& text);

}  // namespace ozawa
