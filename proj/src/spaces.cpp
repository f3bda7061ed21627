#include "ozawa/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <set>

#include <json.hpp>

#include "ozawa/parallel.hpp"

namespace ozawa {

std::size_t window_cap() {
  if (const char* env = std::getenv("OZAWA_MAX_WINDOW")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 5000;
}

MetricWindow::MetricWindow(std::vector<Element> points, std::vector<std::string> labels,
                           Eigen::MatrixXd dist)
    : points_(std::move(points)), labels_(std::move(labels)), dist_(std::move(dist)) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (labels_.size() != points_.size() || dist_.rows() != n || dist_.cols() != n) {
    throw Error(ErrorKind::Schema, "window: points, labels and distance matrix disagree in size");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!index_.emplace(points_[i], i).second) {
      throw Error(ErrorKind::Schema, "window: duplicate point " + labels_[i]);
    }
  }
}

double MetricWindow::diameter() const { return size() ? dist_.maxCoeff() : 0.0; }

std::optional<std::size_t> MetricWindow::index_of(const Element& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MetricWindow::require_index(const Element& e) const {
  auto i = index_of(e);
  if (!i) throw Error(ErrorKind::WindowTooSmall, "point outside the enumerated window");
  return *i;
}

std::optional<std::string> MetricWindow::metric_violation(double tol) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dist(i, i)) > tol) return "nonzero diagonal at " + labels_[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (dist(i, j) < -tol) return "negative distance " + labels_[i] + "," + labels_[j];
      if (std::abs(dist(i, j) - dist(j, i)) > tol) {
        return "asymmetric distance " + labels_[i] + "," + labels_[j];
      }
    }
  }
  std::vector<std::optional<std::string>> found(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n && !found[i]; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (dist(i, k) > dist(i, j) + dist(j, k) + tol) {
          found[i] = "triangle inequality fails for " + labels_[i] + "," + labels_[j] + "," + labels_[k];
          break;
        }
      }
    }
  });
  for (auto& f : found) {
    if (f) return f;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<Element> ball_elements(const Group& group, const Element& center, std::int64_t radius,
                                   std::size_t cap) {
  if (radius < 0) throw Error(ErrorKind::Parameter, "ball radius must be >= 0");
  const auto gens = group.generators();
  std::set<Element> seen{center};
  std::vector<Element> frontier{center};
  for (std::int64_t r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (const auto& s : gens) {
        Element y = group.multiply(x, s);
        if (seen.insert(y).second) {
          if (seen.size() > cap) {
            throw Error(ErrorKind::ResourceLimit,
                        "ball of radius " + std::to_string(radius) + " in " + group.name() +
                            " exceeds the window cap of " + std::to_string(cap) + " points");
          }
          next.push_back(std::move(y));
        }
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

MetricWindow group_window(const Group& group, std::vector<Element> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  const std::size_t n = elements.size();
  std::vector<Element> inverses(n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    inverses[i] = group.inverse(elements[i]);
    labels[i] = group.format(elements[i]);
  }
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(group.length(group.multiply(inverses[i], elements[j])));
    }
  });
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) dist(i, j) = dist(j, i);
  }
  return MetricWindow(std::move(elements), std::move(labels), std::move(dist));
}

MetricWindow enumerate_ball(const Group& group, const Element& center, std::int64_t radius,
                            std::size_t cap) {
  return group_window(group, ball_elements(group, center, radius, cap));
}

// ---------------------------------------------------------------------------

MetricWindow integerize_metric(const MetricWindow& window, const QuasiGeodesicParams& params) {
  if (params.delta <= 0 || params.lambda < 1) {
    throw Error(ErrorKind::Parameter, "quasi-geodesic parameters need delta > 0, lambda >= 1");
  }
  const std::size_t n = window.size();
  if (n == 0) throw Error(ErrorKind::Parameter, "integerize_metric: empty window");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && window.dist(i, j) <= params.delta) adj[i].push_back(j);
    }
  }
  Eigen::MatrixXd hops(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t src) {
    std::vector<long> level(n, -1);
    std::vector<double> length(n, 0.0);  // total step length of the BFS chain
    std::deque<std::size_t> queue{src};
    level[src] = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (auto y : adj[x]) {
        if (level[y] < 0) {
          level[y] = level[x] + 1;
          length[y] = length[x] + window.dist(x, y);
          queue.push_back(y);
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (level[j] < 0) {
        errors[src] = "delta-graph disconnected between " + window.label(src) + " and " + window.label(j);
        return;
      }
      if (length[j] > params.lambda * window.dist(src, j) + 1e-9) {
        errors[src] = "minimal chain from " + window.label(src) + " to " + window.label(j) +
                      " exceeds lambda times the distance";
        return;
      }
      hops(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(j)) = static_cast<double>(level[j]);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    const bool disconnected = errors[i].rfind("delta-graph", 0) == 0;
    throw Error(disconnected ? ErrorKind::NotQuasiGeodesic : ErrorKind::QuasiGeodesicViolation, errors[i]);
  }
  return MetricWindow(window.points(), window.labels(), std::move(hops));
}

GrowthConstants growth_constants(const MetricWindow& window, const std::vector<std::size_t>& basepoints) {
  // counts[R] = max over basepoints of |B(x,R)|
  std::vector<double> counts;
  for (auto x : basepoints) {
    std::vector<std::size_t> at;
    for (std::size_t j = 0; j < window.size(); ++j) {
      at.push_back(static_cast<std::size_t>(std::llround(window.dist(x, j))));
    }
    const std::size_t rmax = at.empty() ? 0 : *std::max_element(at.begin(), at.end());
    if (counts.size() < rmax + 1) counts.resize(rmax + 1, 0.0);
    std::vector<double> hist(rmax + 1, 0.0);
    for (auto r : at) hist[r] += 1.0;
    double cum = 0;
    for (std::size_t r = 0; r <= rmax; ++r) {
      cum += hist[r];
      counts[r] = std::max(counts[r], cum);
    }
  }
  GrowthConstants g;
  for (std::size_t r = 1; r < counts.size(); ++r) {
    g.L = std::max(g.L, std::pow(counts[r], 1.0 / static_cast<double>(r)));
  }
  for (std::size_t r = 0; r < counts.size(); ++r) {
    g.B = std::max(g.B, counts[r] / std::pow(g.L, static_cast<double>(r)));
  }
  return g;
}

double gromov_product(const Group& group, const Element& g1, const Element& g2) {
  return 0.5 * static_cast<double>(group.length(g1) + group.length(g2) - group.distance(g1, g2));
}

// ---------------------------------------------------------------------------

std::string window_to_json(const MetricWindow& window) {
  nlohmann::ordered_json doc;
  doc["points"] = window.labels();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < window.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < window.size(); ++j) row.push_back(window.dist(i, j));
    rows.push_back(std::move(row));
  }
  doc["dist"] = std::move(rows);
  return doc.dump();
}

MetricWindow window_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("window JSON: ") + e.what());
  }
  if (!doc.contains("points") || !doc.contains("dist")) {
    throw Error(ErrorKind::Schema, "window JSON needs 'points' and 'dist'");
  }
  const auto labels = doc["points"].get<std::vector<std::string>>();
  const std::size_t n = labels.size();
  const auto& rows = doc["dist"];
  if (!rows.is_array() || rows.size() != n) throw Error(ErrorKind::Schema, "window JSON: dist shape");
  Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Element> points;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw Error(ErrorKind::Schema, "window JSON: dist shape");
    for (std::size_t j = 0; j < n; ++j) {
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
    points.push_back(Element{{static_cast<std::int64_t>(i)}});
  }
  return MetricWindow(std::move(points), labels, std::move(dist));
}

}  // namespace ozawa
