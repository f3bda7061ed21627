#include "ozawa/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ozawa/parallel.hpp"

namespace ozawa {

DistanceFn group_distance(const Group& group) {
  return [&group](const Element& a, const Element& b) { return static_cast<double>(group.distance(a, b)); };
}

DistanceFn window_distance(const MetricWindow& window) {
  return [&window](const Element& a, const Element& b) {
    return window.dist(window.require_index(a), window.require_index(b));
  };
}

namespace {

using Entries = std::vector<AFamily::Entry>;

Entries sorted_unique(Entries e) {
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

// (|A cap B|, |A triangle B|) for sorted entry lists.
std::pair<std::size_t, std::size_t> overlap(const Entries& a, const Entries& b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return {common, a.size() + b.size() - 2 * common};
}

}  // namespace

AFamilyCheck verify_a_family(const AFamily& fam, const MetricWindow& window, const DistanceFn& dist) {
  if (fam.sets.size() != window.size()) {
    throw Error(ErrorKind::Parameter, "A-family size does not match the window");
  }
  AFamilyCheck check;
  std::vector<Entries> sets(fam.sets.size());
  for (std::size_t x = 0; x < sets.size(); ++x) {
    sets[x] = sorted_unique(fam.sets[x]);
    for (const auto& [y, level] : sets[x]) {
      if (dist(window.point(x), y) > fam.S) {
        if (check.support_violations++ == 0) {
          check.first_violation = "A_" + window.label(x) + " reaches beyond S";
        }
      }
    }
  }
  for (std::size_t x = 0; x < sets.size(); ++x) {
    for (std::size_t y = x + 1; y < sets.size(); ++y) {
      if (window.dist(x, y) > fam.R) continue;
      const auto [common, sym] = overlap(sets[x], sets[y]);
      if (common == 0) {
        if (sym != 0) check.disjoint_pairs.emplace_back(x, y);
        continue;
      }
      const double ratio = static_cast<double>(sym) / static_cast<double>(common);
      check.max_ratio = std::max(check.max_ratio, ratio);
      if (!(static_cast<double>(sym) < fam.epsilon * static_cast<double>(common))) {
        if (check.symdiff_violations++ == 0 && check.first_violation.empty()) {
          check.first_violation = "symmetric difference too large for " + window.label(x) + "," + window.label(y);
        }
      }
    }
  }
  if (check.first_violation.empty() && !check.disjoint_pairs.empty()) {
    const auto [x, y] = check.disjoint_pairs.front();
    check.first_violation = "disjoint sets at R-close points " + window.label(x) + "," + window.label(y);
  }
  return check;
}

FeatureMap a_family_features(const AFamily& fam) {
  std::vector<SparseVector> rows(fam.sets.size());
  for (std::size_t x = 0; x < fam.sets.size(); ++x) {
    const Entries set = sorted_unique(fam.sets[x]);
    if (set.empty()) throw Error(ErrorKind::DegenerateFamily, "empty A-set at point " + std::to_string(x));
    std::map<Element, std::size_t> counts;
    for (const auto& [z, level] : set) ++counts[z];
    const double total = static_cast<double>(set.size());
    for (const auto& [z, c] : counts) rows[x].emplace_back(z, std::sqrt(static_cast<double>(c) / total));
  }
  return FeatureMap(std::move(rows), fam.S);
}

FeatureKernel kernel_from_a_family(const AFamily& fam, WindowPtr window, const DistanceFn& dist) {
  for (std::size_t x = 0; x < fam.sets.size(); ++x) {
    if (fam.sets[x].empty()) {
      throw Error(ErrorKind::DegenerateFamily, "empty A-set at " + window->label(x));
    }
  }
  const auto check = verify_a_family(fam, *window, dist);
  if (!check.ok()) throw Error(ErrorKind::DegenerateFamily, "A-family check failed: " + check.first_violation);
  FeatureMap fm = a_family_features(fam);
  KernelMatrix km = kernel_from_feature_map(fm, window);
  return {std::move(fm), std::move(km)};
}

// ---------------------------------------------------------------------------

AFamily folner_family(const Group& group, const std::vector<Element>& folner_set, const MetricWindow& window) {
  AFamily fam;
  fam.sets.resize(window.size());
  for (std::size_t x = 0; x < window.size(); ++x) {
    for (const auto& a : folner_set) fam.sets[x].emplace_back(group.multiply(window.point(x), a), 1);
  }
  return fam;
}

KernelMatrix folner_kernel(const Group& group, const std::vector<Element>& folner_set, WindowPtr window) {
  if (folner_set.empty()) throw Error(ErrorKind::Parameter, "Følner set must be nonempty");
  const std::size_t n = window->size();
  std::vector<std::vector<Element>> translates(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& a : folner_set) translates[x].push_back(group.multiply(window->point(x), a));
    std::sort(translates[x].begin(), translates[x].end());
    translates[x].erase(std::unique(translates[x].begin(), translates[x].end()), translates[x].end());
  }
  const double size = static_cast<double>(translates.empty() ? folner_set.size() : translates[0].size());
  KernelMatrix km{window, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Element> common;
      std::set_intersection(translates[i].begin(), translates[i].end(), translates[j].begin(),
                            translates[j].end(), std::back_inserter(common));
      km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(common.size()) / size;
    }
  });
  return km;
}

double folner_target(double epsilon) { return 2.0 * epsilon / (4.0 + epsilon); }

double folner_ratio(const IntegerLattice& group, const std::vector<Element>& set, std::int64_t R) {
  const std::set<Element> a(set.begin(), set.end());
  double worst = 0;
  for (const auto& g : ball_elements(group, group.identity(), R)) {
    std::size_t inside = 0;
    for (const auto& x : a) inside += a.count(group.multiply(g, x));
    const double sym = 2.0 * static_cast<double>(a.size() - inside);
    worst = std::max(worst, sym / static_cast<double>(a.size()));
  }
  return worst;
}

std::vector<Element> folner_box_for_Zn(int n, std::int64_t R, double epsilon) {
  if (R < 0 || epsilon <= 0) throw Error(ErrorKind::Parameter, "Følner box needs R >= 0 and epsilon > 0");
  const IntegerLattice group(n);
  const double target = folner_target(epsilon);
  for (std::int64_t m = 1;; ++m) {
    std::vector<Element> box;
    std::vector<std::int64_t> c(static_cast<std::size_t>(n), 0);
    for (;;) {
      box.push_back(group.point(c));
      std::size_t k = 0;
      while (k < c.size() && ++c[k] == m) c[k++] = 0;
      if (k == c.size()) break;
    }
    if (box.size() > window_cap()) {
      throw Error(ErrorKind::ResourceLimit, "Følner box exceeds the window cap");
    }
    if (folner_ratio(group, box, R) < target) {
      std::sort(box.begin(), box.end());
      return box;
    }
  }
}

// ---------------------------------------------------------------------------

ParentFn free_group_ray_parent(const FreeGroup& group, std::int64_t letter) {
  const Element step = group.letter(letter);
  return [step, letter](const Element& g) {
    const bool on_ray = std::all_of(g.v.begin(), g.v.end(), [&](std::int64_t l) { return l == letter; });
    if (on_ray) {
      Element next = g;
      next.v.push_back(step.v[0]);
      return next;
    }
    Element up = g;
    up.v.pop_back();
    return up;
  };
}

std::vector<Element> tree_ray_set(const ParentFn& parent, const Element& g, std::int64_t S) {
  std::vector<Element> set{g};
  for (std::int64_t i = 0; i < S; ++i) set.push_back(parent(set.back()));
  std::sort(set.begin(), set.end());
  return set;
}

void check_tree_ray_parameters(double R, double epsilon, std::int64_t S) {
  const double s = static_cast<double>(S);
  if (!(s > R / 2)) throw Error(ErrorKind::Parameter, "tree-ray kernel requires S > R/2");
  if (!(2 * R / (2 * (s + 1) - R) < epsilon / 2)) {
    throw Error(ErrorKind::Parameter, "tree-ray kernel requires 2R/(2(S+1)-R) < epsilon/2");
  }
}

FeatureKernel tree_ray_kernel(const ParentFn& parent, std::int64_t S, WindowPtr window, double R, double epsilon) {
  check_tree_ray_parameters(R, epsilon, S);
  const double w = 1.0 / std::sqrt(static_cast<double>(S + 1));
  std::vector<SparseVector> rows(window->size());
  for (std::size_t x = 0; x < window->size(); ++x) {
    for (auto& v : tree_ray_set(parent, window->point(x), S)) rows[x].emplace_back(std::move(v), w);
  }
  FeatureMap fm(std::move(rows), static_cast<double>(S));
  KernelMatrix km = kernel_from_feature_map(fm, window);
  return {std::move(fm), std::move(km)};
}

// ---------------------------------------------------------------------------

Cover::Cover(WindowPtr window, std::vector<std::vector<std::size_t>> sets)
    : window_(std::move(window)), sets_(std::move(sets)) {
  const std::size_t n = window_->size();
  members_.resize(n);
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    auto& s = sets_[i];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (auto x : s) {
      if (x >= n) throw Error(ErrorKind::CoverViolation, "cover set refers to a point outside the window");
      members_[x].push_back(i);
    }
  }
  comp_dist_.resize(n);
  parallel_for(n, [&](std::size_t x) {
    if (members_[x].empty()) return;
    // Window points by distance from x; the first one outside U_i gives
    // d(x, X \ U_i).
    std::vector<std::size_t> order(n);
    for (std::size_t y = 0; y < n; ++y) order[y] = y;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return window_->dist(x, a) < window_->dist(x, b); });
    for (auto i : members_[x]) {
      const auto& s = sets_[i];
      double best = std::numeric_limits<double>::infinity();
      for (auto y : order) {
        if (!std::binary_search(s.begin(), s.end(), y)) {
          best = window_->dist(x, y);
          break;
        }
      }
      comp_dist_[x].push_back(best);
    }
  });
}

double Cover::complement_distance(std::size_t x, std::size_t i) const {
  const auto& m = members_[x];
  auto it = std::lower_bound(m.begin(), m.end(), i);
  if (it == m.end() || *it != i) return 0.0;
  return comp_dist_[x][static_cast<std::size_t>(it - m.begin())];
}

std::size_t Cover::multiplicity(const PointMask* mask) const {
  std::size_t m = 0;
  for (std::size_t x = 0; x < members_.size(); ++x) {
    if (mask && !(*mask)[x]) continue;
    m = std::max(m, members_[x].size());
  }
  return m;
}

double Cover::lebesgue_number(const PointMask* mask) const {
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < members_.size(); ++x) {
    if (mask && !(*mask)[x]) continue;
    double best = 0;
    for (double d : comp_dist_[x]) best = std::max(best, d);
    inf = std::min(inf, best);
  }
  return inf;
}

double Cover::max_diameter() const {
  double diam = 0;
  for (const auto& s : sets_) {
    for (auto x : s) {
      for (auto y : s) diam = std::max(diam, window_->dist(x, y));
    }
  }
  return diam;
}

std::optional<std::size_t> Cover::uncovered() const {
  for (std::size_t x = 0; x < members_.size(); ++x) {
    if (members_[x].empty()) return x;
  }
  return std::nullopt;
}

namespace {

// Normalized weights d_i / sum d_j over the members of x; infinite distances
// take the whole mass, shared equally.
std::vector<double> partition_weights(const std::vector<double>& d) {
  std::vector<double> w(d.size(), 0.0);
  const auto infinite = static_cast<double>(std::count_if(d.begin(), d.end(), [](double v) { return std::isinf(v); }));
  if (infinite > 0) {
    for (std::size_t i = 0; i < d.size(); ++i) w[i] = std::isinf(d[i]) ? 1.0 / infinite : 0.0;
    return w;
  }
  double total = 0;
  for (double v : d) total += v;
  if (!(total > 0)) throw Error(ErrorKind::CoverViolation, "point with zero distance to every complement");
  for (std::size_t i = 0; i < d.size(); ++i) w[i] = d[i] / total;
  return w;
}

}  // namespace

FeatureKernel cover_kernel(const Cover& cover) {
  if (auto x = cover.uncovered()) {
    throw Error(ErrorKind::CoverViolation, "point " + cover.window().label(*x) + " lies in no cover element");
  }
  const std::size_t n = cover.window().size();
  std::vector<SparseVector> rows(n);
  double support = 0;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> d;
    for (auto i : cover.members(x)) d.push_back(cover.complement_distance(x, i));
    const auto w = partition_weights(d);
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] > 0) {
        rows[x].emplace_back(Element{{static_cast<std::int64_t>(cover.members(x)[k])}}, std::sqrt(w[k]));
      }
    }
    rows[x] = canonicalize(std::move(rows[x]));
  }
  support = cover.max_diameter();
  FeatureMap fm(std::move(rows), support);
  KernelMatrix km = kernel_from_feature_map(fm, cover.window_ptr());
  return {std::move(fm), std::move(km)};
}

Eigen::MatrixXd cover_kernel_direct(const Cover& cover) {
  const std::size_t n = cover.window().size();
  const std::size_t m = cover.size();
  // Dense n x m table of d(x, X \ U_i).
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t x = 0; x < n; ++x) {
    for (auto i : cover.members(x)) {
      d(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i)) = cover.complement_distance(x, i);
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index x = 0; x < out.rows(); ++x) {
    for (Eigen::Index y = 0; y < out.cols(); ++y) {
      if (d.row(x).array().isInf().any() || d.row(y).array().isInf().any()) {
        // Uniform over the infinite entries, as in the feature map.
        const Eigen::ArrayXd ix = d.row(x).array().isInf().cast<double>();
        const Eigen::ArrayXd iy = d.row(y).array().isInf().cast<double>();
        const bool fx = ix.sum() > 0;
        const bool fy = iy.sum() > 0;
        Eigen::ArrayXd wx = fx ? Eigen::ArrayXd(ix / ix.sum()) : Eigen::ArrayXd(d.row(x).array() / d.row(x).sum());
        Eigen::ArrayXd wy = fy ? Eigen::ArrayXd(iy / iy.sum()) : Eigen::ArrayXd(d.row(y).array() / d.row(y).sum());
        out(x, y) = (wx * wy).sqrt().sum();
        continue;
      }
      double num = 0;
      for (Eigen::Index i = 0; i < d.cols(); ++i) num += std::sqrt(d(x, i) * d(y, i));
      out(x, y) = num / std::sqrt(d.row(x).sum() * d.row(y).sum());
    }
  }
  return out;
}

double cover_deviation_bound(int k, double d, double lebesgue) {
  return static_cast<double>((k + 1) * (2 * k + 3)) * d / lebesgue;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Indices m of the intervals [2Lm, 2Lm+4L-1] containing v.
std::vector<std::int64_t> interval_indices(std::int64_t v, std::int64_t L) {
  const std::int64_t hi = floor_div(v, 2 * L);
  std::vector<std::int64_t> out;
  for (std::int64_t m = hi - 1; m <= hi; ++m) {
    if (2 * L * m <= v && v <= 2 * L * m + 4 * L - 1) out.push_back(m);
  }
  return out;
}

Cover cover_from_keys(WindowPtr window, const std::vector<std::vector<std::vector<std::int64_t>>>& keys_per_point) {
  std::map<std::vector<std::int64_t>, std::vector<std::size_t>> sets;
  for (std::size_t x = 0; x < keys_per_point.size(); ++x) {
    for (const auto& k : keys_per_point[x]) sets[k].push_back(x);
  }
  std::vector<std::vector<std::size_t>> list;
  for (auto& [k, s] : sets) list.push_back(std::move(s));
  return Cover(std::move(window), std::move(list));
}

}  // namespace

Cover interval_cover_for_Z(WindowPtr window, std::int64_t L) {
  if (L < 1) throw Error(ErrorKind::Parameter, "interval cover needs L >= 1");
  std::vector<std::vector<std::vector<std::int64_t>>> keys(window->size());
  for (std::size_t x = 0; x < window->size(); ++x) {
    const auto& p = window->point(x).v;
    if (p.size() != 1) throw Error(ErrorKind::Parameter, "interval cover expects a window of Z");
    for (auto m : interval_indices(p[0], L)) keys[x].push_back({m});
  }
  return cover_from_keys(std::move(window), keys);
}

Cover interval_cover_for_Z2(WindowPtr window, std::int64_t L) {
  if (L < 1) throw Error(ErrorKind::Parameter, "interval cover needs L >= 1");
  std::vector<std::vector<std::vector<std::int64_t>>> keys(window->size());
  for (std::size_t x = 0; x < window->size(); ++x) {
    const auto& p = window->point(x).v;
    if (p.size() != 2) throw Error(ErrorKind::Parameter, "product cover expects a window of Z^2");
    for (auto m1 : interval_indices(p[0], L)) {
      for (auto m2 : interval_indices(p[1], L)) keys[x].push_back({m1, m2});
    }
  }
  return cover_from_keys(std::move(window), keys);
}

PointMask interior_mask(const MetricWindow& window, const Element& center, double radius, const DistanceFn& dist) {
  PointMask mask(window.size());
  for (std::size_t x = 0; x < window.size(); ++x) mask[x] = dist(center, window.point(x)) <= radius;
  return mask;
}

}  // namespace ozawa
