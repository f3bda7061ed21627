#include "ozawa/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ozawa/parallel.hpp"

namespace ozawa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kUniverseCap = 2'000'000;

}  // namespace

GroupAction free_group_on_tree(std::shared_ptr<const FreeGroup> group) {
  GroupAction act;
  act.group = group;
  act.orbit = [](const Element& g) { return g; };
  act.orbit_distance = [group](const Element& a, const Element& b) {
    return static_cast<double>(group->distance(a, b));
  };
  act.orbit_neighbors = [group](const Element& y) {
    std::vector<Element> out;
    for (const auto& s : group->generators()) out.push_back(group->multiply(y, s));
    return out;
  };
  act.coset_rep = [](const Element& g) { return g; };
  act.in_stabilizer = [group](const Element& g) { return g == group->identity(); };
  act.free_action = true;
  act.name = group->name() + " on its Cayley tree";
  return act;
}

GroupAction bs_on_bass_serre_tree(std::shared_ptr<const BaumslagSolitar> group) {
  GroupAction act;
  act.group = group;
  act.orbit = [](const Element& g) { return BaumslagSolitar::coset_rep(g); };
  act.orbit_distance = [group](const Element& a, const Element& b) {
    return static_cast<double>(BaumslagSolitar::syllable_count(group->multiply(group->inverse(a), b)));
  };
  act.orbit_neighbors = [group](const Element& y) {
    std::vector<Element> out;
    for (std::int64_t i = 0; i < group->q(); ++i) {
      out.push_back(BaumslagSolitar::coset_rep(group->multiply(y, group->multiply(group->b(i), group->a(1)))));
    }
    for (std::int64_t i = 0; i < group->p(); ++i) {
      out.push_back(BaumslagSolitar::coset_rep(group->multiply(y, group->multiply(group->b(i), group->a(-1)))));
    }
    return out;
  };
  act.coset_rep = [](const Element& g) { return BaumslagSolitar::coset_rep(g); };
  act.in_stabilizer = [](const Element& g) { return BaumslagSolitar::syllable_count(g) == 0; };
  act.name = group->name() + " on its Bass-Serre tree";
  return act;
}

std::vector<Element> orbit_ball(const GroupAction& action, const Element& center, std::int64_t radius) {
  std::set<Element> seen{center};
  std::vector<Element> frontier{center};
  for (std::int64_t r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Element> next;
    for (const auto& y : frontier) {
      for (auto& z : action.orbit_neighbors(y)) {
        if (seen.insert(z).second) {
          if (seen.size() > kUniverseCap) throw Error(ErrorKind::ResourceLimit, "orbit ball too large");
          next.push_back(std::move(z));
        }
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

double orbit_reach(const GroupAction& action, std::int64_t R) {
  const Element x0 = action.orbit(action.group->identity());
  double k = 0;
  for (const auto& g : ball_elements(*action.group, action.group->identity(), R, kUniverseCap)) {
    k = std::max(k, action.orbit_distance(x0, action.orbit(g)));
  }
  return k;
}

PullbackResult orbit_pullback_kernel(const GroupAction& action, const OrbitFeatures& lambda, double S0,
                                     WindowPtr window, std::int64_t window_radius) {
  const Group& G = *action.group;
  auto count_stabilizer = [&](std::int64_t r) {
    std::size_t c = 0;
    for (const auto& g : ball_elements(G, G.identity(), r, kUniverseCap)) c += action.in_stabilizer(g);
    return c;
  };
  const std::int64_t r = std::max<std::int64_t>(window_radius, 1);
  if (count_stabilizer(r) != count_stabilizer(2 * r)) {
    throw Error(ErrorKind::PropernessViolation, "stabilizer of the basepoint keeps growing; action is not proper");
  }

  // {g : d_X(x0, g x0) <= S0}, enumerated until a ball adds nothing new twice.
  const Element x0 = action.orbit(G.identity());
  std::vector<Element> near;
  std::size_t stable = 0;
  for (std::int64_t rad = 0; stable < 2; ++rad) {
    std::vector<Element> found;
    for (const auto& g : ball_elements(G, G.identity(), rad, kUniverseCap)) {
      if (action.orbit_distance(x0, action.orbit(g)) <= S0) found.push_back(g);
    }
    stable = found.size() == near.size() ? stable + 1 : 0;
    near = std::move(found);
  }
  double diameter = 0;
  for (const auto& a : near) {
    for (const auto& b : near) diameter = std::max(diameter, static_cast<double>(G.distance(a, b)));
  }

  std::vector<SparseVector> rows(window->size());
  parallel_for(window->size(), [&](std::size_t i) {
    rows[i] = canonicalize(lambda(action.orbit(window->point(i))));
  });
  FeatureMap fm(std::move(rows), diameter);
  if (auto v = fm.violation()) throw Error(ErrorKind::DegenerateFamily, "orbit features: " + *v);
  KernelMatrix km = kernel_from_feature_map(fm, window);
  return {{std::move(fm), std::move(km)}, diameter};
}

GluingSchedule make_schedule(const GroupAction& action, double R, double epsilon, double S0, double S1,
                             const GluingOverrides& overrides) {
  if (!(R > 0) || !(epsilon > 0 && epsilon < 1)) {
    throw Error(ErrorKind::Parameter, "gluing needs R > 0 and 0 < epsilon < 1");
  }
  GluingSchedule s;
  s.R = R;
  s.epsilon = epsilon;
  s.S0 = S0;
  s.S1 = S1;
  const Element x0 = action.orbit(action.group->identity());
  s.N = static_cast<std::int64_t>(orbit_ball(action, x0, static_cast<std::int64_t>(std::floor(S0))).size());
  s.K = orbit_reach(action, static_cast<std::int64_t>(std::ceil(R)));
  const double n = static_cast<double>(s.N);
  s.L_required = std::ceil(48 * n * (2 * n + 1) * R / (epsilon * epsilon));
  s.L = overrides.L.value_or(s.L_required);
  s.lambda_epsilon = overrides.lambda_epsilon.value_or(epsilon * epsilon / 8);
  s.mu_R = overrides.mu_R.value_or(2 * (s.L + 3 * R));
  s.mu_epsilon = overrides.mu_epsilon.value_or(std::pow(epsilon, 4) / 512);
  s.conforming = !(overrides.L || overrides.lambda_epsilon || overrides.mu_R || overrides.mu_epsilon);
  return s;
}

// ---------------------------------------------------------------------------

GluingScaffold::GluingScaffold(GroupAction action, OrbitFeatures lambda, StabilizerFeatures mu,
                               GluingSchedule schedule, WindowPtr window, std::int64_t window_radius,
                               std::int64_t universe_radius)
    : action_(std::move(action)),
      lambda_(std::move(lambda)),
      mu_(std::move(mu)),
      schedule_(schedule),
      window_(std::move(window)),
      universe_radius_(universe_radius) {
  const Group& G = *action_.group;
  const double needed = static_cast<double>(window_radius) + 2 * (schedule_.S1 + schedule_.L);
  if (static_cast<double>(universe_radius_) < needed && !action_.free_action) {
    throw Error(ErrorKind::WindowTooSmall, "universe radius " + std::to_string(universe_radius_) +
                                               " cannot hold the L-neighborhoods around the window (needs " +
                                               format_double(needed) + ")");
  }
  universe_ = ball_elements(G, G.identity(), universe_radius_, kUniverseCap);
  for (std::size_t i = 0; i < universe_.size(); ++i) universe_index_.emplace(universe_[i], i);
  std::vector<Element> orbits(universe_.size());
  parallel_for(universe_.size(), [&](std::size_t i) { orbits[i] = action_.orbit(universe_[i]); });
  std::unordered_map<Element, std::uint32_t, ElementHash> coset_index;
  coset_of_.resize(universe_.size());
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    auto [it, fresh] = coset_index.emplace(orbits[i], static_cast<std::uint32_t>(cosets_.size()));
    if (fresh) cosets_.push_back(orbits[i]);
    coset_of_[i] = it->second;
  }
  for (const auto& g : window_->points()) {
    if (!in_universe(g)) throw Error(ErrorKind::WindowTooSmall, "window point outside the universe");
  }

  const auto sphere_radius = static_cast<std::int64_t>(
      std::ceil(std::max({schedule_.L, schedule_.S1 + schedule_.L, schedule_.R})));
  const auto ball = ball_elements(G, G.identity(), sphere_radius, kUniverseCap);
  spheres_.resize(static_cast<std::size_t>(sphere_radius) + 1);
  for (const auto& h : ball) spheres_[static_cast<std::size_t>(G.length(h))].push_back(h);

  std::vector<DistanceList> lists(window_->size());
  parallel_for(window_->size(), [&](std::size_t i) { lists[i] = sort_universe(window_->point(i)); });
  for (std::size_t i = 0; i < lists.size(); ++i) sorted_universe_.emplace(window_->point(i), std::move(lists[i]));
}

double GluingScaffold::dist(const Element& a, const Element& b) const {
  return static_cast<double>(action_.group->distance(a, b));
}

bool GluingScaffold::in_universe(const Element& g) const { return universe_index_.count(g) > 0; }

GluingScaffold::DistanceList GluingScaffold::sort_universe(const Element& u) const {
  DistanceList out;
  out.reserve(universe_.size());
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    out.emplace_back(action_.group->distance(u, universe_[i]), static_cast<std::uint32_t>(i));
  }
  // The universe is sorted, so index order is token order.
  std::sort(out.begin(), out.end());
  return out;
}

const GluingScaffold::DistanceList& GluingScaffold::universe_by_distance(const Element& u) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = sorted_universe_.find(u);
    if (it != sorted_universe_.end()) return it->second;
  }
  DistanceList list = sort_universe(u);
  std::lock_guard lock(cache_mutex_);
  return sorted_universe_.emplace(u, std::move(list)).first->second;
}

const std::vector<char>& GluingScaffold::x_mask(const Element& y) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = x_masks_.find(y);
    if (it != x_masks_.end()) return it->second;
  }
  std::vector<char> mask(cosets_.size());
  for (std::size_t c = 0; c < cosets_.size(); ++c) {
    mask[c] = action_.orbit_distance(cosets_[c], y) <= schedule_.S0 ? 1 : 0;
  }
  std::lock_guard lock(cache_mutex_);
  return x_masks_.emplace(y, std::move(mask)).first->second;
}

template <class Pred>
std::optional<Element> GluingScaffold::nearest(const Element& z, std::int64_t max_radius, Pred pred) const {
  const Group& G = *action_.group;
  const auto top = std::min<std::int64_t>(max_radius, static_cast<std::int64_t>(spheres_.size()) - 1);
  for (std::int64_t r = 0; r <= top; ++r) {
    std::optional<Element> best;
    for (const auto& h : spheres_[static_cast<std::size_t>(r)]) {
      Element w = G.multiply(z, h);
      if (pred(w) && (!best || w < *best)) best = std::move(w);
    }
    if (best) return best;
  }
  return std::nullopt;
}

SparseVector GluingScaffold::lambda_at(const Element& g) const { return canonicalize(lambda_(action_.orbit(g))); }

double GluingScaffold::alpha(const Element& y, const Element& g) const {
  for (const auto& [k, w] : lambda_at(g)) {
    if (k == y) return w * w;
  }
  return 0.0;
}

bool GluingScaffold::in_u(const Element& y, const Element& g) const { return in_universe(g) && alpha(y, g) > 0; }

bool GluingScaffold::in_x(const Element& y, const Element& g) const {
  auto it = universe_index_.find(g);
  return it != universe_index_.end() && in_x_index(x_mask(y), static_cast<std::uint32_t>(it->second));
}

bool GluingScaffold::in_neighborhood(const Element& coset, const Element& x) const {
  if (action_.free_action) return in_universe(coset) && dist(x, coset) <= schedule_.L;
  const Group& G = *action_.group;
  const auto top = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(schedule_.L)),
                                          static_cast<std::int64_t>(spheres_.size()) - 1);
  for (std::int64_t r = 0; r <= top; ++r) {
    for (const auto& h : spheres_[static_cast<std::size_t>(r)]) {
      auto it = universe_index_.find(G.multiply(x, h));
      if (it != universe_index_.end() && cosets_[coset_of_[it->second]] == coset) return true;
    }
  }
  return false;
}

std::vector<Element> GluingScaffold::cosets_near(const Element& y, const Element& u) const {
  const auto& mask = x_mask(y);
  std::set<Element> out;
  for (const auto& [d, i] : universe_by_distance(u)) {
    if (static_cast<double>(d) > schedule_.L) break;
    if (in_x_index(mask, i)) out.insert(cosets_[coset_of_[i]]);
  }
  return {out.begin(), out.end()};
}

double GluingScaffold::complement_distance(const Element& y, const Element& coset, const Element& u) const {
  const auto& mask = x_mask(y);
  for (const auto& [d, i] : universe_by_distance(u)) {
    if (in_x_index(mask, i) && !in_neighborhood(coset, universe_[i])) return static_cast<double>(d);
  }
  return kInf;
}

std::vector<std::pair<Element, double>> GluingScaffold::delta(const Element& y, const Element& u) const {
  if (!in_x(y, u)) throw Error(ErrorKind::Parameter, "delta is evaluated on X_g only");
  // Cosets farther than L from u have u itself in the complement.
  const auto& mask = x_mask(y);
  DistanceList in_xy;
  for (const auto& entry : universe_by_distance(u)) {
    if (in_x_index(mask, entry.second)) in_xy.push_back(entry);
  }
  std::vector<std::pair<Element, double>> d;
  for (const auto& c : cosets_near(y, u)) {
    double dc = kInf;
    for (const auto& [dx, x] : in_xy) {
      if (!in_neighborhood(c, universe_[x])) {
        dc = static_cast<double>(dx);
        break;
      }
    }
    d.emplace_back(c, dc);
  }
  std::size_t infinite = 0;
  double total = 0;
  for (const auto& [c, v] : d) {
    if (std::isinf(v)) {
      ++infinite;
    } else {
      total += v;
    }
  }
  std::vector<std::pair<Element, double>> out;
  for (const auto& [c, v] : d) {
    double w = 0;
    if (infinite > 0) {
      w = std::isinf(v) ? 1.0 / static_cast<double>(infinite) : 0.0;
    } else if (total > 0) {
      w = v / total;
    }
    if (w > 0) out.emplace_back(c, w);
  }
  if (out.empty()) throw Error(ErrorKind::Numerical, "partition of unity vanishes at " + action_.group->format(u));
  return out;
}

Element GluingScaffold::p(const Element& coset, const Element& z) const {
  if (action_.free_action) {
    if (!in_universe(coset)) throw Error(ErrorKind::WindowTooSmall, "coset outside the universe");
    return coset;
  }
  auto w = nearest(z, static_cast<std::int64_t>(std::floor(schedule_.L)),
                   [&](const Element& x) { return in_universe(x) && action_.orbit(x) == coset; });
  if (!w) throw Error(ErrorKind::WindowTooSmall, "no point of the coset within L of " + action_.group->format(z));
  return *w;
}

Element GluingScaffold::q(const Element& y, const Element& x) const {
  auto w = nearest(x, static_cast<std::int64_t>(spheres_.size()) - 1, [&](const Element& v) { return in_u(y, v); });
  if (!w) throw Error(ErrorKind::WindowTooSmall, "no point of U_g near " + action_.group->format(x));
  return *w;
}

std::optional<Element> GluingScaffold::r(const Element& y, const Element& x) const {
  return nearest(x, static_cast<std::int64_t>(std::floor(schedule_.R)), [&](const Element& v) { return in_u(y, v); });
}

SparseVector GluingScaffold::sigma(const Element& y, const Element& u) const {
  const Group& G = *action_.group;
  SparseVector out;
  for (const auto& [c, d] : delta(y, u)) {
    const Element pu = p(c, u);
    const Element t = action_.coset_rep(pu);
    const Element t_inv = G.inverse(t);
    const double s = std::sqrt(d);
    for (const auto& [k, w] : mu_(G.multiply(t_inv, pu))) {
      const Element x = G.multiply(t, k);
      if (!in_universe(x)) throw Error(ErrorKind::WindowTooSmall, "sigma support leaves the universe");
      out.emplace_back(pair_key(c, x), s * w);
    }
  }
  return canonicalize(std::move(out));
}

std::map<Element, double> GluingScaffold::tau_squared(const Element& y, const Element& u) const {
  std::map<Element, double> acc;
  const Group& G = *action_.group;
  for (const auto& [c, d] : delta(y, u)) {
    const Element pu = p(c, u);
    const Element t = action_.coset_rep(pu);
    const Element t_inv = G.inverse(t);
    for (const auto& [k, w] : mu_(G.multiply(t_inv, pu))) {
      const Element x = G.multiply(t, k);
      if (!in_universe(x)) throw Error(ErrorKind::WindowTooSmall, "sigma support leaves the universe");
      acc[q(y, x)] += d * w * w;
    }
  }
  return acc;
}

SparseVector GluingScaffold::tau(const Element& y, const Element& u) const {
  SparseVector out;
  for (const auto& [w, s] : tau_squared(y, u)) {
    if (s > 0) out.emplace_back(w, std::sqrt(s));
  }
  return out;
}

SparseVector GluingScaffold::nu(const Element& y, const Element& g) const {
  auto ru = r(y, g);
  if (!ru) return {};
  return tau(y, *ru);
}

SparseVector GluingScaffold::kappa(const Element& g) const {
  SparseVector out;
  for (const auto& [y, l] : lambda_at(g)) {
    if (l == 0) continue;
    for (const auto& [w, v] : nu(y, g)) out.emplace_back(pair_key(y, w), l * v);
  }
  return canonicalize(std::move(out));
}

double GluingScaffold::zeta(const Element& y, const Element& u1, const Element& u2) const {
  const auto a = tau_squared(y, u1);
  const auto b = tau_squared(y, u2);
  double s = 0;
  for (const auto& [w, v] : a) {
    auto it = b.find(w);
    if (it != b.end()) s += std::sqrt(v) * std::sqrt(it->second);
  }
  return s;
}

// ---------------------------------------------------------------------------

GluingResult gluing_kernel(const GluingScaffold& scaffold) {
  const auto& w = scaffold.window();
  std::vector<SparseVector> rows(w.size());
  parallel_for(w.size(), [&](std::size_t i) { rows[i] = scaffold.kappa(w.point(i)); });
  FeatureMap fm(std::move(rows), scaffold.schedule().width());
  KernelMatrix km = kernel_from_feature_map(fm, scaffold.window_ptr());
  return {std::move(fm), std::move(km)};
}

Eigen::MatrixXd gluing_kernel_direct(const GluingScaffold& scaffold) {
  const auto& w = scaffold.window();
  const std::size_t n = w.size();
  struct Term {
    double lambda = 0;
    bool in_ur = false;
    std::map<Element, double> tau2;
  };
  std::vector<std::map<Element, Term>> terms(n);
  parallel_for(n, [&](std::size_t i) {
    const Element& g = w.point(i);
    for (const auto& [y, l] : scaffold.lambda_at(g)) {
      Term t;
      t.lambda = l;
      if (auto r = scaffold.r(y, g)) {
        t.in_ur = true;
        t.tau2 = scaffold.tau_squared(y, *r);
      }
      terms[i].emplace(y, std::move(t));
    }
  });
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (const auto& [y, t1] : terms[i]) {
        auto it = terms[j].find(y);
        if (it == terms[j].end() || !t1.in_ur || !it->second.in_ur) continue;
        double zeta = 0;
        for (const auto& [x, v] : t1.tau2) {
          auto jt = it->second.tau2.find(x);
          if (jt != it->second.tau2.end()) zeta += std::sqrt(v) * std::sqrt(jt->second);
        }
        s += t1.lambda * it->second.lambda * zeta;
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  });
  return out;
}

ScaffoldReport check_scaffold(const GluingScaffold& scaffold) {
  const auto& w = scaffold.window();
  const auto& sched = scaffold.schedule();
  const auto& act = scaffold.action();
  const std::size_t n = w.size();
  ScaffoldReport rep;

  std::vector<SparseVector> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = scaffold.lambda_at(w.point(i));

  for (std::size_t i = 0; i < n; ++i) {
    const Element& g = w.point(i);
    double a = 0;
    for (const auto& [y, l] : lam[i]) {
      a += l * l;
      if (!scaffold.in_x(y, g)) rep.u_inside_x = false;
      double d = 0;
      for (const auto& [c, v] : scaffold.delta(y, g)) d += v;
      rep.max_delta_defect = std::max(rep.max_delta_defect, std::abs(d - 1));
      for (const auto& [x, v] : scaffold.tau(y, g)) rep.max_tau_reach = std::max(rep.max_tau_reach, scaffold.dist(g, x));
      for (const auto& [x, v] : scaffold.nu(y, g)) rep.max_nu_reach = std::max(rep.max_nu_reach, scaffold.dist(g, x));
    }
    rep.max_alpha_defect = std::max(rep.max_alpha_defect, std::abs(a - 1));
  }

  std::map<std::pair<Element, std::size_t>, SparseVector> sigma_cache;
  auto sigma = [&](const Element& y, std::size_t i) -> const SparseVector& {
    auto key = std::make_pair(y, i);
    auto it = sigma_cache.find(key);
    if (it == sigma_cache.end()) it = sigma_cache.emplace(key, scaffold.sigma(y, w.point(i))).first;
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = w.dist(i, j);
      if (d <= sched.R) {
        std::map<Element, double> diff;
        for (const auto& [y, l] : lam[i]) diff[y] += l * l;
        for (const auto& [y, l] : lam[j]) diff[y] -= l * l;
        double s = 0;
        for (const auto& [y, v] : diff) s += std::abs(v);
        rep.max_alpha_variation = std::max(rep.max_alpha_variation, s);
      }
      if (d <= sched.R1()) {
        for (const auto& [y, l] : lam[i]) {
          if (!scaffold.in_x(y, w.point(j))) continue;
          const auto& a = sigma(y, i);
          const auto& b = sigma(y, j);
          const double v = dot(a, a) + dot(b, b) - 2 * dot(a, b);
          rep.max_sigma_variation = std::max(rep.max_sigma_variation, v);
        }
      }
    }
  }

  // Hypotheses on lambda (orbit points of the window) and mu (stabilizer
  // elements of the universe ball of the window radius, transported to G0).
  std::set<Element> orbit_points;
  for (const auto& g : w.points()) orbit_points.insert(act.orbit(g));
  const std::vector<Element> ys(orbit_points.begin(), orbit_points.end());
  std::vector<SparseVector> ly(ys.size());
  // Orbit points are their own coset representatives.
  for (std::size_t i = 0; i < ys.size(); ++i) ly[i] = scaffold.lambda_at(ys[i]);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      if (act.orbit_distance(ys[i], ys[j]) <= sched.K) {
        rep.lambda_deviation = std::max(rep.lambda_deviation, std::abs(1 - dot(ly[i], ly[j])));
      }
    }
  }

  std::vector<Element> zs;
  std::vector<SparseVector> lz;
  for (const auto& g : scaffold.universe()) {
    if (act.in_stabilizer(g)) {
      zs.push_back(g);
      lz.push_back(canonicalize(scaffold.mu_at(g)));
    }
  }
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = i + 1; j < zs.size(); ++j) {
      if (scaffold.dist(zs[i], zs[j]) <= sched.mu_R) {
        rep.mu_deviation = std::max(rep.mu_deviation, std::abs(1 - dot(lz[i], lz[j])));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Element bs_tree_parent(const Element& coset) {
  const auto& v = coset.v;
  if (v.empty() || v.back() != 0) throw Error(ErrorKind::Parameter, "expected a coset representative of <b>");
  bool on_ray = true;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) on_ray = on_ray && v[i] == 0 && v[i + 1] == 1;
  Element out = coset;
  if (on_ray) {
    out.v.back() = 0;
    out.v.push_back(1);
    out.v.push_back(0);
  } else {
    out.v.resize(v.size() - 2);
    out.v.back() = 0;
  }
  return out;
}

OrbitFeatures bs_tree_ray_features(std::int64_t k) {
  if (k < 0) throw Error(ErrorKind::Parameter, "tree-ray length must be >= 0");
  const double w = 1.0 / std::sqrt(static_cast<double>(k + 1));
  return [k, w](const Element& v) {
    SparseVector out{{v, w}};
    Element cur = v;
    for (std::int64_t i = 0; i < k; ++i) {
      cur = bs_tree_parent(cur);
      out.emplace_back(cur, w);
    }
    return canonicalize(std::move(out));
  };
}

StabilizerFeatures bs_stabilizer_features(std::int64_t l) {
  if (l < 0) throw Error(ErrorKind::Parameter, "stabilizer window must be >= 0");
  const double w = 1.0 / std::sqrt(static_cast<double>(2 * l + 1));
  return [l, w](const Element& z) {
    if (z.v.size() != 1) throw Error(ErrorKind::Parameter, "expected an element of <b>");
    SparseVector out;
    for (std::int64_t i = -l; i <= l; ++i) out.emplace_back(Element{{z.v[0] + i}}, w);
    return out;
  };
}

double bs_stabilizer_support(const BaumslagSolitar& group, std::int64_t l) {
  double s = 0;
  for (std::int64_t i = -l; i <= l; ++i) s = std::max(s, static_cast<double>(group.length(group.b(i))));
  return s;
}

OrbitFeatures free_tree_ray_features(const FreeGroup& group, std::int64_t S) {
  if (S < 0) throw Error(ErrorKind::Parameter, "tree-ray length must be >= 0");
  const ParentFn parent = free_group_ray_parent(group, 1);
  const double w = 1.0 / std::sqrt(static_cast<double>(S + 1));
  return [parent, S, w](const Element& g) {
    SparseVector out;
    for (auto& v : tree_ray_set(parent, g, S)) out.emplace_back(std::move(v), w);
    return out;
  };
}

StabilizerFeatures trivial_stabilizer_features() {
  return [](const Element& z) { return SparseVector{{z, 1.0}}; };
}

}  // namespace ozawa
