#include "runner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ozawa/actions.hpp"
#include "ozawa/apps.hpp"
#include "ozawa/compression.hpp"
#include "ozawa/constructions.hpp"
#include "ozawa/extensions.hpp"
#include "ozawa/parallel.hpp"

namespace ozawa::cli {

using ojson = nlohmann::ordered_json;

namespace {

ojson num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

const nlohmann::json& params_of(const RunConfig& c) {
  static const nlohmann::json empty = nlohmann::json::object();
  auto it = c.doc.find("params");
  return it == c.doc.end() ? empty : *it;
}

template <class T>
T param(const RunConfig& c, const char* key, T dflt) {
  const auto& p = params_of(c);
  auto it = p.find(key);
  if (it == p.end()) return dflt;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Schema, std::string("params.") + key + " has the wrong type");
  }
}

template <class T>
std::optional<T> optional_param(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Schema, std::string(key) + " has the wrong type");
  }
}

const nlohmann::json& overrides_of(const RunConfig& c) {
  static const nlohmann::json empty = nlohmann::json::object();
  auto it = c.doc.find("overrides");
  return it == c.doc.end() ? empty : *it;
}

GluingOverrides gluing_overrides(const RunConfig& c) {
  const auto& o = overrides_of(c);
  GluingOverrides g;
  g.L = optional_param<double>(o, "L");
  g.lambda_epsilon = optional_param<double>(o, "lambda_epsilon");
  g.mu_R = optional_param<double>(o, "mu_R");
  g.mu_epsilon = optional_param<double>(o, "mu_epsilon");
  g.universe_radius = optional_param<std::int64_t>(o, "universe_radius");
  return g;
}

PlanOverrides compression_overrides(const RunConfig& c) {
  const auto& o = overrides_of(c);
  PlanOverrides p;
  p.t = optional_param<double>(o, "t");
  p.norm = optional_param<double>(o, "norm");
  p.M0 = optional_param<std::int64_t>(o, "M0");
  p.M = optional_param<std::int64_t>(o, "M");
  return p;
}

std::int64_t radius_or(const RunConfig& c, std::int64_t auto_value) {
  return c.window_radius.value_or(auto_value);
}

std::int64_t ceil_int(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

struct Built {
  KernelMatrix kernel;
  double predicted_width = 0;
  std::optional<PointMask> mask;
  ojson diagnostics = ojson::object();
  std::vector<ExtraCheck> extra;
};

WindowPtr ball_window(const Group& g, std::int64_t radius) {
  return std::make_shared<const MetricWindow>(enumerate_ball(g, g.identity(), radius));
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

ExtraCheck agreement(const std::string& name, double diff, double tol) {
  return {name, diff <= tol, "max difference " + format_double(diff) + " (tolerance " + format_double(tol) + ")"};
}

// --- constructions ---------------------------------------------------------

std::vector<Element> folner_box(const RunConfig& c) {
  const int dim = param<int>(c, "dim", 1);
  std::vector<Element> box;
  if (auto side = optional_param<std::int64_t>(params_of(c), "side")) {
    if (*side < 1) throw Error(ErrorKind::Parameter, "side must be >= 1");
    std::vector<std::int64_t> cur(static_cast<std::size_t>(dim), 0);
    while (true) {
      box.push_back(Element{cur});
      std::size_t i = 0;
      while (i < cur.size() && ++cur[i] == *side) cur[i++] = 0;
      if (i == cur.size()) break;
    }
  } else {
    box = folner_box_for_Zn(dim, ceil_int(c.R), c.epsilon);
  }
  std::sort(box.begin(), box.end());
  return box;
}

double set_diameter(const Group& g, const std::vector<Element>& set) {
  double width = 0;
  for (const auto& a : set) {
    for (const auto& b : set) width = std::max(width, static_cast<double>(g.distance(a, b)));
  }
  return width;
}

Built build_folner(const RunConfig& c) {
  auto group = std::make_shared<IntegerLattice>(param<int>(c, "dim", 1));
  const auto box = folner_box(c);
  const double width = set_diameter(*group, box);
  Built out;
  const auto window = ball_window(*group, radius_or(c, ceil_int(c.R + width) + 1));
  out.kernel = folner_kernel(*group, box, window);
  out.predicted_width = width;
  const double ratio = folner_ratio(*group, box, ceil_int(c.R));
  out.diagnostics["box_size"] = box.size();
  out.diagnostics["folner_ratio"] = num(ratio);
  out.diagnostics["folner_target"] = num(folner_target(c.epsilon));
  out.extra.push_back({"folner_ratio", ratio < folner_target(c.epsilon),
                       format_double(ratio) + " < " + format_double(folner_target(c.epsilon))});
  // Left invariance under each generator on pairs that stay in the window.
  double inv = 0;
  const auto& w = *window;
  for (const auto& h : group->generators()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto hi = w.index_of(group->multiply(h, w.point(i)));
      if (!hi) continue;
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto hj = w.index_of(group->multiply(h, w.point(j)));
        if (!hj) continue;
        inv = std::max(inv, std::abs(out.kernel.values(static_cast<Eigen::Index>(*hi), static_cast<Eigen::Index>(*hj)) -
                                     out.kernel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      }
    }
  }
  out.extra.push_back(agreement("left_invariance", inv, 1e-15));
  return out;
}

Built build_a_family(const RunConfig& c) {
  const auto S = param<std::int64_t>(c, "S", 9);
  const double family_eps = param<double>(c, "family_epsilon", c.epsilon);
  if (S < 0) throw Error(ErrorKind::Parameter, "S must be >= 0");
  auto group = std::make_shared<IntegerLattice>(1);
  const auto window = ball_window(*group, radius_or(c, ceil_int(c.R) + 2 * S + 1));
  AFamily fam;
  fam.R = c.R;
  fam.epsilon = family_eps;
  fam.S = static_cast<double>(S);
  for (const auto& x : window->points()) {
    std::vector<AFamily::Entry> set;
    for (std::int64_t i = 0; i <= S; ++i) set.emplace_back(Element{{x.v[0] + i}}, 1);
    fam.sets.push_back(std::move(set));
  }
  const auto dist = group_distance(*group);
  const auto check = verify_a_family(fam, *window, dist);
  Built out;
  out.kernel = kernel_from_a_family(fam, window, dist).kernel;
  out.predicted_width = 2.0 * static_cast<double>(S);
  out.diagnostics["family_epsilon"] = num(family_eps);
  out.diagnostics["max_symdiff_ratio"] = num(check.max_ratio);
  out.extra.push_back({"a_family", check.ok(),
                       check.ok() ? "max ratio " + format_double(check.max_ratio) : check.first_violation});
  return out;
}

Built build_tree(const RunConfig& c) {
  const int rank = param<int>(c, "rank", 2);
  const auto S = param<std::int64_t>(c, "S", 5);
  check_tree_ray_parameters(c.R, c.epsilon, S);
  auto group = std::make_shared<FreeGroup>(rank);
  const auto window = ball_window(*group, radius_or(c, 4));
  Built out;
  auto fk = tree_ray_kernel(free_group_ray_parent(*group), S, window, c.R, c.epsilon);
  out.kernel = std::move(fk.kernel);
  out.predicted_width = 2.0 * static_cast<double>(S);
  return out;
}

Built build_cover(const RunConfig& c) {
  const int dim = param<int>(c, "dim", 1);
  const auto L = param<std::int64_t>(c, "L", 5);
  if (dim != 1 && dim != 2) throw Error(ErrorKind::Parameter, "cover runs support dim 1 or 2");
  if (L < 1) throw Error(ErrorKind::Parameter, "L must be >= 1");
  auto group = std::make_shared<IntegerLattice>(dim);
  const auto radius = radius_or(c, 12 * L);
  const auto window = ball_window(*group, radius);
  const Cover cover = dim == 1 ? interval_cover_for_Z(window, L) : interval_cover_for_Z2(window, L);
  const auto margin = param<double>(c, "margin", static_cast<double>(dim * (4 * L - 1)));
  const auto dist = group_distance(*group);
  Built out;
  out.mask = interior_mask(*window, group->identity(), static_cast<double>(radius) - margin, dist);
  out.kernel = cover_kernel(cover).kernel;
  out.predicted_width = cover.max_diameter();
  const double leb = cover.lebesgue_number(&*out.mask);
  const int k = dim == 1 ? 1 : 3;
  double excess = -std::numeric_limits<double>::infinity();
  const auto& w = *window;
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (!(*out.mask)[x]) continue;
    for (std::size_t y = 0; y < w.size(); ++y) {
      if (!(*out.mask)[y]) continue;
      const double dev = std::abs(1 - out.kernel.values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
      excess = std::max(excess, dev - cover_deviation_bound(k, w.dist(x, y), leb));
    }
  }
  out.diagnostics["multiplicity"] = cover.multiplicity(&*out.mask);
  out.diagnostics["lebesgue"] = num(leb);
  out.diagnostics["max_bound_excess"] = num(excess);
  out.extra.push_back({"cover_bound", excess <= 1e-10, "max excess " + format_double(excess)});
  return out;
}

SparseVector interval_features(const Element& base, std::int64_t S, std::size_t coord, std::int64_t pad) {
  SparseVector v;
  const double w = 1 / std::sqrt(static_cast<double>(S + 1));
  for (std::int64_t i = 0; i <= S; ++i) {
    Element e = base;
    e.v[coord] += i;
    if (pad >= 0) e.v.push_back(0);
    v.emplace_back(std::move(e), w);
  }
  return v;
}

Built build_extension(const RunConfig& c) {
  const auto kind = param<std::string>(c, "sequence", "product");
  const auto S1 = param<std::int64_t>(c, "S1", 4);
  const auto S2 = param<std::int64_t>(c, "S2", 4);
  if (S1 < 0 || S2 < 0) throw Error(ErrorKind::Parameter, "S1 and S2 must be >= 0");
  const auto radius = radius_or(c, ceil_int(c.R) + 2 * S1 + S2 + 1);
  std::optional<ShortExactSequence> seq;
  QuotientFeatures lambda;
  SubgroupFeatures mu;
  double width = 0;
  if (kind == "product") {
    seq.emplace(product_sequence(2 * radius + S2 + 2));
    lambda = [S2](const Element& g) { return interval_features(g, S2, 0, -1); };
    // Product tokens are (1, h, g).
    mu = [S1](const Element& h) { return interval_features(Element{{1, h.v[1]}}, S1, 1, 0); };
    width = static_cast<double>(2 * S1 + S2);
  } else if (kind == "dihedral") {
    seq.emplace(dihedral_sequence(2 * radius + 2));
    lambda = [](const Element&) {
      const double w = 1 / std::sqrt(2.0);
      return SparseVector{{Element{{0}}, w}, {Element{{1}}, w}};
    };
    mu = [S1](const Element& h) { return interval_features(Element{{h.v[0]}}, S1, 0, 0); };
    width = static_cast<double>(2 * S1 + 1);
  } else {
    throw Error(ErrorKind::Schema, "params.sequence must be 'product' or 'dihedral'");
  }
  const auto window = ball_window(seq->gamma(), radius);
  const auto features = extension_features(*seq, lambda, mu, *window);
  Built out;
  out.kernel = kernel_from_feature_map(features, window);
  out.predicted_width = width;
  // Formula path with psi_H summed from the same mu.
  const SubgroupKernel psi_h = [&mu](const Element& a, const Element& b) { return dot(mu(a), mu(b)); };
  const auto formula = extension_kernel(*seq, lambda, psi_h, window);
  out.extra.push_back(agreement("two_path", max_abs_diff(out.kernel.values, formula.values), 1e-12));
  if (kind == "product") {
    // psi_Gamma((h,g),(h',g')) = psi_G(g,g') psi_H(h,h') with interval overlaps.
    auto overlap = [](std::int64_t a, std::int64_t b, std::int64_t S) {
      return static_cast<double>(std::max<std::int64_t>(0, S + 1 - std::abs(a - b))) / static_cast<double>(S + 1);
    };
    double diff = 0;
    const auto& w = *window;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto& x = w.point(i).v;
        const auto& y = w.point(j).v;
        const double expect = overlap(x[2], y[2], S2) * overlap(x[1], y[1], S1);
        diff = std::max(diff, std::abs(expect - out.kernel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      }
    }
    out.extra.push_back(agreement("factorization", diff, 1e-12));
  }
  return out;
}

Built build_compression(const RunConfig& c) {
  const auto n = param<std::int64_t>(c, "points", 200);
  if (n < 2) throw Error(ErrorKind::Parameter, "points must be >= 2");
  auto group = std::make_shared<IntegerLattice>(1);
  std::vector<Element> pts;
  for (std::int64_t i = 0; i < n; ++i) pts.push_back(Element{{i}});
  const auto window = std::make_shared<const MetricWindow>(group_window(*group, pts));
  const auto emb = inclusion_embedding_Z(*window);
  auto res = run_compression(emb, c.R, c.epsilon, window, compression_overrides(c));
  Built out;
  out.kernel = res.psi;
  out.predicted_width = 2.0 * static_cast<double>(res.plan.M0) * static_cast<double>(res.plan.M);
  auto& d = out.diagnostics;
  d["t"] = num(res.plan.t);
  d["N"] = res.plan.N;
  d["M0"] = res.plan.M0;
  d["M"] = res.plan.M;
  d["norm"] = num(res.plan.norm);
  d["overridden"] = res.plan.overridden;
  d["max_entry_error"] = num(res.max_entry_error);
  out.extra.push_back({"entrywise", res.max_entry_error < c.epsilon / 2,
                       "max |phi - psi| " + format_double(res.max_entry_error)});
  return out;
}

Built build_pullback(const RunConfig& c) {
  const int rank = param<int>(c, "rank", 2);
  const auto S0 = param<std::int64_t>(c, "S0", 3);
  auto group = std::make_shared<FreeGroup>(rank);
  const auto radius = radius_or(c, 3);
  const auto window = ball_window(*group, radius);
  auto res = orbit_pullback_kernel(free_group_on_tree(group), free_tree_ray_features(*group, S0),
                                   static_cast<double>(S0), window, radius);
  Built out;
  out.kernel = std::move(res.result.kernel);
  out.predicted_width = res.predicted_width;
  return out;
}

void add_gluing_checks(Built& out, const GluingScaffold& sc, const GluingResult& res) {
  const auto& s = sc.schedule();
  auto& d = out.diagnostics;
  d["S0"] = num(s.S0);
  d["S1"] = num(s.S1);
  d["N"] = s.N;
  d["K"] = num(s.K);
  d["L"] = num(s.L);
  d["L_required"] = num(s.L_required);
  d["lambda_epsilon"] = num(s.lambda_epsilon);
  d["mu_R"] = num(s.mu_R);
  d["mu_epsilon"] = num(s.mu_epsilon);
  d["conforming"] = s.conforming;
  d["universe_radius"] = sc.universe_radius();
  d["universe_size"] = sc.universe_size();
  const auto direct = gluing_kernel_direct(sc);
  out.extra.push_back(agreement("two_path", max_abs_diff(res.kernel.values, direct), 1e-12));
  out.kernel = res.kernel;
  out.predicted_width = s.width();
}

Built build_gluing(const RunConfig& c) {
  const auto action = param<std::string>(c, "action", "free");
  Built out;
  if (action == "bs") {
    BsGluingParams p;
    p.p = param<std::int64_t>(c, "p", 2);
    p.q = param<std::int64_t>(c, "q", 3);
    p.k = param<std::int64_t>(c, "k", 2);
    p.l = param<std::int64_t>(c, "l", 1);
    p.R = c.R;
    p.epsilon = c.epsilon;
    p.window_radius = radius_or(c, 4);
    p.overrides = gluing_overrides(c);
    auto bs = bs_gluing_kernel(p);
    add_gluing_checks(out, *bs.scaffold, bs.result);
    return out;
  }
  if (action != "free") throw Error(ErrorKind::Schema, "params.action must be 'free' or 'bs'");
  const int rank = param<int>(c, "rank", 2);
  const auto S0 = param<std::int64_t>(c, "S0", 3);
  auto group = std::make_shared<FreeGroup>(rank);
  const auto act = free_group_on_tree(group);
  const auto ov = gluing_overrides(c);
  const auto sched = make_schedule(act, c.R, c.epsilon, static_cast<double>(S0), 0, ov);
  const auto radius = radius_or(c, 3);
  const auto universe = ov.universe_radius.value_or(radius + ceil_int(2 * sched.L));
  if (universe > 12) {
    throw Error(ErrorKind::PlanInfeasible, "gluing needs a universe ball of radius " + std::to_string(universe) +
                                               " (L = " + format_double(sched.L) + "); reduce the schedule");
  }
  const auto window = ball_window(*group, radius);
  GluingScaffold sc(act, free_tree_ray_features(*group, S0), trivial_stabilizer_features(), sched, window, radius,
                    universe);
  add_gluing_checks(out, sc, gluing_kernel(sc));
  return out;
}

Built build_hyperbolic(const RunConfig& c) {
  const int rank = param<int>(c, "rank", 2);
  auto group = std::make_shared<FreeGroup>(rank);
  HyperbolicCoverParams p;
  p.delta = param<double>(c, "delta", 0.0);
  p.R = c.R;
  p.epsilon = c.epsilon;
  p.N_delta = param<std::int64_t>(c, "N_delta", 0);
  p.L = optional_param<std::int64_t>(params_of(c), "L");
  const auto radius = radius_or(c, 5);
  const auto window = ball_window(*group, radius);
  auto hc = build_hyperbolic_cover(*group, p, window, radius);
  Built out;
  out.kernel = cover_kernel(hc.cover).kernel;
  out.predicted_width = hc.cover.max_diameter();
  auto& d = out.diagnostics;
  d["N_delta"] = hc.N_delta;
  d["L"] = hc.L;
  d["sets"] = hc.cover.size();
  d["net_sizes"] = hc.net_sizes;
  d["multiplicity"] = hc.multiplicity;
  d["lebesgue"] = num(hc.lebesgue);
  out.extra.push_back({"multiplicity", hc.multiplicity_ok,
                       std::to_string(hc.multiplicity) + " <= " + std::to_string(2 * hc.N_delta)});
  out.extra.push_back({"lebesgue", hc.lebesgue_ok, format_double(hc.lebesgue) + " >= " + std::to_string(hc.L)});
  return out;
}

CubeComplexWindow complex_from_config(const RunConfig& c) {
  const auto& p = params_of(c);
  auto it = p.find("complex");
  if (it == p.end()) return path_complex(-20, 20);
  const auto& cx = *it;
  const auto type = cx.value("type", std::string("path"));
  if (type == "path") {
    return path_complex(cx.value("lo", std::int64_t{-20}), cx.value("hi", std::int64_t{20}),
                        cx.value("base", std::int64_t{0}));
  }
  if (type == "tree") return tree_complex(cx.value("rank", 2), cx.value("radius", std::int64_t{2}));
  if (type == "tree_product") {
    const auto t = tree_complex(cx.value("rank", 2), cx.value("radius", std::int64_t{2}));
    return product_complex(t, t);
  }
  if (type == "inline") return cube_complex_from_json(cx.dump());
  if (type == "file") {
    std::ifstream in(cx.at("path").get<std::string>());
    if (!in) throw Error(ErrorKind::Schema, "cannot read cube complex file");
    std::stringstream ss;
    ss << in.rdbuf();
    return cube_complex_from_json(ss.str());
  }
  throw Error(ErrorKind::Schema, "unknown complex type '" + type + "'");
}

Built build_cube(const RunConfig& c) {
  const auto ccw = complex_from_config(c);
  const double alpha = param<double>(c, "alpha", 0.25);
  const auto window = std::make_shared<const MetricWindow>(cube_metric_window(ccw));
  const auto emb = cube_embedding(ccw, *window, alpha);
  const auto ov = compression_overrides(c);
  auto res = cube_kernel(emb, c.R, c.epsilon, window, ov);
  Built out;
  out.kernel = res.psi;
  out.predicted_width = 2.0 * static_cast<double>(res.plan.M0) * static_cast<double>(res.plan.M);
  // Direct compression run on closed-form weights.
  const auto emb2 = cube_embedding(ccw, *window, alpha, closed_form_weights(ccw));
  auto direct = run_compression(emb2.embedding, c.R, c.epsilon, window, ov);
  auto& d = out.diagnostics;
  d["vertices"] = ccw.size();
  d["walls"] = emb.walls.size();
  d["alpha"] = num(alpha);
  d["scale"] = num(emb.scale);
  d["C"] = num(emb.embedding.C);
  d["t"] = num(res.plan.t);
  d["M0"] = res.plan.M0;
  d["M"] = res.plan.M;
  d["max_entry_error"] = num(res.max_entry_error);
  out.extra.push_back(agreement("direct_compression", max_abs_diff(res.psi.values, direct.psi.values), 1e-12));
  out.extra.push_back({"entrywise", res.max_entry_error < c.epsilon / 2,
                       "max |phi - psi| " + format_double(res.max_entry_error)});
  return out;
}

using Builder = std::function<Built(const RunConfig&)>;

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table = {
      {"folner", build_folner},       {"a_family", build_a_family},
      {"tree", build_tree},           {"cover", build_cover},
      {"extension", build_extension}, {"compression", build_compression},
      {"pullback", build_pullback},   {"gluing", build_gluing},
      {"bs", [](const RunConfig& c) {
         RunConfig b = c;
         b.doc["params"]["action"] = "bs";
         return build_gluing(b);
       }},
      {"hyperbolic", build_hyperbolic}, {"cube", build_cube},
  };
  return table;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::ResourceLimit, "cannot write " + p.string());
  out << text;
}

std::string summary_text(const RunConfig& c, const RunOutcome& o) {
  std::ostringstream s;
  s << "construction: " << c.construction << "\n";
  if (o.report) {
    const auto& r = *o.report;
    s << "points: " << r.points << "\n";
    s << "R = " << format_double(r.R) << ", epsilon = " << format_double(r.epsilon) << "\n";
    s << "psd:   " << (r.pass_psd ? "pass" : "FAIL") << "  min eigenvalue " << format_double(r.min_eigenvalue) << "\n";
    s << "unity: " << (r.pass_unity ? "pass" : "FAIL") << "  max |1 - psi| " << format_double(r.max_unity_deviation)
      << " over " << r.unity_pairs << " pairs\n";
    s << "width: " << (r.pass_width ? "pass" : "FAIL") << "  observed " << format_double(r.observed_width)
      << ", predicted " << format_double(r.predicted_width) << "\n";
  }
  for (const auto& e : o.extra) s << e.name << ": " << (e.pass ? "pass" : "FAIL") << "  " << e.detail << "\n";
  s << "exit status: " << o.exit_code << "\n";
  return s.str();
}

std::string mask_to_json(const PointMask& mask) {
  ojson j = ojson::array();
  for (bool b : mask) j.push_back(b);
  return j.dump();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema:
    case ErrorKind::Parameter:
    case ErrorKind::NotQuasiGeodesic:
    case ErrorKind::PropernessViolation:
    case ErrorKind::HomomorphismViolation:
      return 2;
    case ErrorKind::ResourceLimit:
    case ErrorKind::WindowTooSmall:
    case ErrorKind::PlanInfeasible:
      return 3;
    case ErrorKind::Numerical:
      return 4;
    default:
      return 1;
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  try {
    c.doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.doc.is_object()) throw Error(ErrorKind::Schema, "config must be a JSON object");
  try {
    c.construction = c.doc.at("construction").get<std::string>();
    c.R = c.doc.value("R", 1.0);
    c.epsilon = c.doc.value("epsilon", 0.5);
    if (c.doc.contains("window_radius")) {
      const auto& w = c.doc.at("window_radius");
      if (w.is_string()) {
        if (w.get<std::string>() != "auto") throw Error(ErrorKind::Schema, "window_radius must be an integer or \"auto\"");
      } else {
        c.window_radius = w.get<std::int64_t>();
      }
    }
    if (c.doc.contains("tolerances")) {
      const auto& t = c.doc.at("tolerances");
      c.psd_tol = t.value("psd_tol", c.psd_tol);
      c.support_eps = t.value("support_eps", c.support_eps);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("config: ") + e.what());
  }
  if (!builders().count(c.construction)) {
    throw Error(ErrorKind::Schema, "unknown construction '" + c.construction + "'");
  }
  if (!(c.R > 0)) throw Error(ErrorKind::Parameter, "R must be > 0");
  if (!(c.epsilon > 0 && c.epsilon <= 1)) throw Error(ErrorKind::Parameter, "epsilon must lie in (0, 1]");
  if (c.window_radius && *c.window_radius < 0) throw Error(ErrorKind::Parameter, "window_radius must be >= 0");
  return c;
}

RunOutcome run(const RunConfig& config, const RunOptions& options) {
  set_thread_count(options.threads);
  RunOutcome out;
  Built built;
  try {
    built = builders().at(config.construction)(config);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.message = std::string(to_string(e.kind())) + ": " + e.what();
    return out;
  }
  VerifyOptions vo;
  vo.psd_tol = options.psd_tol.value_or(config.psd_tol);
  vo.support_eps = options.support_eps.value_or(config.support_eps);
  if (built.mask) vo.unity_mask = &*built.mask;
  try {
    out.report = verify_kernel(built.kernel, config.R, config.epsilon, built.predicted_width, vo);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.message = std::string(to_string(e.kind())) + ": " + e.what();
    return out;
  }
  out.extra = std::move(built.extra);
  out.diagnostics = std::move(built.diagnostics);
  bool ok = out.report->pass();
  for (const auto& e : out.extra) ok = ok && e.pass;
  out.exit_code = ok ? 0 : 1;
  out.message = ok ? "all checks pass" : "check failure";

  if (!options.out_dir.empty()) {
    const std::filesystem::path dir(options.out_dir);
    std::filesystem::create_directories(dir);
    ojson diag;
    diag["construction"] = config.construction;
    diag["config"] = ojson::parse(config.doc.dump());
    diag["diagnostics"] = out.diagnostics;
    ojson extra = ojson::array();
    for (const auto& e : out.extra) extra.push_back({{"name", e.name}, {"pass", e.pass}, {"detail", e.detail}});
    diag["extra_checks"] = extra;
    diag["exit_status"] = out.exit_code;
    const std::vector<std::pair<std::string, std::string>> files = {
        {"kernel.csv", kernel_to_csv(built.kernel)},
        {"kernel.json", kernel_to_json(built.kernel)},
        {"window.json", window_to_json(*built.kernel.window)},
        {"report.json", report_to_json(*out.report) + "\n"},
        {"diagnostics.json", diag.dump(2) + "\n"},
        {"summary.txt", summary_text(config, out)},
    };
    for (const auto& [name, text] : files) {
      write_file(dir / name, text);
      out.artifacts.push_back(name);
    }
    if (built.mask) {
      write_file(dir / "mask.json", mask_to_json(*built.mask) + "\n");
      out.artifacts.push_back("mask.json");
    }
  }
  return out;
}

namespace {

// Ball sizes from growth formulas (upper bounds where no formula is used).
double estimated_ball(const std::string& family, int rank_or_dim, std::int64_t r) {
  if (family == "free") {
    const double k = 2.0 * rank_or_dim - 1;
    return rank_or_dim == 1 ? 2.0 * static_cast<double>(r) + 1
                            : 1 + 2.0 * rank_or_dim * (std::pow(k, static_cast<double>(r)) - 1) / (k - 1);
  }
  if (family == "zn") {
    // sum_j 2^j C(n,j) C(r,j)
    double total = 0;
    for (int j = 0; j <= rank_or_dim && j <= r; ++j) {
      double term = std::pow(2.0, j);
      for (int i = 0; i < j; ++i) {
        term *= static_cast<double>(rank_or_dim - i) / (i + 1);
        term *= static_cast<double>(r - i) / (i + 1);
      }
      total += term;
    }
    return total;
  }
  // Two generators: bounded by the free group of rank 2.
  return estimated_ball("free", 2, r);
}

}  // namespace

nlohmann::json plan(const RunConfig& c) {
  ojson j;
  j["construction"] = c.construction;
  j["R"] = num(c.R);
  j["epsilon"] = num(c.epsilon);
  std::string family = "zn";
  int dim = param<int>(c, "dim", 1);
  std::int64_t radius = 0;
  bool bound = false;
  const auto& name = c.construction;
  if (name == "folner") {
    const double width = set_diameter(IntegerLattice(dim), folner_box(c));
    radius = radius_or(c, ceil_int(c.R + width) + 1);
  } else if (name == "a_family") {
    radius = radius_or(c, ceil_int(c.R) + 2 * param<std::int64_t>(c, "S", 9) + 1);
  } else if (name == "cover") {
    radius = radius_or(c, 12 * param<std::int64_t>(c, "L", 5));
  } else if (name == "extension") {
    dim = 2;
    bound = param<std::string>(c, "sequence", "product") != "product";
    radius = radius_or(c, ceil_int(c.R) + 2 * param<std::int64_t>(c, "S1", 4) + param<std::int64_t>(c, "S2", 4) + 1);
  } else if (name == "compression") {
    const auto n = param<std::int64_t>(c, "points", 200);
    auto group = std::make_shared<IntegerLattice>(1);
    std::vector<Element> pts;
    for (std::int64_t i = 0; i < n; ++i) pts.push_back(Element{{i}});
    const auto window = std::make_shared<const MetricWindow>(group_window(*group, pts));
    const auto emb = inclusion_embedding_Z(*window);
    std::vector<std::size_t> all(pts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto growth = growth_constants(*window, all);
    // t does not depend on the norm; the plan is re-derived with the row sum at t.
    auto p = plan_compression(emb, c.R, c.epsilon, growth, 1.0, compression_overrides(c));
    const auto phi_t = gaussian_kernel(emb, p.t, window);
    p = plan_compression(emb, c.R, c.epsilon, growth, operator_norm_bound(phi_t).row_sum, compression_overrides(c));
    j["points"] = n;
    j["gram_bytes"] = static_cast<double>(n * n * 8);
    j["t"] = num(p.t);
    j["N"] = p.N;
    j["M0"] = p.M0;
    j["M"] = p.M;
    j["norm"] = num(p.norm);
    return j;
  } else if (name == "tree" || name == "pullback" || name == "hyperbolic" || name == "gluing" || name == "bs") {
    family = "free";
    dim = param<int>(c, "rank", 2);
    radius = radius_or(c, name == "tree" ? 4 : name == "hyperbolic" ? 5 : name == "pullback" ? 3 : 3);
    const bool bs = name == "bs" || param<std::string>(c, "action", "free") == "bs";
    if (bs) {
      family = "bs";
      bound = true;
      radius = radius_or(c, 4);
    }
    if (name == "gluing" || name == "bs") {
      GroupAction act;
      double S0 = 0;
      double S1 = 0;
      if (bs) {
        auto g = std::make_shared<BaumslagSolitar>(param<std::int64_t>(c, "p", 2), param<std::int64_t>(c, "q", 3));
        act = bs_on_bass_serre_tree(g);
        S0 = static_cast<double>(param<std::int64_t>(c, "k", 2));
        S1 = bs_stabilizer_support(*g, param<std::int64_t>(c, "l", 1));
      } else {
        act = free_group_on_tree(std::make_shared<FreeGroup>(dim));
        S0 = static_cast<double>(param<std::int64_t>(c, "S0", 3));
      }
      const auto ov = gluing_overrides(c);
      const auto s = make_schedule(act, c.R, c.epsilon, S0, S1, ov);
      const auto universe = ov.universe_radius.value_or(radius + ceil_int(2 * (S1 + s.L)));
      const double universe_points = estimated_ball(family, dim, universe);
      j["N"] = s.N;
      j["K"] = num(s.K);
      j["L"] = num(s.L);
      j["L_required"] = num(s.L_required);
      j["lambda_epsilon"] = num(s.lambda_epsilon);
      j["mu_R"] = num(s.mu_R);
      j["mu_epsilon"] = num(s.mu_epsilon);
      j["conforming"] = s.conforming;
      j["predicted_width"] = num(s.width());
      j["universe_radius"] = universe;
      j["universe_points_estimate"] = num(universe_points);
      j["feasible"] = universe_points <= static_cast<double>(window_cap()) * 1000 && universe <= (bs ? 24 : 12);
    }
    if (name == "hyperbolic") {
      auto g = std::make_shared<FreeGroup>(dim);
      const auto n = param<std::int64_t>(c, "N_delta", 0) > 0
                         ? param<std::int64_t>(c, "N_delta", 0)
                         : measure_covering_number(*g, c.R, param<double>(c, "delta", 0.0));
      j["N_delta"] = n;
      j["L"] = optional_param<std::int64_t>(params_of(c), "L").value_or(hyperbolic_L(n, c.R, c.epsilon));
    }
  } else if (name == "cube") {
    const auto ccw = complex_from_config(c);
    j["vertices"] = ccw.size();
    j["walls"] = ccw.walls().size();
    j["gram_bytes"] = static_cast<double>(ccw.size() * ccw.size() * 8);
    return j;
  }
  const double points = estimated_ball(family, dim, radius);
  j["window_radius"] = radius;
  j["estimated_points"] = num(points);
  j["estimate_is_upper_bound"] = bound;
  j["gram_bytes"] = num(points * points * 8);
  j["window_cap"] = window_cap();
  j["within_cap"] = points <= static_cast<double>(window_cap());
  return nlohmann::json::parse(j.dump());
}

RunOutcome verify_saved(const std::string& out_dir, const RunOptions& options) {
  RunOutcome out;
  try {
    const std::filesystem::path dir(out_dir);
    const auto saved = report_from_json(read_file(dir / "report.json"));
    auto window = std::make_shared<const MetricWindow>(window_from_json(read_file(dir / "window.json")));
    auto [labels, values] = kernel_from_csv(read_file(dir / "kernel.csv"));
    if (labels != window->labels()) throw Error(ErrorKind::Schema, "kernel labels do not match the window");
    std::optional<PointMask> mask;
    if (std::filesystem::exists(dir / "mask.json")) {
      const auto j = nlohmann::json::parse(read_file(dir / "mask.json"));
      mask = j.get<std::vector<bool>>();
    }
    VerifyOptions vo;
    if (options.psd_tol) vo.psd_tol = *options.psd_tol;
    if (options.support_eps) vo.support_eps = *options.support_eps;
    if (mask) vo.unity_mask = &*mask;
    const KernelMatrix km{window, std::move(values)};
    const auto r = verify_kernel(km, saved.R, saved.epsilon, saved.predicted_width, vo);
    out.report = r;
    const bool same = r.pass_psd == saved.pass_psd && r.pass_unity == saved.pass_unity &&
                      r.pass_width == saved.pass_width && r.points == saved.points &&
                      r.observed_width == saved.observed_width &&
                      r.max_unity_deviation == saved.max_unity_deviation &&
                      std::abs(r.min_eigenvalue - saved.min_eigenvalue) <= 1e-12 * std::max(1.0, std::abs(saved.min_eigenvalue));
    out.extra.push_back({"matches_saved_report", same, same ? "recomputed report agrees" : "recomputed report differs"});
    bool extra_ok = true;
    if (std::filesystem::exists(dir / "diagnostics.json")) {
      const auto diag = nlohmann::json::parse(read_file(dir / "diagnostics.json"));
      for (const auto& e : diag.value("extra_checks", nlohmann::json::array())) {
        const bool pass = e.at("pass").get<bool>();
        out.extra.push_back({e.at("name").get<std::string>(), pass, e.value("detail", std::string())});
        extra_ok = extra_ok && pass;
      }
    }
    out.exit_code = same && r.pass() && extra_ok ? 0 : 1;
    out.message = out.exit_code == 0 ? "verified" : "verification failed";
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.message = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = 2;
    out.message = std::string("Schema: ") + e.what();
  }
  return out;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Ozawa kernel constructions and checks"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  std::optional<double> psd_tol;
  std::optional<double> support_eps;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON run config");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "artifact directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--psd-tol", psd_tol, "PSD tolerance");
    sub->add_option("--support-eps", support_eps, "support threshold for the width check");
  };
  auto* run_cmd = app.add_subcommand("run", "build a kernel and verify it");
  add_common(run_cmd, true);
  auto* plan_cmd = app.add_subcommand("plan", "estimate resources without enumerating");
  add_common(plan_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify", "re-check a saved kernel against its report");
  add_common(verify_cmd, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  RunOptions options{out_dir, threads, psd_tol, support_eps};
  try {
    if (verify_cmd->parsed()) {
      if (out_dir.empty()) {
        std::cerr << "verify needs --out <dir> holding kernel.csv, report.json and window.json\n";
        return 2;
      }
      const auto o = verify_saved(out_dir, options);
      for (const auto& e : o.extra) std::cout << e.name << ": " << (e.pass ? "pass" : "FAIL") << "  " << e.detail << "\n";
      std::cout << o.message << "\n";
      return o.exit_code;
    }
    const auto config = parse_config(read_file(config_path));
    if (plan_cmd->parsed()) {
      std::cout << plan(config).dump(2) << "\n";
      return 0;
    }
    const auto o = run(config, options);
    if (o.report) {
      std::cout << summary_text(config, o);
    } else {
      std::cerr << o.message << "\n";
    }
    return o.exit_code;
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace ozawa::cli
