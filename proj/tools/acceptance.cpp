// Acceptance runner: one PASS/FAIL line per criterion.
//
// Every run goes through the CLI runner twice (artifacts into two scratch
// directories); the second copy feeds the determinism line. Exit status is 0
// once all criteria were evaluated, whatever their outcome; --strict makes
// any FAIL line exit 1.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ozawa/apps.hpp"
#include "ozawa/extensions.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace ozawa;
using namespace ozawa::cli;

namespace {

struct Trial {
  RunOutcome outcome;
  double seconds = 0;
  bool identical = false;
  std::string mismatch;
};

fs::path g_root;
std::map<std::string, Trial> g_trials;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const Trial& trial(const std::string& name, const std::string& config) {
  if (auto it = g_trials.find(name); it != g_trials.end()) return it->second;
  const auto cfg = parse_config(config);
  const fs::path a = g_root / name / "a";
  const fs::path b = g_root / name / "b";
  fs::remove_all(g_root / name);
  Trial t;
  const auto start = std::chrono::steady_clock::now();
  t.outcome = run(cfg, {a.string(), 1, {}, {}});
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto again = run(cfg, {b.string(), 1, {}, {}});
  t.identical = t.outcome.artifacts == again.artifacts && t.outcome.exit_code == again.exit_code;
  for (const auto& f : t.outcome.artifacts) {
    if (slurp(a / f) != slurp(b / f)) {
      t.identical = false;
      t.mismatch = f;
      break;
    }
  }
  if (!t.outcome.report) std::cerr << name << ": " << t.outcome.message << "\n";
  return g_trials.emplace(name, std::move(t)).first->second;
}

const ExtraCheck* extra(const Trial& t, const std::string& name) {
  for (const auto& e : t.outcome.extra) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

bool extra_pass(const Trial& t, const std::string& name) {
  const auto* e = extra(t, name);
  return e && e->pass;
}

bool suite_pass(const Trial& t) { return t.outcome.report && t.outcome.report->pass(); }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::vector<std::string> g_lines;
bool g_all_pass = true;

void line(int n, bool pass, const std::string& detail) {
  std::ostringstream s;
  s << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << "  " << detail;
  g_lines.push_back(s.str());
  std::cout << s.str() << std::endl;
  g_all_pass = g_all_pass && pass;
}

// Configs, by trial name.
const std::vector<std::pair<std::string, std::string>>& configs() {
  static const std::vector<std::pair<std::string, std::string>> c = {
      {"a_family", R"({"construction":"a_family","R":1,"epsilon":0.2,"params":{"S":9,"family_epsilon":0.25}})"},
      {"folner", R"({"construction":"folner","R":2,"epsilon":0.5,"params":{"dim":1}})"},
      {"tree", R"({"construction":"tree","R":2,"epsilon":1,"window_radius":4,"params":{"rank":2,"S":5}})"},
      {"cover", R"({"construction":"cover","R":1,"epsilon":0.5,"params":{"dim":1,"L":10}})"},
      {"extension_product",
       R"({"construction":"extension","R":1,"epsilon":0.5,"params":{"sequence":"product","S1":4,"S2":4}})"},
      {"extension_dihedral",
       R"({"construction":"extension","R":1,"epsilon":0.5,"params":{"sequence":"dihedral","S1":8,"S2":4}})"},
      {"compression", R"({"construction":"compression","R":2,"epsilon":0.5,"params":{"points":200}})"},
      {"pullback", R"({"construction":"pullback","R":1,"epsilon":0.5,"params":{"rank":2,"S0":3}})"},
      {"gluing_free",
       R"({"construction":"gluing","R":1,"epsilon":0.5,"window_radius":3,"params":{"action":"free","S0":3},)"
       R"("overrides":{"L":6,"lambda_epsilon":0.5,"mu_R":1,"mu_epsilon":0.5,"universe_radius":5}})"},
      {"hyperbolic", R"({"construction":"hyperbolic","R":1,"epsilon":1,"window_radius":5,"params":{"rank":2}})"},
      {"cube_path",
       R"({"construction":"cube","R":1,"epsilon":0.5,"params":{"complex":{"type":"path","lo":-20,"hi":20}}})"},
      {"cube_tree_product",
       R"({"construction":"cube","R":1,"epsilon":0.5,"params":{"complex":{"type":"tree_product","rank":2,"radius":1}}})"},
      {"bs",
       R"({"construction":"bs","R":1,"epsilon":0.5,"window_radius":4,"params":{"p":2,"q":3,"k":6,"l":1},)"
       R"("overrides":{"L":2,"lambda_epsilon":0.5,"mu_R":1,"mu_epsilon":0.5}})"},
  };
  return c;
}

const Trial& named(const std::string& name) {
  for (const auto& [n, c] : configs()) {
    if (n == name) return trial(n, c);
  }
  throw std::logic_error("unknown trial " + name);
}

void criterion1() {
  bool pass = true;
  std::ostringstream detail;
  double slowest = 0;
  std::string slowest_name;
  for (const auto& [name, cfg] : configs()) {
    const auto& t = trial(name, cfg);
    const auto& r = t.outcome.report;
    const bool ok = r && r->points <= 500 && r->min_eigenvalue >= -1e-10 * static_cast<double>(r->points) &&
                    t.seconds < 60;
    if (!ok) {
      pass = false;
      detail << name << " failed (" << (r ? "min eig " + fmt(r->min_eigenvalue) + ", n " + std::to_string(r->points)
                                          : t.outcome.message)
             << ", " << fmt(t.seconds) << " s); ";
    }
    if (t.seconds > slowest) {
      slowest = t.seconds;
      slowest_name = name;
    }
  }
  detail << configs().size() << " runs, slowest " << slowest_name << " " << fmt(slowest) << " s";
  line(1, pass, detail.str());
}

void criterion2() {
  const auto& t = named("a_family");
  const auto& r = t.outcome.report;
  const bool pass = suite_pass(t) && extra_pass(t, "a_family") && r->predicted_width == 18 &&
                    r->observed_width <= 18 && r->max_unity_deviation < 2 * 0.2;
  line(2, pass,
       "family at eps_A = 0.25; max |1 - psi| " + (r ? fmt(r->max_unity_deviation) : "?") + " < 0.4, width " +
           (r ? fmt(r->observed_width) : "?") + " <= 18");
}

void criterion3() {
  const auto& t = named("folner");
  const bool pass = suite_pass(t) && extra_pass(t, "folner_ratio") && extra_pass(t, "left_invariance");
  const auto* inv = extra(t, "left_invariance");
  line(3, pass, "Z box at R = 2, eps = 0.5; " + (inv ? inv->detail : std::string("no invariance check")));
}

void criterion4() {
  const auto& t = named("tree");
  FreeGroup f(2);
  const auto parent = free_group_ray_parent(f, 1);
  const auto ball = ball_elements(f, f.identity(), 4);
  const std::int64_t S = 5;
  std::vector<std::set<Element>> sets;
  for (const auto& g : ball) {
    const auto v = tree_ray_set(parent, g, S);
    sets.emplace_back(v.begin(), v.end());
  }
  std::size_t pairs = 0;
  std::size_t over_d = 0;
  std::size_t over_2d = 0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t j = 0; j < ball.size(); ++j) {
      std::vector<Element> diff;
      std::set_symmetric_difference(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                                    std::back_inserter(diff));
      const auto d = static_cast<std::size_t>(f.distance(ball[i], ball[j]));
      ++pairs;
      over_d += diff.size() > d;
      over_2d += diff.size() > 2 * d;
    }
  }
  const bool pass = suite_pass(t) && over_d == 0;
  line(4, pass,
       "unity/width " + std::string(suite_pass(t) ? "pass" : "fail") + "; |A triangle A'| <= d violated on " +
           std::to_string(over_d) + " of " + std::to_string(pairs) + " pairs (<= 2d violated on " +
           std::to_string(over_2d) + ")");
}

void criterion5() {
  const auto& t = named("cover");
  const auto* e = extra(t, "cover_bound");
  line(5, suite_pass(t) && extra_pass(t, "cover_bound"), e ? e->detail : t.outcome.message);
}

void criterion6() {
  const auto& p = named("extension_product");
  const auto& d = named("extension_dihedral");
  std::size_t triples = 0;
  std::size_t violations = 0;
  for (const auto& seq : {product_sequence(24), dihedral_sequence(24)}) {
    auto elements = ball_elements(seq.gamma(), seq.gamma().identity(), 3);
    elements.resize(std::min<std::size_t>(elements.size(), 20));
    std::vector<Element> quotient;
    for (const auto& g : seq.quotient_elements()) {
      if (seq.length_g(g) <= 12) quotient.push_back(g);
    }
    if (quotient.size() > 25) quotient.resize(25);
    const auto rep = verify_distance_lemma(seq, all_triples(elements, quotient));
    triples += rep.triples;
    violations += rep.violations_i + rep.violations_ii + rep.violations_iii;
  }
  const bool pass = suite_pass(p) && extra_pass(p, "factorization") && suite_pass(d) && extra_pass(d, "two_path") &&
                    triples >= 10000 && violations == 0;
  const auto* fac = extra(p, "factorization");
  line(6, pass,
       "factorization " + (fac ? fac->detail : std::string("missing")) + "; dihedral suite " +
           (suite_pass(d) ? "pass" : "fail") + "; lemma " + std::to_string(violations) + " violations on " +
           std::to_string(triples) + " triples");
}

void criterion7() {
  const auto& t = named("compression");
  IntegerLattice z(1);
  std::vector<Element> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(Element{{i}});
  const auto w = std::make_shared<const MetricWindow>(group_window(z, pts));
  const auto emb = inclusion_embedding_Z(*w);
  const auto res = run_compression(emb, 2, 0.5, w);
  const auto phi_m = truncate_kernel(gaussian_kernel(emb, res.plan.t, w), static_cast<double>(res.plan.M));
  const Eigen::MatrixXd v = exact_sqrt_oracle(phi_m.values);
  const double sq = (v * v - phi_m.values).norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v - res.W);
  const double gap = es.eigenvalues().cwiseAbs().maxCoeff();
  const double bound = std::sqrt(res.plan.norm) * res.plan.series_tail;
  const bool pass = suite_pass(t) && extra_pass(t, "entrywise") && res.max_entry_error < 0.25 && sq < 1e-9 &&
                    gap < bound;
  line(7, pass,
       "max |phi - psi| " + fmt(res.max_entry_error) + " < 0.25, width bound 2 M0 M = " + fmt(res.plan.width()) +
           ", ||V^2 - U||_F " + fmt(sq) + ", ||V - W|| " + fmt(gap) + " < " + fmt(bound));
}

void criterion8() {
  const auto& f = named("gluing_free");
  const auto& b = named("bs");
  const auto& r = b.outcome.report;
  const bool pass = suite_pass(f) && extra_pass(f, "two_path") && r && r->pass_psd && r->pass_width &&
                    extra_pass(b, "two_path") && b.seconds < 300;
  const auto* tp = extra(b, "two_path");
  line(8, pass,
       "F_2 suite " + std::string(suite_pass(f) ? "pass" : "fail") + "; BS(2,3) psd " +
           (r && r->pass_psd ? "pass" : "fail") + ", width " + (r ? fmt(r->observed_width) + " <= " +
           fmt(r->predicted_width) : "?") + ", two-path " + (tp ? tp->detail : "missing") + ", " +
           fmt(b.seconds) + " s");
}

void criterion9() {
  const auto& t = named("hyperbolic");
  const auto* m = extra(t, "multiplicity");
  const auto* l = extra(t, "lebesgue");
  const bool pass = suite_pass(t) && extra_pass(t, "multiplicity") && extra_pass(t, "lebesgue");
  line(9, pass,
       "multiplicity " + (m ? m->detail + (m->pass ? " ok" : " violated") : std::string("?")) + "; Lebesgue " +
           (l ? l->detail + (l->pass ? " ok" : " violated") : std::string("?")) + "; kernel suite " +
           (suite_pass(t) ? "pass" : "fail"));
}

void criterion10() {
  const auto& p = named("cube_path");
  const auto& q = named("cube_tree_product");
  bool bounds = true;
  for (const auto& ccw : {path_complex(-20, 20), product_complex(tree_complex(2, 1), tree_complex(2, 1))}) {
    const auto m = cube_metric_window(ccw);
    try {
      const auto emb = cube_embedding(ccw, m, 0.25);
      bounds = bounds && !embedding_violation(emb.embedding, m).has_value();
    } catch (const Error&) {
      bounds = false;
    }
  }
  const auto* dp = extra(p, "direct_compression");
  const auto* dq = extra(q, "direct_compression");
  const bool pass = bounds && extra_pass(p, "direct_compression") && extra_pass(q, "direct_compression");
  line(10, pass,
       std::string("embedding bounds ") + (bounds ? "hold" : "fail") + "; path " + (dp ? dp->detail : "missing") +
           "; tree x tree " + (dq ? dq->detail : "missing"));
}

void criterion11() {
  std::vector<std::string> bad;
  for (const auto& [name, trial] : g_trials) {
    if (!trial.identical) bad.push_back(name + (trial.mismatch.empty() ? "" : " (" + trial.mismatch + ")"));
  }
  std::string detail = std::to_string(g_trials.size() - bad.size()) + " of " + std::to_string(g_trials.size()) +
                       " runs byte-identical";
  for (const auto& b : bad) detail += "; differs: " + b;
  line(11, bad.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::strcmp(argv[i], "--strict") == 0;
  g_root = fs::temp_directory_path() / "ozawa_acceptance";
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 2;
  }
  return strict && !g_all_pass ? 1 : 0;
}
