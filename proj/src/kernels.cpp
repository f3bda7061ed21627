#include "ozawa/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ozawa/linalg.hpp"
#include "ozawa/parallel.hpp"

namespace ozawa {

SparseVector canonicalize(SparseVector v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  out.reserve(v.size());
  for (auto& [k, w] : v) {
    if (!out.empty() && out.back().first == k) {
      out.back().second += w;
    } else {
      out.emplace_back(std::move(k), w);
    }
  }
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

double norm(const SparseVector& a) { return std::sqrt(dot(a, a)); }

SparseVector normalized(SparseVector v) {
  const double n = norm(v);
  if (!(n > 0)) throw Error(ErrorKind::DegenerateFamily, "cannot normalize a zero feature vector");
  for (auto& kv : v) kv.second /= n;
  return v;
}

FeatureMap::FeatureMap(std::vector<SparseVector> rows, double support_radius)
    : rows_(std::move(rows)), support_radius_(support_radius) {}

std::optional<std::string> FeatureMap::violation(double tol) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t k = 0; k < rows_[i].size(); ++k) {
      if (rows_[i][k].second < 0) return "negative weight in row " + std::to_string(i);
      if (k && !(rows_[i][k - 1].first < rows_[i][k].first)) {
        return "row " + std::to_string(i) + " is not canonical";
      }
    }
    const double n2 = dot(rows_[i], rows_[i]);
    if (std::abs(n2 - 1.0) > tol) {
      return "row " + std::to_string(i) + " has squared norm " + format_double(n2);
    }
  }
  return std::nullopt;
}

KernelMatrix kernel_from_feature_map(const FeatureMap& fm, WindowPtr window) {
  const std::size_t n = window->size();
  if (fm.size() != n) {
    throw Error(ErrorKind::Parameter, "feature map has " + std::to_string(fm.size()) +
                                          " rows for a window of " + std::to_string(n) + " points");
  }
  // Intern keys in sorted order so the integer merge visits keys in the same
  // order as dot() and produces identical sums.
  std::vector<const Element*> keys;
  for (const auto& row : fm.rows()) {
    for (const auto& kv : row) keys.push_back(&kv.first);
  }
  std::sort(keys.begin(), keys.end(), [](const Element* a, const Element* b) { return *a < *b; });
  keys.erase(std::unique(keys.begin(), keys.end(), [](const Element* a, const Element* b) { return *a == *b; }),
             keys.end());
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    for (const auto& kv : fm[i]) {
      auto it = std::lower_bound(keys.begin(), keys.end(), &kv.first,
                                 [](const Element* a, const Element* b) { return *a < *b; });
      rows[i].emplace_back(static_cast<std::size_t>(it - keys.begin()), kv.second);
    }
  });
  KernelMatrix km{window, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0;
      auto a = rows[i].begin();
      auto b = rows[j].begin();
      while (a != rows[i].end() && b != rows[j].end()) {
        if (a->first < b->first) {
          ++a;
        } else if (b->first < a->first) {
          ++b;
        } else {
          s += a->second * b->second;
          ++a;
          ++b;
        }
      }
      km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  });
  for (Eigen::Index i = 0; i < km.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) km.values(i, j) = km.values(j, i);
  }
  return km;
}

PsdResult check_psd(const KernelMatrix& km, double tol) {
  PsdResult r;
  const auto n = km.values.rows();
  if (n == 0) {
    r.pass = true;
    return r;
  }
  if ((km.values - km.values.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::Numerical, "check_psd: kernel matrix is not symmetric");
  }
  const auto jac = jacobi_eigenvalues(km.values, 1e-12, 200);
  r.min_eigenvalue = jac.eigenvalues.front();
  r.sweeps = jac.sweeps;
  r.pass = r.min_eigenvalue >= -tol * static_cast<double>(n);
  return r;
}

UnityResult check_unity(const KernelMatrix& km, double R, double epsilon, const PointMask* mask) {
  UnityResult r;
  const auto& w = *km.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (mask && !(*mask)[j]) continue;
      if (w.dist(i, j) <= R) {
        ++r.pairs;
        const double dev = std::abs(1.0 - km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        r.max_deviation = std::max(r.max_deviation, dev);
      }
    }
  }
  r.pass = r.max_deviation < epsilon;
  return r;
}

WidthResult check_width(const KernelMatrix& km, double S, double support_eps) {
  WidthResult r;
  const auto& w = *km.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (std::abs(km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > support_eps) {
        r.observed_width = std::max(r.observed_width, w.dist(i, j));
      }
    }
  }
  r.pass = r.observed_width <= S;
  return r;
}

std::optional<std::pair<std::size_t, std::size_t>> half_norm_identity_check(
    const FeatureMap& fm, const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double tol) {
  for (const auto& [i, j] : pairs) {
    const double lhs = 1.0 - dot(fm[i], fm[j]);
    SparseVector diff = fm[i];
    for (const auto& [k, v] : fm[j]) diff.emplace_back(k, -v);
    diff = canonicalize(std::move(diff));
    const double rhs = 0.5 * dot(diff, diff);
    if (std::abs(lhs - rhs) > tol) return std::make_pair(i, j);
  }
  return std::nullopt;
}

KernelReport verify_kernel(const KernelMatrix& km, double R, double epsilon, double predicted_width,
                           const VerifyOptions& options) {
  KernelReport rep;
  rep.R = R;
  rep.epsilon = epsilon;
  rep.predicted_width = predicted_width;
  rep.points = km.window->size();
  const auto psd = check_psd(km, options.psd_tol);
  rep.min_eigenvalue = psd.min_eigenvalue;
  rep.pass_psd = psd.pass;
  const auto unity = check_unity(km, R, epsilon, options.unity_mask);
  rep.max_unity_deviation = unity.max_deviation;
  rep.unity_pairs = unity.pairs;
  rep.pass_unity = unity.pass;
  const auto width = check_width(km, predicted_width, options.support_eps);
  rep.observed_width = width.observed_width;
  rep.pass_width = width.pass;
  return rep;
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

// Doubles round-trip exactly; infinities and NaN are stored as strings.
nlohmann::ordered_json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return nlohmann::ordered_json::parse(format_double(x));
}

double read_number(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorKind::Schema, "unexpected string where a number was expected: " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string report_to_json(const KernelReport& r) {
  nlohmann::ordered_json j;
  j["R"] = number(r.R);
  j["epsilon"] = number(r.epsilon);
  j["predicted_width"] = number(r.predicted_width);
  j["min_eigenvalue"] = number(r.min_eigenvalue);
  j["max_unity_deviation"] = number(r.max_unity_deviation);
  j["observed_width"] = number(r.observed_width);
  j["points"] = r.points;
  j["unity_pairs"] = r.unity_pairs;
  j["pass_psd"] = r.pass_psd;
  j["pass_unity"] = r.pass_unity;
  j["pass_width"] = r.pass_width;
  return j.dump(2);
}

KernelReport report_from_json(const std::string& text) {
  KernelReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.R = read_number(j.at("R"));
    r.epsilon = read_number(j.at("epsilon"));
    r.predicted_width = read_number(j.at("predicted_width"));
    r.min_eigenvalue = read_number(j.at("min_eigenvalue"));
    r.max_unity_deviation = read_number(j.at("max_unity_deviation"));
    r.observed_width = read_number(j.at("observed_width"));
    r.points = j.value("points", std::size_t{0});
    r.unity_pairs = j.value("unity_pairs", std::size_t{0});
    r.pass_psd = j.at("pass_psd").get<bool>();
    r.pass_unity = j.at("pass_unity").get<bool>();
    r.pass_width = j.at("pass_width").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("report JSON: ") + e.what());
  }
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::string kernel_to_csv(const KernelMatrix& km) {
  std::string out;
  const auto& w = *km.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += csv_field(w.label(i));
  }
  out += '\n';
  for (Eigen::Index i = 0; i < km.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < km.values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(km.values(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string kernel_to_json(const KernelMatrix& km) {
  nlohmann::ordered_json j;
  j["points"] = km.window->labels();
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < km.values.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < km.values.cols(); ++k) row.push_back(number(km.values(i, k)));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j.dump();
}

std::pair<std::vector<std::string>, Eigen::MatrixXd> kernel_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Schema, "kernel CSV is empty");
  auto labels = split_csv_line(line);
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::Schema, "kernel CSV has too few rows");
    const auto fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != n) throw Error(ErrorKind::Schema, "kernel CSV row width");
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        m(i, j) = std::stod(fields[static_cast<std::size_t>(j)]);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Schema, "kernel CSV: bad number '" + fields[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
  return {std::move(labels), std::move(m)};
}

}  // namespace ozawa
