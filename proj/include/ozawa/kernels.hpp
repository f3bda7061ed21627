#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ozawa/spaces.hpp"

namespace ozawa {

/// Sorted (key, weight) pairs with distinct keys.
using SparseVector = std::vector<std::pair<Element, double>>;

/// Sorts by key and merges duplicate keys by adding weights.
SparseVector canonicalize(SparseVector v);
double dot(const SparseVector& a, const SparseVector& b);
double norm(const SparseVector& a);
/// Scales to unit l2 norm; throws DegenerateFamily on a zero vector.
SparseVector normalized(SparseVector v);

/// One finitely supported vector per window point (same order as the window).
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(std::vector<SparseVector> rows,
                      double support_radius = std::numeric_limits<double>::infinity());

  std::size_t size() const { return rows_.size(); }
  const SparseVector& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<SparseVector>& rows() const { return rows_; }
  double support_radius() const { return support_radius_; }

  /// Negative weight or non-unit row (tolerance 1e-12); nullopt if valid.
  std::optional<std::string> violation(double tol = 1e-12) const;

 private:
  std::vector<SparseVector> rows_;
  double support_radius_;
};

struct KernelMatrix {
  WindowPtr window;
  Eigen::MatrixXd values;
};

/// values(x,y) = <fm(x), fm(y)>. Rows are assembled in parallel; each entry is
/// a single ordered dot product, so the result is schedule independent.
KernelMatrix kernel_from_feature_map(const FeatureMap& fm, WindowPtr window);

struct PsdResult {
  double min_eigenvalue = 0;
  int sweeps = 0;
  bool pass = false;
};

/// Smallest Gram eigenvalue (cyclic Jacobi); pass iff >= -tol * n.
PsdResult check_psd(const KernelMatrix& km, double tol = 1e-10);

/// Restricts a check to pairs whose points both satisfy the mask.
using PointMask = std::vector<bool>;

struct UnityResult {
  double max_deviation = 0;
  std::size_t pairs = 0;
  bool pass = false;
};

/// max |1 - values(x,y)| over pairs with d(x,y) <= R; pass iff < epsilon.
UnityResult check_unity(const KernelMatrix& km, double R, double epsilon, const PointMask* mask = nullptr);

struct WidthResult {
  double observed_width = 0;
  bool pass = false;
};

/// max d(x,y) over pairs with |values(x,y)| > support_eps; pass iff <= S.
WidthResult check_width(const KernelMatrix& km, double S, double support_eps = 1e-12);

/// 1 - <fm(x),fm(y)> = ||fm(x) - fm(y)||^2 / 2 for every listed pair (within
/// 1e-10). Returns the first offending pair.
std::optional<std::pair<std::size_t, std::size_t>> half_norm_identity_check(
    const FeatureMap& fm, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double tol = 1e-10);

struct VerifyOptions {
  double psd_tol = 1e-10;
  double support_eps = 1e-12;
  const PointMask* unity_mask = nullptr;
};

struct KernelReport {
  double R = 0;
  double epsilon = 0;
  double predicted_width = 0;
  double min_eigenvalue = 0;
  double max_unity_deviation = 0;
  double observed_width = 0;
  std::size_t points = 0;
  std::size_t unity_pairs = 0;
  bool pass_psd = false;
  bool pass_unity = false;
  bool pass_width = false;

  bool pass() const { return pass_psd && pass_unity && pass_width; }
};

KernelReport verify_kernel(const KernelMatrix& km, double R, double epsilon, double predicted_width,
                           const VerifyOptions& options = {});

std::string report_to_json(const KernelReport& report);
KernelReport report_from_json(const std::string& text);

/// CSV with a header row of point labels; values printed with 17 digits.
std::string kernel_to_csv(const KernelMatrix& km);
std::string kernel_to_json(const KernelMatrix& km);
/// Reads the values of a kernel CSV; returns labels and the matrix.
std::pair<std::vector<std::string>, Eigen::MatrixXd> kernel_from_csv(const std::string& text);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace ozawa
