#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "ozawa/kernels.hpp"

namespace ozawa {

/// f: window point -> R^m, with the affine upper bound C d + D and the lower
/// bound ||f(x)-f(y)|| >= n^{(1+alpha)/2} whenever d(x,y) >= n >= n0.
struct UniformEmbedding {
  std::vector<Eigen::VectorXd> f;  // indexed like the window
  double C = 1;
  double D = 0;
  double alpha = 1;
  std::int64_t n0 = 1;
};

/// Checks both bounds on every window pair (integer-valued metric expected);
/// returns the first failure.
std::optional<std::string> embedding_violation(const UniformEmbedding& emb, const MetricWindow& window);

/// f = inclusion for a window of Z: C = 1, D = 0, alpha = 1, n0 = 1.
UniformEmbedding inclusion_embedding_Z(const MetricWindow& window);

/// phi(x,y) = exp(-||f(x)-f(y)||^2 / t).
KernelMatrix gaussian_kernel(const UniformEmbedding& emb, double t, WindowPtr window);

struct NormBound {
  double row_sum = 0;        // sup_x sum_y phi(x,y), an upper bound on ||U_phi||
  double top_eigenvalue = 0;  // exact on the window
};

/// Requires nonnegative entries. The eigenvalue comes from the Jacobi solver.
NormBound operator_norm_bound(const KernelMatrix& phi);

/// phi_M(x,y) = phi(x,y) if d(x,y) <= M, else 0.
KernelMatrix truncate_kernel(const KernelMatrix& phi, double M);
/// Row-sum bound on ||U_phi - U_phi_M||.
double truncation_error_bound(const KernelMatrix& phi, double M);

struct PlanOverrides {
  std::optional<double> t;
  std::optional<double> norm;
  std::optional<std::int64_t> M0;
  std::optional<std::int64_t> M;
};

struct CompressionPlan {
  double R = 0;
  double epsilon = 0;
  double t = 0;        // Gaussian scale
  double t_lower = 0;  // (CR+D)^2 / (-ln(1 - eps/2))
  double B = 1;
  double L = 1;
  std::int64_t N = 0;
  double ratio = 0;  // L exp(-N^alpha / t)
  double norm = 1;   // value used for ||U_phi||
  double global_norm_bound = 0;
  std::int64_t M0 = 0;
  std::int64_t M = 0;
  double series_tail = 0;  // sum_{n > M0} |a_n|
  double series_target = 0;
  double m_tail_log = 0;    // log of sum_{n > M} ratio^n
  double m_target_log = 0;  // log of the right-hand side it must beat
  std::vector<double> a;  // a_0 .. a_M0
  bool overridden = false;

  /// Width bound 2 M0 M of the resulting kernel.
  double width() const { return 2.0 * static_cast<double>(M0) * static_cast<double>(M); }
};

/// Constants of the construction. `window_norm` is the row-sum bound measured
/// on the window; it is used for ||U_phi|| unless overridden. Throws
/// PlanInfeasible if an inequality cannot be met.
CompressionPlan plan_compression(const UniformEmbedding& emb, double R, double epsilon, const GrowthConstants& growth,
                                 double window_norm, const PlanOverrides& overrides = {});

struct CompressionResult {
  CompressionPlan plan;
  KernelMatrix phi;
  KernelMatrix psi;
  Eigen::MatrixXd W;
  NormBound norm;
  double max_entry_error = 0;  // max |phi - psi|
};

/// W = norm^{1/2} sum_{n<=M0} a_n (I - U_{phi_M}/norm)^n and psi = W^T W.
CompressionResult compression_kernel(const UniformEmbedding& emb, const CompressionPlan& plan, WindowPtr window);

/// Plans on the window (Gaussian scale, window row sum, growth on all points)
/// and runs the construction.
CompressionResult run_compression(const UniformEmbedding& emb, double R, double epsilon, WindowPtr window,
                                  const PlanOverrides& overrides = {});

/// Positive square root by eigendecomposition (an independent oracle for the
/// series). Throws Numerical on an eigenvalue below -tol.
Eigen::MatrixXd exact_sqrt_oracle(const Eigen::MatrixXd& phi, double tol = 1e-10);

}  // namespace ozawa
