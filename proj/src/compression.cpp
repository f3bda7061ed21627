#include "ozawa/compression.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "ozawa/linalg.hpp"
#include "ozawa/parallel.hpp"

namespace ozawa {

std::optional<std::string> embedding_violation(const UniformEmbedding& emb, const MetricWindow& window) {
  if (emb.f.size() != window.size()) return "embedding size does not match the window";
  const double exponent = (1.0 + emb.alpha) / 2.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    for (std::size_t j = i + 1; j < window.size(); ++j) {
      const double d = window.dist(i, j);
      const double df = (emb.f[i] - emb.f[j]).norm();
      if (df > emb.C * d + emb.D + 1e-9) {
        return "upper bound fails at " + window.label(i) + ", " + window.label(j);
      }
      // The strongest lower bound is at n = floor(d).
      const double n = std::floor(d + 1e-9);
      if (n >= static_cast<double>(emb.n0) && df < std::pow(n, exponent) - 1e-9) {
        return "lower bound fails at " + window.label(i) + ", " + window.label(j);
      }
    }
  }
  return std::nullopt;
}

UniformEmbedding inclusion_embedding_Z(const MetricWindow& window) {
  UniformEmbedding emb;
  for (const auto& p : window.points()) {
    if (p.v.size() != 1) throw Error(ErrorKind::Parameter, "inclusion embedding expects a window of Z");
    emb.f.push_back(Eigen::VectorXd::Constant(1, static_cast<double>(p.v[0])));
  }
  return emb;
}

KernelMatrix gaussian_kernel(const UniformEmbedding& emb, double t, WindowPtr window) {
  if (!(t > 0)) throw Error(ErrorKind::Parameter, "Gaussian scale must be positive");
  const auto n = static_cast<Eigen::Index>(window->size());
  if (emb.f.size() != window->size()) throw Error(ErrorKind::Parameter, "embedding size does not match the window");
  KernelMatrix km{window, Eigen::MatrixXd(n, n)};
  parallel_for(window->size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < window->size(); ++j) {
      km.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::exp(-(emb.f[i] - emb.f[j]).squaredNorm() / t);
    }
  });
  return km;
}

NormBound operator_norm_bound(const KernelMatrix& phi) {
  if ((phi.values.array() < 0).any()) throw Error(ErrorKind::Parameter, "row-sum bound needs nonnegative entries");
  NormBound b;
  b.row_sum = phi.values.rowwise().sum().maxCoeff();
  b.top_eigenvalue = jacobi_eigenvalues(phi.values, 1e-12, 200).eigenvalues.back();
  return b;
}

KernelMatrix truncate_kernel(const KernelMatrix& phi, double M) {
  if (M < 0) throw Error(ErrorKind::Parameter, "truncation radius must be >= 0");
  KernelMatrix out = phi;
  const auto& w = *phi.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w.dist(i, j) > M) out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
    }
  }
  return out;
}

double truncation_error_bound(const KernelMatrix& phi, double M) {
  const auto cut = truncate_kernel(phi, M);
  return (phi.values - cut.values).cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

constexpr std::int64_t kMaxSeriesLength = 50'000'000;

}  // namespace

CompressionPlan plan_compression(const UniformEmbedding& emb, double R, double epsilon, const GrowthConstants& growth,
                                 double window_norm, const PlanOverrides& overrides) {
  if (!(R > 0) || !(epsilon > 0 && epsilon < 1)) {
    throw Error(ErrorKind::Parameter, "compression needs R > 0 and 0 < epsilon < 1");
  }
  CompressionPlan plan;
  plan.R = R;
  plan.epsilon = epsilon;
  plan.B = growth.B;
  plan.L = growth.L;
  plan.overridden = overrides.t || overrides.norm || overrides.M0 || overrides.M;

  const double reach = emb.C * R + emb.D;
  plan.t_lower = reach * reach / -std::log1p(-epsilon / 2);
  plan.t = overrides.t.value_or(plan.t_lower * 1.001);
  if (!(plan.t > plan.t_lower)) throw Error(ErrorKind::PlanInfeasible, "Gaussian scale below (CR+D)^2/(-ln(1-eps/2))");

  // Smallest N >= n0 with L exp(-N^alpha / t) < 1.
  const double log_l = std::log(plan.L);
  plan.N = std::max<std::int64_t>(emb.n0, 1);
  while (!(std::pow(static_cast<double>(plan.N), emb.alpha) / plan.t > log_l)) {
    if (++plan.N > kMaxSeriesLength) throw Error(ErrorKind::PlanInfeasible, "no N with L exp(-N^alpha/t) < 1");
  }
  plan.ratio = plan.L * std::exp(-std::pow(static_cast<double>(plan.N), emb.alpha) / plan.t);

  // Global row-sum bound from the growth constants (diagnostic).
  const double head = plan.L > 1 ? plan.B * (std::pow(plan.L, static_cast<double>(plan.N + 1)) - 1) / (plan.L - 1)
                                 : plan.B * static_cast<double>(plan.N + 1);
  plan.global_norm_bound = head + plan.B * std::pow(plan.ratio, static_cast<double>(plan.N + 1)) / (1 - plan.ratio);

  plan.norm = overrides.norm.value_or(window_norm);
  if (!(plan.norm >= 1)) throw Error(ErrorKind::PlanInfeasible, "operator norm bound must be >= 1");
  const double root = std::sqrt(plan.norm);
  plan.series_target = epsilon / (4 * (4 * root + 1));

  // sum_{n > M0} |a_n| = sum_{n <= M0} a_n since the a_n sum to sqrt(1-1) = 0
  // and are negative for n >= 1.
  if (overrides.M0) {
    plan.M0 = *overrides.M0;
    plan.a = sqrt_series_coefficients<double>(static_cast<int>(plan.M0));
    double partial = 0;
    for (double a : plan.a) partial += a;
    plan.series_tail = partial;
  } else {
    double a = 1.0;
    double partial = 1.0;
    std::int64_t m = 0;
    while (!(root * partial < plan.series_target)) {
      a *= (static_cast<double>(m) - 0.5) / static_cast<double>(m + 1);
      partial += a;
      if (++m > kMaxSeriesLength) throw Error(ErrorKind::PlanInfeasible, "series truncation M0 exceeds limit");
    }
    plan.M0 = m;
    plan.series_tail = partial;
    plan.a = sqrt_series_coefficients<double>(static_cast<int>(m));
  }

  // Smallest M >= R with sum_{n>M} ratio^n below the target, in log space.
  plan.m_target_log = std::log(root * epsilon) - static_cast<double>(plan.M0 + 3) * std::log(2.0) -
                      std::log(4 * root + 1) - std::log(plan.B);
  const double log_r = std::log(plan.ratio);
  const double log_tail_base = -std::log1p(-plan.ratio);
  auto tail_log = [&](std::int64_t M) { return static_cast<double>(M + 1) * log_r + log_tail_base; };
  if (overrides.M) {
    plan.M = *overrides.M;
  } else {
    const double needed = (plan.m_target_log - log_tail_base) / log_r - 1;
    plan.M = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(R)),
                                    static_cast<std::int64_t>(std::floor(needed)) + 1);
    while (tail_log(plan.M) >= plan.m_target_log) ++plan.M;
    while (plan.M > static_cast<std::int64_t>(std::ceil(R)) && tail_log(plan.M - 1) < plan.m_target_log) --plan.M;
  }
  plan.m_tail_log = tail_log(plan.M);
  return plan;
}

CompressionResult compression_kernel(const UniformEmbedding& emb, const CompressionPlan& plan, WindowPtr window) {
  CompressionResult res;
  res.plan = plan;
  res.phi = gaussian_kernel(emb, plan.t, window);
  res.norm = operator_norm_bound(res.phi);
  if (res.norm.row_sum > plan.norm * (1 + 1e-12)) {
    throw Error(ErrorKind::PlanInfeasible, "window row sum exceeds the planned operator norm bound");
  }
  const KernelMatrix phi_m = truncate_kernel(res.phi, static_cast<double>(plan.M));
  const auto n = phi_m.values.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - phi_m.values / plan.norm;
  res.W = std::sqrt(plan.norm) * matrix_polynomial(a, plan.a);
  res.psi = KernelMatrix{window, res.W.transpose() * res.W};
  // Symmetrize exactly; the product is symmetric up to rounding.
  res.psi.values = (0.5 * (res.psi.values + res.psi.values.transpose())).eval();
  res.max_entry_error = (res.phi.values - res.psi.values).cwiseAbs().maxCoeff();
  return res;
}

CompressionResult run_compression(const UniformEmbedding& emb, double R, double epsilon, WindowPtr window,
                                  const PlanOverrides& overrides) {
  if (auto v = embedding_violation(emb, *window)) throw Error(ErrorKind::EmbeddingInvalid, *v);
  std::vector<std::size_t> all(window->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const GrowthConstants growth = growth_constants(*window, all);
  const double reach = emb.C * R + emb.D;
  const double t = overrides.t.value_or(reach * reach / -std::log1p(-epsilon / 2) * 1.001);
  const double row_sum = operator_norm_bound(gaussian_kernel(emb, t, window)).row_sum;
  const CompressionPlan plan = plan_compression(emb, R, epsilon, growth, row_sum, overrides);
  return compression_kernel(emb, plan, window);
}

Eigen::MatrixXd exact_sqrt_oracle(const Eigen::MatrixXd& phi, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.size() && ev.minCoeff() < -tol) throw Error(ErrorKind::Numerical, "matrix is not positive semidefinite");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace ozawa
