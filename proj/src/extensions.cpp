#include "ozawa/extensions.hpp"

#include <algorithm>
#include <set>

#include "ozawa/parallel.hpp"

namespace ozawa {

ShortExactSequence::ShortExactSequence(GroupPtr gamma, GroupPtr quotient, Projection pi, Membership in_h,
                                       std::int64_t section_radius)
    : gamma_(std::move(gamma)),
      quotient_(std::move(quotient)),
      pi_(std::move(pi)),
      in_h_(std::move(in_h)),
      section_radius_(section_radius) {
  // Elements come back sorted, so the first minimal-length preimage seen is
  // the lexicographically least one.
  std::map<Element, std::int64_t> best_len;
  for (const auto& x : ball_elements(*gamma_, gamma_->identity(), section_radius)) {
    const Element g = pi_(x);
    const std::int64_t len = gamma_->length(x);
    auto it = best_len.find(g);
    if (it == best_len.end() || len < it->second) {
      best_len[g] = len;
      section_[g] = x;
    }
  }
}

const Element& ShortExactSequence::sigma(const Element& g) const {
  auto it = section_.find(g);
  if (it == section_.end()) {
    throw Error(ErrorKind::WindowTooSmall, "no preimage of " + quotient_->format(g) +
                                               " within the section ball of radius " +
                                               std::to_string(section_radius_));
  }
  return it->second;
}

std::int64_t ShortExactSequence::length_g(const Element& g) const { return gamma_->length(sigma(g)); }

double ShortExactSequence::dist_g(const Element& g1, const Element& g2) const {
  return static_cast<double>(length_g(quotient_->multiply(quotient_->inverse(g1), g2)));
}

double ShortExactSequence::dist_h(const Element& h1, const Element& h2) const {
  return static_cast<double>(gamma_->distance(h1, h2));
}

double ShortExactSequence::dist_gamma(const Element& a, const Element& b) const {
  return static_cast<double>(gamma_->distance(a, b));
}

Element ShortExactSequence::cocycle(const Element& gamma, const Element& g) const {
  const Element shift = quotient_->multiply(quotient_->inverse(pi_(gamma)), g);
  const Element c = gamma_->multiply(gamma_->multiply(gamma_->inverse(sigma(g)), gamma), sigma(shift));
  if (!in_h_(c)) {
    throw Error(ErrorKind::HomomorphismViolation, "cocycle value " + gamma_->format(c) + " is not in H");
  }
  return c;
}

std::vector<Element> ShortExactSequence::quotient_elements() const {
  std::vector<Element> out;
  for (const auto& [g, s] : section_) out.push_back(g);
  return out;
}

std::optional<std::string> verify_sequence(const ShortExactSequence& seq, const std::vector<Element>& sample) {
  const Group& G = seq.quotient();
  const Group& Gamma = seq.gamma();
  for (const auto& x : sample) {
    const bool kernel = seq.project(x) == G.identity();
    if (kernel != seq.in_h(x)) return "kernel of pi differs from H at " + Gamma.format(x);
    for (const auto& y : sample) {
      if (seq.project(Gamma.multiply(x, y)) != G.multiply(seq.project(x), seq.project(y))) {
        return "pi is not multiplicative at " + Gamma.format(x) + ", " + Gamma.format(y);
      }
    }
  }
  std::set<std::pair<Element, Element>> images;
  for (const auto& x : sample) {
    const Element g = seq.project(x);
    if (!images.emplace(g, seq.cocycle(x, g)).second) {
      return "gamma -> (pi(gamma), c(gamma, pi(gamma))) is not injective at " + Gamma.format(x);
    }
  }
  return std::nullopt;
}

std::vector<Triple> all_triples(const std::vector<Element>& elements, const std::vector<Element>& quotient_sample) {
  std::vector<Triple> out;
  out.reserve(elements.size() * elements.size() * quotient_sample.size());
  for (const auto& x : elements) {
    for (const auto& y : elements) {
      for (const auto& g : quotient_sample) out.push_back({x, y, g});
    }
  }
  return out;
}

LemmaReport verify_distance_lemma(const ShortExactSequence& seq, const std::vector<Triple>& triples) {
  struct Flags {
    bool i = false, ii = false, iii = false;
  };
  std::vector<Flags> flags(triples.size());
  parallel_for(triples.size(), [&](std::size_t k) {
    const auto& t = triples[k];
    const double d_gamma = seq.dist_gamma(t.gamma1, t.gamma2);
    const Element p1 = seq.project(t.gamma1);
    const Element p2 = seq.project(t.gamma2);
    const double d_pi = seq.dist_g(p1, p2);
    const double a1 = seq.dist_g(t.g, p1);
    const double a2 = seq.dist_g(t.g, p2);
    const double d_h = seq.dist_h(seq.cocycle(t.gamma1, t.g), seq.cocycle(t.gamma2, t.g));
    flags[k].i = !(d_pi <= d_gamma);
    flags[k].ii = !(d_gamma <= a1 + d_h + a2);
    flags[k].iii = !(d_h <= a1 + d_gamma + a2);
  });
  LemmaReport rep;
  rep.triples = triples.size();
  for (std::size_t k = 0; k < triples.size(); ++k) {
    rep.violations_i += flags[k].i;
    rep.violations_ii += flags[k].ii;
    rep.violations_iii += flags[k].iii;
    if (rep.first_violation.empty() && (flags[k].i || flags[k].ii || flags[k].iii)) {
      const auto& t = triples[k];
      rep.first_violation = "(" + seq.gamma().format(t.gamma1) + ", " + seq.gamma().format(t.gamma2) + ", " +
                            seq.quotient().format(t.g) + ")";
    }
  }
  return rep;
}

KernelMatrix extension_kernel(const ShortExactSequence& seq, const QuotientFeatures& lambda,
                              const SubgroupKernel& psi_h, WindowPtr window) {
  const std::size_t n = window->size();
  std::vector<SparseVector> lam(n);
  for (std::size_t x = 0; x < n; ++x) lam[x] = canonicalize(lambda(seq.project(window->point(x))));
  KernelMatrix km{window, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0;
      auto a = lam[i].begin();
      auto b = lam[j].begin();
      while (a != lam[i].end() && b != lam[j].end()) {
        if (a->first < b->first) {
          ++a;
        } else if (b->first < a->first) {
          ++b;
        } else {
          const Element& g = a->first;
          s += a->second * b->second *
               psi_h(seq.cocycle(window->point(i), g), seq.cocycle(window->point(j), g));
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

FeatureMap extension_features(const ShortExactSequence& seq, const QuotientFeatures& lambda,
                              const SubgroupFeatures& mu, const MetricWindow& window) {
  std::vector<SparseVector> rows(window.size());
  parallel_for(window.size(), [&](std::size_t x) {
    const Element& gamma = window.point(x);
    for (const auto& [g, w] : canonicalize(lambda(seq.project(gamma)))) {
      for (const auto& [z, v] : mu(seq.cocycle(gamma, g))) rows[x].emplace_back(pair_key(g, z), w * v);
    }
    rows[x] = canonicalize(std::move(rows[x]));
  });
  return FeatureMap(std::move(rows));
}

SubgroupKernel subgroup_kernel_from_matrix(const KernelMatrix& km) {
  return [&km](const Element& h1, const Element& h2) {
    const auto& w = *km.window;
    auto i = w.index_of(h1);
    auto j = w.index_of(h2);
    if (!i || !j) throw Error(ErrorKind::WindowTooSmall, "cocycle value outside the H window");
    return km.values(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
  };
}

ShortExactSequence product_sequence(std::int64_t section_radius) {
  auto z = std::make_shared<IntegerLattice>(1);
  auto gamma = std::make_shared<DirectProduct>(z, z);
  return ShortExactSequence(
      gamma, z, [gamma](const Element& x) { return gamma->right_part(x); },
      [gamma](const Element& x) { return gamma->right_part(x) == Element{{0}}; }, section_radius);
}

ShortExactSequence dihedral_sequence(std::int64_t section_radius) {
  return ShortExactSequence(
      std::make_shared<InfiniteDihedral>(), std::make_shared<CyclicGroup>(2),
      [](const Element& x) { return Element{{x.v[1]}}; }, [](const Element& x) { return x.v[1] == 0; },
      section_radius);
}

ShortExactSequence bs_exponent_sequence(std::int64_t p, std::int64_t q, std::int64_t section_radius) {
  return ShortExactSequence(
      std::make_shared<BaumslagSolitar>(p, q), std::make_shared<IntegerLattice>(1),
      [](const Element& x) { return Element{{BaumslagSolitar::a_exponent_sum(x)}}; },
      [](const Element& x) { return BaumslagSolitar::a_exponent_sum(x) == 0; }, section_radius);
}

}  // namespace ozawa
