#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ozawa/kernels.hpp"

namespace ozawa {

/// 1 -> H -> Gamma -> G -> 1 with H realized inside Gamma.
///
/// G is carried by a group structure on quotient tokens (for products and
/// inverses) while its length is the quotient length
///   l_G(g) = min { l_Gamma(gamma) : pi(gamma) = g },
/// computed with a section table from a ball of Gamma. H carries the
/// restriction of l_Gamma.
class ShortExactSequence {
 public:
  using Projection = std::function<Element(const Element&)>;
  using Membership = std::function<bool(const Element&)>;

  /// Builds the section from the Gamma ball of radius section_radius; sigma(g)
  /// is the lexicographically least among the minimal-length preimages.
  ShortExactSequence(GroupPtr gamma, GroupPtr quotient, Projection pi, Membership in_h,
                     std::int64_t section_radius);

  const Group& gamma() const { return *gamma_; }
  const Group& quotient() const { return *quotient_; }
  Element project(const Element& gamma) const { return pi_(gamma); }
  bool in_h(const Element& gamma) const { return in_h_(gamma); }
  std::int64_t section_radius() const { return section_radius_; }

  /// Throws WindowTooSmall if no preimage of g lies in the section ball.
  const Element& sigma(const Element& g) const;
  std::int64_t length_g(const Element& g) const;
  double dist_g(const Element& g1, const Element& g2) const;
  /// d_H(h1, h2) = l_Gamma(h1^-1 h2).
  double dist_h(const Element& h1, const Element& h2) const;
  double dist_gamma(const Element& a, const Element& b) const;

  /// c(gamma, g) = sigma(g)^-1 gamma sigma(pi(gamma)^-1 g); checked to lie in H.
  Element cocycle(const Element& gamma, const Element& g) const;

  /// G tokens with a section entry, sorted.
  std::vector<Element> quotient_elements() const;

 private:
  GroupPtr gamma_;
  GroupPtr quotient_;
  Projection pi_;
  Membership in_h_;
  std::int64_t section_radius_;
  std::map<Element, Element> section_;
};

/// pi(xy) = pi(x) pi(y) on all pairs, ker(pi) = H on the sample, and
/// gamma -> (pi(gamma), c(gamma, pi(gamma))) injective. Returns the first
/// problem found.
std::optional<std::string> verify_sequence(const ShortExactSequence& seq, const std::vector<Element>& sample);

struct LemmaReport {
  std::size_t triples = 0;
  std::size_t violations_i = 0;
  std::size_t violations_ii = 0;
  std::size_t violations_iii = 0;
  std::string first_violation;

  bool ok() const { return violations_i + violations_ii + violations_iii == 0; }
};

struct Triple {
  Element gamma1;
  Element gamma2;
  Element g;
};

/// The three distance inequalities relating d_G, d_H(c(.,g), c(.,g)) and
/// d_Gamma on every supplied triple.
LemmaReport verify_distance_lemma(const ShortExactSequence& seq, const std::vector<Triple>& triples);

/// All triples (x, y, g) with x, y in `elements` and g in `quotient_sample`.
std::vector<Triple> all_triples(const std::vector<Element>& elements, const std::vector<Element>& quotient_sample);

/// Feature map on G: quotient token -> unit vector keyed by quotient tokens.
using QuotientFeatures = std::function<SparseVector(const Element&)>;
/// Feature map on H: embedded element -> unit vector.
using SubgroupFeatures = std::function<SparseVector(const Element&)>;
/// psi_H evaluated on embedded elements.
using SubgroupKernel = std::function<double(const Element&, const Element&)>;

/// psi_Gamma(x,y) = sum_g lambda(pi x)(g) lambda(pi y)(g) psi_H(c(x,g), c(y,g)),
/// summed over the common support in key order.
KernelMatrix extension_kernel(const ShortExactSequence& seq, const QuotientFeatures& lambda,
                              const SubgroupKernel& psi_h, WindowPtr window);

/// nu(gamma)(g, z) = lambda(pi gamma)(g) mu(c(gamma, g))(z), keyed by pair_key(g, z).
FeatureMap extension_features(const ShortExactSequence& seq, const QuotientFeatures& lambda,
                              const SubgroupFeatures& mu, const MetricWindow& window);

/// psi_H from a kernel matrix on an H window (points are embedded elements).
/// Lookups outside the window throw WindowTooSmall.
SubgroupKernel subgroup_kernel_from_matrix(const KernelMatrix& km);

/// The sequence Z -> Z x Z -> Z (H the first factor, G the second).
ShortExactSequence product_sequence(std::int64_t section_radius);
/// Z -> Z x| Z/2 -> Z/2 (translations, quotient by the reflection parity).
ShortExactSequence dihedral_sequence(std::int64_t section_radius);
/// ker -> BS(p,q) -> Z, the a-exponent sum.
ShortExactSequence bs_exponent_sequence(std::int64_t p, std::int64_t q, std::int64_t section_radius);

}  // namespace ozawa
