#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ozawa/error.hpp"

namespace ozawa {

/// Opaque normal-form token. Two tokens are equal iff the group elements are.
struct Element {
  std::vector<std::int64_t> v;

  Element() = default;
  explicit Element(std::vector<std::int64_t> data) : v(std::move(data)) {}

  auto operator<=>(const Element&) const = default;
  bool operator==(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

/// Key for a pair of elements (used to index product feature spaces).
Element pair_key(const Element& a, const Element& b);

/// A concrete computable group with a proper word-length function.
class Group {
 public:
  virtual ~Group() = default;

  virtual std::string name() const = 0;
  virtual Element identity() const = 0;
  /// Closed under inversion.
  virtual std::vector<Element> generators() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  virtual std::int64_t length(const Element& a) const = 0;
  virtual std::string format(const Element& a) const = 0;

  std::int64_t distance(const Element& a, const Element& b) const {
    return length(multiply(inverse(a), b));
  }
};

using GroupPtr = std::shared_ptr<const Group>;

/// Word length by breadth-first search over generator multiplication. Used as
/// the length function for groups without a closed form and as an oracle for
/// those that have one.
class BfsLengthTable {
 public:
  BfsLengthTable(const Group& group, std::size_t max_entries);

  /// Length of `g`, growing the search radius as needed.
  std::int64_t length(const Element& g, std::int64_t radius_hint) const;
  std::int64_t radius() const;

 private:
  void grow_once() const;

  const Group& group_;
  std::size_t max_entries_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Element, std::int64_t, ElementHash> table_;
  mutable std::vector<Element> frontier_;
  mutable std::int64_t radius_ = 0;
};

class FreeGroup final : public Group {
 public:
  explicit FreeGroup(int rank);

  std::string name() const override;
  Element identity() const override { return Element{}; }
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override {
    return static_cast<std::int64_t>(a.v.size());
  }
  std::string format(const Element& a) const override;

  int rank() const { return rank_; }
  /// Single-letter element; letter in ±1..±rank.
  Element letter(std::int64_t l) const;

 private:
  int rank_;
};

/// ℤⁿ with the ℓ¹ word metric of the standard generators.
class IntegerLattice final : public Group {
 public:
  explicit IntegerLattice(int dim);

  std::string name() const override;
  Element identity() const override;
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override;
  std::string format(const Element& a) const override;

  int dim() const { return dim_; }
  Element point(std::vector<std::int64_t> coords) const;

 private:
  int dim_;
};

class CyclicGroup final : public Group {
 public:
  explicit CyclicGroup(std::int64_t order);

  std::string name() const override;
  Element identity() const override { return Element{{0}}; }
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override;
  std::string format(const Element& a) const override;

  std::int64_t order() const { return order_; }

 private:
  std::int64_t order_;
};

/// G × H with the union of the factor generating sets.
class DirectProduct final : public Group {
 public:
  DirectProduct(GroupPtr left, GroupPtr right);

  std::string name() const override;
  Element identity() const override;
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override;
  std::string format(const Element& a) const override;

  Element make(const Element& l, const Element& r) const;
  Element left_part(const Element& a) const;
  Element right_part(const Element& a) const;
  const GroupPtr& left() const { return left_; }
  const GroupPtr& right() const { return right_; }

 private:
  GroupPtr left_;
  GroupPtr right_;
};

/// ℤ ⋊ ℤ/2 (the infinite dihedral group); tokens are (a, s) with
/// (a,s)(b,t) = (a + (-1)^s b, s+t mod 2).
class InfiniteDihedral final : public Group {
 public:
  std::string name() const override { return "Z x| Z/2"; }
  Element identity() const override { return Element{{0, 0}}; }
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override;
  std::string format(const Element& a) const override;
};

/// BS(p,q) = <a,b | a b^p a^-1 = b^q>.
///
/// Tokens store the right-transversal Britton normal form
///   b^{s_1} a^{e_1} b^{s_2} a^{e_2} ... b^{s_n} a^{e_n} b^m
/// with 0 <= s_i < q when e_i = +1, 0 <= s_i < p when e_i = -1, and no pinch
/// a^e b^0 a^-e. Layout: [s_1, e_1, ..., s_n, e_n, m].
class BaumslagSolitar final : public Group {
 public:
  BaumslagSolitar(std::int64_t p, std::int64_t q,
                  std::size_t max_length_table = 4'000'000);

  std::string name() const override;
  Element identity() const override { return Element{{0}}; }
  std::vector<Element> generators() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  std::int64_t length(const Element& a) const override;
  std::string format(const Element& a) const override;

  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }

  Element a(std::int64_t e = 1) const;
  Element b(std::int64_t m = 1) const;
  /// Normal form of a word over {±1 = a^±1, ±2 = b^±1}.
  Element from_word(const std::vector<int>& word) const;
  /// Number of a-syllables (tree distance from the base vertex <b>).
  static std::size_t syllable_count(const Element& g);
  /// Sum of a-exponents; a homomorphism onto ℤ.
  static std::int64_t a_exponent_sum(const Element& g);
  /// Canonical representative of the coset g<b> (trailing b-power dropped).
  static Element coset_rep(const Element& g);

 private:
  struct Syllable {
    std::int64_t s;
    std::int64_t e;
  };
  // Syllables are stored last-first so prepending is a push_back.
  struct Form {
    std::vector<Syllable> rev;
    std::int64_t m = 0;
  };

  Form decode(const Element& g) const;
  Element encode(const Form& f) const;
  void prepend_b(Form& f, std::int64_t k) const;
  void prepend_a(Form& f, std::int64_t e) const;

  std::int64_t p_;
  std::int64_t q_;
  std::unique_ptr<BfsLengthTable> lengths_;
};

/// Builds a group from a JSON-style descriptor family name and parameters.
GroupPtr make_group(const std::string& family,
                    const std::map<std::string, std::int64_t>& params);

}  // namespace ozawa
