#include "ozawa/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace ozawa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::NotQuasiGeodesic: return "not-quasi-geodesic";
    case ErrorKind::QuasiGeodesicViolation: return "quasi-geodesic-violation";
    case ErrorKind::DegenerateFamily: return "degenerate-family";
    case ErrorKind::CoverViolation: return "cover-violation";
    case ErrorKind::WindowTooSmall: return "window-too-small";
    case ErrorKind::HomomorphismViolation: return "homomorphism-violation";
    case ErrorKind::LemmaViolation: return "lemma-violation";
    case ErrorKind::PlanInfeasible: return "plan-infeasible";
    case ErrorKind::EmbeddingInvalid: return "embedding-invalid";
    case ErrorKind::PropernessViolation: return "properness-violation";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL ^ e.v.size();
  for (auto x : e.v) {
    h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Element pair_key(const Element& a, const Element& b) {
  Element k;
  k.v.reserve(a.v.size() + b.v.size() + 1);
  k.v.push_back(static_cast<std::int64_t>(a.v.size()));
  k.v.insert(k.v.end(), a.v.begin(), a.v.end());
  k.v.insert(k.v.end(), b.v.begin(), b.v.end());
  return k;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

}  // namespace

// ---------------------------------------------------------------------------

BfsLengthTable::BfsLengthTable(const Group& group, std::size_t max_entries)
    : group_(group), max_entries_(max_entries) {}

void BfsLengthTable::grow_once() const {
  if (table_.empty()) {
    table_.emplace(group_.identity(), 0);
    frontier_ = {group_.identity()};
    radius_ = 0;
    return;
  }
  const auto gens = group_.generators();
  std::vector<Element> next;
  for (const auto& x : frontier_) {
    for (const auto& s : gens) {
      Element y = group_.multiply(x, s);
      if (table_.emplace(y, radius_ + 1).second) next.push_back(std::move(y));
    }
  }
  std::sort(next.begin(), next.end());
  frontier_ = std::move(next);
  ++radius_;
  if (table_.size() > max_entries_) {
    throw Error(ErrorKind::ResourceLimit,
                "word-length table for " + group_.name() + " exceeded " +
                    std::to_string(max_entries_) + " entries at radius " +
                    std::to_string(radius_));
  }
}

std::int64_t BfsLengthTable::length(const Element& g, std::int64_t radius_hint) const {
  std::lock_guard lock(mutex_);
  if (table_.empty()) grow_once();
  for (;;) {
    if (auto it = table_.find(g); it != table_.end()) return it->second;
    if (radius_ > radius_hint) {
      throw Error(ErrorKind::Numerical, "element " + group_.format(g) +
                                            " not reached within its word bound");
    }
    grow_once();
  }
}

std::int64_t BfsLengthTable::radius() const {
  std::lock_guard lock(mutex_);
  return radius_;
}

// ---------------------------------------------------------------------------

FreeGroup::FreeGroup(int rank) : rank_(rank) {
  if (rank < 1) throw Error(ErrorKind::Parameter, "free group rank must be >= 1");
}

std::string FreeGroup::name() const { return "F" + std::to_string(rank_); }

std::vector<Element> FreeGroup::generators() const {
  std::vector<Element> gens;
  for (int i = 1; i <= rank_; ++i) {
    gens.push_back(Element{{i}});
    gens.push_back(Element{{-i}});
  }
  return gens;
}

Element FreeGroup::letter(std::int64_t l) const {
  if (l == 0 || std::abs(l) > rank_) throw Error(ErrorKind::Parameter, "bad free-group letter");
  return Element{{l}};
}

Element FreeGroup::multiply(const Element& a, const Element& b) const {
  std::vector<std::int64_t> w = a.v;
  for (auto l : b.v) {
    if (!w.empty() && w.back() == -l) {
      w.pop_back();
    } else {
      w.push_back(l);
    }
  }
  return Element{std::move(w)};
}

Element FreeGroup::inverse(const Element& a) const {
  std::vector<std::int64_t> w(a.v.rbegin(), a.v.rend());
  for (auto& l : w) l = -l;
  return Element{std::move(w)};
}

std::string FreeGroup::format(const Element& a) const {
  if (a.v.empty()) return "e";
  static const char* names = "abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (auto l : a.v) {
    const auto idx = static_cast<std::size_t>(std::abs(l) - 1);
    s += idx < 26 ? std::string(1, names[idx]) : "x" + std::to_string(idx + 1);
    if (l < 0) s += "'";
  }
  return s;
}

// ---------------------------------------------------------------------------

IntegerLattice::IntegerLattice(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::Parameter, "lattice dimension must be >= 1");
}

std::string IntegerLattice::name() const { return "Z^" + std::to_string(dim_); }

Element IntegerLattice::identity() const {
  return Element{std::vector<std::int64_t>(static_cast<std::size_t>(dim_), 0)};
}

std::vector<Element> IntegerLattice::generators() const {
  std::vector<Element> gens;
  for (int i = 0; i < dim_; ++i) {
    for (int sgn : {1, -1}) {
      Element e = identity();
      e.v[static_cast<std::size_t>(i)] = sgn;
      gens.push_back(e);
    }
  }
  return gens;
}

Element IntegerLattice::point(std::vector<std::int64_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(dim_)) {
    throw Error(ErrorKind::Parameter, "coordinate count does not match lattice dimension");
  }
  return Element{std::move(coords)};
}

Element IntegerLattice::multiply(const Element& a, const Element& b) const {
  Element r = a;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
  return r;
}

Element IntegerLattice::inverse(const Element& a) const {
  Element r = a;
  for (auto& x : r.v) x = -x;
  return r;
}

std::int64_t IntegerLattice::length(const Element& a) const {
  std::int64_t s = 0;
  for (auto x : a.v) s += std::abs(x);
  return s;
}

std::string IntegerLattice::format(const Element& a) const {
  if (dim_ == 1) return std::to_string(a.v[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a.v[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------

CyclicGroup::CyclicGroup(std::int64_t order) : order_(order) {
  if (order < 1) throw Error(ErrorKind::Parameter, "cyclic group order must be >= 1");
}

std::string CyclicGroup::name() const { return "Z/" + std::to_string(order_); }

std::vector<Element> CyclicGroup::generators() const {
  if (order_ == 1) return {};
  if (order_ == 2) return {Element{{1}}};
  return {Element{{1}}, Element{{order_ - 1}}};
}

Element CyclicGroup::multiply(const Element& a, const Element& b) const {
  return Element{{floor_mod(a.v[0] + b.v[0], order_)}};
}

Element CyclicGroup::inverse(const Element& a) const {
  return Element{{floor_mod(-a.v[0], order_)}};
}

std::int64_t CyclicGroup::length(const Element& a) const {
  return std::min(a.v[0], order_ - a.v[0]);
}

std::string CyclicGroup::format(const Element& a) const { return std::to_string(a.v[0]); }

// ---------------------------------------------------------------------------

DirectProduct::DirectProduct(GroupPtr left, GroupPtr right)
    : left_(std::move(left)), right_(std::move(right)) {}

std::string DirectProduct::name() const { return left_->name() + " x " + right_->name(); }

Element DirectProduct::make(const Element& l, const Element& r) const { return pair_key(l, r); }

Element DirectProduct::left_part(const Element& a) const {
  const auto n = static_cast<std::size_t>(a.v.at(0));
  return Element{std::vector<std::int64_t>(a.v.begin() + 1, a.v.begin() + 1 + static_cast<std::ptrdiff_t>(n))};
}

Element DirectProduct::right_part(const Element& a) const {
  const auto n = static_cast<std::size_t>(a.v.at(0));
  return Element{std::vector<std::int64_t>(a.v.begin() + 1 + static_cast<std::ptrdiff_t>(n), a.v.end())};
}

Element DirectProduct::identity() const { return make(left_->identity(), right_->identity()); }

std::vector<Element> DirectProduct::generators() const {
  std::vector<Element> gens;
  for (const auto& s : left_->generators()) gens.push_back(make(s, right_->identity()));
  for (const auto& s : right_->generators()) gens.push_back(make(left_->identity(), s));
  return gens;
}

Element DirectProduct::multiply(const Element& a, const Element& b) const {
  return make(left_->multiply(left_part(a), left_part(b)),
              right_->multiply(right_part(a), right_part(b)));
}

Element DirectProduct::inverse(const Element& a) const {
  return make(left_->inverse(left_part(a)), right_->inverse(right_part(a)));
}

std::int64_t DirectProduct::length(const Element& a) const {
  return left_->length(left_part(a)) + right_->length(right_part(a));
}

std::string DirectProduct::format(const Element& a) const {
  return "(" + left_->format(left_part(a)) + "," + right_->format(right_part(a)) + ")";
}

// ---------------------------------------------------------------------------

std::vector<Element> InfiniteDihedral::generators() const {
  return {Element{{1, 0}}, Element{{-1, 0}}, Element{{0, 1}}};
}

Element InfiniteDihedral::multiply(const Element& a, const Element& b) const {
  const std::int64_t sign = a.v[1] ? -1 : 1;
  return Element{{a.v[0] + sign * b.v[0], (a.v[1] + b.v[1]) % 2}};
}

Element InfiniteDihedral::inverse(const Element& a) const {
  // (a,0)^-1 = (-a,0); (a,1)^-1 = (a,1).
  return a.v[1] ? a : Element{{-a.v[0], 0}};
}

std::int64_t InfiniteDihedral::length(const Element& a) const {
  return std::abs(a.v[0]) + a.v[1];
}

std::string InfiniteDihedral::format(const Element& a) const {
  return "(" + std::to_string(a.v[0]) + "," + std::to_string(a.v[1]) + ")";
}

// ---------------------------------------------------------------------------

BaumslagSolitar::BaumslagSolitar(std::int64_t p, std::int64_t q, std::size_t max_length_table)
    : p_(p), q_(q) {
  if (p < 1 || q < 1) throw Error(ErrorKind::Parameter, "BS(p,q) requires p, q >= 1");
  lengths_ = std::make_unique<BfsLengthTable>(*this, max_length_table);
}

std::string BaumslagSolitar::name() const {
  return "BS(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
}

BaumslagSolitar::Form BaumslagSolitar::decode(const Element& g) const {
  Form f;
  const std::size_t n = (g.v.size() - 1) / 2;
  f.rev.reserve(n);
  for (std::size_t i = n; i-- > 0;) f.rev.push_back({g.v[2 * i], g.v[2 * i + 1]});
  f.m = g.v.back();
  return f;
}

Element BaumslagSolitar::encode(const Form& f) const {
  Element g;
  g.v.reserve(2 * f.rev.size() + 1);
  for (auto it = f.rev.rbegin(); it != f.rev.rend(); ++it) {
    g.v.push_back(it->s);
    g.v.push_back(it->e);
  }
  g.v.push_back(f.m);
  return g;
}

void BaumslagSolitar::prepend_a(Form& f, std::int64_t e) const {
  if (!f.rev.empty() && f.rev.back().s == 0 && f.rev.back().e == -e) {
    f.rev.pop_back();
    return;
  }
  f.rev.push_back({0, e});
}

void BaumslagSolitar::prepend_b(Form& f, std::int64_t k) const {
  if (k == 0) return;
  if (f.rev.empty()) {
    f.m += k;
    return;
  }
  Syllable first = f.rev.back();
  const std::int64_t base = first.e == 1 ? q_ : p_;
  const std::int64_t push = first.e == 1 ? p_ : q_;
  const std::int64_t s = first.s + k;
  const std::int64_t carry = floor_div(s, base);
  const std::int64_t rest = s - carry * base;
  if (carry == 0) {
    f.rev.back().s = rest;
    return;
  }
  // b^{carry*base} a^e = a^e b^{carry*push}
  f.rev.pop_back();
  prepend_b(f, carry * push);
  prepend_a(f, first.e);
  prepend_b(f, rest);
}

std::vector<Element> BaumslagSolitar::generators() const {
  return {a(1), a(-1), b(1), b(-1)};
}

Element BaumslagSolitar::a(std::int64_t e) const {
  Form f;
  for (std::int64_t i = 0; i < std::abs(e); ++i) prepend_a(f, e > 0 ? 1 : -1);
  return encode(f);
}

Element BaumslagSolitar::b(std::int64_t m) const { return Element{{m}}; }

Element BaumslagSolitar::from_word(const std::vector<int>& word) const {
  Form f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    switch (*it) {
      case 1: prepend_a(f, 1); break;
      case -1: prepend_a(f, -1); break;
      case 2: prepend_b(f, 1); break;
      case -2: prepend_b(f, -1); break;
      default: throw Error(ErrorKind::Parameter, "BS word letters are ±1 (a) and ±2 (b)");
    }
  }
  return encode(f);
}

Element BaumslagSolitar::multiply(const Element& x, const Element& y) const {
  Form f = decode(y);
  const Form left = decode(x);
  prepend_b(f, left.m);
  for (const auto& syl : left.rev) {  // last syllable of x first
    prepend_a(f, syl.e);
    prepend_b(f, syl.s);
  }
  return encode(f);
}

Element BaumslagSolitar::inverse(const Element& x) const {
  const Form src = decode(x);
  Form f;
  // x^-1 = b^-m a^-e_n b^-s_n ... a^-e_1 b^-s_1; prepend from the right end.
  for (auto it = src.rev.rbegin(); it != src.rev.rend(); ++it) {
    prepend_b(f, -it->s);
    prepend_a(f, -it->e);
  }
  prepend_b(f, -src.m);
  return encode(f);
}

std::int64_t BaumslagSolitar::length(const Element& g) const {
  // Spelling the normal form gives an upper bound on the word length.
  std::int64_t bound = std::abs(g.v.back());
  for (std::size_t i = 0; i + 1 < g.v.size(); i += 2) bound += std::abs(g.v[i]) + 1;
  return lengths_->length(g, bound);
}

std::string BaumslagSolitar::format(const Element& g) const {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i + 1 < g.v.size(); i += 2) {
    if (g.v[i] != 0) os << "b^" << g.v[i] << " ", any = true;
    os << (g.v[i + 1] > 0 ? "a " : "a' ");
    any = true;
  }
  if (g.v.back() != 0 || !any) os << "b^" << g.v.back();
  std::string s = os.str();
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::size_t BaumslagSolitar::syllable_count(const Element& g) { return (g.v.size() - 1) / 2; }

std::int64_t BaumslagSolitar::a_exponent_sum(const Element& g) {
  std::int64_t s = 0;
  for (std::size_t i = 1; i + 1 < g.v.size(); i += 2) s += g.v[i];
  return s;
}

Element BaumslagSolitar::coset_rep(const Element& g) {
  Element r = g;
  r.v.back() = 0;
  return r;
}

// ---------------------------------------------------------------------------

GroupPtr make_group(const std::string& family, const std::map<std::string, std::int64_t>& params) {
  auto get = [&](const char* key, std::int64_t dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (family == "free") return std::make_shared<FreeGroup>(static_cast<int>(get("rank", 2)));
  if (family == "zn" || family == "lattice") {
    return std::make_shared<IntegerLattice>(static_cast<int>(get("dim", 1)));
  }
  if (family == "cyclic") return std::make_shared<CyclicGroup>(get("order", 2));
  if (family == "dihedral") return std::make_shared<InfiniteDihedral>();
  if (family == "bs") return std::make_shared<BaumslagSolitar>(get("p", 1), get("q", 1));
  throw Error(ErrorKind::Schema, "unknown group family '" + family + "'");
}

}  // namespace ozawa
