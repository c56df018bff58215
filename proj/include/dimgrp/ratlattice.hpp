#pragma once

// Finitely generated subgroups of the positive rationals under multiplication.
//
// Q_+^x is free abelian on the primes, so a subgroup H = <g_1, ..., g_r> is
// an integer lattice of prime-exponent vectors. H is stored by the row
// Hermite normal form of that lattice; the form is canonical, so two
// SubgroupH values describe the same subgroup exactly when their prime lists
// and HNF bases coincide.
//
// The equivalence n ~ m  <=>  n/m in H is the general matrix type relation:
// it is the unique equivalence on positive integers with n ~ m <=> nk ~ mk
// that contains a given set of pairs.

#include "dimgrp/scalar.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dimgrp::ratlattice {

// A strictly positive rational in lowest terms.
class PosRat {
 public:
  PosRat() : value_(1) {}
  explicit PosRat(const Rational& value);
  PosRat(const Integer& num, const Integer& den);

  // Accepts "p" or "p/q" with p, q > 0.
  static PosRat parse(std::string_view text);

  const Rational& value() const noexcept { return value_; }
  Integer numerator() const { return value_.get_num(); }
  Integer denominator() const { return value_.get_den(); }
  bool is_one() const { return value_ == 1; }

  PosRat inverse() const { return PosRat(Rational(value_.get_den(), value_.get_num())); }
  std::string str() const { return to_string(value_); }

  friend PosRat operator*(const PosRat& a, const PosRat& b) { return PosRat(Rational(a.value_ * b.value_)); }
  friend PosRat operator/(const PosRat& a, const PosRat& b) { return PosRat(Rational(a.value_ / b.value_)); }
  friend bool operator==(const PosRat& a, const PosRat& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const PosRat& a, const PosRat& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  Rational value_;
};

// prime -> nonzero exponent.
using ExpVec = std::map<Integer, long>;

ExpVec factor(const Integer& n);
ExpVec factor(const PosRat& q);

// Product of prime^exponent; inverse of factor.
PosRat evaluate(const ExpVec& e);

// Row-style Hermite normal form of the lattice spanned by the rows of m:
// echelon shape, positive pivots, entries above each pivot reduced into
// [0, pivot), zero rows dropped.
IntMatrix hermite_normal_form(IntMatrix m);

class SubgroupH {
 public:
  SubgroupH() = default;

  const std::vector<PosRat>& generators() const noexcept { return generators_; }
  // Primes with a nonzero exponent in some element, ascending.
  const std::vector<Integer>& primes() const noexcept { return primes_; }
  const IntMatrix& hnf() const noexcept { return hnf_; }
  Eigen::Index rank() const { return hnf_.rows(); }
  bool is_trivial() const { return hnf_.rows() == 0; }

  // Exponent vector of q over primes(); empty when q involves another prime.
  std::optional<IntVector> coordinates(const PosRat& q) const;

  // Subgroup equality (the generator lists may differ).
  friend bool operator==(const SubgroupH& a, const SubgroupH& b) {
    return a.primes_ == b.primes_ && a.hnf_ == b.hnf_;
  }

 private:
  friend SubgroupH subgroup_from_generators(std::vector<PosRat> gens);
  std::vector<PosRat> generators_;
  std::vector<Integer> primes_;
  IntMatrix hnf_;
};

SubgroupH subgroup_from_generators(std::vector<PosRat> gens);

// Integer solvability against the HNF basis.
bool contains(const SubgroupH& h, const PosRat& q);

// n ~ m  <=>  n/m in H.
bool equiv(const SubgroupH& h, const Integer& n, const Integer& m);

struct EquivRelSpec {
  std::vector<std::pair<Integer, Integer>> pairs;
};

// Subgroup generated by {n/m : (n, m) in pairs}; throws PreconditionError on
// a non-positive entry.
SubgroupH subgroup_from_equiv_pairs(const EquivRelSpec& spec);

}  // namespace dimgrp::ratlattice
