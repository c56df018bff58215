#pragma once

// Simplicial ordered groups (Z^k or Q^k with the product order and an order
// unit) and the bound functions r, l:
//
//   q u >= d  <=>  q >= r(d),        q u <= d  <=>  q <= l(d).
//
// Inside a simplicial group these are max_i d_i / u_i and min_i d_i / u_i.

#include "dimgrp/scalar.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace dimgrp::ordgrp {

[[noreturn]] void throw_nonpositive_unit(Eigen::Index coordinate);
[[noreturn]] void throw_rank_mismatch(Eigen::Index got, Eigen::Index want);
[[noreturn]] void throw_empty_level();

template <typename Scalar>
class SimplicialLevel {
 public:
  // Throws PreconditionError unless the rank is positive and every unit
  // coordinate is positive.
  explicit SimplicialLevel(Vector<Scalar> unit);

  Eigen::Index rank() const { return unit_.size(); }
  const Vector<Scalar>& unit() const noexcept { return unit_; }

 private:
  Vector<Scalar> unit_;
};

struct RatBoundPair {
  Rational r;
  Rational l;
  friend bool operator==(const RatBoundPair&, const RatBoundPair&) = default;
};

template <typename Derived, typename Scalar>
Rational r_value(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level);

template <typename Derived, typename Scalar>
Rational l_value(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level);

template <typename Derived, typename Scalar>
RatBoundPair rl_values(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level) {
  return {r_value(d, level), l_value(d, level)};
}

// q u >= d coordinatewise.
template <typename Derived, typename Scalar>
bool dominates(const Rational& q, const SimplicialLevel<Scalar>& level, const Eigen::MatrixBase<Derived>& d);

// Sufficient condition for the map x -> M x between product-ordered groups
// to be an order-embedding: every entry is nonnegative and every column has
// a private row, positive in that column and zero in all others.
template <typename Derived>
bool embedding_criterion(const Eigen::MatrixBase<Derived>& m);

// Same, with the ranks stated by the caller; throws PreconditionError when
// the shape of m is not cod_rank x dom_rank.
template <typename Derived>
bool embedding_criterion(const Eigen::MatrixBase<Derived>& m, Eigen::Index dom_rank, Eigen::Index cod_rank);

// Human-readable reason the criterion fails, or nullopt when it holds.
template <typename Derived>
std::optional<std::string> criterion_violation(const Eigen::MatrixBase<Derived>& m);

struct OracleResult {
  bool order_embedding = true;
  // First x in the box with (x >= 0) != (M x >= 0).
  std::optional<IntVector> witness;
  std::size_t points = 0;
};

inline constexpr std::size_t kDefaultOracleBudget = 10'000'000;

// Exhaustively checks x >= 0 <=> M x >= 0 over the box [-box, box]^cols.
// Throws BudgetExceeded when (2 box + 1)^cols exceeds the budget.
OracleResult brute_force_order_embedding(const IntMatrix& m, int box = 3,
                                         std::size_t budget = kDefaultOracleBudget);

// Rational matrices are scaled by the lcm of their denominators first; a
// positive scalar does not change any sign.
OracleResult brute_force_order_embedding(const RatMatrix& m, int box = 3,
                                         std::size_t budget = kDefaultOracleBudget);

// A pair (a, b) with (r+l)(a+b) != (r+l)(a) + (r+l)(b). Exists exactly when
// the rank is at least 3; the search runs over pairs of standard basis
// vectors.
template <typename Scalar>
std::optional<std::pair<IntVector, IntVector>> nonadditivity_witness(const SimplicialLevel<Scalar>& level);

// ---------------------------------------------------------------------------

template <typename Scalar>
SimplicialLevel<Scalar>::SimplicialLevel(Vector<Scalar> unit) : unit_(std::move(unit)) {
  if (unit_.size() == 0) throw_empty_level();
  for (Eigen::Index i = 0; i < unit_.size(); ++i)
    if (sgn(unit_(i)) <= 0) throw_nonpositive_unit(i);
}

namespace detail {

template <typename Derived, typename Scalar>
Rational ratio(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level, Eigen::Index i) {
  return Rational(d(i)) / Rational(level.unit()(i));
}

}  // namespace detail

template <typename Derived, typename Scalar>
Rational r_value(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level) {
  if (d.size() != level.rank()) throw_rank_mismatch(d.size(), level.rank());
  Rational best = detail::ratio(d, level, 0);
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    Rational q = detail::ratio(d, level, i);
    if (q > best) best = q;
  }
  return best;
}

template <typename Derived, typename Scalar>
Rational l_value(const Eigen::MatrixBase<Derived>& d, const SimplicialLevel<Scalar>& level) {
  if (d.size() != level.rank()) throw_rank_mismatch(d.size(), level.rank());
  Rational best = detail::ratio(d, level, 0);
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    Rational q = detail::ratio(d, level, i);
    if (q < best) best = q;
  }
  return best;
}

template <typename Derived, typename Scalar>
bool dominates(const Rational& q, const SimplicialLevel<Scalar>& level, const Eigen::MatrixBase<Derived>& d) {
  if (d.size() != level.rank()) throw_rank_mismatch(d.size(), level.rank());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (q * Rational(level.unit()(i)) < Rational(d(i))) return false;
  return true;
}

template <typename Derived>
std::optional<std::string> criterion_violation(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (sgn(m(i, j)) < 0)
        return "negative entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    bool found = false;
    for (Eigen::Index i = 0; i < m.rows() && !found; ++i) {
      if (sgn(m(i, j)) <= 0) continue;
      bool is_private = true;
      for (Eigen::Index k = 0; k < m.cols() && is_private; ++k)
        if (k != j && sgn(m(i, k)) != 0) is_private = false;
      found = is_private;
    }
    if (!found) return "column " + std::to_string(j) + " has no private positive row";
  }
  return std::nullopt;
}

template <typename Derived>
bool embedding_criterion(const Eigen::MatrixBase<Derived>& m) {
  return !criterion_violation(m).has_value();
}

template <typename Derived>
bool embedding_criterion(const Eigen::MatrixBase<Derived>& m, Eigen::Index dom_rank, Eigen::Index cod_rank) {
  if (m.cols() != dom_rank) throw_rank_mismatch(m.cols(), dom_rank);
  if (m.rows() != cod_rank) throw_rank_mismatch(m.rows(), cod_rank);
  return embedding_criterion(m);
}

template <typename Scalar>
std::optional<std::pair<IntVector, IntVector>> nonadditivity_witness(const SimplicialLevel<Scalar>& level) {
  const Eigen::Index k = level.rank();
  if (k <= 2) return std::nullopt;
  auto sum_rl = [&](const IntVector& x) { return Rational(r_value(x, level) + l_value(x, level)); };
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      IntVector a = IntVector::Zero(k), b = IntVector::Zero(k);
      a(i) = 1;
      b(j) = 1;
      if (sum_rl(IntVector(a + b)) != sum_rl(a) + sum_rl(b)) return std::make_pair(a, b);
    }
  return std::nullopt;
}

}  // namespace dimgrp::ordgrp
