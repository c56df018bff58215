#include "dimgrp/ordgrp.hpp"

#include "dimgrp/error.hpp"

#include <cstdint>
#include <vector>

namespace dimgrp::ordgrp {

void throw_nonpositive_unit(Eigen::Index coordinate) {
  throw PreconditionError("order unit coordinate " + std::to_string(coordinate) + " is not positive");
}

void throw_rank_mismatch(Eigen::Index got, Eigen::Index want) {
  throw PreconditionError("rank mismatch: got " + std::to_string(got) + ", expected " + std::to_string(want));
}

void throw_empty_level() { throw PreconditionError("simplicial level must have positive rank"); }

namespace {

std::size_t box_points(Eigen::Index dims, int box, std::size_t budget) {
  const std::size_t side = 2 * static_cast<std::size_t>(box) + 1;
  std::size_t points = 1;
  for (Eigen::Index i = 0; i < dims; ++i) {
    if (points > budget / side)
      throw BudgetExceeded("box [-" + std::to_string(box) + ", " + std::to_string(box) + "]^" +
                           std::to_string(dims) + " exceeds the budget of " + std::to_string(budget) + " points");
    points *= side;
  }
  return points;
}

// Odometer walk over the box. Mx is maintained incrementally: stepping
// coordinate j by +1 adds column j, wrapping it from +box to -box subtracts
// 2 box times column j.
template <typename Word>
OracleResult walk(const std::vector<std::vector<Word>>& cols, Eigen::Index rows, int box, std::size_t points) {
  const Eigen::Index dims = static_cast<Eigen::Index>(cols.size());
  std::vector<int> x(static_cast<std::size_t>(dims), -box);
  std::vector<Word> y(static_cast<std::size_t>(rows), Word(0));
  for (Eigen::Index j = 0; j < dims; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) y[i] -= Word(box) * cols[j][i];

  OracleResult result;
  for (std::size_t p = 0; p < points; ++p) {
    bool x_nonneg = true;
    for (int xi : x) x_nonneg = x_nonneg && xi >= 0;
    bool y_nonneg = true;
    for (const Word& yi : y) y_nonneg = y_nonneg && yi >= 0;
    ++result.points;
    if (x_nonneg != y_nonneg) {
      result.order_embedding = false;
      IntVector w(dims);
      for (Eigen::Index j = 0; j < dims; ++j) w(j) = x[j];
      result.witness = w;
      return result;
    }
    for (Eigen::Index j = 0; j < dims; ++j) {
      if (x[j] < box) {
        ++x[j];
        for (Eigen::Index i = 0; i < rows; ++i) y[i] += cols[j][i];
        break;
      }
      x[j] = -box;
      for (Eigen::Index i = 0; i < rows; ++i) y[i] -= Word(2 * box) * cols[j][i];
    }
  }
  return result;
}

}  // namespace

OracleResult brute_force_order_embedding(const IntMatrix& m, int box, std::size_t budget) {
  if (box < 0) throw PreconditionError("oracle box must be nonnegative");
  const std::size_t points = box_points(m.cols(), box, budget);

  // |(Mx)_i| <= box * sum_j |m_ij|; use 128-bit words when that stays well
  // inside range, GMP otherwise.
  Integer bound = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Integer row = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row += abs(m(i, j));
    if (row > bound) bound = row;
  }
  bound *= 2 * box + 1;
  const bool fits = mpz_sizeinbase(bound.get_mpz_t(), 2) < 120;

  if (fits) {
    std::vector<std::vector<__int128>> cols(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Integer v = abs(m(i, j));
        __int128 w = 0;
        for (std::size_t limb = mpz_size(v.get_mpz_t()); limb-- > 0;)
          w = (w << 64) | static_cast<__int128>(mpz_getlimbn(v.get_mpz_t(), static_cast<mp_size_t>(limb)));
        cols[j].push_back(sgn(m(i, j)) < 0 ? -w : w);
      }
    return walk(cols, m.rows(), box, points);
  }
  std::vector<std::vector<Integer>> cols(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) cols[j].push_back(m(i, j));
  return walk(cols, m.rows(), box, points);
}

OracleResult brute_force_order_embedding(const RatMatrix& m, int box, std::size_t budget) {
  Integer scale = 1;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), m(i, j).get_den_mpz_t());
  return brute_force_order_embedding(to_integer(RatMatrix(m * Rational(scale))), box, budget);
}

}  // namespace dimgrp::ordgrp
