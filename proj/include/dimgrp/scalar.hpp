#pragma once

// Exact scalar types and their Eigen integration.
//
// Every matrix and vector in dimgrp is an Eigen dense type over one of two
// GMP scalars: Integer (mpz_class) or Rational (mpq_class). Rationals are
// always kept canonical (lowest terms, positive denominator).

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  using Real = mpz_class;
  using NonInteger = mpq_class;
  using Nested = mpz_class;
  using Literal = mpz_class;
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 100,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace dimgrp {

using Integer = mpz_class;
using Rational = mpq_class;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IntVector = Vector<Integer>;
using IntMatrix = Matrix<Integer>;
using RatVector = Vector<Rational>;
using RatMatrix = Matrix<Rational>;

std::string to_string(const Integer& z);
std::string to_string(const Rational& q);

// Strict grammar: [+-]?digits or [+-]?digits/digits, no whitespace.
// Throws ParseError carrying the 1-based column of the offending character.
Integer parse_integer(std::string_view text);
Rational parse_rational(std::string_view text);

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

// True iff every entry has denominator 1.
bool is_integral(const RatMatrix& m);
bool is_integral(const RatVector& v);

// Exact conversion; throws PreconditionError when an entry is not integral.
IntMatrix to_integer(const RatMatrix& m);
IntVector to_integer(const RatVector& v);

inline RatMatrix to_rational(const IntMatrix& m) { return m.cast<Rational>(); }
inline RatVector to_rational(const IntVector& v) { return v.cast<Rational>(); }

// Dense product that skips zero entries of the left factor. The matrices
// produced by the construction are very sparse and GMP arithmetic dominates.
template <typename Scalar>
Matrix<Scalar> sparse_product(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (sgn(b(k, j)) != 0) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

template <typename Scalar>
Vector<Scalar> sparse_product(const Matrix<Scalar>& a, const Vector<Scalar>& v) {
  Vector<Scalar> out = Vector<Scalar>::Zero(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (sgn(a(i, k)) != 0 && sgn(v(k)) != 0) out(i) += a(i, k) * v(k);
  return out;
}

}  // namespace dimgrp
