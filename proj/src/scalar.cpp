#include "dimgrp/scalar.hpp"

#include "dimgrp/error.hpp"

#include <cctype>

namespace dimgrp {

namespace {

// Returns the index one past the last digit starting at pos.
std::size_t scan_digits(std::string_view text, std::size_t pos) {
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  return pos;
}

[[noreturn]] void fail(std::string_view text, std::size_t pos, const std::string& expected) {
  std::string found = pos < text.size() ? std::string("'") + text[pos] + "'" : "end of input";
  throw ParseError("expected " + expected + ", found " + found + " in \"" + std::string(text) + "\"", 1,
                   pos + 1);
}

Integer parse_digits(std::string_view text, std::size_t begin, std::size_t end) {
  return Integer(std::string(text.substr(begin, end - begin)), 10);
}

}  // namespace

std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_string(const Rational& q) { return q.get_str(); }

Integer parse_integer(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
  std::size_t end = scan_digits(text, pos);
  if (end == pos) fail(text, pos, "digit");
  if (end != text.size()) fail(text, end, "end of integer");
  Integer value = parse_digits(text, pos, end);
  return negative ? Integer(-value) : value;
}

Rational parse_rational(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
  std::size_t end = scan_digits(text, pos);
  if (end == pos) fail(text, pos, "digit");
  Integer num = parse_digits(text, pos, end);
  Integer den = 1;
  if (end < text.size()) {
    if (text[end] != '/') fail(text, end, "'/' or end of rational");
    std::size_t dpos = end + 1;
    std::size_t dend = scan_digits(text, dpos);
    if (dend == dpos) fail(text, dpos, "digit");
    if (dend != text.size()) fail(text, dend, "end of rational");
    den = parse_digits(text, dpos, dend);
    if (den == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"", 1, dpos + 1);
  }
  Rational q(negative ? Integer(-num) : num, den);
  q.canonicalize();
  return q;
}

bool is_integral(const RatMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!is_integral(m(i, j))) return false;
  return true;
}

bool is_integral(const RatVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!is_integral(v(i))) return false;
  return true;
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!is_integral(m(i, j)))
        throw PreconditionError("non-integral entry " + to_string(m(i, j)) + " at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
      out(i, j) = m(i, j).get_num();
    }
  return out;
}

IntVector to_integer(const RatVector& v) {
  IntVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!is_integral(v(i)))
      throw PreconditionError("non-integral entry " + to_string(v(i)) + " at " + std::to_string(i));
    out(i) = v(i).get_num();
  }
  return out;
}

}  // namespace dimgrp
