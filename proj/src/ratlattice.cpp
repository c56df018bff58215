#include "dimgrp/ratlattice.hpp"

#include "dimgrp/error.hpp"

#include <algorithm>
#include <set>

namespace dimgrp::ratlattice {

PosRat::PosRat(const Rational& value) : value_(value) {
  value_.canonicalize();
  if (sgn(value_) <= 0) throw PreconditionError("PosRat requires a positive value, got " + to_string(value_));
}

PosRat::PosRat(const Integer& num, const Integer& den) : PosRat(Rational(num, den)) {}

PosRat PosRat::parse(std::string_view text) {
  Rational q = parse_rational(text);
  if (sgn(q) <= 0) throw ParseError("expected a positive rational, got \"" + std::string(text) + "\"", 1, 1);
  return PosRat(q);
}

namespace {

constexpr unsigned long kTrialLimit = 1u << 16;

Integer pollard_brent(const Integer& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer y = 2, x, q = 1, g = 1, ys;
    const unsigned long m = 128;
    unsigned long r = 1;
    auto f = [&](const Integer& v) {
      Integer w = v * v + c;
      mpz_mod(w.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
      return w;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          Integer diff = abs(x - y);
          q = (q * diff) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        Integer diff = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(Integer n, long multiplicity, ExpVec& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40) > 0) {
    out[n] += multiplicity;
    return;
  }
  Integer d = pollard_brent(n);
  factor_into(d, multiplicity, out);
  factor_into(n / d, multiplicity, out);
}

}  // namespace

ExpVec factor(const Integer& n) {
  if (n <= 0) throw PreconditionError("factor requires a positive integer, got " + to_string(n));
  ExpVec out;
  Integer rest = n;
  for (unsigned long p = 2; p < kTrialLimit && rest > 1; p += (p == 2 ? 1 : 2)) {
    if (Integer(p) * p > rest) break;
    long e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    if (e != 0) out[Integer(p)] = e;
  }
  factor_into(rest, 1, out);
  return out;
}

ExpVec factor(const PosRat& q) {
  ExpVec out = factor(q.numerator());
  for (const auto& [p, e] : factor(q.denominator())) out[p] -= e;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

PosRat evaluate(const ExpVec& e) {
  Integer num = 1, den = 1;
  for (const auto& [p, k] : e) {
    Integer pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k));
    (k < 0 ? den : num) *= pk;
  }
  return PosRat(num, den);
}

IntMatrix hermite_normal_form(IntMatrix m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index pivot_row = 0;
  for (Eigen::Index col = 0; col < cols && pivot_row < rows; ++col) {
    // Fold every lower row's entry in this column into the pivot row.
    for (Eigen::Index r = pivot_row + 1; r < rows; ++r) {
      if (sgn(m(r, col)) == 0) continue;
      Integer g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), m(pivot_row, col).get_mpz_t(),
                 m(r, col).get_mpz_t());
      const Integer a = m(pivot_row, col) / g;
      const Integer b = m(r, col) / g;
      for (Eigen::Index j = col; j < cols; ++j) {
        const Integer top = m(pivot_row, j), bottom = m(r, j);
        m(pivot_row, j) = x * top + y * bottom;
        m(r, j) = a * bottom - b * top;
      }
    }
    if (sgn(m(pivot_row, col)) == 0) continue;
    if (sgn(m(pivot_row, col)) < 0) m.row(pivot_row) = -m.row(pivot_row);
    const Integer& pivot = m(pivot_row, col);
    for (Eigen::Index r = 0; r < pivot_row; ++r) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), m(r, col).get_mpz_t(), pivot.get_mpz_t());
      if (sgn(q) != 0)
        for (Eigen::Index j = col; j < cols; ++j) m(r, j) -= q * m(pivot_row, j);
    }
    ++pivot_row;
  }
  return m.topRows(pivot_row);
}

namespace {

// Column of the first nonzero entry of an HNF row.
Eigen::Index pivot_column(const IntMatrix& hnf, Eigen::Index row) {
  for (Eigen::Index j = 0; j < hnf.cols(); ++j)
    if (sgn(hnf(row, j)) != 0) return j;
  throw ConsistencyError("zero row in Hermite normal form");
}

}  // namespace

SubgroupH subgroup_from_generators(std::vector<PosRat> gens) {
  SubgroupH h;
  std::vector<ExpVec> exps;
  std::set<Integer> primes;
  for (const PosRat& g : gens) {
    exps.push_back(factor(g));
    for (const auto& [p, e] : exps.back()) primes.insert(p);
  }
  h.generators_ = std::move(gens);
  h.primes_.assign(primes.begin(), primes.end());
  IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(exps.size()), static_cast<Eigen::Index>(primes.size()));
  for (std::size_t r = 0; r < exps.size(); ++r)
    for (std::size_t c = 0; c < h.primes_.size(); ++c) {
      auto it = exps[r].find(h.primes_[c]);
      if (it != exps[r].end()) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = it->second;
    }
  // Row operations preserve the span, so no prime column can vanish here.
  h.hnf_ = hermite_normal_form(std::move(m));
  return h;
}

std::optional<IntVector> SubgroupH::coordinates(const PosRat& q) const {
  IntVector v = IntVector::Zero(static_cast<Eigen::Index>(primes_.size()));
  for (const auto& [p, e] : factor(q)) {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    v(it - primes_.begin()) = e;
  }
  return v;
}

bool contains(const SubgroupH& h, const PosRat& q) {
  std::optional<IntVector> v = h.coordinates(q);
  if (!v) return false;
  for (Eigen::Index r = 0; r < h.hnf().rows(); ++r) {
    const Eigen::Index c = pivot_column(h.hnf(), r);
    for (Eigen::Index j = 0; j < c; ++j)
      if (sgn((*v)(j)) != 0) return false;
    if (!mpz_divisible_p((*v)(c).get_mpz_t(), h.hnf()(r, c).get_mpz_t())) return false;
    const Integer quotient = (*v)(c) / h.hnf()(r, c);
    *v -= quotient * h.hnf().row(r).transpose();
  }
  return (v->array() == Integer(0)).all();
}

bool equiv(const SubgroupH& h, const Integer& n, const Integer& m) {
  if (n <= 0 || m <= 0) throw PreconditionError("equiv requires positive integers");
  return contains(h, PosRat(n, m));
}

SubgroupH subgroup_from_equiv_pairs(const EquivRelSpec& spec) {
  std::vector<PosRat> gens;
  gens.reserve(spec.pairs.size());
  for (const auto& [n, m] : spec.pairs) {
    if (n <= 0 || m <= 0)
      throw PreconditionError("equivalence pairs must be positive, got (" + to_string(n) + ", " + to_string(m) + ")");
    gens.emplace_back(n, m);
  }
  return subgroup_from_generators(std::move(gens));
}

}  // namespace dimgrp::ratlattice
