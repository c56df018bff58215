#include "dimgrp/error.hpp"
#include "dimgrp/random.hpp"
#include "dimgrp/ratlattice.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace dimgrp;
using namespace dimgrp::ratlattice;
using dimgrp::testing::imat;
using dimgrp::testing::q;
using dimgrp::testing::subgroup;

namespace {

// Every product of generator powers with exponents in [-bound, bound].
std::set<PosRat> word_ball(const std::vector<PosRat>& gens, int bound) {
  std::set<PosRat> out{PosRat()};
  for (const PosRat& g : gens) {
    std::set<PosRat> next;
    for (const PosRat& x : out) {
      PosRat power;
      for (int e = 0; e <= bound; ++e) {
        next.insert(x * power);
        next.insert(x / power);
        power = power * g;
      }
    }
    out = std::move(next);
  }
  return out;
}

const Integer kSmallPrimes[] = {2, 3, 5, 7, 11, 13};

PosRat random_smooth(Rng& rng, int max_exponent, int primes_used) {
  Rational value = 1;
  for (int k = 0; k < primes_used; ++k) {
    const Integer& p = kSmallPrimes[rng.below(6)];
    const long e = rng.between(-max_exponent, max_exponent);
    Integer power;
    mpz_pow_ui(power.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
    value *= e < 0 ? Rational(Integer(1), power) : Rational(power);
  }
  return PosRat(value);
}

SubgroupH random_subgroup(Rng& rng, std::vector<PosRat>* gens_out = nullptr) {
  std::vector<PosRat> gens;
  const std::size_t count = 1 + rng.below(3);
  for (std::size_t k = 0; k < count; ++k) gens.push_back(random_smooth(rng, 2, 2));
  if (gens_out) *gens_out = gens;
  return subgroup_from_generators(gens);
}

}  // namespace

TEST_CASE("factor gives prime exponent vectors") {
  CHECK(factor(q("12")) == ExpVec{{2, 2}, {3, 1}});
  CHECK(factor(q("1")).empty());
  CHECK(factor(q("2/3")) == ExpVec{{2, 1}, {3, -1}});
  CHECK(evaluate(factor(q("360/77"))) == q("360/77"));
}

TEST_CASE("positive rationals parse in lowest terms") {
  CHECK(q("4/6") == q("2/3"));
  CHECK(q("7").denominator() == 1);
  CHECK_THROWS_AS(PosRat::parse("0"), ParseError);
  CHECK_THROWS_AS(PosRat::parse("-2/3"), ParseError);
  CHECK_THROWS_AS(PosRat::parse("2/"), ParseError);
}

TEST_CASE("Hermite normal form is canonical") {
  CHECK(hermite_normal_form(imat({{2, -2}, {1, -1}})) == imat({{1, -1}}));
  CHECK(hermite_normal_form(imat({{4, 6}, {2, 4}})) == imat({{2, 0}, {0, 2}}));
  CHECK(hermite_normal_form(imat({{0, 0}})).rows() == 0);
  const IntMatrix once = hermite_normal_form(imat({{3, 5, 7}, {2, 9, 4}}));
  CHECK(hermite_normal_form(once) == once);
}

TEST_CASE("subgroups from generators") {
  const SubgroupH two = subgroup({"2"});
  CHECK(two.primes() == std::vector<Integer>{2});
  CHECK(two.hnf() == imat({{1}}));

  const SubgroupH h = subgroup({"4/9", "2/3"});
  CHECK(h.primes() == std::vector<Integer>{2, 3});
  CHECK(h.hnf() == imat({{1, -1}}));
  // Cross-check against the bounded word ball.
  CHECK(word_ball({q("4/9"), q("2/3")}, 3).contains(q("8/27")));

  const SubgroupH trivial = subgroup_from_generators({});
  CHECK(trivial.is_trivial());
  CHECK(subgroup({"1"}) == trivial);
  CHECK(subgroup({"2", "4"}) == two);
}

TEST_CASE("membership") {
  const SubgroupH h = subgroup({"2/3"});
  CHECK(contains(h, q("4/9")));
  CHECK_FALSE(contains(h, q("2")));
  CHECK_FALSE(word_ball({q("2/3")}, 6).contains(q("2")));
  CHECK(contains(h, q("1")));
  CHECK(contains(subgroup_from_generators({}), q("1")));
  CHECK_FALSE(contains(h, q("5")));
}

TEST_CASE("matrix type equivalence") {
  const SubgroupH h = subgroup({"2"});
  CHECK(equiv(h, 1, 2));
  CHECK(equiv(h, 3, 6));
  CHECK_FALSE(equiv(h, 3, 4));
  CHECK(equiv(h, 5, 5));
}

TEST_CASE("subgroups from equivalent pairs") {
  CHECK(subgroup_from_equiv_pairs({{{1, 2}}}) == subgroup({"2"}));
  CHECK(subgroup_from_equiv_pairs({{{3, 6}}}) == subgroup({"2"}));
  const SubgroupH trivial = subgroup_from_equiv_pairs({});
  CHECK(trivial.is_trivial());
  CHECK(equiv(trivial, 4, 4));
  CHECK_FALSE(equiv(trivial, 4, 5));
  CHECK_THROWS_AS(subgroup_from_equiv_pairs({{{0, 2}}}), PreconditionError);
}

TEST_CASE("property: membership is closed under products and inverses") {
  Rng rng(mix_seed(11, 0));
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<PosRat> gens;
    const SubgroupH h = random_subgroup(rng, &gens);
    const PosRat a = gens[rng.below(gens.size())] * gens[rng.below(gens.size())].inverse();
    const PosRat b = gens[rng.below(gens.size())] * gens[rng.below(gens.size())];
    REQUIRE(contains(h, a));
    REQUIRE(contains(h, b));
    CHECK(contains(h, a * b));
    CHECK(contains(h, a.inverse()));
    const PosRat c = random_smooth(rng, 3, 2);
    if (contains(h, c)) CHECK(contains(h, a * c));
    else CHECK_FALSE(contains(h, a * c));
  }
}

TEST_CASE("property: equivalence is invariant under scaling") {
  Rng rng(mix_seed(12, 0));
  for (int trial = 0; trial < 20; ++trial) {
    const SubgroupH h = random_subgroup(rng);
    for (int k = 0; k < 200; ++k) {
      const Integer n = static_cast<long>(1 + rng.below(100));
      const Integer m = static_cast<long>(1 + rng.below(100));
      const Integer s = static_cast<long>(1 + rng.below(100));
      CHECK(equiv(h, n, m) == equiv(h, n * s, m * s));
    }
  }
}

TEST_CASE("property: membership agrees with bounded word search") {
  Rng rng(mix_seed(13, 0));
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<PosRat> gens;
    const SubgroupH h = random_subgroup(rng, &gens);
    const std::set<PosRat> ball = word_ball(gens, 6);
    for (int k = 0; k < 25; ++k) {
      const PosRat x = rng.coin() ? *std::next(ball.begin(), static_cast<long>(rng.below(ball.size())))
                                  : random_smooth(rng, 3, 2);
      CHECK(contains(h, x) == ball.contains(x));
    }
  }
}

TEST_CASE("property: pairs sampled from H recover its lattice") {
  Rng rng(mix_seed(14, 0));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PosRat> gens;
    const SubgroupH h = random_subgroup(rng, &gens);
    EquivRelSpec spec;
    for (const PosRat& g : gens) {
      const PosRat w = g * gens[rng.below(gens.size())];
      spec.pairs.emplace_back(g.numerator(), g.denominator());
      spec.pairs.emplace_back(w.numerator(), w.denominator());
    }
    const SubgroupH back = subgroup_from_equiv_pairs(spec);
    CHECK(back == h);
    CHECK(back.hnf() == h.hnf());
  }
}
