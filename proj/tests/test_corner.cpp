#include "dimgrp/corner.hpp"
#include "dimgrp/error.hpp"
#include "dimgrp/random.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dimgrp;
using namespace dimgrp::corner;
using dimgrp::testing::q;
using dimgrp::testing::subgroup;

namespace {

const PosRat kOne;

ParamSeq params_s0(long s0) {
  ParamSeq p;
  p.s = {s0};
  p.t = {1};
  p.k = {1, s0};
  p.l = {1, 1};
  return p;
}

GroupRingElt unit_element() {
  GroupRingElt e(0);
  e.add(kOne, BinarySeq(), 1);
  return e;
}

}  // namespace

TEST_CASE("binary sequences") {
  CHECK(all_sequences(0).size() == 1);
  CHECK(all_sequences(3).size() == 8);
  CHECK(all_sequences(2).front().str() == "00");
  CHECK(all_sequences(2).back().str() == "11");
  CHECK(BinarySeq("01").appended('1').str() == "011");
  CHECK(BinarySeq("011").prefix().str() == "01");
  CHECK_THROWS_AS(BinarySeq("012"), ParseError);
}

TEST_CASE("group ring elements drop zero coefficients") {
  GroupRingElt e(1);
  e.add(q("2"), BinarySeq("0"), 3);
  e.add(q("2"), BinarySeq("0"), -3);
  CHECK(e.is_zero());
  e.add(q("2"), BinarySeq("1"), 5);
  e.add(q("1/3"), BinarySeq("0"), 1);
  CHECK(e.support() == Support{q("1/3"), q("2")});
  CHECK((e - e).is_zero());
  CHECK((e * 2).coefficient(q("2"), BinarySeq("1")) == 10);
  CHECK_THROWS_AS(e.add(kOne, BinarySeq("01"), 1), PreconditionError);
}

TEST_CASE("rebasing rewrites y as y0 + s^2 y1") {
  const ParamSeq p = params_s0(2);
  const GroupRingElt once = rebase(unit_element(), p);
  CHECK(once.stage() == 1);
  CHECK(once.coefficient(kOne, BinarySeq("0")) == 1);
  CHECK(once.coefficient(kOne, BinarySeq("1")) == 4);
  CHECK(once.terms().size() == 2);
  CHECK(rebase(GroupRingElt(0), p).is_zero());

  ParamSeq p2 = p;
  p2.s.push_back(3);
  p2.t.push_back(1);
  p2.k.push_back(6);
  p2.l.push_back(1);
  const GroupRingElt twice = rebase(once, p2);
  CHECK(twice.coefficient(kOne, BinarySeq("00")) == 1);
  CHECK(twice.coefficient(kOne, BinarySeq("01")) == 9);
  CHECK(twice.coefficient(kOne, BinarySeq("10")) == 4);
  CHECK(twice.coefficient(kOne, BinarySeq("11")) == 36);
  CHECK(rebase_to(unit_element(), 2, p2) == twice);
  CHECK(canonical_form(twice, p2) == canonical_form(unit_element(), p2));
}

TEST_CASE("parameter recursion") {
  const std::vector<Support> trivial(2, Support{kOne});
  const ParamSeq p = make_params(trivial, 2, ParamPolicy::Minimal);
  CHECK(p.k[0] == 1);
  CHECK(p.l[0] == 1);
  // The positivity inequality alone allows s_0 = 1; s_n >= 2 is enforced.
  CHECK(p.s[0] == 2);
  CHECK(check_params(p, trivial).empty());

  const std::vector<Support> with_two{Support{q("2")}, Support{kOne}};
  const ParamSeq p2 = make_params(with_two, 2, ParamPolicy::Minimal);
  CHECK(p2.k[1] == p2.s[0]);
  CHECK(p2.l[1] == p2.t[0]);
  // k_1 (s^2 - 1) >= l_1 s t_1 * 2 with k_1 = 2, l_1 = t_1 = 1: least s >= 2 is 2.
  CHECK(p2.s[1] == 2);
  for (long s = 2; s < p2.s[1]; ++s) CHECK(p2.k[1] * (s * s - 1) < p2.l[1] * s * p2.t[1] * 2);

  const ParamSeq lcm = make_params(with_two, 2, ParamPolicy::NumeratorLcm);
  CHECK(check_params(lcm, with_two).empty());
  for (std::size_t n = 0; n <= 2; ++n) {
    CHECK(lcm.s[n] % lcm.t[n] == 0);
    CHECK(sgn(positivity_slack(lcm, with_two, n)) >= 0);
  }
}

TEST_CASE("check_params reports tampering") {
  const std::vector<Support> supports(3, Support{kOne});
  ParamSeq p = make_params(supports, 3);
  p.s[1] += 1;
  CHECK_FALSE(check_params(p, supports).empty());
  ParamSeq shape = make_params(supports, 3);
  shape.k.pop_back();
  CHECK(check_params(shape, supports).front().check == "params.shape");
}

TEST_CASE("one Euclidean step of the recursion") {
  // b_1 = x_1 (), d = 7, s t = 6 with s = 6, t = 1.
  const ParamSeq p = params_s0(6);
  const StepResult r = step_b(unit_element(), GroupRingElt(0), 7, 0, p);
  // 7 x_1 (0) + 7 * 36 x_1 (1): 7 = 1 * 6 + 1 and 252 = 42 * 6.
  CHECK(r.next.stage() == 1);
  CHECK(r.next.coefficient(kOne, BinarySeq("0")) == 1);
  CHECK(r.next.coefficient(kOne, BinarySeq("1")) == 42);
  REQUIRE(r.residues.size() == 1);
  CHECK(r.residues.begin()->first.y.str() == "0");
  CHECK(r.residues.begin()->second == 1);

  // t not dividing s leaves a remainder on a sequence ending in 1.
  ParamSeq bad = params_s0(3);
  bad.t = {2};
  CHECK_THROWS_AS(step_b(unit_element(), GroupRingElt(0), 7, 0, bad), ConsistencyError);
}

TEST_CASE("default enumeration") {
  const SubgroupH h = subgroup({"2", "5/3"});
  const EnumB e = default_enumeration(h, 6, 3);
  REQUIRE(e.size() == 6);
  CHECK(e.element(1) == unit_element());
  for (std::size_t i = 1; i <= 6; ++i) {
    CHECK_FALSE(e.element(i).is_zero());
    CHECK(e.element(i).stage() <= i);
    CHECK(e.support(i) == e.element(i).support());
    for (const PosRat& x : e.support(i)) CHECK(ratlattice::contains(h, x));
  }
  CHECK(default_enumeration(h, 6, 3).b == e.b);
  CHECK(default_enumeration(h, 6, 4).b != e.b);
}

TEST_CASE("sampled differences lie in range") {
  const std::vector<Support> supports(4, Support{kOne});
  const ParamSeq p = make_params(supports, 4);
  const WDiffs w = sample_wdiffs(p, 4, 9);
  CHECK(w.d.size() == 6);
  for (const auto& [key, d] : w.d) {
    CHECK(key.first <= key.second);
    CHECK(sgn(d) >= 0);
    CHECK(d < p.st(key.second));
  }
  CHECK(sample_wdiffs(p, 4, 9).d == w.d);
  CHECK_THROWS(w.at(2, 1));
}

TEST_CASE("the recursion identity holds on built skeletons") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const CornerData c = build_corner(subgroup({"2", "5/3"}), 4, seed);
    CHECK(check_reconstruction(c).empty());
    for (std::size_t i = 1; i <= 4; ++i) {
      CHECK(c.relation(i, i).is_zero());
      for (std::size_t n = i; n <= 4; ++n)
        for (const PosRat& h : c.relation(i, n).support()) CHECK(c.enumeration.support(i).contains(h));
    }
    for (const auto& [key, r] : c.residues) {
      CHECK(sgn(r) >= 0);
      CHECK(r < c.params.st(key.n));
      CHECK(key.y0.ends_with('0'));
    }
  }
}

TEST_CASE("reconstruction detects a corrupted residue") {
  CornerData c = build_corner(subgroup({"2"}), 3, 5);
  REQUIRE_FALSE(c.residues.empty());
  auto it = c.residues.begin();
  it->second += 1;
  const std::vector<Violation> v = check_reconstruction(c);
  REQUIRE_FALSE(v.empty());
  bool identity = false;
  for (const Violation& x : v) identity = identity || x.check == "reconstruction";
  CHECK(identity);
  const std::string witness = "(i=" + std::to_string(it->first.i) + ", n=" + std::to_string(it->first.n);
  CHECK(v.front().witness.starts_with(witness));
}

TEST_CASE("divisibility of k_n and l_n by small integers") {
  const CornerData c = build_corner(subgroup({"2"}), 4, 1);
  for (unsigned long m = 1; m <= 8; ++m) {
    bool hit = false;
    for (std::size_t n = 0; n < c.params.k.size(); ++n)
      hit = hit || (mpz_divisible_ui_p(c.params.k[n].get_mpz_t(), m) && mpz_divisible_ui_p(c.params.l[n].get_mpz_t(), m));
    CHECK_MESSAGE(hit, "M = ", m);
  }
}

TEST_CASE("policies") {
  CHECK(parse_policy("lcm") == ParamPolicy::NumeratorLcm);
  CHECK(parse_policy("minimal") == ParamPolicy::Minimal);
  CHECK(to_string(ParamPolicy::Minimal) == "minimal");
  CHECK_THROWS_AS(parse_policy("other"), ParseError);
}
