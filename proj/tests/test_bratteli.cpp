#include "dimgrp/bratteli.hpp"
#include "dimgrp/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dimgrp;
using namespace dimgrp::bratteli;
using dimgrp::testing::cached_bundle;
using dimgrp::testing::imat;
using dimgrp::testing::ivec;
using dimgrp::testing::q;

namespace {

UltramatricialPresentation dyadic_chain(std::size_t depth) { return localization_model({2}, depth); }

}  // namespace

TEST_CASE("K0 of small presentations") {
  const PointedTruncation z = k0({{ivec({1})}, {}});
  CHECK(z.levels.size() == 1);
  CHECK(z.levels[0].unit() == ivec({1}));

  const UltramatricialPresentation step{{ivec({1}), ivec({2})}, {imat({{2}})}};
  CHECK_FALSE(presentation_violation(step));
  CHECK(k0(step).flags.empty());

  const UltramatricialPresentation merge{{ivec({1, 1}), ivec({2})}, {imat({{1, 1}})}};
  CHECK_FALSE(presentation_violation(merge));
  CHECK(IntVector(merge.maps[0] * merge.unit(0)) == ivec({2}));
  // Two columns into one row cannot have private rows.
  CHECK(k0(merge).flags.size() == 1);

  const UltramatricialPresentation not_unital{{ivec({1}), ivec({3})}, {imat({{2}})}};
  CHECK(presentation_violation(not_unital) == "map 0 is not unital");
  CHECK_THROWS_AS(k0(not_unital), PreconditionError);
}

TEST_CASE("composition stays unital") {
  const UltramatricialPresentation p{{ivec({1, 2}), ivec({3, 5}), ivec({8, 13, 5})},
                                     {imat({{1, 1}, {1, 2}}), imat({{1, 1}, {1, 2}, {0, 1}})}};
  REQUIRE_FALSE(presentation_violation(p));
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a; b < p.size(); ++b) CHECK(IntVector(compose(p, a, b) * p.unit(a)) == p.unit(b));
  CHECK(compose(p, 1, 1) == IntMatrix::Identity(2, 2));
  CHECK_THROWS_AS(compose(p, 2, 1), PreconditionError);
}

TEST_CASE("Morita scaling") {
  const UltramatricialPresentation p = dyadic_chain(3);
  const UltramatricialPresentation one = morita_scale(p, 1);
  CHECK(one.levels == p.levels);
  CHECK(one.maps == p.maps);
  for (long n = 1; n <= 6; ++n)
    for (long m = 1; m <= 6; ++m) {
      const UltramatricialPresentation twice = morita_scale(morita_scale(p, n), m);
      const UltramatricialPresentation once = morita_scale(p, n * m);
      CHECK(twice.levels == once.levels);
      CHECK(twice.maps == once.maps);
      CHECK_FALSE(presentation_violation(twice));
    }
  CHECK_THROWS_AS(morita_scale(p, 0), PreconditionError);

  // Scaling the dyadic chain by 2 sends u to 2u, which the H = <2> engine
  // carries back to u.
  const auto& t = cached_bundle({"2"}, 4, 7).truncation;
  CHECK(morita_scale(p, 2).unit(0) == ivec({2}));
  const dimbuild::OrbitResult r = dimbuild::orbit_certificate(1, 2, t);
  REQUIRE(r.certificate.has_value());
  CHECK(r.certificate->valid());
}

TEST_CASE("intertwining certificates") {
  const UltramatricialPresentation p = dyadic_chain(4);
  IntertwiningCertificate id;
  for (std::size_t k = 0; k < 3; ++k) {
    id.a_levels.push_back(k);
    id.b_levels.push_back(k);
    id.forward.push_back(imat({{1}}));
    if (k < 2) id.backward.push_back(imat({{2}}));
  }
  CHECK(verify_intertwining(p, p, id));

  // The chain against itself one level higher: forward multiplies by 2.
  IntertwiningCertificate shifted;
  for (std::size_t k = 0; k < 3; ++k) {
    shifted.a_levels.push_back(k);
    shifted.b_levels.push_back(k + 1);
    shifted.forward.push_back(imat({{2}}));
    if (k < 2) shifted.backward.push_back(imat({{1}}));
  }
  CHECK(verify_intertwining(p, p, shifted));

  IntertwiningCertificate corrupt = shifted;
  corrupt.backward[1](0, 0) = 2;
  CHECK_FALSE(verify_intertwining(p, p, corrupt));

  IntertwiningCertificate short_cert = shifted;
  short_cert.backward.pop_back();
  CHECK_THROWS_AS(verify_intertwining(p, p, short_cert), PreconditionError);
}

TEST_CASE("presentation of a truncation") {
  const auto& t = cached_bundle({"1"}, 2, 1).truncation;
  REQUIRE(t.subgroup.is_trivial());
  const TruncationPresentation tp = presentation_from_truncation(t);
  CHECK_FALSE(presentation_violation(tp.presentation));
  CHECK(tp.chain_levels == std::vector<std::size_t>{0, 1, 2});
  CHECK(tp.presentation.unit(0) == ivec({1, 1}));
  CHECK(k0(tp.presentation).flags.empty());
  for (std::size_t j = 0; j < tp.chain_levels.size(); ++j)
    CHECK(to_rational(tp.presentation.unit(j)) == t.levels[tp.chain_levels[j]].u);
}

TEST_CASE("presentations skip non-integral levels") {
  const auto& t = cached_bundle({"3/2"}, 4, 2, corner::ParamPolicy::Minimal).truncation;
  const TruncationPresentation tp = presentation_from_truncation(t);
  CHECK_FALSE(presentation_violation(tp.presentation));
  CHECK(k0(tp.presentation).flags.empty());
  for (std::size_t n : tp.chain_levels) CHECK(dimbuild::is_integral_level(t.levels[n]));
  for (std::size_t n = 0; n < t.levels.size(); ++n)
    if (dimbuild::is_integral_level(t.levels[n]))
      CHECK(std::find(tp.chain_levels.begin(), tp.chain_levels.end(), n) != tp.chain_levels.end());
}

TEST_CASE("localization models") {
  const UltramatricialPresentation two = localization_model({2}, 3);
  CHECK(two.levels == std::vector<IntVector>{ivec({1}), ivec({2}), ivec({4}), ivec({8})});
  const UltramatricialPresentation six = localization_model({2, 3}, 4);
  CHECK(six.maps == std::vector<IntMatrix>{imat({{2}}), imat({{3}}), imat({{2}}), imat({{3}})});
  CHECK_THROWS_AS(localization_model({}, 2), PreconditionError);
  CHECK_THROWS_AS(rank_one_orbit(six, 0, 1), PreconditionError);

  const UltramatricialPresentation deep = localization_model({2, 3}, 12);
  const ratlattice::SubgroupH h = dimgrp::testing::subgroup({"2", "3"});
  for (long n = 1; n <= 50; ++n)
    for (long m = 1; m <= 50; ++m) CHECK(rank_one_orbit(deep, n, m) == ratlattice::equiv(h, n, m));
}
