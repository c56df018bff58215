#include "dimgrp/dimbuild.hpp"
#include "dimgrp/error.hpp"
#include "dimgrp/random.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dimgrp;
using namespace dimgrp::dimbuild;
using dimgrp::testing::cached_bundle;
using dimgrp::testing::q;
using dimgrp::testing::rvec;
using dimgrp::testing::subgroup;

namespace {

const PosRat kOne;

const DiagramTruncation& dyadic() { return cached_bundle({"2"}, 4, 7).truncation; }

}  // namespace

TEST_CASE("basis labels") {
  const OrderBasis basis(LevelIndex{1, {kOne, q("2")}});
  CHECK(basis.size() == 7);
  CHECK(static_cast<std::size_t>(basis.size()) == level_rank(LevelIndex{1, {kOne, q("2")}}));
  CHECK(basis.label(0) == BasisLabel::v());
  CHECK(basis.label(1) == BasisLabel::xy(kOne, BinarySeq("0")));
  CHECK(basis.label(5) == BasisLabel::xc(kOne, 1));
  CHECK(basis.label(6) == BasisLabel::xc(q("2"), 1));
  for (const BasisLabel& label : basis.labels()) CHECK(BasisLabel::parse(label.str()) == label);
  CHECK(BasisLabel::xy(q("3/2"), BinarySeq("01")).str() == "XY(3/2,01)");
  CHECK_THROWS_AS(OrderBasis(std::vector<BasisLabel>{BasisLabel::v(), BasisLabel::v()}), PreconditionError);
  CHECK_THROWS_AS(basis.index_of(BasisLabel::xc(q("5"), 1)), PreconditionError);
}

TEST_CASE("level zero") {
  const DiagramTruncation& t = dyadic();
  const LevelGroup& l0 = t.levels[0];
  CHECK(l0.index.F == Support{kOne});
  CHECK(l0.basis.labels() == std::vector<BasisLabel>{BasisLabel::v(), BasisLabel::xy(kOne, BinarySeq())});
  CHECK(l0.u == rvec({1, 1}));
  for (const LevelGroup& level : t.levels) CHECK(level.u(0) == level.k);
}

TEST_CASE("unit coordinates and integrality") {
  corner::ParamSeq p;
  p.s = {6};
  p.t = {6};
  p.k = {6, 36};
  p.l = {6, 36};
  const SubgroupH h = subgroup({"3/2"});
  const LevelGroup level = build_level(LevelIndex{0, {q("3/2")}}, p, h);
  CHECK(level.u(1) == 24);
  CHECK(is_integral_level(level));

  p.k = {2, 12};
  p.l = {2, 12};
  CHECK_FALSE(is_integral_level(build_level(LevelIndex{0, {q("3/2")}}, p, h)));
  CHECK(is_integral_level(build_level(LevelIndex{0, {kOne}}, p, h)));

  CHECK_THROWS_AS(build_level(LevelIndex{0, {q("5")}}, p, h), PreconditionError);
  CHECK_THROWS_AS(build_level(LevelIndex{0, {}}, p, h), PreconditionError);
}

TEST_CASE("first embedding of the dyadic truncation") {
  const DiagramTruncation& t = dyadic();
  const EmbeddingMatrix& e = t.embeddings[0];
  CHECK(e.m.rows() == 4);
  CHECK(e.m.cols() == 2);
  CHECK(RatVector(e.m * t.levels[0].u) == rvec({2, 4, 4, 2}));
  CHECK(t.levels[1].u == rvec({2, 4, 4, 2}));
  // The V column starts with s_0 at V of the next level.
  CHECK(e.m(0, 0) == t.corner.params.s[0]);
  CHECK(verify_embedding(e, t.levels[0], t.levels[1], t.corner).empty());
}

TEST_CASE("embedding columns follow the identification") {
  const DiagramTruncation& t = dyadic();
  for (std::size_t n = 0; n < t.embeddings.size(); ++n) {
    const LevelGroup& src = t.levels[n];
    const LevelGroup& dst = t.levels[n + 1];
    const RatMatrix& m = t.embeddings[n].m;
    const Integer& s = t.corner.params.s[n];
    CHECK(m(dst.basis.index_of(BasisLabel::v()), 0) == s);
    for (Eigen::Index j = 1; j < src.rank(); ++j) {
      const BasisLabel& label = src.basis.label(j);
      if (label.kind == BasisLabel::Kind::XY) {
        CHECK(m(dst.basis.index_of(BasisLabel::xy(label.h, label.y.appended('0'))), j) == 1);
        CHECK(m(dst.basis.index_of(BasisLabel::xy(label.h, label.y.appended('1'))), j) == s * s);
        CHECK((m.col(j).array() != Rational(0)).count() == 2);
      } else {
        CHECK(m(dst.basis.index_of(label), j) == t.corner.params.st(n));
        for (Eigen::Index r = 0; r < dst.rank(); ++r) {
          const BasisLabel& row = dst.basis.label(r);
          if (row.kind == BasisLabel::Kind::XY && m(r, j) != 0) CHECK(row.y.ends_with('0'));
        }
      }
    }
  }
}

TEST_CASE("every generated embedding verifies") {
  for (const auto& gens : std::vector<std::vector<std::string>>{{"2"}, {"3/2"}, {"2", "5/3"}}) {
    const DiagramTruncation& t = cached_bundle(gens, 4, 1).truncation;
    for (std::size_t n = 0; n < t.embeddings.size(); ++n) {
      CHECK(verify_embedding(t.embeddings[n], t.levels[n], t.levels[n + 1], t.corner).empty());
      CHECK(ordgrp::embedding_criterion(t.embeddings[n].m));
    }
    CHECK(check_positivity_slack(t).empty());
  }
}

TEST_CASE("verify_embedding reports a negated residue") {
  const DiagramTruncation& t = cached_bundle({"2", "5/3"}, 3, 2).truncation;
  std::size_t n = 0;
  while (n < t.embeddings.size() && t.corner.residues_at(1, n).empty()) ++n;
  REQUIRE(n < t.embeddings.size());
  corner::CornerData bad = t.corner;
  const corner::ResidueKey key = bad.residues_at(1, n).front().first;
  bad.residues[key] = -bad.residues[key];
  // The stored matrix with one residue entry negated, as a corrupted file
  // would hold it.
  const Eigen::Index col = t.levels[n].basis.index_of(BasisLabel::xc(*t.levels[n].index.F.begin(), 1));
  EmbeddingMatrix corrupted = t.embeddings[n];
  for (Eigen::Index r = 0; r < corrupted.m.rows(); ++r)
    if (t.levels[n + 1].basis.label(r).kind == BasisLabel::Kind::XY && corrupted.m(r, col) > 0) {
      corrupted.m(r, col) = -corrupted.m(r, col);
      break;
    }
  const std::vector<Violation> v = verify_embedding(corrupted, t.levels[n], t.levels[n + 1], t.corner);
  bool negative = false;
  for (const Violation& x : v) negative = negative || x.check == "embedding.nonnegative";
  CHECK(negative);
  CHECK_THROWS_AS(embedding_matrix(t.levels[n], t.levels[n + 1], bad), ConsistencyError);
}

TEST_CASE("cofinal extension") {
  const corner::EnumB trivial = corner::enumeration_from_elements(std::vector<corner::GroupRingElt>(
      3, [] {
        corner::GroupRingElt e(0);
        e.add(kOne, corner::BinarySeq(), 1);
        return e;
      }()));
  CHECK(cofinal_extension(LevelIndex{0, {kOne}}, 3, trivial).F == Support{kOne});

  corner::GroupRingElt two(0);
  two.add(q("2"), corner::BinarySeq(), 1);
  const corner::EnumB e = corner::enumeration_from_elements({two, two});
  const LevelIndex next = cofinal_extension(LevelIndex{1, {kOne}}, 2, e);
  CHECK(next.n == 2);
  CHECK(next.F.contains(kOne));
  CHECK(next.F.contains(q("2")));
  CHECK(cofinal_extension(next, 2, e) == next);
  CHECK(extension_step(Support{kOne}, 0, e) == Support{kOne});
}

TEST_CASE("closure products appear in the level supports") {
  const DiagramTruncation& t = cached_bundle({"2", "5/3"}, 3, 1).truncation;
  for (std::size_t n = 0; n + 1 < t.levels.size(); ++n) {
    const Support& f = t.levels[n].index.F;
    const Support& next = t.levels[n + 1].index.F;
    for (const PosRat& h : f) {
      CHECK(next.contains(h));
      for (std::size_t i = 1; i <= n; ++i)
        for (const PosRat& x : t.corner.enumeration.support(i)) CHECK(next.contains(h * x));
    }
  }
}

TEST_CASE("r and l at a level") {
  const DiagramTruncation& t = dyadic();
  for (const LevelGroup& level : t.levels) {
    if (!is_integral_level(level)) continue;
    CHECK(rl_at_level(to_integer(level.u), level) == ordgrp::RatBoundPair{1, 1});
    CHECK(rl_at_level(IntVector::Zero(level.rank()), level) == ordgrp::RatBoundPair{0, 0});
  }
}

TEST_CASE("H-action") {
  const DiagramTruncation& t = dyadic();
  for (const LevelGroup& level : t.levels) {
    const HAction id = h_action(kOne, level, t.subgroup);
    CHECK(id.dst == level.index);
    CHECK(id.a == RatMatrix::Identity(level.rank(), level.rank()));

    const HAction a = h_action(q("2"), level, t.subgroup);
    CHECK(a.dst.F == scale_support(level.index.F, q("2")));
    const LevelGroup image = build_level(a.dst, t.corner.params, t.subgroup);
    CHECK(RatVector(a.a * level.u) == RatVector(image.u * Rational(2)));
    CHECK(verify_h_action(a, level, image, t.subgroup).empty());
    CHECK(check_action_composition(q("2"), q("1/2"), level, t.corner.params, t.subgroup).empty());
    CHECK(check_action_composition(q("2"), q("2"), level, t.corner.params, t.subgroup).empty());
  }
  for (std::size_t n = 0; n + 1 < t.levels.size(); ++n) CHECK(check_action_commutes(q("2"), t, n).empty());
  CHECK_THROWS_AS(h_action(q("3"), t.levels[0], t.subgroup), PreconditionError);
}

TEST_CASE("orbit certificates") {
  const DiagramTruncation& t = dyadic();
  const OrbitResult ok = orbit_certificate(1, 2, t);
  REQUIRE(ok.certificate.has_value());
  CHECK(ok.certificate->h == q("2"));
  CHECK(ok.certificate->valid());
  CHECK(ok.certificate->actions.size() == t.levels.size());

  const OrbitResult refused = orbit_certificate(3, 4, t);
  CHECK_FALSE(refused.certificate.has_value());
  CHECK(refused.refusal == "3/4 ∉ H");

  const OrbitResult same = orbit_certificate(5, 5, t);
  REQUIRE(same.certificate.has_value());
  CHECK(same.certificate->h.is_one());
  for (const HAction& a : same.certificate->actions) CHECK(a.a == RatMatrix::Identity(a.a.rows(), a.a.cols()));
}

TEST_CASE("ambient forms agree with the embeddings") {
  const DiagramTruncation& t = cached_bundle({"3/2"}, 3, 2).truncation;
  for (std::size_t n = 0; n < t.embeddings.size(); ++n) {
    const LevelGroup& src = t.levels[n];
    const LevelGroup& dst = t.levels[n + 1];
    for (Eigen::Index j = 0; j < src.rank(); ++j) {
      const AmbientElt lifted = lift(ambient_of(src.basis.label(j), src), t.corner);
      CHECK(lifted == ambient_combination(dst, RatVector(t.embeddings[n].m.col(j))));
    }
  }
}

TEST_CASE("property: stability of r and l along the chain") {
  const DiagramTruncation& t = cached_bundle({"2", "5/3"}, 4, 3).truncation;
  Rng rng(mix_seed(31, 0));
  for (std::size_t n = 0; n + 2 < t.levels.size(); ++n) {
    if (!is_integral_level(t.levels[n]) || !is_integral_level(t.levels[n + 2])) continue;
    const RatMatrix push = sparse_product(t.embeddings[n + 1].m, t.embeddings[n].m);
    for (int k = 0; k < 200; ++k) {
      IntVector d(t.levels[n].rank());
      for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = rng.between(-1000, 1000);
      CHECK(rl_at_level(d, t.levels[n]) == rl_at_level(to_integer(RatVector(push * to_rational(d))), t.levels[n + 2]));
    }
  }
}
