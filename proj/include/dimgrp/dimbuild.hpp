#pragma once

// Level groups D_{n,F} of the ordered group D = Qu + G and the matrices
// between them.
//
// The order basis of Q D_{n,F} is
//
//   v_{n,F},   x_h y  (h in F, |y| = n),   x_h c_i^(n)  (h in F, 1 <= i <= n),
//
// with the product order, where
//
//   v_{n,F} = u/k_n - sum_{h in F} h^-1 x_h (k_n sum_y y + l_n sum_i c_i^(n)).
//
// Hence u has coordinates k_n on v, k_n^2 h^-1 on x_h y and k_n l_n h^-1 on
// x_h c_i. Elements are also tracked in "ambient" form, a multiple of u plus
// rational combinations of x_h y and x_h c_i at one stage. Embeddings and the
// H-action are checked in that form independently of their matrices.

#include "dimgrp/corner.hpp"
#include "dimgrp/ordgrp.hpp"
#include "dimgrp/ratlattice.hpp"
#include "dimgrp/scalar.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dimgrp::dimbuild {

using corner::BinarySeq;
using corner::CornerData;
using corner::ParamPolicy;
using corner::ParamSeq;
using corner::Support;
using corner::Violation;
using ratlattice::PosRat;
using ratlattice::SubgroupH;

struct LevelIndex {
  std::size_t n = 0;
  Support F;
  friend bool operator==(const LevelIndex&, const LevelIndex&) = default;
  friend auto operator<=>(const LevelIndex&, const LevelIndex&) = default;
};

struct BasisLabel {
  enum class Kind { V, XY, XC };
  Kind kind = Kind::V;
  PosRat h;              // XY, XC
  BinarySeq y;           // XY
  std::size_t i = 0;     // XC

  static BasisLabel v() { return {}; }
  static BasisLabel xy(PosRat h, BinarySeq y) { return {Kind::XY, std::move(h), std::move(y), 0}; }
  static BasisLabel xc(PosRat h, std::size_t i) { return {Kind::XC, std::move(h), {}, i}; }

  // "V", "XY(h,y)" or "XC(h,i)".
  std::string str() const;
  static BasisLabel parse(std::string_view text);

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

// V, then XY sorted by (h, y), then XC sorted by (h, i).
class OrderBasis {
 public:
  OrderBasis() = default;
  // The canonical basis of the level.
  explicit OrderBasis(const LevelIndex& idx);
  // An explicit label list, as read back from a bundle. Throws
  // PreconditionError on duplicates.
  explicit OrderBasis(std::vector<BasisLabel> labels);

  Eigen::Index size() const { return static_cast<Eigen::Index>(labels_.size()); }
  const std::vector<BasisLabel>& labels() const noexcept { return labels_; }
  const BasisLabel& label(Eigen::Index j) const { return labels_.at(static_cast<std::size_t>(j)); }
  // Throws PreconditionError for a label outside the basis.
  Eigen::Index index_of(const BasisLabel& label) const;
  bool contains(const BasisLabel& label) const { return lookup_.contains(label); }

  friend bool operator==(const OrderBasis& a, const OrderBasis& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<BasisLabel> labels_;
  std::map<BasisLabel, Eigen::Index> lookup_;
};

// 1 + |F| 2^n + |F| n.
std::size_t level_rank(const LevelIndex& idx);

struct LevelGroup {
  LevelIndex index;
  OrderBasis basis;
  RatVector u;
  Integer k;  // k_n
  Integer l;  // l_n

  Eigen::Index rank() const { return basis.size(); }
};

// Throws PreconditionError when F is empty, some h in F is outside H, or
// the parameters do not reach stage n.
LevelGroup build_level(const LevelIndex& idx, const ParamSeq& params, const SubgroupH& h);

// k_n h^-1 and l_n h^-1 are integers for every h in F.
bool is_integral_level(const LevelGroup& level);

// F u  (F . F_1)  ...  (F . F_n): the least F' admitting an embedding
// (n, F) -> (n+1, F').
Support extension_step(const Support& F, std::size_t n, const corner::EnumB& enumeration);

// Iterates extension_step from idx.n up to m.
LevelIndex cofinal_extension(const LevelIndex& idx, std::size_t m, const corner::EnumB& enumeration);

struct EmbeddingMatrix {
  LevelIndex src;
  LevelIndex dst;
  RatMatrix m;  // rows: dst basis, columns: src basis
};

// Coordinates of the src basis in the dst basis. Throws PreconditionError
// unless dst.n = src.n + 1 and dst.F contains F and F F_i for i <= n, and
// ConsistencyError if an entry comes out negative.
EmbeddingMatrix embedding_matrix(const LevelGroup& src, const LevelGroup& dst, const CornerData& corner);

// An element of Q D tracked as q u + sum a_{h,y} x_h y + sum b_{h,i} x_h c_i^(stage).
struct AmbientElt {
  std::size_t stage = 0;
  Rational u = 0;
  std::map<corner::TermKey, Rational> xy;
  std::map<std::pair<PosRat, std::size_t>, Rational> xc;

  AmbientElt& add(const AmbientElt& other, const Rational& scale);
  friend bool operator==(const AmbientElt&, const AmbientElt&) = default;
};

AmbientElt ambient_of(const BasisLabel& label, const LevelGroup& level);
// Sum_j coords_j * ambient_of(basis_j).
AmbientElt ambient_combination(const LevelGroup& level, const RatVector& coords);
// Rewrites stage n as stage n+1 with y = y0 + s_n^2 y1 and
// c_i^(n) = s_n t_n c_i^(n+1) + sum_{t,y} n^(i)_{t,y} x_t y0.
AmbientElt lift(const AmbientElt& e, const CornerData& corner);
// The action of x_h: h on the u part, g -> h g on the group-ring labels.
AmbientElt act(const PosRat& h, const AmbientElt& e);

// Nonnegativity, the designated private positive rows (x_h y1 for x_h y,
// x_h c_i^(n+1) for x_h c_i^(n), v_{n+1,F'} for v_{n,F}), E u = u', the
// lower bound on the mixed x_h y0 coefficients of the v column, integrality
// when both levels are integral, and agreement with the lifted ambient form
// of every source basis element.
std::vector<Violation> verify_embedding(const EmbeddingMatrix& e, const LevelGroup& src, const LevelGroup& dst,
                                        const CornerData& corner);

// Requires an integral level and integral d.
ordgrp::RatBoundPair rl_at_level(const IntVector& d, const LevelGroup& level);

struct HAction {
  PosRat h;
  LevelIndex src;
  LevelIndex dst;  // (n, hF)
  RatMatrix a;
};

Support scale_support(const Support& F, const PosRat& h);

// v -> h v_{n,hF}, x_g y -> x_{hg} y, x_g c_i -> x_{hg} c_i.
// Throws PreconditionError when h is not in H.
HAction h_action(const PosRat& h, const LevelGroup& level, const SubgroupH& subgroup);

// A u_src = h u_dst, x_h b = A b in ambient form for every basis element b,
// the criterion for A and for the action of h^-1, and that the latter
// inverts A.
std::vector<Violation> verify_h_action(const HAction& action, const LevelGroup& src, const LevelGroup& dst,
                                       const SubgroupH& subgroup);

struct DiagramTruncation {
  SubgroupH subgroup;
  CornerData corner;
  ParamPolicy policy = ParamPolicy::NumeratorLcm;
  std::uint64_t seed = 0;
  std::vector<LevelGroup> levels;            // L_0 .. L_N
  std::vector<EmbeddingMatrix> embeddings;   // L_n -> L_{n+1}

  std::size_t depth() const { return corner.depth; }
};

// The chain L_0 = (0, {1}), L_{n+1} = (n+1, extension_step(F_n)).
DiagramTruncation build_truncation(const SubgroupH& subgroup, std::size_t depth, std::uint64_t seed,
                                   ParamPolicy policy = ParamPolicy::NumeratorLcm);

struct OrbitCertificate {
  Integer n;
  Integer m;
  PosRat h;  // m/n
  std::vector<HAction> actions;  // one per level of the chain
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
};

struct OrbitResult {
  std::optional<OrbitCertificate> certificate;
  std::string refusal;  // set when certificate is absent
};

// An order automorphism of D carrying n u to m u exists at the truncated
// level exactly when n/m lies in H; the certificate is the action of
// h = m/n on every level, each checked with verify_h_action and with
// A (n u) = m u', plus commutation with the embeddings.
OrbitResult orbit_certificate(const Integer& n, const Integer& m, const DiagramTruncation& t);

// E' A = A' E for the embeddings on (n, F) and (n, hF).
std::vector<Violation> check_action_commutes(const PosRat& h, const DiagramTruncation& t, std::size_t n);

// g_action(L_{hF}) h_action(L) = (gh)_action(L).
std::vector<Violation> check_action_composition(const PosRat& g, const PosRat& h, const LevelGroup& level,
                                                const ParamSeq& params, const SubgroupH& subgroup);

// k_n (s_n^2 - 1) - l_n s_n t_n sum_{i<=n} sum_{h in F_i} h >= 0 for n < N.
std::vector<Violation> check_positivity_slack(const DiagramTruncation& t);

}  // namespace dimgrp::dimbuild
