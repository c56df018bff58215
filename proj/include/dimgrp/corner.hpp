#pragma once

// Integer skeleton of the Corner-style group G underneath the dimension group.
//
// B = ZH (x) A is the free ZH-module whose stage-n part B_n has the basis
// x_h y, h in H, y a 0/1 sequence of length n. Passing from stage n to n+1
// uses the identification
//
//   y = y0 + s_n^2 y1,
//
// so an element keeps its value in B while its coordinates are rewritten.
// The Z-adic elements of the full construction never appear; only their
// integer differences d[i][n] = w_i^(n) - s_n t_n w_i^(n+1) do, and the
// recursion
//
//   b_i d[i][n] + b_i^(n) = s_n t_n b_i^(n+1) + sum_{h,y} n_{h,y}^(i) x_h y0
//
// (one Euclidean division per coefficient) produces the relation residues.

#include "dimgrp/ratlattice.hpp"
#include "dimgrp/scalar.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dimgrp::corner {

using ratlattice::PosRat;
using ratlattice::SubgroupH;
using Support = std::set<PosRat>;
using dimgrp::to_string;

class BinarySeq {
 public:
  BinarySeq() = default;
  // Throws ParseError on characters other than '0' and '1'.
  explicit BinarySeq(std::string_view bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool ends_with(char bit) const { return !bits_.empty() && bits_.back() == bit; }
  const std::string& str() const noexcept { return bits_; }

  BinarySeq appended(char bit) const;
  // Drops the last element; precondition: nonempty.
  BinarySeq prefix() const;

  friend bool operator==(const BinarySeq&, const BinarySeq&) = default;
  friend std::strong_ordering operator<=>(const BinarySeq&, const BinarySeq&) = default;

 private:
  std::string bits_;
};

// All 2^n sequences of length n in lexicographic order.
std::vector<BinarySeq> all_sequences(std::size_t n);

struct TermKey {
  PosRat h;
  BinarySeq y;
  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend std::strong_ordering operator<=>(const TermKey&, const TermKey&) = default;
};

// Finitely supported integer combination of x_h y over sequences y of one
// fixed length (the stage). Zero coefficients are never stored.
class GroupRingElt {
 public:
  explicit GroupRingElt(std::size_t stage = 0) : stage_(stage) {}

  std::size_t stage() const noexcept { return stage_; }
  const std::map<TermKey, Integer>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Integer coefficient(const PosRat& h, const BinarySeq& y) const;
  // Adds c to the coefficient of x_h y; y must have length stage().
  void add(const PosRat& h, const BinarySeq& y, const Integer& c);

  // The set of h with a nonzero term.
  Support support() const;

  GroupRingElt& operator+=(const GroupRingElt& other);
  GroupRingElt& operator-=(const GroupRingElt& other);
  GroupRingElt& operator*=(const Integer& c);

  friend GroupRingElt operator+(GroupRingElt a, const GroupRingElt& b) { return a += b; }
  friend GroupRingElt operator-(GroupRingElt a, const GroupRingElt& b) { return a -= b; }
  friend GroupRingElt operator*(GroupRingElt a, const Integer& c) { return a *= c; }
  friend bool operator==(const GroupRingElt&, const GroupRingElt&) = default;

 private:
  std::size_t stage_;
  std::map<TermKey, Integer> terms_;
};

// Parameter sequences, indexed from 0. s and t are materialized for
// n = 0..depth, k and l for n = 0..depth+1.
struct ParamSeq {
  std::vector<Integer> s, t, k, l;

  std::size_t depth() const { return s.empty() ? 0 : s.size() - 1; }
  Integer st(std::size_t n) const { return s.at(n) * t.at(n); }
};

enum class ParamPolicy {
  // t_n = lcm(1, ..., 2n+1) * lcm of the numerators of F_1..F_n. Every
  // M <= 2n+1 divides l_{n+1}, which brings integral levels and the
  // divisibility k_n, l_n by small integers forward to low depth.
  NumeratorLcm,
  // t_n = max(n,1). Smaller integers; no early integrality or divisibility.
  Minimal,
};

std::string to_string(ParamPolicy policy);
ParamPolicy parse_policy(std::string_view text);

// Sum over i = 1..n and h in F_i of h, with supports[i-1] = F_i.
Rational support_mass(const std::vector<Support>& supports, std::size_t n);

// Recursive choice of s_n, t_n, k_n, l_n: k_0 = l_0 = 1, k_{n+1} = s_n k_n,
// l_{n+1} = t_n l_n, max(n,1) | t_n | s_n, s_n >= 2 and
//   k_n (s_n^2 - 1) >= l_n s_n t_n * support_mass(n),
// with s_n the least admissible multiple of t_n. supports[i-1] = F_i and
// must cover F_1..F_depth.
ParamSeq make_params(const std::vector<Support>& supports, std::size_t depth,
                     ParamPolicy policy = ParamPolicy::NumeratorLcm);

// k_n (s_n^2 - 1) - l_n s_n t_n * support_mass(n).
Rational positivity_slack(const ParamSeq& params, const std::vector<Support>& supports, std::size_t n);

// Rewrites a stage-n element at stage n+1 via y -> y0 + s_n^2 y1.
// Throws PreconditionError when s_n is not materialized.
GroupRingElt rebase(const GroupRingElt& e, const ParamSeq& params);
GroupRingElt rebase_to(const GroupRingElt& e, std::size_t stage, const ParamSeq& params);

// Coordinates of e in the stage-independent basis of A (the empty sequence
// and the sequences ending in 1), obtained by unwinding
// y0 = y - s_{|y|}^2 y1. Equal for e and rebase(e).
std::map<TermKey, Integer> canonical_form(const GroupRingElt& e, const ParamSeq& params);

// The elements b_1..b_N of the truncated enumeration of B \ {0} together
// with their supports F_i = [b_i]. Index 0 holds b_1.
struct EnumB {
  std::vector<GroupRingElt> b;
  std::vector<Support> supports;

  std::size_t size() const { return b.size(); }
  const GroupRingElt& element(std::size_t i) const { return b.at(i - 1); }
  const Support& support(std::size_t i) const { return supports.at(i - 1); }
};

// Seeded truncated enumeration: b_1 = x_1 (), and for n >= 2 an element of
// stage at most n with one or two terms, h drawn from {1} and the
// generators of H and their inverses, and coefficients in [-n, n] \ {0}.
EnumB default_enumeration(const SubgroupH& h, std::size_t count, std::uint64_t seed);

EnumB enumeration_from_elements(std::vector<GroupRingElt> elements);

// Integer differences d[i][n] for 1 <= i <= n < depth.
struct WDiffs {
  std::uint64_t seed = 0;
  std::map<std::pair<std::size_t, std::size_t>, Integer> d;

  const Integer& at(std::size_t i, std::size_t n) const;
};

// Uniform draws from [0, s_n t_n).
WDiffs sample_wdiffs(const ParamSeq& params, std::size_t depth, std::uint64_t seed);

struct ResidueKey {
  std::size_t i;
  std::size_t n;
  PosRat h;
  // Length n+1, ends in 0.
  BinarySeq y0;
  friend bool operator==(const ResidueKey&, const ResidueKey&) = default;
  friend std::strong_ordering operator<=>(const ResidueKey&, const ResidueKey&) = default;
};

// Sparse: absent keys are zero residues.
using ResidueTable = std::map<ResidueKey, Integer>;

struct StepResult {
  GroupRingElt next;                              // b_i^(n+1)
  std::map<TermKey, Integer> residues;            // keyed by (h, y0), nonzero only
};

// One Euclidean step of the recursion at (i, n). b_i may be given at any
// stage <= n; b_i_n is b_i^(n) at stage n.
// Throws ConsistencyError if a sequence ending in 1 leaves a remainder.
StepResult step_b(const GroupRingElt& b_i, const GroupRingElt& b_i_n, const Integer& d, std::size_t n,
                  const ParamSeq& params);

// Everything of the skeleton that a depth-N truncation consumes.
struct CornerData {
  EnumB enumeration;
  ParamSeq params;
  WDiffs wdiffs;
  // b_i^(n) for 1 <= i <= n <= depth.
  std::map<std::pair<std::size_t, std::size_t>, GroupRingElt> relations;
  ResidueTable residues;
  std::size_t depth = 0;

  const GroupRingElt& relation(std::size_t i, std::size_t n) const;
  // Residues with first two key components (i, n).
  std::vector<std::pair<ResidueKey, Integer>> residues_at(std::size_t i, std::size_t n) const;
};

// Runs the recursion from b_i^(i) = 0 for every i < depth.
CornerData run_recursion(EnumB enumeration, ParamSeq params, WDiffs wdiffs, std::size_t depth);

CornerData build_corner(const SubgroupH& h, std::size_t depth, std::uint64_t seed,
                        ParamPolicy policy = ParamPolicy::NumeratorLcm);

struct Violation {
  std::string check;
  std::string witness;
};

// Re-checks the recursion identity, residue ranges, residue keys (sequences
// ending in 0, h in F_i), b_i^(i) = 0 and support containment
// [b_i^(n)] within F_i. An empty result means every identity held.
std::vector<Violation> check_reconstruction(const CornerData& data);

// k_0 = l_0 = 1, the recurrences, max(n,1) | t_n | s_n, s_n >= 2 and the
// positivity inequality at every materialized n.
std::vector<Violation> check_params(const ParamSeq& params, const std::vector<Support>& supports);

}  // namespace dimgrp::corner
