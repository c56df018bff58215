#pragma once

// Ultramatricial presentations and their K_0.
//
// A presentation is a chain of multi-matrix algebras M_{a_1} x ... x M_{a_r}
// recorded by their size vectors, joined by unital multiplicity matrices
// (A sizes = sizes'). K_0 of the limit is the direct limit of the simplicial
// groups Z^r with order unit the size vector.

#include "dimgrp/dimbuild.hpp"
#include "dimgrp/ordgrp.hpp"
#include "dimgrp/scalar.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dimgrp::bratteli {

struct UltramatricialPresentation {
  std::vector<IntVector> levels;  // block sizes; the class of 1 at each level
  std::vector<IntMatrix> maps;    // maps[k]: level k -> level k+1

  std::size_t size() const { return levels.size(); }
  const IntVector& unit(std::size_t k) const { return levels.at(k); }
};

// Level sizes are positive, shapes chain, every map is nonnegative and
// unital. Returns the first problem found.
std::optional<std::string> presentation_violation(const UltramatricialPresentation& p);

// maps[to-1] ... maps[from]; identity when from == to.
IntMatrix compose(const UltramatricialPresentation& p, std::size_t from, std::size_t to);

struct PointedTruncation {
  std::vector<ordgrp::SimplicialLevel<Integer>> levels;
  std::vector<IntMatrix> maps;
  // One entry per map that fails the order-embedding criterion.
  std::vector<std::string> flags;
};

// Throws PreconditionError when the presentation is malformed or not unital.
PointedTruncation k0(const UltramatricialPresentation& p);

// M_n of the limit: every size multiplied by n; the maps are unchanged.
UltramatricialPresentation morita_scale(const UltramatricialPresentation& p, const Integer& n);

// Interleaving a_0 < a_1 < ... of PA and b_0 < b_1 < ... of PB with
// forward[k]: PA level a_k -> PB level b_k and
// backward[k]: PB level b_k -> PA level a_{k+1} (one fewer than forward).
struct IntertwiningCertificate {
  std::vector<std::size_t> a_levels;
  std::vector<std::size_t> b_levels;
  std::vector<IntMatrix> forward;
  std::vector<IntMatrix> backward;
};

// Throws PreconditionError on a shape mismatch. Otherwise true iff all
// maps are nonnegative, units go to units, and
// backward[k] forward[k] = PA(a_k -> a_{k+1}) and
// forward[k+1] backward[k] = PB(b_k -> b_{k+1}).
bool verify_intertwining(const UltramatricialPresentation& pa, const UltramatricialPresentation& pb,
                         const IntertwiningCertificate& cert);

struct TruncationPresentation {
  UltramatricialPresentation presentation;
  std::vector<std::size_t> chain_levels;  // truncation levels used, ascending
};

// Sizes are the unit coordinates at the integral levels of the chain and
// the maps the products of embeddings between consecutive ones. Throws
// PreconditionError when no level is integral.
TruncationPresentation presentation_from_truncation(const dimbuild::DiagramTruncation& t);

// Z[S^-1] with u = 1: rank-one levels, the p-th map multiplying by the
// primes of S in turn.
UltramatricialPresentation localization_model(const std::vector<Integer>& primes, std::size_t depth);

// For a rank-one presentation: q u with q = m/n lies in the limit together
// with q^-1 u, i.e. some level size is divisible by n/gcd and some by
// m/gcd. This is when n u and m u are carried to each other by an order
// automorphism of Z[S^-1].
bool rank_one_orbit(const UltramatricialPresentation& p, const Integer& n, const Integer& m);

}  // namespace dimgrp::bratteli
