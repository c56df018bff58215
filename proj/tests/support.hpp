#pragma once

// Small builders shared by the unit tests.

#include "dimgrp/io.hpp"

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace dimgrp::testing {

inline IntVector ivec(std::initializer_list<long> xs) {
  IntVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (long x : xs) v(i++) = x;
  return v;
}

inline RatVector rvec(std::initializer_list<long> xs) { return to_rational(ivec(xs)); }

inline IntMatrix imat(std::initializer_list<std::initializer_list<long>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  IntMatrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (long x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline ratlattice::PosRat q(const char* text) { return ratlattice::PosRat::parse(text); }

inline ratlattice::SubgroupH subgroup(std::initializer_list<const char*> gens) {
  std::vector<ratlattice::PosRat> out;
  for (const char* g : gens) out.push_back(q(g));
  return ratlattice::subgroup_from_generators(std::move(out));
}

// Bundles are deterministic, so building each configuration once is enough.
inline const io::Bundle& cached_bundle(const std::vector<std::string>& gens, std::size_t depth, std::uint64_t seed,
                                       corner::ParamPolicy policy = corner::ParamPolicy::NumeratorLcm) {
  static std::map<std::string, io::Bundle> cache;
  std::string key = std::to_string(depth) + "|" + std::to_string(seed) + "|" + corner::to_string(policy);
  for (const std::string& g : gens) key += "|" + g;
  auto it = cache.find(key);
  if (it == cache.end()) {
    io::BundleConfig config;
    config.generators = gens;
    config.depth = depth;
    config.seed = seed;
    config.policy = policy;
    it = cache.emplace(key, io::build_bundle(config)).first;
  }
  return it->second;
}

}  // namespace dimgrp::testing
