#pragma once

// JSON and DOT forms of subgroups, truncation bundles and presentations.
//
// Integers are written as JSON numbers when they fit in 64 bits and as
// decimal strings otherwise; readers accept both. Rationals are always
// strings "p" or "p/q". Objects are emitted with sorted keys, so equal
// values serialize to identical bytes.

#include "dimgrp/bratteli.hpp"
#include "dimgrp/dimbuild.hpp"
#include "dimgrp/ratlattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dimgrp::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const Integer& z);
json to_json(const Rational& q);
json to_json(const IntMatrix& m);
json to_json(const RatMatrix& m);

// Throws ParseError naming the JSON path on a type mismatch.
Integer integer_from_json(const json& j, const std::string& path);
Rational rational_from_json(const json& j, const std::string& path);

// Throws ParseError with the line and column of a syntax error.
json parse_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

// Two-space indented, trailing newline.
std::string dump(const json& j);

// {"generators": [...], "primes": [...], "hnf": [[...]]}
json subgroup_to_json(const ratlattice::SubgroupH& h);

struct StoredSubgroup {
  std::vector<ratlattice::PosRat> generators;
  std::vector<Integer> primes;
  IntMatrix hnf;
};

StoredSubgroup subgroup_from_json(const json& j, const std::string& path = "subgroup");

struct BundleConfig {
  std::vector<std::string> generators;
  std::size_t depth = 4;
  std::uint64_t seed = 0;
  corner::ParamPolicy policy = corner::ParamPolicy::NumeratorLcm;
};

// A truncation as stored on disk. Stored values are kept verbatim so that
// verification sees exactly what the file says.
struct Bundle {
  BundleConfig config;
  StoredSubgroup stored_subgroup;
  std::vector<bool> stored_integral;  // per level
  dimbuild::DiagramTruncation truncation;
};

// Parses the generators, builds the truncation and records it as a bundle.
Bundle build_bundle(const BundleConfig& config);

json bundle_to_json(const Bundle& b);
// Throws ParseError on schema violations.
Bundle bundle_from_json(const json& j);
Bundle read_bundle(const std::filesystem::path& path);

// {"schema_version", "levels": [[sizes]], "maps": [[[...]]]}, plus
// "chain_levels" when the presentation comes from a truncation.
json presentation_to_json(const bratteli::UltramatricialPresentation& p,
                          const std::vector<std::size_t>& chain_levels = {});
bratteli::UltramatricialPresentation presentation_from_json(const json& j);

// One node per level labeled "n=<n> rank=<rank>", edges along the chain.
std::string truncation_dot(const dimbuild::DiagramTruncation& t);
// One node per block labeled with its size, multiplicities as edge labels.
std::string presentation_dot(const bratteli::UltramatricialPresentation& p);

}  // namespace dimgrp::io
