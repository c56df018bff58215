#pragma once

// Invariant suites over a stored truncation bundle.

#include "dimgrp/io.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dimgrp::verify {

using corner::Violation;

struct CheckResult {
  std::string name;
  std::size_t items = 0;  // individual assertions evaluated
  std::vector<Violation> failures;
  double seconds = 0;

  bool passed() const { return failures.empty(); }
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(const std::string& name) const;
};

struct VerifyOptions {
  // Runs the exhaustive oracle on embeddings with source rank <= 7.
  std::optional<int> oracle_box;
  std::size_t rl_samples = 1000;        // per integral level
  std::size_t stability_samples = 200;  // per pair of integral levels two steps apart
};

CheckResult check_subgroup(const io::Bundle& b);
// Stored parameters satisfy their invariants and equal a fresh computation
// from the enumeration supports.
CheckResult check_parameters(const io::Bundle& b);
CheckResult check_enumeration(const io::Bundle& b);
CheckResult check_reconstruction(const io::Bundle& b);
CheckResult check_levels(const io::Bundle& b);
// verify_embedding on every stored matrix, and equality with the matrix
// recomputed from the stored parameters and residues.
CheckResult check_embeddings(const io::Bundle& b);
CheckResult check_positivity_slack(const io::Bundle& b);
CheckResult check_rl(const io::Bundle& b, std::size_t samples, std::size_t stability_samples);
CheckResult check_h_action(const io::Bundle& b);
// Certificates for n = den(g), m = num(g) for every generator g.
CheckResult check_orbits(const io::Bundle& b);
CheckResult check_oracle(const io::Bundle& b, int box);
CheckResult check_presentation(const io::Bundle& b);
// Rebuilding from the stored configuration reproduces the bundle bytes.
CheckResult check_rebuild(const io::Bundle& b);

VerifyReport verify_bundle(const io::Bundle& b, const VerifyOptions& options = {});

// Timings are included only on request so that reports stay reproducible.
io::json report_to_json(const VerifyReport& report, bool timings = false);
std::string report_text(const VerifyReport& report, bool timings = true);

}  // namespace dimgrp::verify
