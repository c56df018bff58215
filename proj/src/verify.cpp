#include "dimgrp/verify.hpp"

#include "dimgrp/error.hpp"
#include "dimgrp/random.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

namespace dimgrp::verify {

using dimbuild::LevelGroup;
using ratlattice::PosRat;

namespace {

constexpr std::size_t kMaxWitnesses = 20;
constexpr Eigen::Index kOracleRank = 7;

class Collector {
 public:
  explicit Collector(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& check, const std::string& witness) {
    ++result_.items;
    if (!ok) fail(check, witness);
  }
  void fail(const std::string& check, const std::string& witness) {
    ++failures_;
    if (result_.failures.size() < kMaxWitnesses) result_.failures.push_back({check, witness});
  }
  void absorb(std::vector<Violation> found) {
    ++result_.items;
    for (Violation& v : found) fail(v.check, v.witness);
  }
  // Records an exception from a construction step as a failure.
  template <typename F>
  void guarded(const std::string& check, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      ++result_.items;
      fail(check, e.what());
    }
  }
  CheckResult finish() {
    if (failures_ > result_.failures.size())
      result_.failures.push_back({"truncated", std::to_string(failures_ - kMaxWitnesses) + " further failures"});
    return std::move(result_);
  }

 private:
  CheckResult result_;
  std::size_t failures_ = 0;
};

std::string level_at(std::size_t n) { return "n=" + std::to_string(n); }

}  // namespace

bool VerifyReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed()) return false;
  return true;
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const CheckResult& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

CheckResult check_subgroup(const io::Bundle& b) {
  Collector c("subgroup");
  const ratlattice::SubgroupH& h = b.truncation.subgroup;
  c.expect(h.primes() == b.stored_subgroup.primes, "subgroup.primes", "stored primes differ from the generators");
  c.expect(h.hnf() == b.stored_subgroup.hnf, "subgroup.hnf", "stored HNF differs from the generators");
  c.expect(ratlattice::hermite_normal_form(b.stored_subgroup.hnf) == b.stored_subgroup.hnf, "subgroup.hnf_canonical",
           "stored basis is not in Hermite normal form");
  c.guarded("subgroup.config", [&] {
    std::vector<PosRat> gens;
    for (const std::string& g : b.config.generators) gens.push_back(PosRat::parse(g));
    c.expect(gens == b.stored_subgroup.generators, "subgroup.config", "configured generators differ from stored ones");
  });
  for (const PosRat& g : b.stored_subgroup.generators)
    c.expect(ratlattice::contains(h, g), "subgroup.generator_member", g.str());
  return c.finish();
}

CheckResult check_parameters(const io::Bundle& b) {
  Collector c("params");
  const corner::CornerData& corner = b.truncation.corner;
  c.absorb(corner::check_params(corner.params, corner.enumeration.supports));
  c.guarded("params.recomputed", [&] {
    const corner::ParamSeq fresh = corner::make_params(corner.enumeration.supports, corner.depth, b.config.policy);
    c.expect(fresh.s == corner.params.s && fresh.t == corner.params.t && fresh.k == corner.params.k &&
                 fresh.l == corner.params.l,
             "params.recomputed", "stored parameters differ from the " + corner::to_string(b.config.policy) + " policy");
  });
  // Finite-depth proxy for "every positive integer divides k_n and l_n":
  // M <= 8, as far as the policy reaches at this depth.
  if (b.config.policy == corner::ParamPolicy::NumeratorLcm) {
    const unsigned long reach = std::min<unsigned long>(8, 2 * corner.depth + 1);
    for (unsigned long m = 1; m <= reach; ++m) {
      bool hit = false;
      for (std::size_t n = 0; n < corner.params.k.size() && !hit; ++n)
        hit = mpz_divisible_ui_p(corner.params.k[n].get_mpz_t(), m) &&
              mpz_divisible_ui_p(corner.params.l[n].get_mpz_t(), m);
      c.expect(hit, "params.divisibility", "no n with " + std::to_string(m) + " | k_n, l_n");
    }
  }
  return c.finish();
}

CheckResult check_enumeration(const io::Bundle& b) {
  Collector c("enumeration");
  const corner::CornerData& corner = b.truncation.corner;
  for (std::size_t i = 1; i <= corner.enumeration.size(); ++i) {
    const corner::GroupRingElt& e = corner.enumeration.element(i);
    c.expect(!e.is_zero(), "enumeration.nonzero", "b_" + std::to_string(i));
    c.expect(e.stage() <= i, "enumeration.stage", "b_" + std::to_string(i) + " has stage " + std::to_string(e.stage()));
    c.expect(e.support() == corner.enumeration.support(i), "enumeration.support", "F_" + std::to_string(i));
    for (const PosRat& h : e.support())
      c.expect(ratlattice::contains(b.truncation.subgroup, h), "enumeration.in_H", "b_" + std::to_string(i) + " h=" + h.str());
  }
  std::size_t expected = 0;
  for (std::size_t i = 1; i < corner.depth; ++i)
    for (std::size_t n = i; n < corner.depth; ++n) {
      ++expected;
      c.expect(corner.wdiffs.d.contains({i, n}), "wdiffs.present", "d[" + std::to_string(i) + "][" + std::to_string(n) + "]");
    }
  c.expect(corner.wdiffs.d.size() == expected, "wdiffs.extra", std::to_string(corner.wdiffs.d.size()) + " stored");
  return c.finish();
}

CheckResult check_reconstruction(const io::Bundle& b) {
  Collector c("reconstruction");
  c.guarded("reconstruction", [&] { c.absorb(corner::check_reconstruction(b.truncation.corner)); });
  return c.finish();
}

CheckResult check_levels(const io::Bundle& b) {
  Collector c("levels");
  const dimbuild::DiagramTruncation& t = b.truncation;
  c.expect(!t.levels.empty() && t.levels[0].index.F == corner::Support{PosRat()}, "levels.start", "L_0 must be (0, {1})");
  for (std::size_t n = 0; n < t.levels.size(); ++n) {
    const LevelGroup& level = t.levels[n];
    if (n > 0) {
      const corner::Support want = dimbuild::extension_step(t.levels[n - 1].index.F, n - 1, t.corner.enumeration);
      c.expect(level.index.F == want, "levels.closure", level_at(n) + " F differs from the closure of F_" + std::to_string(n - 1));
    }
    c.expect(level.basis == dimbuild::OrderBasis(level.index), "levels.basis", level_at(n) + " basis not canonical");
    c.expect(static_cast<std::size_t>(level.rank()) == dimbuild::level_rank(level.index), "levels.rank", level_at(n));
    c.guarded("levels.unit", [&] {
      const LevelGroup fresh = dimbuild::build_level(level.index, t.corner.params, t.subgroup);
      c.expect(fresh.u == level.u, "levels.unit", level_at(n) + " stored u differs from k_n, k_n^2/h, k_n l_n/h");
    });
    const bool integral = dimbuild::is_integral_level(level);
    c.expect(n < b.stored_integral.size() && b.stored_integral[n] == integral, "levels.integral_flag", level_at(n));
    if (integral) c.expect(is_integral(level.u), "levels.integral_unit", level_at(n));
    for (Eigen::Index j = 0; j < level.u.size(); ++j)
      if (sgn(level.u(j)) <= 0) c.fail("levels.order_unit", level_at(n) + " " + level.basis.label(j).str());
  }
  return c.finish();
}

CheckResult check_embeddings(const io::Bundle& b) {
  Collector c("embeddings");
  const dimbuild::DiagramTruncation& t = b.truncation;
  for (std::size_t n = 0; n < t.embeddings.size(); ++n) {
    const dimbuild::EmbeddingMatrix& e = t.embeddings[n];
    c.guarded("embedding.verify", [&] { c.absorb(dimbuild::verify_embedding(e, t.levels[n], t.levels[n + 1], t.corner)); });
    c.guarded("embedding.recomputed", [&] {
      const dimbuild::EmbeddingMatrix fresh = dimbuild::embedding_matrix(t.levels[n], t.levels[n + 1], t.corner);
      c.expect(fresh.m == e.m, "embedding.recomputed", level_at(n) + " stored matrix differs from the construction");
    });
    if (auto why = ordgrp::criterion_violation(e.m)) c.fail("embedding.criterion", level_at(n) + " " + *why);
  }
  return c.finish();
}

CheckResult check_positivity_slack(const io::Bundle& b) {
  Collector c("positivity_slack");
  const corner::CornerData& corner = b.truncation.corner;
  for (std::size_t n = 0; n < corner.depth; ++n)
    c.guarded("params.positivity_slack", [&] {
      const Rational slack = corner::positivity_slack(corner.params, corner.enumeration.supports, n);
      c.expect(sgn(slack) >= 0, "params.positivity_slack", level_at(n) + " slack=" + to_string(slack));
    });
  return c.finish();
}

namespace {

IntVector random_vector(Rng& rng, Eigen::Index size, std::int64_t bound) {
  IntVector d(size);
  for (Eigen::Index i = 0; i < size; ++i) d(i) = rng.between(-bound, bound);
  return d;
}

// Random q = a/b close to the given value, b in [1, 8].
Rational random_near(Rng& rng, const Rational& centre) {
  const std::int64_t den = rng.between(1, 8);
  Integer base;
  const Integer scaled_num = centre.get_num() * den;
  mpz_fdiv_q(base.get_mpz_t(), scaled_num.get_mpz_t(), centre.get_den().get_mpz_t());
  Rational q(Integer(base + rng.between(-2 * den, 2 * den)), Integer(den));
  q.canonicalize();
  return q;
}

bool all_at_most(const Rational& q, const RatVector& u, const RatVector& d) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (q * u(i) > d(i)) return false;
  return true;
}

bool all_at_least(const Rational& q, const RatVector& u, const RatVector& d) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (q * u(i) < d(i)) return false;
  return true;
}

}  // namespace

CheckResult check_rl(const io::Bundle& b, std::size_t samples, std::size_t stability_samples) {
  Collector c("rl");
  const dimbuild::DiagramTruncation& t = b.truncation;
  for (std::size_t n = 0; n < t.levels.size(); ++n) {
    const LevelGroup& level = t.levels[n];
    if (!dimbuild::is_integral_level(level)) continue;
    const ordgrp::SimplicialLevel<Rational> simplex(level.u);
    const RatVector& u = level.u;
    Integer bound_z = 0;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      if (u(j).get_num() > bound_z) bound_z = u(j).get_num();
    const std::int64_t bound = bound_z.fits_slong_p() ? std::max<long>(4, bound_z.get_si()) : 1'000'000;
    Integer g = 0;
    for (Eigen::Index j = 0; j < u.size(); ++j) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), u(j).get_num().get_mpz_t());
    Rng rng(mix_seed(b.config.seed, 100 + n));
    const std::string where = level_at(n);

    IntVector zero = IntVector::Zero(level.rank());
    const ordgrp::RatBoundPair at_zero = dimbuild::rl_at_level(zero, level);
    c.expect(at_zero.r == 0 && at_zero.l == 0, "rl.zero", where);
    const ordgrp::RatBoundPair at_unit = dimbuild::rl_at_level(to_integer(u), level);
    c.expect(at_unit.r == 1 && at_unit.l == 1, "rl.unit", where);

    for (std::size_t k = 0; k < samples; ++k) {
      const IntVector d = random_vector(rng, level.rank(), bound);
      const RatVector dq = to_rational(d);
      const ordgrp::RatBoundPair rl = dimbuild::rl_at_level(d, level);
      const std::string w = where + " sample " + std::to_string(k);

      // q u >= d <=> q >= r(d) and q u <= d <=> q <= l(d), probed at the
      // bounds, just beside them and at random nearby rationals.
      for (const Rational& q : {rl.r, Rational(rl.r - Rational(1, 97)), random_near(rng, rl.r)})
        c.expect(all_at_least(q, u, dq) == (q >= rl.r), "rl.defining_r", w + " q=" + to_string(q));
      for (const Rational& q : {rl.l, Rational(rl.l + Rational(1, 97)), random_near(rng, rl.l)})
        c.expect(all_at_most(q, u, dq) == (q <= rl.l), "rl.defining_l", w + " q=" + to_string(q));

      const bool is_zero = (d.array() == Integer(0)).all();
      c.expect((rl.r == 0 && rl.l == 0) == is_zero, "rl.zero_iff", w);
      const ordgrp::RatBoundPair neg = dimbuild::rl_at_level(IntVector(-d), level);
      c.expect(neg.r == -rl.l && neg.l == -rl.r, "rl.negation", w);
      // s u integral exactly when den(s) divides gcd(u).
      Rational s(Integer(rng.between(-6, 6)), g);
      s.canonicalize();
      const RatVector shifted = dq + u * s;
      const ordgrp::RatBoundPair moved = dimbuild::rl_at_level(to_integer(shifted), level);
      c.expect(moved.r == rl.r + s && moved.l == rl.l + s, "rl.translation", w + " s=" + to_string(s));
      c.expect(rl.l <= rl.r, "rl.order", w);
    }

    const auto witness = ordgrp::nonadditivity_witness(simplex);
    if (level.rank() >= 3) {
      c.expect(witness.has_value(), "rl.nonadditivity", where + " no witness at rank " + std::to_string(level.rank()));
      if (witness) {
        auto sum = [&](const IntVector& x) {
          const ordgrp::RatBoundPair p = dimbuild::rl_at_level(x, level);
          return Rational(p.r + p.l);
        };
        const auto& [x, y] = *witness;
        c.expect(sum(IntVector(x + y)) != sum(x) + sum(y), "rl.nonadditivity_valid", where);
      }
    } else {
      c.expect(!witness.has_value(), "rl.additive_low_rank", where);
    }

    if (n + 2 < t.levels.size()) {
      const LevelGroup& top = t.levels[n + 2];
      const RatMatrix push = sparse_product(t.embeddings[n + 1].m, t.embeddings[n].m);
      const ordgrp::SimplicialLevel<Rational> top_simplex(top.u);
      for (std::size_t k = 0; k < stability_samples; ++k) {
        const IntVector d = random_vector(rng, level.rank(), bound);
        const ordgrp::RatBoundPair before = dimbuild::rl_at_level(d, level);
        const RatVector image = sparse_product(push, to_rational(d));
        const ordgrp::RatBoundPair after = ordgrp::rl_values(image, top_simplex);
        c.expect(before == after, "rl.stability", where + " -> n=" + std::to_string(n + 2) + " sample " + std::to_string(k));
      }
    }
  }
  return c.finish();
}

CheckResult check_h_action(const io::Bundle& b) {
  Collector c("h_action");
  const dimbuild::DiagramTruncation& t = b.truncation;
  for (std::size_t n = 0; n < t.levels.size(); ++n) {
    const LevelGroup& level = t.levels[n];
    for (const PosRat& h : level.index.F) {
      c.guarded("action.verify", [&] {
        const dimbuild::HAction a = dimbuild::h_action(h, level, t.subgroup);
        const LevelGroup image = dimbuild::build_level(a.dst, t.corner.params, t.subgroup);
        c.absorb(dimbuild::verify_h_action(a, level, image, t.subgroup));
      });
      for (const PosRat& g : level.index.F)
        c.guarded("action.composition",
                  [&] { c.absorb(dimbuild::check_action_composition(g, h, level, t.corner.params, t.subgroup)); });
      if (n + 1 < t.levels.size())
        c.guarded("action.commutes_with_embedding", [&] { c.absorb(dimbuild::check_action_commutes(h, t, n)); });
    }
  }
  return c.finish();
}

CheckResult check_orbits(const io::Bundle& b) {
  Collector c("orbits");
  const dimbuild::DiagramTruncation& t = b.truncation;
  std::vector<std::pair<Integer, Integer>> pairs{{1, 1}};
  for (const PosRat& g : t.subgroup.generators()) pairs.emplace_back(g.denominator(), g.numerator());
  for (const auto& [n, m] : pairs)
    c.guarded("orbit", [&] {
      const dimbuild::OrbitResult r = dimbuild::orbit_certificate(n, m, t);
      const std::string w = "(" + to_string(n) + ", " + to_string(m) + ")";
      c.expect(r.certificate.has_value(), "orbit.exists", w + " " + r.refusal);
      if (r.certificate) c.absorb(r.certificate->violations);
    });
  return c.finish();
}

CheckResult check_oracle(const io::Bundle& b, int box) {
  Collector c("oracle");
  const dimbuild::DiagramTruncation& t = b.truncation;
  for (std::size_t n = 0; n < t.embeddings.size(); ++n) {
    if (t.levels[n].rank() > kOracleRank) continue;
    c.guarded("oracle.budget", [&] {
      const ordgrp::OracleResult r = ordgrp::brute_force_order_embedding(t.embeddings[n].m, box);
      std::string w = level_at(n) + " box=" + std::to_string(box);
      if (r.witness) {
        w += " x=(";
        for (Eigen::Index i = 0; i < r.witness->size(); ++i) w += (i ? "," : "") + to_string((*r.witness)(i));
        w += ")";
      }
      c.expect(r.order_embedding, "oracle.order_embedding", w);
    });
  }
  return c.finish();
}

CheckResult check_presentation(const io::Bundle& b) {
  Collector c("presentation");
  c.guarded("presentation.build", [&] {
    const bratteli::TruncationPresentation tp = bratteli::presentation_from_truncation(b.truncation);
    const auto why = bratteli::presentation_violation(tp.presentation);
    c.expect(!why, "presentation.unital", why.value_or(""));
    if (why) return;
    const bratteli::PointedTruncation k = bratteli::k0(tp.presentation);
    for (const std::string& flag : k.flags) c.fail("presentation.criterion", flag);
    for (std::size_t j = 0; j < tp.chain_levels.size(); ++j) {
      const LevelGroup& level = b.truncation.levels[tp.chain_levels[j]];
      c.expect(to_rational(k.levels[j].unit()) == level.u, "presentation.round_trip", level_at(tp.chain_levels[j]));
    }
    for (std::size_t j = 0; j + 1 < tp.chain_levels.size(); ++j)
      for (std::size_t a = j; a + 1 < tp.chain_levels.size(); ++a) {
        const IntMatrix composed = bratteli::compose(tp.presentation, j, a + 1);
        c.expect(IntVector(composed * tp.presentation.unit(j)) == tp.presentation.unit(a + 1), "presentation.composition_unital",
                 "levels " + std::to_string(j) + ".." + std::to_string(a + 1));
      }
  });
  return c.finish();
}

CheckResult check_rebuild(const io::Bundle& b) {
  Collector c("rebuild");
  c.guarded("rebuild", [&] {
    const io::json fresh = io::bundle_to_json(io::build_bundle(b.config));
    const io::json stored = io::bundle_to_json(b);
    std::string differing;
    for (auto it = stored.begin(); it != stored.end(); ++it)
      if (!fresh.contains(it.key()) || fresh[it.key()] != it.value()) differing += (differing.empty() ? "" : ", ") + it.key();
    c.expect(differing.empty(), "rebuild.identical", differing.empty() ? "" : "sections differ: " + differing);
    c.expect(io::dump(fresh) == io::dump(stored), "rebuild.bytes", "serializations differ");
  });
  return c.finish();
}

VerifyReport verify_bundle(const io::Bundle& b, const VerifyOptions& options) {
  VerifyReport report;
  auto run = [&](auto&& suite) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = suite();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(r));
  };
  run([&] { return check_subgroup(b); });
  run([&] { return check_parameters(b); });
  run([&] { return check_enumeration(b); });
  run([&] { return check_reconstruction(b); });
  run([&] { return check_levels(b); });
  run([&] { return check_embeddings(b); });
  run([&] { return check_positivity_slack(b); });
  run([&] { return check_rl(b, options.rl_samples, options.stability_samples); });
  run([&] { return check_h_action(b); });
  run([&] { return check_orbits(b); });
  if (options.oracle_box) run([&] { return check_oracle(b, *options.oracle_box); });
  run([&] { return check_presentation(b); });
  run([&] { return check_rebuild(b); });
  return report;
}

io::json report_to_json(const VerifyReport& report, bool timings) {
  io::json checks = io::json::array();
  for (const CheckResult& r : report.checks) {
    io::json failures = io::json::array();
    for (const Violation& v : r.failures) failures.push_back({{"check", v.check}, {"witness", v.witness}});
    io::json entry = {{"name", r.name}, {"passed", r.passed()}, {"items", r.items}, {"failures", failures}};
    if (timings) entry["seconds"] = r.seconds;
    checks.push_back(std::move(entry));
  }
  return {{"schema_version", io::kSchemaVersion}, {"passed", report.passed()}, {"checks", checks}};
}

std::string report_text(const VerifyReport& report, bool timings) {
  std::ostringstream out;
  for (const CheckResult& r : report.checks) {
    out << (r.passed() ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.items << " items";
    if (timings) out << ", " << std::fixed << std::setprecision(3) << r.seconds << "s";
    out << ")\n";
    for (const Violation& v : r.failures) out << "    " << v.check << ": " << v.witness << "\n";
  }
  out << (report.passed() ? "overall: PASS\n" : "overall: FAIL\n");
  return out.str();
}

}  // namespace dimgrp::verify
