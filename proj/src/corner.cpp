#include "dimgrp/corner.hpp"

#include "dimgrp/error.hpp"
#include "dimgrp/random.hpp"

#include <algorithm>

namespace dimgrp::corner {

BinarySeq::BinarySeq(std::string_view bits) : bits_(bits) {
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] != '0' && bits_[i] != '1')
      throw ParseError("binary sequence \"" + bits_ + "\" contains '" + bits_[i] + "'", 1, i + 1);
}

BinarySeq BinarySeq::appended(char bit) const {
  BinarySeq out = *this;
  out.bits_.push_back(bit);
  return out;
}

BinarySeq BinarySeq::prefix() const {
  if (bits_.empty()) throw PreconditionError("prefix of the empty sequence");
  BinarySeq out = *this;
  out.bits_.pop_back();
  return out;
}

std::vector<BinarySeq> all_sequences(std::size_t n) {
  std::vector<BinarySeq> out{BinarySeq()};
  for (std::size_t len = 0; len < n; ++len) {
    std::vector<BinarySeq> next;
    next.reserve(out.size() * 2);
    for (const BinarySeq& y : out) {
      next.push_back(y.appended('0'));
      next.push_back(y.appended('1'));
    }
    out = std::move(next);
  }
  return out;
}

// --- GroupRingElt ----------------------------------------------------------

Integer GroupRingElt::coefficient(const PosRat& h, const BinarySeq& y) const {
  auto it = terms_.find(TermKey{h, y});
  return it == terms_.end() ? Integer(0) : it->second;
}

void GroupRingElt::add(const PosRat& h, const BinarySeq& y, const Integer& c) {
  if (y.size() != stage_)
    throw PreconditionError("sequence \"" + y.str() + "\" does not have stage length " + std::to_string(stage_));
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(TermKey{h, y}, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Support GroupRingElt::support() const {
  Support out;
  for (const auto& [key, c] : terms_) out.insert(key.h);
  return out;
}

GroupRingElt& GroupRingElt::operator+=(const GroupRingElt& other) {
  if (other.stage_ != stage_) throw PreconditionError("adding group ring elements of different stages");
  for (const auto& [key, c] : other.terms_) add(key.h, key.y, c);
  return *this;
}

GroupRingElt& GroupRingElt::operator-=(const GroupRingElt& other) {
  if (other.stage_ != stage_) throw PreconditionError("subtracting group ring elements of different stages");
  for (const auto& [key, c] : other.terms_) add(key.h, key.y, -c);
  return *this;
}

GroupRingElt& GroupRingElt::operator*=(const Integer& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, v] : terms_) v *= c;
  return *this;
}

// --- parameters ------------------------------------------------------------

std::string to_string(ParamPolicy policy) {
  switch (policy) {
    case ParamPolicy::NumeratorLcm: return "lcm";
    case ParamPolicy::Minimal: return "minimal";
  }
  return "?";
}

ParamPolicy parse_policy(std::string_view text) {
  if (text == "lcm") return ParamPolicy::NumeratorLcm;
  if (text == "minimal") return ParamPolicy::Minimal;
  throw ParseError("unknown parameter policy \"" + std::string(text) + "\" (expected lcm or minimal)", 1, 1);
}

Rational support_mass(const std::vector<Support>& supports, std::size_t n) {
  if (n > supports.size())
    throw PreconditionError("support_mass needs F_1..F_" + std::to_string(n) + ", have " +
                            std::to_string(supports.size()));
  Rational sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (const PosRat& h : supports[i]) sum += h.value();
  return sum;
}

Rational positivity_slack(const ParamSeq& p, const std::vector<Support>& supports, std::size_t n) {
  const Integer& s = p.s.at(n);
  return Rational(p.k.at(n) * (s * s - 1)) - Rational(p.l.at(n) * s * p.t.at(n)) * support_mass(supports, n);
}

ParamSeq make_params(const std::vector<Support>& supports, std::size_t depth, ParamPolicy policy) {
  if (supports.size() < depth)
    throw PreconditionError("make_params needs supports F_1..F_" + std::to_string(depth));
  ParamSeq p;
  p.k.push_back(1);
  p.l.push_back(1);
  Integer numerator_lcm = 1;
  for (std::size_t n = 0; n <= depth; ++n) {
    if (n >= 1)
      for (const PosRat& h : supports[n - 1]) {
        const Integer num = h.numerator();
        mpz_lcm(numerator_lcm.get_mpz_t(), numerator_lcm.get_mpz_t(), num.get_mpz_t());
      }
    Integer t = std::max<std::size_t>(n, 1);
    if (policy == ParamPolicy::NumeratorLcm) {
      for (unsigned long j = 2; j <= 2 * n + 1; ++j) mpz_lcm_ui(t.get_mpz_t(), t.get_mpz_t(), j);
      t *= numerator_lcm;
    }

    const Rational mass = support_mass(supports, n);
    const Integer& k = p.k.back();
    const Integer& l = p.l.back();
    Integer s = t;
    while (s < 2 || Rational(k * (s * s - 1)) < Rational(l * s * t) * mass) s += t;

    p.s.push_back(s);
    p.t.push_back(t);
    p.k.push_back(s * k);
    p.l.push_back(t * l);
  }
  return p;
}

std::vector<Violation> check_params(const ParamSeq& p, const std::vector<Support>& supports) {
  std::vector<Violation> out;
  auto fail = [&](const std::string& check, const std::string& witness) { out.push_back({check, witness}); };
  const std::size_t depth = p.depth();
  if (p.s.empty() || p.t.size() != p.s.size() || p.k.size() != p.s.size() + 1 || p.l.size() != p.s.size() + 1) {
    fail("params.shape", "inconsistent sequence lengths");
    return out;
  }
  if (p.k[0] != 1) fail("params.k0", "k_0 = " + to_string(p.k[0]));
  if (p.l[0] != 1) fail("params.l0", "l_0 = " + to_string(p.l[0]));
  for (std::size_t n = 0; n <= depth; ++n) {
    const std::string at = "n=" + std::to_string(n);
    if (p.k[n + 1] != p.s[n] * p.k[n]) fail("params.k_recurrence", at);
    if (p.l[n + 1] != p.t[n] * p.l[n]) fail("params.l_recurrence", at);
    if (sgn(p.t[n]) <= 0 || !mpz_divisible_ui_p(p.t[n].get_mpz_t(), std::max<std::size_t>(n, 1)))
      fail("params.t_divisible_by_n", at + " t=" + to_string(p.t[n]));
    if (sgn(p.s[n]) <= 0 || !mpz_divisible_p(p.s[n].get_mpz_t(), p.t[n].get_mpz_t()))
      fail("params.t_divides_s", at + " s=" + to_string(p.s[n]) + " t=" + to_string(p.t[n]));
    if (p.s[n] < 2) fail("params.s_at_least_2", at);
    if (n <= supports.size()) {
      Rational slack = positivity_slack(p, supports, n);
      if (sgn(slack) < 0) fail("params.positivity_slack", at + " slack=" + to_string(slack));
    }
  }
  return out;
}

// --- rebasing --------------------------------------------------------------

GroupRingElt rebase(const GroupRingElt& e, const ParamSeq& params) {
  const std::size_t n = e.stage();
  if (n >= params.s.size())
    throw PreconditionError("rebase past the materialized depth (stage " + std::to_string(n) + ")");
  const Integer s2 = params.s[n] * params.s[n];
  GroupRingElt out(n + 1);
  for (const auto& [key, c] : e.terms()) {
    out.add(key.h, key.y.appended('0'), c);
    out.add(key.h, key.y.appended('1'), c * s2);
  }
  return out;
}

GroupRingElt rebase_to(const GroupRingElt& e, std::size_t stage, const ParamSeq& params) {
  if (stage < e.stage()) throw PreconditionError("rebase_to cannot lower the stage");
  GroupRingElt out = e;
  while (out.stage() < stage) out = rebase(out, params);
  return out;
}

std::map<TermKey, Integer> canonical_form(const GroupRingElt& e, const ParamSeq& params) {
  std::map<TermKey, Integer> out;
  auto put = [&](const PosRat& h, const BinarySeq& y, const Integer& c) {
    Integer& slot = out[TermKey{h, y}];
    slot += c;
    if (sgn(slot) == 0) out.erase(TermKey{h, y});
  };
  for (const auto& [key, c] : e.terms()) {
    // Unwind w0 = w - s_|w|^2 w1 until the sequence is a basis element.
    BinarySeq y = key.y;
    Integer coeff = c;
    while (y.ends_with('0')) {
      BinarySeq w = y.prefix();
      const Integer& s = params.s.at(w.size());
      put(key.h, w.appended('1'), Integer(-coeff * s * s));
      y = w;
    }
    put(key.h, y, coeff);
  }
  return out;
}

// --- enumeration -----------------------------------------------------------

EnumB enumeration_from_elements(std::vector<GroupRingElt> elements) {
  EnumB out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].is_zero()) throw PreconditionError("b_" + std::to_string(i + 1) + " is zero");
    if (elements[i].stage() > i + 1)
      throw PreconditionError("b_" + std::to_string(i + 1) + " has stage " + std::to_string(elements[i].stage()));
    out.supports.push_back(elements[i].support());
  }
  out.b = std::move(elements);
  return out;
}

EnumB default_enumeration(const SubgroupH& h, std::size_t count, std::uint64_t seed) {
  Support ball_set{PosRat()};
  for (const PosRat& g : h.generators()) {
    ball_set.insert(g);
    ball_set.insert(g.inverse());
  }
  const std::vector<PosRat> ball(ball_set.begin(), ball_set.end());

  Rng rng(mix_seed(seed, 1));
  std::vector<GroupRingElt> elements;
  for (std::size_t n = 1; n <= count; ++n) {
    if (n == 1) {
      GroupRingElt first(0);
      first.add(PosRat(), BinarySeq(), 1);
      elements.push_back(std::move(first));
      continue;
    }
    const std::size_t stage = rng.below(n + 1);
    const std::size_t terms = 1 + rng.below(2);
    GroupRingElt e(stage);
    for (std::size_t t = 0; t < terms; ++t) {
      const PosRat& g = ball[rng.below(ball.size())];
      std::string bits;
      for (std::size_t j = 0; j < stage; ++j) bits.push_back(rng.coin() ? '1' : '0');
      Integer c = rng.between(1, static_cast<std::int64_t>(n));
      if (rng.coin()) c = -c;
      BinarySeq y(bits);
      if (sgn(e.coefficient(g, y)) == 0) e.add(g, y, c);
    }
    elements.push_back(std::move(e));
  }
  return enumeration_from_elements(std::move(elements));
}

// --- differences and recursion ----------------------------------------------

const Integer& WDiffs::at(std::size_t i, std::size_t n) const {
  auto it = d.find({i, n});
  if (it == d.end())
    throw PreconditionError("no difference d[" + std::to_string(i) + "][" + std::to_string(n) + "]");
  return it->second;
}

WDiffs sample_wdiffs(const ParamSeq& params, std::size_t depth, std::uint64_t seed) {
  WDiffs out;
  out.seed = seed;
  Rng rng(mix_seed(seed, 2));
  for (std::size_t i = 1; i < depth; ++i)
    for (std::size_t n = i; n < depth; ++n) out.d[{i, n}] = rng.below(params.st(n));
  return out;
}

StepResult step_b(const GroupRingElt& b_i, const GroupRingElt& b_i_n, const Integer& d, std::size_t n,
                  const ParamSeq& params) {
  if (b_i_n.stage() != n) throw PreconditionError("b_i^(n) must be given at stage n");
  GroupRingElt lhs = rebase_to(b_i, n, params) * d;
  lhs += b_i_n;
  lhs = rebase(lhs, params);

  const Integer st = params.st(n);
  StepResult out{GroupRingElt(n + 1), {}};
  for (const auto& [key, c] : lhs.terms()) {
    Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), c.get_mpz_t(), st.get_mpz_t());
    out.next.add(key.h, key.y, q);
    if (sgn(r) == 0) continue;
    if (key.y.ends_with('1'))
      throw ConsistencyError("remainder " + to_string(r) + " on sequence " + key.y.str() + " ending in 1 at n=" +
                             std::to_string(n));
    out.residues.emplace(key, r);
  }
  return out;
}

const GroupRingElt& CornerData::relation(std::size_t i, std::size_t n) const {
  auto it = relations.find({i, n});
  if (it == relations.end())
    throw PreconditionError("no relation b_" + std::to_string(i) + "^(" + std::to_string(n) + ")");
  return it->second;
}

std::vector<std::pair<ResidueKey, Integer>> CornerData::residues_at(std::size_t i, std::size_t n) const {
  std::vector<std::pair<ResidueKey, Integer>> out;
  // PosRat has no least element, so the (i, n) block is found by a scan.
  auto it = std::find_if(residues.begin(), residues.end(), [&](const auto& kv) {
    return kv.first.i > i || (kv.first.i == i && kv.first.n >= n);
  });
  for (; it != residues.end() && it->first.i == i && it->first.n == n; ++it) out.push_back(*it);
  return out;
}

CornerData run_recursion(EnumB enumeration, ParamSeq params, WDiffs wdiffs, std::size_t depth) {
  if (enumeration.size() < depth)
    throw PreconditionError("enumeration has " + std::to_string(enumeration.size()) + " elements, depth " +
                            std::to_string(depth) + " needs " + std::to_string(depth));
  CornerData data;
  data.depth = depth;
  for (std::size_t i = 1; i <= depth; ++i) {
    GroupRingElt current(i);
    data.relations.emplace(std::make_pair(i, i), current);
    for (std::size_t n = i; n < depth; ++n) {
      StepResult step = step_b(enumeration.element(i), current, wdiffs.at(i, n), n, params);
      for (const auto& [key, r] : step.residues) data.residues.emplace(ResidueKey{i, n, key.h, key.y}, r);
      current = std::move(step.next);
      data.relations.emplace(std::make_pair(i, n + 1), current);
    }
  }
  data.enumeration = std::move(enumeration);
  data.params = std::move(params);
  data.wdiffs = std::move(wdiffs);
  return data;
}

CornerData build_corner(const SubgroupH& h, std::size_t depth, std::uint64_t seed, ParamPolicy policy) {
  if (depth < 1) throw PreconditionError("truncation depth must be at least 1");
  EnumB enumeration = default_enumeration(h, depth, seed);
  ParamSeq params = make_params(enumeration.supports, depth, policy);
  WDiffs wdiffs = sample_wdiffs(params, depth, seed);
  return run_recursion(std::move(enumeration), std::move(params), std::move(wdiffs), depth);
}

// --- verification ----------------------------------------------------------

std::vector<Violation> check_reconstruction(const CornerData& data) {
  std::vector<Violation> out;
  auto fail = [&](const std::string& check, const std::string& witness) { out.push_back({check, witness}); };
  const ParamSeq& params = data.params;
  // Set when the identity below could not even be evaluated.
  bool structural = false;

  for (const auto& [key, r] : data.residues) {
    const std::string where = "(i=" + std::to_string(key.i) + ", n=" + std::to_string(key.n) +
                              ", h=" + key.h.str() + ", y=" + key.y0.str() + ")";
    if (key.i < 1 || key.i > key.n || key.n + 1 > data.depth) {
      fail("residues.index_range", where);
      structural = true;
      continue;
    }
    if (key.y0.size() != key.n + 1 || !key.y0.ends_with('0')) fail("residues.sequence_ends_in_0", where);
    if (sgn(r) < 0 || r >= params.st(key.n)) fail("residues.range", where + " value=" + to_string(r));
    if (!data.enumeration.support(key.i).contains(key.h)) fail("residues.support", where);
  }

  for (std::size_t i = 1; i <= data.depth; ++i) {
    const Support& fi = data.enumeration.support(i);
    for (std::size_t n = i; n <= data.depth; ++n) {
      auto it = data.relations.find({i, n});
      if (it == data.relations.end()) {
        fail("relations.present", "(i=" + std::to_string(i) + ", n=" + std::to_string(n) + ")");
        structural = true;
        continue;
      }
      if (it->second.stage() != n) {
        fail("relations.stage", "(i=" + std::to_string(i) + ", n=" + std::to_string(n) + ")");
        structural = true;
      }
      if (n == i && !it->second.is_zero()) fail("relations.start_zero", "(i=" + std::to_string(i) + ")");
      for (const PosRat& h : it->second.support())
        if (!fi.contains(h))
          fail("relations.support", "(i=" + std::to_string(i) + ", n=" + std::to_string(n) + ", h=" + h.str() + ")");
    }
  }
  if (structural) return out;

  for (std::size_t i = 1; i < data.depth; ++i)
    for (std::size_t n = i; n < data.depth; ++n) {
      GroupRingElt lhs = rebase_to(data.enumeration.element(i), n, params) * data.wdiffs.at(i, n);
      lhs += data.relation(i, n);
      lhs = rebase(lhs, params);
      GroupRingElt rhs = data.relation(i, n + 1) * params.st(n);
      for (const auto& [key, r] : data.residues_at(i, n)) rhs.add(key.h, key.y0, r);
      const GroupRingElt diff = lhs - rhs;
      if (!diff.is_zero()) {
        const TermKey& first = diff.terms().begin()->first;
        fail("reconstruction", "(i=" + std::to_string(i) + ", n=" + std::to_string(n) + ", h=" + first.h.str() +
                                   ", y=" + first.y.str() + ") off by " + to_string(diff.terms().begin()->second));
      }
    }
  return out;
}

}  // namespace dimgrp::corner
