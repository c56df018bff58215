#include "dimgrp/dimbuild.hpp"

#include "dimgrp/error.hpp"

#include <charconv>

namespace dimgrp::dimbuild {

using corner::TermKey;

// --- labels and bases ------------------------------------------------------

std::string BasisLabel::str() const {
  switch (kind) {
    case Kind::V: return "V";
    case Kind::XY: return "XY(" + h.str() + "," + y.str() + ")";
    case Kind::XC: return "XC(" + h.str() + "," + std::to_string(i) + ")";
  }
  return "?";
}

BasisLabel BasisLabel::parse(std::string_view text) {
  if (text == "V") return v();
  auto fail = [&](std::size_t column) -> BasisLabel {
    throw ParseError("malformed basis label \"" + std::string(text) + "\"", 1, column);
  };
  if (text.size() < 6 || text.back() != ')' || text[2] != '(') return fail(1);
  const std::string_view head = text.substr(0, 2);
  const std::string_view body = text.substr(3, text.size() - 4);
  const std::size_t comma = body.find(',');
  if (comma == std::string_view::npos) return fail(4);
  const PosRat h = PosRat::parse(body.substr(0, comma));
  const std::string_view rest = body.substr(comma + 1);
  if (head == "XY") return xy(h, BinarySeq(rest));
  if (head == "XC") {
    std::size_t i = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), i);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || i == 0) return fail(4 + comma + 1);
    return xc(h, i);
  }
  return fail(1);
}

OrderBasis::OrderBasis(const LevelIndex& idx) {
  labels_.push_back(BasisLabel::v());
  const std::vector<BinarySeq> seqs = corner::all_sequences(idx.n);
  for (const PosRat& h : idx.F)
    for (const BinarySeq& y : seqs) labels_.push_back(BasisLabel::xy(h, y));
  for (const PosRat& h : idx.F)
    for (std::size_t i = 1; i <= idx.n; ++i) labels_.push_back(BasisLabel::xc(h, i));
  for (std::size_t j = 0; j < labels_.size(); ++j) lookup_.emplace(labels_[j], static_cast<Eigen::Index>(j));
}

OrderBasis::OrderBasis(std::vector<BasisLabel> labels) : labels_(std::move(labels)) {
  for (std::size_t j = 0; j < labels_.size(); ++j)
    if (!lookup_.emplace(labels_[j], static_cast<Eigen::Index>(j)).second)
      throw PreconditionError("duplicate basis label " + labels_[j].str());
}

Eigen::Index OrderBasis::index_of(const BasisLabel& label) const {
  auto it = lookup_.find(label);
  if (it == lookup_.end()) throw PreconditionError("basis label " + label.str() + " is not in the level");
  return it->second;
}

std::size_t level_rank(const LevelIndex& idx) {
  return 1 + idx.F.size() * (std::size_t{1} << idx.n) + idx.F.size() * idx.n;
}

// --- levels ----------------------------------------------------------------

LevelGroup build_level(const LevelIndex& idx, const ParamSeq& params, const SubgroupH& subgroup) {
  if (idx.F.empty()) throw PreconditionError("level F must be nonempty");
  for (const PosRat& h : idx.F)
    if (!ratlattice::contains(subgroup, h)) throw PreconditionError("level element " + h.str() + " is not in H");
  if (idx.n >= params.k.size()) throw PreconditionError("parameters do not reach stage " + std::to_string(idx.n));

  LevelGroup level{idx, OrderBasis(idx), RatVector(), params.k[idx.n], params.l[idx.n]};
  level.u = RatVector::Zero(level.basis.size());
  const Rational k = level.k, l = level.l;
  for (Eigen::Index j = 0; j < level.basis.size(); ++j) {
    const BasisLabel& b = level.basis.label(j);
    switch (b.kind) {
      case BasisLabel::Kind::V: level.u(j) = k; break;
      case BasisLabel::Kind::XY: level.u(j) = k * k / b.h.value(); break;
      case BasisLabel::Kind::XC: level.u(j) = k * l / b.h.value(); break;
    }
  }
  return level;
}

bool is_integral_level(const LevelGroup& level) {
  for (const PosRat& h : level.index.F) {
    const Integer num = h.numerator();
    if (!mpz_divisible_p(level.k.get_mpz_t(), num.get_mpz_t())) return false;
    if (!mpz_divisible_p(level.l.get_mpz_t(), num.get_mpz_t())) return false;
  }
  return true;
}

Support extension_step(const Support& F, std::size_t n, const corner::EnumB& enumeration) {
  Support out = F;
  for (std::size_t i = 1; i <= n; ++i)
    for (const PosRat& a : F)
      for (const PosRat& b : enumeration.support(i)) out.insert(a * b);
  return out;
}

LevelIndex cofinal_extension(const LevelIndex& idx, std::size_t m, const corner::EnumB& enumeration) {
  if (m < idx.n) throw PreconditionError("cofinal_extension target depth is below the level");
  LevelIndex out = idx;
  for (; out.n < m; ++out.n) out.F = extension_step(out.F, out.n, enumeration);
  return out;
}

Support scale_support(const Support& F, const PosRat& h) {
  Support out;
  for (const PosRat& g : F) out.insert(h * g);
  return out;
}

// --- embeddings ------------------------------------------------------------

EmbeddingMatrix embedding_matrix(const LevelGroup& src, const LevelGroup& dst, const CornerData& corner) {
  const std::size_t n = src.index.n;
  const Support& F = src.index.F;
  const Support& Fp = dst.index.F;
  if (dst.index.n != n + 1) throw PreconditionError("embedding needs dst.n = src.n + 1");
  for (const PosRat& h : F)
    if (!Fp.contains(h)) throw PreconditionError("dst F does not contain " + h.str());
  for (std::size_t i = 1; i <= n; ++i)
    for (const PosRat& h : F)
      for (const PosRat& t : corner.enumeration.support(i))
        if (!Fp.contains(h * t))
          throw PreconditionError("dst F does not contain " + (h * t).str() + " from F F_" + std::to_string(i));

  const ParamSeq& p = corner.params;
  const Rational s = p.s.at(n), t = p.t.at(n), k = p.k.at(n), l = p.l.at(n), l1 = p.l.at(n + 1);
  const Rational s2 = s * s;

  EmbeddingMatrix out{src.index, dst.index, RatMatrix::Zero(dst.rank(), src.rank())};
  RatMatrix& m = out.m;
  auto row = [&](const BasisLabel& b) { return dst.basis.index_of(b); };
  const std::vector<BinarySeq> seqs = corner::all_sequences(n);

  std::vector<std::vector<std::pair<corner::ResidueKey, Integer>>> residues(n + 1);
  for (std::size_t i = 1; i <= n; ++i) residues[i] = corner.residues_at(i, n);

  for (Eigen::Index j = 0; j < src.rank(); ++j) {
    const BasisLabel& b = src.basis.label(j);
    switch (b.kind) {
      case BasisLabel::Kind::XY:
        m(row(BasisLabel::xy(b.h, b.y.appended('0'))), j) += 1;
        m(row(BasisLabel::xy(b.h, b.y.appended('1'))), j) += s2;
        break;
      case BasisLabel::Kind::XC:
        m(row(BasisLabel::xc(b.h, b.i)), j) += s * t;
        for (const auto& [key, r] : residues[b.i]) m(row(BasisLabel::xy(b.h * key.h, key.y0)), j) += r;
        break;
      case BasisLabel::Kind::V: {
        m(row(BasisLabel::v()), j) += s;
        for (const PosRat& h : Fp) {
          const Rational hinv = 1 / h.value();
          m(row(BasisLabel::xc(h, n + 1)), j) += s * l1 * hinv;
          if (F.contains(h)) {
            for (const BinarySeq& y : seqs) m(row(BasisLabel::xy(h, y.appended('0'))), j) += k * (s2 - 1) * hinv;
          } else {
            for (std::size_t i = 1; i <= n; ++i) m(row(BasisLabel::xc(h, i)), j) += s * l1 * hinv;
            for (const BinarySeq& y : seqs) {
              m(row(BasisLabel::xy(h, y.appended('0'))), j) += k * s2 * hinv;
              m(row(BasisLabel::xy(h, y.appended('1'))), j) += k * s2 * hinv;
            }
          }
        }
        for (const PosRat& g : F) {
          const Rational ginv = 1 / g.value();
          for (std::size_t i = 1; i <= n; ++i)
            for (const auto& [key, r] : residues[i]) m(row(BasisLabel::xy(g * key.h, key.y0)), j) -= l * r * ginv;
        }
        break;
      }
    }
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (sgn(m(i, j)) < 0)
        throw ConsistencyError("negative embedding entry " + to_string(m(i, j)) + " at row " +
                               dst.basis.label(i).str() + ", column " + src.basis.label(j).str());
  return out;
}

// --- ambient form ----------------------------------------------------------

namespace {

template <typename Map, typename Key>
void accumulate(Map& map, const Key& key, const Rational& value) {
  if (sgn(value) == 0) return;
  auto [it, inserted] = map.try_emplace(key, value);
  if (!inserted) {
    it->second += value;
    if (sgn(it->second) == 0) map.erase(it);
  }
}

}  // namespace

AmbientElt& AmbientElt::add(const AmbientElt& other, const Rational& scale) {
  if (other.stage != stage) throw PreconditionError("adding ambient elements of different stages");
  u += scale * other.u;
  for (const auto& [key, c] : other.xy) accumulate(xy, key, Rational(scale * c));
  for (const auto& [key, c] : other.xc) accumulate(xc, key, Rational(scale * c));
  return *this;
}

AmbientElt ambient_of(const BasisLabel& label, const LevelGroup& level) {
  AmbientElt out;
  out.stage = level.index.n;
  switch (label.kind) {
    case BasisLabel::Kind::XY: out.xy[TermKey{label.h, label.y}] = 1; break;
    case BasisLabel::Kind::XC: out.xc[{label.h, label.i}] = 1; break;
    case BasisLabel::Kind::V: {
      out.u = Rational(1) / Rational(level.k);
      for (const PosRat& h : level.index.F) {
        const Rational hinv = 1 / h.value();
        for (const BinarySeq& y : corner::all_sequences(level.index.n))
          out.xy[TermKey{h, y}] = -hinv * Rational(level.k);
        for (std::size_t i = 1; i <= level.index.n; ++i) out.xc[{h, i}] = -hinv * Rational(level.l);
      }
      break;
    }
  }
  return out;
}

AmbientElt ambient_combination(const LevelGroup& level, const RatVector& coords) {
  if (coords.size() != level.rank()) throw PreconditionError("coordinate vector does not match the level rank");
  AmbientElt out;
  out.stage = level.index.n;
  for (Eigen::Index j = 0; j < coords.size(); ++j)
    if (sgn(coords(j)) != 0) out.add(ambient_of(level.basis.label(j), level), coords(j));
  return out;
}

AmbientElt lift(const AmbientElt& e, const CornerData& corner) {
  const std::size_t n = e.stage;
  const ParamSeq& p = corner.params;
  const Rational s2 = p.s.at(n) * p.s.at(n), st = p.st(n);
  AmbientElt out;
  out.stage = n + 1;
  out.u = e.u;
  for (const auto& [key, c] : e.xy) {
    accumulate(out.xy, TermKey{key.h, key.y.appended('0')}, c);
    accumulate(out.xy, TermKey{key.h, key.y.appended('1')}, Rational(c * s2));
  }
  for (const auto& [key, c] : e.xc) {
    const auto& [h, i] = key;
    accumulate(out.xc, key, Rational(c * st));
    for (const auto& [rk, r] : corner.residues_at(i, n))
      accumulate(out.xy, TermKey{h * rk.h, rk.y0}, Rational(c * Rational(r)));
  }
  return out;
}

AmbientElt act(const PosRat& h, const AmbientElt& e) {
  AmbientElt out;
  out.stage = e.stage;
  out.u = e.u * h.value();
  for (const auto& [key, c] : e.xy) out.xy.emplace(TermKey{h * key.h, key.y}, c);
  for (const auto& [key, c] : e.xc) out.xc.emplace(std::make_pair(h * key.first, key.second), c);
  return out;
}

// --- verification ----------------------------------------------------------

namespace {

std::string at_entry(const LevelGroup& dst, const LevelGroup& src, Eigen::Index i, Eigen::Index j) {
  return "(row " + dst.basis.label(i).str() + ", column " + src.basis.label(j).str() + ")";
}

BasisLabel designated_row(const BasisLabel& b) {
  switch (b.kind) {
    case BasisLabel::Kind::XY: return BasisLabel::xy(b.h, b.y.appended('1'));
    case BasisLabel::Kind::XC: return b;
    case BasisLabel::Kind::V: return BasisLabel::v();
  }
  return b;
}

}  // namespace

std::vector<Violation> verify_embedding(const EmbeddingMatrix& e, const LevelGroup& src, const LevelGroup& dst,
                                        const CornerData& corner) {
  std::vector<Violation> out;
  auto fail = [&](const std::string& check, const std::string& witness) { out.push_back({check, witness}); };
  const std::string where = "n=" + std::to_string(src.index.n);
  if (e.src != src.index || e.dst != dst.index) fail("embedding.levels", where + " level indices differ");
  if (e.m.rows() != dst.rank() || e.m.cols() != src.rank()) {
    fail("embedding.shape", where + " matrix is " + std::to_string(e.m.rows()) + "x" + std::to_string(e.m.cols()));
    return out;
  }
  const RatMatrix& m = e.m;

  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (sgn(m(i, j)) < 0) fail("embedding.nonnegative", where + " " + at_entry(dst, src, i, j) + " = " + to_string(m(i, j)));

  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const BasisLabel& b = src.basis.label(j);
    const BasisLabel target = designated_row(b);
    if (!dst.basis.contains(target)) {
      fail("embedding.private_row", where + " column " + b.str() + " has no row " + target.str());
      continue;
    }
    const Eigen::Index r = dst.basis.index_of(target);
    bool ok = sgn(m(r, j)) > 0;
    for (Eigen::Index j2 = 0; j2 < m.cols() && ok; ++j2)
      if (j2 != j && sgn(m(r, j2)) != 0) ok = false;
    if (!ok) fail("embedding.private_row", where + " column " + b.str() + " at row " + dst.basis.label(r).str());
  }

  const RatVector image = sparse_product(m, src.u);
  for (Eigen::Index i = 0; i < image.size(); ++i)
    if (image(i) != dst.u(i)) {
      fail("embedding.unit_preserved", where + " row " + dst.basis.label(i).str() + ": " + to_string(image(i)) +
                                           " vs " + to_string(dst.u(i)));
      break;
    }

  // Mixed coefficients of the v column at x_h y0.
  const std::size_t n = src.index.n;
  const ParamSeq& p = corner.params;
  if (n < p.s.size()) {
    const Rational s = p.s[n], t = p.t[n], k = p.k[n], l = p.l[n];
    const Rational bound = k * (s * s - 1) - l * s * t * corner::support_mass(corner.enumeration.supports, n);
    const Eigen::Index vcol = src.basis.index_of(BasisLabel::v());
    for (const PosRat& h : dst.index.F)
      for (const BinarySeq& y : corner::all_sequences(n)) {
        const BasisLabel label = BasisLabel::xy(h, y.appended('0'));
        const Rational scaled = m(dst.basis.index_of(label), vcol) * h.value();
        if (scaled < bound)
          fail("embedding.mixed_coefficient_bound",
               where + " row " + label.str() + ": " + to_string(scaled) + " < " + to_string(bound));
      }
  }

  if (is_integral_level(src) && is_integral_level(dst) && !is_integral(m))
    fail("embedding.integral", where + " integral levels with a fractional entry");

  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const AmbientElt lifted = lift(ambient_of(src.basis.label(j), src), corner);
    if (lifted != ambient_combination(dst, RatVector(m.col(j)))) {
      fail("embedding.ambient", where + " column " + src.basis.label(j).str());
      break;
    }
  }
  return out;
}

ordgrp::RatBoundPair rl_at_level(const IntVector& d, const LevelGroup& level) {
  if (!is_integral_level(level)) throw PreconditionError("r/l requires an integral level");
  return ordgrp::rl_values(to_rational(d), ordgrp::SimplicialLevel<Rational>(level.u));
}

// --- H-action --------------------------------------------------------------

HAction h_action(const PosRat& h, const LevelGroup& level, const SubgroupH& subgroup) {
  if (!ratlattice::contains(subgroup, h)) throw PreconditionError(h.str() + " is not in H");
  HAction out{h, level.index, LevelIndex{level.index.n, scale_support(level.index.F, h)}, RatMatrix()};
  const OrderBasis target(out.dst);
  out.a = RatMatrix::Zero(target.size(), level.rank());
  for (Eigen::Index j = 0; j < level.rank(); ++j) {
    BasisLabel b = level.basis.label(j);
    if (b.kind == BasisLabel::Kind::V) {
      out.a(target.index_of(b), j) = h.value();
    } else {
      b.h = h * b.h;
      out.a(target.index_of(b), j) = 1;
    }
  }
  return out;
}

std::vector<Violation> verify_h_action(const HAction& action, const LevelGroup& src, const LevelGroup& dst,
                                       const SubgroupH& subgroup) {
  std::vector<Violation> out;
  auto fail = [&](const std::string& check, const std::string& witness) { out.push_back({check, witness}); };
  const std::string where = "h=" + action.h.str() + " n=" + std::to_string(src.index.n);
  if (action.src != src.index || action.dst != dst.index) {
    fail("action.levels", where + " level indices differ");
    return out;
  }
  if (action.a.rows() != dst.rank() || action.a.cols() != src.rank()) {
    fail("action.shape", where);
    return out;
  }
  if (sparse_product(action.a, src.u) != RatVector(dst.u * action.h.value()))
    fail("action.unit_scaled", where + " A u != h u'");

  for (Eigen::Index j = 0; j < src.rank(); ++j) {
    const AmbientElt moved = act(action.h, ambient_of(src.basis.label(j), src));
    if (moved != ambient_combination(dst, RatVector(action.a.col(j)))) {
      fail("action.ambient", where + " basis element " + src.basis.label(j).str());
      break;
    }
  }

  if (auto why = ordgrp::criterion_violation(action.a)) fail("action.criterion", where + " " + *why);
  const HAction inverse = h_action(action.h.inverse(), dst, subgroup);
  if (inverse.dst != src.index) {
    fail("action.inverse_levels", where);
    return out;
  }
  if (auto why = ordgrp::criterion_violation(inverse.a)) fail("action.inverse_criterion", where + " " + *why);
  if (sparse_product(inverse.a, action.a) != RatMatrix::Identity(src.rank(), src.rank()) ||
      sparse_product(action.a, inverse.a) != RatMatrix::Identity(dst.rank(), dst.rank()))
    fail("action.inverse", where + " A^-1 A != I");
  return out;
}

std::vector<Violation> check_action_composition(const PosRat& g, const PosRat& h, const LevelGroup& level,
                                                const ParamSeq& params, const SubgroupH& subgroup) {
  std::vector<Violation> out;
  const HAction first = h_action(h, level, subgroup);
  const LevelGroup middle = build_level(first.dst, params, subgroup);
  const HAction second = h_action(g, middle, subgroup);
  const HAction both = h_action(g * h, level, subgroup);
  if (second.dst != both.dst || sparse_product(second.a, first.a) != both.a)
    out.push_back({"action.composition", "g=" + g.str() + " h=" + h.str() + " n=" + std::to_string(level.index.n)});
  return out;
}

// --- truncation ------------------------------------------------------------

DiagramTruncation build_truncation(const SubgroupH& subgroup, std::size_t depth, std::uint64_t seed,
                                   ParamPolicy policy) {
  DiagramTruncation t;
  t.subgroup = subgroup;
  t.corner = corner::build_corner(subgroup, depth, seed, policy);
  t.policy = policy;
  t.seed = seed;
  LevelIndex idx{0, Support{PosRat()}};
  t.levels.push_back(build_level(idx, t.corner.params, subgroup));
  for (std::size_t n = 0; n < depth; ++n) {
    idx = LevelIndex{n + 1, extension_step(idx.F, n, t.corner.enumeration)};
    t.levels.push_back(build_level(idx, t.corner.params, subgroup));
    t.embeddings.push_back(embedding_matrix(t.levels[n], t.levels[n + 1], t.corner));
  }
  return t;
}

std::vector<Violation> check_action_commutes(const PosRat& h, const DiagramTruncation& t, std::size_t n) {
  const LevelGroup& lower = t.levels.at(n);
  const LevelGroup& upper = t.levels.at(n + 1);
  const LevelGroup lower_h = build_level({n, scale_support(lower.index.F, h)}, t.corner.params, t.subgroup);
  const LevelGroup upper_h = build_level({n + 1, scale_support(upper.index.F, h)}, t.corner.params, t.subgroup);
  const EmbeddingMatrix e_h = embedding_matrix(lower_h, upper_h, t.corner);
  const HAction a_lower = h_action(h, lower, t.subgroup);
  const HAction a_upper = h_action(h, upper, t.subgroup);
  std::vector<Violation> out;
  if (sparse_product(e_h.m, a_lower.a) != sparse_product(a_upper.a, t.embeddings.at(n).m))
    out.push_back({"action.commutes_with_embedding", "h=" + h.str() + " n=" + std::to_string(n)});
  return out;
}

OrbitResult orbit_certificate(const Integer& n, const Integer& m, const DiagramTruncation& t) {
  if (n <= 0 || m <= 0) throw PreconditionError("orbit_certificate requires positive integers");
  OrbitResult result;
  if (!ratlattice::contains(t.subgroup, PosRat(n, m))) {
    result.refusal = to_string(n) + "/" + to_string(m) + " ∉ H";
    return result;
  }
  OrbitCertificate cert{n, m, PosRat(m, n), {}, {}};
  for (const LevelGroup& level : t.levels) {
    HAction a = h_action(cert.h, level, t.subgroup);
    const LevelGroup image = build_level(a.dst, t.corner.params, t.subgroup);
    for (Violation& v : verify_h_action(a, level, image, t.subgroup)) cert.violations.push_back(std::move(v));
    if (sparse_product(a.a, RatVector(level.u * Rational(n))) != RatVector(image.u * Rational(m)))
      cert.violations.push_back({"orbit.unit", "n=" + std::to_string(level.index.n)});
    cert.actions.push_back(std::move(a));
  }
  for (std::size_t k = 0; k + 1 < t.levels.size(); ++k)
    for (Violation& v : check_action_commutes(cert.h, t, k)) cert.violations.push_back(std::move(v));
  result.certificate = std::move(cert);
  return result;
}

std::vector<Violation> check_positivity_slack(const DiagramTruncation& t) {
  std::vector<Violation> out;
  for (std::size_t n = 0; n < t.depth(); ++n) {
    const Rational slack = corner::positivity_slack(t.corner.params, t.corner.enumeration.supports, n);
    if (sgn(slack) < 0) out.push_back({"params.positivity_slack", "n=" + std::to_string(n) + " slack=" + to_string(slack)});
  }
  return out;
}

}  // namespace dimgrp::dimbuild
