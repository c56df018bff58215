#include "dimgrp/io.hpp"

#include "dimgrp/error.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace dimgrp::io {

using corner::BinarySeq;
using corner::GroupRingElt;
using dimbuild::BasisLabel;
using dimbuild::LevelGroup;
using dimbuild::LevelIndex;
using ratlattice::PosRat;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0, 0);
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path, std::string("missing field \"") + key + "\"");
  return *it;
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t unsigned_value(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    schema_error(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string at(const std::string& path, const char* key) { return path + "." + key; }

// Rethrows a scalar parse failure with the JSON path attached.
template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    if (e.line() == 0) throw;
    schema_error(path, e.what());
  } catch (const PreconditionError& e) {
    schema_error(path, e.what());
  }
}

json terms_to_json(const GroupRingElt& e) {
  json out = json::array();
  for (const auto& [key, c] : e.terms()) out.push_back({{"h", key.h.str()}, {"y", key.y.str()}, {"c", to_json(c)}});
  return out;
}

GroupRingElt terms_from_json(const json& j, std::size_t stage, const std::string& path) {
  GroupRingElt out(stage);
  const json& terms = array(j, path);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string p = at(path, t);
    const PosRat h = with_path(at(p, "h"), [&] { return PosRat::parse(str(field(terms[t], "h", p), at(p, "h"))); });
    const BinarySeq y = with_path(at(p, "y"), [&] { return BinarySeq(str(field(terms[t], "y", p), at(p, "y"))); });
    const Integer c = integer_from_json(field(terms[t], "c", p), at(p, "c"));
    if (sgn(c) == 0) schema_error(p, "zero coefficient");
    if (sgn(out.coefficient(h, y)) != 0) schema_error(p, "duplicate term");
    with_path(p, [&] {
      out.add(h, y, c);
      return 0;
    });
  }
  return out;
}

std::vector<Integer> integers_from_json(const json& j, const std::string& path) {
  std::vector<Integer> out;
  const json& a = array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(integer_from_json(a[i], at(path, i)));
  return out;
}

json integers_to_json(const std::vector<Integer>& v) {
  json out = json::array();
  for (const Integer& z : v) out.push_back(to_json(z));
  return out;
}

template <typename Scalar, typename Read>
Matrix<Scalar> matrix_from_json(const json& j, const std::string& path, Read read) {
  const json& rows = array(j, path);
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : array(rows[0], at(path, std::size_t{0})).size();
  Matrix<Scalar> out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    const json& row = array(rows[i], at(path, i));
    if (row.size() != c) schema_error(at(path, i), "ragged matrix row");
    for (std::size_t k = 0; k < c; ++k)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = read(row[k], at(at(path, i), k));
  }
  return out;
}

}  // namespace

// --- scalars ---------------------------------------------------------------

json to_json(const Integer& z) {
  if (mpz_fits_slong_p(z.get_mpz_t())) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

json to_json(const Rational& q) { return to_string(q); }

json to_json(const IntMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const RatMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Integer integer_from_json(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) return with_path(path, [&] { return parse_integer(j.get<std::string>()); });
  schema_error(path, "expected an integer");
}

Rational rational_from_json(const json& j, const std::string& path) {
  if (j.is_string()) return with_path(path, [&] { return parse_rational(j.get<std::string>()); });
  if (j.is_number_integer()) return Rational(integer_from_json(j, path));
  schema_error(path, "expected a rational string");
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, column);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("cannot write " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- subgroups -------------------------------------------------------------

json subgroup_to_json(const ratlattice::SubgroupH& h) {
  json gens = json::array();
  for (const PosRat& g : h.generators()) gens.push_back(g.str());
  return {{"generators", gens}, {"primes", integers_to_json(h.primes())}, {"hnf", to_json(h.hnf())}};
}

StoredSubgroup subgroup_from_json(const json& j, const std::string& path) {
  StoredSubgroup out;
  const std::string gp = at(path, "generators");
  const json& gens = array(field(j, "generators", path), gp);
  for (std::size_t i = 0; i < gens.size(); ++i)
    out.generators.push_back(with_path(at(gp, i), [&] { return PosRat::parse(str(gens[i], at(gp, i))); }));
  out.primes = integers_from_json(field(j, "primes", path), at(path, "primes"));
  out.hnf = matrix_from_json<Integer>(field(j, "hnf", path), at(path, "hnf"), integer_from_json);
  if (out.hnf.rows() > 0 && out.hnf.cols() != static_cast<Eigen::Index>(out.primes.size()))
    schema_error(at(path, "hnf"), "column count differs from the prime list");
  if (out.hnf.rows() == 0) out.hnf.resize(0, static_cast<Eigen::Index>(out.primes.size()));
  return out;
}

// --- bundles ---------------------------------------------------------------

Bundle build_bundle(const BundleConfig& config) {
  if (config.depth < 1) throw PreconditionError("depth must be at least 1");
  std::vector<PosRat> gens;
  for (const std::string& g : config.generators) gens.push_back(PosRat::parse(g));
  Bundle b;
  b.config = config;
  const ratlattice::SubgroupH h = ratlattice::subgroup_from_generators(gens);
  b.truncation = dimbuild::build_truncation(h, config.depth, config.seed, config.policy);
  b.stored_subgroup = {h.generators(), h.primes(), h.hnf()};
  for (const LevelGroup& level : b.truncation.levels) b.stored_integral.push_back(dimbuild::is_integral_level(level));
  return b;
}

json bundle_to_json(const Bundle& b) {
  const dimbuild::DiagramTruncation& t = b.truncation;
  const corner::CornerData& c = t.corner;
  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = {{"generators", b.config.generators},
                   {"depth", b.config.depth},
                   {"seed", b.config.seed},
                   {"policy", corner::to_string(b.config.policy)}};
  json gens = json::array();
  for (const PosRat& g : b.stored_subgroup.generators) gens.push_back(g.str());
  out["subgroup"] = {
      {"generators", gens}, {"primes", integers_to_json(b.stored_subgroup.primes)}, {"hnf", to_json(b.stored_subgroup.hnf)}};
  out["params"] = {{"s", integers_to_json(c.params.s)},
                   {"t", integers_to_json(c.params.t)},
                   {"k", integers_to_json(c.params.k)},
                   {"l", integers_to_json(c.params.l)}};

  json enumeration = json::array();
  for (const GroupRingElt& e : c.enumeration.b) enumeration.push_back({{"stage", e.stage()}, {"terms", terms_to_json(e)}});
  out["enumeration"] = enumeration;

  json wdiffs = json::array();
  for (const auto& [key, d] : c.wdiffs.d) wdiffs.push_back({{"i", key.first}, {"n", key.second}, {"d", to_json(d)}});
  out["wdiffs"] = wdiffs;

  json relations = json::array();
  for (const auto& [key, e] : c.relations)
    relations.push_back({{"i", key.first}, {"n", key.second}, {"terms", terms_to_json(e)}});
  out["relations"] = relations;

  json residues = json::array();
  for (const auto& [key, r] : c.residues)
    residues.push_back({{"i", key.i}, {"n", key.n}, {"h", key.h.str()}, {"y", key.y0.str()}, {"value", to_json(r)}});
  out["residues"] = residues;

  json levels = json::array();
  for (std::size_t n = 0; n < t.levels.size(); ++n) {
    const LevelGroup& level = t.levels[n];
    json F = json::array(), basis = json::array(), u = json::array();
    for (const PosRat& h : level.index.F) F.push_back(h.str());
    for (const BasisLabel& label : level.basis.labels()) basis.push_back(label.str());
    for (Eigen::Index j = 0; j < level.u.size(); ++j) u.push_back(to_json(level.u(j)));
    levels.push_back({{"n", level.index.n},
                      {"F", F},
                      {"basis", basis},
                      {"u", u},
                      {"integral", n < b.stored_integral.size() && b.stored_integral[n]}});
  }
  out["levels"] = levels;

  json embeddings = json::array();
  for (std::size_t n = 0; n < t.embeddings.size(); ++n)
    embeddings.push_back({{"src", n}, {"dst", n + 1}, {"matrix", to_json(t.embeddings[n].m)}});
  out["embeddings"] = embeddings;
  return out;
}

Bundle bundle_from_json(const json& j) {
  const std::string root = "bundle";
  const json& version = field(j, "schema_version", root);
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    schema_error(at(root, "schema_version"), "unsupported schema version " + version.dump());

  Bundle b;
  const std::string cp = at(root, "config");
  const json& config = field(j, "config", root);
  const json& gens = array(field(config, "generators", cp), at(cp, "generators"));
  for (std::size_t i = 0; i < gens.size(); ++i) b.config.generators.push_back(str(gens[i], at(at(cp, "generators"), i)));
  b.config.depth = unsigned_value(field(config, "depth", cp), at(cp, "depth"));
  if (b.config.depth < 1) schema_error(at(cp, "depth"), "depth must be at least 1");
  b.config.seed = unsigned_value(field(config, "seed", cp), at(cp, "seed"));
  b.config.policy = with_path(at(cp, "policy"), [&] { return corner::parse_policy(str(field(config, "policy", cp), at(cp, "policy"))); });

  b.stored_subgroup = subgroup_from_json(field(j, "subgroup", root), at(root, "subgroup"));
  dimbuild::DiagramTruncation& t = b.truncation;
  t.subgroup = ratlattice::subgroup_from_generators(b.stored_subgroup.generators);
  t.seed = b.config.seed;
  t.policy = b.config.policy;

  corner::CornerData& c = t.corner;
  c.depth = b.config.depth;
  const std::string pp = at(root, "params");
  const json& params = field(j, "params", root);
  c.params.s = integers_from_json(field(params, "s", pp), at(pp, "s"));
  c.params.t = integers_from_json(field(params, "t", pp), at(pp, "t"));
  c.params.k = integers_from_json(field(params, "k", pp), at(pp, "k"));
  c.params.l = integers_from_json(field(params, "l", pp), at(pp, "l"));
  if (c.params.s.size() != c.depth + 1 || c.params.t.size() != c.depth + 1 || c.params.k.size() != c.depth + 2 ||
      c.params.l.size() != c.depth + 2)
    schema_error(pp, "sequence lengths do not match the depth");

  const std::string ep = at(root, "enumeration");
  const json& enumeration = array(field(j, "enumeration", root), ep);
  for (std::size_t i = 0; i < enumeration.size(); ++i) {
    const std::string p = at(ep, i);
    const std::size_t stage = unsigned_value(field(enumeration[i], "stage", p), at(p, "stage"));
    GroupRingElt e = terms_from_json(field(enumeration[i], "terms", p), stage, at(p, "terms"));
    c.enumeration.supports.push_back(e.support());
    c.enumeration.b.push_back(std::move(e));
  }
  if (c.enumeration.size() < c.depth) schema_error(ep, "fewer elements than the depth");

  c.wdiffs.seed = b.config.seed;
  const std::string wp = at(root, "wdiffs");
  const json& wdiffs = array(field(j, "wdiffs", root), wp);
  for (std::size_t k = 0; k < wdiffs.size(); ++k) {
    const std::string p = at(wp, k);
    const std::size_t i = unsigned_value(field(wdiffs[k], "i", p), at(p, "i"));
    const std::size_t n = unsigned_value(field(wdiffs[k], "n", p), at(p, "n"));
    if (!c.wdiffs.d.emplace(std::make_pair(i, n), integer_from_json(field(wdiffs[k], "d", p), at(p, "d"))).second)
      schema_error(p, "duplicate difference");
  }

  const std::string rp = at(root, "relations");
  const json& relations = array(field(j, "relations", root), rp);
  for (std::size_t k = 0; k < relations.size(); ++k) {
    const std::string p = at(rp, k);
    const std::size_t i = unsigned_value(field(relations[k], "i", p), at(p, "i"));
    const std::size_t n = unsigned_value(field(relations[k], "n", p), at(p, "n"));
    GroupRingElt e = terms_from_json(field(relations[k], "terms", p), n, at(p, "terms"));
    if (!c.relations.emplace(std::make_pair(i, n), std::move(e)).second) schema_error(p, "duplicate relation");
  }

  const std::string sp = at(root, "residues");
  const json& residues = array(field(j, "residues", root), sp);
  for (std::size_t k = 0; k < residues.size(); ++k) {
    const std::string p = at(sp, k);
    corner::ResidueKey key{unsigned_value(field(residues[k], "i", p), at(p, "i")),
                           unsigned_value(field(residues[k], "n", p), at(p, "n")),
                           with_path(at(p, "h"), [&] { return PosRat::parse(str(field(residues[k], "h", p), at(p, "h"))); }),
                           with_path(at(p, "y"), [&] { return BinarySeq(str(field(residues[k], "y", p), at(p, "y"))); })};
    if (!c.residues.emplace(key, integer_from_json(field(residues[k], "value", p), at(p, "value"))).second)
      schema_error(p, "duplicate residue");
  }

  const std::string lp = at(root, "levels");
  const json& levels = array(field(j, "levels", root), lp);
  if (levels.size() != c.depth + 1) schema_error(lp, "expected depth + 1 levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::string p = at(lp, k);
    LevelIndex idx;
    idx.n = unsigned_value(field(levels[k], "n", p), at(p, "n"));
    if (idx.n != k) schema_error(at(p, "n"), "levels must be listed by n");
    const json& F = array(field(levels[k], "F", p), at(p, "F"));
    for (std::size_t i = 0; i < F.size(); ++i)
      idx.F.insert(with_path(at(at(p, "F"), i), [&] { return PosRat::parse(str(F[i], at(at(p, "F"), i))); }));
    std::vector<BasisLabel> labels;
    const json& basis = array(field(levels[k], "basis", p), at(p, "basis"));
    for (std::size_t i = 0; i < basis.size(); ++i)
      labels.push_back(with_path(at(at(p, "basis"), i), [&] { return BasisLabel::parse(str(basis[i], at(at(p, "basis"), i))); }));
    LevelGroup level{idx, with_path(at(p, "basis"), [&] { return dimbuild::OrderBasis(std::move(labels)); }), RatVector(),
                     c.params.k[k], c.params.l[k]};
    const json& u = array(field(levels[k], "u", p), at(p, "u"));
    if (static_cast<Eigen::Index>(u.size()) != level.basis.size()) schema_error(at(p, "u"), "length differs from the basis");
    level.u.resize(level.basis.size());
    for (std::size_t i = 0; i < u.size(); ++i) level.u(static_cast<Eigen::Index>(i)) = rational_from_json(u[i], at(at(p, "u"), i));
    const json& integral = field(levels[k], "integral", p);
    if (!integral.is_boolean()) schema_error(at(p, "integral"), "expected a boolean");
    b.stored_integral.push_back(integral.get<bool>());
    t.levels.push_back(std::move(level));
  }

  const std::string mp = at(root, "embeddings");
  const json& embeddings = array(field(j, "embeddings", root), mp);
  if (embeddings.size() != c.depth) schema_error(mp, "expected one embedding per level step");
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    const std::string p = at(mp, k);
    if (unsigned_value(field(embeddings[k], "src", p), at(p, "src")) != k ||
        unsigned_value(field(embeddings[k], "dst", p), at(p, "dst")) != k + 1)
      schema_error(p, "embeddings must join consecutive levels in order");
    RatMatrix m = matrix_from_json<Rational>(field(embeddings[k], "matrix", p), at(p, "matrix"), rational_from_json);
    if (m.rows() != t.levels[k + 1].rank() || m.cols() != t.levels[k].rank())
      schema_error(at(p, "matrix"), "shape does not match the level ranks");
    t.embeddings.push_back({t.levels[k].index, t.levels[k + 1].index, std::move(m)});
  }
  return b;
}

Bundle read_bundle(const std::filesystem::path& path) { return bundle_from_json(parse_json(read_file(path))); }

// --- presentations ---------------------------------------------------------

json presentation_to_json(const bratteli::UltramatricialPresentation& p, const std::vector<std::size_t>& chain_levels) {
  json levels = json::array(), maps = json::array();
  for (const IntVector& sizes : p.levels) {
    json row = json::array();
    for (Eigen::Index j = 0; j < sizes.size(); ++j) row.push_back(to_json(sizes(j)));
    levels.push_back(std::move(row));
  }
  for (const IntMatrix& a : p.maps) maps.push_back(to_json(a));
  json out = {{"schema_version", kSchemaVersion}, {"levels", levels}, {"maps", maps}};
  if (!chain_levels.empty()) out["chain_levels"] = chain_levels;
  return out;
}

bratteli::UltramatricialPresentation presentation_from_json(const json& j) {
  const std::string root = "presentation";
  const json& version = field(j, "schema_version", root);
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    schema_error(at(root, "schema_version"), "unsupported schema version " + version.dump());
  bratteli::UltramatricialPresentation out;
  const std::string lp = at(root, "levels");
  const json& levels = array(field(j, "levels", root), lp);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::vector<Integer> sizes = integers_from_json(levels[k], at(lp, k));
    IntVector v(static_cast<Eigen::Index>(sizes.size()));
    for (std::size_t i = 0; i < sizes.size(); ++i) v(static_cast<Eigen::Index>(i)) = sizes[i];
    out.levels.push_back(std::move(v));
  }
  const std::string mp = at(root, "maps");
  const json& maps = array(field(j, "maps", root), mp);
  for (std::size_t k = 0; k < maps.size(); ++k)
    out.maps.push_back(matrix_from_json<Integer>(maps[k], at(mp, k), integer_from_json));
  return out;
}

// --- DOT -------------------------------------------------------------------

std::string truncation_dot(const dimbuild::DiagramTruncation& t) {
  std::ostringstream out;
  out << "digraph truncation {\n  rankdir=LR;\n";
  for (const LevelGroup& level : t.levels)
    out << "  L" << level.index.n << " [label=\"n=" << level.index.n << " rank=" << level.rank() << "\"];\n";
  for (std::size_t n = 0; n + 1 < t.levels.size(); ++n) out << "  L" << n << " -> L" << n + 1 << ";\n";
  out << "}\n";
  return out.str();
}

std::string presentation_dot(const bratteli::UltramatricialPresentation& p) {
  std::ostringstream out;
  out << "digraph bratteli {\n  rankdir=TB;\n";
  for (std::size_t k = 0; k < p.levels.size(); ++k)
    for (Eigen::Index j = 0; j < p.levels[k].size(); ++j)
      out << "  v" << k << "_" << j << " [label=\"" << to_string(p.levels[k](j)) << "\"];\n";
  for (std::size_t k = 0; k < p.maps.size(); ++k)
    for (Eigen::Index i = 0; i < p.maps[k].rows(); ++i)
      for (Eigen::Index j = 0; j < p.maps[k].cols(); ++j)
        if (sgn(p.maps[k](i, j)) != 0)
          out << "  v" << k << "_" << j << " -> v" << k + 1 << "_" << i << " [label=\"" << to_string(p.maps[k](i, j))
              << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace dimgrp::io
