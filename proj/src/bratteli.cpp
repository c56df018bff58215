#include "dimgrp/bratteli.hpp"

#include "dimgrp/error.hpp"

namespace dimgrp::bratteli {

std::optional<std::string> presentation_violation(const UltramatricialPresentation& p) {
  if (p.levels.empty()) return "presentation has no levels";
  if (p.maps.size() + 1 != p.levels.size())
    return std::to_string(p.levels.size()) + " levels need " + std::to_string(p.levels.size() - 1) + " maps, have " +
           std::to_string(p.maps.size());
  for (std::size_t k = 0; k < p.levels.size(); ++k) {
    if (p.levels[k].size() == 0) return "level " + std::to_string(k) + " is empty";
    for (Eigen::Index j = 0; j < p.levels[k].size(); ++j)
      if (p.levels[k](j) < 1) return "level " + std::to_string(k) + " has a size below 1";
  }
  for (std::size_t k = 0; k < p.maps.size(); ++k) {
    const IntMatrix& a = p.maps[k];
    if (a.cols() != p.levels[k].size() || a.rows() != p.levels[k + 1].size())
      return "map " + std::to_string(k) + " has shape " + std::to_string(a.rows()) + "x" + std::to_string(a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (sgn(a(i, j)) < 0) return "map " + std::to_string(k) + " has a negative multiplicity";
    if (IntVector(a * p.levels[k]) != p.levels[k + 1]) return "map " + std::to_string(k) + " is not unital";
  }
  return std::nullopt;
}

IntMatrix compose(const UltramatricialPresentation& p, std::size_t from, std::size_t to) {
  if (from > to || to >= p.levels.size()) throw PreconditionError("compose: level range out of bounds");
  IntMatrix out = IntMatrix::Identity(p.levels[from].size(), p.levels[from].size());
  for (std::size_t k = from; k < to; ++k) out = sparse_product(p.maps[k], out);
  return out;
}

PointedTruncation k0(const UltramatricialPresentation& p) {
  if (auto why = presentation_violation(p)) throw PreconditionError("k0: " + *why);
  PointedTruncation out;
  for (const IntVector& sizes : p.levels) out.levels.emplace_back(sizes);
  out.maps = p.maps;
  for (std::size_t k = 0; k < p.maps.size(); ++k)
    if (auto why = ordgrp::criterion_violation(p.maps[k]))
      out.flags.push_back("map " + std::to_string(k) + ": " + *why);
  return out;
}

UltramatricialPresentation morita_scale(const UltramatricialPresentation& p, const Integer& n) {
  if (n < 1) throw PreconditionError("morita_scale requires n >= 1");
  UltramatricialPresentation out = p;
  for (IntVector& sizes : out.levels) sizes *= n;
  return out;
}

namespace {

bool nonnegative(const IntMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (sgn(m(i, j)) < 0) return false;
  return true;
}

void require_shape(const IntMatrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw PreconditionError(what + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

bool verify_intertwining(const UltramatricialPresentation& pa, const UltramatricialPresentation& pb,
                         const IntertwiningCertificate& cert) {
  const std::size_t steps = cert.a_levels.size();
  if (steps == 0 || cert.b_levels.size() != steps || cert.forward.size() != steps ||
      cert.backward.size() + 1 != steps)
    throw PreconditionError("intertwining certificate lengths do not interleave");
  for (std::size_t k = 0; k < steps; ++k) {
    if (cert.a_levels[k] >= pa.size() || cert.b_levels[k] >= pb.size())
      throw PreconditionError("intertwining level index out of range");
    if (k > 0 && (cert.a_levels[k] <= cert.a_levels[k - 1] || cert.b_levels[k] <= cert.b_levels[k - 1]))
      throw PreconditionError("intertwining levels must increase");
    require_shape(cert.forward[k], pb.unit(cert.b_levels[k]).size(), pa.unit(cert.a_levels[k]).size(),
                  "forward map " + std::to_string(k));
    if (k + 1 < steps)
      require_shape(cert.backward[k], pa.unit(cert.a_levels[k + 1]).size(), pb.unit(cert.b_levels[k]).size(),
                    "backward map " + std::to_string(k));
  }

  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t a = cert.a_levels[k], b = cert.b_levels[k];
    const IntMatrix& f = cert.forward[k];
    if (!nonnegative(f) || IntVector(f * pa.unit(a)) != pb.unit(b)) return false;
    if (k + 1 == steps) continue;
    const IntMatrix& g = cert.backward[k];
    const std::size_t a1 = cert.a_levels[k + 1], b1 = cert.b_levels[k + 1];
    if (!nonnegative(g) || IntVector(g * pb.unit(b)) != pa.unit(a1)) return false;
    if (IntMatrix(g * f) != compose(pa, a, a1)) return false;
    if (IntMatrix(cert.forward[k + 1] * g) != compose(pb, b, b1)) return false;
  }
  return true;
}

TruncationPresentation presentation_from_truncation(const dimbuild::DiagramTruncation& t) {
  TruncationPresentation out;
  std::optional<RatMatrix> pending;  // product of embeddings since the last integral level
  for (std::size_t n = 0; n < t.levels.size(); ++n) {
    if (n > 0 && pending) *pending = sparse_product(t.embeddings[n - 1].m, *pending);
    if (!dimbuild::is_integral_level(t.levels[n])) continue;
    if (pending) out.presentation.maps.push_back(to_integer(*pending));
    out.presentation.levels.push_back(to_integer(t.levels[n].u));
    out.chain_levels.push_back(n);
    pending = RatMatrix::Identity(t.levels[n].rank(), t.levels[n].rank());
  }
  if (out.chain_levels.empty()) throw PreconditionError("truncation has no integral level");
  return out;
}

UltramatricialPresentation localization_model(const std::vector<Integer>& primes, std::size_t depth) {
  if (primes.empty()) throw PreconditionError("localization_model needs at least one prime");
  UltramatricialPresentation out;
  out.levels.push_back(IntVector::Constant(1, Integer(1)));
  for (std::size_t k = 0; k < depth; ++k) {
    const Integer& p = primes[k % primes.size()];
    out.maps.push_back(IntMatrix::Constant(1, 1, p));
    out.levels.push_back(IntVector::Constant(1, Integer(out.levels.back()(0) * p)));
  }
  return out;
}

bool rank_one_orbit(const UltramatricialPresentation& p, const Integer& n, const Integer& m) {
  if (n < 1 || m < 1) throw PreconditionError("rank_one_orbit requires positive integers");
  for (const IntVector& sizes : p.levels)
    if (sizes.size() != 1) throw PreconditionError("rank_one_orbit requires a rank-one presentation");
  Integer g;
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
  const Integer n1 = n / g, m1 = m / g;
  auto reached = [&](const Integer& d) {
    for (const IntVector& sizes : p.levels)
      if (mpz_divisible_p(sizes(0).get_mpz_t(), d.get_mpz_t())) return true;
    return false;
  };
  return reached(n1) && reached(m1);
}

}  // namespace dimgrp::bratteli
