#include "rpd/monotone.hpp"

#include "rpd/linalg.hpp"

namespace rpd {
namespace {

void require_uniform(const Vec& w, const char* who) {
  for (double v : w)
    require(v == w[0], std::string(who) + ": consensus blocks need a uniform scalar metric");
}

}  // namespace

Vec project_consensus(const Vec& z, int copies) {
  require(copies >= 1, "project_consensus: copies must be positive");
  require(z.size() % static_cast<std::size_t>(copies) == 0,
          "project_consensus: copy count does not divide the dimension");
  const std::size_t d = z.size() / static_cast<std::size_t>(copies);
  Vec out(z.size());
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (int j = 0; j < copies; ++j) s += z[static_cast<std::size_t>(j) * d + r];
    const double mean = s / copies;
    for (int j = 0; j < copies; ++j) out[static_cast<std::size_t>(j) * d + r] = mean;
  }
  return out;
}

Vec resolvent(const MonotoneOp& A, const Vec& w, const Vec& x) {
  require(static_cast<int>(x.size()) == A.dim, "resolvent: dimension mismatch");
  switch (A.kind) {
    case MonotoneKind::Zero:
      return x;
    case MonotoneKind::Subdifferential:
      return prox_metric(A.fn, w, x);
    case MonotoneKind::Consensus:
      require_uniform(w, "resolvent");
      return project_consensus(x, A.copies);
  }
  throw UnsupportedOperation("resolvent: unknown operator kind");
}

Vec dual_resolvent(const MonotoneOp& B, const Vec& u, const Vec& z) {
  require(static_cast<int>(z.size()) == B.dim, "dual_resolvent: dimension mismatch");
  switch (B.kind) {
    case MonotoneKind::Zero:
      // inverse of the zero operator: the resolvent collapses to 0
      return Vec(z.size(), 0.0);
    case MonotoneKind::Subdifferential:
      return prox_conjugate(B.fn, u, z);
    case MonotoneKind::Consensus: {
      // uniform scalar metric: the projection commutes with the scaling, so
      // the decomposition collapses to z - (projection of z)
      require_uniform(u, "dual_resolvent");
      const Vec p = project_consensus(z, B.copies);
      Vec r(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i] - p[i];
      return r;
    }
  }
  throw UnsupportedOperation("dual_resolvent: unknown operator kind");
}

}  // namespace rpd
