#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpd {

using Vec = std::vector<double>;

/// Structural problem with dimensions, supports or operator wiring.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation was asked of an operator kind that does not support it.
struct UnsupportedOperation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An activation pattern violates the coupling closure required by a step.
struct ClosureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A step-size / cocoercivity condition failed and the run was not forced.
struct ConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent problem-spec document.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw StructuralError(msg);
}

// ---- small dense-vector helpers (all loops in ascending index order) ----

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void add_into(Vec& acc, const Vec& t) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += t[i];
}

inline void sub_into(Vec& acc, const Vec& t) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= t[i];
}

inline void scale(Vec& a, double c) {
  for (double& x : a) x *= c;
}

inline Vec scaled(const Vec& a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// dst = old + lambda * (target - old), entrywise.  The relaxed commit used by
/// every engine; kept in one place so specialized code paths share its
/// floating-point evaluation order.
inline Vec relaxed(const Vec& old, const Vec& target, double lambda) {
  Vec r(old.size());
  for (std::size_t i = 0; i < old.size(); ++i)
    r[i] = old[i] + lambda * (target[i] - old[i]);
  return r;
}

}  // namespace rpd
