#pragma once

/// Stochastic error injectors with summable magnitude schedules: the emitted
/// vector at iteration n has a uniformly random direction and norm exactly
/// bound(n), so the conditional-expectation summability condition holds by
/// construction.

#include "rpd/common.hpp"
#include "rpd/rng.hpp"

namespace rpd {

enum class ErrorKind { None, DecayPower, DecayGeometric };

struct ErrorInjector {
  ErrorKind kind = ErrorKind::None;
  double c = 0.0;
  double exponent = 0.0;  // s for power decay, rho for geometric decay

  static ErrorInjector none() { return {}; }

  /// bound(n) = c * (n+1)^{-s}; summability needs s > 1, enforced here.
  static ErrorInjector power(double c, double s) {
    require(c > 0.0, "ErrorInjector::power: c must be positive");
    require(s > 1.0, "ErrorInjector::power: exponent must exceed 1 for summability");
    ErrorInjector e;
    e.kind = ErrorKind::DecayPower;
    e.c = c;
    e.exponent = s;
    return e;
  }

  /// bound(n) = c * rho^n with rho in (0,1).
  static ErrorInjector geometric(double c, double rho) {
    require(c > 0.0, "ErrorInjector::geometric: c must be positive");
    require(rho > 0.0 && rho < 1.0, "ErrorInjector::geometric: rho must lie in (0,1)");
    ErrorInjector e;
    e.kind = ErrorKind::DecayGeometric;
    e.c = c;
    e.exponent = rho;
    return e;
  }

  bool active() const { return kind != ErrorKind::None; }

  double bound(long n) const {
    switch (kind) {
      case ErrorKind::None:
        return 0.0;
      case ErrorKind::DecayPower:
        return c * std::pow(static_cast<double>(n) + 1.0, -exponent);
      case ErrorKind::DecayGeometric:
        return c * std::pow(exponent, static_cast<double>(n));
    }
    return 0.0;
  }

  /// Vector of the given dimension with norm exactly bound(n).
  Vec sample(long n, int dim, Rng& rng) const {
    Vec e(static_cast<std::size_t>(dim), 0.0);
    if (kind == ErrorKind::None) return e;
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (auto& v : e) v = rng.normal();
      nrm = norm2(e);
    }
    const double target = bound(n);
    for (auto& v : e) v *= target / nrm;
    return e;
  }
};

}  // namespace rpd
