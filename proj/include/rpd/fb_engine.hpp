#pragma once

/// Preconditioned random block-coordinate forward-backward iteration: the
/// substrate both primal-dual engines instantiate.  One step evaluates the
/// preconditioned forward map at the current point, shifts, applies the
/// blockwise resolvent family, and relaxes only the active blocks.

#include <functional>
#include <string>

#include "rpd/activation.hpp"
#include "rpd/error_injection.hpp"
#include "rpd/linalg.hpp"

namespace rpd {

struct StopRule {
  long max_iters = 1000;
  double tol = 0.0;  // on the successive-change norm over a trailing window
  int window = 10;
};

struct FBInstance {
  int m = 0;
  std::vector<int> dims;
  /// z -> blockwise resolvent family evaluated at z, for step size gamma.
  std::function<BlockVector(double gamma, const BlockVector&)> resolvent_map;
  /// z -> V R z (already preconditioned).
  std::function<BlockVector(const BlockVector&)> forward_map;
  double gamma = 1.0;
  double lambda = 1.0;
  double theta = 1.0;  // cocoercivity constant of V^{1/2} R V^{1/2}

  void validate() const {
    require(m >= 1 && static_cast<int>(dims.size()) == m, "FBInstance: bad block layout");
    require(gamma > 0.0 && gamma < 2.0 * theta,
            "FBInstance: step size must satisfy 0 < gamma < 2*theta");
    require(lambda > 0.0 && lambda <= 1.0, "FBInstance: relaxation must lie in (0,1]");
  }
};

/// One iteration; blocks with an inactive bit are returned bitwise unchanged.
/// `s` perturbs the resolvent argument, `t` the resolvent output (null means
/// no error and no arithmetic).
BlockVector fb_step(const FBInstance& inst, const BlockVector& z, const ActivationPattern& eps,
                    const BlockVector* s = nullptr, const BlockVector* t = nullptr);

struct FBTrajectory {
  BlockVector final_z;
  long iterations = 0;
  std::vector<double> change_norms;  // ||z_{n+1} - z_n|| per iteration
  std::string stop_reason;
};

FBTrajectory fb_run(const FBInstance& inst, const BlockVector& z0,
                    const ActivationSchedule& schedule, const ErrorInjector& s_err,
                    const ErrorInjector& t_err, const StopRule& stop, std::uint64_t seed);

}  // namespace rpd
