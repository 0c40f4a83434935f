#include "rpd/fb_engine.hpp"

#include <algorithm>
#include <deque>

namespace rpd {

BlockVector fb_step(const FBInstance& inst, const BlockVector& z, const ActivationPattern& eps,
                    const BlockVector* s, const BlockVector* t) {
  require(static_cast<int>(eps.size()) == inst.m, "fb_step: pattern length mismatch");
  require(z.block_count() == inst.m, "fb_step: state block count mismatch");

  BlockVector r = inst.forward_map(z);
  BlockVector shifted = z;
  for (int i = 0; i < inst.m; ++i) {
    Vec& b = shifted.blocks[i];
    const Vec& ri = r.blocks[i];
    for (std::size_t c = 0; c < b.size(); ++c) b[c] -= inst.gamma * ri[c];
    if (s) add_into(b, s->blocks[i]);
  }
  BlockVector resolved = inst.resolvent_map(inst.gamma, shifted);
  BlockVector out = z;
  for (int i = 0; i < inst.m; ++i) {
    if (!eps[i]) continue;  // inactive blocks keep their bits
    Vec target = resolved.blocks[i];
    if (t) add_into(target, t->blocks[i]);
    out.blocks[i] = relaxed(z.blocks[i], target, inst.lambda);
  }
  return out;
}

FBTrajectory fb_run(const FBInstance& inst, const BlockVector& z0,
                    const ActivationSchedule& schedule, const ErrorInjector& s_err,
                    const ErrorInjector& t_err, const StopRule& stop, std::uint64_t seed) {
  inst.validate();
  require(schedule.length() == inst.m, "fb_run: schedule length mismatch");

  Rng pattern_rng(Rng::derive(seed, 0));
  Rng s_rng(Rng::derive(seed, 1));
  Rng t_rng(Rng::derive(seed, 2));

  FBTrajectory traj;
  BlockVector z = z0;
  std::deque<double> window;
  for (long n = 0; n < stop.max_iters; ++n) {
    const ActivationPattern eps = schedule.sample(pattern_rng);
    BlockVector s, t;
    const BlockVector* sp = nullptr;
    const BlockVector* tp = nullptr;
    if (s_err.active()) {
      s.blocks.reserve(inst.m);
      for (int i = 0; i < inst.m; ++i) s.blocks.push_back(s_err.sample(n, inst.dims[i], s_rng));
      const double nrm = s.norm();
      if (nrm > 0.0)  // renormalize the concatenation so ||s_n|| = bound(n)
        for (auto& b : s.blocks) scale(b, s_err.bound(n) / nrm);
      sp = &s;
    }
    if (t_err.active()) {
      t.blocks.reserve(inst.m);
      for (int i = 0; i < inst.m; ++i) t.blocks.push_back(t_err.sample(n, inst.dims[i], t_rng));
      const double nrm = t.norm();
      if (nrm > 0.0)
        for (auto& b : t.blocks) scale(b, t_err.bound(n) / nrm);
      tp = &t;
    }
    BlockVector next = fb_step(inst, z, eps, sp, tp);
    const double change = next.distance(z);
    traj.change_norms.push_back(change);
    z = std::move(next);
    traj.iterations = n + 1;
    window.push_back(change);
    if (static_cast<int>(window.size()) > stop.window) window.pop_front();
    if (static_cast<int>(window.size()) == stop.window &&
        *std::max_element(window.begin(), window.end()) < stop.tol) {
      traj.stop_reason = "converged";
      traj.final_z = std::move(z);
      return traj;
    }
  }
  traj.stop_reason = "max_iters";
  traj.final_z = std::move(z);
  return traj;
}

}  // namespace rpd
