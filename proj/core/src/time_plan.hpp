#pragma once

#include <cmath>
#include <stdexcept>

#include "phase_engine/dynamics.hpp"

namespace phase_engine::detail {

struct TimePlan {
  double dt = 0.0;
  int n_fine = 0;  // stored sample k lives at k * dt * store_every
  int store_every = 1;
};

// Rounds the requested step down so t_max sits exactly on the stored grid.
inline TimePlan make_time_plan(const DiscreteBath& bath, const SystemParams& params, const TimeGridSpec& grid) {
  if (!(grid.t_max >= 0.0) || !std::isfinite(grid.t_max)) throw std::invalid_argument("t_max must be finite and >= 0");
  const double dt = grid.dt > 0.0 ? grid.dt : default_time_step(bath, params);
  TimePlan plan;
  if (grid.t_max == 0.0) {
    plan.dt = dt;
    return plan;
  }
  long n_fine = static_cast<long>(std::ceil(grid.t_max / dt - 1e-9));
  const int store = grid.store_every > 0 ? grid.store_every : static_cast<int>(std::max(1L, (n_fine + 500) / 1000));
  n_fine = ((n_fine + store - 1) / store) * store;
  plan.dt = grid.t_max / static_cast<double>(n_fine);
  plan.n_fine = static_cast<int>(n_fine);
  plan.store_every = store;
  return plan;
}

}  // namespace phase_engine::detail
