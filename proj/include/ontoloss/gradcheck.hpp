#pragma once

#include <cstdint>
#include <string>

#include "ontoloss/losses.hpp"

namespace ontoloss {

struct GradCheckReport {
  bool passed = false;
  uint64_t points_checked = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::string worst_location;  // variant, point and component of the worst error
  // balanced-variant gradient at (ya, yb) = (1, 0) with epsilon = 0; must be
  // exactly (1/k, -k)
  double boundary_d_ya = 0.0;
  double boundary_d_yb = 0.0;
  bool boundary_exact = false;
};

// Central finite-difference audit of the analytic gradients: `trials` random
// points per loss variant (standard product, standard Lukasiewicz, balanced
// with the config's k and epsilon, Xu), implications and disjointness both,
// plus whole combined-loss gradients on random constraint sets, plus the
// balanced boundary-gradient identity. Points are drawn from [0.05, 0.95]
// and redrawn near Lukasiewicz kinks, where the subgradient convention makes
// finite differences meaningless. Componentwise relative error must stay
// below `tolerance` against central differences with the given step.
GradCheckReport run_gradcheck(const LossConfig& cfg, uint64_t trials, uint64_t seed,
                              double tolerance = 1e-5, double fd_step = 1e-6);

}  // namespace ontoloss
