// Decides the degradation (Blackwell) order Z >=_S Y: existence of a
// stochastic matrix lambda(y|z) with sum_z P(s,z) lambda(y|z) = P(s,y). The
// decision is a linear program minimizing the L1 mismatch; optimum 0 means
// dominance, and the optimizer is the witness channel.
#pragma once

#include <optional>

#include "uinfo/joint_dist.hpp"
#include "uinfo/polytope.hpp"
#include "uinfo/ui_solver.hpp"

namespace uinfo {

struct DominanceVerdict {
  bool dominates = false;
  std::optional<Channel> witness;  // Z -> Y', present iff dominates
  double residual = 0.0;           // L1 infeasibility of the best channel found
};

inline constexpr double kDominanceResidualTol = 1e-7;

DominanceVerdict blackwell_dominates(const JointDist& d, const Roles& roles);

// UI vanishes iff Z >=_S Y; returns whether the solver certificate and the
// LP agree, i.e. (ui - gap <= 1e-8) == dominates. Disagreement indicates a
// solver bug.
bool cross_check_ui(const JointDist& d, const Roles& roles, const UiOptions& opts = {});

}  // namespace uinfo
