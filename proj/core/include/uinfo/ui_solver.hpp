// Solves  UI(S;Y\Z) = min_{Q in Delta_P} I_Q(S;Y|Z)  by Frank-Wolfe over the
// marginal polytope, with each linear subproblem solved exactly per s-slice
// as a transportation LP. The linearization minimum gives a certified
// optimality gap: ui - gap <= true optimum <= ui. A second, algorithmically
// independent method (adaptive-step descent on the cycle-basis coordinates)
// serves as a cross-check oracle.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uinfo/joint_dist.hpp"
#include "uinfo/polytope.hpp"

namespace uinfo {

struct UiOptions {
  double tolerance = 1e-6;   // target certified gap, bits
  int max_iterations = 10000;
  int line_search_steps = 20;  // bisection steps of the exact line search
  bool away_steps = true;      // plain FW zigzags on boundary optima
  int oracle_starts = 16;
  int oracle_max_sweeps = 500;
  std::uint64_t seed = 1;
};

struct DecompositionResult {
  double ui = 0.0;
  double si = 0.0;  // I(S;Y) - ui
  double ci = 0.0;  // I(S;Y|Z) - ui
  JointDist q_star;
  double gap = 0.0;  // certified: ui - gap <= min <= ui (trivial 0-bound for the oracle)
  int iterations = 0;
  std::string method;
  bool converged = true;
};

DecompositionResult compute_ui(const JointDist& d, const Roles& roles,
                               const UiOptions& opts = {});

// Multi-start adaptive-step coordinate descent on the cycle basis; returns
// the best feasible value found. Shares no code path with the LP/FW route.
DecompositionResult compute_ui_oracle(const JointDist& d, const Roles& roles,
                                      const UiOptions& opts = {});

// |I(S;Y) + UI(S;Z\Y) - I(S;Z) - UI(S;Y\Z)|; bounded by the two solver gaps
// plus arithmetic slack.
double consistency_residual(const JointDist& d, const Roles& roles,
                            const UiOptions& opts = {});

JointDist min_synergy_distribution(const JointDist& d, const Roles& roles,
                                   const UiOptions& opts = {});

// Exposed for verification: the objective I_q(S;Y|Z) in bits for a raw array
// over the polytope's (s,y,z) cells, and its gradient evaluated on q mixed
// with 1e-12 uniform (the objective itself is never smoothed).
double ui_objective(const MarginalPolytope& poly, const std::vector<double>& q);
std::vector<double> ui_gradient(const MarginalPolytope& poly, const std::vector<double>& q);

}  // namespace uinfo
