// Secret-key-rate bounds with honest estimate directions: maximizations
// return values achieved by an explicit strategy (lower estimates), and
// minimizations return values achieved by an explicit channel (upper
// estimates). None of the nonconvex searches claim global optimality; the
// chain inequalities that must hold regardless are enforced structurally by
// candidate channels that are always evaluated.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uinfo/joint_dist.hpp"
#include "uinfo/polytope.hpp"
#include "uinfo/ui_solver.hpp"

namespace uinfo {

struct BoundsOptions {
  int restarts = 20;
  int max_steps = 2000;        // gradient steps per restart
  double step_tol = 1e-9;      // termination: step size below this
  std::uint64_t seed = 1;
  int zprime_cap = 0;          // |Z'| for B1/B_gUI/B_sUI; 0 means |S||Y||Z|
  int max_evals = 2000;        // outer budget for the nested (UI-inside) bounds
  double outer_step_min = 0.02;  // logit step at which the outer search stops
  UiOptions ui;                // inner UI solver options
};

struct OneWayResult {
  double value = 0.0;
  Channel u_given_s;  // |U| = |S|^2
  Channel v_given_u;  // |V| = |S|
  bool converged = true;
};

struct ChannelBound {
  double value = 0.0;
  Channel witness;
  bool converged = true;
  std::string flag;  // "", "iteration_cap", "budget_exhausted", "heuristic"
};

// Best achievable value of I(U;Y|V) - I(U;Z|V) over P_{U|S}, P_{V|U} with
// V-U-S-YZ Markov; a certified lower estimate of the one-way key rate.
OneWayResult one_way_rate(const JointDist& d, const Roles& roles,
                          const BoundsOptions& opts = {});

// min_{P_{Z'|Z}} I(S;Y|Z') with |Z'| = |Z|; the identity and constant
// channels are always candidates, so the value never exceeds
// min{I(S;Y|Z), I(S;Y)}.
ChannelBound intrinsic_information(const JointDist& d, const Roles& roles,
                                   const BoundsOptions& opts = {});

// min_{P_{Z'|SYZ}} I(S;Y|Z') + I(SY;Z'|Z) with |Z'| = |S||Y||Z|; warm-started
// from the intrinsic-information witness, so the value never exceeds it.
ChannelBound minimum_intrinsic_information_b1(const JointDist& d, const Roles& roles,
                                              const BoundsOptions& opts = {});

// min I(S;Y|Z') + UI(SY;Z'\Z) and min UI(S;Y\Z') + UI(SY;Z'\Z) over
// P_{Z'|SYZ}; nested optimizations with a gradient-free outer search.
ChannelBound b_gui(const JointDist& d, const Roles& roles, const BoundsOptions& opts = {});
ChannelBound b_sui(const JointDist& d, const Roles& roles, const BoundsOptions& opts = {});

// Bounded-cardinality upper estimate of the reduced intrinsic information:
// min I(S;Y down (Z,U)) + H(U) over P_{U|SYZ} with |U| = u_cap. Flagged
// "heuristic": no cardinality bound for the true infimum is known.
ChannelBound reduced_intrinsic_heuristic(const JointDist& d, const Roles& roles,
                                         int u_cap = 2, const BoundsOptions& opts = {});

struct BoundsReport {
  double one_way_lower = 0.0;
  double ui = 0.0;
  double ui_gap = 0.0;
  double b1_upper = 0.0;
  double b_gui_upper = 0.0;
  double intrinsic_upper = 0.0;
  double cmi = 0.0;
  OneWayResult one_way;        // witnesses U|S, V|U
  ChannelBound intrinsic, b1, bgui;
  DecompositionResult decomposition;
  std::vector<std::string> flags;
};

// Computes the whole chain and verifies its invariants. Hard inequalities
// (one_way <= ui, ui <= b1, structural b1 <= intrinsic <= cmi) throw
// std::logic_error when violated beyond tolerance; soft ones only add flags.
BoundsReport bounds_chain(const JointDist& d, const Roles& roles,
                          const BoundsOptions& opts = {});

// Independent re-evaluation of reported witnesses through the joint-
// distribution route; used to verify that reported values are achieved.
double one_way_objective(const JointDist& d, const Roles& roles, const Channel& u_given_s,
                         const Channel& v_given_u);
double intrinsic_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_z);
double b1_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_syz);
double bgui_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_syz,
                      const UiOptions& opts = {});

// Gradient access for finite-difference verification. Logits are row-major
// per kernel; returns the analytic objective value and fills logit gradients.
double one_way_value_and_logit_grad(const JointDist& d, const Roles& roles,
                                    const std::vector<double>& logits_u,
                                    const std::vector<double>& logits_v,
                                    std::vector<double>* grad_u, std::vector<double>* grad_v);
double intrinsic_value_and_logit_grad(const JointDist& d, const Roles& roles,
                                      const std::vector<double>& logits,
                                      std::vector<double>* grad);
double b1_value_and_logit_grad(const JointDist& d, const Roles& roles,
                               const std::vector<double>& logits, std::vector<double>* grad);

}  // namespace uinfo
