// Numerical verification of every property the unique information is known
// to satisfy, on fixtures and seeded random ensembles. Checks return signed
// slacks (negative beyond tolerance means violation); tolerances are derived
// from the participating solvers' reported gaps plus a fixed 1e-4.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uinfo/bounds.hpp"
#include "uinfo/joint_dist.hpp"
#include "uinfo/polytope.hpp"
#include "uinfo/ui_solver.hpp"

namespace uinfo {

struct Roles4 {
  std::vector<std::string> s, y, z, zp;
};

// UI(S;Y\Z') + UI(S;Z'\Z) - UI(S;Y\Z); contract >= -(gap sum + 1e-4).
double check_triangle(const JointDist& d4, const Roles4& roles, const UiOptions& opts = {},
                      double* gap_sum = nullptr);

// Same with second term UI(SY;Z'\Z) (Alice holding the product SY).
double check_corollary(const JointDist& d4, const Roles4& roles, const UiOptions& opts = {},
                       double* gap_sum = nullptr, double* second_term = nullptr);

struct EveSlack {
  double monotonicity = 0.0;    // UI(S;Y\Z') - UI(S;Y\Z)
  double identity_error = 0.0;  // |UI(S;Y\(Z,Z')) - UI(S;Y\Z)|
  double gap_sum = 0.0;
};
// ch garbles the (flattened) Eve variable, so SY-Z-Z' is Markov by
// construction.
EveSlack check_eve_monotonicity(const JointDist& d, const Roles& roles, const Channel& ch,
                                const UiOptions& opts = {});

// Garbling Alice (or Bob when garble_alice is false) must not increase UI:
// returns UI(S;Y\Z) - UI(garbled) >= -tol.
double check_alice_bob_monotonicity(const JointDist& d, const Roles& roles, const Channel& ch,
                                    bool garble_alice, const UiOptions& opts = {},
                                    double* gap_sum = nullptr);

// f maps S-symbols onto [0, f_range); announcing f(S) publicly must not
// increase UI: returns UI(S;Y\Z) - UI((S,F);(Y,F)\(Z,F)) >= -tol.
double check_public_communication(const JointDist& d, const Roles& roles,
                                  const std::vector<int>& f, int f_range,
                                  const UiOptions& opts = {}, double* gap_sum = nullptr);

// UI(S;Y\(Z,U)) - UI(S;Y\Z) + H(U) >= -tol: revealing U to Eve cannot reduce
// UI by more than H(U).
double check_locking(const JointDist& d4, const Roles& roles, const std::vector<std::string>& u,
                     const UiOptions& opts = {}, double* gap_sum = nullptr);

// |UI(d tensor n) - n UI(d)|; contract <= n gap + 1e-3.
double check_additivity(const JointDist& d, const Roles& roles, int n = 2,
                        const UiOptions& opts = {}, double* gap_sum = nullptr);

struct CollapseCheck {
  double squeeze_width = 0.0;  // b1(Q*) - UI(Q*)
  double ui_cmi_gap = 0.0;     // |UI(Q*) - I_{Q*}(S;Y|Z)|
  double gap_sum = 0.0;
};
// At the minimum-synergy distribution the upper-bound chain collapses onto
// the UI and the conditional mutual information.
CollapseCheck check_collapse_at_qstar(const JointDist& d, const Roles& roles,
                                      const BoundsOptions& opts = {});

struct PropertyReport {
  std::string property_id;
  int instances = 0;
  int violations = 0;
  double worst_slack = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> violating_seeds;
  std::string note;
};

struct EnsembleSpec {
  std::string id;  // P1..P9, PROP1, COR1, THM4, LOCK, COLLAPSE
  int draws = 100;
  std::vector<std::vector<int>> shapes{{2, 2, 2}, {3, 3, 2}};
  std::uint64_t seed = 20240801;
  double concentration = 1.0;
};

struct SuiteConfig {
  std::vector<EnsembleSpec> ensembles;
  UiOptions ui;
  BoundsOptions bounds;
};

// 100 draws per property at shapes 2x2x2 and 3x3x2 (4-variable properties
// use 2x2x2x2), with light bound-search budgets.
SuiteConfig default_suite_config();

// Runs every configured ensemble; deterministic given the config, aggregates
// failures instead of aborting, and returns reports sorted by (id, seed).
std::vector<PropertyReport> run_suite(const SuiteConfig& config);

}  // namespace uinfo
