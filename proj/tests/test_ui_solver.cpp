#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "uinfo/fixtures.hpp"
#include "uinfo/polytope.hpp"
#include "uinfo/random.hpp"
#include "uinfo/ui_solver.hpp"

using namespace uinfo;

namespace {

// Test-side oracle, independent of both solver routes: exhaustive grid with
// refinement over the two cycle coordinates of a 2x2x2 instance (the two
// coordinates touch disjoint s-slices, so their feasible ranges decouple).
double brute_force_ui_222(const JointDist& d, const Roles& roles) {
  const MarginalPolytope poly = build_polytope(d, roles);
  REQUIRE(poly.cycle_basis.size() == 2);
  const std::vector<double> q0 = feasible_point(poly).probs();

  const auto idx = [&](int s, int y, int z) {
    return (static_cast<std::size_t>(s) * poly.ny + y) * poly.nz + z;
  };
  const auto range_of = [&](const CycleMove& mv, double& lo, double& hi) {
    hi = std::min(q0[idx(mv.s, mv.y0, mv.z1)], q0[idx(mv.s, mv.y1, mv.z0)]);
    lo = -std::min(q0[idx(mv.s, mv.y0, mv.z0)], q0[idx(mv.s, mv.y1, mv.z1)]);
  };
  const auto value_at = [&](double a, double b) {
    std::vector<double> q = q0;
    const CycleMove& m0 = poly.cycle_basis[0];
    const CycleMove& m1 = poly.cycle_basis[1];
    q[idx(m0.s, m0.y0, m0.z0)] += a;
    q[idx(m0.s, m0.y1, m0.z1)] += a;
    q[idx(m0.s, m0.y0, m0.z1)] -= a;
    q[idx(m0.s, m0.y1, m0.z0)] -= a;
    q[idx(m1.s, m1.y0, m1.z0)] += b;
    q[idx(m1.s, m1.y1, m1.z1)] += b;
    q[idx(m1.s, m1.y0, m1.z1)] -= b;
    q[idx(m1.s, m1.y1, m1.z0)] -= b;
    for (double& v : q) v = std::max(0.0, v);
    return ui_objective(poly, q);
  };

  double lo_a, hi_a, lo_b, hi_b;
  range_of(poly.cycle_basis[0], lo_a, hi_a);
  range_of(poly.cycle_basis[1], lo_b, hi_b);

  double best = 1e300, best_a = 0.0, best_b = 0.0;
  double wa = hi_a - lo_a, wb = hi_b - lo_b;
  double ca = 0.5 * (lo_a + hi_a), cb = 0.5 * (lo_b + hi_b);
  const int n = 120;
  for (int round = 0; round < 4; ++round) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double a = std::clamp(ca - 0.5 * wa + wa * i / n, lo_a, hi_a);
        const double b = std::clamp(cb - 0.5 * wb + wb * j / n, lo_b, hi_b);
        const double f = value_at(a, b);
        if (f < best) {
          best = f;
          best_a = a;
          best_b = b;
        }
      }
    ca = best_a;
    cb = best_b;
    wa *= 4.0 / n;
    wb *= 4.0 / n;
  }
  return best;
}

const Roles kSYZ{{"S"}, {"Y"}, {"Z"}};
const Roles kX012{{"X0"}, {"X1"}, {"X2"}};

}  // namespace

TEST_CASE("perfect secret bit: normalization") {
  const DecompositionResult r = compute_ui(perfect_secret_bit(), kSYZ);
  CHECK(std::abs(r.ui - 1.0) <= 1e-4);
  CHECK(std::abs(r.si) <= 1e-4);
  CHECK(std::abs(r.ci) <= 1e-4);
  CHECK(r.converged);
}

TEST_CASE("xor: no unique information, one bit of synergy") {
  const DecompositionResult r = compute_ui(xor_distribution(), kSYZ);
  CHECK(std::abs(r.ui) <= 1e-6);
  CHECK(std::abs(r.ci - 1.0) <= 1e-4);
  CHECK(std::abs(r.si) <= 1e-4);
  for (double p : r.q_star.probs()) CHECK(p == doctest::Approx(0.125));
}

TEST_CASE("copy Y=Z=S: everything is shared") {
  const DecompositionResult r = compute_ui(copy_distribution(), kSYZ);
  CHECK(std::abs(r.ui) <= 1e-6);
  CHECK(std::abs(r.si - 1.0) <= 1e-4);
}

TEST_CASE("and gate: pair marginals coincide, UI vanishes") {
  // Frozen from the grid oracle: identical (S,Y) and (S,Z) marginals force
  // UI = 0 with SI = I(S;Y) = 3/2 - (3/4)log2(3) and CI = 1/2.
  const double kAndUi = 0.0;
  const double kAndSi = 1.5 - 0.75 * std::log2(3.0);
  const double kAndCi = 0.5;

  const JointDist d = and_distribution();
  CHECK(std::abs(brute_force_ui_222(d, kSYZ) - kAndUi) <= 1e-6);

  const DecompositionResult fw = compute_ui(d, kSYZ);
  const DecompositionResult oracle = compute_ui_oracle(d, kSYZ);
  CHECK(std::abs(fw.ui - kAndUi) <= 1e-6);
  CHECK(std::abs(oracle.ui - kAndUi) <= 1e-6);
  CHECK(std::abs(fw.si - kAndSi) <= 1e-4);
  CHECK(std::abs(fw.ci - kAndCi) <= 1e-4);
}

TEST_CASE("solvers agree with the grid oracle on seeded draws") {
  for (std::uint64_t seed : {11u, 23u, 37u, 58u, 71u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    const double brute = brute_force_ui_222(d, kX012);
    const DecompositionResult fw = compute_ui(d, kX012);
    const DecompositionResult oc = compute_ui_oracle(d, kX012);
    CAPTURE(seed);
    CHECK(std::abs(fw.ui - brute) <= 1e-4);
    CHECK(std::abs(oc.ui - brute) <= 1e-4);
  }
}

TEST_CASE("decomposition result invariants on random draws") {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 3, 2}, 1.0, seed);
    const DecompositionResult r = compute_ui(d, kX012);
    CAPTURE(seed);

    const MarginalPolytope poly = build_polytope(d, kX012);
    CHECK(membership_residual(poly, r.q_star) <= 1e-9);
    CHECK(std::abs(ui_objective(poly, r.q_star.probs()) - r.ui) <= 1e-9);

    const double isy = cmi(d, {"X0"}, {"X1"});
    const double isyz = cmi(d, {"X0"}, {"X1"}, {"X2"});
    const double isz = cmi(d, {"X0"}, {"X2"});
    CHECK(std::abs(r.si - (isy - r.ui)) <= 1e-9);
    CHECK(std::abs(r.ci - (isyz - r.ui)) <= 1e-9);

    // Certificate and the trivial bounds.
    CHECK(r.gap >= 0.0);
    const DecompositionResult oc = compute_ui_oracle(d, kX012);
    CHECK(r.ui - r.gap <= oc.ui + 1e-6);
    const double tol = r.gap + 1e-9;
    CHECK(r.ui >= isy - isz - tol);
    CHECK(r.ui <= std::min(isy, isyz) + tol);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed * 13);
    const MarginalPolytope poly = build_polytope(d, kX012);
    // Interior point: CI coupling of a full-support draw, nudged toward
    // uniform to stay clear of the boundary.
    std::vector<double> q = feasible_point(poly).probs();
    for (double& v : q) v = 0.9 * v + 0.1 / static_cast<double>(q.size());

    const std::vector<double> g = ui_gradient(poly, q);
    const double h = 1e-6;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      std::vector<double> qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const double fd = (ui_objective(poly, qp) - ui_objective(poly, qm)) / (2.0 * h);
      num += (fd - g[i]) * (fd - g[i]);
      den += fd * fd;
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(1.0, std::sqrt(den)));
  }
}

TEST_CASE("consistency condition") {
  CHECK(consistency_residual(xor_distribution(), kSYZ) <= 1e-6);
  CHECK(consistency_residual(perfect_secret_bit(), kSYZ) <= 1e-4);
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    CHECK(consistency_residual(d, kX012) <= 1e-4);
  }
}

TEST_CASE("minimum synergy distribution") {
  const JointDist qx = min_synergy_distribution(xor_distribution(), kSYZ);
  for (double p : qx.probs()) CHECK(p == doctest::Approx(0.125));

  const JointDist qp = min_synergy_distribution(perfect_secret_bit(), kSYZ);
  CHECK(l1_distance(qp, perfect_secret_bit()) <= 1e-9);

  // Re-solving on Q* reproduces its conditional mutual information: the
  // synergy of the minimum-synergy distribution is zero.
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 404);
  const DecompositionResult r = compute_ui(d, kX012);
  const DecompositionResult r2 = compute_ui(r.q_star, default_roles(r.q_star));
  const double ci_qstar = cmi(r.q_star, {"X0"}, {"X1"}, {"X2"}) - r2.ui;
  CHECK(std::abs(ci_qstar) <= r.gap + r2.gap + 1e-6);
  CHECK(std::abs(r2.ui - r.ui) <= r.gap + r2.gap + 1e-4);
}

TEST_CASE("additivity on tensor squares") {
  for (std::uint64_t seed : {5u, 19u, 42u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    const DecompositionResult one = compute_ui(d, kX012);
    const JointDist d2 = tensor_power(d, 2);
    const DecompositionResult two = compute_ui(
        d2, Roles{{"X0_1", "X0_2"}, {"X1_1", "X1_2"}, {"X2_1", "X2_2"}});
    CAPTURE(seed);
    CHECK(std::abs(two.ui - 2.0 * one.ui) <= 2.0 * one.gap + two.gap + 1e-3);
  }
}

TEST_CASE("multi-variable roles flatten into the same solver") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2, 2}, 1.0, 77);
  const DecompositionResult r = compute_ui(d, Roles{{"X0", "X1"}, {"X3"}, {"X2"}});
  CHECK(r.ui >= 0.0);
  CHECK(r.converged);
}

TEST_CASE("iteration cap is flagged with an honest gap") {
  UiOptions opts;
  opts.max_iterations = 1;
  opts.tolerance = 1e-12;
  const JointDist d = random_dirichlet(std::vector<int>{3, 3, 3}, 1.0, 2024);
  const DecompositionResult r = compute_ui(d, kX012, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.gap > 1e-12);
}

TEST_CASE("oracle on xor finds zero") {
  const DecompositionResult r = compute_ui_oracle(xor_distribution(), kSYZ);
  CHECK(std::abs(r.ui) <= 1e-6);
}
