#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "uinfo/fixtures.hpp"
#include "uinfo/polytope.hpp"
#include "uinfo/random.hpp"

using namespace uinfo;

TEST_CASE("cycle basis has dimension |S|(|Y|-1)(|Z|-1)") {
  const MarginalPolytope p2 =
      build_polytope(random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 1), Roles{{"X0"}, {"X1"}, {"X2"}});
  CHECK(p2.cycle_basis.size() == 2);

  const MarginalPolytope p3 =
      build_polytope(random_dirichlet(std::vector<int>{3, 3, 3}, 1.0, 2), Roles{{"X0"}, {"X1"}, {"X2"}});
  CHECK(p3.cycle_basis.size() == 12);
}

TEST_CASE("membership of the conditional-independence coupling") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 3, 2}, 1.0, seed);
    const MarginalPolytope poly = build_polytope(d, Roles{{"X0"}, {"X1"}, {"X2"}});
    CHECK(contains(poly, feasible_point(poly)));
    CHECK(contains(poly, poly.base));  // the input itself is a member
  }
}

TEST_CASE("feasible point on the fixtures") {
  const MarginalPolytope px = build_polytope(xor_distribution(), Roles{{"S"}, {"Y"}, {"Z"}});
  const JointDist qx = feasible_point(px);
  for (double p : qx.probs()) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));

  const MarginalPolytope pp = build_polytope(perfect_secret_bit(), Roles{{"S"}, {"Y"}, {"Z"}});
  CHECK(l1_distance(feasible_point(pp), pp.base) < 1e-12);
}

TEST_CASE("basis moves keep an interior point inside the polytope") {
  const JointDist d = random_dirichlet(std::vector<int>{3, 2, 3}, 1.0, 17);
  const MarginalPolytope poly = build_polytope(d, Roles{{"X0"}, {"X1"}, {"X2"}});
  const JointDist q0 = feasible_point(poly);
  double min_entry = 1.0;
  for (double p : q0.probs()) min_entry = std::min(min_entry, p);
  REQUIRE(min_entry > 0.0);

  const double eps = 0.5 * min_entry;
  for (const CycleMove& mv : poly.cycle_basis) {
    std::vector<double> q = q0.probs();
    const auto idx = [&](int y, int z) {
      return (static_cast<std::size_t>(mv.s) * poly.ny + y) * poly.nz + z;
    };
    q[idx(mv.y0, mv.z0)] += eps;
    q[idx(mv.y1, mv.z1)] += eps;
    q[idx(mv.y0, mv.z1)] -= eps;
    q[idx(mv.y1, mv.z0)] -= eps;
    for (double p : q) CHECK(p >= 0.0);
    const JointDist moved = JointDist::unchecked(std::vector<Variable>(q0.variables()), std::move(q));
    CHECK(contains(poly, moved));
  }
}

TEST_CASE("role flattening to product alphabets") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2, 3}, 1.0, 5);
  const JointDist flat = flatten_roles(d, Roles{{"X0", "X1"}, {"X2"}, {"X3"}});
  REQUIRE(flat.dim() == 3);
  CHECK(flat.variables()[0].size == 4);
  CHECK(flat.variables()[1].size == 2);
  CHECK(flat.variables()[2].size == 3);
  CHECK(flat.variables()[0].name == "X0*X1");

  CHECK_THROWS_AS(flatten_roles(d, Roles{{"X0"}, {"X0"}, {"X2"}}), std::invalid_argument);
  CHECK_THROWS_AS(flatten_roles(d, Roles{{"X0"}, {}, {"X2"}}), std::invalid_argument);
}

TEST_CASE("membership residual detects non-members") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 3);
  const MarginalPolytope poly = build_polytope(d, Roles{{"X0"}, {"X1"}, {"X2"}});
  const JointDist other = random_dirichlet(
      std::vector<Variable>{{"X0", 2}, {"X1", 2}, {"X2", 2}}, 1.0, 999);
  CHECK(membership_residual(poly, other) > 1e-3);
}
