// The feasible set of the unique-information program: all joint
// distributions of (S, Y, Z) sharing the (S,Y) and (S,Z) pair marginals of
// the input. Role groups may span several variables; they are flattened to
// product alphabets first.
#pragma once

#include <string>
#include <vector>

#include "uinfo/joint_dist.hpp"

namespace uinfo {

struct Roles {
  std::vector<std::string> s, y, z;
};

// First three variables of d taken as (S, Y, Z).
Roles default_roles(const JointDist& d);

// Signed four-point move: +1 on (s,y0,z0) and (s,y1,z1), -1 on (s,y0,z1)
// and (s,y1,z0). Preserves both pair marginals.
struct CycleMove {
  int s, y0, y1, z0, z1;
};

struct MarginalPolytope {
  JointDist base;               // input flattened to three role axes (S, Y, Z)
  int ns = 0, ny = 0, nz = 0;
  std::vector<double> pair_sy;  // ns x ny
  std::vector<double> pair_sz;  // ns x nz
  std::vector<double> p_s;      // ns
  std::vector<CycleMove> cycle_basis;  // ns*(ny-1)*(nz-1) moves spanning the affine hull
};

// Marginalizes d onto the role variables and flattens each role group to a
// single product-alphabet axis, in (S, Y, Z) order.
JointDist flatten_roles(const JointDist& d, const Roles& roles);

MarginalPolytope build_polytope(const JointDist& d, const Roles& roles);

// The conditional-independence coupling Q(s,y,z) = P(s) P(y|s) P(z|s);
// always a member of the polytope.
JointDist feasible_point(const MarginalPolytope& poly);

// Largest absolute deviation of q's pair marginals from the polytope's.
double membership_residual(const MarginalPolytope& poly, const JointDist& q);
bool contains(const MarginalPolytope& poly, const JointDist& q, double tol = 1e-9);

}  // namespace uinfo
