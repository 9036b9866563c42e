#include "uinfo/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace uinfo {

namespace {

std::string joined_name(const JointDist& d, const std::vector<std::string>& group) {
  std::string name = group.front();
  for (std::size_t i = 1; i < group.size(); ++i) name += "*" + group[i];
  (void)d;
  return name;
}

int group_size(const JointDist& d, const std::vector<std::string>& group) {
  long long n = 1;
  for (const auto& v : group) n *= d.size_of(v);
  return static_cast<int>(n);
}

}  // namespace

Roles default_roles(const JointDist& d) {
  if (d.dim() < 3) throw std::invalid_argument("default_roles: need at least three variables");
  return Roles{{d.variables()[0].name}, {d.variables()[1].name}, {d.variables()[2].name}};
}

JointDist flatten_roles(const JointDist& d, const Roles& roles) {
  if (roles.s.empty() || roles.y.empty() || roles.z.empty())
    throw std::invalid_argument("flatten_roles: every role must be nonempty");
  std::set<std::string> seen;
  std::vector<std::string> order;
  for (const auto* group : {&roles.s, &roles.y, &roles.z}) {
    for (const auto& name : *group) {
      d.index_of(name);  // existence check
      if (!seen.insert(name).second)
        throw std::invalid_argument("flatten_roles: roles overlap at '" + name + "'");
      order.push_back(name);
    }
  }
  JointDist m = marginal(d, order);
  m = permute_variables(m, order);
  // Adjacent role axes flatten into one axis without moving data.
  std::vector<Variable> flat{{joined_name(d, roles.s), group_size(d, roles.s)},
                             {joined_name(d, roles.y), group_size(d, roles.y)},
                             {joined_name(d, roles.z), group_size(d, roles.z)}};
  return JointDist::unchecked(std::move(flat), std::vector<double>(m.probs()));
}

MarginalPolytope build_polytope(const JointDist& d, const Roles& roles) {
  MarginalPolytope poly{flatten_roles(d, roles)};
  poly.ns = poly.base.variables()[0].size;
  poly.ny = poly.base.variables()[1].size;
  poly.nz = poly.base.variables()[2].size;
  poly.pair_sy.assign(static_cast<std::size_t>(poly.ns) * poly.ny, 0.0);
  poly.pair_sz.assign(static_cast<std::size_t>(poly.ns) * poly.nz, 0.0);
  poly.p_s.assign(poly.ns, 0.0);
  const auto& p = poly.base.probs();
  for (int s = 0; s < poly.ns; ++s)
    for (int y = 0; y < poly.ny; ++y)
      for (int z = 0; z < poly.nz; ++z) {
        const double v = p[(static_cast<std::size_t>(s) * poly.ny + y) * poly.nz + z];
        poly.pair_sy[static_cast<std::size_t>(s) * poly.ny + y] += v;
        poly.pair_sz[static_cast<std::size_t>(s) * poly.nz + z] += v;
        poly.p_s[s] += v;
      }
  for (int s = 0; s < poly.ns; ++s)
    for (int y1 = 1; y1 < poly.ny; ++y1)
      for (int z1 = 1; z1 < poly.nz; ++z1)
        poly.cycle_basis.push_back({s, 0, y1, 0, z1});
  return poly;
}

JointDist feasible_point(const MarginalPolytope& poly) {
  std::vector<double> q(poly.base.cells(), 0.0);
  for (int s = 0; s < poly.ns; ++s) {
    if (poly.p_s[s] <= kStructuralZero) continue;
    for (int y = 0; y < poly.ny; ++y) {
      const double psy = poly.pair_sy[static_cast<std::size_t>(s) * poly.ny + y];
      if (psy == 0.0) continue;
      for (int z = 0; z < poly.nz; ++z)
        q[(static_cast<std::size_t>(s) * poly.ny + y) * poly.nz + z] =
            psy * poly.pair_sz[static_cast<std::size_t>(s) * poly.nz + z] / poly.p_s[s];
    }
  }
  return JointDist::unchecked(std::vector<Variable>(poly.base.variables()), std::move(q));
}

double membership_residual(const MarginalPolytope& poly, const JointDist& q) {
  if (q.dim() != 3 || q.variables()[0].size != poly.ns || q.variables()[1].size != poly.ny ||
      q.variables()[2].size != poly.nz)
    throw std::invalid_argument("membership_residual: layout mismatch with polytope");
  std::vector<double> msy(poly.pair_sy.size(), 0.0), msz(poly.pair_sz.size(), 0.0);
  const auto& p = q.probs();
  for (int s = 0; s < poly.ns; ++s)
    for (int y = 0; y < poly.ny; ++y)
      for (int z = 0; z < poly.nz; ++z) {
        const double v = p[(static_cast<std::size_t>(s) * poly.ny + y) * poly.nz + z];
        msy[static_cast<std::size_t>(s) * poly.ny + y] += v;
        msz[static_cast<std::size_t>(s) * poly.nz + z] += v;
      }
  double r = 0.0;
  for (std::size_t i = 0; i < msy.size(); ++i) r = std::max(r, std::abs(msy[i] - poly.pair_sy[i]));
  for (std::size_t i = 0; i < msz.size(); ++i) r = std::max(r, std::abs(msz[i] - poly.pair_sz[i]));
  return r;
}

bool contains(const MarginalPolytope& poly, const JointDist& q, double tol) {
  return membership_residual(poly, q) <= tol;
}

}  // namespace uinfo
