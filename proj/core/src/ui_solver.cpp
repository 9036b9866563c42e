#include "uinfo/ui_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uinfo/random.hpp"
#include "uinfo/simplex.hpp"

namespace uinfo {

namespace {

constexpr double kSmoothing = 1e-12;

struct Marginals {
  std::vector<double> qz, qsz, qyz;
};

void accumulate(const MarginalPolytope& poly, const std::vector<double>& q, Marginals& m) {
  m.qz.assign(poly.nz, 0.0);
  m.qsz.assign(static_cast<std::size_t>(poly.ns) * poly.nz, 0.0);
  m.qyz.assign(static_cast<std::size_t>(poly.ny) * poly.nz, 0.0);
  std::size_t i = 0;
  for (int s = 0; s < poly.ns; ++s)
    for (int y = 0; y < poly.ny; ++y)
      for (int z = 0; z < poly.nz; ++z, ++i) {
        const double v = q[i];
        m.qz[z] += v;
        m.qsz[static_cast<std::size_t>(s) * poly.nz + z] += v;
        m.qyz[static_cast<std::size_t>(y) * poly.nz + z] += v;
      }
}

double objective_impl(const MarginalPolytope& poly, const std::vector<double>& q) {
  Marginals m;
  accumulate(poly, q, m);
  double f = 0.0;
  std::size_t i = 0;
  for (int s = 0; s < poly.ns; ++s)
    for (int y = 0; y < poly.ny; ++y)
      for (int z = 0; z < poly.nz; ++z, ++i) {
        const double v = q[i];
        if (v <= kStructuralZero) continue;
        f += v * std::log2(v * m.qz[z] /
                           (m.qsz[static_cast<std::size_t>(s) * poly.nz + z] *
                            m.qyz[static_cast<std::size_t>(y) * poly.nz + z]));
      }
  return f;
}

std::vector<double> smoothed(const std::vector<double>& q) {
  std::vector<double> out(q.size());
  const double u = kSmoothing / static_cast<double>(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = (1.0 - kSmoothing) * q[i] + u;
  return out;
}

std::vector<double> gradient_impl(const MarginalPolytope& poly, const std::vector<double>& q) {
  const std::vector<double> qs = smoothed(q);
  Marginals m;
  accumulate(poly, qs, m);
  std::vector<double> g(qs.size());
  std::size_t i = 0;
  for (int s = 0; s < poly.ns; ++s)
    for (int y = 0; y < poly.ny; ++y)
      for (int z = 0; z < poly.nz; ++z, ++i)
        g[i] = std::log2(qs[i] * m.qz[z] /
                         (m.qsz[static_cast<std::size_t>(s) * poly.nz + z] *
                          m.qyz[static_cast<std::size_t>(y) * poly.nz + z]));
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Linear minimization over the polytope: independent transportation LP per
// s-slice (row sums from pair_sy, column sums from pair_sz).
std::vector<double> linear_minimizer(const MarginalPolytope& poly, const std::vector<double>& g) {
  std::vector<double> v(g.size(), 0.0);
  const std::size_t slice = static_cast<std::size_t>(poly.ny) * poly.nz;
  for (int s = 0; s < poly.ns; ++s) {
    if (poly.p_s[s] <= kStructuralZero) continue;
    const std::size_t off = static_cast<std::size_t>(s) * slice;
    std::vector<double> cost(g.begin() + off, g.begin() + off + slice);
    std::vector<double> rows(poly.pair_sy.begin() + static_cast<std::size_t>(s) * poly.ny,
                             poly.pair_sy.begin() + static_cast<std::size_t>(s + 1) * poly.ny);
    std::vector<double> cols(poly.pair_sz.begin() + static_cast<std::size_t>(s) * poly.nz,
                             poly.pair_sz.begin() + static_cast<std::size_t>(s + 1) * poly.nz);
    const std::vector<double> x = solve_transportation(poly.ny, poly.nz, cost, rows, cols);
    std::copy(x.begin(), x.end(), v.begin() + off);
  }
  return v;
}

// Derivative of t -> f(base + t*dir) at t, with the gradient-side smoothing.
double direction_derivative(const MarginalPolytope& poly, const std::vector<double>& base,
                            const std::vector<double>& dir, double t) {
  std::vector<double> p(base.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, base[i] + t * dir[i]);
  const std::vector<double> g = gradient_impl(poly, p);
  return dot(g, dir);
}

// Exact line search on the convex restriction h(t) = f(base + t*dir),
// t in [0, tmax], by bisection on h'.
double line_search(const MarginalPolytope& poly, const std::vector<double>& base,
                   const std::vector<double>& dir, double tmax, int steps) {
  if (direction_derivative(poly, base, dir, 0.0) >= 0.0) return 0.0;
  if (direction_derivative(poly, base, dir, tmax) <= 0.0) return tmax;
  double lo = 0.0, hi = tmax;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (direction_derivative(poly, base, dir, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Atom {
  std::vector<double> point;
  double weight;
};

DecompositionResult finish(const MarginalPolytope& poly, std::vector<double> q, double gap,
                           int iterations, std::string method, bool converged) {
  const double ui = objective_impl(poly, q);
  const auto& vars = poly.base.variables();
  const double isy = cmi(poly.base, {vars[0].name}, {vars[1].name});
  const double isy_given_z = cmi(poly.base, {vars[0].name}, {vars[1].name}, {vars[2].name});
  JointDist q_star = JointDist::unchecked(std::vector<Variable>(vars), std::move(q));
  return DecompositionResult{ui,
                             isy - ui,
                             isy_given_z - ui,
                             std::move(q_star),
                             std::max(0.0, gap),
                             iterations,
                             std::move(method),
                             converged};
}

}  // namespace

double ui_objective(const MarginalPolytope& poly, const std::vector<double>& q) {
  return objective_impl(poly, q);
}

std::vector<double> ui_gradient(const MarginalPolytope& poly, const std::vector<double>& q) {
  return gradient_impl(poly, q);
}

DecompositionResult compute_ui(const JointDist& d, const Roles& roles, const UiOptions& opts) {
  if (opts.tolerance <= 0.0) throw std::invalid_argument("compute_ui: tolerance must be positive");
  const MarginalPolytope poly = build_polytope(d, roles);

  std::vector<Atom> atoms;
  atoms.push_back({feasible_point(poly).probs(), 1.0});
  std::vector<double> q = atoms[0].point;
  double f = objective_impl(poly, q);
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  int stalls = 0;

  auto rebuild_iterate = [&]() {
    std::erase_if(atoms, [](const Atom& a) { return a.weight <= 1e-15; });
    double wsum = 0.0;
    for (const auto& a : atoms) wsum += a.weight;
    std::fill(q.begin(), q.end(), 0.0);
    for (auto& a : atoms) {
      a.weight /= wsum;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += a.weight * a.point[i];
    }
  };

  while (iterations < opts.max_iterations) {
    ++iterations;
    const std::vector<double> g = gradient_impl(poly, q);
    const std::vector<double> v = linear_minimizer(poly, g);
    const double gq = dot(g, q);
    gap = gq - dot(g, v);
    if (gap <= opts.tolerance) {
      converged = true;
      break;
    }

    // Pick the steeper of the FW direction and the away direction.
    bool away = false;
    std::size_t away_idx = 0;
    double slope_fw = -gap;
    double slope_aw = 0.0;
    if (opts.away_steps && atoms.size() > 1) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double val = dot(g, atoms[i].point);
        if (val > best + 1e-15) {
          best = val;
          away_idx = i;
        }
      }
      slope_aw = gq - best;
      const double w = atoms[away_idx].weight;
      if (slope_aw < slope_fw && w < 1.0 - 1e-12) away = true;
    }

    std::vector<double> dir(q.size());
    double tmax;
    if (away) {
      for (std::size_t i = 0; i < q.size(); ++i) dir[i] = q[i] - atoms[away_idx].point[i];
      tmax = atoms[away_idx].weight / (1.0 - atoms[away_idx].weight);
    } else {
      for (std::size_t i = 0; i < q.size(); ++i) dir[i] = v[i] - q[i];
      tmax = 1.0;
    }

    // The bisection step is accepted only if the (unsmoothed) objective
    // actually decreases; near-boundary curvature can make the final
    // midpoint overshoot when the remaining descent is tiny.
    double t = line_search(poly, q, dir, tmax, opts.line_search_steps);
    {
      std::vector<double> trial(q.size());
      while (t > 1e-18) {
        for (std::size_t i = 0; i < q.size(); ++i)
          trial[i] = std::max(0.0, q[i] + t * dir[i]);
        if (objective_impl(poly, trial) <= f + 1e-15) break;
        t *= 0.5;
      }
      if (t <= 1e-18) t = 0.0;
    }
    if (t <= 0.0) {
      if (++stalls >= 2) break;  // no further certified progress possible
      continue;
    }
    stalls = 0;

    if (away) {
      for (auto& a : atoms) a.weight *= (1.0 + t);
      atoms[away_idx].weight -= t;
    } else {
      for (auto& a : atoms) a.weight *= (1.0 - t);
      std::size_t idx = atoms.size();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        double diff = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) diff = std::max(diff, std::abs(atoms[i].point[j] - v[j]));
        if (diff <= 1e-12) { idx = i; break; }
      }
      if (idx == atoms.size())
        atoms.push_back({v, t});
      else
        atoms[idx].weight += t;
    }
    rebuild_iterate();

    // Monotone-descent invariant, with arithmetic slack for the weight
    // bookkeeping (atoms below 1e-15 weight are dropped on rebuild).
    const double fnew = objective_impl(poly, q);
    if (fnew > f + 1e-12)
      throw std::logic_error("compute_ui: objective increased during descent");
    f = fnew;
  }

  // Honest certificate at the returned point.
  {
    const std::vector<double> g = gradient_impl(poly, q);
    const std::vector<double> v = linear_minimizer(poly, g);
    gap = std::max(0.0, dot(g, q) - dot(g, v));
    if (gap <= opts.tolerance) converged = true;
  }
  return finish(poly, std::move(q), gap, iterations, "frank_wolfe", converged);
}

namespace {

// Feasible signed range of the coordinate along one cycle move.
void move_range(const MarginalPolytope& poly, const std::vector<double>& q, const CycleMove& mv,
                double& lo, double& hi) {
  const auto at = [&](int y, int z) -> double {
    return q[(static_cast<std::size_t>(mv.s) * poly.ny + y) * poly.nz + z];
  };
  hi = std::min(at(mv.y0, mv.z1), at(mv.y1, mv.z0));
  lo = -std::min(at(mv.y0, mv.z0), at(mv.y1, mv.z1));
}

void apply_move(const MarginalPolytope& poly, std::vector<double>& q, const CycleMove& mv,
                double t) {
  const auto idx = [&](int y, int z) {
    return (static_cast<std::size_t>(mv.s) * poly.ny + y) * poly.nz + z;
  };
  q[idx(mv.y0, mv.z0)] = std::max(0.0, q[idx(mv.y0, mv.z0)] + t);
  q[idx(mv.y1, mv.z1)] = std::max(0.0, q[idx(mv.y1, mv.z1)] + t);
  q[idx(mv.y0, mv.z1)] = std::max(0.0, q[idx(mv.y0, mv.z1)] - t);
  q[idx(mv.y1, mv.z0)] = std::max(0.0, q[idx(mv.y1, mv.z0)] - t);
}

// Adaptive pattern search for the 1-D convex restriction along one move:
// step doubles on improvement and halves otherwise, until it collapses.
double descend_coordinate(const MarginalPolytope& poly, std::vector<double>& q,
                          const CycleMove& mv, double f_current) {
  double lo, hi;
  move_range(poly, q, mv, lo, hi);
  if (hi - lo < 1e-14) return f_current;

  double t = 0.0;
  double step = 0.25 * (hi - lo);
  double f_best = f_current;
  std::vector<double> trial(q.size());
  while (step > 1e-14) {
    bool improved = false;
    for (const double cand : {t + step, t - step}) {
      const double c = std::clamp(cand, lo, hi);
      if (c == t) continue;
      trial = q;
      apply_move(poly, trial, mv, c);
      const double fc = objective_impl(poly, trial);
      if (fc < f_best - 1e-15) {
        f_best = fc;
        t = c;
        improved = true;
        break;
      }
    }
    if (improved)
      step = std::min(2.0 * step, hi - lo);
    else
      step *= 0.5;
  }
  if (t != 0.0) apply_move(poly, q, mv, t);
  return f_best;
}

}  // namespace

DecompositionResult compute_ui_oracle(const JointDist& d, const Roles& roles,
                                      const UiOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::vector<double> start = feasible_point(poly).probs();

  std::vector<double> best_q = start;
  double best_f = objective_impl(poly, best_q);
  int total_sweeps = 0;

  for (int s = 0; s < std::max(1, opts.oracle_starts); ++s) {
    std::vector<double> q = start;
    if (s > 0) {
      // Random interior perturbation along the cycle basis.
      Rng rng(opts.seed * 1000003u + static_cast<std::uint64_t>(s));
      for (const auto& mv : poly.cycle_basis) {
        double lo, hi;
        move_range(poly, q, mv, lo, hi);
        if (hi - lo < 1e-14) continue;
        apply_move(poly, q, mv, 0.5 * rng.uniform(lo, hi));
      }
    }
    double f = objective_impl(poly, q);
    for (int sweep = 0; sweep < opts.oracle_max_sweeps; ++sweep) {
      ++total_sweeps;
      const double f_before = f;
      for (const auto& mv : poly.cycle_basis) f = descend_coordinate(poly, q, mv, f);
      if (f_before - f < 1e-14) break;
    }
    if (f < best_f - 1e-15) {
      best_f = f;
      best_q = q;
    }
  }
  // No linearization certificate on this route; only the trivial bound
  // optimum >= 0 is claimed.
  return finish(poly, std::move(best_q), best_f, total_sweeps, "cycle_descent", true);
}

double consistency_residual(const JointDist& d, const Roles& roles, const UiOptions& opts) {
  const DecompositionResult yz = compute_ui(d, roles, opts);
  const DecompositionResult zy = compute_ui(d, Roles{roles.s, roles.z, roles.y}, opts);
  const JointDist base = flatten_roles(d, roles);
  const auto& vars = base.variables();
  const double isy = cmi(base, {vars[0].name}, {vars[1].name});
  const double isz = cmi(base, {vars[0].name}, {vars[2].name});
  return std::abs(isy + zy.ui - isz - yz.ui);
}

JointDist min_synergy_distribution(const JointDist& d, const Roles& roles, const UiOptions& opts) {
  return compute_ui(d, roles, opts).q_star;
}

}  // namespace uinfo
