#include "uinfo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "uinfo/random.hpp"

namespace uinfo {

namespace {

constexpr double kLogitClip = 40.0;
constexpr double kTiny = 1e-300;

void clip_logits(std::vector<double>& l) {
  for (double& v : l) v = std::clamp(v, -kLogitClip, kLogitClip);
}

std::vector<double> softmax_rows(const std::vector<double>& logits, std::size_t rows,
                                 std::size_t cols) {
  std::vector<double> k(logits.size());
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = -1e300;
    for (std::size_t c = 0; c < cols; ++c) mx = std::max(mx, logits[r * cols + c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      k[r * cols + c] = std::exp(logits[r * cols + c] - mx);
      sum += k[r * cols + c];
    }
    for (std::size_t c = 0; c < cols; ++c) k[r * cols + c] /= sum;
  }
  return k;
}

std::vector<double> logits_from_kernel(const std::vector<double>& kernel) {
  std::vector<double> l(kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) l[i] = std::log(std::max(kernel[i], 1e-11));
  return l;
}

// d(objective)/d(logit) from d(objective)/d(kernel) through row softmax.
std::vector<double> chain_softmax(const std::vector<double>& kernel, const std::vector<double>& gk,
                                  std::size_t rows, std::size_t cols) {
  std::vector<double> gl(kernel.size());
  for (std::size_t r = 0; r < rows; ++r) {
    double avg = 0.0;
    for (std::size_t c = 0; c < cols; ++c) avg += kernel[r * cols + c] * gk[r * cols + c];
    for (std::size_t c = 0; c < cols; ++c)
      gl[r * cols + c] = kernel[r * cols + c] * (gk[r * cols + c] - avg);
  }
  return gl;
}

// ============================ objective kernels ============================

// One-way strategy value I(U;Y|V) - I(U;Z|V) from the pair marginals only.
// A is ns x nu (rows P(.|s)), B is nu x nv.
double eval_one_way(const MarginalPolytope& poly, std::size_t nu, std::size_t nv,
                    const std::vector<double>& A, const std::vector<double>& B,
                    std::vector<double>* gA, std::vector<double>* gB) {
  const std::size_t ns = poly.ns, ny = poly.ny, nz = poly.nz;
  std::vector<double> M1(nu * ny, 0.0), M2(nu * nz, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t u = 0; u < nu; ++u) {
      const double a = A[s * nu + u];
      if (a == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) M1[u * ny + y] += poly.pair_sy[s * ny + y] * a;
      for (std::size_t z = 0; z < nz; ++z) M2[u * nz + z] += poly.pair_sz[s * nz + z] * a;
    }

  std::vector<double> T1(nu * nv * ny), T2(nu * nv * nz);
  std::vector<double> T1vy(nv * ny, 0.0), T2vz(nv * nz, 0.0);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v) {
      const double b = B[u * nv + v];
      for (std::size_t y = 0; y < ny; ++y) {
        const double t = b * M1[u * ny + y];
        T1[(u * nv + v) * ny + y] = t;
        T1vy[v * ny + y] += t;
      }
      for (std::size_t z = 0; z < nz; ++z) {
        const double t = b * M2[u * nz + z];
        T2[(u * nv + v) * nz + z] = t;
        T2vz[v * nz + z] += t;
      }
    }

  // F = H(U|VZ) - H(U|VY) = sum T1*L1 - sum T2*L2 with L = log2(T/T_marg).
  std::vector<double> L1(T1.size(), 0.0), L2(T2.size(), 0.0);
  double f = 0.0;
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t y = 0; y < ny; ++y) {
        const std::size_t i = (u * nv + v) * ny + y;
        if (T1[i] > kStructuralZero && T1vy[v * ny + y] > kTiny) {
          L1[i] = std::log2(T1[i] / T1vy[v * ny + y]);
          f += T1[i] * L1[i];
        }
      }
      for (std::size_t z = 0; z < nz; ++z) {
        const std::size_t i = (u * nv + v) * nz + z;
        if (T2[i] > kStructuralZero && T2vz[v * nz + z] > kTiny) {
          L2[i] = std::log2(T2[i] / T2vz[v * nz + z]);
          f -= T2[i] * L2[i];
        }
      }
    }

  if (gA) {
    gA->assign(A.size(), 0.0);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t u = 0; u < nu; ++u) {
        double acc = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
          const double b = B[u * nv + v];
          if (b == 0.0) continue;
          double inner = 0.0;
          for (std::size_t y = 0; y < ny; ++y)
            inner += poly.pair_sy[s * ny + y] * L1[(u * nv + v) * ny + y];
          for (std::size_t z = 0; z < nz; ++z)
            inner -= poly.pair_sz[s * nz + z] * L2[(u * nv + v) * nz + z];
          acc += b * inner;
        }
        (*gA)[s * nu + u] = acc;
      }
  }
  if (gB) {
    gB->assign(B.size(), 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) {
        double acc = 0.0;
        for (std::size_t y = 0; y < ny; ++y)
          acc += M1[u * ny + y] * L1[(u * nv + v) * ny + y];
        for (std::size_t z = 0; z < nz; ++z)
          acc -= M2[u * nz + z] * L2[(u * nv + v) * nz + z];
        (*gB)[u * nv + v] = acc;
      }
  }
  return f;
}

// I(S;Y|Z') for the pushforward T(s,y,z') = sum_z base(s,y,z) C(z,z').
double eval_intrinsic(const MarginalPolytope& poly, std::size_t nzp, const std::vector<double>& C,
                      std::vector<double>* gC) {
  const std::size_t ns = poly.ns, ny = poly.ny, nz = poly.nz;
  const auto& p = poly.base.probs();
  std::vector<double> T(ns * ny * nzp, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < nz; ++z) {
        const double b = p[(s * ny + y) * nz + z];
        if (b == 0.0) continue;
        for (std::size_t zp = 0; zp < nzp; ++zp)
          T[(s * ny + y) * nzp + zp] += b * C[z * nzp + zp];
      }
  std::vector<double> tzp(nzp, 0.0), tszp(ns * nzp, 0.0), tyzp(ny * nzp, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t zp = 0; zp < nzp; ++zp) {
        const double t = T[(s * ny + y) * nzp + zp];
        tzp[zp] += t;
        tszp[s * nzp + zp] += t;
        tyzp[y * nzp + zp] += t;
      }
  double f = 0.0;
  std::vector<double> LR;
  if (gC) LR.assign(T.size(), 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t zp = 0; zp < nzp; ++zp) {
        const double t = T[(s * ny + y) * nzp + zp];
        if (t <= kStructuralZero) continue;
        const double lr = std::log2(t * tzp[zp] / (tszp[s * nzp + zp] * tyzp[y * nzp + zp]));
        f += t * lr;
        if (gC) LR[(s * ny + y) * nzp + zp] = lr;
      }
  if (gC) {
    gC->assign(C.size(), 0.0);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z) {
          const double b = p[(s * ny + y) * nz + z];
          if (b == 0.0) continue;
          for (std::size_t zp = 0; zp < nzp; ++zp)
            (*gC)[z * nzp + zp] += b * LR[(s * ny + y) * nzp + zp];
        }
  }
  return f;
}

// I(S;Y|Z') + I(SY;Z'|Z) for T(s,y,z,z') = base(s,y,z) D(row(s,y,z), z').
double eval_b1(const MarginalPolytope& poly, std::size_t nzp, const std::vector<double>& D,
               std::vector<double>* gD) {
  const std::size_t ns = poly.ns, ny = poly.ny, nz = poly.nz;
  const auto& p = poly.base.probs();
  const std::size_t cells = ns * ny * nz;

  std::vector<double> T3(ns * ny * nzp, 0.0), tzzp(nz * nzp, 0.0);
  std::vector<double> pz(nz, 0.0);
  for (std::size_t r = 0; r < cells; ++r) {
    const double b = p[r];
    const std::size_t z = r % nz;
    pz[z] += b;
    if (b == 0.0) continue;
    const std::size_t sy = r / nz;
    for (std::size_t zp = 0; zp < nzp; ++zp) {
      const double t = b * D[r * nzp + zp];
      T3[sy * nzp + zp] += t;
      tzzp[z * nzp + zp] += t;
    }
  }
  std::vector<double> tzp(nzp, 0.0), tszp(ns * nzp, 0.0), tyzp(ny * nzp, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t zp = 0; zp < nzp; ++zp) {
        const double t = T3[(s * ny + y) * nzp + zp];
        tzp[zp] += t;
        tszp[s * nzp + zp] += t;
        tyzp[y * nzp + zp] += t;
      }

  double f = 0.0;
  std::vector<double> LR3;
  if (gD) LR3.assign(T3.size(), 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t zp = 0; zp < nzp; ++zp) {
        const double t = T3[(s * ny + y) * nzp + zp];
        if (t <= kStructuralZero) continue;
        const double lr = std::log2(t * tzp[zp] / (tszp[s * nzp + zp] * tyzp[y * nzp + zp]));
        f += t * lr;
        if (gD) LR3[(s * ny + y) * nzp + zp] = lr;
      }

  if (gD) gD->assign(D.size(), 0.0);
  for (std::size_t r = 0; r < cells; ++r) {
    const double b = p[r];
    if (b == 0.0) continue;
    const std::size_t z = r % nz;
    const std::size_t sy = r / nz;
    for (std::size_t zp = 0; zp < nzp; ++zp) {
      const double t = b * D[r * nzp + zp];
      double lr4 = 0.0;
      if (t > kStructuralZero && tzzp[z * nzp + zp] > kTiny)
        lr4 = std::log2(t * pz[z] / (b * tzzp[z * nzp + zp]));
      if (t > kStructuralZero) f += t * lr4;
      if (gD) (*gD)[r * nzp + zp] = b * (LR3[sy * nzp + zp] + lr4);
    }
  }
  return f;
}

// Joint (S, Y, Z, Z') for a kernel over the flattened base.
JointDist joint_with_extension(const MarginalPolytope& poly, std::size_t nzp,
                               const std::vector<double>& D, const std::string& new_name) {
  std::vector<Variable> vars = poly.base.variables();
  vars.push_back({new_name, static_cast<int>(nzp)});
  const auto& p = poly.base.probs();
  std::vector<double> out(p.size() * nzp, 0.0);
  for (std::size_t r = 0; r < p.size(); ++r)
    for (std::size_t zp = 0; zp < nzp; ++zp) out[r * nzp + zp] = p[r] * D[r * nzp + zp];
  return JointDist::unchecked(std::move(vars), std::move(out));
}

// ============================ generic searches =============================

struct KernelShape {
  std::size_t rows, cols;
};
using GradEval = std::function<double(const std::vector<std::vector<double>>& kernels,
                                      std::vector<std::vector<double>>* grads)>;

struct OptResult {
  std::vector<std::vector<double>> kernels;
  double value = 0.0;
  bool converged = false;
};

// Gradient ascent/descent on logits with step halving on non-improvement.
OptResult optimize_logits(const std::vector<KernelShape>& shapes,
                          std::vector<std::vector<double>> logits, const GradEval& eval,
                          bool maximize, const BoundsOptions& opts) {
  const double sign = maximize ? 1.0 : -1.0;
  const std::size_t nk = shapes.size();
  for (auto& l : logits) clip_logits(l);

  auto kernels_of = [&](const std::vector<std::vector<double>>& ls) {
    std::vector<std::vector<double>> ks(nk);
    for (std::size_t i = 0; i < nk; ++i) ks[i] = softmax_rows(ls[i], shapes[i].rows, shapes[i].cols);
    return ks;
  };

  std::vector<std::vector<double>> kernels = kernels_of(logits);
  std::vector<std::vector<double>> grads;
  double val = eval(kernels, &grads);
  double step = 0.25;
  int evals = 1;
  bool converged = false;

  while (evals < opts.max_steps) {
    std::vector<std::vector<double>> gl(nk);
    double gnorm = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
      gl[i] = chain_softmax(kernels[i], grads[i], shapes[i].rows, shapes[i].cols);
      for (double g : gl[i]) gnorm = std::max(gnorm, std::abs(g));
    }
    if (gnorm < 1e-13) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (step >= opts.step_tol && evals < opts.max_steps) {
      std::vector<std::vector<double>> trial = logits;
      for (std::size_t i = 0; i < nk; ++i) {
        for (std::size_t j = 0; j < trial[i].size(); ++j) trial[i][j] += sign * step * gl[i][j];
        clip_logits(trial[i]);
      }
      const auto tk = kernels_of(trial);
      const double tval = eval(tk, nullptr);
      ++evals;
      if (sign * (tval - val) > 1e-14) {
        logits = std::move(trial);
        kernels = tk;
        val = tval;
        step = std::min(step * 1.5, 8.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = step < opts.step_tol;
      break;
    }
    val = eval(kernels, &grads);
  }
  return {std::move(kernels), val, converged};
}

struct SearchResult {
  std::vector<double> kernel;
  double value = 0.0;
  bool exhausted = false;
};

// Derivative-free coordinate perturbation on logits with shrinking step;
// used where the objective contains an inner optimization.
SearchResult coordinate_search(std::size_t rows, std::size_t cols, std::vector<double> logits,
                               const std::function<double(const std::vector<double>&)>& value_of,
                               int max_evals, double step_min) {
  clip_logits(logits);
  auto eval_logits = [&](const std::vector<double>& l) { return value_of(softmax_rows(l, rows, cols)); };
  double val = eval_logits(logits);
  int evals = 1;
  double step = 1.0;
  bool exhausted = false;
  while (step >= step_min && !exhausted) {
    bool improved = false;
    for (std::size_t i = 0; i < logits.size() && !exhausted; ++i) {
      for (const double delta : {step, -step}) {
        if (evals >= max_evals) {
          exhausted = true;
          break;
        }
        const double old = logits[i];
        logits[i] = std::clamp(old + delta, -kLogitClip, kLogitClip);
        const double tv = eval_logits(logits);
        ++evals;
        if (tv < val - 1e-12) {
          val = tv;
          improved = true;
          break;
        }
        logits[i] = old;
      }
    }
    if (!improved) step *= 0.5;
  }
  return {softmax_rows(logits, rows, cols), val, exhausted};
}

std::vector<double> identity_lift_kernel(const MarginalPolytope& poly, std::size_t nzp) {
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  std::vector<double> D(cells * nzp, 0.0);
  for (std::size_t r = 0; r < cells; ++r) D[r * nzp + (r % poly.nz)] = 1.0;
  return D;
}

std::vector<double> constant_kernel(std::size_t rows, std::size_t cols) {
  std::vector<double> D(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) D[r * cols] = 1.0;
  return D;
}

std::vector<double> lift_z_kernel(const MarginalPolytope& poly, std::size_t nzp,
                                  const std::vector<double>& C, std::size_t c_cols) {
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  std::vector<double> D(cells * nzp, 0.0);
  for (std::size_t r = 0; r < cells; ++r) {
    const std::size_t z = r % poly.nz;
    for (std::size_t c = 0; c < c_cols; ++c) D[r * nzp + c] = C[z * c_cols + c];
  }
  return D;
}

std::size_t zprime_size(const MarginalPolytope& poly, const BoundsOptions& opts) {
  const std::size_t full = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  if (opts.zprime_cap > 0) return static_cast<std::size_t>(opts.zprime_cap);
  return full;
}

std::string zname(const MarginalPolytope& poly) { return poly.base.variables()[2].name + "'"; }

}  // namespace

// =============================== operations ================================

OneWayResult one_way_rate(const JointDist& d, const Roles& roles, const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t ns = poly.ns;
  const std::size_t nu = ns * ns, nv = ns;

  const std::vector<KernelShape> shapes{{ns, nu}, {nu, nv}};
  GradEval eval = [&](const std::vector<std::vector<double>>& ks,
                      std::vector<std::vector<double>>* gs) {
    if (!gs) return eval_one_way(poly, nu, nv, ks[0], ks[1], nullptr, nullptr);
    gs->assign(2, {});
    return eval_one_way(poly, nu, nv, ks[0], ks[1], &(*gs)[0], &(*gs)[1]);
  };

  // Exact strategies: constant everything achieves 0, the copy strategy
  // achieves I(S;Y) - I(S;Z).
  std::vector<double> A_const = constant_kernel(ns, nu), B_const = constant_kernel(nu, nv);
  std::vector<double> A_copy(ns * nu, 0.0);
  for (std::size_t s = 0; s < ns; ++s) A_copy[s * nu + s] = 1.0;

  OneWayResult best;
  best.value = eval_one_way(poly, nu, nv, A_const, B_const, nullptr, nullptr);  // exactly 0
  std::vector<std::vector<double>> best_kernels{A_const, B_const};
  bool best_converged = true;

  const double copy_val = eval_one_way(poly, nu, nv, A_copy, B_const, nullptr, nullptr);
  if (copy_val > best.value + 1e-15) {
    best.value = copy_val;
    best_kernels = {A_copy, B_const};
  }

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::vector<std::vector<double>> init(2);
    if (r == 0) {
      init[0] = logits_from_kernel(A_copy);
      init[1] = logits_from_kernel(B_const);
    } else if (r == 1) {
      init[0] = logits_from_kernel(A_copy);
      init[1].assign(nu * nv, 0.0);
    } else {
      Rng rng(opts.seed * 7919u + static_cast<std::uint64_t>(r));
      init[0].resize(ns * nu);
      init[1].resize(nu * nv);
      for (double& v : init[0]) v = 2.0 * rng.normal();
      for (double& v : init[1]) v = 2.0 * rng.normal();
    }
    const OptResult res = optimize_logits(shapes, std::move(init), eval, /*maximize=*/true, opts);
    if (res.value > best.value + 1e-12) {
      best.value = res.value;
      best_kernels = res.kernels;
      best_converged = res.converged;
    }
  }

  best.u_given_s = Channel{{poly.base.variables()[0].name}, {"U", static_cast<int>(nu)},
                           best_kernels[0]};
  best.v_given_u = Channel{{"U"}, {"V", static_cast<int>(nv)}, best_kernels[1]};
  best.converged = best_converged;
  return best;
}

ChannelBound intrinsic_information(const JointDist& d, const Roles& roles,
                                   const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t nz = poly.nz, nzp = nz;

  const std::vector<KernelShape> shapes{{nz, nzp}};
  GradEval eval = [&](const std::vector<std::vector<double>>& ks,
                      std::vector<std::vector<double>>* gs) {
    if (!gs) return eval_intrinsic(poly, nzp, ks[0], nullptr);
    gs->assign(1, {});
    return eval_intrinsic(poly, nzp, ks[0], &(*gs)[0]);
  };

  // Identity gives I(S;Y|Z) and the constant channel gives I(S;Y); both are
  // always candidates, which pins the value under min of the two.
  std::vector<double> ident(nz * nzp, 0.0);
  for (std::size_t z = 0; z < nz; ++z) ident[z * nzp + z] = 1.0;
  const std::vector<double> consta = constant_kernel(nz, nzp);

  ChannelBound best;
  best.value = eval_intrinsic(poly, nzp, ident, nullptr);
  std::vector<double> best_kernel = ident;
  const double const_val = eval_intrinsic(poly, nzp, consta, nullptr);
  if (const_val < best.value - 1e-15) {
    best.value = const_val;
    best_kernel = consta;
  }

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::vector<std::vector<double>> init(1);
    if (r == 0)
      init[0] = logits_from_kernel(ident);
    else if (r == 1)
      init[0] = logits_from_kernel(consta);
    else {
      Rng rng(opts.seed * 31337u + static_cast<std::uint64_t>(r));
      init[0].resize(nz * nzp);
      for (double& v : init[0]) v = 2.0 * rng.normal();
    }
    const OptResult res = optimize_logits(shapes, std::move(init), eval, /*maximize=*/false, opts);
    if (res.value < best.value - 1e-12) {
      best.value = res.value;
      best_kernel = res.kernels[0];
      best.converged = res.converged;
    }
  }
  best.witness = Channel{{poly.base.variables()[2].name}, {zname(poly), static_cast<int>(nzp)},
                         best_kernel};
  return best;
}

namespace {

ChannelBound b1_impl(const MarginalPolytope& poly, const BoundsOptions& opts,
                     const std::vector<double>& intrinsic_witness, std::size_t intrinsic_cols) {
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  const std::size_t nzp = zprime_size(poly, opts);

  const std::vector<KernelShape> shapes{{cells, nzp}};
  GradEval eval = [&](const std::vector<std::vector<double>>& ks,
                      std::vector<std::vector<double>>* gs) {
    if (!gs) return eval_b1(poly, nzp, ks[0], nullptr);
    gs->assign(1, {});
    return eval_b1(poly, nzp, ks[0], &(*gs)[0]);
  };

  // Candidates pin the structural chain: the lifted intrinsic witness makes
  // the second term vanish (value = intrinsic bound), the identity lift gives
  // exactly I(S;Y|Z), the constant gives I(S;Y).
  std::vector<std::vector<double>> candidates;
  candidates.push_back(lift_z_kernel(poly, nzp, intrinsic_witness, intrinsic_cols));
  if (nzp >= static_cast<std::size_t>(poly.nz)) candidates.push_back(identity_lift_kernel(poly, nzp));
  candidates.push_back(constant_kernel(cells, nzp));

  ChannelBound best;
  best.value = 1e300;
  std::vector<double> best_kernel;
  for (const auto& cand : candidates) {
    const double v = eval_b1(poly, nzp, cand, nullptr);
    if (v < best.value - 1e-15 || best_kernel.empty()) {
      best.value = v;
      best_kernel = cand;
    }
  }

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::vector<std::vector<double>> init(1);
    if (r < static_cast<int>(candidates.size()))
      init[0] = logits_from_kernel(candidates[static_cast<std::size_t>(r)]);
    else {
      Rng rng(opts.seed * 104729u + static_cast<std::uint64_t>(r));
      init[0].resize(cells * nzp);
      for (double& v : init[0]) v = 2.0 * rng.normal();
    }
    const OptResult res = optimize_logits(shapes, std::move(init), eval, /*maximize=*/false, opts);
    if (res.value < best.value - 1e-12) {
      best.value = res.value;
      best_kernel = res.kernels[0];
      best.converged = res.converged;
    }
  }

  std::vector<std::string> inputs;
  for (const auto& v : poly.base.variables()) inputs.push_back(v.name);
  best.witness = Channel{inputs, {zname(poly), static_cast<int>(nzp)}, best_kernel};
  return best;
}

}  // namespace

ChannelBound minimum_intrinsic_information_b1(const JointDist& d, const Roles& roles,
                                              const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const ChannelBound intr = intrinsic_information(d, roles, opts);
  return b1_impl(poly, opts, intr.witness.kernel, static_cast<std::size_t>(poly.nz));
}

namespace {

// Shared scaffold for the two nested bounds. term(joint4) supplies
// I(S;Y|Z') or UI(S;Y\Z'); the common second term is UI(SY;Z'\Z).
ChannelBound nested_bound_impl(
    const MarginalPolytope& poly, const BoundsOptions& opts,
    const std::function<double(const JointDist&, const std::string&)>& first_term,
    const std::vector<std::vector<double>>& extra_candidates) {
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  const std::size_t nzp = zprime_size(poly, opts);
  const std::string zp = zname(poly);
  const auto& vars = poly.base.variables();

  auto value_of = [&](const std::vector<double>& D) {
    const JointDist j4 = joint_with_extension(poly, nzp, D, zp);
    const DecompositionResult second =
        compute_ui(j4, Roles{{vars[0].name, vars[1].name}, {zp}, {vars[2].name}}, opts.ui);
    return first_term(j4, zp) + second.ui;
  };

  std::vector<std::vector<double>> candidates;
  if (nzp >= static_cast<std::size_t>(poly.nz)) candidates.push_back(identity_lift_kernel(poly, nzp));
  candidates.push_back(constant_kernel(cells, nzp));
  for (const auto& c : extra_candidates) candidates.push_back(c);

  ChannelBound best;
  best.value = 1e300;
  std::vector<double> best_kernel;
  for (const auto& cand : candidates) {
    const double v = value_of(cand);
    if (v < best.value - 1e-15 || best_kernel.empty()) {
      best.value = v;
      best_kernel = cand;
    }
  }

  const SearchResult sr = coordinate_search(cells, nzp, logits_from_kernel(best_kernel), value_of,
                                            opts.max_evals, opts.outer_step_min);
  if (sr.value < best.value - 1e-12) {
    best.value = sr.value;
    best_kernel = sr.kernel;
  }
  if (sr.exhausted) best.flag = "budget_exhausted";

  std::vector<std::string> inputs;
  for (const auto& v : vars) inputs.push_back(v.name);
  best.witness = Channel{inputs, {zp, static_cast<int>(nzp)}, best_kernel};
  return best;
}

}  // namespace

ChannelBound b_gui(const JointDist& d, const Roles& roles, const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const auto& vars = poly.base.variables();
  return nested_bound_impl(
      poly, opts,
      [&](const JointDist& j4, const std::string& zp) {
        return cmi(j4, {vars[0].name}, {vars[1].name}, {zp});
      },
      {});
}

ChannelBound b_sui(const JointDist& d, const Roles& roles, const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const auto& vars = poly.base.variables();
  return nested_bound_impl(
      poly, opts,
      [&](const JointDist& j4, const std::string& zp) {
        return compute_ui(j4, Roles{{vars[0].name}, {vars[1].name}, {zp}}, opts.ui).ui;
      },
      {});
}

ChannelBound reduced_intrinsic_heuristic(const JointDist& d, const Roles& roles, int u_cap,
                                         const BoundsOptions& opts) {
  if (u_cap < 1) throw std::invalid_argument("reduced_intrinsic_heuristic: u_cap must be >= 1");
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  const std::size_t nu = static_cast<std::size_t>(u_cap);
  const auto& vars = poly.base.variables();

  // Constant U contributes nothing: the value collapses to the plain
  // intrinsic information, computed with the caller's full options.
  const ChannelBound intr = intrinsic_information(d, roles, opts);

  ChannelBound best;
  best.value = intr.value;
  best.flag = "heuristic";
  std::vector<double> best_kernel = constant_kernel(cells, nu);

  if (u_cap > 1) {
    BoundsOptions inner = opts;
    inner.restarts = std::min(opts.restarts, 6);
    inner.max_steps = std::min(opts.max_steps, 400);
    auto value_of = [&](const std::vector<double>& E) {
      const JointDist j4 = joint_with_extension(poly, nu, E, "U");
      const ChannelBound down = intrinsic_information(
          j4, Roles{{vars[0].name}, {vars[1].name}, {vars[2].name, "U"}}, inner);
      return down.value + entropy(j4, {"U"});
    };
    const SearchResult sr = coordinate_search(cells, nu, logits_from_kernel(best_kernel), value_of,
                                              opts.max_evals, opts.outer_step_min);
    if (sr.value < best.value - 1e-12) {
      best.value = sr.value;
      best_kernel = sr.kernel;
    }
    if (sr.exhausted) best.flag = "heuristic,budget_exhausted";
  }

  std::vector<std::string> inputs;
  for (const auto& v : vars) inputs.push_back(v.name);
  best.witness = Channel{inputs, {"U", u_cap}, best_kernel};
  return best;
}

BoundsReport bounds_chain(const JointDist& d, const Roles& roles, const BoundsOptions& opts) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const auto& vars = poly.base.variables();

  BoundsReport rep{.one_way = one_way_rate(d, roles, opts),
                   .intrinsic = intrinsic_information(d, roles, opts),
                   .decomposition = compute_ui(d, roles, opts.ui)};
  rep.b1 = b1_impl(poly, opts, rep.intrinsic.witness.kernel, static_cast<std::size_t>(poly.nz));
  {
    // Seed the b_gui pool with the B1 witness: UI <= CMI makes its b_gui value
    // at most the B1 value, which enforces Proposition 3's right inequality.
    rep.bgui = nested_bound_impl(
        poly, opts,
        [&](const JointDist& j4, const std::string& zp) {
          return cmi(j4, {vars[0].name}, {vars[1].name}, {zp});
        },
        {rep.b1.witness.kernel});
  }
  rep.one_way_lower = rep.one_way.value;
  rep.ui = rep.decomposition.ui;
  rep.ui_gap = rep.decomposition.gap;
  rep.b1_upper = rep.b1.value;
  rep.b_gui_upper = rep.bgui.value;
  rep.intrinsic_upper = rep.intrinsic.value;
  rep.cmi = cmi(poly.base, {vars[0].name}, {vars[1].name}, {vars[2].name});

  const double tol = rep.ui_gap + 1e-4;
  if (rep.one_way_lower > rep.ui + tol)
    throw std::logic_error("bounds_chain: one-way lower estimate exceeds UI (solver bug)");
  if (rep.ui > rep.b1_upper + tol)
    throw std::logic_error("bounds_chain: UI exceeds B1 (solver bug)");
  if (rep.b1_upper > rep.intrinsic_upper + 1e-9)
    throw std::logic_error("bounds_chain: B1 exceeds intrinsic information (warm start broken)");
  if (rep.intrinsic_upper > rep.cmi + 1e-9)
    throw std::logic_error("bounds_chain: intrinsic information exceeds I(S;Y|Z)");

  if (rep.b_gui_upper > rep.b1_upper + tol + 1e-3) rep.flags.push_back("b_gui:above_b1");
  if (!rep.one_way.converged) rep.flags.push_back("one_way:iteration_cap");
  if (!rep.intrinsic.converged) rep.flags.push_back("intrinsic:iteration_cap");
  if (!rep.b1.converged) rep.flags.push_back("b1:iteration_cap");
  if (!rep.bgui.flag.empty()) rep.flags.push_back("b_gui:" + rep.bgui.flag);
  if (!rep.decomposition.converged) rep.flags.push_back("ui:iteration_cap");
  return rep;
}

// ====================== witness re-evaluation helpers ======================

double one_way_objective(const JointDist& d, const Roles& roles, const Channel& u_given_s,
                         const Channel& v_given_u) {
  const JointDist base = flatten_roles(d, roles);
  const JointDist with_u = apply_channel(base, u_given_s);
  const JointDist with_uv = apply_channel(with_u, v_given_u);
  const auto& vars = base.variables();
  const std::string u = u_given_s.output.name, v = v_given_u.output.name;
  return cmi(with_uv, {u}, {vars[1].name}, {v}) - cmi(with_uv, {u}, {vars[2].name}, {v});
}

double intrinsic_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_z) {
  const JointDist base = flatten_roles(d, roles);
  const JointDist j = apply_channel(base, zprime_given_z);
  const auto& vars = base.variables();
  return cmi(j, {vars[0].name}, {vars[1].name}, {zprime_given_z.output.name});
}

double b1_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_syz) {
  const JointDist base = flatten_roles(d, roles);
  const JointDist j = apply_channel(base, zprime_given_syz);
  const auto& vars = base.variables();
  const std::string zp = zprime_given_syz.output.name;
  return cmi(j, {vars[0].name}, {vars[1].name}, {zp}) +
         cmi(j, {vars[0].name, vars[1].name}, {zp}, {vars[2].name});
}

double bgui_objective(const JointDist& d, const Roles& roles, const Channel& zprime_given_syz,
                      const UiOptions& opts) {
  const JointDist base = flatten_roles(d, roles);
  const JointDist j = apply_channel(base, zprime_given_syz);
  const auto& vars = base.variables();
  const std::string zp = zprime_given_syz.output.name;
  return cmi(j, {vars[0].name}, {vars[1].name}, {zp}) +
         compute_ui(j, Roles{{vars[0].name, vars[1].name}, {zp}, {vars[2].name}}, opts).ui;
}

// ===================== finite-difference gradient access ===================

double one_way_value_and_logit_grad(const JointDist& d, const Roles& roles,
                                    const std::vector<double>& logits_u,
                                    const std::vector<double>& logits_v,
                                    std::vector<double>* grad_u, std::vector<double>* grad_v) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t ns = poly.ns, nu = ns * ns, nv = ns;
  const auto A = softmax_rows(logits_u, ns, nu);
  const auto B = softmax_rows(logits_v, nu, nv);
  std::vector<double> gA, gB;
  const double f = eval_one_way(poly, nu, nv, A, B, grad_u ? &gA : nullptr, grad_v ? &gB : nullptr);
  if (grad_u) *grad_u = chain_softmax(A, gA, ns, nu);
  if (grad_v) *grad_v = chain_softmax(B, gB, nu, nv);
  return f;
}

double intrinsic_value_and_logit_grad(const JointDist& d, const Roles& roles,
                                      const std::vector<double>& logits,
                                      std::vector<double>* grad) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t nz = poly.nz;
  const auto C = softmax_rows(logits, nz, nz);
  std::vector<double> gC;
  const double f = eval_intrinsic(poly, nz, C, grad ? &gC : nullptr);
  if (grad) *grad = chain_softmax(C, gC, nz, nz);
  return f;
}

double b1_value_and_logit_grad(const JointDist& d, const Roles& roles,
                               const std::vector<double>& logits, std::vector<double>* grad) {
  const MarginalPolytope poly = build_polytope(d, roles);
  const std::size_t cells = static_cast<std::size_t>(poly.ns) * poly.ny * poly.nz;
  const std::size_t nzp = cells;
  const auto D = softmax_rows(logits, cells, nzp);
  std::vector<double> gD;
  const double f = eval_b1(poly, nzp, D, grad ? &gD : nullptr);
  if (grad) *grad = chain_softmax(D, gD, cells, nzp);
  return f;
}

}  // namespace uinfo
