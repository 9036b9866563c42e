#include "uinfo/property_harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "uinfo/blackwell.hpp"
#include "uinfo/fixtures.hpp"
#include "uinfo/random.hpp"

namespace uinfo {

double check_triangle(const JointDist& d4, const Roles4& roles, const UiOptions& opts,
                      double* gap_sum) {
  const DecompositionResult uiyz = compute_ui(d4, Roles{roles.s, roles.y, roles.z}, opts);
  const DecompositionResult uiyzp = compute_ui(d4, Roles{roles.s, roles.y, roles.zp}, opts);
  const DecompositionResult uizpz = compute_ui(d4, Roles{roles.s, roles.zp, roles.z}, opts);
  if (gap_sum) *gap_sum = uiyz.gap + uiyzp.gap + uizpz.gap;
  return uiyzp.ui + uizpz.ui - uiyz.ui;
}

double check_corollary(const JointDist& d4, const Roles4& roles, const UiOptions& opts,
                       double* gap_sum, double* second_term) {
  std::vector<std::string> sy = roles.s;
  sy.insert(sy.end(), roles.y.begin(), roles.y.end());
  const DecompositionResult uiyz = compute_ui(d4, Roles{roles.s, roles.y, roles.z}, opts);
  const DecompositionResult uiyzp = compute_ui(d4, Roles{roles.s, roles.y, roles.zp}, opts);
  const DecompositionResult uisy = compute_ui(d4, Roles{sy, roles.zp, roles.z}, opts);
  if (gap_sum) *gap_sum = uiyz.gap + uiyzp.gap + uisy.gap;
  if (second_term) *second_term = uisy.ui;
  return uiyzp.ui + uisy.ui - uiyz.ui;
}

EveSlack check_eve_monotonicity(const JointDist& d, const Roles& roles, const Channel& ch,
                                const UiOptions& opts) {
  const JointDist base = flatten_roles(d, roles);
  const auto& v = base.variables();
  const JointDist j4 = apply_channel(base, ch);
  const std::string zp = ch.output.name;

  const DecompositionResult r_z = compute_ui(base, default_roles(base), opts);
  const DecompositionResult r_zp = compute_ui(j4, Roles{{v[0].name}, {v[1].name}, {zp}}, opts);
  const DecompositionResult r_both =
      compute_ui(j4, Roles{{v[0].name}, {v[1].name}, {v[2].name, zp}}, opts);

  EveSlack out;
  out.monotonicity = r_zp.ui - r_z.ui;
  out.identity_error = std::abs(r_both.ui - r_z.ui);
  out.gap_sum = r_z.gap + r_zp.gap + r_both.gap;
  return out;
}

double check_alice_bob_monotonicity(const JointDist& d, const Roles& roles, const Channel& ch,
                                    bool garble_alice, const UiOptions& opts, double* gap_sum) {
  const JointDist base = flatten_roles(d, roles);
  const auto& v = base.variables();
  const JointDist j4 = apply_channel(base, ch);
  const std::string g = ch.output.name;

  const DecompositionResult before = compute_ui(base, default_roles(base), opts);
  const Roles after_roles = garble_alice ? Roles{{g}, {v[1].name}, {v[2].name}}
                                         : Roles{{v[0].name}, {g}, {v[2].name}};
  const DecompositionResult after = compute_ui(j4, after_roles, opts);
  if (gap_sum) *gap_sum = before.gap + after.gap;
  return before.ui - after.ui;
}

double check_public_communication(const JointDist& d, const Roles& roles,
                                  const std::vector<int>& f, int f_range, const UiOptions& opts,
                                  double* gap_sum) {
  const JointDist base = flatten_roles(d, roles);
  const auto& v = base.variables();
  if (static_cast<int>(f.size()) != v[0].size)
    throw std::invalid_argument("check_public_communication: f must cover the S alphabet");
  // One announcement copy per party keeps the role groups disjoint.
  JointDist j = base;
  for (const char* name : {"F1", "F2", "F3"})
    j = apply_channel(j, Channel::deterministic(v[0].name, v[0].size, name, f_range,
                                                [&](int s) { return f[s]; }));
  const DecompositionResult before = compute_ui(base, default_roles(base), opts);
  const DecompositionResult after = compute_ui(
      j, Roles{{v[0].name, "F1"}, {v[1].name, "F2"}, {v[2].name, "F3"}}, opts);
  if (gap_sum) *gap_sum = before.gap + after.gap;
  return before.ui - after.ui;
}

double check_locking(const JointDist& d4, const Roles& roles, const std::vector<std::string>& u,
                     const UiOptions& opts, double* gap_sum) {
  std::vector<std::string> zu = roles.z;
  zu.insert(zu.end(), u.begin(), u.end());
  const DecompositionResult with_u = compute_ui(d4, Roles{roles.s, roles.y, zu}, opts);
  const DecompositionResult without = compute_ui(d4, roles, opts);
  if (gap_sum) *gap_sum = with_u.gap + without.gap;
  return with_u.ui - without.ui + entropy(d4, u);
}

double check_additivity(const JointDist& d, const Roles& roles, int n, const UiOptions& opts,
                        double* gap_sum) {
  const JointDist base = flatten_roles(d, roles);
  const auto& v = base.variables();
  const JointDist power = tensor_power(base, n);
  Roles proles;
  for (int copy = 1; copy <= n; ++copy) {
    proles.s.push_back(v[0].name + "_" + std::to_string(copy));
    proles.y.push_back(v[1].name + "_" + std::to_string(copy));
    proles.z.push_back(v[2].name + "_" + std::to_string(copy));
  }
  const DecompositionResult single = compute_ui(base, default_roles(base), opts);
  const DecompositionResult many = compute_ui(power, proles, opts);
  if (gap_sum) *gap_sum = many.gap + n * single.gap;
  return std::abs(many.ui - n * single.ui);
}

CollapseCheck check_collapse_at_qstar(const JointDist& d, const Roles& roles,
                                      const BoundsOptions& opts) {
  const JointDist q_star = min_synergy_distribution(d, roles, opts.ui);
  const Roles qroles = default_roles(q_star);
  const DecompositionResult r = compute_ui(q_star, qroles, opts.ui);
  const ChannelBound b1 = minimum_intrinsic_information_b1(q_star, qroles, opts);
  const auto& v = q_star.variables();
  const double c = cmi(q_star, {v[0].name}, {v[1].name}, {v[2].name});

  CollapseCheck out;
  out.squeeze_width = b1.value - r.ui;
  out.ui_cmi_gap = std::abs(r.ui - c);
  out.gap_sum = r.gap;
  return out;
}

// ================================ ensembles ================================

namespace {

struct InstanceOutcome {
  double slack = 0.0;  // negative beyond tolerance = violation
  bool violated = false;
  std::string note;
};

using InstanceFn = std::function<InstanceOutcome(const EnsembleSpec&, const std::vector<int>&,
                                                 std::uint64_t, const SuiteConfig&)>;

Roles first_three(const JointDist& d) { return default_roles(d); }

InstanceOutcome run_p1(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const DecompositionResult yz = compute_ui(d, first_three(d), cfg.ui);
  const DecompositionResult zy =
      compute_ui(d, Roles{{"X0"}, {"X2"}, {"X1"}}, cfg.ui);
  const double isy = cmi(d, {"X0"}, {"X1"});
  const double isz = cmi(d, {"X0"}, {"X2"});
  const double residual = std::abs(isy + zy.ui - isz - yz.ui);
  const double tol = yz.gap + zy.gap + 1e-4;
  return {tol - residual, residual > tol, ""};
}

InstanceOutcome run_p2(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const bool agree = cross_check_ui(d, first_three(d), cfg.ui);
  return {agree ? 1.0 : -1.0, !agree, agree ? "" : "UI/Blackwell disagreement"};
}

InstanceOutcome run_p3(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const bool alice = (seed % 2) == 0;
  Rng rng(seed * 0x9e3779b97f4a7c15ull + 3);
  const JointDist base = flatten_roles(d, first_three(d));
  const auto& v = base.variables();
  const int in_size = alice ? v[0].size : v[1].size;
  const Channel ch = random_channel({alice ? v[0].name : v[1].name},
                                    static_cast<std::size_t>(in_size), {"G", in_size}, rng);
  double gaps = 0.0;
  const double slack = check_alice_bob_monotonicity(base, first_three(base), ch, alice, cfg.ui, &gaps);
  const double tol = gaps + 1e-4;
  return {slack, slack < -tol, alice ? "alice" : "bob"};
}

InstanceOutcome run_p4(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const JointDist base = flatten_roles(d, first_three(d));
  std::vector<int> f(base.variables()[0].size);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<int>(i % 2);
  double gaps = 0.0;
  const double slack = check_public_communication(base, first_three(base), f, 2, cfg.ui, &gaps);
  const double tol = gaps + 1e-4;
  return {slack, slack < -tol, "f=parity"};
}

InstanceOutcome run_p5(const EnsembleSpec&, const std::vector<int>&, std::uint64_t,
                       const SuiteConfig& cfg) {
  const DecompositionResult r = compute_ui(perfect_secret_bit(), Roles{{"S"}, {"Y"}, {"Z"}}, cfg.ui);
  const double err = std::abs(r.ui - 1.0);
  const double tol = r.gap + 1e-4;
  return {tol - err, err > tol, "perfect secret bit"};
}

InstanceOutcome run_p6(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  double gaps = 0.0;
  const double err = check_additivity(d, first_three(d), 2, cfg.ui, &gaps);
  const double tol = gaps + 1e-3;
  return {tol - err, err > tol, ""};
}

InstanceOutcome run_p7(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const JointDist r = random_dirichlet(shape, 1.0, seed ^ 0xabcdef12345ull);
  const double dist = l1_distance(d, r);
  if (dist < 1e-9) return {0.5, false, "degenerate pair skipped"};
  const double eps = 1e-3 / dist;
  std::vector<double> mixed(d.cells());
  for (std::size_t i = 0; i < mixed.size(); ++i)
    mixed[i] = (1.0 - eps) * d.probs()[i] + eps * r.probs()[i];
  const JointDist dp = JointDist::unchecked(std::vector<Variable>(d.variables()), std::move(mixed));
  const double u1 = compute_ui(d, first_three(d), cfg.ui).ui;
  const double u2 = compute_ui(dp, first_three(dp), cfg.ui).ui;
  const double change = std::abs(u1 - u2);
  // Sanity envelope only: the paper's bound has an unspecified constant.
  return {0.5 - change, change > 0.5, "envelope 0.5 bits at eps=1e-3"};
}

InstanceOutcome run_p8(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  std::vector<int> shape4 = shape;
  shape4.push_back(2);
  const JointDist d4 = random_dirichlet(shape4, 1.0, seed);
  double gaps = 0.0;
  const double slack =
      check_locking(d4, Roles{{"X0"}, {"X1"}, {"X2"}}, {"X3"}, cfg.ui, &gaps);
  const double tol = gaps + 1e-4;
  return {slack, slack < -tol, "|U|=2"};
}

InstanceOutcome run_p9(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                       const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  const JointDist base = flatten_roles(d, first_three(d));
  const auto& v = base.variables();
  Rng rng(seed * 0x9e3779b97f4a7c15ull + 9);
  const Channel ch = random_channel({v[2].name}, static_cast<std::size_t>(v[2].size),
                                    {"Zp", v[2].size}, rng);
  const EveSlack es = check_eve_monotonicity(base, first_three(base), ch, cfg.ui);
  const double tol = es.gap_sum + 1e-4;
  const bool bad = es.monotonicity < -tol || es.identity_error > tol;
  return {std::min(es.monotonicity, tol - es.identity_error), bad, ""};
}

InstanceOutcome run_prop1(const EnsembleSpec&, const std::vector<int>&, std::uint64_t seed,
                          const SuiteConfig& cfg) {
  const JointDist d4 = random_dirichlet(std::vector<int>{2, 2, 2, 2}, 1.0, seed);
  double gaps = 0.0;
  const double slack = check_triangle(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, cfg.ui, &gaps);
  const double tol = gaps + 1e-4;
  return {slack, slack < -tol, ""};
}

InstanceOutcome run_cor1(const EnsembleSpec&, const std::vector<int>&, std::uint64_t seed,
                         const SuiteConfig& cfg) {
  double gaps = 0.0, second = 0.0;
  double slack;
  bool markov = (seed % 2) == 1;
  std::string note;
  if (!markov) {
    const JointDist d4 = random_dirichlet(std::vector<int>{2, 2, 2, 2}, 1.0, seed);
    slack = check_corollary(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, cfg.ui, &gaps, &second);
  } else {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    Rng rng(seed * 0x9e3779b97f4a7c15ull + 11);
    const Channel ch = random_channel({"X2"}, 2, {"X3", 2}, rng);
    const JointDist d4 = apply_channel(d, ch);
    slack = check_corollary(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, cfg.ui, &gaps, &second);
    note = "markov";
  }
  const double tol = gaps + 1e-4;
  bool bad = slack < -tol;
  if (markov && second > tol) {
    bad = true;
    note = "markov second term " + std::to_string(second);
  }
  return {slack, bad, note};
}

InstanceOutcome run_thm4(const EnsembleSpec&, const std::vector<int>& shape, std::uint64_t seed,
                         const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  BoundsOptions opts = cfg.bounds;
  opts.seed = seed;
  const BoundsReport rep = bounds_chain(d, first_three(d), opts);
  const double tol = rep.ui_gap + 1e-3;
  const double m1 = rep.ui + tol - rep.one_way_lower;
  const double m2 = rep.b1_upper + tol - rep.ui;
  const double m3 = rep.intrinsic_upper + 1e-9 - rep.b1_upper;
  const double m4 = rep.cmi + 1e-9 - rep.intrinsic_upper;
  const double worst = std::min(std::min(m1, m2), std::min(m3, m4));
  return {worst, worst < 0.0, ""};
}

InstanceOutcome run_lock(const EnsembleSpec&, const std::vector<int>&, std::uint64_t seed,
                         const SuiteConfig& cfg) {
  // Structured Eve-side information: U reveals one bit of a 4-symbol Z.
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 4}, 1.0, seed);
  const JointDist d4 = apply_channel(
      d, Channel::deterministic("X2", 4, "U", 2, [](int z) { return z & 1; }));
  double gaps = 0.0;
  const double slack = check_locking(d4, Roles{{"X0"}, {"X1"}, {"X2"}}, {"U"}, cfg.ui, &gaps);
  const double tol = gaps + 1e-4;
  return {slack, slack < -tol, "U = low bit of Z"};
}

InstanceOutcome run_collapse(const EnsembleSpec&, const std::vector<int>& shape,
                             std::uint64_t seed, const SuiteConfig& cfg) {
  const JointDist d = random_dirichlet(shape, 1.0, seed);
  BoundsOptions opts = cfg.bounds;
  opts.seed = seed;
  const CollapseCheck cc = check_collapse_at_qstar(d, first_three(d), opts);
  const double tol_squeeze = cc.gap_sum + 2e-3;
  const double tol_cmi = cc.gap_sum + 1e-3;
  const double worst = std::min(tol_squeeze - cc.squeeze_width, tol_cmi - cc.ui_cmi_gap);
  return {worst, worst < 0.0, ""};
}

InstanceFn dispatch(const std::string& id) {
  if (id == "P1") return run_p1;
  if (id == "P2") return run_p2;
  if (id == "P3") return run_p3;
  if (id == "P4") return run_p4;
  if (id == "P5") return run_p5;
  if (id == "P6") return run_p6;
  if (id == "P7") return run_p7;
  if (id == "P8") return run_p8;
  if (id == "P9") return run_p9;
  if (id == "PROP1") return run_prop1;
  if (id == "COR1") return run_cor1;
  if (id == "THM4") return run_thm4;
  if (id == "LOCK") return run_lock;
  if (id == "COLLAPSE") return run_collapse;
  throw std::invalid_argument("run_suite: unknown property id '" + id + "'");
}

}  // namespace

SuiteConfig default_suite_config() {
  SuiteConfig cfg;
  cfg.bounds.restarts = 6;
  cfg.bounds.max_steps = 400;
  cfg.bounds.max_evals = 200;
  for (const char* id : {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "PROP1", "COR1",
                         "THM4", "LOCK", "COLLAPSE"}) {
    EnsembleSpec spec;
    spec.id = id;
    if (spec.id == "P5") spec.draws = 1;  // fixed fixture
    cfg.ensembles.push_back(std::move(spec));
  }
  return cfg;
}

std::vector<PropertyReport> run_suite(const SuiteConfig& config) {
  std::vector<PropertyReport> reports;
  for (const auto& spec : config.ensembles) {
    const InstanceFn fn = dispatch(spec.id);
    PropertyReport rep;
    rep.property_id = spec.id;
    rep.worst_slack = 1e300;
    for (int i = 0; i < spec.draws; ++i) {
      const std::vector<int>& shape = spec.shapes[i % spec.shapes.size()];
      const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(i);
      rep.seeds.push_back(seed);
      ++rep.instances;
      InstanceOutcome out;
      try {
        out = fn(spec, shape, seed, config);
      } catch (const std::exception& e) {
        out.slack = -1e300;
        out.violated = true;
        out.note = std::string("exception: ") + e.what();
      }
      if (out.violated) {
        ++rep.violations;
        rep.violating_seeds.push_back(seed);
        if (rep.note.empty()) rep.note = out.note;
      }
      rep.worst_slack = std::min(rep.worst_slack, out.slack);
    }
    if (rep.instances == 0) rep.worst_slack = 0.0;
    reports.push_back(std::move(rep));
  }
  std::sort(reports.begin(), reports.end(), [](const PropertyReport& a, const PropertyReport& b) {
    if (a.property_id != b.property_id) return a.property_id < b.property_id;
    const std::uint64_t sa = a.seeds.empty() ? 0 : a.seeds.front();
    const std::uint64_t sb = b.seeds.empty() ? 0 : b.seeds.front();
    return sa < sb;
  });
  return reports;
}

}  // namespace uinfo
