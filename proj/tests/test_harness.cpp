#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "uinfo/fixtures.hpp"
#include "uinfo/property_harness.hpp"
#include "uinfo/random.hpp"

using namespace uinfo;

namespace {
const Roles kSYZ{{"S"}, {"Y"}, {"Z"}};
}

TEST_CASE("triangle inequality edge cases") {
  // Z' a duplicate of Z: slack collapses to ~0.
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 12);
  const JointDist d4 = apply_channel(d, Channel::identity("X2", 2, "X3"));
  double gaps = 0.0;
  const double slack = check_triangle(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, {}, &gaps);
  CHECK(slack >= -(gaps + 1e-4));
  CHECK(std::abs(slack) <= gaps + 1e-3);

  // Z' independent of everything: slack equals SI(S;Y,Z) >= 0.
  JointDist with_indep = apply_channel(d, Channel::constant("X2", 2, "X3", 2, 0));
  const double slack2 =
      check_triangle(with_indep, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, {}, &gaps);
  const double isy = cmi(d, {"X0"}, {"X1"});
  const DecompositionResult uiyz = compute_ui(d, Roles{{"X0"}, {"X1"}, {"X2"}});
  CHECK(std::abs(slack2 - (isy - uiyz.ui)) <= gaps + 1e-3);
  CHECK(slack2 >= -(gaps + 1e-4));
}

TEST_CASE("triangle and corollary on seeded four-variable draws") {
  for (std::uint64_t seed = 300; seed < 306; ++seed) {
    const JointDist d4 = random_dirichlet(std::vector<int>{2, 2, 2, 2}, 1.0, seed);
    double gaps = 0.0;
    CAPTURE(seed);
    CHECK(check_triangle(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, {}, &gaps) >=
          -(gaps + 1e-4));
    double second = 0.0;
    CHECK(check_corollary(d4, Roles4{{"X0"}, {"X1"}, {"X2"}, {"X3"}}, {}, &gaps, &second) >=
          -(gaps + 1e-4));
  }
}

TEST_CASE("eve monotonicity and the appendix identity") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 88);

  SUBCASE("identity channel changes nothing") {
    const EveSlack es = check_eve_monotonicity(d, Roles{{"X0"}, {"X1"}, {"X2"}},
                                               Channel::identity("X2", 2, "Zp"));
    CHECK(std::abs(es.monotonicity) <= es.gap_sum + 1e-4);
    CHECK(es.identity_error <= es.gap_sum + 1e-4);
  }
  SUBCASE("constant channel erases Eve") {
    const EveSlack es = check_eve_monotonicity(d, Roles{{"X0"}, {"X1"}, {"X2"}},
                                               Channel::constant("X2", 2, "Zp", 2, 0));
    // UI against an erased Eve is I(S;Y).
    const double isy = cmi(d, {"X0"}, {"X1"});
    const DecompositionResult r = compute_ui(d, Roles{{"X0"}, {"X1"}, {"X2"}});
    CHECK(std::abs(es.monotonicity - (isy - r.ui)) <= es.gap_sum + r.gap + 1e-3);
    CHECK(es.monotonicity >= -(es.gap_sum + 1e-4));
  }
  SUBCASE("random garblings") {
    for (std::uint64_t seed = 41; seed < 46; ++seed) {
      Rng rng(seed);
      const Channel ch = random_channel({"X2"}, 2, {"Zp", 2}, rng);
      const EveSlack es = check_eve_monotonicity(d, Roles{{"X0"}, {"X1"}, {"X2"}}, ch);
      CAPTURE(seed);
      CHECK(es.monotonicity >= -(es.gap_sum + 1e-4));
      CHECK(es.identity_error <= es.gap_sum + 1e-4);
    }
  }
}

TEST_CASE("alice/bob monotonicity") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 99);
  double gaps = 0.0;

  const double id_slack = check_alice_bob_monotonicity(
      d, Roles{{"X0"}, {"X1"}, {"X2"}}, Channel::identity("X0", 2, "G"), true, {}, &gaps);
  CHECK(std::abs(id_slack) <= gaps + 1e-4);

  const double const_slack = check_alice_bob_monotonicity(
      d, Roles{{"X0"}, {"X1"}, {"X2"}}, Channel::constant("X0", 2, "G", 2, 0), true, {}, &gaps);
  const DecompositionResult r = compute_ui(d, Roles{{"X0"}, {"X1"}, {"X2"}});
  CHECK(std::abs(const_slack - r.ui) <= gaps + r.gap + 1e-3);

  for (std::uint64_t seed = 61; seed < 65; ++seed) {
    Rng rng(seed);
    const bool alice = seed % 2 == 0;
    const Channel ch = random_channel({alice ? "X0" : "X1"}, 2, {"G", 2}, rng);
    CAPTURE(seed);
    CHECK(check_alice_bob_monotonicity(d, Roles{{"X0"}, {"X1"}, {"X2"}}, ch, alice, {}, &gaps) >=
          -(gaps + 1e-4));
  }
}

TEST_CASE("public communication monotonicity") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 111);
  double gaps = 0.0;

  // Constant announcement changes nothing.
  const double c = check_public_communication(d, Roles{{"X0"}, {"X1"}, {"X2"}}, {0, 0}, 1, {},
                                              &gaps);
  CHECK(std::abs(c) <= gaps + 1e-4);

  for (std::uint64_t seed = 130; seed < 134; ++seed) {
    const JointDist dd = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    CAPTURE(seed);
    CHECK(check_public_communication(dd, Roles{{"X0"}, {"X1"}, {"X2"}}, {0, 1}, 2, {}, &gaps) >=
          -(gaps + 1e-4));
  }
}

TEST_CASE("locking slack") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 140);

  // U constant: slack is ~0 + H(U) = 0.
  const JointDist du = apply_channel(d, Channel::constant("X2", 2, "U", 1, 0));
  double gaps = 0.0;
  const double s0 = check_locking(du, Roles{{"X0"}, {"X1"}, {"X2"}}, {"U"}, {}, &gaps);
  CHECK(std::abs(s0) <= gaps + 1e-4);

  // U a copy of Z: slack is H(Z) >= 0.
  const JointDist dc = apply_channel(d, Channel::identity("X2", 2, "U"));
  const double s1 = check_locking(dc, Roles{{"X0"}, {"X1"}, {"X2"}}, {"U"}, {}, &gaps);
  CHECK(std::abs(s1 - entropy(d, {"X2"})) <= gaps + 1e-3);

  for (std::uint64_t seed = 150; seed < 154; ++seed) {
    const JointDist d4 = random_dirichlet(std::vector<int>{2, 2, 2, 2}, 1.0, seed);
    CAPTURE(seed);
    CHECK(check_locking(d4, Roles{{"X0"}, {"X1"}, {"X2"}}, {"X3"}, {}, &gaps) >= -(gaps + 1e-4));
  }
}

TEST_CASE("collapse at the minimum-synergy distribution") {
  BoundsOptions o;
  o.restarts = 6;
  o.max_steps = 400;

  // XOR: Q* is uniform, everything collapses to zero.
  const CollapseCheck cx = check_collapse_at_qstar(xor_distribution(), kSYZ, o);
  CHECK(std::abs(cx.squeeze_width) <= 1e-3);
  CHECK(cx.ui_cmi_gap <= 1e-3);

  // The perfect secret bit is already minimum-synergy: everything is ~1.
  const CollapseCheck cp = check_collapse_at_qstar(perfect_secret_bit(), kSYZ, o);
  CHECK(std::abs(cp.squeeze_width) <= 2e-3);
  CHECK(cp.ui_cmi_gap <= 1e-3);

  for (std::uint64_t seed = 160; seed < 163; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    o.seed = seed;
    const CollapseCheck cc = check_collapse_at_qstar(d, Roles{{"X0"}, {"X1"}, {"X2"}}, o);
    CAPTURE(seed);
    CHECK(cc.squeeze_width <= cc.gap_sum + 2e-3);
    CHECK(cc.squeeze_width >= -(cc.gap_sum + 1e-3));
    CHECK(cc.ui_cmi_gap <= cc.gap_sum + 1e-3);
  }
}

TEST_CASE("run_suite: empty config gives an empty report") {
  SuiteConfig cfg;
  CHECK(run_suite(cfg).empty());
}

TEST_CASE("run_suite: small deterministic run") {
  SuiteConfig cfg;
  cfg.bounds.restarts = 4;
  cfg.bounds.max_steps = 200;
  cfg.bounds.max_evals = 80;
  for (const char* id : {"P1", "P2", "P5", "PROP1"}) {
    EnsembleSpec spec;
    spec.id = id;
    spec.draws = (std::string(id) == "P5") ? 1 : 5;
    spec.seed = 500;
    cfg.ensembles.push_back(spec);
  }
  const auto reports = run_suite(cfg);
  REQUIRE(reports.size() == 4);
  int violations = 0;
  for (const auto& r : reports) {
    violations += r.violations;
    CHECK(r.instances == ((r.property_id == "P5") ? 1 : 5));
    CHECK(r.seeds.size() == static_cast<std::size_t>(r.instances));
  }
  CHECK(violations == 0);

  // Rerun with the same config: identical reports.
  const auto again = run_suite(cfg);
  REQUIRE(again.size() == reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(again[i].property_id == reports[i].property_id);
    CHECK(again[i].worst_slack == reports[i].worst_slack);
    CHECK(again[i].violations == reports[i].violations);
  }
}
