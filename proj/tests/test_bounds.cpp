#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "uinfo/bounds.hpp"
#include "uinfo/fixtures.hpp"
#include "uinfo/random.hpp"

using namespace uinfo;

namespace {
const Roles kSYZ{{"S"}, {"Y"}, {"Z"}};
const Roles kX012{{"X0"}, {"X1"}, {"X2"}};

BoundsOptions light() {
  BoundsOptions o;
  o.restarts = 6;
  o.max_steps = 400;
  o.max_evals = 200;
  return o;
}
}  // namespace

TEST_CASE("one-way rate on the fixtures") {
  const OneWayResult psb = one_way_rate(perfect_secret_bit(), kSYZ, light());
  CHECK(psb.value >= 1.0 - 1e-4);  // U = S, V constant achieves 1

  // Identical Y and Z: the objective is identically zero.
  JointDist s({{"S", 2}}, {0.25, 0.75});
  JointDist sy = apply_channel(s, Channel{{"S"}, {"Y", 2}, {0.8, 0.2, 0.3, 0.7}});
  const JointDist d = apply_channel(sy, Channel::identity("Y", 2, "Z"));
  const OneWayResult same = one_way_rate(d, Roles{{"S"}, {"Y"}, {"Z"}}, light());
  CHECK(std::abs(same.value) <= 1e-6);

  const OneWayResult x = one_way_rate(xor_distribution(), kSYZ, light());
  CHECK(std::abs(x.value) <= 1e-6);
}

TEST_CASE("one-way witnesses achieve the reported value") {
  for (std::uint64_t seed : {3u, 14u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    BoundsOptions o = light();
    o.seed = seed;
    const OneWayResult r = one_way_rate(d, kX012, o);
    const double replay = one_way_objective(d, kX012, r.u_given_s, r.v_given_u);
    CAPTURE(seed);
    CHECK(std::abs(replay - r.value) <= 1e-9);
  }
}

TEST_CASE("intrinsic information on the fixtures") {
  const ChannelBound psb = intrinsic_information(perfect_secret_bit(), kSYZ, light());
  CHECK(std::abs(psb.value - 1.0) <= 1e-6);

  const ChannelBound x = intrinsic_information(xor_distribution(), kSYZ, light());
  CHECK(std::abs(x.value) <= 1e-4);  // constant channel erases Z

  const ChannelBound c = intrinsic_information(copy_distribution(), kSYZ, light());
  CHECK(std::abs(c.value) <= 1e-6);  // identity channel gives I(S;Y|Z) = 0
}

TEST_CASE("intrinsic never exceeds min of cmi and mutual information") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 3, 2}, 1.0, seed);
    BoundsOptions o = light();
    o.seed = seed;
    const ChannelBound r = intrinsic_information(d, kX012, o);
    const double isy = cmi(d, {"X0"}, {"X1"});
    const double isyz = cmi(d, {"X0"}, {"X1"}, {"X2"});
    CAPTURE(seed);
    CHECK(r.value <= std::min(isy, isyz) + 1e-9);
    CHECK(std::abs(intrinsic_objective(d, kX012, r.witness) - r.value) <= 1e-9);
  }
}

TEST_CASE("b1 squeeze on the fixtures") {
  const ChannelBound psb = minimum_intrinsic_information_b1(perfect_secret_bit(), kSYZ, light());
  CHECK(std::abs(psb.value - 1.0) <= 1e-3);  // squeezed between UI = 1 and intrinsic = 1

  const ChannelBound x = minimum_intrinsic_information_b1(xor_distribution(), kSYZ, light());
  CHECK(x.value >= -1e-12);
  CHECK(x.value <= 1e-4);  // sandwiched between UI = 0 and intrinsic = 0
}

TEST_CASE("b1 witness achieves the reported value") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 91);
  const ChannelBound r = minimum_intrinsic_information_b1(d, kX012, light());
  CHECK(std::abs(b1_objective(d, kX012, r.witness) - r.value) <= 1e-9);
}

TEST_CASE("logit gradients match finite differences") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 5);
  Rng rng(17);
  const double h = 1e-5;

  SUBCASE("one-way objective") {
    std::vector<double> lu(2 * 4), lv(4 * 2);
    for (double& v : lu) v = rng.uniform(-2.0, 2.0);
    for (double& v : lv) v = rng.uniform(-2.0, 2.0);
    std::vector<double> gu, gv;
    one_way_value_and_logit_grad(d, kX012, lu, lv, &gu, &gv);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lu.size(); ++i) {
      auto lp = lu, lm = lu;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (one_way_value_and_logit_grad(d, kX012, lp, lv, nullptr, nullptr) -
                         one_way_value_and_logit_grad(d, kX012, lm, lv, nullptr, nullptr)) /
                        (2 * h);
      num += (fd - gu[i]) * (fd - gu[i]);
      den += fd * fd;
    }
    for (std::size_t i = 0; i < lv.size(); ++i) {
      auto lp = lv, lm = lv;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (one_way_value_and_logit_grad(d, kX012, lu, lp, nullptr, nullptr) -
                         one_way_value_and_logit_grad(d, kX012, lu, lm, nullptr, nullptr)) /
                        (2 * h);
      num += (fd - gv[i]) * (fd - gv[i]);
      den += fd * fd;
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(1.0, std::sqrt(den)));
  }

  SUBCASE("intrinsic objective") {
    std::vector<double> l(2 * 2);
    for (double& v : l) v = rng.uniform(-2.0, 2.0);
    std::vector<double> g;
    intrinsic_value_and_logit_grad(d, kX012, l, &g);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      auto lp = l, lm = l;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (intrinsic_value_and_logit_grad(d, kX012, lp, nullptr) -
                         intrinsic_value_and_logit_grad(d, kX012, lm, nullptr)) /
                        (2 * h);
      num += (fd - g[i]) * (fd - g[i]);
      den += fd * fd;
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(1.0, std::sqrt(den)));
  }

  SUBCASE("b1 objective") {
    std::vector<double> l(8 * 8);
    for (double& v : l) v = rng.uniform(-2.0, 2.0);
    std::vector<double> g;
    b1_value_and_logit_grad(d, kX012, l, &g);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      auto lp = l, lm = l;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (b1_value_and_logit_grad(d, kX012, lp, nullptr) -
                         b1_value_and_logit_grad(d, kX012, lm, nullptr)) /
                        (2 * h);
      num += (fd - g[i]) * (fd - g[i]);
      den += fd * fd;
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(1.0, std::sqrt(den)));
  }
}

TEST_CASE("b_sui collapses to UI (Proposition 3 left equality)") {
  for (std::uint64_t seed : {8u, 21u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    BoundsOptions o = light();
    o.seed = seed;
    o.max_evals = 150;
    const ChannelBound bs = b_sui(d, kX012, o);
    const DecompositionResult r = compute_ui(d, kX012, o.ui);
    CAPTURE(seed);
    CHECK(std::abs(bs.value - r.ui) <= 1e-3);
  }
}

TEST_CASE("b_gui sits between UI and B1") {
  for (std::uint64_t seed : {9u, 33u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    BoundsOptions o = light();
    o.seed = seed;
    o.max_evals = 150;
    const BoundsReport rep = bounds_chain(d, kX012, o);
    CAPTURE(seed);
    CHECK(rep.b_gui_upper >= rep.ui - 1e-3);
    CHECK(rep.b_gui_upper <= rep.b1_upper + 1e-3);
  }
}

TEST_CASE("reduced intrinsic heuristic") {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 61);
  BoundsOptions o = light();

  const ChannelBound base = intrinsic_information(d, kX012, o);
  const ChannelBound u1 = reduced_intrinsic_heuristic(d, kX012, 1, o);
  CHECK(std::abs(u1.value - base.value) <= 1e-9);  // constant U adds nothing
  CHECK(u1.flag.find("heuristic") != std::string::npos);

  o.max_evals = 120;
  const ChannelBound u2 = reduced_intrinsic_heuristic(d, kX012, 2, o);
  CHECK(u2.value <= base.value + 1e-9);

  const DecompositionResult r = compute_ui(d, kX012);
  CHECK(u2.value >= r.ui - 1e-3);  // chain placement
}

TEST_CASE("bounds_chain on the fixtures") {
  BoundsOptions o = light();
  o.max_evals = 150;

  const BoundsReport psb = bounds_chain(perfect_secret_bit(), kSYZ, o);
  CHECK(psb.one_way_lower == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psb.ui == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psb.b1_upper == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psb.b_gui_upper == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psb.intrinsic_upper == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psb.cmi == doctest::Approx(1.0).epsilon(1e-3));

  const BoundsReport x = bounds_chain(xor_distribution(), kSYZ, o);
  CHECK(std::abs(x.one_way_lower) <= 1e-4);
  CHECK(std::abs(x.ui) <= 1e-4);
  CHECK(std::abs(x.b1_upper) <= 1e-4);
  CHECK(std::abs(x.intrinsic_upper) <= 1e-4);
  CHECK(x.cmi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bounds_chain ordering and determinism on draws") {
  for (std::uint64_t seed : {2u, 28u, 55u}) {
    const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, seed);
    BoundsOptions o = light();
    o.seed = seed;
    o.max_evals = 100;
    const BoundsReport rep = bounds_chain(d, kX012, o);
    CAPTURE(seed);
    const double tol = rep.ui_gap + 1e-3;
    CHECK(rep.one_way_lower <= rep.ui + tol);
    CHECK(rep.ui <= rep.b1_upper + tol);
    CHECK(rep.b1_upper <= rep.intrinsic_upper + 1e-9);
    CHECK(rep.intrinsic_upper <= rep.cmi + 1e-9);

    const BoundsReport again = bounds_chain(d, kX012, o);
    CHECK(again.one_way_lower == rep.one_way_lower);
    CHECK(again.b1_upper == rep.b1_upper);
    CHECK(again.b_gui_upper == rep.b_gui_upper);
  }
}
