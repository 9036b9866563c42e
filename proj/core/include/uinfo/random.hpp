// Deterministic random draws for fixtures and property ensembles. The
// samplers are implemented on top of raw mt19937_64 output so that a seed
// produces bit-identical streams regardless of the standard library.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "uinfo/joint_dist.hpp"

namespace uinfo {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal (Box-Muller).
  double normal();
  // Gamma(alpha, 1) via Marsaglia-Tsang, boosted for alpha < 1.
  double gamma(double alpha);
  std::vector<double> dirichlet(std::size_t n, double concentration);
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Symmetric-Dirichlet joint distribution; same seed gives bit-identical output.
JointDist random_dirichlet(const std::vector<Variable>& shape, double concentration,
                           std::uint64_t seed);
// Shape given as sizes only; variables are named X0, X1, ...
JointDist random_dirichlet(const std::vector<int>& shape, double concentration,
                           std::uint64_t seed);

// Channel with independent Dirichlet(1) rows.
Channel random_channel(const std::vector<std::string>& input_vars, std::size_t in_cells,
                       const Variable& output, Rng& rng);

}  // namespace uinfo
