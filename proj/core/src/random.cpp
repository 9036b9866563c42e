#include "uinfo/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uinfo {

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("gamma: alpha must be positive");
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(std::size_t n, double concentration) {
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) {
    v = gamma(concentration);
    sum += v;
  }
  if (sum <= 0.0) {  // only reachable for extreme concentrations
    for (auto& v : x) v = 1.0 / static_cast<double>(n);
    return x;
  }
  for (auto& v : x) v /= sum;
  return x;
}

JointDist random_dirichlet(const std::vector<Variable>& shape, double concentration,
                           std::uint64_t seed) {
  if (concentration <= 0.0)
    throw std::invalid_argument("random_dirichlet: concentration must be positive");
  std::size_t cells = 1;
  for (const auto& v : shape) cells *= static_cast<std::size_t>(v.size);
  Rng rng(seed);
  return JointDist::unchecked(shape, rng.dirichlet(cells, concentration));
}

JointDist random_dirichlet(const std::vector<int>& shape, double concentration,
                           std::uint64_t seed) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < shape.size(); ++i)
    vars.push_back({"X" + std::to_string(i), shape[i]});
  return random_dirichlet(vars, concentration, seed);
}

Channel random_channel(const std::vector<std::string>& input_vars, std::size_t in_cells,
                       const Variable& output, Rng& rng) {
  Channel ch{input_vars, output, {}};
  ch.kernel.reserve(in_cells * static_cast<std::size_t>(output.size));
  for (std::size_t r = 0; r < in_cells; ++r) {
    const auto row = rng.dirichlet(static_cast<std::size_t>(output.size), 1.0);
    ch.kernel.insert(ch.kernel.end(), row.begin(), row.end());
  }
  return ch;
}

}  // namespace uinfo
