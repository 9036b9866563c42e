// Canonical small distributions used throughout tests, the CLI fixtures and
// the property suite. All variables are bits named S, Y, Z.
#pragma once

#include "uinfo/joint_dist.hpp"

namespace uinfo {

// P(s,y,z) = 1/4 when y = s: a uniform secret bit shared by S and Y with Z
// independent.
inline JointDist perfect_secret_bit() {
  std::vector<double> p(8, 0.0);
  p[0b000] = p[0b001] = p[0b110] = p[0b111] = 0.25;
  return JointDist({{"S", 2}, {"Y", 2}, {"Z", 2}}, std::move(p));
}

// S, Y independent uniform, Z = S xor Y.
inline JointDist xor_distribution() {
  std::vector<double> p(8, 0.0);
  for (int s = 0; s < 2; ++s)
    for (int y = 0; y < 2; ++y) p[(s * 2 + y) * 2 + (s ^ y)] = 0.25;
  return JointDist({{"S", 2}, {"Y", 2}, {"Z", 2}}, std::move(p));
}

// Y, Z independent uniform, S = Y and Z.
inline JointDist and_distribution() {
  std::vector<double> p(8, 0.0);
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) p[((y & z) * 2 + y) * 2 + z] = 0.25;
  return JointDist({{"S", 2}, {"Y", 2}, {"Z", 2}}, std::move(p));
}

// Y = Z = S uniform.
inline JointDist copy_distribution() {
  std::vector<double> p(8, 0.0);
  p[0b000] = p[0b111] = 0.5;
  return JointDist({{"S", 2}, {"Y", 2}, {"Z", 2}}, std::move(p));
}

}  // namespace uinfo
