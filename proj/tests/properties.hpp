#pragma once

#include <cstdint>
#include <string>

// Randomized invariant checks shared by the property tests and the
// acceptance binary. Each check draws `count` instances from a fixed seed.
namespace masharp::props {

struct Outcome {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  ///< largest violation measure seen
  std::string first_failure;

  bool ok() const { return instances > 0 && failures == 0; }
};

/// hessian_field reproduces the Hessian of random quadratics to 1e-10.
Outcome quadratic_exactness(std::uint64_t seed, int count);
/// f1 <= f2 implies u1 >= u2 - 1e-8 sup|u2|.
Outcome comparison_principle(std::uint64_t seed, int count);
/// Solutions for c f and f differ by the factor c^(1/n).
Outcome scaling_law(std::uint64_t seed, int count);
/// Sublevel sets A_h and shrunk domains Omega_h decrease as h grows.
Outcome nested_families(std::uint64_t seed, int count);
/// Two runs of the same experiment write byte-identical artifacts.
Outcome artifact_determinism(std::uint64_t seed, int count, const std::string& scratch_dir);

}  // namespace masharp::props
