#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "extkit/diffkit.hpp"

namespace extkit {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SampleSpec {
  std::vector<Interval> box;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  /// Points within this distance of the singular set are rejected.
  double margin = 0.0;
};

/// near(x, margin): x is within `margin` of the excluded set.
using SingularPredicate = std::function<bool(std::span<const double>, double)>;

struct SampleResult {
  std::vector<PhasePoint> points;
  std::size_t rejected = 0;
};

/// Deterministic uniform samples in `spec.box`. Throws DomainError when more
/// than 99% of the draws are rejected.
SampleResult sample_points(const SampleSpec& spec, const SingularPredicate& singular = {});

/// Uniform doubles in [0, 1) from a 64-bit Mersenne twister; identical on
/// every platform for a given seed.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace extkit
