#include "extkit/sampling.hpp"

#include <cmath>

#include "extkit/errors.hpp"

namespace extkit {

SampleResult sample_points(const SampleSpec& spec, const SingularPredicate& singular) {
  if (spec.box.empty()) throw DimensionError("sample box is empty");
  if (spec.count < 1) throw DomainError("sample count must be at least 1");
  for (const Interval& iv : spec.box)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo)
      throw DomainError("sample intervals must be finite with lo <= hi");

  UniformStream rng(spec.seed);
  SampleResult out;
  out.points.reserve(spec.count);
  const std::size_t max_rejected = 99 * spec.count;
  std::vector<double> x(spec.box.size());
  while (out.points.size() < spec.count) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.next(spec.box[i].lo, spec.box[i].hi);
    if (singular && singular(x, spec.margin)) {
      if (++out.rejected > max_rejected)
        throw DomainError("more than 99% of sample draws were rejected as singular");
      continue;
    }
    out.points.emplace_back(x);
  }
  return out;
}

}  // namespace extkit
