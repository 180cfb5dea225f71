#pragma once

#include <cmath>

#include "chtubes/errors.hpp"
#include "chtubes/linalg.hpp"

namespace chtubes {

// Classical fixed-step RK4 from 0 to t. The step count is ceil(|t|/step) and
// the actual step is t/count, so the endpoint is hit exactly.
template <class Rhs>
Vec integrate_rk4(Vec state, double t, double step, Rhs&& rhs) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "integration step must be positive");
  if (t == 0.0) return state;
  const auto count = static_cast<long>(std::ceil(std::abs(t) / step - 1e-9));
  const double h = t / static_cast<double>(count < 1 ? 1 : count);
  for (long i = 0; i < (count < 1 ? 1 : count); ++i) {
    const Vec k1 = rhs(state);
    const Vec k2 = rhs(Vec(state + 0.5 * h * k1));
    const Vec k3 = rhs(Vec(state + 0.5 * h * k2));
    const Vec k4 = rhs(Vec(state + h * k3));
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return state;
}

}  // namespace chtubes
