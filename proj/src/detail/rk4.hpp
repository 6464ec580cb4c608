#pragma once

#include <span>
#include <vector>

#include "rmf/types.hpp"

namespace rmf::detail {

// Classical RK4 over a sample grid. Stations: 2*i is node i, 2*i+1 the
// midpoint of [i, i+1]. `rhs(station, v)` is the field derivative there;
// `correct(i, v)` re-projects the state at node i in place and returns the
// pre-correction drift.
template <class Rhs, class Correct>
void rk4_sweep(std::span<const double> params, Vec v, Rhs&& rhs, Correct&& correct, std::vector<Vec>& states,
               std::vector<double>& drift) {
  states.clear();
  drift.clear();
  states.push_back(v);
  drift.push_back(0.0);
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    const double h = params[i + 1] - params[i];
    const Vec k1 = rhs(2 * i, v);
    const Vec k2 = rhs(2 * i + 1, Vec(v + 0.5 * h * k1));
    const Vec k3 = rhs(2 * i + 1, Vec(v + 0.5 * h * k2));
    const Vec k4 = rhs(2 * i + 2, Vec(v + h * k3));
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    drift.push_back(correct(i + 1, v));
    states.push_back(v);
  }
}

}  // namespace rmf::detail
