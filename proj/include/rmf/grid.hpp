#pragma once

// Differencing and interpolation on sample grids.
//
// Closed grids repeat the first sample at the end (params.back() is the
// parameter of the same point one period later); stencils wrap across that
// seam. Open grids use one-sided stencils at the ends.

#include <span>
#include <vector>

#include "rmf/types.hpp"

namespace rmf {

/// First derivative by local quadratic fits through three consecutive samples
/// (second order, nonuniform spacing allowed).
std::vector<Vec> differentiate(std::span<const double> params, std::span<const Vec> table,
                               bool closed);

/// Second derivative from the same quadratic fits.
std::vector<Vec> differentiate2(std::span<const double> params, std::span<const Vec> table,
                                bool closed);

/// Values at the interval midpoints (params[i] + params[i+1]) / 2 by cubic
/// Lagrange interpolation through four neighbouring samples. Requires at
/// least four samples.
std::vector<Vec> cubic_midpoints(std::span<const double> params, std::span<const Vec> table,
                                 bool closed);

}  // namespace rmf
