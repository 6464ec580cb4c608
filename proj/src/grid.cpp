#include "rmf/grid.hpp"

#include <algorithm>
#include <array>

#include "rmf/errors.hpp"

namespace rmf {
namespace {

struct Node {
  std::size_t index;
  double param;
};

// Sample at logical position i (may be < 0 or >= n on closed grids).
Node node_at(std::span<const double> params, long i, bool closed) {
  const long n = static_cast<long>(params.size());
  if (!closed || (i >= 0 && i < n)) return {static_cast<std::size_t>(i), params[static_cast<std::size_t>(i)]};
  const long m = n - 1;  // distinct samples
  const double period = params.back() - params.front();
  long k = i;
  double shift = 0.0;
  while (k < 0) {
    k += m;
    shift -= period;
  }
  while (k >= n) {
    k -= m;
    shift += period;
  }
  return {static_cast<std::size_t>(k), params[static_cast<std::size_t>(k)] + shift};
}

// Weights of the quadratic through (x0, x1, x2) for f' and f'' at x.
std::array<double, 3> quad_d1(double x0, double x1, double x2, double x) {
  return {((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)),
          ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)),
          ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1))};
}

std::array<double, 3> quad_d2(double x0, double x1, double x2) {
  return {2.0 / ((x0 - x1) * (x0 - x2)), 2.0 / ((x1 - x0) * (x1 - x2)),
          2.0 / ((x2 - x0) * (x2 - x1))};
}

void check(std::span<const double> params, std::span<const Vec> table, std::size_t minimum) {
  if (params.size() != table.size())
    throw ValidationError("grid: parameter and value tables differ in length");
  if (params.size() < minimum)
    throw ValidationError("grid: at least " + std::to_string(minimum) + " samples required");
}

template <class Weights>
std::vector<Vec> apply_stencil(std::span<const double> params, std::span<const Vec> table, bool closed,
                               Weights&& weights) {
  check(params, table, 3);
  const long n = static_cast<long>(params.size());
  std::vector<Vec> out(params.size());
  for (long i = 0; i < n; ++i) {
    long first = i - 1;
    if (!closed) first = std::clamp(first, 0L, n - 3);
    const Node a = node_at(params, first, closed);
    const Node b = node_at(params, first + 1, closed);
    const Node c = node_at(params, first + 2, closed);
    const auto w = weights(a.param, b.param, c.param, params[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = w[0] * table[a.index] + w[1] * table[b.index] + w[2] * table[c.index];
  }
  return out;
}

}  // namespace

std::vector<Vec> differentiate(std::span<const double> params, std::span<const Vec> table, bool closed) {
  return apply_stencil(params, table, closed,
                       [](double x0, double x1, double x2, double x) { return quad_d1(x0, x1, x2, x); });
}

std::vector<Vec> differentiate2(std::span<const double> params, std::span<const Vec> table, bool closed) {
  return apply_stencil(params, table, closed,
                       [](double x0, double x1, double x2, double) { return quad_d2(x0, x1, x2); });
}

std::vector<Vec> cubic_midpoints(std::span<const double> params, std::span<const Vec> table, bool closed) {
  check(params, table, 4);
  const long n = static_cast<long>(params.size());
  std::vector<Vec> out;
  out.reserve(params.size() - 1);
  for (long i = 0; i + 1 < n; ++i) {
    long first = i - 1;
    if (!closed) first = std::clamp(first, 0L, n - 4);
    std::array<Node, 4> nodes;
    for (int k = 0; k < 4; ++k) nodes[k] = node_at(params, first + k, closed);
    const double x = 0.5 * (params[static_cast<std::size_t>(i)] + params[static_cast<std::size_t>(i + 1)]);
    Vec value = Vec::Zero(table[0].size());
    for (int k = 0; k < 4; ++k) {
      double w = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != k) w *= (x - nodes[m].param) / (nodes[k].param - nodes[m].param);
      value += w * table[nodes[k].index];
    }
    out.push_back(std::move(value));
  }
  return out;
}

}  // namespace rmf
