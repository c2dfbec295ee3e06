#pragma once

// Test-side oracles, independent of the library's computation paths:
// grid minimization for proximal maps, dense sphere sampling for matrix
// moduli, and piecewise-affine builders from knot lists.

#include <cmath>
#include <functional>
#include <vector>

#include "averop/operator.hpp"

namespace oracles {

using averop::Matrix;
using averop::Operator;
using averop::Vector;

// argmin of f over a uniform grid on [lo, hi]
inline double grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int steps) {
  double best_x = lo, best_v = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / steps;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

// sup of ||(I-M)x||^2 / (2 <x, (I-M)x>) over a dense set of unit vectors;
// a lower bound on the modulus of averagedness of a nonexpansive matrix
inline double sphere_sampled_modulus(const Matrix& M, int samples) {
  const Eigen::Index n = M.rows();
  const Matrix B = Matrix::Identity(n, n) - M;
  double best = 0.0;
  if (n == 2) {
    for (int i = 0; i < samples; ++i) {
      const double a = 2.0 * M_PI * i / samples;
      Vector x(2);
      x << std::cos(a), std::sin(a);
      Vector bx = B * x;
      const double den = x.dot(bx);
      if (den > 1e-14) best = std::max(best, bx.squaredNorm() / (2.0 * den));
    }
  } else {
    unsigned long long state = 0x9e3779b97f4a7c15ULL;
    auto next = [&state]() {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      return static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    };
    for (int i = 0; i < samples; ++i) {
      Vector x(n);
      for (Eigen::Index k = 0; k < n; ++k) x(k) = next();
      if (x.norm() == 0.0) continue;
      x.normalize();
      Vector bx = B * x;
      const double den = x.dot(bx);
      if (den > 1e-14) best = std::max(best, bx.squaredNorm() / (2.0 * den));
    }
  }
  return best;
}

// continuous piecewise-affine operator through the knots (xs[i], ys[i]),
// extended by the given end slopes
inline Operator piecewise_from_knots(const std::vector<double>& xs, const std::vector<double>& ys,
                                     double left_slope, double right_slope) {
  const size_t k = xs.size();
  std::vector<double> breakpoints(xs);
  std::vector<averop::ops::AffinePiece> pieces;
  pieces.push_back({left_slope, ys.front() - left_slope * xs.front()});
  for (size_t i = 0; i + 1 < k; ++i) {
    const double s = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    pieces.push_back({s, ys[i] - s * xs[i]});
  }
  pieces.push_back({right_slope, ys.back() - right_slope * xs.back()});
  return Operator::scalar_piecewise(std::move(breakpoints), std::move(pieces));
}

// chord surrogate of the increasing odd map x -> ln(x) for x >= e,
// x/e in between, truncated at the given radius
inline Operator log_like_surrogate(double radius, int knots_per_side) {
  const double e = std::exp(1.0);
  std::vector<double> xs, ys;
  const double ratio = std::pow(radius / e, 1.0 / knots_per_side);
  std::vector<double> right;
  double t = e;
  for (int i = 0; i <= knots_per_side; ++i) {
    right.push_back(t);
    t *= ratio;
  }
  right.back() = radius;
  for (auto it = right.rbegin(); it != right.rend(); ++it) {
    xs.push_back(-*it);
    ys.push_back(-std::log(*it));
  }
  for (double r : right) {
    xs.push_back(r);
    ys.push_back(std::log(r));
  }
  const double end_slope =
      (std::log(right[knots_per_side]) - std::log(right[knots_per_side - 1])) /
      (right[knots_per_side] - right[knots_per_side - 1]);
  return piecewise_from_knots(xs, ys, end_slope, end_slope);
}

// the piecewise map with slopes {0, 1, -1/2} and its limiting variant
inline Operator paper_scalar_map() {
  return piecewise_from_knots({0.0, 1.0}, {0.0, 1.0}, 0.0, -0.5);
}
inline Operator paper_scalar_map_limit() {
  return piecewise_from_knots({0.0, 1.0, 3.0}, {0.0, 1.0, 0.0}, 0.0, 0.0);
}

}  // namespace oracles
