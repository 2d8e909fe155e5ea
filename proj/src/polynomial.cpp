// Copyright 2026 The vpest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vpest/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

namespace vpest {

RootSet<2> real_quadratic_roots(double a, double b, double c) {
  RootSet<2> roots;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (!(scale > 0.0) || !std::isfinite(scale)) return roots;
  a /= scale;
  b /= scale;
  c /= scale;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) >= 1e-14) roots.push_back(-c / b);
    return roots;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return roots;
  // Cancellation-free form: q = -(b + sign(b) sqrt(disc)) / 2.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) {
    roots.push_back(0.0);
    roots.push_back(0.0);
    return roots;
  }
  roots.push_back(q / a);
  roots.push_back(c / q);
  return roots;
}

double evaluate_polynomial(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

namespace {

double evaluate_derivative(std::span<const double> coeffs, double x) {
  const std::size_t degree = coeffs.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < degree; ++i) {
    acc = acc * x + coeffs[i] * static_cast<double>(degree - i);
  }
  return acc;
}

}  // namespace

RootSet<4> real_polynomial_roots(std::span<const double> coeffs_high_first,
                                 double imag_tol) {
  RootSet<4> roots;
  double scale = 0.0;
  for (double c : coeffs_high_first) scale = std::max(scale, std::abs(c));
  if (!(scale > 0.0) || !std::isfinite(scale)) return roots;

  // Strip negligible leading coefficients.
  std::size_t first = 0;
  while (first < coeffs_high_first.size() &&
         std::abs(coeffs_high_first[first]) < 1e-14 * scale) {
    ++first;
  }
  const std::size_t n = coeffs_high_first.size() - first;
  if (n <= 1) return roots;
  std::array<double, 5> c{};
  for (std::size_t i = 0; i < n; ++i) c[i] = coeffs_high_first[first + i] / coeffs_high_first[first];
  const std::span<const double> poly(c.data(), n);
  const int degree = static_cast<int>(n) - 1;
  if (degree > 4) return roots;
  if (degree == 1) {
    roots.push_back(-c[1]);
    return roots;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int j = 0; j < degree; ++j) companion(0, j) = -c[j + 1];
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  if (es.info() != Eigen::Success) return roots;

  for (int i = 0; i < degree; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      const double d = evaluate_derivative(poly, x);
      if (d == 0.0) break;
      const double step = evaluate_polynomial(poly, x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace vpest
