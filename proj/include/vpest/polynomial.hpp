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

#pragma once

#include <span>

#include <boost/container/static_vector.hpp>

namespace vpest {

template <std::size_t N>
using RootSet = boost::container::static_vector<double, N>;

/// Real roots of a*x^2 + b*x + c. Degrades to the linear case when the
/// leading coefficient is negligible relative to the others. A double root
/// is reported twice.
RootSet<2> real_quadratic_roots(double a, double b, double c);

/// Real roots of a polynomial of degree <= 4, coefficients from the highest
/// degree down. Companion-matrix eigenvalues polished by Newton steps;
/// eigenvalues whose imaginary part is below imag_tol (relative) count as real.
RootSet<4> real_polynomial_roots(std::span<const double> coeffs_high_first,
                                 double imag_tol = 1e-7);

double evaluate_polynomial(std::span<const double> coeffs_high_first, double x);

}  // namespace vpest
