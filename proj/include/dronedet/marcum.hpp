// SPDX-License-Identifier: Apache-2.0
//
// dronedet: RSS-based drone detection in a Poisson field of interferers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dronedet/error.hpp"

namespace dronedet {
namespace detail {

// Double-precision evaluation is enough here; the default promotion to long
// double roughly triples the cost of the incomplete gamma calls.
using MarcumPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

/// sum_j Pois(j; x) * P(Pois(y) <= j - shift), shift in {0, 1}.
///
/// Every term is nonnegative, so the partial sums carry full relative
/// precision. Indices below x - 10 sqrt(x) - 5 carry less than e^-50 of the
/// x-mass against a factor P(Pois(y) <= j - shift) that is increasing in j,
/// so the sum starts there; its first factors come from the regularised
/// incomplete gamma function and the rest by forward recurrence. Truncating
/// after index J leaves a remainder bounded by p(J+1) / (1 - x / (J+2)) once
/// J + 2 > x; the loop stops when that bound is below 1e-17 of the sum, or
/// earlier once the y-factor has reached 1 and the remaining x-tail is
/// taken in closed form. Sums below about 1e-290 are returned as 0, and
/// sums within 4e-18 of 1 as 1.
inline double poisson_dominance_sum(double x, double y, int shift) {
  // Chernoff: P(N_y <= N_x) and P(N_y >= N_x) are at most
  // exp(-(sqrt(x) - sqrt(y))^2) when the mean on the other side is larger.
  const double gap = std::sqrt(x) - std::sqrt(y);
  if (gap < 0.0 && gap * gap > 690.0) return 0.0;
  if (gap > 0.0 && gap * gap > 40.0) return 1.0;

  constexpr double kFloor = 1e-290;
  const double j_max = x + y + 60.0 * std::sqrt(x + y + 1.0) + 400.0;
  double j = std::max(std::floor(x - 10.0 * std::sqrt(x) - 5.0), static_cast<double>(shift));

  // P(Pois(y) <= j - shift) = Q(j - shift + 1, y), the regularised upper
  // incomplete gamma function. Far above the y-mode it is 1.
  auto cdf_y_at = [&](double jj) {
    const double k = jj - shift;
    if (k >= y + 10.0 * std::sqrt(y) + 5.0) return 1.0;
    if (k == 0.0) return std::exp(-y);
    return boost::math::gamma_q(k + 1.0, y, MarcumPolicy());
  };
  if (cdf_y_at(j) < kFloor) {
    // Move to the first index where the y-factor is representable.
    double lo = j, hi = std::max(j + 1.0, j_max);
    if (cdf_y_at(hi) < kFloor) return 0.0;
    while (hi - lo > 1.0) {
      const double mid = std::floor(0.5 * (lo + hi));
      (cdf_y_at(mid) < kFloor ? lo : hi) = mid;
    }
    j = hi;
  }

  constexpr double kOne = 1.0 - 4.5e-16;
  double cdf_y = cdf_y_at(j);
  const double cut = x - 10.0 * std::sqrt(x) - 5.0;
  if (cdf_y >= kOne && (j == 0.0 || j <= cut)) return 1.0;

  double px, py;  // Pois(j; x), Pois(j - shift; y)
  if (j == shift && x < 700.0 && y < 700.0) {
    px = shift == 0 ? std::exp(-x) : x * std::exp(-x);
    py = std::exp(-y);
  } else {
    px = boost::math::gamma_p_derivative(j + 1.0, x, MarcumPolicy());
    py = boost::math::gamma_p_derivative(j - shift + 1.0, y, MarcumPolicy());
  }
  double sum = 0.0;
  for (;; j += 1.0) {
    if (cdf_y >= kOne) {
      // The y-factor is 1 from here on; the rest is P(Pois(x) >= j).
      return sum + (j == 0.0 ? 1.0 : boost::math::gamma_p(j, x, MarcumPolicy()));
    }
    sum += px * cdf_y;
    const double next_px = px * x / (j + 1.0);
    if (j + 2.0 > x) {
      const double tail = next_px / (1.0 - x / (j + 2.0));
      if (tail <= 1e-17 * sum || tail < 1e-300) break;
    }
    if (j > j_max) break;
    px = next_px;
    py *= y / (j + 1.0 - shift);
    cdf_y += py;
  }
  return sum;
}

}  // namespace detail

/// First-order Marcum Q function Q_1(a, b), the CCDF at b of the Rician
/// envelope with noncentrality a.
///
/// Uses the Poisson mixture of chi-squared tails
///   Q_1(a, b) = sum_k Pois(k; a^2/2) P(chi^2_{2k+2} > b^2)
///             = sum_k Pois(k; a^2/2) P(Pois(b^2/2) <= k),
/// i.e. Q_1 = P(N_b <= N_a) for independent Poisson counts with means
/// a^2/2 and b^2/2.
inline double marcum_q1(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q1 requires a >= 0 and b >= 0");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  return std::clamp(detail::poisson_dominance_sum(0.5 * a * a, 0.5 * b * b, 0), 0.0, 1.0);
}

/// 1 - Q_1(a, b) = P(N_a < N_b), summed directly so small values keep their
/// relative precision.
inline double marcum_q1_complement(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q1 requires a >= 0 and b >= 0");
  if (b == 0.0) return 0.0;
  if (a == 0.0) return -std::expm1(-0.5 * b * b);
  return std::clamp(detail::poisson_dominance_sum(0.5 * b * b, 0.5 * a * a, 1), 0.0, 1.0);
}

}  // namespace dronedet
