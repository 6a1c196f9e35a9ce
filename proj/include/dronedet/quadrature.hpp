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
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dronedet/error.hpp"

namespace dronedet::quad {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;
  int max_intervals = 200;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel eval_panel(F& f, double lo, double hi) {
  double err = 0.0;
  const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
  return {lo, hi, v, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) over the finite panels delimited by
/// `breaks`. The panel with the largest error estimate is bisected until the
/// summed estimate drops below max(tol.abs, tol.rel * |I|).
template <typename F>
Result integrate(F&& f, const std::vector<double>& breaks, const Tolerance& tol = {}) {
  if (breaks.size() < 2) throw InvalidParams("quadrature needs at least two break points");
  std::priority_queue<detail::Panel> panels;
  Result out;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto p = detail::eval_panel(f, breaks[i], breaks[i + 1]);
    out.evaluations += 15;
    total += p.value;
    total_err += p.error;
    panels.push(p);
  }
  int count = static_cast<int>(panels.size());
  while (!panels.empty()) {
    if (total_err <= std::max(tol.abs, tol.rel * std::abs(total))) {
      out.converged = true;
      break;
    }
    if (count >= tol.max_intervals) break;
    const auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // interval exhausted
    auto left = detail::eval_panel(f, worst.lo, mid);
    auto right = detail::eval_panel(f, mid, worst.hi);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  if (panels.empty()) out.converged = true;
  // Re-sum to shed the cancellation error of the running updates.
  double resum = 0.0;
  double err_sum = 0.0;
  while (!panels.empty()) {
    resum += panels.top().value;
    err_sum += panels.top().error;
    panels.pop();
  }
  out.value = resum;
  out.error = err_sum;
  if (!std::isfinite(out.value)) {
    std::ostringstream msg;
    msg << "quadrature produced a non-finite value on [" << breaks.front() << ", "
        << breaks.back() << "]";
    throw QuadratureFailure(msg.str());
  }
  return out;
}

template <typename F>
Result integrate(F&& f, double lo, double hi, const Tolerance& tol = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{lo, hi}, tol);
}

/// Like integrate() but raises QuadratureFailure when the error estimate
/// stays above `fail_above`.
template <typename F>
double integrate_checked(F&& f, const std::vector<double>& breaks, const Tolerance& tol,
                         double fail_above) {
  const auto r = integrate(std::forward<F>(f), breaks, tol);
  if (!r.converged && r.error > fail_above) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << breaks.front() << ", " << breaks.back()
        << "]: value " << r.value << ", error estimate " << r.error << " after "
        << r.evaluations << " evaluations";
    throw QuadratureFailure(msg.str());
  }
  return r.value;
}

}  // namespace dronedet::quad
