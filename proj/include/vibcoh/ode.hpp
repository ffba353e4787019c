// Copyright 2026 The vibcoh Authors
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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "vibcoh/errors.hpp"

namespace vibcoh {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 picks a fraction of the first interval
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Dormand-Prince 5(4) with step-size control. Y is any Eigen dense type; the
// integrator lands exactly on every requested output time.
template <class Y, class F>
std::vector<Y> integrate_dopri5(F&& f, const Y& y0, const std::vector<double>& times, const OdeOptions& opt = {},
                                OdeStats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<Y> out;
  if (times.empty()) return out;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] >= times[i - 1])) throw std::invalid_argument("output times must be nondecreasing");
  }
  out.reserve(times.size());
  out.push_back(y0);

  Y y = y0;
  double t = times.front();
  double h = opt.initial_step > 0 ? opt.initial_step : 0.0;
  Y k1 = f(t, y);
  std::size_t steps = 0;

  for (std::size_t idx = 1; idx < times.size(); ++idx) {
    const double t_target = times[idx];
    if (h <= 0.0) h = std::min(opt.max_step, std::max(1e-6, (t_target - t) / 100.0));
    while (t < t_target) {
      if (++steps > opt.max_steps) throw NumericalError("integrator exceeded the step budget");
      bool last = false;
      double hs = std::min(h, opt.max_step);
      if (t + hs >= t_target) {
        hs = t_target - t;
        last = true;
      }
      const Y k2 = f(t + c2 * hs, Y(y + hs * (a21 * k1)));
      const Y k3 = f(t + c3 * hs, Y(y + hs * (a31 * k1 + a32 * k2)));
      const Y k4 = f(t + c4 * hs, Y(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
      const Y k5 = f(t + c5 * hs, Y(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const Y k6 = f(t + hs, Y(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      Y y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Y k7 = f(t + hs, y5);
      const Y err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const auto scale = (opt.atol + opt.rtol * y.cwiseAbs().cwiseMax(y5.cwiseAbs()).array()).eval();
      const double en = (err.cwiseAbs().array() / scale).maxCoeff();
      if (!std::isfinite(en)) throw NumericalError("integrator produced a non-finite error estimate");
      if (en <= 1.0) {
        t = last ? t_target : t + hs;
        y = std::move(y5);
        k1 = k7;
        if (stats) ++stats->accepted;
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // Keep the natural step when the last one was clipped to the grid.
        h = last ? std::max(h, hs * fac) : hs * fac;
      } else {
        if (stats) ++stats->rejected;
        h = hs * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
          std::ostringstream os;
          os << "integrator step size underflow at t = " << t;
          throw NumericalError(os.str());
        }
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace vibcoh
