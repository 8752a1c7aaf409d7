// Copyright 2026 The SDMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sdmm::analysis {

Exponents predict_exponents(double epsilon, double omega) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("epsilon must lie in [0, 1]");
  if (!(omega >= 2.0)) throw UsageError("omega must be >= 2");
  Exponents e;
  e.user = 2.0 + 2.0 * epsilon;
  e.server = omega - epsilon * (omega - 1.0);
  e.upload = 2.0 + epsilon;
  e.download = 2.0;
  e.total = std::max(epsilon + omega - epsilon * omega, 2.0 + 2.0 * epsilon);
  return e;
}

Optimum optimize_epsilon(double omega) {
  if (!(omega >= 2.0 && omega <= 3.0)) throw UsageError("omega must lie in [2, 3]");
  Optimum o;
  o.epsilon = (omega - 2.0) / (omega + 1.0);
  o.total = 4.0 - 6.0 / (omega + 1.0);
  const double user = 2.0 + 2.0 * o.epsilon;
  const double server = o.epsilon + omega - o.epsilon * omega;
  if (std::abs(user - server) > 1e-12 || std::abs(user - o.total) > 1e-12)
    throw std::logic_error("optimize_epsilon: branches do not meet at the optimum");
  return o;
}

std::vector<TradeoffPoint> tradeoff_curve(double omega, std::size_t points) {
  if (points < 2) throw UsageError("tradeoff curve needs at least two points");
  std::vector<TradeoffPoint> out;
  out.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double eps = static_cast<double>(i) / static_cast<double>(points - 1);
    const auto e = predict_exponents(eps, omega);
    out.push_back({omega, eps, e.user, e.server, e.total});
  }
  return out;
}

std::vector<Optimum> optimum_curve(std::span<const double> omegas) {
  std::vector<Optimum> out;
  for (double w : omegas) out.push_back(optimize_epsilon(w));
  return out;
}

void emit_tradeoff_curves(std::ostream& out, std::span<const double> omegas, std::size_t points) {
  const auto old_precision = out.precision(12);
  out << "curve,omega,epsilon,user_exponent,server_exponent,total_exponent\n";
  for (double w : omegas) {
    for (const auto& p : tradeoff_curve(w, points))
      out << "A," << p.omega << ',' << p.epsilon << ',' << p.user << ',' << p.server << ',' << p.total
          << '\n';
  }
  for (double w : omegas) {
    const auto o = optimize_epsilon(w);
    const double user = 2.0 + 2.0 * o.epsilon;
    out << "B," << w << ',' << o.epsilon << ',' << user << ',' << user << ',' << o.total << '\n';
  }
  out.precision(old_precision);
}

FieldSizeReport field_size_report(std::size_t K, std::size_t L, std::size_t T) {
  const auto ev = gasp_exponents(K, L, T);
  const auto dt = build_degree_table(ev.alpha, ev.beta, T);
  FieldSizeReport r{K, L, T, required_field_size(dt, T), 0};
  r.prime = next_prime_above(r.bound.bound);
  return r;
}

void write_field_size_csv(std::ostream& out, const FieldSizeReport& r, bool header) {
  if (header) out << "K,L,T,N,W,J,binom,bound,prime\n";
  out << r.K << ',' << r.L << ',' << r.T << ',' << r.bound.N << ',' << r.bound.W << ',' << r.bound.J << ','
      << r.bound.binom << ',' << r.bound.bound << ',' << r.prime << '\n';
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("least_squares needs >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw UsageError("least_squares: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace sdmm::analysis
