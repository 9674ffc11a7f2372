/*
 * Copyright 2026 The emrates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "emrates/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <vector>

#include "emrates/errors.hpp"
#include "emrates/rng.hpp"

namespace emrates::stats {

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double residual = 0.0;
  for (const double v : values) residual += v - s.mean;
  s.mean += residual / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::pair<double, double> lp_norm_from_powers(std::span<const double> powers, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("moment order p must be >= 1");
  const SampleSummary s = summarize(powers);
  if (s.mean == 0.0) return {0.0, 0.0};
  const double estimate = std::pow(s.mean, 1.0 / p);
  const double mean_se = s.stddev / std::sqrt(static_cast<double>(s.count));
  return {estimate, estimate / (p * s.mean) * mean_se};
}

double bootstrap_lp_stderr(std::span<const double> powers, double p, int resamples,
                           std::uint64_t seed) {
  if (powers.empty() || resamples < 2) throw InvalidArgument("bootstrap needs data and >= 2 resamples");
  const auto n = static_cast<std::uint64_t>(powers.size());
  std::vector<double> estimates(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    RngStream rng(seed, static_cast<std::uint64_t>(b));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) sum += powers[rng.next_u64() % n];
    estimates[static_cast<std::size_t>(b)] = std::pow(sum / static_cast<double>(n), 1.0 / p);
  }
  return summarize(estimates).stddev;
}

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("regression inputs differ in length");
  if (x.size() < 2) throw InvalidArgument("regression needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("regression abscissae are all equal");
  LinearFit fit;
  fit.points = static_cast<std::int64_t>(x.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  fit.slope_stderr = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double student_t_quantile(double probability, double dof) {
  return boost::math::quantile(boost::math::students_t(dof), probability);
}

double normal_two_sided_quantile(double level) {
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
}

std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw InvalidArgument("binomial interval needs 0 <= successes <= trials, trials >= 1");
  using boost::math::binomial_distribution;
  const double alpha = 0.5 * (1.0 - level);
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  const double lo = binomial_distribution<>::find_lower_bound_on_p(n, k, alpha);
  const double hi = binomial_distribution<>::find_upper_bound_on_p(n, k, alpha);
  return {lo, hi};
}

double gaussian_norm_tail(int d, double variance, double threshold) {
  if (variance <= 0.0) return 0.0;
  const double x = threshold * threshold / variance;
  if (d == 1) return std::erfc(threshold / std::sqrt(2.0 * variance));
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(d), x));
}

}  // namespace emrates::stats
