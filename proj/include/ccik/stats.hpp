#pragma once

#include <utility>

namespace ccik {

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation. a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// Quantile of the Beta(a, b) distribution.
double beta_quantile(double a, double b, double p);

/// 95% (by default) equal-tailed interval from Beta(s + 1/2, f + 1/2)
/// quantiles, with the lower endpoint pinned to 0 when s = 0 and the upper
/// pinned to 1 when f = 0.
std::pair<double, double> jeffreys_interval(int successes, int trials, double confidence = 0.95);

/// Running mean / standard deviation accumulator.
struct RunningStats {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  double sd() const;
};

}  // namespace ccik
