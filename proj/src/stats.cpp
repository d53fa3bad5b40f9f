#include "ccik/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ccik {

namespace {

// Lentz continued fraction for the incomplete beta, convergent for
// x < (a + 1) / (a + b + 2).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const int i2 = 2 * i;
    double aa = i * (b - i) * x / ((qam + i2) * (a + i2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + i) * (qab + i) * x / ((a + i2) * (qap + i2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  // Bisection is monotone-safe; 200 halvings reach full double resolution.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (regularized_incomplete_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> jeffreys_interval(int successes, int trials, double confidence) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("successes must lie in [0, trials]");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0, 1)");
  const double a = successes + 0.5;
  const double b = (trials - successes) + 0.5;
  const double tail = 0.5 * (1.0 - confidence);
  double lo = successes == 0 ? 0.0 : beta_quantile(a, b, tail);
  double hi = successes == trials ? 1.0 : beta_quantile(a, b, 1.0 - tail);
  return {lo, hi};
}

void RunningStats::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

double RunningStats::sd() const {
  if (count < 2) return 0.0;
  return std::sqrt(m2 / static_cast<double>(count - 1));
}

}  // namespace ccik
