#include "cleanbound/transition.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cleanbound/errors.hpp"
#include "cleanbound/kv.hpp"

namespace cleanbound {

namespace {

// Nearest-rank order statistic: index ceil(p/100 * n) - 1 on the ascending
// sort, so percentile 100 is the maximum.
std::size_t percentile_index(double percentile, std::size_t n) {
  const double rank = std::ceil(percentile / 100.0 * static_cast<double>(n));
  const auto idx = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
  return std::min(idx, n - 1);
}

}  // namespace

TransitionMatrix estimate_transition(std::span<const double> noisy_probs, double percentile) {
  const std::size_t n = noisy_probs.size();
  if (n < 2) throw ValidationError("transition estimation needs at least 2 probe samples");
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw ValidationError("percentile must be in (0,100], got " + format_double(percentile));
  }
  std::vector<double> sorted(noisy_probs.begin(), noisy_probs.end());
  for (double p : sorted) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probe probabilities must be in [0,1], got " + format_double(p));
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = percentile_index(percentile, n);
  // The high anchor's posterior reads off t11; the mirrored low anchor (the
  // same percentile of 1 - probs) reads off t01.
  const double t11 = sorted[idx];
  const double t01 = sorted[n - 1 - idx];
  return TransitionMatrix::from_diagonal(1.0 - t01, t11);
}

NoiseRateEstimate estimate_noise_rate_from_data(std::span<const std::uint8_t> noisy_labels,
                                                const TransitionMatrix& t_hat) {
  if (noisy_labels.empty()) throw ValidationError("noise rate estimation needs labels");
  const double tau = compute_tau(t_hat);
  if (!(tau > 0.0)) {
    throw VacuousBoundError("cannot invert noise rate: tau = " + format_double(tau) +
                            " is not positive");
  }
  double positive_rate = 0.0;
  for (std::uint8_t y : noisy_labels) {
    if (y != 0 && y != 1) throw ValidationError("noisy labels must be 0 or 1");
    positive_rate += y;
  }
  positive_rate /= static_cast<double>(noisy_labels.size());
  // tau > 0 implies t11 > t01, so the denominator is positive.
  const double denom = t_hat.t11() - t_hat.t01();
  const double raw_p1 = (positive_rate - t_hat.t01()) / denom;
  NoiseRateEstimate out;
  out.p1 = std::clamp(raw_p1, 0.0, 1.0);
  out.prior_clamped = raw_p1 != out.p1;
  out.epsilon = 1.0 - ((1.0 - out.p1) * t_hat.t00() + out.p1 * t_hat.t11());
  return out;
}

}  // namespace cleanbound
