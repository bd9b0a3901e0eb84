#pragma once

#include <span>

#include "cleanbound/noise.hpp"

namespace cleanbound {

// Anchor-point estimate of a 2x2 transition matrix from a model's noisy
// posteriors over a probe set, no clean labels needed. The class-1 anchor is
// the sample at the given percentile of the probabilities (100 picks the
// max); the class-0 anchor mirrors it at the low end. At a true anchor the
// noisy posterior equals the corresponding transition row.
TransitionMatrix estimate_transition(std::span<const double> noisy_probs, double percentile);

struct NoiseRateEstimate {
  double epsilon = 0.0;
  double p1 = 0.0;          // estimated positive prior, after clamping
  bool prior_clamped = false;  // the inverted prior fell outside [0,1]
};

// Recovers the unobservable prior by inverting the noisy positive rate
// through the estimated matrix, p1 = (mean(y~) - t01) / (t11 - t01), then
// epsilon = 1 - p0 t00 - p1 t11. Requires tau(t_hat) > 0.
NoiseRateEstimate estimate_noise_rate_from_data(std::span<const std::uint8_t> noisy_labels,
                                                const TransitionMatrix& t_hat);

}  // namespace cleanbound
