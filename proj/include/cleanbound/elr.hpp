#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cleanbound/matrix.hpp"
#include "cleanbound/rng.hpp"

namespace cleanbound {

// Model probabilities are clamped into this range before any log.
inline constexpr double kProbClampLo = 1e-7;
inline constexpr double kProbClampHi = 1.0 - 1e-7;

inline double clamp_probability(double p) {
  if (p < kProbClampLo) return kProbClampLo;
  if (p > kProbClampHi) return kProbClampHi;
  return p;
}

enum class CeMode {
  kPositiveOnly,  // -sum_c y ln p: penalizes only missed positives
  kFullBce,       // -sum_c [y ln p + (1-y) ln(1-p)]
};

enum class RegularizerMode {
  kPerLabelMean,  // (1/C) sum_c log(1 - t_c p_c)
  kInnerProduct,  // log(max(1 - (1/C) t.p, 1e-7))
};

struct ElrConfig {
  double lambda = 3.0;
  double beta = 0.7;
  CeMode ce_mode = CeMode::kFullBce;
  RegularizerMode regularizer_mode = RegularizerMode::kPerLabelMean;
  std::optional<double> target_mix_alpha;  // absent disables target mixing

  void validate() const;
};

// Per-sample moving-average targets, one row per training sample. Targets
// start at zero so the regularizer is inert until predictions accumulate.
class ElrState {
 public:
  ElrState(std::size_t n_samples, std::size_t n_classes, double beta);

  // t_i <- beta t_i + (1 - beta) p_i for each id; rows of p_batch correspond
  // to sample_ids in order. Unknown ids are rejected.
  void update_targets(std::span<const std::size_t> sample_ids, const Matrix& p_batch);

  const Matrix& targets() const { return targets_; }
  double beta() const { return beta_; }
  Matrix gather(std::span<const std::size_t> sample_ids) const;

 private:
  Matrix targets_;
  double beta_;
};

struct LossValue {
  double loss = 0.0;
  Matrix grad_p;  // d loss / d p, batch mean included
};

// Batch-mean ELR loss: CE_i + lambda R_i averaged over rows, with analytic
// gradient with respect to the probabilities. Probabilities must already be
// clamped into (0,1); targets/labels must match the batch shape.
LossValue elr_loss(const Matrix& p_batch, const BinaryMatrix& noisy_labels_batch,
                   const Matrix& targets_batch, double lambda, CeMode ce_mode,
                   RegularizerMode regularizer_mode);

// Convex combination a t_i + (1-a) t_j with a ~ Beta(alpha, alpha).
std::vector<double> mix_targets(std::span<const double> t_i, std::span<const double> t_j,
                                double alpha, std::uint64_t seed);

// In-place batch variant used by the training loop: one Beta draw and one
// pairing permutation per batch, drawn from rng.
void mix_targets_batch(Matrix& targets_batch, double alpha, SplitRng& rng);

}  // namespace cleanbound
