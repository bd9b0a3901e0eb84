#include "cleanbound/elr.hpp"

#include <cmath>

#include "cleanbound/errors.hpp"
#include "cleanbound/kv.hpp"

namespace cleanbound {

void ElrConfig::validate() const {
  if (!(lambda >= 0.0)) throw ValidationError("elr.lambda must be >= 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("elr.beta must be in [0,1)");
  if (target_mix_alpha && !(*target_mix_alpha > 0.0)) {
    throw ValidationError("elr.target_mix_alpha must be > 0");
  }
}

ElrState::ElrState(std::size_t n_samples, std::size_t n_classes, double beta)
    : targets_(n_samples, n_classes, 0.0), beta_(beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("elr beta must be in [0,1]");
}

void ElrState::update_targets(std::span<const std::size_t> sample_ids, const Matrix& p_batch) {
  if (sample_ids.size() != p_batch.rows() || p_batch.cols() != targets_.cols()) {
    throw ValidationError("target update batch shape mismatch");
  }
  for (std::size_t r = 0; r < sample_ids.size(); ++r) {
    const std::size_t id = sample_ids[r];
    if (id >= targets_.rows()) {
      throw ValidationError("unknown sample id " + std::to_string(id) + " in target update");
    }
    for (std::size_t c = 0; c < targets_.cols(); ++c) {
      targets_(id, c) = beta_ * targets_(id, c) + (1.0 - beta_) * p_batch(r, c);
    }
  }
}

Matrix ElrState::gather(std::span<const std::size_t> sample_ids) const {
  Matrix out(sample_ids.size(), targets_.cols());
  for (std::size_t r = 0; r < sample_ids.size(); ++r) {
    const std::size_t id = sample_ids[r];
    if (id >= targets_.rows()) {
      throw ValidationError("unknown sample id " + std::to_string(id) + " in target gather");
    }
    for (std::size_t c = 0; c < targets_.cols(); ++c) out(r, c) = targets_(id, c);
  }
  return out;
}

LossValue elr_loss(const Matrix& p_batch, const BinaryMatrix& noisy_labels_batch,
                   const Matrix& targets_batch, double lambda, CeMode ce_mode,
                   RegularizerMode regularizer_mode) {
  const std::size_t batch = p_batch.rows();
  const std::size_t num_classes = p_batch.cols();
  if (batch == 0) throw ValidationError("loss on empty batch");
  if (noisy_labels_batch.rows() != batch || noisy_labels_batch.cols() != num_classes ||
      targets_batch.rows() != batch || targets_batch.cols() != num_classes) {
    throw ValidationError("loss batch shape mismatch");
  }
  LossValue out;
  out.grad_p = Matrix(batch, num_classes);
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const double inv_classes = 1.0 / static_cast<double>(num_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    double ce = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double p = p_batch(i, c);
      const double y = noisy_labels_batch(i, c);
      double g;
      if (ce_mode == CeMode::kPositiveOnly) {
        ce -= y * std::log(p);
        g = -y / p;
      } else {
        ce -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        g = -y / p + (1.0 - y) / (1.0 - p);
      }
      out.grad_p(i, c) = g * inv_batch;
    }
    double reg = 0.0;
    if (lambda != 0.0) {
      if (regularizer_mode == RegularizerMode::kPerLabelMean) {
        for (std::size_t c = 0; c < num_classes; ++c) {
          const double t = targets_batch(i, c);
          const double s = 1.0 - t * p_batch(i, c);
          reg += std::log(s) * inv_classes;
          out.grad_p(i, c) += lambda * inv_batch * (-(t * inv_classes) / s);
        }
      } else {
        double dot = 0.0;
        for (std::size_t c = 0; c < num_classes; ++c) dot += targets_batch(i, c) * p_batch(i, c);
        const double s = 1.0 - dot * inv_classes;
        if (s > 1e-7) {
          reg = std::log(s);
          for (std::size_t c = 0; c < num_classes; ++c) {
            out.grad_p(i, c) += lambda * inv_batch * (-(targets_batch(i, c) * inv_classes) / s);
          }
        } else {
          // Floored region: the loss is constant there.
          reg = std::log(1e-7);
        }
      }
    }
    total += ce + lambda * reg;
  }
  out.loss = total * inv_batch;
  return out;
}

std::vector<double> mix_targets(std::span<const double> t_i, std::span<const double> t_j,
                                double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ValidationError("target mix alpha must be > 0, got " + format_double(alpha));
  if (t_i.size() != t_j.size()) throw ValidationError("target rows have different lengths");
  SplitRng rng(seed);
  const double a = sample_beta(rng, alpha, alpha);
  std::vector<double> out(t_i.size());
  for (std::size_t c = 0; c < t_i.size(); ++c) out[c] = a * t_i[c] + (1.0 - a) * t_j[c];
  return out;
}

void mix_targets_batch(Matrix& targets_batch, double alpha, SplitRng& rng) {
  if (!(alpha > 0.0)) throw ValidationError("target mix alpha must be > 0, got " + format_double(alpha));
  const std::size_t batch = targets_batch.rows();
  const double a = sample_beta(rng, alpha, alpha);
  std::vector<std::size_t> perm(batch);
  for (std::size_t i = 0; i < batch; ++i) perm[i] = i;
  for (std::size_t i = batch; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  const Matrix original = targets_batch;
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t c = 0; c < targets_batch.cols(); ++c) {
      targets_batch(i, c) = a * original(i, c) + (1.0 - a) * original(perm[i], c);
    }
  }
}

}  // namespace cleanbound
