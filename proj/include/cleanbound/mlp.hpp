#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cleanbound/elr.hpp"
#include "cleanbound/matrix.hpp"
#include "cleanbound/synth.hpp"

namespace cleanbound {

// Feed-forward multi-label classifier: rectifier hidden layers, independent
// sigmoid outputs. Probabilities are clamped into [1e-7, 1 - 1e-7] so every
// downstream log is finite.
class MlpClassifier {
 public:
  // layer_dims = [input, hidden..., output]. Weights are Glorot-uniform from
  // the seeded stream (one substream per layer, row-major order); biases
  // start at zero.
  MlpClassifier(std::vector<std::size_t> layer_dims, std::uint64_t seed);

  struct Workspace {
    Matrix input;
    std::vector<Matrix> pre_activations;  // one per layer
    std::vector<Matrix> activations;      // post-nonlinearity, one per layer
  };

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
  };

  Matrix forward(const Matrix& x_batch) const;
  Matrix forward(const Matrix& x_batch, Workspace& ws) const;

  // Exact gradients of the composed loss given d loss / d p. Requires the
  // workspace of the matching forward call.
  Gradients backward(const Workspace& ws, const Matrix& grad_p) const;

  const std::vector<std::size_t>& layer_dims() const { return layer_dims_; }
  std::size_t num_layers() const { return weights_.size(); }
  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<std::vector<double>>& biases() { return biases_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

  bool operator==(const MlpClassifier& other) const = default;

  // Nested key-value checkpoint with row-major weight arrays at 17
  // significant digits; load(save(m)) is bit-identical.
  KvDoc to_kv() const;
  static MlpClassifier from_kv(const KvDoc& doc);
  void save(const std::string& path) const;
  static MlpClassifier load(const std::string& path);

 private:
  MlpClassifier() = default;
  std::vector<std::size_t> layer_dims_;
  std::vector<Matrix> weights_;               // out x in per layer
  std::vector<std::vector<double>> biases_;   // out per layer
};

enum class Optimizer { kAdam, kSgdMomentum };
enum class LossKind { kBce, kElr };

struct TrainConfig {
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;  // sgd-momentum only
  std::size_t batch_size = 16;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kBce;
  ElrConfig elr;
  std::vector<std::size_t> hidden_dims{32};
  // Fraction of trailing rows held out as a validation split.
  double val_fraction = 0.0;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double acc_noisy_train = 0.0;
  std::optional<double> acc_noisy_val;
  std::optional<double> acc_clean_val;
};

struct TrainResult {
  MlpClassifier model;
  std::vector<EpochStats> log;
};

// Trains on the dataset's noisy labels. Deterministic for a fixed config:
// initialization, shuffling and target mixing all derive from cfg.seed.
// Aborts with a NumericError naming the epoch and batch if the loss stops
// being finite.
TrainResult train_classifier(const LabeledDataset& data, const TrainConfig& cfg);

// CSV header epoch,loss,acc_noisy_train[,acc_noisy_val[,acc_clean_val]];
// validation columns appear only when the log carries them.
void write_train_log_csv(const std::vector<EpochStats>& log, std::ostream& out);

}  // namespace cleanbound
