#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cleanbound/matrix.hpp"
#include "cleanbound/noise.hpp"

namespace cleanbound {

enum class LabelMode {
  kDeterministic,  // y_c = 1 iff w_c . x + b_c > 0
  kStochastic,     // y_c ~ Bernoulli(sigmoid(w_c . x + b_c))
};

// Ground truth for a synthetic task: standard normal features and a linear
// per-class concept, so clean and noisy Bayes rules have closed forms.
struct GeneratorSpec {
  std::uint64_t n_samples = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  Matrix weights;               // n_classes x n_features
  std::vector<double> biases;   // n_classes
  LabelMode mode = LabelMode::kDeterministic;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledDataset {
  Matrix features;                       // N x d
  BinaryMatrix clean_labels;             // N x C
  std::optional<BinaryMatrix> noisy_labels;
  // Provenance: present when the dataset was generated (or loaded with its
  // sidecar), enabling the oracle operations below after a round-trip.
  std::optional<GeneratorSpec> spec;
  std::optional<NoiseModel> noise_model;
  std::optional<std::uint64_t> noise_seed;

  std::size_t num_samples() const { return features.rows(); }
  std::size_t num_features() const { return features.cols(); }
  std::size_t num_classes() const { return clean_labels.cols(); }

  void corrupt(const NoiseModel& model, std::uint64_t seed);
};

// Row i of the dataset is drawn from the substream (seed, i): first the d
// feature gaussians, then (stochastic mode) the C label uniforms.
LabeledDataset generate(const GeneratorSpec& spec);

// The true decision rule. Attains clean accuracy 1 on any dataset from the
// same deterministic spec; rejects stochastic specs.
class BayesClassifier {
 public:
  explicit BayesClassifier(const GeneratorSpec& spec);
  // out is n_rows x n_classes.
  BinaryMatrix predict(const Matrix& features) const;

 private:
  Matrix weights_;
  std::vector<double> biases_;
};

BayesClassifier clean_bayes_classifier(const GeneratorSpec& spec);

// P(Y=1 | x) for class c: sigmoid of the logit in stochastic mode, a 0/1
// indicator in deterministic mode.
double clean_posterior(const GeneratorSpec& spec, const double* x, std::size_t c);

// P(noisy Y = 1 | x) = t01 P(Y=0|x) + t11 P(Y=1|x); exact because the flip is
// independent of x given the clean label.
double noisy_posterior(const GeneratorSpec& spec, const NoiseModel& model, const double* x,
                       std::size_t c);

// P(Y=1) for class c implied by (W, b) and the standard normal feature law.
// Deterministic mode: Phi(b_c / |w_c|). Stochastic mode: E sigmoid(N(b_c,
// |w_c|^2)), evaluated by quadrature.
double analytic_prior(const GeneratorSpec& spec, std::size_t c);

// CSV columns x0..x{d-1},y0..y{C-1}[,yt0..yt{C-1}], floats at 17 significant
// digits. The sidecar metadata document stores the spec and any noise model.
void save_dataset_csv(const LabeledDataset& data, const std::string& csv_path);
void save_dataset_meta(const LabeledDataset& data, const std::string& meta_path);
LabeledDataset load_dataset(const std::string& csv_path, const std::string& meta_path = "");

KvDoc generator_spec_to_kv(const GeneratorSpec& spec, const std::string& prefix = "generator.");
GeneratorSpec generator_spec_from_kv(const KvDoc& doc, const std::string& prefix = "generator.");

}  // namespace cleanbound
