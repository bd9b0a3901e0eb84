#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cleanbound/kv.hpp"
#include "cleanbound/matrix.hpp"

namespace cleanbound {

// Ties at 0.5 count as positive. The extra flag is true when no entry crosses
// the threshold, standing in for the derived all-clear class.
struct ThresholdPrediction {
  std::vector<std::uint8_t> labels;
  bool nofinding = false;
};

ThresholdPrediction threshold_predict(std::span<const double> probabilities);

// Binarizes a probability matrix row-wise at 0.5.
BinaryMatrix threshold_predict_matrix(const Matrix& probabilities);

// C+1 per-class fractions of matching binary decisions. The last entry is the
// derived no-finding class: an all-zeros prediction row matched against an
// all-zeros label row.
std::vector<double> binary_accuracies(const BinaryMatrix& predictions, const BinaryMatrix& labels);

// Mean over the C real classes (no derived class); used by training logs.
double mean_binary_accuracy(const BinaryMatrix& predictions, const BinaryMatrix& labels);

// Mann-Whitney AUC with average ranks for ties. Requires at least one
// positive and one negative label.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct EvalReport {
  std::size_t n = 0;
  std::size_t n_classes = 0;
  // C+1 entries each (the last is the derived no-finding class); absent when
  // the dataset lacks that label side.
  std::optional<std::vector<double>> acc_noisy;
  std::optional<std::vector<double>> acc_clean;
  // One entry per real class; nullopt where AUC is undefined (single-class
  // labels). Undefined classes are excluded from the mean with a flag rather
  // than imputed.
  std::vector<std::optional<double>> auc;
  std::optional<double> mean_auc;
  std::size_t auc_excluded = 0;

  KvDoc to_kv() const;
  // CSV: class,acc_noisy,acc_clean,auc,flags; one row per class plus the
  // nofinding row.
  void write_csv(std::ostream& out) const;
};

// Evaluates thresholded accuracies against whichever label sides exist and
// AUC against the noisy labels when present, the clean ones otherwise.
EvalReport evaluate_probabilities(const Matrix& probabilities, const BinaryMatrix& clean_labels,
                                  const BinaryMatrix* noisy_labels);

}  // namespace cleanbound
