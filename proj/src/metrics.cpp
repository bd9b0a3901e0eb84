#include "cleanbound/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "cleanbound/errors.hpp"

namespace cleanbound {

ThresholdPrediction threshold_predict(std::span<const double> probabilities) {
  ThresholdPrediction out;
  out.labels.resize(probabilities.size());
  out.nofinding = true;
  for (std::size_t c = 0; c < probabilities.size(); ++c) {
    const double p = probabilities[c];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probability out of [0,1]: " + format_double(p));
    }
    out.labels[c] = p >= 0.5 ? 1 : 0;
    if (out.labels[c]) out.nofinding = false;
  }
  return out;
}

BinaryMatrix threshold_predict_matrix(const Matrix& probabilities) {
  BinaryMatrix out(probabilities.rows(), probabilities.cols());
  for (std::size_t i = 0; i < probabilities.rows(); ++i) {
    for (std::size_t c = 0; c < probabilities.cols(); ++c) {
      out(i, c) = probabilities(i, c) >= 0.5 ? 1 : 0;
    }
  }
  return out;
}

namespace {

bool row_all_zero(const BinaryMatrix& m, std::size_t i) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (m(i, c)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> binary_accuracies(const BinaryMatrix& predictions, const BinaryMatrix& labels) {
  const std::size_t n = predictions.rows();
  const std::size_t num_classes = predictions.cols();
  if (n == 0) throw ValidationError("accuracy over an empty set");
  if (labels.rows() != n || labels.cols() != num_classes) {
    throw ValidationError("prediction/label shape mismatch");
  }
  std::vector<std::size_t> matches(num_classes + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (predictions(i, c) == labels(i, c)) ++matches[c];
    }
    if (row_all_zero(predictions, i) == row_all_zero(labels, i)) ++matches[num_classes];
  }
  std::vector<double> out(num_classes + 1);
  for (std::size_t c = 0; c <= num_classes; ++c) {
    out[c] = static_cast<double>(matches[c]) / static_cast<double>(n);
  }
  return out;
}

double mean_binary_accuracy(const BinaryMatrix& predictions, const BinaryMatrix& labels) {
  const std::vector<double> acc = binary_accuracies(predictions, labels);
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < acc.size(); ++c) sum += acc[c];
  return sum / static_cast<double>(acc.size() - 1);
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const std::size_t n = scores.size();
  if (labels.size() != n) throw ValidationError("score/label length mismatch");
  std::size_t n_pos = 0;
  for (std::uint8_t y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    n_pos += y;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("AUC undefined: labels contain a single class");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks within tie groups, accumulate the positive rank sum.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate_probabilities(const Matrix& probabilities, const BinaryMatrix& clean_labels,
                                  const BinaryMatrix* noisy_labels) {
  const std::size_t n = probabilities.rows();
  const std::size_t num_classes = probabilities.cols();
  if (n == 0) throw ValidationError("evaluation over an empty set");
  if (clean_labels.rows() != n || clean_labels.cols() != num_classes) {
    throw ValidationError("probability/label shape mismatch");
  }
  EvalReport report;
  report.n = n;
  report.n_classes = num_classes;
  const BinaryMatrix predictions = threshold_predict_matrix(probabilities);
  report.acc_clean = binary_accuracies(predictions, clean_labels);
  if (noisy_labels) {
    if (noisy_labels->rows() != n || noisy_labels->cols() != num_classes) {
      throw ValidationError("probability/noisy-label shape mismatch");
    }
    report.acc_noisy = binary_accuracies(predictions, *noisy_labels);
  }
  const BinaryMatrix& auc_labels = noisy_labels ? *noisy_labels : clean_labels;
  report.auc.resize(num_classes);
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  std::vector<double> scores(n);
  std::vector<std::uint8_t> column(n);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = probabilities(i, c);
      column[i] = auc_labels(i, c);
    }
    std::size_t n_pos = 0;
    for (std::uint8_t y : column) n_pos += y;
    if (n_pos == 0 || n_pos == n) {
      report.auc[c] = std::nullopt;
      ++report.auc_excluded;
      continue;
    }
    const double auc = roc_auc(scores, column);
    report.auc[c] = auc;
    auc_sum += auc;
    ++auc_count;
  }
  if (auc_count > 0) report.mean_auc = auc_sum / static_cast<double>(auc_count);
  return report;
}

KvDoc EvalReport::to_kv() const {
  KvDoc doc;
  doc.set_u64("n", n);
  doc.set_u64("n_classes", n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::string base = "class." + std::to_string(c) + ".";
    if (acc_noisy) doc.set_double(base + "acc_noisy", (*acc_noisy)[c]);
    if (acc_clean) doc.set_double(base + "acc_clean", (*acc_clean)[c]);
    if (auc[c]) doc.set_double(base + "auc", *auc[c]);
  }
  if (acc_noisy) doc.set_double("nofinding.acc_noisy", acc_noisy->back());
  if (acc_clean) doc.set_double("nofinding.acc_clean", acc_clean->back());
  if (mean_auc) doc.set_double("mean_auc", *mean_auc);
  doc.set_u64("auc_excluded", auc_excluded);
  return doc;
}

void EvalReport::write_csv(std::ostream& out) const {
  out << "class,acc_noisy,acc_clean,auc,flags\n";
  for (std::size_t c = 0; c <= n_classes; ++c) {
    const bool nofinding = c == n_classes;
    out << (nofinding ? std::string("nofinding") : std::to_string(c)) << ',';
    if (acc_noisy) out << format_double((*acc_noisy)[c]);
    out << ',';
    if (acc_clean) out << format_double((*acc_clean)[c]);
    out << ',';
    std::string flags;
    if (!nofinding) {
      if (auc[c]) {
        out << format_double(*auc[c]);
      } else {
        flags = "auc_undefined";
      }
    }
    out << ',' << flags << '\n';
  }
}

}  // namespace cleanbound
