#include "cleanbound/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cleanbound/errors.hpp"
#include "cleanbound/rng.hpp"

namespace cleanbound {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit(const Matrix& weights, const std::vector<double>& biases, const double* x,
             std::size_t c) {
  double z = biases[c];
  const double* w = weights.row(c);
  for (std::size_t j = 0; j < weights.cols(); ++j) z += w[j] * x[j];
  return z;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

void GeneratorSpec::validate() const {
  if (n_samples < 1) throw ValidationError("generator: n_samples must be >= 1");
  if (n_features < 1) throw ValidationError("generator: n_features must be >= 1");
  if (n_classes < 1) throw ValidationError("generator: n_classes must be >= 1");
  if (weights.rows() != n_classes || weights.cols() != n_features) {
    throw ValidationError("generator: weight matrix must be n_classes x n_features");
  }
  if (biases.size() != n_classes) throw ValidationError("generator: biases must have n_classes entries");
  for (double w : weights.data()) {
    if (!std::isfinite(w)) throw ValidationError("generator: weights must be finite");
  }
  for (double b : biases) {
    if (!std::isfinite(b)) throw ValidationError("generator: biases must be finite");
  }
}

LabeledDataset generate(const GeneratorSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_samples;
  const std::size_t d = spec.n_features;
  const std::size_t num_classes = spec.n_classes;
  LabeledDataset data;
  data.features = Matrix(n, d);
  data.clean_labels = BinaryMatrix(n, num_classes);
  const SplitRng base(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    SplitRng row_rng = base.split(i);
    double* x = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) x[j] = row_rng.next_gaussian();
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double z = logit(spec.weights, spec.biases, x, c);
      if (spec.mode == LabelMode::kDeterministic) {
        data.clean_labels(i, c) = z > 0.0 ? 1 : 0;
      } else {
        data.clean_labels(i, c) = row_rng.next_double() < sigmoid(z) ? 1 : 0;
      }
    }
  }
  data.spec = spec;
  return data;
}

void LabeledDataset::corrupt(const NoiseModel& model, std::uint64_t seed) {
  noisy_labels = corrupt_labels(clean_labels, model, seed);
  noise_model = model;
  noise_seed = seed;
}

BayesClassifier::BayesClassifier(const GeneratorSpec& spec) {
  if (spec.mode != LabelMode::kDeterministic) {
    throw ValidationError("the clean Bayes classifier is only exact for deterministic specs");
  }
  weights_ = spec.weights;
  biases_ = spec.biases;
}

BinaryMatrix BayesClassifier::predict(const Matrix& features) const {
  if (features.cols() != weights_.cols()) {
    throw ValidationError("feature dimension mismatch in Bayes classifier");
  }
  BinaryMatrix out(features.rows(), weights_.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t c = 0; c < weights_.rows(); ++c) {
      out(i, c) = logit(weights_, biases_, features.row(i), c) > 0.0 ? 1 : 0;
    }
  }
  return out;
}

BayesClassifier clean_bayes_classifier(const GeneratorSpec& spec) { return BayesClassifier(spec); }

double clean_posterior(const GeneratorSpec& spec, const double* x, std::size_t c) {
  const double z = logit(spec.weights, spec.biases, x, c);
  if (spec.mode == LabelMode::kDeterministic) return z > 0.0 ? 1.0 : 0.0;
  return sigmoid(z);
}

double noisy_posterior(const GeneratorSpec& spec, const NoiseModel& model, const double* x,
                       std::size_t c) {
  const double p1 = clean_posterior(spec, x, c);
  const TransitionMatrix& t = model.transition(c);
  return t.t01() * (1.0 - p1) + t.t11() * p1;
}

double analytic_prior(const GeneratorSpec& spec, std::size_t c) {
  if (c >= spec.n_classes) throw ValidationError("analytic_prior: class index out of range");
  double norm_sq = 0.0;
  const double* w = spec.weights.row(c);
  for (std::size_t j = 0; j < spec.n_features; ++j) norm_sq += w[j] * w[j];
  const double norm = std::sqrt(norm_sq);
  const double b = spec.biases[c];
  if (norm == 0.0) {
    // Constant logit: the label is b > 0 deterministically, sigmoid(b) in
    // stochastic mode.
    return spec.mode == LabelMode::kDeterministic ? (b > 0.0 ? 1.0 : 0.0) : sigmoid(b);
  }
  if (spec.mode == LabelMode::kDeterministic) {
    // P(w.x + b > 0) with w.x ~ N(0, |w|^2).
    return standard_normal_cdf(b / norm);
  }
  // E sigmoid(t) with t ~ N(b, |w|^2), composite Simpson over 10 sigma.
  const std::size_t intervals = 4000;
  const double lo = b - 10.0 * norm;
  const double hi = b + 10.0 * norm;
  const double h = (hi - lo) / intervals;
  auto integrand = [&](double t) {
    const double u = (t - b) / norm;
    const double density = std::exp(-0.5 * u * u) / (norm * std::sqrt(2.0 * 3.14159265358979323846));
    return sigmoid(t) * density;
  };
  double sum = integrand(lo) + integrand(hi);
  for (std::size_t k = 1; k < intervals; ++k) {
    sum += integrand(lo + k * h) * (k % 2 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

void save_dataset_csv(const LabeledDataset& data, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + csv_path);
  const std::size_t d = data.num_features();
  const std::size_t num_classes = data.num_classes();
  for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << 'x' << j;
  for (std::size_t c = 0; c < num_classes; ++c) out << ",y" << c;
  if (data.noisy_labels) {
    for (std::size_t c = 0; c < num_classes; ++c) out << ",yt" << c;
  }
  out << '\n';
  for (std::size_t i = 0; i < data.num_samples(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_double(data.features(i, j));
    }
    for (std::size_t c = 0; c < num_classes; ++c) out << ',' << int(data.clean_labels(i, c));
    if (data.noisy_labels) {
      for (std::size_t c = 0; c < num_classes; ++c) out << ',' << int((*data.noisy_labels)(i, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + csv_path);
}

KvDoc generator_spec_to_kv(const GeneratorSpec& spec, const std::string& prefix) {
  KvDoc doc;
  doc.set_u64(prefix + "n_samples", spec.n_samples);
  doc.set_u64(prefix + "n_features", spec.n_features);
  doc.set_u64(prefix + "n_classes", spec.n_classes);
  doc.set(prefix + "mode", spec.mode == LabelMode::kDeterministic ? "deterministic" : "stochastic");
  doc.set_u64(prefix + "seed", spec.seed);
  doc.set_double_list(prefix + "weights", spec.weights.data());
  doc.set_double_list(prefix + "biases", spec.biases);
  return doc;
}

GeneratorSpec generator_spec_from_kv(const KvDoc& doc, const std::string& prefix) {
  GeneratorSpec spec;
  spec.n_samples = doc.get_u64(prefix + "n_samples");
  spec.n_features = doc.get_u64(prefix + "n_features");
  spec.n_classes = doc.get_u64(prefix + "n_classes");
  const std::string mode = doc.get_string(prefix + "mode");
  if (mode == "deterministic") {
    spec.mode = LabelMode::kDeterministic;
  } else if (mode == "stochastic") {
    spec.mode = LabelMode::kStochastic;
  } else {
    throw ValidationError("key '" + prefix + "mode': expected deterministic or stochastic, got '" +
                          mode + "'");
  }
  spec.seed = doc.get_u64(prefix + "seed");
  const std::vector<double> w = doc.get_double_list(prefix + "weights");
  if (w.size() != spec.n_classes * spec.n_features) {
    throw ValidationError("key '" + prefix + "weights': expected " +
                          std::to_string(spec.n_classes * spec.n_features) + " values, got " +
                          std::to_string(w.size()));
  }
  spec.weights = Matrix(spec.n_classes, spec.n_features);
  spec.weights.data() = w;
  spec.biases = doc.get_double_list(prefix + "biases");
  if (spec.biases.size() != spec.n_classes) {
    throw ValidationError("key '" + prefix + "biases': expected " +
                          std::to_string(spec.n_classes) + " values");
  }
  spec.validate();
  return spec;
}

void save_dataset_meta(const LabeledDataset& data, const std::string& meta_path) {
  if (!data.spec) throw ValidationError("dataset has no generator provenance to save");
  KvDoc doc = generator_spec_to_kv(*data.spec);
  if (data.noise_model) {
    const KvDoc noise = data.noise_model->to_kv("noise.");
    for (const auto& [k, v] : noise.entries()) doc.set(k, v);
    if (data.noise_seed) doc.set_u64("noise.seed", *data.noise_seed);
  }
  doc.save(meta_path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

LabeledDataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(csv_path + ": empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  std::size_t d = 0;
  std::size_t n_y = 0;
  std::size_t n_yt = 0;
  for (const std::string& col : header) {
    if (!col.empty() && col[0] == 'x') ++d;
    else if (col.rfind("yt", 0) == 0) ++n_yt;
    else if (!col.empty() && col[0] == 'y') ++n_y;
    else throw ValidationError(csv_path + ": unexpected column '" + col + "'");
  }
  if (d == 0 || n_y == 0) throw ValidationError(csv_path + ": header must contain x and y columns");
  if (n_yt != 0 && n_yt != n_y) {
    throw ValidationError(csv_path + ": noisy label column count does not match clean count");
  }
  std::vector<double> features;
  std::vector<std::uint8_t> clean;
  std::vector<std::uint8_t> noisy;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError(csv_path + ": row " + std::to_string(rows + 1) +
                            " has wrong field count");
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < d; ++j) features.push_back(std::stod(fields[k++]));
    for (std::size_t c = 0; c < n_y; ++c) {
      const std::string& f = fields[k++];
      if (f != "0" && f != "1") throw ValidationError(csv_path + ": label entries must be 0 or 1");
      clean.push_back(f == "1" ? 1 : 0);
    }
    for (std::size_t c = 0; c < n_yt; ++c) {
      const std::string& f = fields[k++];
      if (f != "0" && f != "1") throw ValidationError(csv_path + ": label entries must be 0 or 1");
      noisy.push_back(f == "1" ? 1 : 0);
    }
    ++rows;
  }
  LabeledDataset data;
  data.features = Matrix(rows, d);
  data.features.data() = std::move(features);
  data.clean_labels = BinaryMatrix(rows, n_y);
  data.clean_labels.data() = std::move(clean);
  if (n_yt) {
    BinaryMatrix m(rows, n_yt);
    m.data() = std::move(noisy);
    data.noisy_labels = std::move(m);
  }
  if (!meta_path.empty()) {
    const KvDoc meta = KvDoc::load(meta_path);
    data.spec = generator_spec_from_kv(meta);
    if (meta.has("noise.class.0.t00")) {
      data.noise_model = NoiseModel::from_kv(meta, "noise.");
      if (meta.has("noise.seed")) data.noise_seed = meta.get_u64("noise.seed");
    }
  }
  return data;
}

}  // namespace cleanbound
