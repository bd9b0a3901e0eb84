#include "cleanbound/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "cleanbound/errors.hpp"
#include "cleanbound/metrics.hpp"
#include "cleanbound/rng.hpp"

namespace cleanbound {

MlpClassifier::MlpClassifier(std::vector<std::size_t> layer_dims, std::uint64_t seed)
    : layer_dims_(std::move(layer_dims)) {
  if (layer_dims_.size() < 2) throw ValidationError("classifier needs at least input and output dims");
  for (std::size_t dim : layer_dims_) {
    if (dim == 0) throw ValidationError("layer dimensions must be positive");
  }
  const SplitRng base(seed);
  for (std::size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    const std::size_t fan_in = layer_dims_[l];
    const std::size_t fan_out = layer_dims_[l + 1];
    Matrix w(fan_out, fan_in);
    SplitRng rng = base.split(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data()) v = (2.0 * rng.next_double() - 1.0) * limit;
    weights_.push_back(std::move(w));
    biases_.emplace_back(fan_out, 0.0);
  }
}

Matrix MlpClassifier::forward(const Matrix& x_batch) const {
  Workspace ws;
  return forward(x_batch, ws);
}

Matrix MlpClassifier::forward(const Matrix& x_batch, Workspace& ws) const {
  if (x_batch.cols() != layer_dims_.front()) {
    throw ValidationError("input has " + std::to_string(x_batch.cols()) +
                          " features, classifier expects " + std::to_string(layer_dims_.front()));
  }
  const std::size_t batch = x_batch.rows();
  ws.input = x_batch;
  ws.pre_activations.assign(num_layers(), Matrix());
  ws.activations.assign(num_layers(), Matrix());
  const Matrix* prev = &ws.input;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const Matrix& w = weights_[l];
    const std::vector<double>& b = biases_[l];
    Matrix z(batch, w.rows());
    for (std::size_t i = 0; i < batch; ++i) {
      const double* a = prev->row(i);
      for (std::size_t o = 0; o < w.rows(); ++o) {
        double sum = b[o];
        const double* wr = w.row(o);
        for (std::size_t j = 0; j < w.cols(); ++j) sum += wr[j] * a[j];
        z(i, o) = sum;
      }
    }
    ws.pre_activations[l] = z;
    Matrix a(batch, w.rows());
    const bool last = l + 1 == num_layers();
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t o = 0; o < w.rows(); ++o) {
        const double v = z(i, o);
        a(i, o) = last ? clamp_probability(1.0 / (1.0 + std::exp(-v))) : std::max(0.0, v);
      }
    }
    ws.activations[l] = std::move(a);
    prev = &ws.activations[l];
  }
  return ws.activations.back();
}

MlpClassifier::Gradients MlpClassifier::backward(const Workspace& ws, const Matrix& grad_p) const {
  const std::size_t batch = ws.input.rows();
  const Matrix& p = ws.activations.back();
  if (grad_p.rows() != batch || grad_p.cols() != p.cols()) {
    throw ValidationError("upstream gradient shape mismatch");
  }
  Gradients grads;
  grads.weights.resize(num_layers());
  grads.biases.resize(num_layers());
  // Output delta through the sigmoid: sigma' evaluated at the clamped output.
  Matrix delta(batch, p.cols());
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t o = 0; o < p.cols(); ++o) {
      delta(i, o) = grad_p(i, o) * p(i, o) * (1.0 - p(i, o));
    }
  }
  for (std::size_t l = num_layers(); l-- > 0;) {
    const Matrix& input = l == 0 ? ws.input : ws.activations[l - 1];
    Matrix gw(weights_[l].rows(), weights_[l].cols(), 0.0);
    std::vector<double> gb(weights_[l].rows(), 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* a = input.row(i);
      for (std::size_t o = 0; o < gw.rows(); ++o) {
        const double d = delta(i, o);
        gb[o] += d;
        double* gr = gw.row(o);
        for (std::size_t j = 0; j < gw.cols(); ++j) gr[j] += d * a[j];
      }
    }
    grads.weights[l] = std::move(gw);
    grads.biases[l] = std::move(gb);
    if (l == 0) break;
    // Propagate through the rectifier of layer l-1.
    Matrix next(batch, weights_[l].cols());
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < weights_[l].cols(); ++j) {
        double sum = 0.0;
        for (std::size_t o = 0; o < weights_[l].rows(); ++o) {
          sum += weights_[l](o, j) * delta(i, o);
        }
        next(i, j) = ws.pre_activations[l - 1](i, j) > 0.0 ? sum : 0.0;
      }
    }
    delta = std::move(next);
  }
  return grads;
}

KvDoc MlpClassifier::to_kv() const {
  KvDoc doc;
  std::string dims;
  for (std::size_t i = 0; i < layer_dims_.size(); ++i) {
    if (i) dims += ' ';
    dims += std::to_string(layer_dims_[i]);
  }
  doc.set("model.layer_dims", dims);
  doc.set("model.hidden_activation", "relu");
  doc.set("model.output_activation", "sigmoid");
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::string base = "model.layer." + std::to_string(l) + ".";
    doc.set_double_list(base + "weight", weights_[l].data());
    doc.set_double_list(base + "bias", biases_[l]);
  }
  return doc;
}

MlpClassifier MlpClassifier::from_kv(const KvDoc& doc) {
  MlpClassifier m;
  const std::vector<std::uint64_t> dims = doc.get_u64_list("model.layer_dims");
  if (dims.size() < 2) throw ValidationError("checkpoint: layer_dims needs at least two entries");
  m.layer_dims_.assign(dims.begin(), dims.end());
  if (doc.get_string("model.hidden_activation") != "relu" ||
      doc.get_string("model.output_activation") != "sigmoid") {
    throw ValidationError("checkpoint: unsupported activation names");
  }
  for (std::size_t l = 0; l + 1 < m.layer_dims_.size(); ++l) {
    const std::string base = "model.layer." + std::to_string(l) + ".";
    Matrix w(m.layer_dims_[l + 1], m.layer_dims_[l]);
    const std::vector<double> values = doc.get_double_list(base + "weight");
    if (values.size() != w.rows() * w.cols()) {
      throw ValidationError("checkpoint: wrong weight count for layer " + std::to_string(l));
    }
    w.data() = values;
    m.weights_.push_back(std::move(w));
    std::vector<double> b = doc.get_double_list(base + "bias");
    if (b.size() != m.layer_dims_[l + 1]) {
      throw ValidationError("checkpoint: wrong bias count for layer " + std::to_string(l));
    }
    m.biases_.push_back(std::move(b));
  }
  return m;
}

void MlpClassifier::save(const std::string& path) const { to_kv().save(path); }

MlpClassifier MlpClassifier::load(const std::string& path) { return from_kv(KvDoc::load(path)); }

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ValidationError("train.lr must be >= 0");
  if (batch_size == 0) throw ValidationError("train.batch_size must be positive");
  if (epochs == 0) throw ValidationError("train.epochs must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ValidationError("train.val_fraction must be in [0,1)");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("train.momentum must be in [0,1)");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw ValidationError("train.hidden dims must be positive");
  }
  elr.validate();
}

namespace {

// Adam with the usual defaults; one slot pair per parameter tensor.
struct AdamState {
  std::vector<Matrix> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;
  std::size_t step = 0;
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_update(MlpClassifier& model, const MlpClassifier::Gradients& grads, AdamState& state,
                 double lr) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    auto& w = model.weights()[l].data();
    const auto& gw = grads.weights[l].data();
    auto& mw = state.m_w[l].data();
    auto& vw = state.v_w[l].data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      mw[k] = kAdamBeta1 * mw[k] + (1.0 - kAdamBeta1) * gw[k];
      vw[k] = kAdamBeta2 * vw[k] + (1.0 - kAdamBeta2) * gw[k] * gw[k];
      w[k] -= lr * (mw[k] / bc1) / (std::sqrt(vw[k] / bc2) + kAdamEps);
    }
    auto& b = model.biases()[l];
    const auto& gb = grads.biases[l];
    auto& mb = state.m_b[l];
    auto& vb = state.v_b[l];
    for (std::size_t k = 0; k < b.size(); ++k) {
      mb[k] = kAdamBeta1 * mb[k] + (1.0 - kAdamBeta1) * gb[k];
      vb[k] = kAdamBeta2 * vb[k] + (1.0 - kAdamBeta2) * gb[k] * gb[k];
      b[k] -= lr * (mb[k] / bc1) / (std::sqrt(vb[k] / bc2) + kAdamEps);
    }
  }
}

struct MomentumState {
  std::vector<Matrix> v_w;
  std::vector<std::vector<double>> v_b;
};

void momentum_update(MlpClassifier& model, const MlpClassifier::Gradients& grads,
                     MomentumState& state, double lr, double momentum) {
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    auto& w = model.weights()[l].data();
    const auto& gw = grads.weights[l].data();
    auto& vw = state.v_w[l].data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      vw[k] = momentum * vw[k] + gw[k];
      w[k] -= lr * vw[k];
    }
    auto& b = model.biases()[l];
    const auto& gb = grads.biases[l];
    auto& vb = state.v_b[l];
    for (std::size_t k = 0; k < b.size(); ++k) {
      vb[k] = momentum * vb[k] + gb[k];
      b[k] -= lr * vb[k];
    }
  }
}

Matrix gather_rows(const Matrix& m, std::size_t begin, std::size_t end) {
  Matrix out(end - begin, m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(i - begin, c) = m(i, c);
  }
  return out;
}

BinaryMatrix gather_rows(const BinaryMatrix& m, std::size_t begin, std::size_t end) {
  BinaryMatrix out(end - begin, m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(i - begin, c) = m(i, c);
  }
  return out;
}

}  // namespace

TrainResult train_classifier(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (!data.noisy_labels) throw ValidationError("training requires noisy labels in the dataset");
  const std::size_t n_total = data.num_samples();
  const std::size_t num_classes = data.num_classes();
  const std::size_t n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(n_total));
  const std::size_t n_train = n_total - n_val;
  if (n_train == 0) throw ValidationError("validation split leaves no training rows");

  std::vector<std::size_t> dims;
  dims.push_back(data.num_features());
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(num_classes);

  const SplitRng base(cfg.seed);
  TrainResult result{MlpClassifier(dims, SplitRng::derive_seed(cfg.seed, 0)), {}};
  MlpClassifier& model = result.model;

  const Matrix train_x = gather_rows(data.features, 0, n_train);
  const BinaryMatrix train_noisy = gather_rows(*data.noisy_labels, 0, n_train);
  const Matrix val_x = n_val ? gather_rows(data.features, n_train, n_total) : Matrix();
  const BinaryMatrix val_noisy = n_val ? gather_rows(*data.noisy_labels, n_train, n_total) : BinaryMatrix();
  const BinaryMatrix val_clean = n_val ? gather_rows(data.clean_labels, n_train, n_total) : BinaryMatrix();

  AdamState adam;
  MomentumState mom;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const Matrix zero_w(model.weights()[l].rows(), model.weights()[l].cols(), 0.0);
    const std::vector<double> zero_b(model.biases()[l].size(), 0.0);
    if (cfg.optimizer == Optimizer::kAdam) {
      adam.m_w.push_back(zero_w);
      adam.v_w.push_back(zero_w);
      adam.m_b.push_back(zero_b);
      adam.v_b.push_back(zero_b);
    } else {
      mom.v_w.push_back(zero_w);
      mom.v_b.push_back(zero_b);
    }
  }

  const bool use_elr = cfg.loss == LossKind::kElr;
  const double lambda = use_elr ? cfg.elr.lambda : 0.0;
  const CeMode ce_mode = use_elr ? cfg.elr.ce_mode : CeMode::kFullBce;
  const RegularizerMode reg_mode = use_elr ? cfg.elr.regularizer_mode : RegularizerMode::kPerLabelMean;
  ElrState elr_state(n_train, num_classes, use_elr ? cfg.elr.beta : 0.0);

  SplitRng shuffle_rng = base.split(1);
  SplitRng mix_rng = base.split(2);
  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  MlpClassifier::Workspace ws;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates from the dedicated shuffle stream.
    for (std::size_t i = n_train; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(start + cfg.batch_size, n_train);
      const std::size_t batch = end - start;
      Matrix x(batch, train_x.cols());
      BinaryMatrix y(batch, num_classes);
      std::vector<std::size_t> ids(batch);
      for (std::size_t r = 0; r < batch; ++r) {
        const std::size_t src = order[start + r];
        ids[r] = src;
        for (std::size_t j = 0; j < train_x.cols(); ++j) x(r, j) = train_x(src, j);
        for (std::size_t c = 0; c < num_classes; ++c) y(r, c) = train_noisy(src, c);
      }
      const Matrix p = model.forward(x, ws);
      Matrix targets;
      if (use_elr) {
        // Targets absorb the current predictions before the loss reads them.
        elr_state.update_targets(ids, p);
        targets = elr_state.gather(ids);
        if (cfg.elr.target_mix_alpha) {
          mix_targets_batch(targets, *cfg.elr.target_mix_alpha, mix_rng);
        }
      } else {
        targets = Matrix(batch, num_classes, 0.0);
      }
      const LossValue lv = elr_loss(p, y, targets, lambda, ce_mode, reg_mode);
      if (!std::isfinite(lv.loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      loss_sum += lv.loss * static_cast<double>(batch);
      const MlpClassifier::Gradients grads = model.backward(ws, lv.grad_p);
      if (cfg.optimizer == Optimizer::kAdam) {
        adam_update(model, grads, adam, cfg.learning_rate);
      } else {
        momentum_update(model, grads, mom, cfg.learning_rate, cfg.momentum);
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(n_train);
    const BinaryMatrix train_pred = threshold_predict_matrix(model.forward(train_x));
    stats.acc_noisy_train = mean_binary_accuracy(train_pred, train_noisy);
    if (n_val) {
      const BinaryMatrix val_pred = threshold_predict_matrix(model.forward(val_x));
      stats.acc_noisy_val = mean_binary_accuracy(val_pred, val_noisy);
      stats.acc_clean_val = mean_binary_accuracy(val_pred, val_clean);
    }
    result.log.push_back(stats);
  }
  return result;
}

void write_train_log_csv(const std::vector<EpochStats>& log, std::ostream& out) {
  const bool has_val = !log.empty() && log.front().acc_noisy_val.has_value();
  const bool has_clean = !log.empty() && log.front().acc_clean_val.has_value();
  out << "epoch,loss,acc_noisy_train";
  if (has_val) out << ",acc_noisy_val";
  if (has_clean) out << ",acc_clean_val";
  out << '\n';
  for (const EpochStats& s : log) {
    out << s.epoch << ',' << format_double(s.loss) << ',' << format_double(s.acc_noisy_train);
    if (has_val) out << ',' << format_double(*s.acc_noisy_val);
    if (has_clean) out << ',' << format_double(*s.acc_clean_val);
    out << '\n';
  }
}

}  // namespace cleanbound
