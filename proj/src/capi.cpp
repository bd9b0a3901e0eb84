#include "cleanbound.h"

#include <cstring>
#include <fstream>
#include <new>
#include <span>
#include <sstream>
#include <string>

#include "cleanbound/errors.hpp"
#include "cleanbound/metrics.hpp"
#include "cleanbound/runner.hpp"
#include "cleanbound/transition.hpp"

using namespace cleanbound;

struct cb_noise_model {
  NoiseModel impl;
};

struct cb_dataset {
  LabeledDataset impl;
};

struct cb_classifier {
  MlpClassifier impl;
};

struct cb_config {
  KvDoc impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Translates the C++ error taxonomy onto status codes.
template <typename Fn>
cb_status guarded(Fn&& fn) {
  try {
    fn();
    return CB_OK;
  } catch (const ValidationError& e) {
    set_error(e.what());
    return CB_ERROR_VALIDATION;
  } catch (const VacuousBoundError& e) {
    set_error(e.what());
    return CB_ERROR_VACUOUS;
  } catch (const NumericError& e) {
    set_error(e.what());
    return CB_ERROR_NUMERIC;
  } catch (const IoError& e) {
    set_error(e.what());
    return CB_ERROR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CB_ERROR;
  } catch (...) {
    set_error("unknown error");
    return CB_ERROR;
  }
}

template <typename T, typename Fn>
T* guarded_create(Fn&& fn) {
  T* out = nullptr;
  guarded([&] { out = fn(); });
  return out;
}

char* copy_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void assign_summary(char** summary, const std::string& text) {
  if (summary) *summary = copy_string(text);
}

}  // namespace

extern "C" {

const char* cb_last_error(void) { return g_last_error.c_str(); }

const char* cb_version(void) { return "0.1.0"; }

void cb_string_free(char* s) { delete[] s; }

/* ---- noise model ---- */

cb_noise_model* cb_noise_model_create(void) {
  return guarded_create<cb_noise_model>([] { return new cb_noise_model(); });
}

void cb_noise_model_free(cb_noise_model* m) { delete m; }

cb_status cb_noise_model_add_class(cb_noise_model* m, double t00, double t11, double p0) {
  return guarded([&] {
    if (!m) throw ValidationError("null noise model");
    m->impl.add_class(TransitionMatrix::from_diagonal(t00, t11), ClassPrior::from_p1(1.0 - p0));
  });
}

size_t cb_noise_model_num_classes(const cb_noise_model* m) {
  return m ? m->impl.num_classes() : 0;
}

cb_status cb_noise_model_get_class(const cb_noise_model* m, size_t c, double* t00, double* t11,
                                   double* p0) {
  return guarded([&] {
    if (!m) throw ValidationError("null noise model");
    const TransitionMatrix& t = m->impl.transition(c);
    if (t00) *t00 = t.t00();
    if (t11) *t11 = t.t11();
    if (p0) *p0 = m->impl.prior(c).p0();
  });
}

cb_status cb_noise_model_tau(const cb_noise_model* m, size_t c, double* tau) {
  return guarded([&] {
    if (!m || !tau) throw ValidationError("null argument");
    *tau = m->impl.tau(c);
  });
}

cb_status cb_noise_model_noise_rate(const cb_noise_model* m, size_t c, double* epsilon) {
  return guarded([&] {
    if (!m || !epsilon) throw ValidationError("null argument");
    *epsilon = m->impl.noise_rate(c);
  });
}

cb_noise_model* cb_noise_model_load(const char* path) {
  return guarded_create<cb_noise_model>([&] {
    if (!path) throw ValidationError("null path");
    return new cb_noise_model{NoiseModel::load(path)};
  });
}

cb_status cb_noise_model_save(const cb_noise_model* m, const char* path) {
  return guarded([&] {
    if (!m || !path) throw ValidationError("null argument");
    m->impl.save(path);
  });
}

/* ---- dataset ---- */

cb_dataset* cb_dataset_generate(const cb_generator_spec* spec) {
  return guarded_create<cb_dataset>([&] {
    if (!spec || !spec->weights || !spec->biases) throw ValidationError("null generator spec");
    GeneratorSpec s;
    s.n_samples = spec->n_samples;
    s.n_features = spec->n_features;
    s.n_classes = spec->n_classes;
    s.weights = Matrix(spec->n_classes, spec->n_features);
    std::memcpy(s.weights.data().data(), spec->weights,
                sizeof(double) * spec->n_classes * spec->n_features);
    s.biases.assign(spec->biases, spec->biases + spec->n_classes);
    s.mode = spec->mode == CB_LABEL_STOCHASTIC ? LabelMode::kStochastic : LabelMode::kDeterministic;
    s.seed = spec->seed;
    return new cb_dataset{generate(s)};
  });
}

cb_dataset* cb_dataset_load(const char* csv_path, const char* meta_path) {
  return guarded_create<cb_dataset>([&] {
    if (!csv_path) throw ValidationError("null path");
    return new cb_dataset{load_dataset(csv_path, meta_path ? meta_path : "")};
  });
}

void cb_dataset_free(cb_dataset* d) { delete d; }

cb_status cb_dataset_save(const cb_dataset* d, const char* csv_path, const char* meta_path) {
  return guarded([&] {
    if (!d || !csv_path) throw ValidationError("null argument");
    save_dataset_csv(d->impl, csv_path);
    if (meta_path) save_dataset_meta(d->impl, meta_path);
  });
}

cb_status cb_dataset_corrupt(cb_dataset* d, const cb_noise_model* m, uint64_t seed) {
  return guarded([&] {
    if (!d || !m) throw ValidationError("null argument");
    d->impl.corrupt(m->impl, seed);
  });
}

size_t cb_dataset_num_samples(const cb_dataset* d) { return d ? d->impl.num_samples() : 0; }
size_t cb_dataset_num_features(const cb_dataset* d) { return d ? d->impl.num_features() : 0; }
size_t cb_dataset_num_classes(const cb_dataset* d) { return d ? d->impl.num_classes() : 0; }

int cb_dataset_has_noisy_labels(const cb_dataset* d) {
  return d && d->impl.noisy_labels ? 1 : 0;
}

cb_status cb_dataset_copy_features(const cb_dataset* d, double* out) {
  return guarded([&] {
    if (!d || !out) throw ValidationError("null argument");
    std::memcpy(out, d->impl.features.data().data(),
                sizeof(double) * d->impl.features.data().size());
  });
}

cb_status cb_dataset_copy_clean_labels(const cb_dataset* d, uint8_t* out) {
  return guarded([&] {
    if (!d || !out) throw ValidationError("null argument");
    std::memcpy(out, d->impl.clean_labels.data().data(), d->impl.clean_labels.data().size());
  });
}

cb_status cb_dataset_copy_noisy_labels(const cb_dataset* d, uint8_t* out) {
  return guarded([&] {
    if (!d || !out) throw ValidationError("null argument");
    if (!d->impl.noisy_labels) throw ValidationError("dataset has no noisy labels");
    std::memcpy(out, d->impl.noisy_labels->data().data(), d->impl.noisy_labels->data().size());
  });
}

cb_status cb_dataset_noisy_posterior(const cb_dataset* d, const double* x, size_t c, double* out) {
  return guarded([&] {
    if (!d || !x || !out) throw ValidationError("null argument");
    if (!d->impl.spec || !d->impl.noise_model) {
      throw ValidationError("dataset lacks generator or noise provenance");
    }
    *out = noisy_posterior(*d->impl.spec, *d->impl.noise_model, x, c);
  });
}

/* ---- classifier ---- */

void cb_train_config_init(cb_train_config* cfg) {
  if (!cfg) return;
  cfg->optimizer = CB_OPT_ADAM;
  cfg->learning_rate = 1e-3;
  cfg->momentum = 0.9;
  cfg->batch_size = 16;
  cfg->epochs = 50;
  cfg->seed = 0;
  cfg->loss = CB_LOSS_BCE;
  cfg->elr_lambda = 3.0;
  cfg->elr_beta = 0.7;
  cfg->elr_ce_mode = CB_CE_FULL_BCE;
  cfg->elr_regularizer = CB_REG_PER_LABEL_MEAN;
  cfg->elr_target_mix_alpha = 0.0;
  cfg->hidden_dims = nullptr;
  cfg->n_hidden = 0;
  cfg->val_fraction = 0.0;
}

cb_classifier* cb_classifier_train(const cb_dataset* data, const cb_train_config* cfg,
                                   const char* log_csv_path) {
  return guarded_create<cb_classifier>([&] {
    if (!data || !cfg) throw ValidationError("null argument");
    TrainConfig c;
    c.optimizer = cfg->optimizer == CB_OPT_SGD_MOMENTUM ? Optimizer::kSgdMomentum : Optimizer::kAdam;
    c.learning_rate = cfg->learning_rate;
    c.momentum = cfg->momentum;
    c.batch_size = cfg->batch_size;
    c.epochs = cfg->epochs;
    c.seed = cfg->seed;
    c.loss = cfg->loss == CB_LOSS_ELR ? LossKind::kElr : LossKind::kBce;
    c.elr.lambda = cfg->elr_lambda;
    c.elr.beta = cfg->elr_beta;
    c.elr.ce_mode = cfg->elr_ce_mode == CB_CE_POSITIVE_ONLY ? CeMode::kPositiveOnly : CeMode::kFullBce;
    c.elr.regularizer_mode = cfg->elr_regularizer == CB_REG_INNER_PRODUCT
                                 ? RegularizerMode::kInnerProduct
                                 : RegularizerMode::kPerLabelMean;
    if (cfg->elr_target_mix_alpha > 0.0) c.elr.target_mix_alpha = cfg->elr_target_mix_alpha;
    if (cfg->hidden_dims && cfg->n_hidden > 0) {
      c.hidden_dims.assign(cfg->hidden_dims, cfg->hidden_dims + cfg->n_hidden);
    }
    c.val_fraction = cfg->val_fraction;
    TrainResult result = train_classifier(data->impl, c);
    if (log_csv_path) {
      std::ostringstream log;
      write_train_log_csv(result.log, log);
      std::ofstream out(log_csv_path, std::ios::binary);
      if (!out) throw IoError(std::string("cannot write file: ") + log_csv_path);
      out << log.str();
    }
    return new cb_classifier{std::move(result.model)};
  });
}

cb_classifier* cb_classifier_load(const char* path) {
  return guarded_create<cb_classifier>([&] {
    if (!path) throw ValidationError("null path");
    return new cb_classifier{MlpClassifier::load(path)};
  });
}

void cb_classifier_free(cb_classifier* h) { delete h; }

cb_status cb_classifier_save(const cb_classifier* h, const char* path) {
  return guarded([&] {
    if (!h || !path) throw ValidationError("null argument");
    h->impl.save(path);
  });
}

cb_status cb_classifier_predict(const cb_classifier* h, const double* features, size_t n_rows,
                                size_t n_features, double* probs_out) {
  return guarded([&] {
    if (!h || !features || !probs_out) throw ValidationError("null argument");
    Matrix x(n_rows, n_features);
    std::memcpy(x.data().data(), features, sizeof(double) * n_rows * n_features);
    const Matrix p = h->impl.forward(x);
    std::memcpy(probs_out, p.data().data(), sizeof(double) * p.data().size());
  });
}

/* ---- bound ---- */

cb_status cb_hoeffding_gap(double delta, uint64_t n, double* gap) {
  return guarded([&] {
    if (!gap) throw ValidationError("null output");
    *gap = hoeffding_gap(delta, n);
  });
}

cb_status cb_clean_accuracy_lower_bound(const cb_bound_inputs* in, cb_bound_report* out) {
  return guarded([&] {
    if (!in || !out) throw ValidationError("null argument");
    BoundInputs inputs;
    inputs.noisy_test_accuracy = in->noisy_test_accuracy;
    inputs.delta = in->delta;
    inputs.test_set_size = in->test_set_size;
    inputs.tau = in->tau;
    inputs.epsilon = in->epsilon;
    const BoundReport report = clean_accuracy_lower_bound(inputs);
    out->inputs = *in;
    out->hoeffding_gap = report.hoeffding_gap;
    out->lower_bound = report.lower_bound;
    out->saturated = report.saturated ? 1 : 0;
  });
}

cb_status cb_noisy_optimal_accuracy(double epsilon, double* out) {
  return guarded([&] {
    if (!out) throw ValidationError("null output");
    *out = noisy_optimal_accuracy(epsilon);
  });
}

/* ---- transition estimation ---- */

cb_status cb_estimate_transition(const double* noisy_probs, size_t n, double percentile,
                                 double* t00, double* t11) {
  return guarded([&] {
    if (!noisy_probs || !t00 || !t11) throw ValidationError("null argument");
    const TransitionMatrix t = estimate_transition(std::span(noisy_probs, n), percentile);
    *t00 = t.t00();
    *t11 = t.t11();
  });
}

cb_status cb_estimate_noise_rate(const uint8_t* noisy_labels, size_t n, double t00, double t11,
                                 double* epsilon, double* p1, int* prior_clamped) {
  return guarded([&] {
    if (!noisy_labels || !epsilon) throw ValidationError("null argument");
    const NoiseRateEstimate est = estimate_noise_rate_from_data(
        std::span(noisy_labels, n), TransitionMatrix::from_diagonal(t00, t11));
    *epsilon = est.epsilon;
    if (p1) *p1 = est.p1;
    if (prior_clamped) *prior_clamped = est.prior_clamped ? 1 : 0;
  });
}

/* ---- metrics ---- */

cb_status cb_roc_auc(const double* scores, const uint8_t* labels, size_t n, double* auc) {
  return guarded([&] {
    if (!scores || !labels || !auc) throw ValidationError("null argument");
    *auc = roc_auc(std::span(scores, n), std::span(labels, n));
  });
}

cb_status cb_binary_accuracies(const double* probs, const uint8_t* labels, size_t n_rows,
                               size_t n_classes, double* acc_out) {
  return guarded([&] {
    if (!probs || !labels || !acc_out) throw ValidationError("null argument");
    Matrix p(n_rows, n_classes);
    std::memcpy(p.data().data(), probs, sizeof(double) * n_rows * n_classes);
    BinaryMatrix y(n_rows, n_classes);
    std::memcpy(y.data().data(), labels, n_rows * n_classes);
    const std::vector<double> acc = binary_accuracies(threshold_predict_matrix(p), y);
    std::memcpy(acc_out, acc.data(), sizeof(double) * acc.size());
  });
}

/* ---- config + runner ---- */

cb_config* cb_config_create(void) {
  return guarded_create<cb_config>([] { return new cb_config(); });
}

cb_config* cb_config_load(const char* path) {
  return guarded_create<cb_config>([&] {
    if (!path) throw ValidationError("null path");
    return new cb_config{KvDoc::load(path)};
  });
}

void cb_config_free(cb_config* cfg) { delete cfg; }

cb_status cb_config_set(cb_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) throw ValidationError("null argument");
    cfg->impl.set(key, value);
  });
}

char* cb_config_get(const cb_config* cfg, const char* key) {
  if (!cfg || !key || !cfg->impl.has(key)) return nullptr;
  return copy_string(cfg->impl.get_string(key));
}

cb_status cb_run_generate(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    assign_summary(summary, run_generate(cfg->impl, out_dir));
  });
}

cb_status cb_run_train(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    assign_summary(summary, run_train(cfg->impl, out_dir));
  });
}

cb_status cb_run_eval(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    assign_summary(summary, run_eval(cfg->impl, out_dir));
  });
}

cb_status cb_run_estimate(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    assign_summary(summary, run_estimate(cfg->impl, out_dir));
  });
}

cb_status cb_run_bound(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg) throw ValidationError("null argument");
    assign_summary(summary, run_bound(cfg->impl, out_dir ? out_dir : ""));
  });
}

cb_status cb_run_sweep(const cb_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    assign_summary(summary, run_sweep(cfg->impl, out_dir));
  });
}

cb_status cb_run_validate_bound(const cb_config* cfg, const char* out_dir, double* min_coverage,
                                int* passed, char** summary) {
  return guarded([&] {
    if (!cfg || !out_dir) throw ValidationError("null argument");
    const ValidateBoundResult result = run_validate_bound(cfg->impl, out_dir);
    if (min_coverage) *min_coverage = result.min_coverage;
    if (passed) *passed = result.passed ? 1 : 0;
    assign_summary(summary, result.summary);
  });
}

} /* extern "C" */
