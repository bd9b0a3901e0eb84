/*
 * cleanbound C API: class-conditional label-noise modeling, clean-accuracy
 * lower bounds from noisy test sets, multi-label ELR training, anchor-point
 * transition estimation, and the experiment runner behind the CLI.
 *
 * Conventions: objects are opaque handles with create/free pairs; functions
 * return cb_status (CB_OK on success) and leave a message retrievable with
 * cb_last_error() on failure. Constructors return NULL on failure. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with cb_string_free(). All randomness is driven by explicit
 * seeds; equal inputs give bit-identical outputs.
 */
#ifndef CLEANBOUND_H
#define CLEANBOUND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERROR = 1,            /* unexpected failure */
  CB_ERROR_VALIDATION = 2, /* bad arguments, config keys, or file contents */
  CB_ERROR_VACUOUS = 3,    /* bound requested with tau <= 0 */
  CB_ERROR_NUMERIC = 4,    /* non-finite values during optimization */
  CB_ERROR_IO = 5          /* missing or unwritable files */
} cb_status;

/* Message from the most recent failing call on this thread. */
const char* cb_last_error(void);

const char* cb_version(void);

void cb_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Noise models: per-class 2x2 row-stochastic transition matrices.    */

typedef struct cb_noise_model cb_noise_model;

cb_noise_model* cb_noise_model_create(void);
void cb_noise_model_free(cb_noise_model* m);
/* Appends a class; off-diagonals follow from the row sums. p0 is the
 * clean-label prior of class 0. */
cb_status cb_noise_model_add_class(cb_noise_model* m, double t00, double t11, double p0);
size_t cb_noise_model_num_classes(const cb_noise_model* m);
cb_status cb_noise_model_get_class(const cb_noise_model* m, size_t c, double* t00, double* t11,
                                   double* p0);
/* tau = min(t00 - t01, t11 - t10); may be <= 0. */
cb_status cb_noise_model_tau(const cb_noise_model* m, size_t c, double* tau);
/* epsilon = 1 - p0 t00 - p1 t11. */
cb_status cb_noise_model_noise_rate(const cb_noise_model* m, size_t c, double* epsilon);
cb_noise_model* cb_noise_model_load(const char* path);
cb_status cb_noise_model_save(const cb_noise_model* m, const char* path);

/* ------------------------------------------------------------------ */
/* Datasets: features with clean and optional noisy multi-labels.     */

typedef struct cb_dataset cb_dataset;

typedef enum cb_label_mode {
  CB_LABEL_DETERMINISTIC = 0, /* y = 1 iff w.x + b > 0 */
  CB_LABEL_STOCHASTIC = 1     /* y ~ Bernoulli(sigmoid(w.x + b)) */
} cb_label_mode;

typedef struct cb_generator_spec {
  uint64_t n_samples;
  size_t n_features;
  size_t n_classes;
  const double* weights; /* n_classes x n_features, row-major */
  const double* biases;  /* n_classes */
  cb_label_mode mode;
  uint64_t seed;
} cb_generator_spec;

cb_dataset* cb_dataset_generate(const cb_generator_spec* spec);
cb_dataset* cb_dataset_load(const char* csv_path, const char* meta_path /* may be NULL */);
void cb_dataset_free(cb_dataset* d);
cb_status cb_dataset_save(const cb_dataset* d, const char* csv_path,
                          const char* meta_path /* may be NULL */);
/* Flips labels through the model; row i draws from substream (seed, i). */
cb_status cb_dataset_corrupt(cb_dataset* d, const cb_noise_model* m, uint64_t seed);
size_t cb_dataset_num_samples(const cb_dataset* d);
size_t cb_dataset_num_features(const cb_dataset* d);
size_t cb_dataset_num_classes(const cb_dataset* d);
int cb_dataset_has_noisy_labels(const cb_dataset* d);
/* Copy-out accessors; buffers must hold n_samples x n_features doubles or
 * n_samples x n_classes bytes (labels are 0/1). */
cb_status cb_dataset_copy_features(const cb_dataset* d, double* out);
cb_status cb_dataset_copy_clean_labels(const cb_dataset* d, uint8_t* out);
cb_status cb_dataset_copy_noisy_labels(const cb_dataset* d, uint8_t* out);
/* Exact noisy posterior P(noisy y = 1 | x) for the dataset's generator and
 * noise provenance; x has n_features entries. */
cb_status cb_dataset_noisy_posterior(const cb_dataset* d, const double* x, size_t c, double* out);

/* ------------------------------------------------------------------ */
/* Classifier: feed-forward net with per-class sigmoid outputs.       */

typedef struct cb_classifier cb_classifier;

typedef enum cb_optimizer { CB_OPT_ADAM = 0, CB_OPT_SGD_MOMENTUM = 1 } cb_optimizer;
typedef enum cb_loss { CB_LOSS_BCE = 0, CB_LOSS_ELR = 1 } cb_loss;
typedef enum cb_ce_mode { CB_CE_FULL_BCE = 0, CB_CE_POSITIVE_ONLY = 1 } cb_ce_mode;
typedef enum cb_regularizer {
  CB_REG_PER_LABEL_MEAN = 0,
  CB_REG_INNER_PRODUCT = 1
} cb_regularizer;

typedef struct cb_train_config {
  cb_optimizer optimizer;
  double learning_rate;
  double momentum; /* sgd-momentum only */
  size_t batch_size;
  size_t epochs;
  uint64_t seed;
  cb_loss loss;
  double elr_lambda;
  double elr_beta;
  cb_ce_mode elr_ce_mode;
  cb_regularizer elr_regularizer;
  double elr_target_mix_alpha; /* <= 0 disables target mixing */
  const size_t* hidden_dims;
  size_t n_hidden;
  double val_fraction;
} cb_train_config;

/* Defaults: Adam, lr 1e-3, batch 16, 50 epochs, BCE, lambda 3, beta 0.7,
 * full_bce, per_label_mean, no mixing, one hidden layer of 32. */
void cb_train_config_init(cb_train_config* cfg);

/* Trains on the dataset's noisy labels; deterministic for a fixed config.
 * When log_csv_path is non-NULL the per-epoch log is written there. */
cb_classifier* cb_classifier_train(const cb_dataset* data, const cb_train_config* cfg,
                                   const char* log_csv_path);
cb_classifier* cb_classifier_load(const char* path);
void cb_classifier_free(cb_classifier* h);
cb_status cb_classifier_save(const cb_classifier* h, const char* path);
/* probs_out holds n_rows x n_classes doubles in (0,1). */
cb_status cb_classifier_predict(const cb_classifier* h, const double* features, size_t n_rows,
                                size_t n_features, double* probs_out);

/* ------------------------------------------------------------------ */
/* Clean-accuracy lower bound.                                        */

typedef struct cb_bound_inputs {
  double noisy_test_accuracy;
  double delta;
  uint64_t test_set_size;
  double tau;
  double epsilon;
} cb_bound_inputs;

typedef struct cb_bound_report {
  cb_bound_inputs inputs;
  double hoeffding_gap;
  double lower_bound;
  int saturated;
} cb_bound_report;

/* sqrt(ln(1/delta) / (2 n)); delta in (0,1]. */
cb_status cb_hoeffding_gap(double delta, uint64_t n, double* gap);
/* 1 + (-1 + epsilon + acc - gap) / tau; CB_ERROR_VACUOUS when tau <= 0. */
cb_status cb_clean_accuracy_lower_bound(const cb_bound_inputs* in, cb_bound_report* out);
/* 1 - epsilon. */
cb_status cb_noisy_optimal_accuracy(double epsilon, double* out);

/* ------------------------------------------------------------------ */
/* Anchor-point transition estimation.                                */

cb_status cb_estimate_transition(const double* noisy_probs, size_t n, double percentile,
                                 double* t00, double* t11);
cb_status cb_estimate_noise_rate(const uint8_t* noisy_labels, size_t n, double t00, double t11,
                                 double* epsilon, double* p1, int* prior_clamped);

/* ------------------------------------------------------------------ */
/* Metrics.                                                           */

/* Mann-Whitney AUC with average ranks for ties; labels are 0/1 and must
 * contain both classes. */
cb_status cb_roc_auc(const double* scores, const uint8_t* labels, size_t n, double* auc);
/* acc_out holds n_classes + 1 entries; the last is the derived no-finding
 * class (all predictions below 0.5 vs all labels zero). */
cb_status cb_binary_accuracies(const double* probs, const uint8_t* labels, size_t n_rows,
                               size_t n_classes, double* acc_out);

/* ------------------------------------------------------------------ */
/* Config-driven runner (the CLI maps subcommands onto these).        */

typedef struct cb_config cb_config;

cb_config* cb_config_create(void);
cb_config* cb_config_load(const char* path);
void cb_config_free(cb_config* cfg);
cb_status cb_config_set(cb_config* cfg, const char* key, const char* value);
/* Returns a copy of the value or NULL when missing. */
char* cb_config_get(const cb_config* cfg, const char* key);

/* Each writes its artifacts plus config.resolved into out_dir and returns a
 * summary through *summary (may be NULL). cb_run_bound accepts a NULL
 * out_dir: the report then only goes to the summary. */
cb_status cb_run_generate(const cb_config* cfg, const char* out_dir, char** summary);
cb_status cb_run_train(const cb_config* cfg, const char* out_dir, char** summary);
cb_status cb_run_eval(const cb_config* cfg, const char* out_dir, char** summary);
cb_status cb_run_estimate(const cb_config* cfg, const char* out_dir, char** summary);
cb_status cb_run_bound(const cb_config* cfg, const char* out_dir, char** summary);
cb_status cb_run_sweep(const cb_config* cfg, const char* out_dir, char** summary);
/* passed reflects min per-class coverage >= 1 - delta. */
cb_status cb_run_validate_bound(const cb_config* cfg, const char* out_dir, double* min_coverage,
                                int* passed, char** summary);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CLEANBOUND_H */
