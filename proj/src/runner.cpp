#include "cleanbound/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cleanbound/errors.hpp"
#include "cleanbound/metrics.hpp"
#include "cleanbound/rng.hpp"
#include "cleanbound/transition.hpp"

namespace cleanbound {

namespace {

namespace fs = std::filesystem;

const char* const kScalarKeys[] = {
    "generator.n_samples", "generator.n_features", "generator.n_classes", "generator.mode",
    "generator.seed",      "generator.weights",    "generator.biases",    "generator.weight_seed",
    "generator.weight_scale",
    "noise.symmetric_rho", "noise.seed",
    "train.dataset",       "train.optimizer",      "train.lr",            "train.momentum",
    "train.batch_size",    "train.epochs",         "train.seed",          "train.loss",
    "train.hidden",        "train.val_fraction",
    "elr.lambda",          "elr.beta",             "elr.ce_mode",         "elr.regularizer_mode",
    "elr.target_mix_alpha",
    "bound.acc",           "bound.delta",          "bound.n",             "bound.tau",
    "bound.epsilon",       "bound.from_eval",      "bound.noise_model",
    "sweep.mode",          "sweep.delta",          "sweep.epsilon_start", "sweep.epsilon_stop",
    "sweep.epsilon_steps", "sweep.acc_values",     "sweep.n",             "sweep.n_values",
    "estimate.dataset",    "estimate.checkpoint",  "estimate.probe",      "estimate.percentile",
    "eval.dataset",        "eval.checkpoint",
    "validate.trials",     "validate.test_size",   "validate.delta",      "validate.seed",
};

bool matches_class_pattern(const std::string& key) {
  // noise.class.<index>.{t00,t11,p0}
  const std::string prefix = "noise.class.";
  if (key.rfind(prefix, 0) != 0) return false;
  std::size_t pos = prefix.size();
  std::size_t digits = 0;
  while (pos < key.size() && std::isdigit(static_cast<unsigned char>(key[pos]))) {
    ++pos;
    ++digits;
  }
  if (digits == 0) return false;
  const std::string rest = key.substr(pos);
  return rest == ".t00" || rest == ".t11" || rest == ".p0";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string prepare_out_dir(const KvDoc& config, const std::string& out_dir) {
  if (out_dir.empty()) throw ValidationError("an output directory is required");
  fs::create_directories(out_dir);
  const std::string dir = out_dir.back() == '/' ? out_dir : out_dir + "/";
  config.save(dir + "config.resolved");
  return dir;
}

std::string meta_path_for(const std::string& csv_path) {
  if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv") {
    return csv_path.substr(0, csv_path.size() - 4) + ".meta";
  }
  return csv_path + ".meta";
}

LabeledDataset load_dataset_with_sidecar(const std::string& csv_path) {
  const std::string meta = meta_path_for(csv_path);
  return load_dataset(csv_path, fs::exists(meta) ? meta : "");
}

double require_range(const KvDoc& config, const std::string& key, double lo, double hi) {
  const double v = config.get_double(key);
  if (!(v >= lo && v <= hi)) {
    throw ValidationError("key '" + key + "': value " + format_double(v) + " outside [" +
                          format_double(lo) + "," + format_double(hi) + "]");
  }
  return v;
}

}  // namespace

void validate_config_keys(const KvDoc& config) {
  std::string unknown;
  for (const std::string& key : config.keys()) {
    bool known = matches_class_pattern(key);
    for (const char* candidate : kScalarKeys) {
      if (known) break;
      known = key == candidate;
    }
    if (!known) unknown += unknown.empty() ? key : ", " + key;
  }
  if (!unknown.empty()) throw ValidationError("unknown config key(s): " + unknown);
}

GeneratorSpec generator_spec_from_config(const KvDoc& config) {
  GeneratorSpec spec;
  spec.n_samples = config.get_u64("generator.n_samples");
  spec.n_features = config.get_u64("generator.n_features");
  spec.n_classes = config.get_u64("generator.n_classes");
  const std::string mode = config.get_string_or("generator.mode", "deterministic");
  if (mode == "deterministic") {
    spec.mode = LabelMode::kDeterministic;
  } else if (mode == "stochastic") {
    spec.mode = LabelMode::kStochastic;
  } else {
    throw ValidationError("key 'generator.mode': expected deterministic or stochastic, got '" +
                          mode + "'");
  }
  spec.seed = config.get_u64("generator.seed");
  spec.weights = Matrix(spec.n_classes, spec.n_features);
  if (config.has("generator.weights")) {
    const std::vector<double> w = config.get_double_list("generator.weights");
    if (w.size() != spec.n_classes * spec.n_features) {
      throw ValidationError("key 'generator.weights': expected " +
                            std::to_string(spec.n_classes * spec.n_features) + " values, got " +
                            std::to_string(w.size()));
    }
    spec.weights.data() = w;
  } else {
    const std::uint64_t weight_seed =
        config.get_u64_or("generator.weight_seed", SplitRng::derive_seed(spec.seed, 1001));
    const double scale = config.get_double_or("generator.weight_scale", 1.0);
    if (!(scale > 0.0)) throw ValidationError("key 'generator.weight_scale': must be > 0");
    SplitRng rng(weight_seed);
    for (double& v : spec.weights.data()) v = rng.next_gaussian() * scale;
  }
  if (config.has("generator.biases")) {
    std::vector<double> b = config.get_double_list("generator.biases");
    if (b.size() == 1 && spec.n_classes > 1) b.assign(spec.n_classes, b[0]);
    if (b.size() != spec.n_classes) {
      throw ValidationError("key 'generator.biases': expected 1 or " +
                            std::to_string(spec.n_classes) + " values");
    }
    spec.biases = std::move(b);
  } else {
    spec.biases.assign(spec.n_classes, 0.0);
  }
  spec.validate();
  return spec;
}

bool config_has_noise(const KvDoc& config) {
  if (config.has("noise.symmetric_rho")) return true;
  return config.has("noise.class.0.t00");
}

std::uint64_t noise_seed_from_config(const KvDoc& config, std::uint64_t generator_seed) {
  return config.get_u64_or("noise.seed", SplitRng::derive_seed(generator_seed, 2002));
}

NoiseModel noise_model_from_config(const KvDoc& config, std::size_t n_classes,
                                   const GeneratorSpec* spec_for_priors) {
  NoiseModel model;
  const bool symmetric = config.has("noise.symmetric_rho");
  for (const std::string& key : config.keys()) {
    if (!matches_class_pattern(key)) continue;
    if (symmetric) {
      throw ValidationError("give either noise.symmetric_rho or per-class noise.class.<c> keys, "
                            "not both (found '" + key + "')");
    }
    const std::size_t index = std::strtoull(key.c_str() + std::string("noise.class.").size(),
                                            nullptr, 10);
    if (index >= n_classes) {
      throw ValidationError("key '" + key + "' refers to class " + std::to_string(index) +
                            " but the dataset has " + std::to_string(n_classes) + " classes");
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::string base = "noise.class." + std::to_string(c) + ".";
    TransitionMatrix t = TransitionMatrix::identity();
    if (symmetric) {
      t = TransitionMatrix::symmetric(require_range(config, "noise.symmetric_rho", 0.0, 1.0));
    } else {
      t = TransitionMatrix::from_diagonal(require_range(config, base + "t00", 0.0, 1.0),
                                          require_range(config, base + "t11", 0.0, 1.0));
    }
    double p1;
    if (config.has(base + "p0")) {
      p1 = 1.0 - require_range(config, base + "p0", 0.0, 1.0);
    } else if (spec_for_priors) {
      p1 = analytic_prior(*spec_for_priors, c);
    } else {
      throw ValidationError("missing required key '" + base + "p0' (no generator to infer it from)");
    }
    model.add_class(t, ClassPrior::from_p1(p1));
  }
  return model;
}

TrainConfig train_config_from_config(const KvDoc& config) {
  TrainConfig cfg;
  const std::string opt = config.get_string_or("train.optimizer", "adam");
  if (opt == "adam") {
    cfg.optimizer = Optimizer::kAdam;
  } else if (opt == "sgd-momentum") {
    cfg.optimizer = Optimizer::kSgdMomentum;
  } else {
    throw ValidationError("key 'train.optimizer': expected adam or sgd-momentum, got '" + opt + "'");
  }
  cfg.learning_rate = config.get_double_or("train.lr", 1e-3);
  cfg.momentum = config.get_double_or("train.momentum", 0.9);
  cfg.batch_size = config.get_u64_or("train.batch_size", 16);
  cfg.epochs = config.get_u64_or("train.epochs", 50);
  cfg.seed = config.get_u64("train.seed");
  const std::string loss = config.get_string_or("train.loss", "bce");
  if (loss == "bce") {
    cfg.loss = LossKind::kBce;
  } else if (loss == "elr") {
    cfg.loss = LossKind::kElr;
  } else {
    throw ValidationError("key 'train.loss': expected bce or elr, got '" + loss + "'");
  }
  if (config.has("train.hidden")) {
    const std::vector<std::uint64_t> dims = config.get_u64_list("train.hidden");
    cfg.hidden_dims.assign(dims.begin(), dims.end());
  }
  cfg.val_fraction = config.get_double_or("train.val_fraction", 0.0);
  cfg.elr.lambda = config.get_double_or("elr.lambda", 3.0);
  cfg.elr.beta = config.get_double_or("elr.beta", 0.7);
  const std::string ce = config.get_string_or("elr.ce_mode", "full_bce");
  if (ce == "full_bce") {
    cfg.elr.ce_mode = CeMode::kFullBce;
  } else if (ce == "positive_only") {
    cfg.elr.ce_mode = CeMode::kPositiveOnly;
  } else {
    throw ValidationError("key 'elr.ce_mode': expected full_bce or positive_only, got '" + ce + "'");
  }
  const std::string reg = config.get_string_or("elr.regularizer_mode", "per_label_mean");
  if (reg == "per_label_mean") {
    cfg.elr.regularizer_mode = RegularizerMode::kPerLabelMean;
  } else if (reg == "inner_product") {
    cfg.elr.regularizer_mode = RegularizerMode::kInnerProduct;
  } else {
    throw ValidationError("key 'elr.regularizer_mode': expected per_label_mean or inner_product, got '" +
                          reg + "'");
  }
  if (config.has("elr.target_mix_alpha")) {
    cfg.elr.target_mix_alpha = config.get_double("elr.target_mix_alpha");
  }
  cfg.validate();
  return cfg;
}

std::string run_generate(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  const GeneratorSpec spec = generator_spec_from_config(config);
  LabeledDataset data = generate(spec);
  if (config_has_noise(config)) {
    const NoiseModel model = noise_model_from_config(config, spec.n_classes, &spec);
    data.corrupt(model, noise_seed_from_config(config, spec.seed));
  }
  const std::string dir = prepare_out_dir(config, out_dir);
  save_dataset_csv(data, dir + "dataset.csv");
  save_dataset_meta(data, dir + "dataset.meta");
  std::ostringstream summary;
  summary << "wrote " << dir << "dataset.csv: " << data.num_samples() << " samples, "
          << data.num_features() << " features, " << data.num_classes() << " classes"
          << (data.noisy_labels ? ", with noisy labels" : "");
  return summary.str();
}

std::string run_train(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  const LabeledDataset data = load_dataset_with_sidecar(config.get_string("train.dataset"));
  const TrainConfig cfg = train_config_from_config(config);
  const TrainResult result = train_classifier(data, cfg);
  const std::string dir = prepare_out_dir(config, out_dir);
  result.model.save(dir + "checkpoint.txt");
  std::ostringstream log;
  write_train_log_csv(result.log, log);
  write_text_file(dir + "train_log.csv", log.str());
  std::ostringstream summary;
  const EpochStats& last = result.log.back();
  summary << "trained " << result.log.size() << " epochs; final loss " << format_double(last.loss)
          << ", noisy train accuracy " << format_double(last.acc_noisy_train);
  if (last.acc_clean_val) {
    summary << ", clean val accuracy " << format_double(*last.acc_clean_val);
  }
  summary << "; wrote " << dir << "checkpoint.txt";
  return summary.str();
}

std::string run_eval(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  const MlpClassifier model = MlpClassifier::load(config.get_string("eval.checkpoint"));
  const LabeledDataset data = load_dataset_with_sidecar(config.get_string("eval.dataset"));
  const Matrix probs = model.forward(data.features);
  const EvalReport report = evaluate_probabilities(
      probs, data.clean_labels, data.noisy_labels ? &*data.noisy_labels : nullptr);
  const std::string dir = prepare_out_dir(config, out_dir);
  report.to_kv().save(dir + "eval_report.txt");
  std::ostringstream csv;
  report.write_csv(csv);
  write_text_file(dir + "eval_report.csv", csv.str());
  std::ostringstream summary;
  summary << "evaluated " << report.n << " samples";
  if (report.mean_auc) summary << "; mean AUC " << format_double(*report.mean_auc);
  if (report.auc_excluded) {
    summary << " (" << report.auc_excluded << " class(es) excluded: single-class labels)";
  }
  summary << "; wrote " << dir << "eval_report.csv";
  return summary.str();
}

std::string run_estimate(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  const LabeledDataset data = load_dataset_with_sidecar(config.get_string("estimate.dataset"));
  if (!data.noisy_labels) {
    throw ValidationError("transition estimation needs a dataset with noisy labels");
  }
  const double percentile = config.get_double_or("estimate.percentile", 97.0);
  const std::string probe =
      config.get_string_or("estimate.probe", config.has("estimate.checkpoint") ? "model" : "oracle");
  const std::size_t n = data.num_samples();
  const std::size_t num_classes = data.num_classes();
  Matrix probs(n, num_classes);
  if (probe == "model") {
    const MlpClassifier model = MlpClassifier::load(config.get_string("estimate.checkpoint"));
    probs = model.forward(data.features);
  } else if (probe == "oracle") {
    if (!data.spec || !data.noise_model) {
      throw ValidationError(
          "oracle probe needs dataset metadata with generator and noise provenance");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        probs(i, c) = noisy_posterior(*data.spec, *data.noise_model, data.features.row(i), c);
      }
    }
  } else {
    throw ValidationError("key 'estimate.probe': expected oracle or model, got '" + probe + "'");
  }
  NoiseModel estimated;
  std::ostringstream csv;
  csv << "class,t00,t01,t10,t11,p0,epsilon,tau,flags\n";
  std::vector<double> column(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = probs(i, c);
      labels[i] = (*data.noisy_labels)(i, c);
    }
    const TransitionMatrix t_hat = estimate_transition(column, percentile);
    const NoiseRateEstimate rate = estimate_noise_rate_from_data(labels, t_hat);
    estimated.add_class(t_hat, ClassPrior::from_p1(rate.p1));
    csv << c << ',' << format_double(t_hat.t00()) << ',' << format_double(t_hat.t01()) << ','
        << format_double(t_hat.t10()) << ',' << format_double(t_hat.t11()) << ','
        << format_double(1.0 - rate.p1) << ',' << format_double(rate.epsilon) << ','
        << format_double(compute_tau(t_hat)) << ',' << (rate.prior_clamped ? "prior_clamped" : "")
        << '\n';
  }
  const std::string dir = prepare_out_dir(config, out_dir);
  estimated.save(dir + "noise_model.txt");
  write_text_file(dir + "estimate.csv", csv.str());
  std::ostringstream summary;
  summary << "estimated transition matrices for " << num_classes << " class(es) from " << n
          << " probe samples (percentile " << format_double(percentile) << "); wrote " << dir
          << "noise_model.txt";
  return summary.str();
}

namespace {

struct BoundRow {
  std::optional<std::size_t> class_index;
  BoundReport report;
};

std::string bound_text(const std::vector<BoundRow>& rows) {
  std::ostringstream out;
  for (const BoundRow& row : rows) {
    if (row.class_index) out << "class " << *row.class_index << ":\n";
    const BoundReport& r = row.report;
    out << "  noisy test accuracy = " << format_double(r.inputs.noisy_test_accuracy) << '\n'
        << "  delta               = " << format_double(r.inputs.delta) << '\n'
        << "  test set size       = " << r.inputs.test_set_size << '\n'
        << "  tau                 = " << format_double(r.inputs.tau) << '\n'
        << "  epsilon             = " << format_double(r.inputs.epsilon) << '\n'
        << "  hoeffding gap       = " << format_double(r.hoeffding_gap) << '\n'
        << "  clean accuracy lower bound = " << format_double(r.lower_bound) << '\n';
    if (r.saturated) {
      out << "  warning: saturated (noisy accuracy - gap exceeds 1 - epsilon; inputs inconsistent)\n";
    }
  }
  return out.str();
}

nlohmann::json bound_json(const std::vector<BoundRow>& rows) {
  nlohmann::json reports = nlohmann::json::array();
  for (const BoundRow& row : rows) {
    nlohmann::json j{{"noisy_accuracy", row.report.inputs.noisy_test_accuracy},
                     {"delta", row.report.inputs.delta},
                     {"n", row.report.inputs.test_set_size},
                     {"tau", row.report.inputs.tau},
                     {"epsilon", row.report.inputs.epsilon},
                     {"hoeffding_gap", row.report.hoeffding_gap},
                     {"lower_bound", row.report.lower_bound},
                     {"saturated", row.report.saturated}};
    if (row.class_index) j["class"] = *row.class_index;
    reports.push_back(j);
  }
  return nlohmann::json{{"reports", reports}};
}

}  // namespace

std::string run_bound(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  const double delta = config.get_double_or("bound.delta", 0.05);
  std::vector<BoundRow> rows;
  if (config.has("bound.from_eval")) {
    const KvDoc report = KvDoc::load(config.get_string("bound.from_eval"));
    const NoiseModel model = NoiseModel::load(config.get_string("bound.noise_model"));
    const std::uint64_t n = report.get_u64("n");
    const std::size_t num_classes = report.get_u64("n_classes");
    if (model.num_classes() != num_classes) {
      throw ValidationError("noise model has " + std::to_string(model.num_classes()) +
                            " classes but the evaluation report has " + std::to_string(num_classes));
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      BoundInputs in;
      in.noisy_test_accuracy = report.get_double("class." + std::to_string(c) + ".acc_noisy");
      in.delta = delta;
      in.test_set_size = n;
      in.tau = model.tau(c);
      in.epsilon = model.noise_rate(c);
      rows.push_back(BoundRow{c, clean_accuracy_lower_bound(in)});
    }
  } else {
    BoundInputs in;
    in.noisy_test_accuracy = config.get_double("bound.acc");
    in.delta = delta;
    in.test_set_size = config.get_u64_or("bound.n", 10000);
    in.tau = config.get_double("bound.tau");
    in.epsilon = config.get_double("bound.epsilon");
    rows.push_back(BoundRow{std::nullopt, clean_accuracy_lower_bound(in)});
  }
  const std::string text = bound_text(rows);
  if (!out_dir.empty()) {
    const std::string dir = prepare_out_dir(config, out_dir);
    write_text_file(dir + "bound.json", bound_json(rows).dump(2) + "\n");
  }
  return text;
}

std::string run_sweep(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  SweepSpec spec;
  const std::string mode = config.get_string_or("sweep.mode", "n");
  if (mode == "acc" || mode == "a") {
    spec.mode = SweepMode::kVaryAccuracy;
  } else if (mode == "n" || mode == "b") {
    spec.mode = SweepMode::kVaryTestSize;
  } else {
    throw ValidationError("key 'sweep.mode': expected acc (a) or n (b), got '" + mode + "'");
  }
  spec.delta = config.get_double_or("sweep.delta", 0.05);
  const double start = config.get_double_or("sweep.epsilon_start", 0.0);
  const double stop = config.get_double_or("sweep.epsilon_stop", 0.5);
  const std::uint64_t steps = config.get_u64_or("sweep.epsilon_steps", 51);
  if (steps < 1) throw ValidationError("key 'sweep.epsilon_steps': must be >= 1");
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(steps - 1);
    spec.epsilon_grid.push_back(start + (stop - start) * frac);
  }
  if (spec.mode == SweepMode::kVaryAccuracy) {
    spec.accuracy_values = config.has("sweep.acc_values")
                               ? config.get_double_list("sweep.acc_values")
                               : std::vector<double>{0.6, 0.7, 0.8, 0.9};
    spec.fixed_test_size = config.get_u64_or("sweep.n", 10000);
  } else {
    if (config.has("sweep.n_values")) {
      spec.test_sizes = config.get_u64_list("sweep.n_values");
    } else {
      spec.test_sizes = {1000, 10000, 100000};
    }
  }
  const std::vector<SweepRow> rows = bound_sweep(spec);
  const std::string dir = prepare_out_dir(config, out_dir);
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  write_text_file(dir + "sweep.csv", csv.str());
  std::ostringstream summary;
  summary << "wrote " << dir << "sweep.csv: " << rows.size() << " rows";
  return summary.str();
}

ValidateBoundResult run_validate_bound(const KvDoc& config, const std::string& out_dir) {
  validate_config_keys(config);
  GeneratorSpec spec = generator_spec_from_config(config);
  if (spec.mode != LabelMode::kDeterministic) {
    throw ValidationError("validate-bound requires generator.mode = deterministic");
  }
  if (!config_has_noise(config)) {
    throw ValidationError("validate-bound requires a noise model (noise.* keys)");
  }
  const NoiseModel model = noise_model_from_config(config, spec.n_classes, &spec);
  const std::uint64_t trials = config.get_u64_or("validate.trials", 200);
  const std::uint64_t test_size = config.get_u64_or("validate.test_size", 2000);
  const double delta = config.get_double_or("validate.delta", 0.05);
  const std::uint64_t master_seed = config.get_u64("validate.seed");
  if (trials < 1) throw ValidationError("key 'validate.trials': must be >= 1");
  if (test_size < 1) throw ValidationError("key 'validate.test_size': must be >= 1");

  const std::size_t num_classes = spec.n_classes;
  std::vector<double> tau(num_classes);
  std::vector<double> epsilon(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    tau[c] = model.tau(c);
    epsilon[c] = model.noise_rate(c);
    if (!(tau[c] > 0.0)) {
      throw VacuousBoundError("vacuous bound for class " + std::to_string(c) +
                              ": tau = " + format_double(tau[c]));
    }
  }

  // Train once on its own corrupted training set.
  LabeledDataset train_data = generate(spec);
  train_data.corrupt(model, noise_seed_from_config(config, spec.seed));
  const TrainConfig train_cfg = train_config_from_config(config);
  const TrainResult trained = train_classifier(train_data, train_cfg);

  std::ostringstream csv;
  csv << "trial,class,noisy_accuracy,clean_accuracy,lower_bound,covered\n";
  std::vector<std::uint64_t> covered(num_classes, 0);
  GeneratorSpec trial_spec = spec;
  trial_spec.n_samples = test_size;
  for (std::uint64_t r = 0; r < trials; ++r) {
    const std::uint64_t trial_seed = SplitRng::derive_seed(master_seed, r);
    trial_spec.seed = SplitRng::derive_seed(trial_seed, 0);
    LabeledDataset test = generate(trial_spec);
    test.corrupt(model, SplitRng::derive_seed(trial_seed, 1));
    const BinaryMatrix pred = threshold_predict_matrix(trained.model.forward(test.features));
    const std::vector<double> acc_noisy = binary_accuracies(pred, *test.noisy_labels);
    const std::vector<double> acc_clean = binary_accuracies(pred, test.clean_labels);
    for (std::size_t c = 0; c < num_classes; ++c) {
      BoundInputs in;
      in.noisy_test_accuracy = acc_noisy[c];
      in.delta = delta;
      in.test_set_size = test_size;
      in.tau = tau[c];
      in.epsilon = epsilon[c];
      const BoundReport report = clean_accuracy_lower_bound(in);
      const bool ok = acc_clean[c] >= report.lower_bound;
      covered[c] += ok ? 1 : 0;
      csv << r << ',' << c << ',' << format_double(acc_noisy[c]) << ','
          << format_double(acc_clean[c]) << ',' << format_double(report.lower_bound) << ','
          << (ok ? 1 : 0) << '\n';
    }
  }

  ValidateBoundResult result;
  result.min_coverage = 1.0;
  KvDoc summary_doc;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double coverage = static_cast<double>(covered[c]) / static_cast<double>(trials);
    result.min_coverage = std::min(result.min_coverage, coverage);
    summary_doc.set_double("coverage.class." + std::to_string(c), coverage);
    summary_doc.set_double("tau.class." + std::to_string(c), tau[c]);
    summary_doc.set_double("epsilon.class." + std::to_string(c), epsilon[c]);
  }
  result.passed = result.min_coverage >= 1.0 - delta;
  summary_doc.set_double("coverage.min", result.min_coverage);
  summary_doc.set_double("threshold", 1.0 - delta);
  summary_doc.set_u64("trials", trials);
  summary_doc.set_u64("test_size", test_size);
  summary_doc.set("pass", result.passed ? "true" : "false");

  const std::string dir = prepare_out_dir(config, out_dir);
  write_text_file(dir + "coverage.csv", csv.str());
  summary_doc.save(dir + "coverage_summary.txt");
  std::ostringstream summary;
  summary << "coverage over " << trials << " trials: min " << format_double(result.min_coverage)
          << " vs threshold " << format_double(1.0 - delta) << " -> "
          << (result.passed ? "pass" : "FAIL") << "; wrote " << dir << "coverage.csv";
  result.summary = summary.str();
  return result;
}

}  // namespace cleanbound
