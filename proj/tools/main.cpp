// Command-line front end for the cleanbound shared library. Every subcommand
// is a thin mapping from flags onto config keys followed by one cb_run_*
// call; all behavior lives behind the C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cleanbound.h"

namespace {

struct ConfigDeleter {
  void operator()(cb_config* cfg) const { cb_config_free(cfg); }
};
using ConfigPtr = std::unique_ptr<cb_config, ConfigDeleter>;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  bool quiet = false;
  std::vector<std::string> overrides;  // key=value
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool out_required) {
  cmd->add_option("--config", args.config_path, "run config file (key = value lines)");
  auto* out = cmd->add_option("--out", args.out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", args.seed, "override the subcommand's seed key");
  cmd->add_flag("--quiet", args.quiet, "suppress the summary line");
  cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
}

int fail(cb_status status) {
  std::fprintf(stderr, "error: %s\n", cb_last_error());
  switch (status) {
    case CB_ERROR_VALIDATION:
    case CB_ERROR_IO:
      return 2;
    case CB_ERROR_VACUOUS:
      return 3;
    case CB_ERROR_NUMERIC:
      return 4;
    default:
      return 1;
  }
}

int fail_validation(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 2;
}

// Builds the effective config: file values first, then flag overrides.
ConfigPtr build_config(const CommonArgs& args, const char* seed_key,
                       const std::vector<std::pair<std::string, std::string>>& flag_values,
                       int& error_exit) {
  ConfigPtr cfg;
  if (!args.config_path.empty()) {
    cfg.reset(cb_config_load(args.config_path.c_str()));
    if (!cfg) {
      error_exit = fail(CB_ERROR_IO);
      return nullptr;
    }
  } else {
    cfg.reset(cb_config_create());
  }
  for (const auto& [key, value] : flag_values) {
    cb_config_set(cfg.get(), key.c_str(), value.c_str());
  }
  if (!args.seed.empty()) {
    if (!seed_key) {
      error_exit = fail_validation("--seed is not used by this subcommand");
      return nullptr;
    }
    cb_config_set(cfg.get(), seed_key, args.seed.c_str());
  }
  for (const std::string& kv : args.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      error_exit = fail_validation("--set expects key=value, got '" + kv + "'");
      return nullptr;
    }
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    cb_config_set(cfg.get(), key.c_str(), value.c_str());
  }
  return cfg;
}

void print_summary(const CommonArgs& args, char* summary) {
  if (summary) {
    if (!args.quiet) std::printf("%s\n", summary);
    cb_string_free(summary);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"label-noise modeling, clean-accuracy bounds, and ELR training"};
  app.require_subcommand(1);

  CommonArgs generate_args;
  auto* generate_cmd = app.add_subcommand("generate", "generate a synthetic dataset");
  add_common_flags(generate_cmd, generate_args, true);

  CommonArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a classifier on noisy labels");
  add_common_flags(train_cmd, train_args, true);
  std::string train_dataset;
  train_cmd->add_option("--dataset", train_dataset, "training dataset CSV");

  CommonArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  add_common_flags(eval_cmd, eval_args, true);
  std::string eval_checkpoint, eval_dataset;
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint");
  eval_cmd->add_option("--dataset", eval_dataset, "evaluation dataset CSV");

  CommonArgs estimate_args;
  auto* estimate_cmd =
      app.add_subcommand("estimate", "estimate transition matrices via anchor points");
  add_common_flags(estimate_cmd, estimate_args, true);
  std::string estimate_dataset, estimate_checkpoint, estimate_percentile;
  estimate_cmd->add_option("--dataset", estimate_dataset, "probe dataset CSV");
  estimate_cmd->add_option("--checkpoint", estimate_checkpoint, "probe model checkpoint");
  estimate_cmd->add_option("--percentile", estimate_percentile, "anchor percentile in (0,100]");

  CommonArgs bound_args;
  auto* bound_cmd = app.add_subcommand("bound", "clean-accuracy lower bound");
  add_common_flags(bound_cmd, bound_args, false);
  std::string b_acc, b_delta, b_n, b_tau, b_eps, b_from_eval, b_noise_model;
  bound_cmd->add_option("--acc", b_acc, "noisy test accuracy");
  bound_cmd->add_option("--delta", b_delta, "confidence level (default 0.05)");
  bound_cmd->add_option("--n", b_n, "noisy test set size");
  bound_cmd->add_option("--tau", b_tau, "transition margin tau");
  bound_cmd->add_option("--epsilon", b_eps, "noise rate epsilon");
  bound_cmd->add_option("--from-eval", b_from_eval, "evaluation report (key-value)");
  bound_cmd->add_option("--noise-model", b_noise_model, "noise model file");

  CommonArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "bound sweep over symmetric noise");
  add_common_flags(sweep_cmd, sweep_args, true);
  std::string s_mode, s_delta, s_acc_values, s_n_values;
  sweep_cmd->add_option("--mode", s_mode, "acc (a): fixed accuracies; n (b): test sizes");
  sweep_cmd->add_option("--delta", s_delta, "confidence level");
  sweep_cmd->add_option("--acc-values", s_acc_values, "accuracy curve values (space separated)");
  sweep_cmd->add_option("--n-values", s_n_values, "test size curve values (space separated)");

  CommonArgs validate_args;
  auto* validate_cmd =
      app.add_subcommand("validate-bound", "Monte Carlo coverage check of the bound");
  add_common_flags(validate_cmd, validate_args, true);
  std::string v_trials, v_test_size;
  validate_cmd->add_option("--trials", v_trials, "number of independent test draws");
  validate_cmd->add_option("--test-size", v_test_size, "samples per draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int error_exit = 0;
  std::vector<std::pair<std::string, std::string>> flags;

  if (generate_cmd->parsed()) {
    ConfigPtr cfg = build_config(generate_args, "generator.seed", flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    const cb_status status = cb_run_generate(cfg.get(), generate_args.out_dir.c_str(), &summary);
    if (status != CB_OK) return fail(status);
    print_summary(generate_args, summary);
    return 0;
  }

  if (train_cmd->parsed()) {
    if (!train_dataset.empty()) flags.emplace_back("train.dataset", train_dataset);
    ConfigPtr cfg = build_config(train_args, "train.seed", flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    const cb_status status = cb_run_train(cfg.get(), train_args.out_dir.c_str(), &summary);
    if (status != CB_OK) return fail(status);
    print_summary(train_args, summary);
    return 0;
  }

  if (eval_cmd->parsed()) {
    if (!eval_checkpoint.empty()) flags.emplace_back("eval.checkpoint", eval_checkpoint);
    if (!eval_dataset.empty()) flags.emplace_back("eval.dataset", eval_dataset);
    ConfigPtr cfg = build_config(eval_args, nullptr, flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    const cb_status status = cb_run_eval(cfg.get(), eval_args.out_dir.c_str(), &summary);
    if (status != CB_OK) return fail(status);
    print_summary(eval_args, summary);
    return 0;
  }

  if (estimate_cmd->parsed()) {
    if (!estimate_dataset.empty()) flags.emplace_back("estimate.dataset", estimate_dataset);
    if (!estimate_checkpoint.empty()) flags.emplace_back("estimate.checkpoint", estimate_checkpoint);
    if (!estimate_percentile.empty()) flags.emplace_back("estimate.percentile", estimate_percentile);
    ConfigPtr cfg = build_config(estimate_args, nullptr, flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    const cb_status status = cb_run_estimate(cfg.get(), estimate_args.out_dir.c_str(), &summary);
    if (status != CB_OK) return fail(status);
    print_summary(estimate_args, summary);
    return 0;
  }

  if (bound_cmd->parsed()) {
    if (!b_acc.empty()) flags.emplace_back("bound.acc", b_acc);
    if (!b_delta.empty()) flags.emplace_back("bound.delta", b_delta);
    if (!b_n.empty()) flags.emplace_back("bound.n", b_n);
    if (!b_tau.empty()) flags.emplace_back("bound.tau", b_tau);
    if (!b_eps.empty()) flags.emplace_back("bound.epsilon", b_eps);
    if (!b_from_eval.empty()) flags.emplace_back("bound.from_eval", b_from_eval);
    if (!b_noise_model.empty()) flags.emplace_back("bound.noise_model", b_noise_model);
    ConfigPtr cfg = build_config(bound_args, nullptr, flags, error_exit);
    if (!cfg) return error_exit;
    char* text = nullptr;
    const cb_status status = cb_run_bound(
        cfg.get(), bound_args.out_dir.empty() ? nullptr : bound_args.out_dir.c_str(), &text);
    if (status != CB_OK) return fail(status);
    if (text) {
      std::printf("%s", text);
      cb_string_free(text);
    }
    return 0;
  }

  if (sweep_cmd->parsed()) {
    if (!s_mode.empty()) flags.emplace_back("sweep.mode", s_mode);
    if (!s_delta.empty()) flags.emplace_back("sweep.delta", s_delta);
    if (!s_acc_values.empty()) flags.emplace_back("sweep.acc_values", s_acc_values);
    if (!s_n_values.empty()) flags.emplace_back("sweep.n_values", s_n_values);
    ConfigPtr cfg = build_config(sweep_args, nullptr, flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    const cb_status status = cb_run_sweep(cfg.get(), sweep_args.out_dir.c_str(), &summary);
    if (status != CB_OK) return fail(status);
    print_summary(sweep_args, summary);
    return 0;
  }

  if (validate_cmd->parsed()) {
    if (!v_trials.empty()) flags.emplace_back("validate.trials", v_trials);
    if (!v_test_size.empty()) flags.emplace_back("validate.test_size", v_test_size);
    ConfigPtr cfg = build_config(validate_args, "validate.seed", flags, error_exit);
    if (!cfg) return error_exit;
    char* summary = nullptr;
    double min_coverage = 0.0;
    int passed = 0;
    const cb_status status = cb_run_validate_bound(cfg.get(), validate_args.out_dir.c_str(),
                                                   &min_coverage, &passed, &summary);
    if (status != CB_OK) return fail(status);
    print_summary(validate_args, summary);
    return passed ? 0 : 1;
  }

  return 0;
}
