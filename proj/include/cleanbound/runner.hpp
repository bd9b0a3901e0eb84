#pragma once

#include <string>

#include "cleanbound/bound.hpp"
#include "cleanbound/kv.hpp"
#include "cleanbound/mlp.hpp"
#include "cleanbound/noise.hpp"
#include "cleanbound/synth.hpp"

namespace cleanbound {

// Experiment harness behind the CLI subcommands. Every run_* call is a pure
// function of the merged config document and its input files: it validates
// the config against the known-key schema, writes its artifacts plus a
// config.resolved echo into out_dir, and returns a short human-readable
// summary. Re-runs produce byte-identical files.

// Rejects keys outside the schema, naming each offender.
void validate_config_keys(const KvDoc& config);

// Builders shared by the runner and by library users driving configs
// directly. The generator weights either come from generator.weights or are
// drawn from generator.weight_seed; priors missing from noise.class.<c>.p0
// fall back to the analytic prior of the spec when one is supplied.
GeneratorSpec generator_spec_from_config(const KvDoc& config);
NoiseModel noise_model_from_config(const KvDoc& config, std::size_t n_classes,
                                   const GeneratorSpec* spec_for_priors);
TrainConfig train_config_from_config(const KvDoc& config);
bool config_has_noise(const KvDoc& config);
std::uint64_t noise_seed_from_config(const KvDoc& config, std::uint64_t generator_seed);

std::string run_generate(const KvDoc& config, const std::string& out_dir);
std::string run_train(const KvDoc& config, const std::string& out_dir);
std::string run_eval(const KvDoc& config, const std::string& out_dir);
std::string run_estimate(const KvDoc& config, const std::string& out_dir);
// out_dir may be empty: the report then only goes to the returned summary.
std::string run_bound(const KvDoc& config, const std::string& out_dir);
std::string run_sweep(const KvDoc& config, const std::string& out_dir);

struct ValidateBoundResult {
  double min_coverage = 0.0;
  bool passed = false;
  std::string summary;
};
ValidateBoundResult run_validate_bound(const KvDoc& config, const std::string& out_dir);

}  // namespace cleanbound
