#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cleanbound {

struct BoundInputs {
  double noisy_test_accuracy = 0.0;  // accuracy measured on the noisy test set
  double delta = 0.05;               // confidence level: bound holds w.p. >= 1 - delta
  std::uint64_t test_set_size = 1;
  double tau = 1.0;      // min over k != l of T_kk - T_kl
  double epsilon = 0.0;  // noise rate 1 - sum_k P(Y=k) T_kk
};

struct BoundReport {
  BoundInputs inputs;
  double hoeffding_gap = 0.0;
  double lower_bound = 0.0;
  // The raw value exceeded what the premise allows: acc - gap > 1 - epsilon.
  // Signals inconsistent measurements or estimates rather than a math error.
  bool saturated = false;
};

// Finite-sample penalty sqrt(ln(1/delta) / (2n)). Rejects delta outside (0,1].
double hoeffding_gap(double delta, std::uint64_t n);

// Lower bound on the clean-distribution accuracy given the noisy test-set
// accuracy: 1 + (-1 + epsilon + acc - gap) / tau. Requires tau > 0; otherwise
// a VacuousBoundError naming tau is thrown. The value is reported raw, never
// clamped to [0,1]; callers may clamp for display.
BoundReport clean_accuracy_lower_bound(const BoundInputs& in);

// Accuracy of the noisy-distribution optimal classifier: 1 - epsilon.
double noisy_optimal_accuracy(double epsilon);

enum class SweepMode {
  kVaryAccuracy,  // one curve per fixed noisy accuracy, fixed test set size
  kVaryTestSize,  // one curve per test set size, accuracy follows (1-eps)-0.1
};

// Sweep over symmetric binary noise: t00 = t11 = 1 - rho gives epsilon = rho
// and tau = 1 - 2 rho, so the grid is parameterized by epsilon directly.
struct SweepSpec {
  SweepMode mode = SweepMode::kVaryTestSize;
  std::vector<double> epsilon_grid;
  double delta = 0.05;
  std::vector<double> accuracy_values;   // kVaryAccuracy curves
  std::uint64_t fixed_test_size = 10000;  // kVaryAccuracy
  std::vector<std::uint64_t> test_sizes;  // kVaryTestSize curves
};

struct SweepRow {
  double epsilon = 0.0;
  double tau = 0.0;
  double noisy_accuracy = 0.0;
  std::uint64_t n = 0;
  double delta = 0.0;
  double gap = 0.0;
  std::optional<double> lower_bound;  // absent on vacuous rows (tau <= 0)
  bool vacuous = false;
  bool saturated = false;
};

// One row per (curve, epsilon) grid point, curves outer, epsilon inner.
// Rows with tau <= 0 carry a vacuous marker instead of a bound value.
std::vector<SweepRow> bound_sweep(const SweepSpec& spec);

// CSV with header epsilon,tau,noisy_accuracy,n,delta,gap,lower_bound,flags.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

std::string sweep_flags(const SweepRow& row);

}  // namespace cleanbound
