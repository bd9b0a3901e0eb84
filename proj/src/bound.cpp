#include "cleanbound/bound.hpp"

#include <cmath>

#include "cleanbound/errors.hpp"
#include "cleanbound/kv.hpp"

namespace cleanbound {

double hoeffding_gap(double delta, std::uint64_t n) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ValidationError("delta must be in (0,1], got " + format_double(delta));
  }
  if (n < 1) throw ValidationError("test set size must be >= 1");
  return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

BoundReport clean_accuracy_lower_bound(const BoundInputs& in) {
  if (!(in.noisy_test_accuracy >= 0.0 && in.noisy_test_accuracy <= 1.0)) {
    throw ValidationError("noisy test accuracy must be in [0,1], got " +
                          format_double(in.noisy_test_accuracy));
  }
  if (!(in.epsilon >= 0.0 && in.epsilon <= 1.0)) {
    throw ValidationError("epsilon must be in [0,1], got " + format_double(in.epsilon));
  }
  const double gap = hoeffding_gap(in.delta, in.test_set_size);
  if (!(in.tau > 0.0)) {
    throw VacuousBoundError("vacuous bound: tau = " + format_double(in.tau) +
                            " is not positive; the transition matrix is not diagonally dominant");
  }
  BoundReport report;
  report.inputs = in;
  report.hoeffding_gap = gap;
  const double term = -1.0 + in.epsilon + in.noisy_test_accuracy - gap;
  report.lower_bound = 1.0 + term / in.tau;
  report.saturated = term > 0.0;
  return report;
}

double noisy_optimal_accuracy(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("epsilon must be in [0,1], got " + format_double(epsilon));
  }
  return 1.0 - epsilon;
}

namespace {

SweepRow make_row(double eps, double acc, std::uint64_t n, double delta) {
  SweepRow row;
  row.epsilon = eps;
  row.tau = 1.0 - 2.0 * eps;
  row.noisy_accuracy = acc;
  row.n = n;
  row.delta = delta;
  row.gap = hoeffding_gap(delta, n);
  if (row.tau <= 0.0) {
    row.vacuous = true;
    return row;
  }
  BoundInputs in;
  in.noisy_test_accuracy = acc;
  in.delta = delta;
  in.test_set_size = n;
  in.tau = row.tau;
  in.epsilon = eps;
  const BoundReport report = clean_accuracy_lower_bound(in);
  row.lower_bound = report.lower_bound;
  row.saturated = report.saturated;
  return row;
}

}  // namespace

std::vector<SweepRow> bound_sweep(const SweepSpec& spec) {
  if (spec.epsilon_grid.empty()) throw ValidationError("sweep epsilon grid is empty");
  for (double eps : spec.epsilon_grid) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw ValidationError("sweep epsilon values must be in [0,1], got " + format_double(eps));
    }
  }
  std::vector<SweepRow> rows;
  if (spec.mode == SweepMode::kVaryAccuracy) {
    if (spec.accuracy_values.empty()) throw ValidationError("sweep accuracy value set is empty");
    for (double acc : spec.accuracy_values) {
      for (double eps : spec.epsilon_grid) {
        rows.push_back(make_row(eps, acc, spec.fixed_test_size, spec.delta));
      }
    }
  } else {
    if (spec.test_sizes.empty()) throw ValidationError("sweep test size set is empty");
    for (std::uint64_t n : spec.test_sizes) {
      for (double eps : spec.epsilon_grid) {
        rows.push_back(make_row(eps, (1.0 - eps) - 0.1, n, spec.delta));
      }
    }
  }
  return rows;
}

std::string sweep_flags(const SweepRow& row) {
  if (row.vacuous) return "vacuous";
  if (row.saturated) return "saturated";
  return "";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "epsilon,tau,noisy_accuracy,n,delta,gap,lower_bound,flags\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.epsilon) << ',' << format_double(row.tau) << ','
        << format_double(row.noisy_accuracy) << ',' << row.n << ',' << format_double(row.delta)
        << ',' << format_double(row.gap) << ',';
    if (row.lower_bound) {
      out << format_double(*row.lower_bound);
    } else {
      out << "vacuous";
    }
    out << ',' << sweep_flags(row) << '\n';
  }
}

}  // namespace cleanbound
