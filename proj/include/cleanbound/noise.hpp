#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cleanbound/kv.hpp"
#include "cleanbound/matrix.hpp"

namespace cleanbound {

// Row-stochastic 2x2 label-flip model for one binary class. Entry (k, l) is
// the probability that a clean label k comes out as l.
class TransitionMatrix {
 public:
  // Off-diagonals are implied by the row sums: t01 = 1 - t00, t10 = 1 - t11.
  static TransitionMatrix from_diagonal(double t00, double t11);
  static TransitionMatrix identity() { return from_diagonal(1.0, 1.0); }
  // t00 = t11 = 1 - rho: each label flips with probability rho.
  static TransitionMatrix symmetric(double rho);

  double t00() const { return t00_; }
  double t01() const { return 1.0 - t00_; }
  double t10() const { return 1.0 - t11_; }
  double t11() const { return t11_; }

 private:
  TransitionMatrix(double t00, double t11) : t00_(t00), t11_(t11) {}
  double t00_;
  double t11_;
};

class ClassPrior {
 public:
  static ClassPrior from_p1(double p1);

  double p0() const { return 1.0 - p1_; }
  double p1() const { return p1_; }

 private:
  explicit ClassPrior(double p1) : p1_(p1) {}
  double p1_;
};

// min over k != l of T_kk - T_kl. May be <= 0; the bound layer decides how to
// react to that.
double compute_tau(const TransitionMatrix& t);

// Probability that a label is corrupted: 1 - sum_k P(Y=k) T_kk.
double compute_noise_rate(const TransitionMatrix& t, const ClassPrior& prior);

// One (transition matrix, prior) pair per label index.
class NoiseModel {
 public:
  NoiseModel() = default;

  void add_class(const TransitionMatrix& t, const ClassPrior& prior);
  std::size_t num_classes() const { return classes_.size(); }
  const TransitionMatrix& transition(std::size_t c) const;
  const ClassPrior& prior(std::size_t c) const;
  void set_prior(std::size_t c, const ClassPrior& prior);

  double tau(std::size_t c) const { return compute_tau(transition(c)); }
  double noise_rate(std::size_t c) const { return compute_noise_rate(transition(c), prior(c)); }

  // Key-value format: class.<c>.t00, class.<c>.t11, class.<c>.p0.
  KvDoc to_kv(const std::string& prefix = "") const;
  static NoiseModel from_kv(const KvDoc& doc, const std::string& prefix = "");
  void save(const std::string& path) const;
  static NoiseModel load(const std::string& path);

 private:
  struct Entry {
    TransitionMatrix transition;
    ClassPrior prior;
  };
  std::vector<Entry> classes_;
};

// Flips each of the C labels independently through its class's transition
// matrix. Row i draws from the substream (seed, i), so the result is a pure
// function of (labels, model, seed) regardless of evaluation order.
BinaryMatrix corrupt_labels(const BinaryMatrix& clean_labels, const NoiseModel& model,
                            std::uint64_t seed);

}  // namespace cleanbound
