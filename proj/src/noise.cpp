#include "cleanbound/noise.hpp"

#include <algorithm>
#include <cmath>

#include "cleanbound/errors.hpp"
#include "cleanbound/rng.hpp"

namespace cleanbound {

namespace {

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must be in [0,1], got " + format_double(v));
  }
}

}  // namespace

TransitionMatrix TransitionMatrix::from_diagonal(double t00, double t11) {
  check_probability(t00, "t00");
  check_probability(t11, "t11");
  return TransitionMatrix(t00, t11);
}

TransitionMatrix TransitionMatrix::symmetric(double rho) {
  check_probability(rho, "rho");
  return from_diagonal(1.0 - rho, 1.0 - rho);
}

ClassPrior ClassPrior::from_p1(double p1) {
  check_probability(p1, "p1");
  return ClassPrior(p1);
}

double compute_tau(const TransitionMatrix& t) {
  return std::min(t.t00() - t.t01(), t.t11() - t.t10());
}

double compute_noise_rate(const TransitionMatrix& t, const ClassPrior& prior) {
  return 1.0 - (prior.p0() * t.t00() + prior.p1() * t.t11());
}

void NoiseModel::add_class(const TransitionMatrix& t, const ClassPrior& prior) {
  classes_.push_back(Entry{t, prior});
}

const TransitionMatrix& NoiseModel::transition(std::size_t c) const {
  if (c >= classes_.size()) throw ValidationError("noise model has no class " + std::to_string(c));
  return classes_[c].transition;
}

const ClassPrior& NoiseModel::prior(std::size_t c) const {
  if (c >= classes_.size()) throw ValidationError("noise model has no class " + std::to_string(c));
  return classes_[c].prior;
}

void NoiseModel::set_prior(std::size_t c, const ClassPrior& prior) {
  if (c >= classes_.size()) throw ValidationError("noise model has no class " + std::to_string(c));
  classes_[c].prior = prior;
}

KvDoc NoiseModel::to_kv(const std::string& prefix) const {
  KvDoc doc;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const std::string base = prefix + "class." + std::to_string(c) + ".";
    doc.set_double(base + "t00", classes_[c].transition.t00());
    doc.set_double(base + "t11", classes_[c].transition.t11());
    doc.set_double(base + "p0", classes_[c].prior.p0());
  }
  return doc;
}

NoiseModel NoiseModel::from_kv(const KvDoc& doc, const std::string& prefix) {
  NoiseModel model;
  for (std::size_t c = 0;; ++c) {
    const std::string base = prefix + "class." + std::to_string(c) + ".";
    if (!doc.has(base + "t00")) break;
    const double t00 = doc.get_double(base + "t00");
    const double t11 = doc.get_double(base + "t11");
    const double p0 = doc.get_double(base + "p0");
    check_probability(p0, (base + "p0").c_str());
    model.add_class(TransitionMatrix::from_diagonal(t00, t11), ClassPrior::from_p1(1.0 - p0));
  }
  if (model.num_classes() == 0) {
    throw ValidationError("noise model document has no '" + prefix + "class.0.t00' entry");
  }
  return model;
}

void NoiseModel::save(const std::string& path) const { to_kv().save(path); }

NoiseModel NoiseModel::load(const std::string& path) { return from_kv(KvDoc::load(path)); }

BinaryMatrix corrupt_labels(const BinaryMatrix& clean_labels, const NoiseModel& model,
                            std::uint64_t seed) {
  const std::size_t n = clean_labels.rows();
  const std::size_t num_classes = clean_labels.cols();
  if (model.num_classes() != num_classes) {
    throw ValidationError("label matrix has " + std::to_string(num_classes) +
                          " classes but noise model has " + std::to_string(model.num_classes()));
  }
  BinaryMatrix noisy(n, num_classes);
  const SplitRng base(seed);
  for (std::size_t i = 0; i < n; ++i) {
    SplitRng row_rng = base.split(i);
    for (std::size_t c = 0; c < num_classes; ++c) {
      const std::uint8_t y = clean_labels(i, c);
      if (y != 0 && y != 1) {
        throw ValidationError("clean label at (" + std::to_string(i) + "," + std::to_string(c) +
                              ") is not binary");
      }
      const TransitionMatrix& t = model.transition(c);
      // P(noisy = 1 | clean = y) is t01 for y = 0 and t11 for y = 1.
      const double p1 = y ? t.t11() : t.t01();
      noisy(i, c) = row_rng.next_double() < p1 ? 1 : 0;
    }
  }
  return noisy;
}

}  // namespace cleanbound
