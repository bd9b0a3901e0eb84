#include <doctest.h>

#include <cmath>

#include "cleanbound/errors.hpp"
#include "cleanbound/synth.hpp"
#include "test_util.hpp"

using namespace cleanbound;

namespace {

GeneratorSpec basic_spec(std::uint64_t n, std::size_t d, std::size_t c, LabelMode mode,
                         std::uint64_t seed) {
  GeneratorSpec spec;
  spec.n_samples = n;
  spec.n_features = d;
  spec.n_classes = c;
  spec.weights = Matrix(c, d);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < d; ++j) spec.weights(i, j) = (i + j) % 2 ? -0.7 : 1.3;
  }
  spec.biases.assign(c, 0.0);
  spec.mode = mode;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("zero weights with positive bias label everything positive") {
  GeneratorSpec spec = basic_spec(100, 3, 2, LabelMode::kDeterministic, 5);
  spec.weights = Matrix(2, 3, 0.0);
  spec.biases = {1.0, 1.0};
  const LabeledDataset data = generate(spec);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(data.clean_labels(i, 0) == 1);
    CHECK(data.clean_labels(i, 1) == 1);
  }
}

TEST_CASE("stochastic zero-logit labels are balanced at 1e5 samples") {
  GeneratorSpec spec = basic_spec(100000, 2, 1, LabelMode::kStochastic, 11);
  spec.weights = Matrix(1, 2, 0.0);
  spec.biases = {0.0};
  const LabeledDataset data = generate(spec);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) positives += data.clean_labels(i, 0);
  CHECK(std::abs(double(positives) / double(spec.n_samples) - 0.5) < 0.005);
}

TEST_CASE("generation is deterministic in the seed") {
  const GeneratorSpec spec = basic_spec(500, 4, 3, LabelMode::kStochastic, 321);
  const LabeledDataset a = generate(spec);
  const LabeledDataset b = generate(spec);
  CHECK(a.features == b.features);
  CHECK(a.clean_labels == b.clean_labels);
  GeneratorSpec other = spec;
  other.seed = 322;
  CHECK(generate(other).features != a.features);
}

TEST_CASE("clean Bayes classifier is perfect on deterministic data, rejected on stochastic") {
  const GeneratorSpec spec = basic_spec(2000, 5, 2, LabelMode::kDeterministic, 17);
  const BayesClassifier oracle = clean_bayes_classifier(spec);
  const LabeledDataset data = generate(spec);
  CHECK(oracle.predict(data.features) == data.clean_labels);
  GeneratorSpec stochastic = spec;
  stochastic.mode = LabelMode::kStochastic;
  CHECK_THROWS_AS(clean_bayes_classifier(stochastic), ValidationError);
}

TEST_CASE("oracle noisy accuracy approaches 1 - epsilon") {
  GeneratorSpec spec = basic_spec(200000, 4, 1, LabelMode::kDeterministic, 23);
  spec.biases = {-0.4};
  LabeledDataset data = generate(spec);
  NoiseModel model;
  model.add_class(TransitionMatrix::from_diagonal(0.9, 0.8),
                  ClassPrior::from_p1(analytic_prior(spec, 0)));
  data.corrupt(model, 99);
  const BayesClassifier oracle = clean_bayes_classifier(spec);
  const BinaryMatrix pred = oracle.predict(data.features);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    matches += pred(i, 0) == (*data.noisy_labels)(i, 0);
  }
  const double acc = double(matches) / double(spec.n_samples);
  CHECK(std::abs(acc - (1.0 - model.noise_rate(0))) < 0.005);

  // Identity noise: oracle noisy accuracy is exactly 1.
  LabeledDataset clean = generate(spec);
  NoiseModel identity;
  identity.add_class(TransitionMatrix::identity(), ClassPrior::from_p1(0.5));
  clean.corrupt(identity, 1);
  CHECK(oracle.predict(clean.features) == *clean.noisy_labels);
}

TEST_CASE("noisy posterior: identity passthrough, deterministic regions, affine mix") {
  GeneratorSpec spec = basic_spec(10, 2, 1, LabelMode::kDeterministic, 3);
  spec.weights(0, 0) = 1.0;
  spec.weights(0, 1) = 0.0;
  spec.biases = {0.0};
  NoiseModel model;
  model.add_class(TransitionMatrix::from_diagonal(0.9, 0.8), ClassPrior::from_p1(0.5));
  NoiseModel identity;
  identity.add_class(TransitionMatrix::identity(), ClassPrior::from_p1(0.5));

  const double pos[2] = {2.0, 0.0};
  const double neg[2] = {-2.0, 0.0};
  CHECK(noisy_posterior(spec, identity, pos, 0) == clean_posterior(spec, pos, 0));
  CHECK(noisy_posterior(spec, model, pos, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(noisy_posterior(spec, model, neg, 0) == doctest::Approx(0.1).epsilon(1e-15));

  // Stochastic mode with clean posterior one half: 0.1*0.5 + 0.8*0.5.
  GeneratorSpec stochastic = spec;
  stochastic.mode = LabelMode::kStochastic;
  const double mid[2] = {0.0, 5.0};
  CHECK(clean_posterior(stochastic, mid, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(noisy_posterior(stochastic, model, mid, 0) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("noisy posterior agrees with brute-force enumeration on deterministic labels") {
  const GeneratorSpec spec = basic_spec(5000, 3, 2, LabelMode::kDeterministic, 31);
  NoiseModel model;
  model.add_class(TransitionMatrix::from_diagonal(0.85, 0.75), ClassPrior::from_p1(0.5));
  model.add_class(TransitionMatrix::from_diagonal(0.95, 0.6), ClassPrior::from_p1(0.5));
  const LabeledDataset data = generate(spec);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      const TransitionMatrix& t = model.transition(c);
      const double expected = data.clean_labels(i, c) ? t.t11() : t.t01();
      CHECK(noisy_posterior(spec, model, data.features.row(i), c) ==
            doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("analytic priors match empirical frequencies") {
  // Deterministic mode with a negative bias: prior is Phi(b/|w|).
  GeneratorSpec spec = basic_spec(200000, 3, 1, LabelMode::kDeterministic, 41);
  spec.weights(0, 0) = 1.0;
  spec.weights(0, 1) = 2.0;
  spec.weights(0, 2) = -1.0;
  spec.biases = {-1.2};
  const LabeledDataset data = generate(spec);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) positives += data.clean_labels(i, 0);
  const double empirical = double(positives) / double(spec.n_samples);
  CHECK(std::abs(analytic_prior(spec, 0) - empirical) < 0.005);

  GeneratorSpec stochastic = spec;
  stochastic.mode = LabelMode::kStochastic;
  const LabeledDataset sdata = generate(stochastic);
  positives = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) positives += sdata.clean_labels(i, 0);
  CHECK(std::abs(analytic_prior(stochastic, 0) - double(positives) / double(spec.n_samples)) < 0.005);

  // Zero bias is one half by symmetry.
  spec.biases = {0.0};
  CHECK(analytic_prior(spec, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("dataset CSV and metadata round-trip bit-exactly") {
  testutil::TempDir tmp("synth_roundtrip");
  GeneratorSpec spec = basic_spec(50, 3, 2, LabelMode::kDeterministic, 7);
  LabeledDataset data = generate(spec);
  NoiseModel model;
  model.add_class(TransitionMatrix::from_diagonal(0.9, 0.9), ClassPrior::from_p1(0.5));
  model.add_class(TransitionMatrix::from_diagonal(0.8, 0.7), ClassPrior::from_p1(0.4));
  data.corrupt(model, 55);
  save_dataset_csv(data, tmp.path("d.csv"));
  save_dataset_meta(data, tmp.path("d.meta"));

  const LabeledDataset loaded = load_dataset(tmp.path("d.csv"), tmp.path("d.meta"));
  CHECK(loaded.features == data.features);
  CHECK(loaded.clean_labels == data.clean_labels);
  REQUIRE(loaded.noisy_labels.has_value());
  CHECK(*loaded.noisy_labels == *data.noisy_labels);
  REQUIRE(loaded.spec.has_value());
  CHECK(loaded.spec->weights == spec.weights);
  REQUIRE(loaded.noise_model.has_value());
  CHECK(loaded.noise_model->transition(1).t11() == 0.7);

  // Saving the loaded dataset reproduces the same bytes.
  save_dataset_csv(loaded, tmp.path("d2.csv"));
  CHECK(testutil::read_file(tmp.path("d2.csv")) == testutil::read_file(tmp.path("d.csv")));

  const std::string content = testutil::read_file(tmp.path("d.csv"));
  CHECK(content.substr(0, content.find('\n') + 1) == "x0,x1,x2,y0,y1,yt0,yt1\n");
}

TEST_CASE("clean-only datasets omit the noisy columns") {
  testutil::TempDir tmp("synth_clean_only");
  const GeneratorSpec spec = basic_spec(10, 2, 1, LabelMode::kDeterministic, 9);
  const LabeledDataset data = generate(spec);
  save_dataset_csv(data, tmp.path("c.csv"));
  const LabeledDataset loaded = load_dataset(tmp.path("c.csv"));
  CHECK_FALSE(loaded.noisy_labels.has_value());
  CHECK(loaded.clean_labels == data.clean_labels);
}

TEST_CASE("generator spec validation rejects bad shapes") {
  GeneratorSpec spec = basic_spec(10, 2, 2, LabelMode::kDeterministic, 1);
  spec.weights = Matrix(1, 2);
  CHECK_THROWS_AS(generate(spec), ValidationError);
  spec = basic_spec(10, 2, 2, LabelMode::kDeterministic, 1);
  spec.biases = {0.0};
  CHECK_THROWS_AS(generate(spec), ValidationError);
}
