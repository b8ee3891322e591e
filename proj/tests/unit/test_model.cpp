#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"
#include "csr/model/batch.hpp"
#include "csr/model/cvae_unit.hpp"
#include "csr/model/model.hpp"
#include "csr/model/predictors.hpp"

namespace {

using namespace csr::model;
using csr::diffnum::Tensor;

// Layer widths transcribed from the published architecture table.
std::size_t layers(std::initializer_list<std::size_t> w) {
  std::size_t n = 0;
  const std::vector<std::size_t> v(w);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) n += v[i] * v[i + 1] + v[i + 1];
  return n;
}

std::size_t table_unit(std::size_t t) {
  return layers({2 * t, 512, 256, 16}) + layers({2, 8, 16, 16}) + layers({32, 8, 50, 32}) +
         layers({32, 1024, 512, 1024, 2});
}

Batch random_batch(std::mt19937_64& rng, std::vector<std::size_t> sizes, std::size_t tau = 8, std::size_t delta = 12) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Batch b;
  b.tau = tau;
  b.delta = delta;
  std::size_t rows = 0;
  b.offsets.push_back(0);
  for (std::size_t s : sizes) b.offsets.push_back(rows += s);
  b.past = Tensor::matrix(rows, 2 * tau);
  b.future = Tensor::matrix(rows, 2 * delta);
  b.last_abs = Tensor::matrix(rows, 2);
  for (Tensor* t : {&b.past, &b.future, &b.last_abs}) {
    for (double& v : t->values()) v = u(rng);
  }
  return b;
}

TEST(Config, PublishedWidths) {
  const NetworkWidths w = NetworkWidths::published();
  EXPECT_EQ(w.feature_dim, 16u);
  EXPECT_EQ(w.latent_dim, 16u);
  EXPECT_EQ(CvaeUnit::count_for(8, w), table_unit(8));
}

TEST(Config, NarrowedNeverBelowTwo) {
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  EXPECT_EQ(w.feature_dim, 2u);
  EXPECT_EQ(w.e_point_hidden, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(w.d_latent_hidden, (std::vector<std::size_t>{64, 32, 64}));
  EXPECT_EQ(NetworkWidths::preset("narrow16"), w);
  EXPECT_THROW(NetworkWidths::preset("wide"), csr::UsageError);
}

TEST(Config, SlideRejectsAlphaAboveTau) {
  Horizon h;
  h.alpha = 9;
  EXPECT_THROW(h.validate(HeadKind::kSlide), csr::UsageError);
  EXPECT_NO_THROW(h.validate(HeadKind::kCascaded));
  EXPECT_THROW(parse_head_kind("transformer"), csr::UsageError);
}

TEST(ParameterCount, HeadsAreSumsOfUnits) {
  const NetworkWidths w = NetworkWidths::published();
  const Horizon h;
  std::size_t cascaded = 0;
  for (std::size_t t = 8; t <= 19; ++t) cascaded += table_unit(t);
  EXPECT_EQ(Head::count_for(HeadKind::kCascaded, h, w), cascaded);
  EXPECT_EQ(Head::count_for(HeadKind::kSlide, h, w), table_unit(8));
  EXPECT_EQ(Head::count_for(HeadKind::kBaseline, h, w), 12 * table_unit(8));
  const double ratio = static_cast<double>(cascaded) / static_cast<double>(table_unit(8));
  EXPECT_NEAR(ratio, 12.0, 0.2);
}

TEST(ParameterCount, BuiltModelMatchesClosedForm) {
  ModelConfig c;
  c.widths = NetworkWidths::published().narrowed(8);
  for (HeadKind k : {HeadKind::kBaseline, HeadKind::kCascaded, HeadKind::kSlide}) {
    for (bool refiner : {false, true}) {
      c.head = k;
      c.refiner = refiner;
      Model m(c);
      EXPECT_EQ(m.parameter_count(), Model::count_for(c));
    }
  }
}

class UnitTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng{5};
  csr::diffnum::ParamStore store;
  NetworkWidths widths = NetworkWidths::published().narrowed(8);
};

TEST_F(UnitTest, Shapes) {
  widths.latent_dim = 16;
  const CvaeUnit unit(store, "u", 8, widths, rng);
  Tape tape(false);
  const auto noise = draw_noise(rng, 3, 1, 16).front();
  const auto out = unit.train_forward(tape, store, tape.constant(Tensor::matrix(3, 16, 0.1)),
                                      tape.constant(Tensor::matrix(3, 2, 0.3)), tape.constant(noise));
  EXPECT_EQ(out.point.value().shape(), (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(out.mu.value().shape(), (std::vector<std::size_t>{3, 16}));
  EXPECT_EQ(out.log_var.value().shape(), (std::vector<std::size_t>{3, 16}));
}

TEST_F(UnitTest, ZeroDecoderOutputsBias) {
  const CvaeUnit unit(store, "u", 8, widths, rng);
  store[unit.d_latent().weights().back()].value.fill(0.0);
  store[unit.d_latent().biases().back()].value = Tensor::from_rows({{0.25, -1.5}});
  Tape tape(false);
  const auto out = unit.infer_forward(tape, store, tape.constant(Tensor::matrix(4, 16, 0.7)),
                                      tape.constant(draw_noise(rng, 4, 1, widths.latent_dim).front()));
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(out.point.value().at(r, 0), 0.25);
    EXPECT_EQ(out.point.value().at(r, 1), -1.5);
  }
}

TEST_F(UnitTest, DeterministicAndNoiseSensitive) {
  const CvaeUnit unit(store, "u", 8, widths, rng);
  const Tensor past = Tensor::matrix(2, 16, 0.4);
  const auto n1 = draw_noise(rng, 2, 1, widths.latent_dim).front();
  const auto n2 = draw_noise(rng, 2, 1, widths.latent_dim).front();
  const auto run = [&](const Tensor& n) {
    Tape tape(false);
    return unit.infer_forward(tape, store, tape.constant(past), tape.constant(n)).point.value();
  };
  EXPECT_EQ(run(n1), run(n1));
  EXPECT_NE(run(n1), run(n2));
}

TEST_F(UnitTest, NoiseToPointIsContinuous) {
  const CvaeUnit unit(store, "u", 8, widths, rng);
  const Tensor past = Tensor::matrix(1, 16, 0.2);
  const auto base = draw_noise(rng, 1, 1, widths.latent_dim).front();
  const auto dir = draw_noise(rng, 1, 1, widths.latent_dim).front();
  const auto run = [&](double eps) {
    Tensor n = base;
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += eps * dir[i];
    Tape tape(false);
    return unit.infer_forward(tape, store, tape.constant(past), tape.constant(n)).point.value();
  };
  const Tensor p0 = run(0.0);
  double prev = 1e300;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const Tensor p = run(eps);
    const double d = std::hypot(p[0] - p0[0], p[1] - p0[1]);
    EXPECT_LE(d, prev);
    EXPECT_LT(d, 100.0 * eps);
    prev = d;
  }
}

TEST(Rollout, CascadedShapesAndInputWidths) {
  std::mt19937_64 rng(1);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kCascaded, Horizon{}, w, rng);
  const Batch b = random_batch(rng, {4});
  std::vector<Tensor> inputs;
  Tape tape(false);
  const auto out = head.rollout(tape, store, b, RolloutMode::kInfer, draw_noise(rng, 4, 12, w.latent_dim),
                                {false, &inputs});
  EXPECT_EQ(out.points.value().shape(), (std::vector<std::size_t>{4, 24}));
  ASSERT_EQ(inputs.size(), 12u);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(inputs[k].cols(), 2 * (8 + k));
}

TEST(Rollout, ZeroDecodersFeedBiasBack) {
  std::mt19937_64 rng(2);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kCascaded, Horizon{}, w, rng);
  for (const auto& u : head.units()) {
    store[u.d_latent().weights().back()].value.fill(0.0);
    store[u.d_latent().biases().back()].value = Tensor::from_rows({{0.5, -0.75}});
  }
  const Batch b = random_batch(rng, {2});
  for (RolloutMode mode : {RolloutMode::kInfer, RolloutMode::kTrain}) {
    std::vector<Tensor> inputs;
    Tape tape(false);
    const auto out = head.rollout(tape, store, b, mode, draw_noise(rng, 2, 12, w.latent_dim), {false, &inputs});
    for (std::size_t k = 0; k < 12; ++k) {
      for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_EQ(out.points.value().at(r, 2 * k), 0.5);
        EXPECT_EQ(out.points.value().at(r, 2 * k + 1), -0.75);
        // the past, then k copies of the bias
        for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(inputs[k].at(r, c), b.past.at(r, c));
        for (std::size_t j = 0; j < k; ++j) {
          EXPECT_EQ(inputs[k].at(r, 16 + 2 * j), 0.5);
          EXPECT_EQ(inputs[k].at(r, 16 + 2 * j + 1), -0.75);
        }
      }
    }
  }
}

TEST(Rollout, TeacherForcingFeedsGroundTruth) {
  std::mt19937_64 rng(3);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kCascaded, Horizon{}, w, rng);
  const Batch b = random_batch(rng, {3});
  std::vector<Tensor> inputs;
  Tape tape(false);
  head.rollout(tape, store, b, RolloutMode::kTrain, draw_noise(rng, 3, 12, w.latent_dim), {true, &inputs});
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 22; ++c) EXPECT_EQ(inputs[11].at(r, 16 + c), b.future.at(r, c));
  }
}

TEST(Rollout, SlideExamples) {
  std::mt19937_64 rng(4);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kSlide, Horizon{}, w, rng);
  const Batch b = random_batch(rng, {2});
  std::vector<Tensor> inputs;
  Tape tape(false);
  const auto out = head.rollout(tape, store, b, RolloutMode::kInfer, draw_noise(rng, 2, 12, w.latent_dim),
                                {false, &inputs});
  const Tensor& pred = out.points.value();
  for (const auto& in : inputs) EXPECT_EQ(in.cols(), 16u);
  for (std::size_t r = 0; r < 2; ++r) {
    // first step: the 8 observed points
    for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(inputs[0].at(r, c), b.past.at(r, c));
    // fifth step: observed points 5..8, then predictions 1..4
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(inputs[4].at(r, c), b.past.at(r, 8 + c));
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(inputs[4].at(r, 8 + c), pred.at(r, c));
    // ninth step: predictions 1..8 only
    for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(inputs[8].at(r, c), pred.at(r, c));
  }
}

TEST(Rollout, BaselineUnitsAreIndependent) {
  std::mt19937_64 rng(5);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kBaseline, Horizon{}, w, rng);
  // give unit 3 the parameters of unit 1
  const auto& units = head.units();
  const auto copy = [&](const csr::diffnum::Mlp& src, const csr::diffnum::Mlp& dst) {
    for (std::size_t l = 0; l < src.weights().size(); ++l) {
      store[dst.weights()[l]].value = store[src.weights()[l]].value;
      store[dst.biases()[l]].value = store[src.biases()[l]].value;
    }
  };
  copy(units[1].e_upast(), units[3].e_upast());
  copy(units[1].e_point(), units[3].e_point());
  copy(units[1].e_latent(), units[3].e_latent());
  copy(units[1].d_latent(), units[3].d_latent());
  const Batch b = random_batch(rng, {3});
  auto noise = draw_noise(rng, 3, 12, w.latent_dim);
  noise[3] = noise[1];
  std::vector<Tensor> inputs;
  Tape tape(false);
  const Tensor pred = head.rollout(tape, store, b, RolloutMode::kInfer, noise, {false, &inputs}).points.value();
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(pred.at(r, 2), pred.at(r, 6));
    EXPECT_EQ(pred.at(r, 3), pred.at(r, 7));
  }
  for (const auto& in : inputs) EXPECT_EQ(in, b.past);
}

TEST(Rollout, LaterNoiseNeverChangesEarlierSteps) {
  std::mt19937_64 rng(6);
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  for (HeadKind kind : {HeadKind::kCascaded, HeadKind::kSlide, HeadKind::kBaseline}) {
    csr::diffnum::ParamStore store;
    const Head head(store, kind, Horizon{}, w, rng);
    const Batch b = random_batch(rng, {3});
    const auto noise = draw_noise(rng, 3, 12, w.latent_dim);
    for (std::size_t j : {1u, 6u, 11u}) {
      auto changed = noise;
      for (double& v : changed[j].values()) v += 0.5;
      Tape t1(false), t2(false);
      const Tensor a = head.rollout(t1, store, b, RolloutMode::kInfer, noise).points.value();
      const Tensor c = head.rollout(t2, store, b, RolloutMode::kInfer, changed).points.value();
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t col = 0; col < 2 * j; ++col) EXPECT_EQ(a.at(r, col), c.at(r, col));
        EXPECT_NE(a.at(r, 2 * j), c.at(r, 2 * j));
      }
    }
  }
}

TEST(Rollout, SingleStepHeadsCoincide) {
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  Horizon h;
  h.delta = 1;
  std::mt19937_64 data_rng(7);
  const Batch b = random_batch(data_rng, {4}, 8, 1);
  const auto noise = draw_noise(data_rng, 4, 1, w.latent_dim);
  std::vector<Tensor> results;
  for (HeadKind kind : {HeadKind::kBaseline, HeadKind::kCascaded, HeadKind::kSlide}) {
    // identical seeds give identical unit parameters
    std::mt19937_64 rng(99);
    csr::diffnum::ParamStore store;
    const Head head(store, kind, h, w, rng);
    Tape tape(false);
    results.push_back(head.rollout(tape, store, b, RolloutMode::kInfer, noise).points.value());
  }
  EXPECT_EQ(results[0], results[1]);
  EXPECT_EQ(results[1], results[2]);
}

TEST(Rollout, HorizonMismatchRejected) {
  std::mt19937_64 rng(8);
  csr::diffnum::ParamStore store;
  const NetworkWidths w = NetworkWidths::published().narrowed(16);
  const Head head(store, HeadKind::kCascaded, Horizon{}, w, rng);
  const Batch b = random_batch(rng, {2}, 8, 10);
  Tape tape(false);
  EXPECT_THROW(head.rollout(tape, store, b, RolloutMode::kInfer, draw_noise(rng, 2, 10, w.latent_dim)),
               csr::UsageError);
}

TEST(Model, DeterministicGivenNoise) {
  ModelConfig c;
  c.widths = NetworkWidths::published().narrowed(16);
  Model a(c), b(c);
  std::mt19937_64 rng(9);
  const Batch batch = random_batch(rng, {3, 2});
  const auto noise = draw_noise(rng, 5, 12, c.widths.latent_dim);
  Tape t1(false), t2(false);
  const auto fa = a.forward(t1, batch, RolloutMode::kInfer, noise);
  const auto fb = b.forward(t2, batch, RolloutMode::kInfer, noise);
  EXPECT_EQ(fa.refined.value(), fb.refined.value());
  // refined is raw plus offsets, element by element
  for (std::size_t i = 0; i < fa.refined.value().size(); ++i) {
    EXPECT_EQ(fa.refined.value()[i], fa.raw.points.value()[i] + fa.offsets.value()[i]) << i;
  }
}

}  // namespace
