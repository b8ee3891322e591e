#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "csr/diffnum/adam.hpp"
#include "csr/diffnum/gaussian.hpp"
#include "csr/diffnum/gradcheck.hpp"
#include "csr/diffnum/mlp.hpp"
#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"

namespace {

using namespace csr::diffnum;

Tensor random_tensor(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t = Tensor::matrix(r, c);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// Analytic vs central differences of a scalar loss built on a tape.
template <class Build>
GradCheckReport check(ParamStore& store, Build build) {
  store.zero_grad();
  {
    Tape tape;
    tape.backward(build(tape, store));
  }
  const auto analytic = flatten_gradients(store);
  store.zero_grad();
  const auto numeric = central_differences(store, [&](ParamStore& s) {
    Tape tape(false);
    return std::vector<double>{build(tape, s).value()[0]};
  });
  return compare_gradients(store, analytic, numeric[0], 1e-8);
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor({2, 0}), csr::UsageError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1.0, 2.0, 3.0}), csr::UsageError);
  const Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.shape_string(), "[2, 3]");
}

TEST(Tensor, ReshapeKeepsData) {
  const Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Tensor r = t.reshaped({3, 2});
  EXPECT_EQ(r.at(2, 1), 6.0);
  EXPECT_THROW(t.reshaped({4, 2}), csr::UsageError);
}

TEST(Mlp, IdentityWeightsPassInputThrough) {
  std::mt19937_64 rng(0);
  ParamStore store;
  Mlp mlp(store, "m", MlpSpec{{2, 2}}, rng);
  store[mlp.weights()[0]].value = Tensor::from_rows({{1, 0}, {0, 1}});
  store[mlp.biases()[0]].value.fill(0.0);
  Tape tape(false);
  const Var y = mlp.forward(tape, store, tape.constant(Tensor::from_rows({{3, 4}})));
  EXPECT_EQ(y.value(), Tensor::from_rows({{3, 4}}));
}

TEST(Mlp, HiddenReluClampsNegatives) {
  std::mt19937_64 rng(0);
  ParamStore store;
  Mlp mlp(store, "m", MlpSpec{{2, 2, 2}}, rng);
  for (std::size_t l = 0; l < 2; ++l) {
    store[mlp.weights()[l]].value = Tensor::from_rows({{1, 0}, {0, 1}});
    store[mlp.biases()[l]].value.fill(0.0);
  }
  Tape tape(false);
  const Var y = mlp.forward(tape, store, tape.constant(Tensor::from_rows({{-3, 4}})));
  EXPECT_EQ(y.value(), Tensor::from_rows({{0, 4}}));
}

TEST(Mlp, PointEncoderShapeAndCount) {
  std::mt19937_64 rng(0);
  ParamStore store;
  const MlpSpec spec{{2, 8, 16, 16}};
  Mlp mlp(store, "e_point", spec, rng);
  Tape tape(false);
  const Var y = mlp.forward(tape, store, tape.constant(random_tensor(rng, 5, 2)));
  EXPECT_EQ(y.value().shape(), (std::vector<std::size_t>{5, 16}));
  EXPECT_EQ(spec.parameter_count(), 2u * 8 + 8 + 8 * 16 + 16 + 16 * 16 + 16);
  EXPECT_EQ(store.scalar_count(), spec.parameter_count());
}

TEST(Mlp, RejectsWrongInputWidth) {
  std::mt19937_64 rng(0);
  ParamStore store;
  Mlp mlp(store, "m", MlpSpec{{3, 2}}, rng);
  Tape tape(false);
  EXPECT_THROW(mlp.forward(tape, store, tape.constant(Tensor::matrix(1, 2))), csr::UsageError);
}

TEST(Tape, LinearGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  ParamStore store;
  const ParamId w = store.add("w", random_tensor(rng, 3, 4));
  const ParamId b = store.add("b", random_tensor(rng, 1, 4));
  const Tensor x = random_tensor(rng, 5, 3);
  const auto rep = check(store, [&](Tape& t, ParamStore& s) {
    return sum(linear(t.constant(x), t.param(s, w), t.param(s, b)));
  });
  EXPECT_LT(rep.max_rel_error, 1e-6) << rep.worst_param;
}

TEST(Tape, UnusedParameterHasZeroGradient) {
  std::mt19937_64 rng(2);
  ParamStore store;
  const ParamId used = store.add("used", random_tensor(rng, 2, 2));
  const ParamId unused = store.add("unused", random_tensor(rng, 2, 2));
  Tape tape;
  tape.backward(sum(square(tape.param(store, used))));
  for (double g : store[unused].grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(Tape, BackwardRejectsNonScalarLoss) {
  Tape tape;
  const Var v = tape.constant(Tensor::matrix(2, 2, 1.0));
  EXPECT_THROW(tape.backward(v), csr::UsageError);
}

TEST(Tape, TwoLayerMseMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  ParamStore store;
  Mlp mlp(store, "net", MlpSpec{{3, 6, 2}}, rng);
  const Tensor x = random_tensor(rng, 8, 3), y = random_tensor(rng, 8, 2);
  const auto rep = check(store, [&](Tape& t, ParamStore& s) {
    return scale(sum(square(sub(mlp.forward(t, s, t.constant(x)), t.constant(y)))), 1.0 / 8.0);
  });
  EXPECT_LT(rep.max_rel_error, 1e-4) << rep.worst_param << "[" << rep.worst_offset << "]";
}

TEST(Tape, ElementwiseOpsMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  ParamStore store;
  const ParamId a = store.add("a", random_tensor(rng, 3, 4, 0.2, 1.0));
  const ParamId c = store.add("c", random_tensor(rng, 3, 4, -1.0, -0.2));
  const Tensor noise = random_tensor(rng, 3, 2);
  const auto rep = check(store, [&](Tape& t, ParamStore& s) {
    const Var va = t.param(s, a), vc = t.param(s, c);
    const std::array<Var, 2> parts{relu(va), exp(vc)};
    const Var wide = concat_cols(parts);
    const Var mu = slice_cols(wide, 0, 2), lv = slice_cols(wide, 5, 2);
    const Var z = sample_reparameterized(mu, lv, t.constant(noise));
    return add(add(sum(pair_norms(mul(va, vc))), kl_standard_normal(mu, lv)), sum(square(z)));
  });
  EXPECT_LT(rep.max_rel_error, 1e-6) << rep.worst_param << "[" << rep.worst_offset << "]";
}

TEST(Tape, SoftmaxRowsMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  ParamStore store;
  const ParamId x = store.add("x", random_tensor(rng, 3, 3));
  const Tensor mask = Tensor::from_rows({{1, 1, 0}, {1, 1, 1}, {0, 0, 1}});
  const Tensor weights = random_tensor(rng, 3, 3);
  const auto rep = check(store, [&](Tape& t, ParamStore& s) {
    return sum(mul(softmax_rows(t.param(s, x), mask), t.constant(weights)));
  });
  EXPECT_LT(rep.max_rel_error, 1e-6);
}

TEST(Tape, StopGradientBlocksFlow) {
  ParamStore store;
  const ParamId p = store.add("p", Tensor::matrix(1, 1, 2.0));
  Tape tape;
  const Var v = tape.param(store, p);
  tape.backward(add(square(stop_gradient(v)), scale(v, 3.0)));
  EXPECT_EQ(store[p].grad[0], 3.0);
}

TEST(Reparameterize, Examples) {
  EXPECT_EQ(sample_reparameterized(LatentGaussian{{0, 0}, {0, 0}}, std::vector<double>{0.3, -1.2}),
            (std::vector<double>{0.3, -1.2}));
  EXPECT_EQ(sample_reparameterized(LatentGaussian{{2.5, -1}, {0, 0}}, std::vector<double>{0, 0}),
            (std::vector<double>{2.5, -1}));
  const auto z = sample_reparameterized(LatentGaussian{{1, 1}, {std::log(4.0), std::log(4.0)}},
                                        std::vector<double>{1, -1});
  EXPECT_NEAR(z[0], 3.0, 1e-15);
  EXPECT_NEAR(z[1], -1.0, 1e-15);
}

TEST(KlDivergence, ClosedFormExamples) {
  EXPECT_EQ(kl_standard_normal(LatentGaussian{{0, 0, 0}, {0, 0, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(kl_standard_normal(LatentGaussian{{1, 0}, {0, 0}}), 0.5);
}

TEST(KlDivergence, MatchesMonteCarloEstimate) {
  const LatentGaussian g{{0.7, -0.4, 1.1}, {-0.5, 0.6, 0.2}};
  const double closed = kl_standard_normal(g);
  ASSERT_GT(closed, 0.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const std::size_t samples = 1000000;
  double acc = 0.0;
  std::vector<double> eps(3);
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& e : eps) e = normal(rng);
    const auto z = sample_reparameterized(g, eps);
    // log q(z) - log p(z); the 2 pi terms cancel
    double diff = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      diff += -0.5 * g.log_var[i] - 0.5 * eps[i] * eps[i] + 0.5 * z[i] * z[i];
    }
    acc += diff;
  }
  EXPECT_NEAR(acc / samples, closed, 0.01 * closed);
}

TEST(KlDivergence, NeverNegative) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    LatentGaussian g{{u(rng), u(rng)}, {u(rng), u(rng)}};
    EXPECT_GE(kl_standard_normal(g), 0.0);
  }
}

TEST(Softmax, Examples) {
  std::array<double, 3> out{};
  const std::array<double, 3> full{1, 1, 1};
  masked_softmax_row(std::array<double, 3>{0.4, 0.4, 0.4}, full, out);
  for (double v : out) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

  std::array<double, 2> two{};
  masked_softmax_row(std::array<double, 2>{0, 0}, std::array<double, 2>{1, 0}, two);
  EXPECT_EQ(two[0], 1.0);
  EXPECT_EQ(two[1], 0.0);

  masked_softmax_row(std::array<double, 3>{std::log(1.0), std::log(2.0), std::log(3.0)}, full, out);
  EXPECT_NEAR(out[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(out[1], 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(out[2], 3.0 / 6.0, 1e-15);

  EXPECT_THROW(masked_softmax_row(std::array<double, 2>{0, 0}, std::array<double, 2>{0, 0}, two),
               csr::UsageError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore store;
  const ParamId p = store.add("p", Tensor::matrix(1, 2, 1.0));
  store[p].grad = Tensor::from_rows({{0.3, -7.0}});
  AdamConfig cfg;
  cfg.lr = 0.01;
  adam_step(store, cfg);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps)
  EXPECT_NEAR(store[p].value[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(store[p].value[1], 1.0 + 0.01 * 7.0 / (7.0 + 1e-8), 1e-15);
  EXPECT_EQ(store.step(), 1u);
  for (double g : store[p].grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamStore store;
  const ParamId p = store.add("p", Tensor::from_rows({{0.5, -2.0}}));
  for (int i = 0; i < 5; ++i) adam_step(store, AdamConfig{});
  EXPECT_EQ(store[p].value, Tensor::from_rows({{0.5, -2.0}}));
}

TEST(Adam, IdenticalGradientSequencesGiveIdenticalParameters) {
  ParamStore a, b;
  std::mt19937_64 rng(6);
  const Tensor init = random_tensor(rng, 3, 3);
  const ParamId pa = a.add("p", init), pb = b.add("p", init);
  for (int step = 0; step < 100; ++step) {
    const Tensor g = random_tensor(rng, 3, 3);
    a[pa].grad = g;
    b[pb].grad = g;
    adam_step(a, AdamConfig{});
    adam_step(b, AdamConfig{});
  }
  EXPECT_EQ(a[pa].value, b[pb].value);
}

TEST(ParamStore, RejectsDuplicateNames) {
  ParamStore store;
  store.add("x", Tensor::matrix(1, 1));
  EXPECT_THROW(store.add("x", Tensor::matrix(1, 1)), csr::UsageError);
}

TEST(OrderedSum, IndependentOfOrder) {
  std::vector<double> a{1e16, 1.0, -1e16, 3.0, 0.5};
  std::vector<double> b{3.0, -1e16, 0.5, 1.0, 1e16};
  EXPECT_EQ(ordered_sum(a), ordered_sum(b));
}

// A diverged parameter has to reach the loss so training can stop on it.
TEST(NanPropagation, ReluSoftmaxAndSumKeepNan) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Tape tape;
  const Var y = relu(tape.constant(Tensor::from_rows({{nan, -1.0}})));
  EXPECT_TRUE(std::isnan(y.value()[0]));
  EXPECT_EQ(y.value()[1], 0.0);

  std::array<double, 2> out{};
  masked_softmax_row(std::array<double, 2>{0.0, nan}, std::array<double, 2>{1, 1}, out);
  EXPECT_TRUE(std::isnan(out[0]));

  std::vector<double> v{1.0, nan, 2.0};
  EXPECT_TRUE(std::isnan(ordered_sum(v)));
}

}  // namespace
