#include <gtest/gtest.h>

#include <numeric>

#include "cqdd/datasets.hpp"
#include "cqdd/errors.hpp"
#include "cqdd/train.hpp"
#include "support.hpp"

using namespace cqdd;
using namespace cqdd::testing;

namespace {

double sum_sq(std::span<const double> th) {
  double s = 0.0;
  for (double x : th) s += x * x;
  return s;
}

std::vector<StateSet> two_rings(std::size_t N, std::uint64_t seed) {
  std::vector<StateSet> out;
  const char* planes[] = {"X", "Z"};
  for (std::uint64_t j = 0; j < 2; ++j) {
    ClassSpec cs;
    cs.family = Family::planar_ring;
    cs.plane = planes[j];
    cs.label = planes[j];
    cs.N = N;
    out.push_back(generate_class(cs, seed, j));
  }
  return out;
}

TrainerConfig small_config(int iterations) {
  TrainerConfig cfg;
  cfg.iterations_per_step = iterations;
  cfg.learning_rate = 0.05;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST(Adam, ZeroGradientLeavesParams) {
  std::vector<double> p{0.3, -1.2, 4.0};
  const auto before = p;
  AdamState st;
  std::vector<double> g(3, 0.0);
  adam_update(p, g, st, 0.1, 1);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], before[i], 1e-15);
}

TEST(Adam, FirstStepIsSignStepOfSizeLr) {
  // m_hat = g and v_hat = g^2 after bias correction, so the step is lr * g / (|g| + eps).
  std::vector<double> p{1.0, 1.0, 1.0};
  const std::vector<double> g{2.5, -0.01, 1e3};
  AdamState st;
  adam_update(p, g, st, 0.05, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    const double expect = 1.0 - 0.05 * g[i] / (std::abs(g[i]) + 1e-8);
    EXPECT_NEAR(p[i], expect, 1e-12);
  }
}

TEST(Adam, MatchesHandRolledRecurrence) {
  std::vector<double> p{0.5, -0.5};
  AdamState st;
  double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {0.5, -0.5};
  for (int t = 1; t <= 25; ++t) {
    const std::vector<double> g{std::sin(t * 0.7), std::cos(t * 0.3)};
    adam_update(p, g, st, 0.01, t);
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  EXPECT_NEAR(p[0], ref[0], 1e-12);
  EXPECT_NEAR(p[1], ref[1], 1e-12);
}

TEST(Adam, Errors) {
  std::vector<double> p{1.0, 2.0};
  AdamState st;
  std::vector<double> g{1.0};
  EXPECT_THROW(adam_update(p, g, st, 0.1, 1), InvalidArgument);
  std::vector<double> g2{1.0, 1.0};
  EXPECT_THROW(adam_update(p, g2, st, 0.1, 0), InvalidArgument);
}

TEST(Gradient, CentralDifferenceIsExactOnQuadratic) {
  const std::vector<double> th{0.4, -1.3, 2.2, 0.0};
  Rng rng(1);
  auto g = estimate_gradient(sum_sq, th, {GradEstimator::central_fd, 1e-4}, rng);
  for (std::size_t i = 0; i < th.size(); ++i) EXPECT_NEAR(g[i], 2 * th[i], 1e-6);
}

TEST(Gradient, ConstantLossGivesZero) {
  const std::vector<double> th{0.4, -1.3, 2.2};
  const LossFn flat = [](std::span<const double>) { return 0.731; };
  Rng rng(2);
  for (auto est : {GradEstimator::spsa, GradEstimator::central_fd}) {
    auto g = estimate_gradient(flat, th, {est, 0.1}, rng);
    for (double x : g) EXPECT_EQ(x, 0.0);
  }
}

TEST(Gradient, SpsaIsExactInOneDimension) {
  // With one coordinate the direction squares away: (f(t+c) - f(t-c)) / 2c = 2t.
  Rng rng(3);
  for (double t : {-2.0, 0.3, 1.7}) {
    const std::vector<double> th{t};
    auto g = estimate_gradient(sum_sq, th, {GradEstimator::spsa, 0.1}, rng);
    EXPECT_NEAR(g[0], 2 * t, 1e-12);
  }
}

TEST(Gradient, SpsaIsUnbiasedOnQuadratic) {
  // On sum theta^2 each SPSA component is 2 theta_i + 2 sum_{j != i} theta_j D_j D_i,
  // so the mean is exact and the variance is 4 sum_{j != i} theta_j^2.
  const std::vector<double> th{0.8, -0.5, 1.1};
  const double total = sum_sq(th);
  Rng rng(4);
  for (int estimates : {200, 20000}) {
    std::vector<double> mean(th.size(), 0.0);
    for (int r = 0; r < estimates; ++r) {
      auto g = estimate_gradient(sum_sq, th, {GradEstimator::spsa, 0.05}, rng);
      for (std::size_t i = 0; i < th.size(); ++i) mean[i] += g[i] / estimates;
    }
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double se = 2 * std::sqrt((total - th[i] * th[i]) / estimates);
      EXPECT_NEAR(mean[i], 2 * th[i], 4 * se) << "estimates " << estimates << " i " << i;
      if (estimates == 20000) EXPECT_NEAR(mean[i], 2 * th[i], 0.05 * std::abs(2 * th[i]));
    }
  }
}

TEST(Gradient, ParseEstimator) {
  EXPECT_EQ(parse_grad_estimator("spsa"), GradEstimator::spsa);
  EXPECT_EQ(parse_grad_estimator("fd"), GradEstimator::central_fd);
  EXPECT_EQ(parse_grad_estimator(to_string(GradEstimator::central_fd)), GradEstimator::central_fd);
  EXPECT_THROW(parse_grad_estimator("adjoint"), InvalidArgument);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(validate(TrainerConfig{}));
  TrainerConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.iterations_per_step = 0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.adam.beta1 = 1.0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.loss_measure = MeasureMode::postselect_zero;
  EXPECT_THROW(validate(c), InvalidArgument);
}

class StepFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(5);
    problem.k = 2;
    problem.spec = AnsatzSpec{1, 1, 2};
    auto in = random_set(1, 16, rng, "a");
    problem.inputs = {in};
    problem.references = {planar_ring("X", 16, rng)};
    problem.references[0].label = "a";
    problem.conditions = {Conditioning{}};
  }
  StepProblem problem;
};

TEST_F(StepFixture, SingleIterationReturnsInitialization) {
  auto res = train_step(problem, small_config(1));
  Rng init(17, StreamTag::theta_init, {2});
  ASSERT_EQ(res.best_theta.size(), problem.spec.param_count());
  for (double x : res.best_theta) EXPECT_EQ(x, init.normal());
  ASSERT_EQ(res.losses.size(), 1u);
  EXPECT_EQ(res.best_iteration, 0);
  EXPECT_EQ(res.best_loss, step_loss(problem, res.best_theta, MeasureMode::born, 17, 0));
}

TEST_F(StepFixture, CheckpointIsTheMinimumOfTheCurve) {
  std::vector<LossRecord> seen;
  auto res = train_step(problem, small_config(120), [&](const LossRecord& r) { seen.push_back(r); });
  ASSERT_EQ(res.losses.size(), 120u);
  ASSERT_EQ(seen.size(), 120u);
  const double lo = *std::min_element(res.losses.begin(), res.losses.end());
  EXPECT_EQ(res.best_loss, lo);
  EXPECT_EQ(res.losses[static_cast<std::size_t>(res.best_iteration)], lo);
  EXPECT_LE(res.best_loss, res.losses.front());
  // The recorded loss is reproducible from the checkpoint and its iteration key.
  EXPECT_EQ(step_loss(problem, res.best_theta, MeasureMode::born, 17,
                      static_cast<std::uint64_t>(res.best_iteration)),
            res.best_loss);
  double running = 1e300;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    running = std::min(running, seen[i].loss);
    EXPECT_EQ(seen[i].iteration, static_cast<int>(i));
    EXPECT_EQ(seen[i].step, 2);
    EXPECT_EQ(seen[i].best, running);
  }
}

TEST_F(StepFixture, RerunIsBitIdentical) {
  auto a = train_step(problem, small_config(40));
  auto b = train_step(problem, small_config(40));
  EXPECT_EQ(a.best_theta, b.best_theta);
  EXPECT_EQ(a.losses, b.losses);
  auto fd = small_config(5);
  fd.estimator = GradEstimator::central_fd;
  EXPECT_EQ(train_step(problem, fd).losses, train_step(problem, fd).losses);
}

TEST_F(StepFixture, IdenticalInputsAndReferencesCanOnlyImprove) {
  problem.references = problem.inputs;
  auto res = train_step(problem, small_config(60));
  EXPECT_LE(res.best_loss, res.losses.front());
}

TEST_F(StepFixture, ExactBranchLossIsDeterministicInIteration) {
  Rng rng(6);
  std::vector<double> th(problem.spec.param_count());
  for (auto& x : th) x = rng.normal();
  const double a = step_loss(problem, th, MeasureMode::exact_branches, 1, 0);
  EXPECT_EQ(a, step_loss(problem, th, MeasureMode::exact_branches, 99, 7));
  EXPECT_GE(a, 0.0);
}

TEST(TrainAll, SingleStepTargetsTheData) {
  auto targets = two_rings(12, 3);
  AnsatzSpec spec{1, 1, 2};
  auto classes = make_class_conditions({"X", "Z"}, spec);
  auto sched = make_schedule(ScheduleKind::constant, {0.5}, 1);
  auto res = train_all(targets, sched, spec, classes, Metric::wass, small_config(30));
  ASSERT_EQ(res.record.steps.size(), 1u);
  EXPECT_EQ(res.record.steps[0].k, 1);
  ASSERT_EQ(res.model.thetas.size(), 1u);
  EXPECT_EQ(res.trajectories[0].sets[0], targets[0]);
  EXPECT_EQ(res.record.train_class_losses.size(), 2u);
  EXPECT_NEAR(res.record.train_loss,
              (res.record.train_class_losses[0] + res.record.train_class_losses[1]) / 2, 1e-15);
  EXPECT_GT(res.record.norm_constant, 0.0);
}

TEST(TrainAll, FrozenPrefixReproducesEachStep) {
  auto targets = two_rings(10, 4);
  AnsatzSpec spec{1, 2, 2};
  auto classes = make_class_conditions({"X", "Z"}, spec);
  auto sched = make_schedule(ScheduleKind::linear, {0.4}, 3);
  const auto cfg = small_config(15);
  auto res = train_all(targets, sched, spec, classes, Metric::wass, cfg);
  ASSERT_EQ(res.record.steps.size(), 3u);
  EXPECT_EQ(res.record.steps[0].k, 3);
  EXPECT_EQ(res.record.steps[2].k, 1);

  // The training chain regenerated from the model feeds each step exactly.
  auto chain = generate_all(res.model, 10, false, cfg.seed);
  for (int k = 1; k <= 3; ++k) {
    StepProblem p;
    p.k = k;
    p.spec = spec;
    p.metric = Metric::wass;
    p.norm_constant = res.record.norm_constant;
    for (std::size_t j = 0; j < 2; ++j) {
      p.inputs.push_back(chain[j][static_cast<std::size_t>(k)]);
      p.references.push_back(res.trajectories[j].sets[static_cast<std::size_t>(k - 1)]);
      p.conditions.push_back(conditioning_for(classes[j], spec));
    }
    auto again = train_step(p, cfg);
    EXPECT_EQ(again.best_theta, res.model.thetas[static_cast<std::size_t>(k - 1)]) << "k " << k;
  }
  std::vector<StateSet> finals{chain[0][0], chain[1][0]};
  EXPECT_EQ(per_class_distances(finals, targets, Metric::wass, res.record.norm_constant),
            res.record.train_class_losses);

  auto held = generate_all(res.model, 10, true, cfg.seed);
  std::vector<StateSet> test_finals{held[0][0], held[1][0]};
  EXPECT_EQ(per_class_distances(test_finals, targets, Metric::wass, res.record.norm_constant),
            res.record.test_class_losses);

  auto twice = train_all(targets, sched, spec, classes, Metric::wass, cfg);
  EXPECT_EQ(twice.model.thetas, res.model.thetas);
}

TEST(TrainAll, InputValidation) {
  auto targets = two_rings(8, 5);
  AnsatzSpec spec{1, 1, 1};
  auto classes = make_class_conditions({"X", "Z"}, spec);
  auto sched = make_schedule(ScheduleKind::constant, {0.5}, 1);
  auto swapped = make_class_conditions({"Z", "X"}, spec);
  EXPECT_THROW(train_all(targets, sched, spec, swapped, Metric::wass, small_config(2)), InvalidArgument);
  EXPECT_THROW(train_all(targets, sched, AnsatzSpec{2, 1, 1}, classes, Metric::wass, small_config(2)),
               InvalidArgument);
  auto weighted = targets;
  weighted[0].weights.assign(8, 1.0 / 8);
  EXPECT_THROW(train_all(weighted, sched, spec, classes, Metric::wass, small_config(2)), InvalidArgument);
  // Haar-distributed targets leave no scale to normalize by.
  std::vector<StateSet> haar_targets{haar_set_keyed(1, 8, 17, StreamTag::haar_norm, 0, "X")};
  EXPECT_THROW(train_all(haar_targets, sched, spec, make_class_conditions({"X"}, spec), Metric::wass,
                         small_config(2)),
               DegenerateError);
}
