#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cqdd/ansatz.hpp"
#include "cqdd/diffusion.hpp"
#include "cqdd/distances.hpp"

namespace cqdd {

enum class GradEstimator { spsa, central_fd };

std::string to_string(GradEstimator g);
GradEstimator parse_grad_estimator(const std::string& s);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamOptions&) const = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

// One bias-corrected Adam step, in place. `iteration` counts from 1.
void adam_update(std::vector<double>& params, std::span<const double> grads, AdamState& state,
                 double learning_rate, int iteration, const AdamOptions& options = {});

struct TrainerConfig {
  double learning_rate = 0.01;
  int iterations_per_step = 5000;
  GradEstimator estimator = GradEstimator::spsa;
  // SPSA perturbation at iteration i (from 1): spsa_c / i^spsa_gamma.
  double spsa_c = 0.1;
  double spsa_gamma = 0.101;
  double fd_step = 1e-4;
  // born: one sampled outcome per state; exact_branches: weighted branches.
  MeasureMode loss_measure = MeasureMode::born;
  AdamOptions adam;
  std::uint64_t seed = 0;

  bool operator==(const TrainerConfig&) const = default;
};

void validate(const TrainerConfig& config);

using LossFn = std::function<double(std::span<const double>)>;

struct GradientSettings {
  GradEstimator estimator = GradEstimator::spsa;
  double perturbation = 0.1;  // SPSA c_i or FD step
};

// spsa: 2 evaluations along a Rademacher direction drawn from rng.
// central_fd: 2d evaluations. The caller binds measurement randomness into
// loss_fn, so every evaluation of one estimate shares it.
std::vector<double> estimate_gradient(const LossFn& loss_fn, std::span<const double> params,
                                      const GradientSettings& settings, Rng& rng);

// One raw loss value per iteration of one backward step.
struct LossRecord {
  int step = 0;
  int iteration = 0;
  double loss = 0.0;
  double best = 0.0;
};

using LossSink = std::function<void(const LossRecord&)>;

// The per-step objective: inputs_j pushed through theta with class j's
// conditioning, compared to references_j.
struct StepProblem {
  int k = 1;
  AnsatzSpec spec;
  std::vector<StateSet> inputs;
  std::vector<StateSet> references;
  std::vector<Conditioning> conditions;
  Metric metric = Metric::wass;
  double norm_constant = 1.0;
};

// Normalized class loss of `theta` on the problem. Born measurements use
// uniforms keyed by (seed, measure_train, class, k, iteration).
double step_loss(const StepProblem& problem, std::span<const double> theta, MeasureMode mode,
                 std::uint64_t seed, std::uint64_t iteration);

struct StepResult {
  int k = 0;
  std::vector<double> best_theta;
  double best_loss = 0.0;
  int best_iteration = 0;
  std::vector<double> losses;
  double seconds = 0.0;
};

// theta_k ~ N(0,1), then Adam for iterations_per_step iterations; returns
// the parameters with the lowest recorded loss.
StepResult train_step(const StepProblem& problem, const TrainerConfig& config,
                      const LossSink& sink = {});

struct TrainingRecord {
  std::vector<StepResult> steps;  // in training order, k = T..1
  double norm_constant = 0.0;
  std::vector<double> train_class_losses;
  std::vector<double> test_class_losses;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double seconds = 0.0;
};

struct TrainingResult {
  DenoiseModel model;
  TrainingRecord record;
  std::vector<DiffusionTrajectory> trajectories;
  std::vector<StateSet> haar_reference;  // per-class normalization samples
};

// Divide-and-conquer training, k = T..1. Each step's inputs are the frozen
// outputs of steps T..k+1 applied to a fixed Haar draw; its references
// are the forward sets S_j(k-1). After training, reports normalized t = 0
// losses on the training chain and on a fresh held-out Haar draw.
TrainingResult train_all(const std::vector<StateSet>& targets, const NoiseSchedule& schedule,
                         const AnsatzSpec& spec, const std::vector<ClassCondition>& classes,
                         Metric metric, const TrainerConfig& config, const LossSink& sink = {});

// Seeded sample sets the trainer and evaluator agree on.
std::vector<StateSet> haar_reference_sets(const std::vector<StateSet>& targets, std::uint64_t seed);

// S~_j(t) for every class along the training chain (haar_train start) or
// the held-out chain (haar_test start).
std::vector<std::vector<StateSet>> generate_all(const DenoiseModel& model, std::size_t N,
                                                bool held_out, std::uint64_t seed);

}  // namespace cqdd
