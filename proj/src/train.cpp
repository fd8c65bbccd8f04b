#include "cqdd/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "cqdd/errors.hpp"

namespace cqdd {

std::string to_string(GradEstimator g) { return g == GradEstimator::spsa ? "spsa" : "central_fd"; }

GradEstimator parse_grad_estimator(const std::string& s) {
  if (s == "spsa") return GradEstimator::spsa;
  if (s == "central_fd" || s == "fd") return GradEstimator::central_fd;
  throw InvalidArgument("unknown gradient estimator '" + s + "' (expected spsa or central_fd)");
}

void adam_update(std::vector<double>& params, std::span<const double> grads, AdamState& state,
                 double learning_rate, int iteration, const AdamOptions& options) {
  const std::size_t d = params.size();
  if (grads.size() != d) throw InvalidArgument("gradient length does not match parameters");
  if (iteration < 1) throw InvalidArgument("Adam iteration counts from 1");
  if (state.m.empty()) state.m.assign(d, 0.0);
  if (state.v.empty()) state.v.assign(d, 0.0);
  if (state.m.size() != d || state.v.size() != d) throw InvalidArgument("Adam moment size mismatch");
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const double c1 = 1.0 - std::pow(b1, iteration);
  const double c2 = 1.0 - std::pow(b2, iteration);
  for (std::size_t i = 0; i < d; ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= learning_rate * mhat / (std::sqrt(vhat) + options.epsilon);
  }
}

void validate(const TrainerConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw InvalidArgument("learning rate must be positive");
  }
  if (c.iterations_per_step < 1) throw InvalidArgument("iterations per step must be >= 1");
  if (!(c.spsa_c > 0.0)) throw InvalidArgument("SPSA perturbation must be positive");
  if (c.spsa_gamma < 0.0) throw InvalidArgument("SPSA decay exponent must be nonnegative");
  if (!(c.fd_step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (c.loss_measure == MeasureMode::postselect_zero) {
    throw InvalidArgument("training loss supports born or exact_branches measurement");
  }
  if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0 && c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0)) {
    throw InvalidArgument("Adam betas must lie in [0, 1)");
  }
}

std::vector<double> estimate_gradient(const LossFn& loss_fn, std::span<const double> params,
                                      const GradientSettings& settings, Rng& rng) {
  const std::size_t d = params.size();
  const double c = settings.perturbation;
  if (!(c > 0.0)) throw InvalidArgument("gradient perturbation must be positive");
  std::vector<double> g(d, 0.0);
  std::vector<double> probe(params.begin(), params.end());
  if (settings.estimator == GradEstimator::spsa) {
    std::vector<double> delta(d);
    for (auto& x : delta) x = rng.rademacher();
    for (std::size_t i = 0; i < d; ++i) probe[i] = params[i] + c * delta[i];
    const double up = loss_fn(probe);
    for (std::size_t i = 0; i < d; ++i) probe[i] = params[i] - c * delta[i];
    const double down = loss_fn(probe);
    const double scale = (up - down) / (2.0 * c);
    for (std::size_t i = 0; i < d; ++i) g[i] = scale / delta[i];
    return g;
  }
  for (std::size_t i = 0; i < d; ++i) {
    probe[i] = params[i] + c;
    const double up = loss_fn(probe);
    probe[i] = params[i] - c;
    const double down = loss_fn(probe);
    probe[i] = params[i];
    g[i] = (up - down) / (2.0 * c);
  }
  return g;
}

namespace {

void check_problem(const StepProblem& p) {
  validate(p.spec);
  const std::size_t C = p.inputs.size();
  if (C == 0) throw InvalidArgument("step problem needs at least one class");
  if (p.references.size() != C || p.conditions.size() != C) {
    throw InvalidArgument("step problem needs one reference set and condition per class");
  }
  if (!(p.norm_constant > 0.0)) throw InvalidArgument("normalization constant must be positive");
  for (std::size_t j = 0; j < C; ++j) {
    validate(p.inputs[j]);
    validate(p.references[j]);
    if (p.inputs[j].num_qubits() != p.spec.n || p.references[j].num_qubits() != p.spec.n) {
      throw InvalidArgument("class '" + p.references[j].label + "' has the wrong qubit count");
    }
  }
}

// Caches what does not depend on theta: the reference self-similarity
// term of MMD.
class Objective {
 public:
  explicit Objective(const StepProblem& p) : p_(p) {
    check_problem(p);
    if (p.metric == Metric::mmd) {
      for (const auto& r : p.references) ref_self_.push_back(pairwise_fidelity(r, r));
    }
  }

  double operator()(std::span<const double> theta, MeasureMode mode, std::uint64_t seed,
                    std::uint64_t iteration) const {
    if (theta.size() != p_.spec.param_count()) {
      throw InvalidArgument("theta has " + std::to_string(theta.size()) + " entries, expected " +
                            std::to_string(p_.spec.param_count()));
    }
    double acc = 0.0;
    const std::size_t C = p_.inputs.size();
    for (std::size_t j = 0; j < C; ++j) {
      StateSet out =
          mode == MeasureMode::exact_branches
              ? denoise_set_branches(p_.inputs[j], theta, p_.conditions[j], p_.spec)
              : denoise_set(p_.inputs[j], theta, p_.conditions[j], p_.spec,
                            {seed, StreamTag::measure_train, j, static_cast<std::uint64_t>(p_.k),
                             iteration});
      double d = 0.0;
      if (p_.metric == Metric::mmd) {
        d = pairwise_fidelity(out, out) + ref_self_[j] - 2.0 * pairwise_fidelity(out, p_.references[j]);
      } else {
        d = wasserstein(out, p_.references[j]);
      }
      acc += d / p_.norm_constant;
    }
    return acc / static_cast<double>(C);
  }

 private:
  const StepProblem& p_;
  std::vector<double> ref_self_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double step_loss(const StepProblem& problem, std::span<const double> theta, MeasureMode mode,
                 std::uint64_t seed, std::uint64_t iteration) {
  return Objective(problem)(theta, mode, seed, iteration);
}

StepResult train_step(const StepProblem& problem, const TrainerConfig& config, const LossSink& sink) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const Objective objective(problem);
  const std::size_t d = problem.spec.param_count();
  const auto k = static_cast<std::uint64_t>(problem.k);

  std::vector<double> theta(d);
  Rng init(config.seed, StreamTag::theta_init, {k});
  for (auto& x : theta) x = init.normal();

  StepResult res;
  res.k = problem.k;
  res.best_loss = std::numeric_limits<double>::infinity();
  res.losses.reserve(static_cast<std::size_t>(config.iterations_per_step));
  AdamState adam;
  for (int it = 0; it < config.iterations_per_step; ++it) {
    const auto key = static_cast<std::uint64_t>(it);
    const double loss = objective(theta, config.loss_measure, config.seed, key);
    if (!std::isfinite(loss)) throw DegenerateError("non-finite loss at step " + std::to_string(problem.k));
    res.losses.push_back(loss);
    if (loss < res.best_loss) {
      res.best_loss = loss;
      res.best_theta = theta;
      res.best_iteration = it;
    }
    if (sink) sink({problem.k, it, loss, res.best_loss});
    if (it + 1 == config.iterations_per_step) break;

    // Every evaluation inside one estimate reuses this iteration's
    // measurement uniforms.
    const LossFn f = [&](std::span<const double> th) {
      return objective(th, config.loss_measure, config.seed, key);
    };
    GradientSettings gs;
    gs.estimator = config.estimator;
    gs.perturbation = config.estimator == GradEstimator::spsa
                          ? config.spsa_c / std::pow(static_cast<double>(it + 1), config.spsa_gamma)
                          : config.fd_step;
    Rng dir(config.seed, StreamTag::spsa, {k, key});
    const auto g = estimate_gradient(f, theta, gs, dir);
    adam_update(theta, g, adam, config.learning_rate, it + 1, config.adam);
  }
  res.seconds = seconds_since(t0);
  return res;
}

std::vector<StateSet> haar_reference_sets(const std::vector<StateSet>& targets, std::uint64_t seed) {
  std::vector<StateSet> out;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    validate(targets[j]);
    out.push_back(haar_set_keyed(targets[j].num_qubits(), targets[j].size(), seed, StreamTag::haar_norm,
                                 j, targets[j].label));
  }
  return out;
}

std::vector<std::vector<StateSet>> generate_all(const DenoiseModel& model, std::size_t N,
                                                bool held_out, std::uint64_t seed) {
  validate(model);
  const StreamTag haar_tag = held_out ? StreamTag::haar_test : StreamTag::haar_train;
  const StreamTag measure_tag = held_out ? StreamTag::measure_test : StreamTag::measure_chain;
  std::vector<std::vector<StateSet>> out;
  for (std::size_t j = 0; j < model.classes.size(); ++j) {
    auto sets = generate(model, conditioning_for(model.classes[j], model.spec), j, N, seed, haar_tag,
                         measure_tag);
    for (auto& s : sets) s.label = model.classes[j].label;
    out.push_back(std::move(sets));
  }
  return out;
}

TrainingResult train_all(const std::vector<StateSet>& targets, const NoiseSchedule& schedule,
                         const AnsatzSpec& spec, const std::vector<ClassCondition>& classes,
                         Metric metric, const TrainerConfig& config, const LossSink& sink) {
  validate(spec);
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t C = targets.size();
  if (C == 0) throw InvalidArgument("training needs at least one class");
  if (classes.size() != C) throw InvalidArgument("one class condition per target class is required");
  const int T = schedule.steps();
  if (T < 1) throw InvalidArgument("training needs T >= 1");
  for (std::size_t j = 0; j < C; ++j) {
    validate(targets[j]);
    if (targets[j].weighted()) throw InvalidArgument("training targets must be unweighted samples");
    if (targets[j].num_qubits() != spec.n) {
      throw InvalidArgument("class '" + targets[j].label + "' has " +
                            std::to_string(targets[j].num_qubits()) + " qubits, ansatz expects " +
                            std::to_string(spec.n));
    }
    if (targets[j].label != classes[j].label) {
      throw InvalidArgument("class order mismatch at '" + targets[j].label + "'");
    }
  }

  TrainingResult out;
  out.model.spec = spec;
  out.model.T = T;
  out.model.classes = classes;
  out.model.seed = config.seed;
  out.model.thetas.assign(static_cast<std::size_t>(T), {});

  std::vector<Conditioning> conds;
  for (const auto& c : classes) conds.push_back(conditioning_for(c, spec));
  for (std::size_t j = 0; j < C; ++j) {
    out.trajectories.push_back(forward_diffuse(targets[j], schedule, config.seed, j));
  }
  out.haar_reference = haar_reference_sets(targets, config.seed);
  out.record.norm_constant = normalization_constant(targets, out.haar_reference, metric);

  StepProblem problem;
  problem.spec = spec;
  problem.metric = metric;
  problem.norm_constant = out.record.norm_constant;
  problem.conditions = conds;
  for (std::size_t j = 0; j < C; ++j) {
    StateSet start = haar_set_keyed(spec.n, targets[j].size(), config.seed, StreamTag::haar_train, j);
    start.label = targets[j].label;
    problem.inputs.push_back(std::move(start));
  }

  for (int k = T; k >= 1; --k) {
    problem.k = k;
    problem.references.clear();
    for (std::size_t j = 0; j < C; ++j) {
      problem.references.push_back(out.trajectories[j].sets[static_cast<std::size_t>(k - 1)]);
    }
    StepResult step = train_step(problem, config, sink);
    out.model.thetas[static_cast<std::size_t>(k - 1)] = step.best_theta;
    for (std::size_t j = 0; j < C; ++j) {
      StateSet next = denoise_set(problem.inputs[j], step.best_theta, conds[j], spec,
                                  {config.seed, StreamTag::measure_chain, j,
                                   static_cast<std::uint64_t>(k), 0});
      next.label = targets[j].label;
      problem.inputs[j] = std::move(next);
    }
    out.record.steps.push_back(std::move(step));
  }

  out.record.train_class_losses =
      per_class_distances(problem.inputs, targets, metric, out.record.norm_constant);
  std::vector<StateSet> held_out;
  for (auto& sets : generate_all(out.model, targets.front().size(), true, config.seed)) {
    held_out.push_back(std::move(sets.front()));
  }
  if (C > 1) {
    // generate_all draws N from the first class; redo classes with other sizes.
    for (std::size_t j = 1; j < C; ++j) {
      if (targets[j].size() == held_out[j].size()) continue;
      auto sets = generate(out.model, conds[j], j, targets[j].size(), config.seed, StreamTag::haar_test,
                           StreamTag::measure_test);
      held_out[j] = std::move(sets.front());
      held_out[j].label = targets[j].label;
    }
  }
  out.record.test_class_losses = per_class_distances(held_out, targets, metric, out.record.norm_constant);
  const auto mean = [](const std::vector<double>& v) {
    double a = 0.0;
    for (double x : v) a += x;
    return a / static_cast<double>(v.size());
  };
  out.record.train_loss = mean(out.record.train_class_losses);
  out.record.test_loss = mean(out.record.test_class_losses);
  out.record.seconds = seconds_since(t0);
  return out;
}

}  // namespace cqdd
