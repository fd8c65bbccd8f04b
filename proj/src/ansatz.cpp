#include "cqdd/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "cqdd/errors.hpp"

namespace cqdd {

void validate(const AnsatzSpec& spec) {
  if (spec.n < 1) throw InvalidArgument("ansatz needs n >= 1 system qubits");
  if (spec.n_a < 0) throw InvalidArgument("ansatz needs n_a >= 0");
  if (spec.L < 0) throw InvalidArgument("ansatz needs L >= 0");
}

std::vector<PlannedGate> circuit_layout(const AnsatzSpec& spec) {
  validate(spec);
  const int w = spec.width();
  std::vector<PlannedGate> plan;
  int param = 0;
  for (int layer = 1; layer <= spec.L; ++layer) {
    for (int q = 0; q < w; ++q) {
      plan.push_back({PlannedGate::Kind::rx, q, -1, param++});
      plan.push_back({PlannedGate::Kind::ry, q, -1, param++});
    }
    const int first = (layer % 2 == 1) ? 0 : 1;
    for (int q = first; q + 1 < w; q += 2) plan.push_back({PlannedGate::Kind::cz, q, q + 1, -1});
  }
  return plan;
}

void apply_circuit(StateVector& joint, std::span<const PlannedGate> plan,
                   std::span<const double> theta) {
  for (const auto& g : plan) {
    switch (g.kind) {
      case PlannedGate::Kind::rx:
        joint.rotate(Pauli::X, theta[static_cast<std::size_t>(g.param)], g.q0);
        break;
      case PlannedGate::Kind::ry:
        joint.rotate(Pauli::Y, theta[static_cast<std::size_t>(g.param)], g.q0);
        break;
      case PlannedGate::Kind::cz:
        joint.cz(g.q0, g.q1);
        break;
    }
  }
}

std::vector<double> assign_mu(int num_classes) {
  if (num_classes < 1) throw InvalidArgument("assign_mu needs at least one class");
  std::vector<double> mu(static_cast<std::size_t>(num_classes));
  for (int j = 0; j < num_classes; ++j) {
    mu[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / num_classes;
  }
  return mu;
}

std::vector<std::uint64_t> assign_basis_indices(int num_classes, int n_a) {
  if (num_classes < 1) throw InvalidArgument("basis conditioning needs at least one class");
  if (n_a < 1) throw InvalidArgument("basis conditioning needs at least one ancilla qubit");
  const std::uint64_t capacity = std::uint64_t{1} << n_a;
  if (static_cast<std::uint64_t>(num_classes) > capacity) {
    throw InvalidArgument("basis conditioning with n_a=" + std::to_string(n_a) +
                          " cannot uniquely represent more than " + std::to_string(capacity) +
                          " classes");
  }
  if (num_classes == 2) return {0, capacity - 1};
  std::vector<std::uint64_t> out(static_cast<std::size_t>(num_classes));
  for (int j = 0; j < num_classes; ++j) out[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(j);
  return out;
}

std::vector<ClassCondition> make_class_conditions(const std::vector<std::string>& labels,
                                                  const AnsatzSpec& spec) {
  const int c = static_cast<int>(labels.size());
  const auto mu = assign_mu(c);
  std::vector<std::uint64_t> basis(labels.size(), 0);
  if (spec.conditioning == ConditioningMode::basis) basis = assign_basis_indices(c, spec.n_a);
  std::set<std::string> seen;
  std::vector<ClassCondition> out;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (!seen.insert(labels[j]).second) throw InvalidArgument("duplicate class label '" + labels[j] + "'");
    out.push_back({labels[j], mu[j], basis[j]});
  }
  return out;
}

Conditioning conditioning_for(const ClassCondition& cls, const AnsatzSpec& spec) {
  return {spec.conditioning, cls.mu, cls.basis_index};
}

const ClassCondition& DenoiseModel::find_class(const std::string& label) const {
  for (const auto& c : classes) {
    if (c.label == label) return c;
  }
  throw InvalidArgument("model has no class '" + label + "'");
}

void validate(const DenoiseModel& model) {
  validate(model.spec);
  if (model.T < 0) throw InvalidArgument("model T must be >= 0");
  if (model.thetas.size() != static_cast<std::size_t>(model.T)) {
    throw InvalidArgument("model holds " + std::to_string(model.thetas.size()) +
                          " parameter vectors for T=" + std::to_string(model.T));
  }
  for (const auto& th : model.thetas) {
    if (th.size() != model.spec.param_count()) throw InvalidArgument("parameter vector has wrong length");
  }
  std::set<double> mus;
  for (const auto& c : model.classes) {
    if (!mus.insert(c.mu).second) throw InvalidArgument("conditioning angles must be distinct per class");
  }
}

namespace {

void check_step_inputs(const StateVector& state, std::span<const double> theta,
                       const AnsatzSpec& spec) {
  if (theta.size() != spec.param_count()) {
    throw InvalidArgument("theta has " + std::to_string(theta.size()) + " entries, ansatz needs " +
                          std::to_string(spec.param_count()));
  }
  if (state.num_qubits() != spec.n) {
    throw InvalidArgument("state has " + std::to_string(state.num_qubits()) +
                          " qubits, ansatz expects " + std::to_string(spec.n));
  }
}

}  // namespace

StateSet denoise_step(const StateVector& state, std::span<const double> theta,
                      const Conditioning& cond, const AnsatzSpec& spec, MeasureMode mode,
                      Rng& rng) {
  validate(spec);
  check_step_inputs(state, theta, spec);
  StateVector joint = append_conditioned_ancilla(state, spec.n_a, cond);
  const auto plan = circuit_layout(spec);
  apply_circuit(joint, plan, theta);
  StateSet out;
  if (spec.n_a == 0) {
    out.states.push_back(std::move(joint));
    out.weights = {1.0};
    return out;
  }
  for (auto& branch : measure_discard_ancilla(joint, spec.n_a, mode, rng)) {
    out.states.push_back(std::move(branch.system));
    out.weights.push_back(mode == MeasureMode::exact_branches ? branch.record.probability : 1.0);
  }
  return out;
}

StateVector denoise_step_born(const StateVector& state, std::span<const double> theta,
                              const Conditioning& cond, const AnsatzSpec& spec,
                              std::span<const PlannedGate> plan, double u) {
  check_step_inputs(state, theta, spec);
  StateVector joint = append_conditioned_ancilla(state, spec.n_a, cond);
  apply_circuit(joint, plan, theta);
  if (spec.n_a == 0) return joint;
  return measure_born(joint, spec.n_a, u).system;
}

StateSet denoise_set(const StateSet& inputs, std::span<const double> theta,
                     const Conditioning& cond, const AnsatzSpec& spec, const MeasureKey& key) {
  validate(inputs);
  check_step_inputs(inputs.states.front(), theta, spec);
  const auto plan = circuit_layout(spec);
  StateSet out;
  out.label = inputs.label;
  out.states.resize(inputs.size());
  const std::size_t N = inputs.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) {
    const double u = keyed_uniform(key.seed, key.tag, {key.class_index, key.step, key.iteration, i});
    out.states[i] = denoise_step_born(inputs.states[i], theta, cond, spec, plan, u);
  }
  return out;
}

StateSet denoise_set_branches(const StateSet& inputs, std::span<const double> theta,
                              const Conditioning& cond, const AnsatzSpec& spec) {
  validate(inputs);
  check_step_inputs(inputs.states.front(), theta, spec);
  const auto plan = circuit_layout(spec);
  const std::size_t N = inputs.size();
  std::vector<std::vector<MeasuredState>> per_input(N);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) {
    StateVector joint = append_conditioned_ancilla(inputs.states[i], spec.n_a, cond);
    apply_circuit(joint, plan, theta);
    if (spec.n_a == 0) {
      per_input[i].push_back({std::move(joint), {"", 1.0}});
    } else {
      per_input[i] = exact_branches(joint, spec.n_a);
    }
  }
  StateSet out;
  out.label = inputs.label;
  for (std::size_t i = 0; i < N; ++i) {
    for (auto& b : per_input[i]) {
      out.states.push_back(std::move(b.system));
      out.weights.push_back(inputs.weight(i) * b.record.probability);
    }
  }
  return out;
}

StateSet run_chain(const DenoiseModel& model, const StateSet& start, const Conditioning& cond,
                   int from_step, int to_step, std::uint64_t seed, StreamTag measure_tag,
                   std::uint64_t class_index) {
  StateSet cur = start;
  for (int k = from_step; k > to_step; --k) {
    cur = denoise_set(cur, model.theta(k), cond, model.spec,
                      {seed, measure_tag, class_index, static_cast<std::uint64_t>(k), 0});
  }
  return cur;
}

std::vector<StateSet> generate(const DenoiseModel& model, const Conditioning& cond,
                               std::uint64_t class_index, std::size_t N, std::uint64_t seed,
                               StreamTag haar_tag, StreamTag measure_tag) {
  validate(model);
  if (N < 1) throw InvalidArgument("generate needs N >= 1");
  std::vector<StateSet> sets(static_cast<std::size_t>(model.T) + 1);
  sets[static_cast<std::size_t>(model.T)] = haar_set_keyed(model.spec.n, N, seed, haar_tag, class_index);
  for (int k = model.T; k >= 1; --k) {
    sets[static_cast<std::size_t>(k - 1)] =
        denoise_set(sets[static_cast<std::size_t>(k)], model.theta(k), cond, model.spec,
                    {seed, measure_tag, class_index, static_cast<std::uint64_t>(k), 0});
  }
  return sets;
}

std::vector<StateSet> generate(const DenoiseModel& model, const std::string& class_label,
                               std::size_t N, std::uint64_t seed) {
  std::uint64_t index = 0;
  for (; index < model.classes.size(); ++index) {
    if (model.classes[index].label == class_label) break;
  }
  const ClassCondition& cls = model.find_class(class_label);
  auto sets = generate(model, conditioning_for(cls, model.spec), index, N, seed,
                       StreamTag::generate, StreamTag::generate);
  for (auto& s : sets) s.label = class_label;
  return sets;
}

}  // namespace cqdd
