#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cqdd/state_set.hpp"

namespace cqdd {

// Shape of one denoising circuit over n system + n_a ancilla qubits.
struct AnsatzSpec {
  int n = 1;
  int n_a = 2;
  int L = 1;
  ConditioningMode conditioning = ConditioningMode::rx;

  int width() const { return n + n_a; }
  // d = 2 L (n + n_a)
  std::size_t param_count() const { return 2 * static_cast<std::size_t>(L) * width(); }

  bool operator==(const AnsatzSpec&) const = default;
};

void validate(const AnsatzSpec& spec);

struct PlannedGate {
  enum class Kind { rx, ry, cz };
  Kind kind;
  int q0;
  int q1;     // cz only
  int param;  // rx/ry only, index into theta
};

// Layer l = 1..L: RX then RY on every chain qubit (system first, ancillas
// trailing), then CZ on pairs (0,1),(2,3),... for odd l and (1,2),(3,4),...
// for even l.
std::vector<PlannedGate> circuit_layout(const AnsatzSpec& spec);

void apply_circuit(StateVector& joint, std::span<const PlannedGate> plan,
                   std::span<const double> theta);

// Linearly spaced conditioning angles 2 pi j / C, j = 0..C-1.
std::vector<double> assign_mu(int num_classes);

// Computational-basis labels for basis conditioning. Two classes take the
// all-zeros and all-ones registers; otherwise class j takes index j.
std::vector<std::uint64_t> assign_basis_indices(int num_classes, int n_a);

struct ClassCondition {
  std::string label;
  double mu = 0.0;
  std::uint64_t basis_index = 0;

  bool operator==(const ClassCondition&) const = default;
};

// Builds the per-class conditioning table; rejects basis mode when the
// register cannot hold a distinct state per class.
std::vector<ClassCondition> make_class_conditions(const std::vector<std::string>& labels,
                                                  const AnsatzSpec& spec);

Conditioning conditioning_for(const ClassCondition& cls, const AnsatzSpec& spec);

struct DenoiseModel {
  AnsatzSpec spec;
  int T = 0;
  // thetas[k-1] holds theta_k, each of length spec.param_count().
  std::vector<std::vector<double>> thetas;
  std::vector<ClassCondition> classes;
  std::uint64_t seed = 0;

  const std::vector<double>& theta(int k) const { return thetas.at(static_cast<std::size_t>(k - 1)); }
  const ClassCondition& find_class(const std::string& label) const;

  bool operator==(const DenoiseModel&) const = default;
};

void validate(const DenoiseModel& model);

// Denoising circuit applied to one system state, ancillas measured and
// discarded per `mode`. Born and postselect produce a single branch of
// weight 1; exact_branches yields every nonzero outcome weighted by its
// probability.
StateSet denoise_step(const StateVector& state, std::span<const double> theta,
                      const Conditioning& cond, const AnsatzSpec& spec, MeasureMode mode,
                      Rng& rng);

// Born-mode step with a pre-drawn uniform; the hot path of training.
StateVector denoise_step_born(const StateVector& state, std::span<const double> theta,
                              const Conditioning& cond, const AnsatzSpec& spec,
                              std::span<const PlannedGate> plan, double u);

// Key of the measurement uniform for sample i of a set.
struct MeasureKey {
  std::uint64_t seed;
  StreamTag tag;
  std::uint64_t class_index;
  std::uint64_t step;
  std::uint64_t iteration = 0;
};

// Applies one Born-mode denoising step to every state of `inputs`.
// Sample i measures with keyed_uniform(seed, tag, {class, step, iteration, i}).
StateSet denoise_set(const StateSet& inputs, std::span<const double> theta,
                     const Conditioning& cond, const AnsatzSpec& spec, const MeasureKey& key);

// Weighted union of exact measurement branches for every input state.
StateSet denoise_set_branches(const StateSet& inputs, std::span<const double> theta,
                              const Conditioning& cond, const AnsatzSpec& spec);

// Runs the backward chain from a fresh Haar draw of N states. Returns the
// sets S~(t) indexed by t, so result[T] is the Haar start and result[0]
// the generated samples. Haar states and measurement uniforms are keyed
// by (seed, tag, class_index).
std::vector<StateSet> generate(const DenoiseModel& model, const Conditioning& cond,
                               std::uint64_t class_index, std::size_t N, std::uint64_t seed,
                               StreamTag haar_tag, StreamTag measure_tag);
std::vector<StateSet> generate(const DenoiseModel& model, const std::string& class_label,
                               std::size_t N, std::uint64_t seed);

// Runs the backward chain from given start states through steps
// k = from_step..to_step+1 (descending). Returns the set after step
// to_step+1, i.e. S~(to_step).
StateSet run_chain(const DenoiseModel& model, const StateSet& start, const Conditioning& cond,
                   int from_step, int to_step, std::uint64_t seed, StreamTag measure_tag,
                   std::uint64_t class_index);

}  // namespace cqdd
