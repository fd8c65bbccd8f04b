#include "cqdd/metrics.hpp"

#include <bit>
#include <set>

#include "cqdd/errors.hpp"

namespace cqdd {

double single_qubit_linear_entropy(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) throw InvalidArgument("qubit out of range");
  const std::size_t m = state.mask(qubit);
  const auto c = state.amplitudes();
  double r00 = 0.0;
  double r11 = 0.0;
  Amplitude r01 = 0.0;
  for (std::size_t hi = 0; hi < c.size(); hi += 2 * m) {
    for (std::size_t i = hi; i < hi + m; ++i) {
      r00 += std::norm(c[i]);
      r11 += std::norm(c[i + m]);
      r01 += c[i] * std::conj(c[i + m]);
    }
  }
  const double purity = r00 * r00 + r11 * r11 + 2.0 * std::norm(r01);
  return 1.0 - purity;
}

double meyer_wallach(const StateVector& state) {
  const int n = state.num_qubits();
  double acc = 0.0;
  for (int q = 0; q < n; ++q) acc += single_qubit_linear_entropy(state, q);
  return 2.0 * acc / n;
}

double subspace_overlap(const StateVector& state, const std::vector<std::uint64_t>& indices) {
  if (indices.empty()) throw InvalidArgument("subspace overlap needs at least one basis index");
  std::set<std::uint64_t> seen;
  double acc = 0.0;
  for (auto i : indices) {
    if (i >= state.dim()) throw InvalidArgument("subspace basis index out of range");
    if (!seen.insert(i).second) throw InvalidArgument("subspace basis indices must be distinct");
    acc += std::norm(state[i]);
  }
  return acc;
}

Magnetization magnetization(const StateVector& state) {
  const int n = state.num_qubits();
  Magnetization out;
  auto& dist = out.distribution;
  for (int m = n; m >= -n; m -= 2) dist.support.push_back(m);
  dist.probabilities.assign(dist.support.size(), 0.0);
  const auto c = state.amplitudes();
  for (std::size_t i = 0; i < c.size(); ++i) {
    // M = n - 2 * (number of ones); support index is the popcount.
    dist.probabilities[static_cast<std::size_t>(std::popcount(i))] += std::norm(c[i]);
  }
  for (int q = 0; q < n; ++q) out.mean += pauli_expectation(state, {{q, Pauli::Z}});
  return out;
}

double mean_meyer_wallach(const StateSet& set) {
  validate(set);
  double acc = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) acc += set.weight(i) * meyer_wallach(set.states[i]);
  return acc;
}

double mean_subspace_overlap(const StateSet& set, const std::vector<std::uint64_t>& indices) {
  validate(set);
  double acc = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    acc += set.weight(i) * subspace_overlap(set.states[i], indices);
  }
  return acc;
}

Magnetization mean_magnetization(const StateSet& set) {
  validate(set);
  Magnetization out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Magnetization m = magnetization(set.states[i]);
    if (i == 0) {
      out.distribution.support = m.distribution.support;
      out.distribution.probabilities.assign(m.distribution.support.size(), 0.0);
    }
    const double w = set.weight(i);
    for (std::size_t k = 0; k < m.distribution.probabilities.size(); ++k) {
      out.distribution.probabilities[k] += w * m.distribution.probabilities[k];
    }
    out.mean += w * m.mean;
  }
  return out;
}

std::vector<double> per_class_spread(const std::vector<StateSet>& generated,
                                     const std::vector<StateSet>& targets,
                                     const std::vector<StateSet>& haar, Metric metric) {
  if (generated.size() != targets.size() || haar.size() != targets.size()) {
    throw InvalidArgument("spread table needs matching generated/target/Haar class lists");
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (generated[j].label != targets[j].label) {
      throw InvalidArgument("class label mismatch: '" + generated[j].label + "' vs '" +
                            targets[j].label + "'");
    }
    if (generated[j].size() != targets[j].size() || haar[j].size() != targets[j].size()) {
      throw InvalidArgument("class '" + targets[j].label + "' has unequal set sizes");
    }
    const double floor = distance(haar[j], targets[j], metric);
    if (floor < kMinNormalization) throw DegenerateError("class '" + targets[j].label + "' is Haar-like");
    out.push_back(100.0 * distance(generated[j], targets[j], metric) / floor);
  }
  return out;
}

}  // namespace cqdd
