#pragma once

#include <cstdint>
#include <vector>

#include "cqdd/distances.hpp"
#include "cqdd/state_set.hpp"

namespace cqdd {

// Q = (2/n) sum_i (1 - Tr rho_i^2), rho_i the single-qubit marginal.
double meyer_wallach(const StateVector& state);

// 1 - Tr rho^2 of qubit `qubit`'s reduced state, by explicit partial trace.
double single_qubit_linear_entropy(const StateVector& state, int qubit);

// sum_{i in indices} |c_i|^2
double subspace_overlap(const StateVector& state, const std::vector<std::uint64_t>& indices);

// Distribution of M = sum_i Z_i. support runs n, n-2, ..., -n.
struct MagnetizationDistribution {
  std::vector<int> support;
  std::vector<double> probabilities;
};

struct Magnetization {
  MagnetizationDistribution distribution;
  double mean = 0.0;  // sum_i <Z_i>
};

Magnetization magnetization(const StateVector& state);

// Set averages.
double mean_meyer_wallach(const StateSet& set);
double mean_subspace_overlap(const StateSet& set, const std::vector<std::uint64_t>& indices);
// Per-state distributions averaged with the set's weights.
Magnetization mean_magnetization(const StateSet& set);

// 100 * D(generated_j, targets_j) / D(haar_j, targets_j) per class.
std::vector<double> per_class_spread(const std::vector<StateSet>& generated,
                                     const std::vector<StateSet>& targets,
                                     const std::vector<StateSet>& haar, Metric metric);

}  // namespace cqdd
