#pragma once

#include <string>
#include <vector>

#include "cqdd/state_set.hpp"
#include "cqdd/transport.hpp"

namespace cqdd {

enum class Metric { mmd, wass };

std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

using CostMatrix = Matrix;

// C_ij = 1 - |<a_i|b_j>|^2, clamped to [0,1].
CostMatrix infidelity_matrix(const StateSet& a, const StateSet& b);

// (Weighted) mean fidelity over all cross pairs.
double pairwise_fidelity(const StateSet& a, const StateSet& b);

// Fbar(A,A) + Fbar(B,B) - 2 Fbar(A,B) with the fidelity kernel.
double mmd(const StateSet& a, const StateSet& b);

// Exact optimal-transport cost over the infidelity matrix. Equal-size
// unweighted sets go through the assignment solver; anything else through
// the general transport solver with the sets' weights as marginals.
double wasserstein(const StateSet& a, const StateSet& b);

double distance(const StateSet& a, const StateSet& b, Metric metric);

// Values below this are reported as a degenerate normalization.
inline constexpr double kMinNormalization = 1e-6;

// max_j D(haar_j, targets_j). `haar` holds one Haar sample per class, each
// the same size as the matching target set.
double normalization_constant(const std::vector<StateSet>& targets,
                              const std::vector<StateSet>& haar, Metric metric);

// (1/|C|) sum_j D(generated_j, references_j) / norm_constant. Classes are
// matched by position and must carry identical labels and sizes.
double class_loss(const std::vector<StateSet>& generated, const std::vector<StateSet>& references,
                  Metric metric, double norm_constant);

// Per-class normalized distances (not averaged), same matching rules.
std::vector<double> per_class_distances(const std::vector<StateSet>& generated,
                                        const std::vector<StateSet>& references, Metric metric,
                                        double norm_constant);

}  // namespace cqdd
