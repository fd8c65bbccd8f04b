#include "cqdd/distances.hpp"

#include <algorithm>
#include <sstream>

#include "cqdd/errors.hpp"

namespace cqdd {

std::string to_string(Metric m) { return m == Metric::mmd ? "mmd" : "wass"; }

Metric parse_metric(const std::string& s) {
  if (s == "mmd" || s == "MMD") return Metric::mmd;
  if (s == "wass" || s == "WASS" || s == "wasserstein") return Metric::wass;
  throw InvalidArgument("unknown metric '" + s + "' (expected mmd or wass)");
}

namespace {

void check_pair(const StateSet& a, const StateSet& b) {
  validate(a);
  validate(b);
  if (a.num_qubits() != b.num_qubits()) {
    throw InvalidArgument("cannot compare sets over " + std::to_string(a.num_qubits()) + " and " +
                          std::to_string(b.num_qubits()) + " qubits");
  }
}

void check_classes(const std::vector<StateSet>& generated, const std::vector<StateSet>& references) {
  if (generated.empty()) throw InvalidArgument("class loss needs at least one class");
  if (generated.size() != references.size()) throw InvalidArgument("class count mismatch");
  for (std::size_t j = 0; j < generated.size(); ++j) {
    if (generated[j].label != references[j].label) {
      throw InvalidArgument("class label mismatch: '" + generated[j].label + "' vs '" +
                            references[j].label + "'");
    }
    if (!generated[j].weighted() && !references[j].weighted() &&
        generated[j].size() != references[j].size()) {
      throw InvalidArgument("class '" + generated[j].label + "' has unequal set sizes");
    }
  }
}

}  // namespace

CostMatrix infidelity_matrix(const StateSet& a, const StateSet& b) {
  check_pair(a, b);
  CostMatrix c(a.size(), b.size());
  const std::size_t rows = a.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      c(i, j) = std::clamp(1.0 - fidelity(a.states[i], b.states[j]), 0.0, 1.0);
    }
  }
  return c;
}

double pairwise_fidelity(const StateSet& a, const StateSet& b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) row += b.weight(j) * fidelity(a.states[i], b.states[j]);
    acc += a.weight(i) * row;
  }
  return acc;
}

double mmd(const StateSet& a, const StateSet& b) {
  return pairwise_fidelity(a, a) + pairwise_fidelity(b, b) - 2.0 * pairwise_fidelity(a, b);
}

double wasserstein(const StateSet& a, const StateSet& b) {
  const CostMatrix c = infidelity_matrix(a, b);
  if (!a.weighted() && !b.weighted() && a.size() == b.size()) {
    return solve_assignment(c).total_cost / static_cast<double>(a.size());
  }
  std::vector<double> wa(a.size());
  std::vector<double> wb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) wa[i] = a.weight(i);
  for (std::size_t j = 0; j < b.size(); ++j) wb[j] = b.weight(j);
  return solve_transport(c, wa, wb).cost;
}

double distance(const StateSet& a, const StateSet& b, Metric metric) {
  return metric == Metric::mmd ? mmd(a, b) : wasserstein(a, b);
}

double normalization_constant(const std::vector<StateSet>& targets,
                              const std::vector<StateSet>& haar, Metric metric) {
  if (targets.empty()) throw InvalidArgument("normalization needs at least one target class");
  if (targets.size() != haar.size()) {
    throw InvalidArgument("normalization needs one Haar sample per target class");
  }
  double best = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (haar[j].size() != targets[j].size()) {
      throw InvalidArgument("Haar sample size must match target class '" + targets[j].label + "'");
    }
    best = std::max(best, distance(haar[j], targets[j], metric));
  }
  if (best < kMinNormalization) {
    std::ostringstream os;
    os << "degenerate normalization constant " << best
       << " (targets are indistinguishable from Haar)";
    throw DegenerateError(os.str());
  }
  return best;
}

std::vector<double> per_class_distances(const std::vector<StateSet>& generated,
                                        const std::vector<StateSet>& references, Metric metric,
                                        double norm_constant) {
  check_classes(generated, references);
  if (!(norm_constant > 0.0)) throw InvalidArgument("normalization constant must be positive");
  std::vector<double> out(generated.size());
  for (std::size_t j = 0; j < generated.size(); ++j) {
    out[j] = distance(generated[j], references[j], metric) / norm_constant;
  }
  return out;
}

double class_loss(const std::vector<StateSet>& generated, const std::vector<StateSet>& references,
                  Metric metric, double norm_constant) {
  const auto d = per_class_distances(generated, references, metric, norm_constant);
  double acc = 0.0;
  for (double x : d) acc += x;
  return acc / static_cast<double>(d.size());
}

}  // namespace cqdd
