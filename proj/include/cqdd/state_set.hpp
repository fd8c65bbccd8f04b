#pragma once

#include <string>
#include <vector>

#include "cqdd/statevec.hpp"

namespace cqdd {

// A finite list of states from one class. Empty `weights` means uniform.
struct StateSet {
  std::vector<StateVector> states;
  std::vector<double> weights;
  std::string label;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  bool weighted() const { return !weights.empty(); }
  int num_qubits() const { return states.empty() ? 0 : states.front().num_qubits(); }

  // Per-state probability, uniform when unweighted.
  double weight(std::size_t i) const {
    return weights.empty() ? 1.0 / static_cast<double>(states.size()) : weights[i];
  }

  bool operator==(const StateSet&) const = default;
};

// Throws InvalidArgument on an empty set, mixed qubit counts, or weights
// that are negative, mis-sized, or do not sum to 1 within 1e-9.
void validate(const StateSet& set);

StateSet haar_set(int num_qubits, std::size_t count, Rng& rng, const std::string& label = "haar");

// Draws `count` Haar states with per-sample keyed streams, so the result
// does not depend on evaluation order.
StateSet haar_set_keyed(int num_qubits, std::size_t count, std::uint64_t master, StreamTag tag,
                        std::uint64_t class_index, const std::string& label = "haar");

}  // namespace cqdd
