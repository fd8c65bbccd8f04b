#include "cqdd/state_set.hpp"

#include <cmath>

#include "cqdd/errors.hpp"

namespace cqdd {

void validate(const StateSet& set) {
  if (set.empty()) throw InvalidArgument("state set '" + set.label + "' is empty");
  const int q = set.states.front().num_qubits();
  for (const auto& s : set.states) {
    if (s.num_qubits() != q) throw InvalidArgument("state set '" + set.label + "' mixes qubit counts");
  }
  if (set.weights.empty()) return;
  if (set.weights.size() != set.states.size()) {
    throw InvalidArgument("state set '" + set.label + "' has mis-sized weights");
  }
  double total = 0.0;
  for (double w : set.weights) {
    if (!(w >= 0.0)) throw InvalidArgument("state set '" + set.label + "' has a negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("state set '" + set.label + "' weights do not sum to 1");
  }
}

StateSet haar_set(int num_qubits, std::size_t count, Rng& rng, const std::string& label) {
  StateSet out;
  out.label = label;
  out.states.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.states.push_back(haar_random(num_qubits, rng));
  return out;
}

StateSet haar_set_keyed(int num_qubits, std::size_t count, std::uint64_t master, StreamTag tag,
                        std::uint64_t class_index, const std::string& label) {
  StateSet out;
  out.label = label;
  out.states.resize(count);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(master, tag, {class_index, i});
    out.states[i] = haar_random(num_qubits, rng);
  }
  return out;
}

}  // namespace cqdd
