#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cqdd/state_set.hpp"
#include "cqdd/statevec.hpp"

namespace cqdd::testing {

inline constexpr double kPi = std::numbers::pi;

inline StateVector amps(std::vector<Amplitude> a) { return StateVector::from_amplitudes(std::move(a), true); }

inline StateVector plus_state() { return amps({1.0, 1.0}); }

// Largest |a_i - b_i| over amplitudes.
inline double max_abs_diff(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline StateSet random_set(int q, std::size_t n, Rng& rng, const std::string& label = "s") {
  return haar_set(q, n, rng, label);
}

}  // namespace cqdd::testing
