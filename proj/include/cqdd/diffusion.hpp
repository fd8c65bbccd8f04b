#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqdd/state_set.hpp"

namespace cqdd {

enum class ScheduleKind { power, linear, constant, linspace };

// delta_1..delta_T scaling the scrambling angles at each forward step.
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  std::vector<double> params;
  std::vector<double> deltas;  // deltas[t-1] = delta_t

  int steps() const { return static_cast<int>(deltas.size()); }
  double delta(int t) const { return deltas.at(static_cast<std::size_t>(t - 1)); }
};

// power(c,p): c t^p | linear(c): c t | constant(c): c | linspace(x,y).
NoiseSchedule make_schedule(ScheduleKind kind, const std::vector<double>& params, int T);

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& s);
// "0.005t^2", "0.15t", "0.1 to 2", "0.3"
std::string describe(const NoiseSchedule& schedule);

// Angle draws consumed by one scrambling step on n qubits.
constexpr std::uint64_t scrambling_draws(int n) {
  return 2 * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
}

// One forward scrambling layer: RZ then RY on each qubit, then RZZ on
// every pair p<q in lexicographic order. Every angle is an independent
// draw from U(-delta*pi/8, delta*pi/8).
void scramble_in_place(StateVector& state, double delta, Rng& rng);
StateVector scrambling_step(const StateVector& state, double delta, Rng& rng);

struct DiffusionTrajectory {
  std::vector<StateSet> sets;  // sets[t], t = 0..T
  std::string class_label;
  std::uint64_t seed = 0;
  std::uint64_t class_index = 0;

  int steps() const { return static_cast<int>(sets.size()) - 1; }
};

// Scrambles every state of `initial` through the schedule. Sample i at step
// t uses the stream keyed (seed, diffusion, class_index, i, t).
DiffusionTrajectory forward_diffuse(const StateSet& initial, const NoiseSchedule& schedule,
                                    std::uint64_t seed, std::uint64_t class_index);

}  // namespace cqdd
