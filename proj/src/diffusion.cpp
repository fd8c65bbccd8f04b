#include "cqdd/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cqdd/errors.hpp"

namespace cqdd {

NoiseSchedule make_schedule(ScheduleKind kind, const std::vector<double>& params, int T) {
  if (T < 1) throw InvalidArgument("noise schedule needs T >= 1");
  const auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw InvalidArgument("schedule '" + to_string(kind) + "' expects " + std::to_string(n) +
                            " parameter(s)");
    }
  };
  NoiseSchedule s;
  s.kind = kind;
  s.params = params;
  s.deltas.resize(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    double d = 0.0;
    switch (kind) {
      case ScheduleKind::power:
        need(2);
        d = params[0] * std::pow(static_cast<double>(t), params[1]);
        break;
      case ScheduleKind::linear:
        need(1);
        d = params[0] * t;
        break;
      case ScheduleKind::constant:
        need(1);
        d = params[0];
        break;
      case ScheduleKind::linspace:
        need(2);
        d = T == 1 ? params[0]
                   : params[0] + (params[1] - params[0]) * static_cast<double>(t - 1) / (T - 1);
        break;
    }
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw InvalidArgument("schedule produces nonpositive delta at t=" + std::to_string(t));
    }
    s.deltas[static_cast<std::size_t>(t - 1)] = d;
  }
  // Pin the endpoint exactly; the interpolation formula can miss it by an ulp.
  if (kind == ScheduleKind::linspace && T > 1) s.deltas.back() = params[1];
  return s;
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::power:
      return "power";
    case ScheduleKind::linear:
      return "linear";
    case ScheduleKind::constant:
      return "constant";
    case ScheduleKind::linspace:
      return "linspace";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "power") return ScheduleKind::power;
  if (s == "linear") return ScheduleKind::linear;
  if (s == "constant") return ScheduleKind::constant;
  if (s == "linspace") return ScheduleKind::linspace;
  throw InvalidArgument("unknown schedule kind '" + s + "'");
}

std::string describe(const NoiseSchedule& schedule) {
  std::ostringstream os;
  const auto& p = schedule.params;
  switch (schedule.kind) {
    case ScheduleKind::power:
      os << p.at(0) << "t^" << p.at(1);
      break;
    case ScheduleKind::linear:
      os << p.at(0) << "t";
      break;
    case ScheduleKind::constant:
      os << p.at(0);
      break;
    case ScheduleKind::linspace:
      os << p.at(0) << " to " << p.at(1);
      break;
  }
  return os.str();
}

void scramble_in_place(StateVector& state, double delta, Rng& rng) {
  const double half_width = delta * std::numbers::pi / 8.0;
  const int n = state.num_qubits();
  for (int q = 0; q < n; ++q) {
    const double wz = rng.uniform(-half_width, half_width);
    state.rotate(Pauli::Z, wz, q);
    const double wy = rng.uniform(-half_width, half_width);
    state.rotate(Pauli::Y, wy, q);
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) state.rzz(rng.uniform(-half_width, half_width), p, q);
  }
}

StateVector scrambling_step(const StateVector& state, double delta, Rng& rng) {
  if (!(delta > 0.0)) throw InvalidArgument("scrambling delta must be positive");
  StateVector out = state;
  scramble_in_place(out, delta, rng);
  return out;
}

DiffusionTrajectory forward_diffuse(const StateSet& initial, const NoiseSchedule& schedule,
                                    std::uint64_t seed, std::uint64_t class_index) {
  validate(initial);
  const int T = schedule.steps();
  if (T < 1) throw InvalidArgument("forward diffusion needs a schedule with T >= 1");
  DiffusionTrajectory traj;
  traj.class_label = initial.label;
  traj.seed = seed;
  traj.class_index = class_index;
  traj.sets.resize(static_cast<std::size_t>(T) + 1);
  traj.sets[0] = initial;
  const std::size_t N = initial.size();
  for (int t = 1; t <= T; ++t) {
    const StateSet& prev = traj.sets[static_cast<std::size_t>(t - 1)];
    StateSet& cur = traj.sets[static_cast<std::size_t>(t)];
    cur.label = initial.label;
    cur.weights = initial.weights;
    cur.states.resize(N);
    const double delta = schedule.delta(t);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < N; ++i) {
      Rng rng(seed, StreamTag::diffusion, {class_index, i, static_cast<std::uint64_t>(t)});
      cur.states[i] = prev.states[i];
      scramble_in_place(cur.states[i], delta, rng);
    }
  }
  return traj;
}

}  // namespace cqdd
