#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqdd/ansatz.hpp"
#include "cqdd/datasets.hpp"
#include "cqdd/diffusion.hpp"
#include "cqdd/distances.hpp"
#include "cqdd/train.hpp"

namespace cqdd {

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::power;
  std::vector<double> params{0.005, 2.0};

  bool operator==(const ScheduleConfig&) const = default;
};

// One hyperparameter axis for `ablate`.
//   L, T, N, n_a       plain value sweeps
//   n_a_constrained    n_a sweep with L = product / n_a
//   classes            class-count sweep (equator rings or GHZ strings)
struct AblationGrid {
  std::string axis = "L";
  std::vector<int> values;
  int product = 12;
  std::string class_family = "equator_ring";
  int test_subsets = 5;
  std::size_t test_subset_size = 50;

  bool operator==(const AblationGrid&) const = default;
};

struct ExperimentConfig {
  std::string preset;  // informational once resolved
  std::vector<ClassSpec> classes;
  AnsatzSpec spec;
  int T = 20;
  ScheduleConfig schedule;
  Metric metric = Metric::wass;
  TrainerConfig trainer;
  std::uint64_t seed = 0;
  // Sample count for `sample`; also the held-out size in `eval`.
  std::size_t samples = 0;
  int sweep_points = 33;
  AblationGrid ablation;

  NoiseSchedule make_noise_schedule() const { return make_schedule(schedule.kind, schedule.params, T); }
  std::vector<std::string> labels() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws InvalidArgument with the offending field named.
void validate(const ExperimentConfig& config);

// planar-rings, polar-points, entanglement, many-body: the published task
// table. rings-union: the conditioned-vs-unconditioned benchmark task.
// rings-small: the desk-scale rings run.
const std::vector<std::string>& preset_names();
ExperimentConfig preset(const std::string& name);

// A config document may name a preset and override any field of it.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// Target sets for every class, seeded by config.seed.
std::vector<StateSet> make_targets(const ExperimentConfig& config);

}  // namespace cqdd
