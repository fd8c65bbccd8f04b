#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqdd/config.hpp"
#include "cqdd/io.hpp"
#include "cqdd/train.hpp"

namespace cqdd {

// Every command writes under manifest.out_dir() and registers each file.
// Loss records and metric files carry no timings, so reruns with the same
// config and seed are byte-identical.

enum class SetFormat { qset, jsonl };
SetFormat parse_set_format(const std::string& s);

std::vector<StateSet> cmd_gen_data(const ExperimentConfig& config, Manifest& manifest,
                                   SetFormat format = SetFormat::qset);

// diffusion.csv: per class and t, normalized distance to the data and to a
// fresh Haar draw; the final noised sets are written too.
void cmd_diffuse(const ExperimentConfig& config, Manifest& manifest);

TrainingResult cmd_train(const ExperimentConfig& config, Manifest& manifest);

// Draws config.samples states per class (or only `only_class`) from a model.
std::vector<StateSet> cmd_sample(const DenoiseModel& model, const ExperimentConfig& config,
                                 Manifest& manifest, SetFormat format = SetFormat::qset,
                                 const std::optional<std::string>& only_class = std::nullopt);

struct ClassEval {
  std::string label;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double train_spread_pct = 0.0;
  double test_spread_pct = 0.0;
  std::optional<double> mean_q;                // n >= 2
  std::optional<double> overlap_even;          // n = 2: {|00>,|11>}
  std::optional<double> overlap_odd;           // n = 2: {|01>,|10>}
  std::optional<double> mean_magnetization;    // per site, n >= 2 TLFIM classes
};

struct EvalResult {
  double norm_constant = 0.0;
  std::vector<ClassEval> classes;
  double train_loss = 0.0;
  double test_loss = 0.0;
};

EvalResult cmd_eval(const DenoiseModel& model, const ExperimentConfig& config, Manifest& manifest);

struct AblationRow {
  std::string axis;
  int value = 0;
  int n_a = 0;
  int L = 0;
  int T = 0;
  std::size_t N = 0;
  int classes = 0;
  double test_loss_mean = 0.0;
  double test_loss_std = 0.0;
  std::string status = "ok";
};

std::vector<AblationRow> cmd_ablate(const ExperimentConfig& config, Manifest& manifest);

struct SweepRow {
  double mu = 0.0;
  std::vector<double> distances;  // one per model class, normalized
};

std::vector<SweepRow> cmd_sweep_mu(const DenoiseModel& model, const ExperimentConfig& config,
                                   Manifest& manifest);

struct BenchmarkResult {
  TrainingRecord conditioned;
  TrainingRecord unconditioned;
};

// Conditioned training on the config classes against one unconditioned
// model trained on their union, with matched totals and seeds.
BenchmarkResult cmd_benchmark(const ExperimentConfig& config, Manifest& manifest);

struct ConditioningRow {
  ConditioningMode mode = ConditioningMode::rx;
  std::string status = "ok";
  double train_loss = 0.0;
  double test_loss = 0.0;
  // rz only: largest 1 - F between class outputs drawn on shared streams.
  std::optional<double> cross_class_defect;
};

std::vector<ConditioningRow> cmd_compare_conditioning(const ExperimentConfig& config, Manifest& manifest,
                                                      const std::vector<ConditioningMode>& modes);

// Largest 1 - F, and largest amplitude gap after removing the conditioning
// phase, between every class's generated set and class 0's, with all
// classes sharing one Haar start and one measurement stream.
struct DegeneracyCheck {
  double max_infidelity = 0.0;
  double max_amplitude_gap = 0.0;
};
DegeneracyCheck rz_degeneracy(const DenoiseModel& model, std::size_t N, std::uint64_t seed);

// Full command-line entry point. Returns the process exit code:
// 0 success, 2 config error, 3 numeric or degeneracy abort, 4 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqdd
