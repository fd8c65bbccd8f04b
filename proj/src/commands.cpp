#include "cqdd/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>

#include "cqdd/errors.hpp"
#include "cqdd/metrics.hpp"
#include "cqdd/parallel.hpp"

namespace cqdd {

namespace {

using std::numbers::pi;

std::string fmt(double x) { return format_double(x); }

fs::path set_path(const fs::path& dir, const std::string& label, SetFormat format) {
  return dir / (file_stem_for(label) + (format == SetFormat::qset ? ".qset" : ".jsonl"));
}

void write_set(const fs::path& path, const StateSet& set, std::uint64_t seed, SetFormat format,
               Manifest& manifest) {
  if (format == SetFormat::qset) {
    write_qset(path, set, seed);
  } else {
    write_qset_jsonl(path, set, seed);
  }
  manifest.add(path);
}

std::vector<Conditioning> conditions_of(const DenoiseModel& model) {
  std::vector<Conditioning> out;
  for (const auto& c : model.classes) out.push_back(conditioning_for(c, model.spec));
  return out;
}

double mean_of(const std::vector<double>& v) {
  double a = 0.0;
  for (double x : v) a += x;
  return v.empty() ? 0.0 : a / static_cast<double>(v.size());
}

// Training with the loss curve streamed to `records` and per-step minima
// collected in `minima`.
TrainingResult train_logged(const ExperimentConfig& config, const std::vector<StateSet>& targets,
                            const std::vector<ClassCondition>& classes, const fs::path& records,
                            CsvTable& minima, const std::string& run, Manifest& manifest) {
  std::ofstream os(records, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + records.string() + " for writing");
  const LossSink sink = [&](const LossRecord& r) { os << loss_record_line(r) << '\n'; };
  TrainerConfig trainer = config.trainer;
  trainer.seed = config.seed;
  manifest.add(records);
  auto result = train_all(targets, config.make_noise_schedule(), config.spec, classes, config.metric,
                          trainer, sink);
  os.flush();
  if (!os) throw IoError("write failed for " + records.string());
  for (const auto& s : result.record.steps) {
    std::vector<std::string> row;
    if (!run.empty()) row.push_back(run);
    row.insert(row.end(), {std::to_string(s.k), fmt(s.best_loss), std::to_string(s.best_iteration),
                           fmt(s.losses.front())});
    minima.add(std::move(row));
  }
  return result;
}

void check_model_matches(const DenoiseModel& model, const ExperimentConfig& config) {
  validate(model);
  if (model.spec.n != config.spec.n) {
    throw InvalidArgument("model acts on " + std::to_string(model.spec.n) + " qubits, config classes on " +
                          std::to_string(config.spec.n));
  }
  if (model.classes.size() != config.classes.size()) throw InvalidArgument("model and config class counts differ");
  for (std::size_t j = 0; j < model.classes.size(); ++j) {
    if (model.classes[j].label != config.classes[j].label) {
      throw InvalidArgument("model class '" + model.classes[j].label + "' does not match config class '" +
                            config.classes[j].label + "'");
    }
  }
}

std::vector<StateSet> relabeled_finals(const std::vector<std::vector<StateSet>>& chains,
                                       const DenoiseModel& model) {
  std::vector<StateSet> out;
  for (std::size_t j = 0; j < chains.size(); ++j) {
    out.push_back(chains[j].front());
    out.back().label = model.classes[j].label;
  }
  return out;
}

std::vector<StateSet> held_out_finals(const DenoiseModel& model, const std::vector<StateSet>& targets,
                                      bool held_out, std::uint64_t seed) {
  const auto conds = conditions_of(model);
  std::vector<StateSet> out;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    auto sets = generate(model, conds[j], j, targets[j].size(), seed,
                         held_out ? StreamTag::haar_test : StreamTag::haar_train,
                         held_out ? StreamTag::measure_test : StreamTag::measure_chain);
    out.push_back(std::move(sets.front()));
    out.back().label = targets[j].label;
  }
  return out;
}

bool all_tlfim(const ExperimentConfig& config) {
  for (const auto& c : config.classes) {
    if (c.family != Family::tlfim) return false;
  }
  return true;
}

}  // namespace

SetFormat parse_set_format(const std::string& s) {
  if (s == "qset") return SetFormat::qset;
  if (s == "jsonl") return SetFormat::jsonl;
  throw InvalidArgument("unknown set format '" + s + "' (expected qset or jsonl)");
}

std::vector<StateSet> cmd_gen_data(const ExperimentConfig& config, Manifest& manifest, SetFormat format) {
  validate(config);
  auto targets = make_targets(config);
  for (const auto& t : targets) {
    write_set(set_path(manifest.out_dir() / "data", t.label, format), t, config.seed, format, manifest);
  }
  return targets;
}

void cmd_diffuse(const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  const auto targets = make_targets(config);
  const auto schedule = config.make_noise_schedule();
  const auto haar = haar_reference_sets(targets, config.seed);
  const double norm = normalization_constant(targets, haar, config.metric);
  manifest.set("normalization_constant", norm);
  CsvTable table({"class", "t", "delta", "distance_to_data", "distance_to_haar"});
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto traj = forward_diffuse(targets[j], schedule, config.seed, j);
    const auto fresh = haar_set_keyed(config.spec.n, targets[j].size(), config.seed, StreamTag::haar_reference, j);
    for (int t = 0; t <= config.T; ++t) {
      const auto& s = traj.sets[static_cast<std::size_t>(t)];
      table.add({targets[j].label, std::to_string(t), t == 0 ? "0" : fmt(schedule.delta(t)),
                 fmt(distance(s, targets[j], config.metric) / norm),
                 fmt(distance(s, fresh, config.metric) / norm)});
    }
    write_set(set_path(manifest.out_dir() / "diffused", targets[j].label, SetFormat::qset), traj.sets.back(),
              config.seed, SetFormat::qset, manifest);
  }
  table.write(manifest.out_dir() / "diffusion.csv");
  manifest.add(manifest.out_dir() / "diffusion.csv");
}

TrainingResult cmd_train(const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  const auto targets = make_targets(config);
  const auto classes = make_class_conditions(config.labels(), config.spec);
  const fs::path out = manifest.out_dir();
  fs::create_directories(out);
  CsvTable minima({"k", "best_loss", "best_iteration", "first_loss"});
  auto result = train_logged(config, targets, classes, out / "losses.jsonl", minima, "", manifest);
  manifest.set("normalization_constant", result.record.norm_constant);

  write_model(out / "model.json", result.model);
  manifest.add(out / "model.json");
  minima.write(out / "step_minima.csv");
  manifest.add(out / "step_minima.csv");

  CsvTable summary({"class", "train_loss", "test_loss"});
  for (std::size_t j = 0; j < targets.size(); ++j) {
    summary.add({targets[j].label, fmt(result.record.train_class_losses[j]), fmt(result.record.test_class_losses[j])});
  }
  summary.add({"mean", fmt(result.record.train_loss), fmt(result.record.test_loss)});
  summary.write(out / "summary.csv");
  manifest.add(out / "summary.csv");
  return result;
}

std::vector<StateSet> cmd_sample(const DenoiseModel& model, const ExperimentConfig& config, Manifest& manifest,
                                 SetFormat format, const std::optional<std::string>& only_class) {
  validate(model);
  if (config.samples < 1) throw InvalidArgument("samples must be >= 1");
  std::vector<StateSet> out;
  for (std::size_t j = 0; j < model.classes.size(); ++j) {
    const auto& cls = model.classes[j];
    if (only_class && *only_class != cls.label) continue;
    auto sets = generate(model, conditioning_for(cls, model.spec), j, config.samples, config.seed,
                         StreamTag::generate, StreamTag::generate);
    StateSet s = std::move(sets.front());
    s.label = cls.label;
    write_set(set_path(manifest.out_dir() / "samples", s.label, format), s, config.seed, format, manifest);
    out.push_back(std::move(s));
  }
  if (only_class && out.empty()) throw InvalidArgument("model has no class '" + *only_class + "'");
  return out;
}

EvalResult cmd_eval(const DenoiseModel& model, const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  check_model_matches(model, config);
  const auto targets = make_targets(config);
  const auto haar = haar_reference_sets(targets, config.seed);
  EvalResult res;
  res.norm_constant = normalization_constant(targets, haar, config.metric);
  manifest.set("normalization_constant", res.norm_constant);

  const auto train_sets = held_out_finals(model, targets, false, model.seed);
  const auto test_sets = held_out_finals(model, targets, true, model.seed);
  const auto train_d = per_class_distances(train_sets, targets, config.metric, res.norm_constant);
  const auto test_d = per_class_distances(test_sets, targets, config.metric, res.norm_constant);
  const auto train_spread = per_class_spread(train_sets, targets, haar, config.metric);
  const auto test_spread = per_class_spread(test_sets, targets, haar, config.metric);
  const int n = config.spec.n;
  const fs::path out = manifest.out_dir();

  CsvTable losses({"class", "train_loss", "test_loss"});
  CsvTable spread({"class", "train_spread_pct", "test_spread_pct"});
  CsvTable ent({"class", "set", "mean_q", "overlap_00_11", "overlap_01_10"});
  CsvTable bloch({"class", "set", "index", "x", "y", "z"});
  CsvTable projected({"class", "set", "index", "subspace", "x", "y", "z", "weight"});
  CsvTable mag({"class", "set", "m", "probability"});
  const bool tlfim = all_tlfim(config);

  for (std::size_t j = 0; j < targets.size(); ++j) {
    ClassEval ce;
    ce.label = targets[j].label;
    ce.train_loss = train_d[j];
    ce.test_loss = test_d[j];
    ce.train_spread_pct = train_spread[j];
    ce.test_spread_pct = test_spread[j];
    losses.add({ce.label, fmt(ce.train_loss), fmt(ce.test_loss)});
    spread.add({ce.label, fmt(ce.train_spread_pct), fmt(ce.test_spread_pct)});

    const std::vector<std::pair<std::string, const StateSet*>> views{
        {"target", &targets[j]}, {"train", &train_sets[j]}, {"test", &test_sets[j]}};
    for (const auto& [name, set] : views) {
      if (n >= 2) {
        const double q = mean_meyer_wallach(*set);
        std::string even = "", odd = "";
        if (n == 2) {
          even = fmt(mean_subspace_overlap(*set, {0, 3}));
          odd = fmt(mean_subspace_overlap(*set, {1, 2}));
        }
        ent.add({ce.label, name, fmt(q), even, odd});
        if (name == "test") {
          ce.mean_q = q;
          if (n == 2) {
            ce.overlap_even = mean_subspace_overlap(*set, {0, 3});
            ce.overlap_odd = mean_subspace_overlap(*set, {1, 2});
          }
        }
      }
      for (std::size_t i = 0; i < set->size(); ++i) {
        const auto& s = set->states[i];
        if (n == 1) {
          const auto b = bloch_vector(s);
          bloch.add({ce.label, name, std::to_string(i), fmt(b.x), fmt(b.y), fmt(b.z)});
        } else if (n == 2) {
          for (const auto& [sub, a, b] : {std::tuple{"00_11", 0, 3}, {"01_10", 1, 2}}) {
            const auto p = bloch_projection(s, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
            projected.add({ce.label, name, std::to_string(i), sub, fmt(p.x), fmt(p.y), fmt(p.z), fmt(p.weight)});
          }
        }
      }
      if (tlfim) {
        const auto m = mean_magnetization(*set);
        for (std::size_t k = 0; k < m.distribution.support.size(); ++k) {
          mag.add({ce.label, name, std::to_string(m.distribution.support[k]), fmt(m.distribution.probabilities[k])});
        }
        if (name == "test") ce.mean_magnetization = m.mean / n;
      }
    }
    res.classes.push_back(std::move(ce));
  }
  res.train_loss = mean_of(train_d);
  res.test_loss = mean_of(test_d);
  losses.add({"mean", fmt(res.train_loss), fmt(res.test_loss)});

  auto emit = [&](const CsvTable& t, const char* name) {
    t.write(out / name);
    manifest.add(out / name);
  };
  emit(losses, "eval.csv");
  emit(spread, "spread.csv");
  if (n >= 2) emit(ent, "entanglement.csv");
  if (n == 1) emit(bloch, "bloch.csv");
  if (n == 2) emit(projected, "bloch_projected.csv");
  if (tlfim) emit(mag, "magnetization.csv");
  return res;
}

std::vector<AblationRow> cmd_ablate(const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  const auto& grid = config.ablation;
  std::vector<AblationRow> rows;
  CsvTable table({"axis", "value", "n_a", "L", "T", "N", "classes", "test_loss_mean", "test_loss_std", "status"});
  for (int v : grid.values) {
    ExperimentConfig c = config;
    AblationRow row;
    row.axis = grid.axis;
    row.value = v;
    try {
      if (grid.axis == "L") {
        c.spec.L = v;
      } else if (grid.axis == "T") {
        c.T = v;
      } else if (grid.axis == "N") {
        if (v < 1) throw InvalidArgument("N must be >= 1");
        for (auto& cs : c.classes) cs.N = static_cast<std::size_t>(v);
      } else if (grid.axis == "n_a") {
        c.spec.n_a = v;
      } else if (grid.axis == "n_a_constrained") {
        if (v < 1 || grid.product % v != 0) {
          throw InvalidArgument("L * n_a = " + std::to_string(grid.product) + " has no integer L for n_a = " +
                                std::to_string(v));
        }
        c.spec.n_a = v;
        c.spec.L = grid.product / v;
      } else if (grid.axis == "classes") {
        const std::size_t N = config.classes.front().N;
        c.classes.clear();
        if (grid.class_family == "equator_ring") {
          const auto alphas = equator_ring_angles(v);
          for (int k = 0; k < v; ++k) {
            ClassSpec cs;
            cs.family = Family::equator_ring;
            cs.alpha = alphas[static_cast<std::size_t>(k)];
            cs.label = "alpha_" + std::to_string(k + 1);
            cs.N = N;
            c.classes.push_back(cs);
          }
          c.spec.n = 1;
        } else if (grid.class_family == "ghz_string") {
          const auto& bits = ghz_string_bitstrings();
          if (v < 1 || static_cast<std::size_t>(v) > bits.size()) {
            throw InvalidArgument("GHZ-string grid supports 1 to " + std::to_string(bits.size()) + " classes");
          }
          for (int k = 0; k < v; ++k) {
            ClassSpec cs;
            cs.family = Family::ghz_string;
            cs.bits = bits[static_cast<std::size_t>(k)];
            cs.n = 4;
            cs.label = cs.bits;
            cs.N = N;
            c.classes.push_back(cs);
          }
          c.spec.n = 4;
        } else {
          throw InvalidArgument("class grid family must be equator_ring or ghz_string");
        }
      } else {
        throw InvalidArgument("unknown ablation axis '" + grid.axis + "'");
      }
      validate(c);
    } catch (const InvalidArgument& e) {
      row.status = std::string("skipped: ") + e.what();
      row.n_a = c.spec.n_a;
      row.L = c.spec.L;
      row.T = c.T;
      row.N = c.classes.empty() ? 0 : c.classes.front().N;
      row.classes = static_cast<int>(c.classes.size());
      table.add({row.axis, std::to_string(v), std::to_string(row.n_a), std::to_string(row.L), std::to_string(row.T),
                 std::to_string(row.N), std::to_string(row.classes), "", "", row.status});
      rows.push_back(row);
      continue;
    }
    row.n_a = c.spec.n_a;
    row.L = c.spec.L;
    row.T = c.T;
    row.N = c.classes.front().N;
    row.classes = static_cast<int>(c.classes.size());

    const auto targets = make_targets(c);
    const auto classes = make_class_conditions(c.labels(), c.spec);
    TrainerConfig trainer = c.trainer;
    trainer.seed = c.seed;
    auto result = train_all(targets, c.make_noise_schedule(), c.spec, classes, c.metric, trainer);

    // Five disjoint held-out subsets of 50 per class by default.
    const std::size_t S = static_cast<std::size_t>(grid.test_subsets);
    const std::size_t M = grid.test_subset_size;
    std::vector<StateSet> pools;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      auto sets = generate(result.model, conditioning_for(classes[j], c.spec), j, S * M, c.seed,
                           StreamTag::haar_test, StreamTag::measure_test);
      pools.push_back(std::move(sets.front()));
    }
    std::vector<double> subset_losses;
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        StateSet part;
        part.label = targets[j].label;
        part.states.assign(pools[j].states.begin() + static_cast<std::ptrdiff_t>(s * M),
                           pools[j].states.begin() + static_cast<std::ptrdiff_t>((s + 1) * M));
        acc += distance(part, targets[j], c.metric) / result.record.norm_constant;
      }
      subset_losses.push_back(acc / static_cast<double>(targets.size()));
    }
    row.test_loss_mean = mean_of(subset_losses);
    double var = 0.0;
    for (double x : subset_losses) var += (x - row.test_loss_mean) * (x - row.test_loss_mean);
    row.test_loss_std = S > 1 ? std::sqrt(var / static_cast<double>(S - 1)) : 0.0;
    table.add({row.axis, std::to_string(v), std::to_string(row.n_a), std::to_string(row.L), std::to_string(row.T),
               std::to_string(row.N), std::to_string(row.classes), fmt(row.test_loss_mean), fmt(row.test_loss_std),
               row.status});
    rows.push_back(row);
  }
  table.write(manifest.out_dir() / "ablation.csv");
  manifest.add(manifest.out_dir() / "ablation.csv");
  return rows;
}

std::vector<SweepRow> cmd_sweep_mu(const DenoiseModel& model, const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  check_model_matches(model, config);
  const auto targets = make_targets(config);
  const auto haar = haar_reference_sets(targets, config.seed);
  const double norm = normalization_constant(targets, haar, config.metric);
  manifest.set("normalization_constant", norm);

  std::vector<std::string> header{"mu"};
  for (const auto& t : targets) header.push_back("distance_" + t.label);
  header.push_back("sum");
  header.push_back("note");
  CsvTable table(header);
  std::vector<SweepRow> rows;

  const auto mode = model.spec.conditioning;
  if (mode == ConditioningMode::basis || mode == ConditioningMode::rz) {
    std::vector<std::string> warn(header.size(), "");
    warn.back() = "warning: mu has no effect in " + to_string(mode) + " conditioning";
    table.add(warn);
  }
  const std::size_t N = targets.front().size();
  for (int i = 0; i < config.sweep_points; ++i) {
    SweepRow row;
    row.mu = 2 * pi * i / config.sweep_points;
    Conditioning cond{mode, row.mu, 0};
    // One shared start and measurement stream across the grid, so rows
    // differ only through mu.
    auto sets = generate(model, cond, 0, N, config.seed, StreamTag::sweep, StreamTag::sweep);
    double sum = 0.0;
    std::vector<std::string> cells{fmt(row.mu)};
    for (const auto& t : targets) {
      const double d = distance(sets.front(), t, config.metric) / norm;
      row.distances.push_back(d);
      sum += d;
      cells.push_back(fmt(d));
    }
    cells.push_back(fmt(sum));
    cells.push_back("");
    table.add(cells);
    rows.push_back(std::move(row));
  }
  table.write(manifest.out_dir() / "sweep_mu.csv");
  manifest.add(manifest.out_dir() / "sweep_mu.csv");
  return rows;
}

BenchmarkResult cmd_benchmark(const ExperimentConfig& config, Manifest& manifest) {
  validate(config);
  const auto targets = make_targets(config);
  const fs::path out = manifest.out_dir();
  fs::create_directories(out);
  CsvTable minima({"run", "k", "best_loss", "best_iteration", "first_loss"});

  const auto classes = make_class_conditions(config.labels(), config.spec);
  auto cond = train_logged(config, targets, classes, out / "losses_conditioned.jsonl", minima, "conditioned",
                           manifest);
  write_model(out / "model_conditioned.json", cond.model);
  manifest.add(out / "model_conditioned.json");

  // The union keeps the same total sample count in a single class.
  StateSet uni;
  uni.label = "union";
  for (const auto& t : targets) uni.states.insert(uni.states.end(), t.states.begin(), t.states.end());
  ExperimentConfig ucfg = config;
  AnsatzSpec uspec = config.spec;
  uspec.conditioning = ConditioningMode::rx;
  ucfg.spec = uspec;
  const std::vector<ClassCondition> uclass{{"union", 0.0, 0}};
  auto unc = train_logged(ucfg, {uni}, uclass, out / "losses_unconditioned.jsonl", minima, "unconditioned",
                          manifest);
  write_model(out / "model_unconditioned.json", unc.model);
  manifest.add(out / "model_unconditioned.json");

  minima.write(out / "step_minima.csv");
  manifest.add(out / "step_minima.csv");
  CsvTable table({"run", "train_loss", "test_loss", "normalization_constant"});
  table.add({"conditioned", fmt(cond.record.train_loss), fmt(cond.record.test_loss), fmt(cond.record.norm_constant)});
  table.add({"unconditioned", fmt(unc.record.train_loss), fmt(unc.record.test_loss), fmt(unc.record.norm_constant)});
  table.write(out / "benchmark.csv");
  manifest.add(out / "benchmark.csv");
  return {cond.record, unc.record};
}

DegeneracyCheck rz_degeneracy(const DenoiseModel& model, std::size_t N, std::uint64_t seed) {
  validate(model);
  DegeneracyCheck out;
  const auto conds = conditions_of(model);
  const auto ref = generate(model, conds.front(), 0, N, seed, StreamTag::generate, StreamTag::generate).front();
  for (std::size_t j = 1; j < conds.size(); ++j) {
    const auto other = generate(model, conds[j], 0, N, seed, StreamTag::generate, StreamTag::generate).front();
    // RZ(mu)|0> = e^{-i mu / 2}|0> on each ancilla, once per step.
    const Amplitude phase =
        std::polar(1.0, -(conds[j].mu - conds[0].mu) * model.spec.n_a * model.T / 2.0);
    for (std::size_t i = 0; i < N; ++i) {
      out.max_infidelity = std::max(out.max_infidelity, 1.0 - fidelity(ref.states[i], other.states[i]));
      for (std::size_t k = 0; k < ref.states[i].dim(); ++k) {
        out.max_amplitude_gap =
            std::max(out.max_amplitude_gap, std::abs(other.states[i][k] - phase * ref.states[i][k]));
      }
    }
  }
  return out;
}

std::vector<ConditioningRow> cmd_compare_conditioning(const ExperimentConfig& config, Manifest& manifest,
                                                      const std::vector<ConditioningMode>& modes) {
  const auto targets = make_targets(config);
  std::vector<ConditioningRow> rows;
  CsvTable table({"mode", "train_loss", "test_loss", "cross_class_defect", "status"});
  for (auto mode : modes) {
    ConditioningRow row;
    row.mode = mode;
    ExperimentConfig c = config;
    c.spec.conditioning = mode;
    std::vector<ClassCondition> classes;
    try {
      classes = make_class_conditions(c.labels(), c.spec);
    } catch (const InvalidArgument& e) {
      row.status = std::string("rejected: ") + e.what();
      table.add({to_string(mode), "", "", "", row.status});
      rows.push_back(row);
      continue;
    }
    TrainerConfig trainer = c.trainer;
    trainer.seed = c.seed;
    auto result = train_all(targets, c.make_noise_schedule(), c.spec, classes, c.metric, trainer);
    row.train_loss = result.record.train_loss;
    row.test_loss = result.record.test_loss;
    std::string defect;
    if (mode == ConditioningMode::rz) {
      row.status = "expected-degenerate";
      const auto check = rz_degeneracy(result.model, targets.front().size(), c.seed);
      row.cross_class_defect = std::max(check.max_infidelity, check.max_amplitude_gap);
      defect = fmt(*row.cross_class_defect);
    }
    table.add({to_string(mode), fmt(row.train_loss), fmt(row.test_loss), defect, row.status});
    rows.push_back(row);
  }
  table.write(manifest.out_dir() / "conditioning.csv");
  manifest.add(manifest.out_dir() / "conditioning.csv");
  return rows;
}

namespace {

struct CliOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<std::size_t> samples;
  std::string out = "out";
  std::string model;
  std::string format = "qset";
  std::string only_class;
  std::vector<std::string> modes{"basis", "rx", "ry", "rz"};
  int threads = 0;
};

ExperimentConfig resolve_config(const CliOptions& o) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else if (!o.preset.empty()) {
    c = preset(o.preset);
  } else {
    throw InvalidArgument("either --config or --preset is required");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.iterations) c.trainer.iterations_per_step = *o.iterations;
  if (o.samples) c.samples = *o.samples;
  c.trainer.seed = c.seed;
  validate(c);
  return c;
}

DenoiseModel require_model(const CliOptions& o) {
  if (o.model.empty()) throw InvalidArgument("--model is required");
  return read_model(o.model);
}

void report_losses(std::ostream& out, const TrainingRecord& r) {
  out << "normalization " << fmt(r.norm_constant) << "\n";
  out << "train_loss " << fmt(r.train_loss) << "\n";
  out << "test_loss " << fmt(r.test_loss) << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-conditioned quantum denoising diffusion"};
  app.require_subcommand(1);
  CliOptions o;
  app.add_option("--threads", o.threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  const std::vector<std::string> names{"gen-data", "diffuse",   "train",     "sample",
                                       "eval",     "ablate",    "sweep-mu",  "benchmark",
                                       "compare-conditioning"};
  const std::vector<std::string> help{
      "Generate target class sets",
      "Run the forward scrambling process and record distances",
      "Train a conditioned denoising model",
      "Draw samples from a trained model",
      "Evaluate a trained model on training and held-out chains",
      "Sweep one hyperparameter and report held-out losses",
      "Generated-set distances as the conditioning angle varies",
      "Conditioned training against an unconditioned model on the union",
      "Train under each conditioning mode"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* s = app.add_subcommand(names[i], help[i]);
    s->add_option("--config", o.config, "JSON config file");
    s->add_option("--preset", o.preset, "Named preset");
    s->add_option("--seed", o.seed, "Override the master seed");
    s->add_option("--iterations", o.iterations, "Override iterations per step");
    s->add_option("--out", o.out, "Output directory");
    subs.push_back(s);
  }
  for (auto* s : {subs[0], subs[3]}) s->add_option("--format", o.format, "qset or jsonl");
  for (auto* s : {subs[3], subs[4], subs[6]}) s->add_option("--model", o.model, "Trained model.json");
  subs[3]->add_option("--class", o.only_class, "Sample only this class");
  subs[3]->add_option("--samples", o.samples, "Samples per class");
  subs[8]->add_option("--modes", o.modes, "Conditioning modes to compare")->delimiter(',');

  std::vector<const char*> argv{"cqdd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Manifest manifest(command, o.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const auto fail = [&](const std::string& kind, const char* what, int code) {
    err << kind << ": " << what << "\n";
    try {
      manifest.mark_partial(what);
      fs::create_directories(o.out);
      manifest.write(elapsed());
    } catch (const std::exception& e) {
      err << "could not write manifest: " << e.what() << "\n";
    }
    return code;
  };

  try {
    set_thread_count(o.threads);
    const ExperimentConfig config = resolve_config(o);
    fs::create_directories(o.out);
    write_text(fs::path(o.out) / "config.json", config_to_json(config).dump(2) + "\n");
    manifest.add(fs::path(o.out) / "config.json");
    manifest.set("seed", config.seed);

    if (command == "gen-data") {
      for (const auto& s : cmd_gen_data(config, manifest, parse_set_format(o.format))) {
        out << s.label << " " << s.size() << " states\n";
      }
    } else if (command == "diffuse") {
      cmd_diffuse(config, manifest);
    } else if (command == "train") {
      report_losses(out, cmd_train(config, manifest).record);
    } else if (command == "sample") {
      const auto model = require_model(o);
      const auto only = o.only_class.empty() ? std::nullopt : std::optional<std::string>(o.only_class);
      for (const auto& s : cmd_sample(model, config, manifest, parse_set_format(o.format), only)) {
        out << s.label << " " << s.size() << " samples\n";
      }
    } else if (command == "eval") {
      const auto r = cmd_eval(require_model(o), config, manifest);
      out << "normalization " << fmt(r.norm_constant) << "\n";
      for (const auto& c : r.classes) {
        out << c.label << " train " << fmt(c.train_loss) << " test " << fmt(c.test_loss) << "\n";
      }
      out << "mean train " << fmt(r.train_loss) << " test " << fmt(r.test_loss) << "\n";
    } else if (command == "ablate") {
      for (const auto& r : cmd_ablate(config, manifest)) {
        out << r.axis << "=" << r.value << " " << (r.status == "ok" ? fmt(r.test_loss_mean) : r.status) << "\n";
      }
    } else if (command == "sweep-mu") {
      out << cmd_sweep_mu(require_model(o), config, manifest).size() << " grid points\n";
    } else if (command == "benchmark") {
      const auto r = cmd_benchmark(config, manifest);
      out << "conditioned test_loss " << fmt(r.conditioned.test_loss) << "\n";
      out << "unconditioned test_loss " << fmt(r.unconditioned.test_loss) << "\n";
    } else if (command == "compare-conditioning") {
      std::vector<ConditioningMode> modes;
      for (const auto& m : o.modes) modes.push_back(parse_conditioning_mode(m));
      for (const auto& r : cmd_compare_conditioning(config, manifest, modes)) {
        out << to_string(r.mode) << " " << r.status;
        if (r.status == "ok" || r.status == "expected-degenerate") out << " test " << fmt(r.test_loss);
        out << "\n";
      }
    }
    manifest.write(elapsed());
    return 0;
  } catch (const InvalidArgument& e) {
    return fail("config error", e.what(), 2);
  } catch (const DegenerateError& e) {
    return fail("numeric abort", e.what(), 3);
  } catch (const InvariantViolation& e) {
    return fail("numeric abort", e.what(), 3);
  } catch (const IoError& e) {
    return fail("i/o error", e.what(), 4);
  } catch (const fs::filesystem_error& e) {
    return fail("i/o error", e.what(), 4);
  }
}

}  // namespace cqdd
