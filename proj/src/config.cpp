#include "cqdd/config.hpp"

#include <set>

#include "cqdd/errors.hpp"
#include "cqdd/io.hpp"

namespace cqdd {

namespace {

ClassSpec ring(const std::string& plane, std::size_t N) {
  ClassSpec c;
  c.family = Family::planar_ring;
  c.plane = plane;
  c.label = "S_" + plane;
  c.N = N;
  return c;
}

ExperimentConfig base(int n, int n_a, int L, int T, ScheduleConfig schedule, Metric metric) {
  ExperimentConfig c;
  c.spec = AnsatzSpec{n, n_a, L, ConditioningMode::rx};
  c.T = T;
  c.schedule = std::move(schedule);
  c.metric = metric;
  c.seed = 1;
  return c;
}

json class_to_json(const ClassSpec& c) {
  json j = {{"family", to_string(c.family)}, {"label", c.label}, {"N", c.N}};
  switch (c.family) {
    case Family::planar_ring:
      j["plane"] = c.plane;
      break;
    case Family::equator_ring:
      j["alpha"] = c.alpha;
      break;
    case Family::polar_point:
      j["direction"] = c.direction;
      j["epsilon"] = c.epsilon;
      break;
    case Family::bell:
      j["kind"] = c.kind;
      break;
    case Family::ghz_phase:
    case Family::w_phase:
      break;
    case Family::product_phase:
      j["n"] = c.n;
      break;
    case Family::ghz_string:
      j["bits"] = c.bits;
      break;
    case Family::tlfim:
      j["n"] = c.n;
      j["h"] = c.h;
      j["g_mean"] = c.g_mean;
      j["g_std"] = c.g_std;
      break;
  }
  return j;
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ClassSpec class_from_json(const json& j) {
  ClassSpec c;
  c.family = parse_family(j.at("family").get<std::string>());
  read_if(j, "label", c.label);
  read_if(j, "N", c.N);
  read_if(j, "plane", c.plane);
  read_if(j, "alpha", c.alpha);
  read_if(j, "direction", c.direction);
  read_if(j, "epsilon", c.epsilon);
  read_if(j, "kind", c.kind);
  read_if(j, "n", c.n);
  read_if(j, "bits", c.bits);
  read_if(j, "h", c.h);
  read_if(j, "g_mean", c.g_mean);
  read_if(j, "g_std", c.g_std);
  if (c.family == Family::ghz_string && !j.contains("n")) c.n = static_cast<int>(c.bits.size());
  if (c.label.empty()) throw InvalidArgument("every class needs a label");
  return c;
}

json trainer_to_json(const TrainerConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"iterations_per_step", t.iterations_per_step},
          {"estimator", to_string(t.estimator)},
          {"spsa_c", t.spsa_c},
          {"spsa_gamma", t.spsa_gamma},
          {"fd_step", t.fd_step},
          {"loss_measure", to_string(t.loss_measure)},
          {"adam", {{"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"epsilon", t.adam.epsilon}}}};
}

void trainer_from_json(const json& j, TrainerConfig& t) {
  read_if(j, "learning_rate", t.learning_rate);
  read_if(j, "iterations_per_step", t.iterations_per_step);
  if (j.contains("estimator")) t.estimator = parse_grad_estimator(j.at("estimator").get<std::string>());
  read_if(j, "spsa_c", t.spsa_c);
  read_if(j, "spsa_gamma", t.spsa_gamma);
  read_if(j, "fd_step", t.fd_step);
  if (j.contains("loss_measure")) t.loss_measure = parse_measure_mode(j.at("loss_measure").get<std::string>());
  if (j.contains("adam")) {
    const auto& a = j.at("adam");
    read_if(a, "beta1", t.adam.beta1);
    read_if(a, "beta2", t.adam.beta2);
    read_if(a, "epsilon", t.adam.epsilon);
  }
}

}  // namespace

std::vector<std::string> ExperimentConfig::labels() const {
  std::vector<std::string> out;
  for (const auto& c : classes) out.push_back(c.label);
  return out;
}

void validate(const ExperimentConfig& config) {
  if (config.classes.empty()) throw InvalidArgument("config needs at least one class");
  std::set<std::string> seen;
  for (const auto& c : config.classes) {
    validate(c);
    if (!seen.insert(c.label).second) throw InvalidArgument("duplicate class label '" + c.label + "'");
    if (qubit_count(c) != config.spec.n) {
      throw InvalidArgument("class '" + c.label + "' has " + std::to_string(qubit_count(c)) +
                            " qubits but ansatz.n is " + std::to_string(config.spec.n));
    }
  }
  validate(config.spec);
  if (config.T < 1) throw InvalidArgument("T must be >= 1");
  config.make_noise_schedule();
  validate(config.trainer);
  if (config.sweep_points < 1) throw InvalidArgument("sweep_points must be >= 1");
  if (config.ablation.test_subsets < 1 || config.ablation.test_subset_size < 1) {
    throw InvalidArgument("ablation test partition must be nonempty");
  }
  // Catches basis-mode capacity problems before any work starts.
  make_class_conditions(config.labels(), config.spec);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"planar-rings", "polar-points", "entanglement",
                                              "many-body",    "rings-union",  "rings-small"};
  return names;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "planar-rings") {
    c = base(1, 2, 15, 20, {ScheduleKind::power, {0.005, 2}}, Metric::wass);
    for (const char* p : {"X", "Y", "Z"}) c.classes.push_back(ring(p, 1000));
  } else if (name == "polar-points") {
    c = base(1, 2, 12, 20, {ScheduleKind::linear, {0.15}}, Metric::mmd);
    for (const auto& d : polar_directions()) {
      ClassSpec cs;
      cs.family = Family::polar_point;
      cs.direction = d;
      cs.epsilon = 0.08;
      cs.label = d;
      cs.N = 500;
      c.classes.push_back(cs);
    }
  } else if (name == "entanglement") {
    c = base(2, 2, 12, 20, {ScheduleKind::power, {0.01, 2}}, Metric::wass);
    for (const char* k : {"Phi", "Psi"}) {
      ClassSpec cs;
      cs.family = Family::bell;
      cs.kind = k;
      cs.label = k;
      cs.N = 125;
      c.classes.push_back(cs);
    }
  } else if (name == "many-body") {
    c = base(4, 2, 12, 30, {ScheduleKind::linspace, {0.1, 2.0}}, Metric::mmd);
    for (double h : {0.25, -0.25}) {
      ClassSpec cs;
      cs.family = Family::tlfim;
      cs.n = 4;
      cs.h = h;
      cs.g_mean = 0.5;
      cs.g_std = 0.1;
      cs.label = h > 0 ? "S_+" : "S_-";
      cs.N = 100;
      c.classes.push_back(cs);
    }
  } else if (name == "rings-union") {
    c = base(1, 2, 12, 20, {ScheduleKind::power, {0.005, 2}}, Metric::wass);
    for (const char* p : {"X", "Y"}) c.classes.push_back(ring(p, 125));
  } else if (name == "rings-small") {
    // Same endpoint delta_T = 2 as planar-rings over half the steps.
    c = base(1, 2, 8, 10, {ScheduleKind::power, {0.02, 2}}, Metric::wass);
    for (const char* p : {"X", "Y", "Z"}) c.classes.push_back(ring(p, 200));
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown preset '" + name + "' (known: " + known + ")");
  }
  c.preset = name;
  c.trainer.seed = c.seed;
  c.samples = c.classes.front().N;
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    if (j.contains("classes")) {
      c.classes.clear();
      for (const auto& cj : j.at("classes")) c.classes.push_back(class_from_json(cj));
    }
    if (j.contains("N")) {
      const auto N = j.at("N").get<std::size_t>();
      for (auto& cs : c.classes) cs.N = N;
      if (!j.contains("samples")) c.samples = N;
    }
    if (j.contains("ansatz")) {
      const auto& a = j.at("ansatz");
      read_if(a, "n", c.spec.n);
      read_if(a, "n_a", c.spec.n_a);
      read_if(a, "L", c.spec.L);
      if (a.contains("conditioning")) {
        c.spec.conditioning = parse_conditioning_mode(a.at("conditioning").get<std::string>());
      }
    }
    read_if(j, "T", c.T);
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      c.schedule.kind = parse_schedule_kind(s.at("kind").get<std::string>());
      c.schedule.params = s.at("params").get<std::vector<double>>();
    }
    if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
    if (j.contains("trainer")) trainer_from_json(j.at("trainer"), c.trainer);
    if (!j.contains("seed") && !j.contains("preset")) throw InvalidArgument("config must set a seed");
    read_if(j, "seed", c.seed);
    read_if(j, "samples", c.samples);
    if (c.samples == 0 && !c.classes.empty()) c.samples = c.classes.front().N;
    read_if(j, "sweep_points", c.sweep_points);
    if (j.contains("ablation")) {
      const auto& a = j.at("ablation");
      read_if(a, "axis", c.ablation.axis);
      read_if(a, "values", c.ablation.values);
      read_if(a, "product", c.ablation.product);
      read_if(a, "class_family", c.ablation.class_family);
      read_if(a, "test_subsets", c.ablation.test_subsets);
      read_if(a, "test_subset_size", c.ablation.test_subset_size);
    }
    c.trainer.seed = c.seed;
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json classes = json::array();
  for (const auto& cs : c.classes) classes.push_back(class_to_json(cs));
  return {{"preset", c.preset},
          {"classes", classes},
          {"ansatz",
           {{"n", c.spec.n}, {"n_a", c.spec.n_a}, {"L", c.spec.L}, {"conditioning", to_string(c.spec.conditioning)}}},
          {"T", c.T},
          {"schedule", {{"kind", to_string(c.schedule.kind)}, {"params", c.schedule.params}}},
          {"metric", to_string(c.metric)},
          {"trainer", trainer_to_json(c.trainer)},
          {"seed", c.seed},
          {"samples", c.samples},
          {"sweep_points", c.sweep_points},
          {"ablation",
           {{"axis", c.ablation.axis},
            {"values", c.ablation.values},
            {"product", c.ablation.product},
            {"class_family", c.ablation.class_family},
            {"test_subsets", c.ablation.test_subsets},
            {"test_subset_size", c.ablation.test_subset_size}}}};
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::vector<StateSet> make_targets(const ExperimentConfig& config) {
  std::vector<StateSet> out;
  for (std::size_t j = 0; j < config.classes.size(); ++j) {
    out.push_back(generate_class(config.classes[j], config.seed, j));
  }
  return out;
}

}  // namespace cqdd
