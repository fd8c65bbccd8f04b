#include "cqdd/datasets.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqdd/errors.hpp"
#include "cqdd/parallel.hpp"

namespace cqdd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Amplitude kI{0.0, 1.0};

StateVector make(std::vector<Amplitude> amps) {
  return StateVector::from_amplitudes(std::move(amps), true);
}

std::uint64_t parse_bits(const std::string& bits) {
  if (bits.empty()) throw InvalidArgument("bitstring must be nonempty");
  std::uint64_t x = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidArgument("bitstring '" + bits + "' has non-binary characters");
    x = (x << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return x;
}

StateVector sample_one(const ClassSpec& spec, Rng& rng) {
  switch (spec.family) {
    case Family::planar_ring:
      return planar_ring_state(spec.plane, rng.uniform(0.0, kTwoPi));
    case Family::equator_ring:
      return equator_ring_state(spec.alpha, rng.uniform(0.0, kTwoPi));
    case Family::polar_point:
      return polar_cluster_state(spec.direction, spec.epsilon, rng);
    case Family::bell:
      return bell_state(spec.kind, rng.uniform(0.0, kTwoPi));
    case Family::ghz_phase:
      return ghz3_state(rng.uniform(0.0, kTwoPi));
    case Family::w_phase:
      return w3_state(rng.uniform(0.0, kTwoPi));
    case Family::product_phase:
      return product_phase_state(spec.n, rng.uniform(0.0, kTwoPi));
    case Family::ghz_string:
      return ghz_string_state(spec.bits, rng.uniform(0.0, kTwoPi));
    case Family::tlfim: {
      double g = 0.0;
      do {
        g = rng.normal(spec.g_mean, spec.g_std);
      } while (g <= 0.0);
      return tlfim_ground(spec.n, g, spec.h).state;
    }
  }
  throw InvalidArgument("unknown family");
}

template <class F>
StateSet fill(std::size_t N, const std::string& label, F&& one) {
  StateSet out;
  out.label = label;
  out.states.reserve(N);
  for (std::size_t i = 0; i < N; ++i) out.states.push_back(one());
  return out;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::planar_ring:
      return "planar_ring";
    case Family::equator_ring:
      return "equator_ring";
    case Family::polar_point:
      return "polar_point";
    case Family::bell:
      return "bell";
    case Family::ghz_phase:
      return "ghz_phase";
    case Family::w_phase:
      return "w_phase";
    case Family::product_phase:
      return "product_phase";
    case Family::ghz_string:
      return "ghz_string";
    case Family::tlfim:
      return "tlfim";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::planar_ring, Family::equator_ring, Family::polar_point, Family::bell,
                   Family::ghz_phase, Family::w_phase, Family::product_phase, Family::ghz_string,
                   Family::tlfim}) {
    if (to_string(f) == s) return f;
  }
  throw InvalidArgument("unknown dataset family '" + s + "'");
}

int qubit_count(const ClassSpec& spec) {
  switch (spec.family) {
    case Family::planar_ring:
    case Family::equator_ring:
    case Family::polar_point:
      return 1;
    case Family::bell:
      return 2;
    case Family::ghz_phase:
    case Family::w_phase:
      return 3;
    case Family::product_phase:
    case Family::tlfim:
      return spec.n;
    case Family::ghz_string:
      return static_cast<int>(spec.bits.size());
  }
  return 0;
}

void validate(const ClassSpec& spec) {
  if (spec.N < 1) throw InvalidArgument("class '" + spec.label + "' needs N >= 1");
  switch (spec.family) {
    case Family::planar_ring:
      if (spec.plane != "X" && spec.plane != "Y" && spec.plane != "Z") {
        throw InvalidArgument("planar ring plane must be X, Y or Z");
      }
      break;
    case Family::equator_ring:
      if (!(spec.alpha > 0.0 && spec.alpha < kPi)) {
        throw InvalidArgument("equator ring needs 0 < alpha < pi");
      }
      break;
    case Family::polar_point:
      polar_pair(spec.direction);
      if (!(spec.epsilon >= 0.0)) throw InvalidArgument("polar cluster needs epsilon >= 0");
      break;
    case Family::bell:
      if (spec.kind != "Phi" && spec.kind != "Psi") throw InvalidArgument("bell kind must be Phi or Psi");
      break;
    case Family::ghz_phase:
    case Family::w_phase:
      break;
    case Family::product_phase:
      if (spec.n < 1 || spec.n > 12) throw InvalidArgument("product phase class needs 1 <= n <= 12");
      break;
    case Family::ghz_string:
      parse_bits(spec.bits);
      break;
    case Family::tlfim:
      if (spec.n < 2 || spec.n > 10) throw InvalidArgument("TLFIM class needs 2 <= n <= 10");
      if (!(spec.g_std >= 0.0)) throw InvalidArgument("TLFIM g_std must be >= 0");
      break;
  }
}

StateSet generate_class(const ClassSpec& spec, std::uint64_t seed, std::uint64_t class_index) {
  validate(spec);
  StateSet out;
  out.label = spec.label;
  out.states.resize(spec.N);
  parallel_for(spec.N, [&](std::size_t i) {
    Rng rng(seed, StreamTag::data, {class_index, i});
    out.states[i] = sample_one(spec, rng);
  });
  return out;
}

StateVector planar_ring_state(const std::string& plane, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  if (plane == "X") return make({c, -kI * s});
  if (plane == "Y") return make({c, s});
  if (plane == "Z") return make({1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), -phi)});
  throw InvalidArgument("planar ring plane must be X, Y or Z");
}

StateVector equator_ring_state(double alpha, double phi) {
  return make({std::cos(alpha / 2), std::polar(std::sin(alpha / 2), phi)});
}

StateVector bell_state(const std::string& kind, double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  if (kind == "Phi") return make({r, 0.0, 0.0, std::polar(r, phi)});
  if (kind == "Psi") return make({0.0, r, std::polar(r, phi), 0.0});
  throw InvalidArgument("bell kind must be Phi or Psi");
}

StateVector ghz3_state(double phi) {
  std::vector<Amplitude> a(8, 0.0);
  a[0] = 1.0 / std::sqrt(2.0);
  a[7] = std::polar(1.0 / std::sqrt(2.0), phi);
  return make(std::move(a));
}

StateVector w3_state(double phi) {
  const double r = 1.0 / std::sqrt(3.0);
  std::vector<Amplitude> a(8, 0.0);
  a[1] = r;                    // |001>
  a[2] = r;                    // |010>
  a[4] = std::polar(r, phi);   // |100>
  return make(std::move(a));
}

StateVector product_phase_state(int n, double phi) {
  if (n < 1) throw InvalidArgument("product phase state needs n >= 1");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Amplitude> a(dim);
  const double scale = std::pow(2.0, -0.5 * n);
  for (std::size_t i = 0; i < dim; ++i) {
    a[i] = std::polar(scale, phi * std::popcount(i));
  }
  return make(std::move(a));
}

StateVector ghz_string_state(const std::string& bits, double phi) {
  const std::uint64_t x = parse_bits(bits);
  const int n = static_cast<int>(bits.size());
  const std::uint64_t xbar = ~x & ((std::uint64_t{1} << n) - 1);
  std::vector<Amplitude> a(std::size_t{1} << n, 0.0);
  a[x] = 1.0 / std::sqrt(2.0);
  a[xbar] = std::polar(1.0 / std::sqrt(2.0), phi);
  return make(std::move(a));
}

std::pair<StateVector, StateVector> polar_pair(const std::string& direction) {
  const double r = 1.0 / std::sqrt(2.0);
  const StateVector zero = make({1.0, 0.0});
  const StateVector one = make({0.0, 1.0});
  const StateVector plus = make({r, r});
  const StateVector minus = make({r, -r});
  const StateVector plus_i = make({r, kI * r});
  const StateVector minus_i = make({r, -kI * r});
  if (direction == "+Z") return {zero, one};
  if (direction == "-Z") return {one, zero};
  if (direction == "+X") return {plus, minus};
  if (direction == "-X") return {minus, plus};
  if (direction == "+Y") return {plus_i, minus_i};
  if (direction == "-Y") return {minus_i, plus_i};
  throw InvalidArgument("unknown polar direction '" + direction + "'");
}

StateVector polar_cluster_state(const std::string& direction, double epsilon, Rng& rng) {
  const auto [pole, partner] = polar_pair(direction);
  const double re = rng.normal();
  const double im = rng.normal();
  const Amplitude c = epsilon * Amplitude{re, im};
  return make({pole[0] + c * partner[0], pole[1] + c * partner[1]});
}

StateSet planar_ring(const std::string& plane, std::size_t N, Rng& rng) {
  return fill(N, "ring_" + plane, [&] { return planar_ring_state(plane, rng.uniform(0.0, kTwoPi)); });
}

StateSet equator_ring(double alpha, std::size_t N, Rng& rng) {
  if (!(alpha > 0.0 && alpha < kPi)) throw InvalidArgument("equator ring needs 0 < alpha < pi");
  return fill(N, "equator", [&] { return equator_ring_state(alpha, rng.uniform(0.0, kTwoPi)); });
}

StateSet polar_cluster(const std::string& direction, double epsilon, std::size_t N, Rng& rng) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("polar cluster needs epsilon >= 0");
  polar_pair(direction);
  return fill(N, direction, [&] { return polar_cluster_state(direction, epsilon, rng); });
}

StateSet bell_class(const std::string& kind, std::size_t N, Rng& rng) {
  return fill(N, kind, [&] { return bell_state(kind, rng.uniform(0.0, kTwoPi)); });
}

StateSet ghz_w_class(const std::string& kind, std::size_t N, Rng& rng) {
  if (kind == "GHZ3") return fill(N, kind, [&] { return ghz3_state(rng.uniform(0.0, kTwoPi)); });
  if (kind == "W3") return fill(N, kind, [&] { return w3_state(rng.uniform(0.0, kTwoPi)); });
  throw InvalidArgument("ghz_w_class kind must be GHZ3 or W3");
}

StateSet product_phase_class(int n, std::size_t N, Rng& rng) {
  return fill(N, "product", [&] { return product_phase_state(n, rng.uniform(0.0, kTwoPi)); });
}

StateSet ghz_string_class(const std::string& bits, std::size_t N, Rng& rng) {
  parse_bits(bits);
  return fill(N, bits, [&] { return ghz_string_state(bits, rng.uniform(0.0, kTwoPi)); });
}

std::vector<double> equator_ring_angles(int num_classes) {
  if (num_classes < 1) throw InvalidArgument("need at least one equator ring class");
  std::vector<double> out;
  for (int j = 1; j <= num_classes; ++j) out.push_back(j * kPi / (num_classes + 1));
  return out;
}

const std::vector<std::string>& polar_directions() {
  static const std::vector<std::string> dirs = {"+Z", "+Y", "-Z", "-Y", "+X", "-X"};
  return dirs;
}

const std::vector<std::string>& ghz_string_bitstrings() {
  static const std::vector<std::string> bits = {"0000", "0001", "0010", "0100",
                                                "1000", "0011", "1001", "0101"};
  return bits;
}

Hamiltonian tlfim_hamiltonian(int n, double g, double h) {
  if (n < 2 || n > 12) throw InvalidArgument("TLFIM needs 2 <= n <= 12");
  const std::size_t dim = std::size_t{1} << n;
  Hamiltonian H{n, g, h, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
  const auto z = [n](std::size_t idx, int q) { return ((idx >> (n - 1 - q)) & 1U) ? -1.0 : 1.0; };
  for (std::size_t idx = 0; idx < dim; ++idx) {
    double diag = 0.0;
    for (int q = 0; q < n; ++q) {
      diag -= z(idx, q) * z(idx, (q + 1) % n);
      diag -= h * z(idx, q);
    }
    const auto e = static_cast<Eigen::Index>(idx);
    H.matrix(e, e) = diag;
    for (int q = 0; q < n; ++q) {
      const auto flipped = static_cast<Eigen::Index>(idx ^ (std::size_t{1} << (n - 1 - q)));
      H.matrix(flipped, e) -= g;
    }
  }
  return H;
}

GroundState tlfim_ground(int n, double g, double h) {
  const Hamiltonian H = tlfim_hamiltonian(n, g, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.matrix);
  if (solver.info() != Eigen::Success) throw DegenerateError("TLFIM eigensolver failed");
  const auto& evals = solver.eigenvalues();
  GroundState out;
  out.energy = evals(0);
  out.gap = evals(1) - evals(0);
  if (out.gap < 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate TLFIM ground space at n=" << n << " g=" << g << " h=" << h
       << ": E0=" << evals(0) << " E1=" << evals(1);
    throw DegenerateError(os.str());
  }
  const Eigen::VectorXd v = solver.eigenvectors().col(0);
  out.residual = (H.matrix * v - out.energy * v).norm();
  std::vector<Amplitude> amps(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) amps[static_cast<std::size_t>(i)] = v(i);
  out.state = StateVector::from_amplitudes(std::move(amps), true);
  return out;
}

StateSet tlfim_class(int n, double h, double g_mean, double g_std, std::size_t N, Rng& rng) {
  return fill(N, h >= 0 ? "S+" : "S-", [&] {
    double g = 0.0;
    do {
      g = rng.normal(g_mean, g_std);
    } while (g <= 0.0);
    return tlfim_ground(n, g, h).state;
  });
}

}  // namespace cqdd
