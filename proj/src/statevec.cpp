#include "cqdd/statevec.hpp"

#include <cmath>
#include <bit>
#include <sstream>

#include "cqdd/errors.hpp"

namespace cqdd {
namespace {

constexpr int kMaxQubits = 24;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

std::string outcome_bits(std::uint64_t b, int n_a) {
  std::string s(static_cast<std::size_t>(n_a), '0');
  for (int k = 0; k < n_a; ++k) {
    if ((b >> (n_a - 1 - k)) & 1U) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

void check_measurable(const StateVector& state, int n_a) {
  require(n_a >= 1, "measurement needs at least one ancilla qubit");
  require(state.num_qubits() > n_a, "measurement must leave at least one system qubit");
}

MeasuredState project(const StateVector& state, int n_a, std::uint64_t outcome, double p) {
  const std::size_t anc_dim = std::size_t{1} << n_a;
  const std::size_t sys_dim = state.dim() / anc_dim;
  std::vector<Amplitude> out(sys_dim);
  const double scale = 1.0 / std::sqrt(p);
  const auto amps = state.amplitudes();
  for (std::size_t s = 0; s < sys_dim; ++s) out[s] = amps[s * anc_dim + outcome] * scale;
  return {StateVector::from_amplitudes(std::move(out), true),
          {outcome_bits(outcome, n_a), p}};
}

}  // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  require(num_qubits >= 1 && num_qubits <= kMaxQubits, "qubit count out of range");
  amps_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::basis_state(int num_qubits, std::uint64_t index) {
  StateVector s(num_qubits);
  require(index < s.dim(), "basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes, bool normalize) {
  const std::size_t n = amplitudes.size();
  require(n >= 2 && (n & (n - 1)) == 0, "amplitude count must be a power of two >= 2");
  StateVector s;
  s.num_qubits_ = std::countr_zero(n);
  s.amps_ = std::move(amplitudes);
  const double norm2 = s.norm_squared();
  if (normalize) {
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw DegenerateError("cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : s.amps_) a *= inv;
  } else if (std::abs(norm2 - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "amplitudes are not unit-norm (norm^2 = " << norm2 << ")";
    throw InvalidArgument(os.str());
  }
  return s;
}

double StateVector::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= num_qubits_) {
    throw InvalidArgument("qubit index " + std::to_string(qubit) + " out of range for " +
                          std::to_string(num_qubits_) + " qubits");
  }
}

void StateVector::rotate(Pauli axis, double angle, int qubit) {
  check_qubit(qubit);
  const std::size_t m = mask(qubit);
  const std::size_t n = amps_.size();
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  Amplitude* v = amps_.data();
  switch (axis) {
    case Pauli::X:
      // [[c, -is], [-is, c]]
      for (std::size_t hi = 0; hi < n; hi += 2 * m) {
        for (std::size_t i = hi; i < hi + m; ++i) {
          const Amplitude a = v[i];
          const Amplitude b = v[i + m];
          v[i] = {c * a.real() + s * b.imag(), c * a.imag() - s * b.real()};
          v[i + m] = {c * b.real() + s * a.imag(), c * b.imag() - s * a.real()};
        }
      }
      break;
    case Pauli::Y:
      // [[c, -s], [s, c]]
      for (std::size_t hi = 0; hi < n; hi += 2 * m) {
        for (std::size_t i = hi; i < hi + m; ++i) {
          const Amplitude a = v[i];
          const Amplitude b = v[i + m];
          v[i] = c * a - s * b;
          v[i + m] = s * a + c * b;
        }
      }
      break;
    case Pauli::Z: {
      const Amplitude p0{c, -s};
      const Amplitude p1{c, s};
      for (std::size_t hi = 0; hi < n; hi += 2 * m) {
        for (std::size_t i = hi; i < hi + m; ++i) {
          v[i] *= p0;
          v[i + m] *= p1;
        }
      }
      break;
    }
  }
}

void StateVector::rzz(double angle, int p, int q) {
  check_qubit(p);
  check_qubit(q);
  require(p != q, "rzz needs two distinct qubits");
  const std::uint64_t mp = mask(p);
  const std::uint64_t mq = mask(q);
  const Amplitude even{std::cos(0.5 * angle), -std::sin(0.5 * angle)};
  const Amplitude odd = std::conj(even);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const bool parity = ((i & mp) != 0) != ((i & mq) != 0);
    amps_[i] *= parity ? odd : even;
  }
}

void StateVector::cz(int p, int q) {
  check_qubit(p);
  check_qubit(q);
  require(p != q, "cz needs two distinct qubits");
  const std::uint64_t both = mask(p) | mask(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & both) == both) amps_[i] = -amps_[i];
  }
}

void StateVector::multiply_phase(double gamma) {
  const Amplitude ph = std::polar(1.0, gamma);
  for (auto& a : amps_) a *= ph;
}

StateVector haar_random(int num_qubits, Rng& rng) {
  require(num_qubits >= 1, "haar_random needs at least one qubit");
  std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
  for (auto& a : amps) {
    const double re = rng.normal();
    const double im = rng.normal();
    a = {re, im};
  }
  return StateVector::from_amplitudes(std::move(amps), true);
}

StateVector apply_rotation(const StateVector& state, Pauli axis, double angle, int qubit) {
  StateVector out = state;
  out.rotate(axis, angle, qubit);
  return out;
}

StateVector apply_rzz(const StateVector& state, double angle, int p, int q) {
  StateVector out = state;
  out.rzz(angle, p, q);
  return out;
}

StateVector apply_cz(const StateVector& state, int p, int q) {
  StateVector out = state;
  out.cz(p, q);
  return out;
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  require(a.dim() == b.dim(), "inner product of states with different qubit counts");
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // conj(x) * y
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double fidelity(const StateVector& a, const StateVector& b) {
  const double f = std::norm(inner_product(a, b));
  return f > 1.0 ? 1.0 : f;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<Amplitude> out(a.dim() * b.dim());
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out[i * y.size() + j] = x[i] * y[j];
  }
  return StateVector::from_amplitudes(std::move(out), true);
}

StateVector conditioned_ancilla_register(int n_a, const Conditioning& cond) {
  require(n_a >= 1, "ancilla register needs at least one qubit");
  if (cond.mode == ConditioningMode::basis) {
    require(cond.basis_index < (std::uint64_t{1} << n_a),
            "basis conditioning index does not fit the ancilla register");
    return StateVector::basis_state(n_a, cond.basis_index);
  }
  const Pauli axis = cond.mode == ConditioningMode::rx   ? Pauli::X
                     : cond.mode == ConditioningMode::ry ? Pauli::Y
                                                         : Pauli::Z;
  StateVector reg(n_a);
  for (int q = 0; q < n_a; ++q) reg.rotate(axis, cond.mu, q);
  return reg;
}

StateVector append_conditioned_ancilla(const StateVector& state, int n_a,
                                       const Conditioning& cond) {
  require(n_a >= 0, "negative ancilla count");
  if (n_a == 0) return state;
  return tensor(state, conditioned_ancilla_register(n_a, cond));
}

std::vector<double> ancilla_probabilities(const StateVector& state, int n_a) {
  check_measurable(state, n_a);
  const std::size_t anc_dim = std::size_t{1} << n_a;
  std::vector<double> p(anc_dim, 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) p[i & (anc_dim - 1)] += std::norm(amps[i]);
  return p;
}

MeasuredState measure_born(const StateVector& state, int n_a, double u) {
  check_measurable(state, n_a);
  require(u >= 0.0 && u < 1.0, "Born uniform must lie in [0, 1)");
  const double norm2 = state.norm_squared();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    throw InvariantViolation("Born sampling on a non-normalized state");
  }
  const auto p = ancilla_probabilities(state, n_a);
  double cumulative = 0.0;
  std::uint64_t chosen = p.size();
  std::uint64_t last_nonzero = 0;
  for (std::uint64_t b = 0; b < p.size(); ++b) {
    if (p[b] <= kDegenerateCutoff) continue;
    last_nonzero = b;
    cumulative += p[b];
    if (u < cumulative) {
      chosen = b;
      break;
    }
  }
  // Rounding can leave u just above the final cumulative sum.
  if (chosen == p.size()) chosen = last_nonzero;
  return project(state, n_a, chosen, p[chosen]);
}

MeasuredState measure_born(const StateVector& state, int n_a, Rng& rng) {
  return measure_born(state, n_a, rng.uniform());
}

MeasuredState postselect_zero(const StateVector& state, int n_a) {
  const auto p = ancilla_probabilities(state, n_a);
  if (p[0] < kDegenerateCutoff) {
    std::ostringstream os;
    os << "postselection onto all-zeros ancilla has probability " << p[0];
    throw DegenerateError(os.str());
  }
  return project(state, n_a, 0, p[0]);
}

std::vector<MeasuredState> exact_branches(const StateVector& state, int n_a) {
  const auto p = ancilla_probabilities(state, n_a);
  std::vector<MeasuredState> out;
  double total = 0.0;
  for (double x : p) total += x;
  for (std::uint64_t b = 0; b < p.size(); ++b) {
    if (p[b] <= kDegenerateCutoff) continue;
    auto branch = project(state, n_a, b, p[b]);
    branch.record.probability = p[b] / total;
    out.push_back(std::move(branch));
  }
  return out;
}

std::vector<MeasuredState> measure_discard_ancilla(const StateVector& state, int n_a,
                                                   MeasureMode mode, Rng& rng) {
  switch (mode) {
    case MeasureMode::born:
      return {measure_born(state, n_a, rng)};
    case MeasureMode::postselect_zero:
      return {postselect_zero(state, n_a)};
    case MeasureMode::exact_branches:
      return exact_branches(state, n_a);
  }
  throw InvalidArgument("unknown measurement mode");
}

double pauli_expectation(const StateVector& state, const std::map<int, Pauli>& pauli_string) {
  if (pauli_string.empty()) return 1.0;
  std::vector<Amplitude> v(state.amplitudes().begin(), state.amplitudes().end());
  for (const auto& [qubit, op] : pauli_string) {
    require(qubit >= 0 && qubit < state.num_qubits(), "Pauli string qubit out of range");
    const std::size_t m = state.mask(qubit);
    for (std::size_t hi = 0; hi < v.size(); hi += 2 * m) {
      for (std::size_t i = hi; i < hi + m; ++i) {
        switch (op) {
          case Pauli::X:
            std::swap(v[i], v[i + m]);
            break;
          case Pauli::Y: {
            const Amplitude a = v[i];
            v[i] = Amplitude{0.0, -1.0} * v[i + m];
            v[i + m] = Amplitude{0.0, 1.0} * a;
            break;
          }
          case Pauli::Z:
            v[i + m] = -v[i + m];
            break;
        }
      }
    }
  }
  const auto x = state.amplitudes();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += (std::conj(x[i]) * v[i]).real();
  return acc;
}

BlochPoint bloch_projection(const StateVector& state, std::uint64_t basis_a,
                            std::uint64_t basis_b) {
  require(basis_a != basis_b, "projection needs two distinct basis states");
  require(basis_a < state.dim() && basis_b < state.dim(), "projection basis index out of range");
  const Amplitude a = state[basis_a];
  const Amplitude b = state[basis_b];
  BlochPoint pt;
  pt.weight = std::norm(a) + std::norm(b);
  if (pt.weight <= kDegenerateCutoff) return pt;
  const Amplitude ab = std::conj(a) * b;
  pt.x = 2.0 * ab.real() / pt.weight;
  pt.y = 2.0 * ab.imag() / pt.weight;
  pt.z = (std::norm(a) - std::norm(b)) / pt.weight;
  pt.defined = true;
  return pt;
}

BlochPoint bloch_vector(const StateVector& state) {
  require(state.num_qubits() == 1, "bloch_vector takes a single-qubit state");
  return bloch_projection(state, 0, 1);
}

std::string to_string(Pauli p) {
  switch (p) {
    case Pauli::X:
      return "X";
    case Pauli::Y:
      return "Y";
    case Pauli::Z:
      return "Z";
  }
  return "?";
}

std::string to_string(ConditioningMode m) {
  switch (m) {
    case ConditioningMode::rx:
      return "rx";
    case ConditioningMode::ry:
      return "ry";
    case ConditioningMode::rz:
      return "rz";
    case ConditioningMode::basis:
      return "basis";
  }
  return "?";
}

std::string to_string(MeasureMode m) {
  switch (m) {
    case MeasureMode::born:
      return "born";
    case MeasureMode::postselect_zero:
      return "postselect_zero";
    case MeasureMode::exact_branches:
      return "exact_branches";
  }
  return "?";
}

ConditioningMode parse_conditioning_mode(const std::string& s) {
  if (s == "rx") return ConditioningMode::rx;
  if (s == "ry") return ConditioningMode::ry;
  if (s == "rz") return ConditioningMode::rz;
  if (s == "basis") return ConditioningMode::basis;
  throw InvalidArgument("unknown conditioning mode '" + s + "'");
}

MeasureMode parse_measure_mode(const std::string& s) {
  if (s == "born" || s == "sample") return MeasureMode::born;
  if (s == "postselect_zero") return MeasureMode::postselect_zero;
  if (s == "exact_branches") return MeasureMode::exact_branches;
  throw InvalidArgument("unknown measurement mode '" + s + "'");
}

}  // namespace cqdd
