#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cqdd/rng.hpp"

namespace cqdd {

using Amplitude = std::complex<double>;

enum class Pauli { X, Y, Z };

// Norm drift allowed after any public operation.
inline constexpr double kNormTolerance = 1e-10;
// Branch / projection weights below this are treated as zero.
inline constexpr double kDegenerateCutoff = 1e-12;

// Dense pure state over q qubits.
//
// Basis convention: qubit 0 is the most significant bit of the amplitude
// index, so |q0 q1 ... q_{n-1}> lives at index sum_k bit_k * 2^(n-1-k).
// Registers appended later (ancillas) occupy the trailing, least
// significant positions.
class StateVector {
 public:
  StateVector() = default;
  // |0...0> on num_qubits qubits.
  explicit StateVector(int num_qubits);

  static StateVector basis_state(int num_qubits, std::uint64_t index);
  // Takes ownership of amplitudes; the length must be a power of two.
  // Without `normalize`, the input must already be unit-norm.
  static StateVector from_amplitudes(std::vector<Amplitude> amplitudes, bool normalize = false);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }
  double norm_squared() const;

  // In-place gates. These are the hot path of training; the free functions
  // below are value-returning wrappers.
  void rotate(Pauli axis, double angle, int qubit);
  void rzz(double angle, int p, int q);
  void cz(int p, int q);
  void multiply_phase(double gamma);

  // Index mask of `qubit` under the MSB-first convention.
  std::uint64_t mask(int qubit) const { return std::uint64_t{1} << (num_qubits_ - 1 - qubit); }

  bool operator==(const StateVector&) const = default;

 private:
  void check_qubit(int qubit) const;

  int num_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

// Normalized complex standard Gaussian vector, i.e. a Haar-random state.
StateVector haar_random(int num_qubits, Rng& rng);

// e^{-i angle P/2} on `qubit`.
StateVector apply_rotation(const StateVector& state, Pauli axis, double angle, int qubit);
// e^{-i angle Z_p Z_q / 2}.
StateVector apply_rzz(const StateVector& state, double angle, int p, int q);
// diag(1,1,1,-1) on (p,q).
StateVector apply_cz(const StateVector& state, int p, int q);

Amplitude inner_product(const StateVector& a, const StateVector& b);
// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

// Tensor product a (x) b; b takes the trailing qubit positions.
StateVector tensor(const StateVector& a, const StateVector& b);

enum class ConditioningMode { rx, ry, rz, basis };

// Ancilla preparation for one class.
struct Conditioning {
  ConditioningMode mode = ConditioningMode::rx;
  double mu = 0.0;
  std::uint64_t basis_index = 0;  // only read in basis mode
};

// The n_a-qubit ancilla register prepared for `cond`.
StateVector conditioned_ancilla_register(int n_a, const Conditioning& cond);

// state (x) ancilla register of n_a qubits. With n_a == 0 the input is
// returned unchanged.
StateVector append_conditioned_ancilla(const StateVector& state, int n_a,
                                       const Conditioning& cond);

struct MeasurementRecord {
  std::string outcome;  // n_a characters, ancilla qubit order
  double probability = 0.0;
};

struct MeasuredState {
  StateVector system;
  MeasurementRecord record;
};

enum class MeasureMode { born, postselect_zero, exact_branches };

// Born probabilities of the 2^n_a ancilla outcomes (trailing qubits).
std::vector<double> ancilla_probabilities(const StateVector& state, int n_a);

// Samples an outcome by inverse CDF of a pre-drawn uniform u in [0,1).
// Used where paired evaluations must share measurement randomness.
MeasuredState measure_born(const StateVector& state, int n_a, double u);
MeasuredState measure_born(const StateVector& state, int n_a, Rng& rng);
MeasuredState postselect_zero(const StateVector& state, int n_a);
// Every outcome with nonzero probability; weights sum to 1.
std::vector<MeasuredState> exact_branches(const StateVector& state, int n_a);

// Dispatches on `mode`; born consumes one uniform from rng.
std::vector<MeasuredState> measure_discard_ancilla(const StateVector& state, int n_a,
                                                   MeasureMode mode, Rng& rng);

// <psi|P|psi> for a Pauli string given as qubit -> operator. Empty string
// is the identity.
double pauli_expectation(const StateVector& state, const std::map<int, Pauli>& pauli_string);

struct BlochPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double weight = 0.0;
  bool defined = false;  // false when weight <= kDegenerateCutoff
};

// Bloch coordinates of the state restricted to span{|a>,|b>}, renormalized.
BlochPoint bloch_projection(const StateVector& state, std::uint64_t basis_a, std::uint64_t basis_b);

// Single-qubit Bloch vector of a one-qubit state.
BlochPoint bloch_vector(const StateVector& state);

std::string to_string(Pauli p);
std::string to_string(ConditioningMode m);
std::string to_string(MeasureMode m);
ConditioningMode parse_conditioning_mode(const std::string& s);
MeasureMode parse_measure_mode(const std::string& s);

}  // namespace cqdd
