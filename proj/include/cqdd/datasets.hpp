#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqdd/state_set.hpp"

namespace cqdd {

enum class Family {
  planar_ring,
  equator_ring,
  polar_point,
  bell,
  ghz_phase,
  w_phase,
  product_phase,
  ghz_string,
  tlfim,
};

std::string to_string(Family f);
Family parse_family(const std::string& s);

// One target class. Which fields are read depends on the family:
//   planar_ring   plane in {X,Y,Z}
//   equator_ring  alpha in (0, pi)
//   polar_point   direction in {+Z,-Z,+X,-X,+Y,-Y}, epsilon
//   bell          kind in {Phi,Psi}
//   product_phase n
//   ghz_string    bits (e.g. "0011")
//   tlfim         n, h, g_mean, g_std
struct ClassSpec {
  Family family = Family::planar_ring;
  std::string label;
  std::size_t N = 1;
  std::string plane = "X";
  double alpha = 0.0;
  std::string direction = "+Z";
  double epsilon = 0.08;
  std::string kind = "Phi";
  int n = 1;
  std::string bits;
  double h = 0.25;
  double g_mean = 0.5;
  double g_std = 0.1;

  bool operator==(const ClassSpec&) const = default;
};

// Qubit count of states produced for `spec`.
int qubit_count(const ClassSpec& spec);
void validate(const ClassSpec& spec);

// Draws spec.N states; sample i uses the stream keyed (seed, data, class_index, i).
StateSet generate_class(const ClassSpec& spec, std::uint64_t seed, std::uint64_t class_index);

// Single-sample constructors at a given phase phi (exposed for tests and
// for the Bloch-ring analysis).
StateVector planar_ring_state(const std::string& plane, double phi);
StateVector equator_ring_state(double alpha, double phi);
StateVector bell_state(const std::string& kind, double phi);
StateVector ghz3_state(double phi);
StateVector w3_state(double phi);
StateVector product_phase_state(int n, double phi);
StateVector ghz_string_state(const std::string& bits, double phi);

// Pole state and its orthogonal partner for a polar-point class.
std::pair<StateVector, StateVector> polar_pair(const std::string& direction);
StateVector polar_cluster_state(const std::string& direction, double epsilon, Rng& rng);

StateSet planar_ring(const std::string& plane, std::size_t N, Rng& rng);
StateSet equator_ring(double alpha, std::size_t N, Rng& rng);
StateSet polar_cluster(const std::string& direction, double epsilon, std::size_t N, Rng& rng);
StateSet bell_class(const std::string& kind, std::size_t N, Rng& rng);
StateSet ghz_w_class(const std::string& kind, std::size_t N, Rng& rng);
StateSet product_phase_class(int n, std::size_t N, Rng& rng);
StateSet ghz_string_class(const std::string& bits, std::size_t N, Rng& rng);

// alpha_j = j pi / (C + 1), j = 1..C.
std::vector<double> equator_ring_angles(int num_classes);
// Class order matching conditioning angles j pi / 3.
const std::vector<std::string>& polar_directions();
// The eight 4-bit strings used for the GHZ-string classes.
const std::vector<std::string>& ghz_string_bitstrings();

// Transverse-longitudinal field Ising model on a ring:
//   H = -sum Z_i Z_{i+1} - g sum X_i - h sum Z_i,  Z_{n+1} = Z_1.
// H is real symmetric in the computational basis.
struct Hamiltonian {
  int n = 0;
  double g = 0.0;
  double h = 0.0;
  Eigen::MatrixXd matrix;
};

Hamiltonian tlfim_hamiltonian(int n, double g, double h);

struct GroundState {
  StateVector state;
  double energy = 0.0;
  double gap = 0.0;
  double residual = 0.0;  // ||H v - E v||
};

// Exact dense diagonalization. Throws DegenerateError when the lowest gap
// is below 1e-10.
GroundState tlfim_ground(int n, double g, double h);

// N ground states with g ~ Normal(g_mean, g_std), redrawn while g <= 0.
StateSet tlfim_class(int n, double h, double g_mean, double g_std, std::size_t N, Rng& rng);

}  // namespace cqdd
