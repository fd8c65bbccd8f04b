#include <gtest/gtest.h>

#include <algorithm>

#include "cqdd/ansatz.hpp"
#include "cqdd/datasets.hpp"
#include "cqdd/errors.hpp"
#include "cqdd/metrics.hpp"
#include "support.hpp"

using namespace cqdd;
using namespace cqdd::testing;

namespace {

double expect_z(const StateVector& s, int q = 0) { return pauli_expectation(s, {{q, Pauli::Z}}); }

// Kolmogorov-Smirnov statistic of angles in (-pi, pi] against the uniform law.
double ks_uniform(std::vector<double> angles) {
  std::sort(angles.begin(), angles.end());
  const double n = static_cast<double>(angles.size());
  double d = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double f = (angles[i] + kPi) / (2 * kPi);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic KS critical value at significance 0.01.
double ks_critical_01(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// Ring angle read back from the Bloch vector in the plane the ring spans.
double ring_angle(const StateVector& s, const std::string& plane) {
  auto b = bloch_vector(s);
  if (plane == "X") return std::atan2(b.y, b.z);
  if (plane == "Y") return std::atan2(b.x, b.z);
  return std::atan2(b.y, b.x);
}

// Cyclic Jacobi eigenvalue sweep on a dense real symmetric matrix. Returns
// eigenvalues and eigenvectors as columns of `vecs`.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& vals,
                  std::vector<std::vector<double>>& vecs) {
  const std::size_t n = a.size();
  vecs.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vecs[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vecs[k][p], vkq = vecs[k][q];
          vecs[k][p] = c * vkp - s * vkq;
          vecs[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  vals.resize(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = a[i][i];
}

// Ising ring Hamiltonian built bit by bit; qubit 0 is the most significant.
std::vector<std::vector<double>> ising_ring(int n, double g, double h) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::vector<double>> H(dim, std::vector<double>(dim, 0.0));
  auto z = [&](std::size_t idx, int q) { return ((idx >> (n - 1 - q)) & 1) ? -1.0 : 1.0; };
  for (std::size_t i = 0; i < dim; ++i) {
    for (int q = 0; q < n; ++q) {
      H[i][i] -= z(i, q) * z(i, (q + 1) % n);
      H[i][i] -= h * z(i, q);
      H[i ^ (std::size_t{1} << (n - 1 - q))][i] -= g;
    }
  }
  return H;
}

}  // namespace

TEST(Rings, PlanarExamples) {
  EXPECT_LT(max_abs_diff(planar_ring_state("X", 0.0), StateVector::basis_state(1, 0)), 1e-15);
  EXPECT_LT(max_abs_diff(planar_ring_state("Z", 0.0), plus_state()), 1e-15);
  // Amplitude forms.
  const double phi = 0.83;
  const Amplitude I(0, 1);
  auto x = planar_ring_state("X", phi);
  EXPECT_LT(std::abs(x[1] + I * std::sin(phi)), 1e-15);
  auto y = planar_ring_state("Y", phi);
  EXPECT_LT(std::abs(y[1] - std::sin(phi)), 1e-15);
  auto z = planar_ring_state("Z", phi);
  EXPECT_LT(std::abs(z[1] - std::polar(1 / std::sqrt(2.0), -phi)), 1e-15);

  Rng rng(1);
  const std::map<std::string, Pauli> normal{{"X", Pauli::X}, {"Y", Pauli::Y}, {"Z", Pauli::Z}};
  for (const auto& [plane, p] : normal) {
    auto set = planar_ring(plane, 200, rng);
    for (const auto& s : set.states) {
      EXPECT_NEAR(pauli_expectation(s, {{0, p}}), 0.0, 1e-10);
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
    }
  }
  EXPECT_THROW(planar_ring("W", 3, rng), InvalidArgument);
}

TEST(Rings, EquatorExamples) {
  EXPECT_LT(max_abs_diff(equator_ring_state(kPi / 2, 0.0), plus_state()), 1e-15);
  auto angles = equator_ring_angles(3);
  ASSERT_EQ(angles.size(), 3u);
  EXPECT_DOUBLE_EQ(angles[0], kPi / 4);
  EXPECT_DOUBLE_EQ(angles[1], kPi / 2);
  EXPECT_DOUBLE_EQ(angles[2], 3 * kPi / 4);
  Rng rng(2);
  for (const auto& s : equator_ring(kPi / 3, 100, rng).states) EXPECT_NEAR(expect_z(s), 0.5, 1e-10);
  EXPECT_THROW(equator_ring(0.0, 3, rng), InvalidArgument);
  EXPECT_THROW(equator_ring(kPi, 3, rng), InvalidArgument);
}

TEST(Rings, PhasesAreUniform) {
  Rng rng(3);
  const std::size_t N = 2000;
  for (std::string plane : {"X", "Y", "Z"}) {
    auto set = planar_ring(plane, N, rng);
    std::vector<double> ang;
    for (const auto& s : set.states) ang.push_back(ring_angle(s, plane));
    EXPECT_LT(ks_uniform(ang), ks_critical_01(N)) << plane;
  }
  auto eq = equator_ring(kPi / 4, N, rng);
  std::vector<double> ang;
  for (const auto& s : eq.states) ang.push_back(ring_angle(s, "Z"));
  EXPECT_LT(ks_uniform(ang), ks_critical_01(N));

  // Bell rings read back through the two-level projection.
  auto bell = bell_class("Psi", N, rng);
  ang.clear();
  for (const auto& s : bell.states) {
    auto b = bloch_projection(s, 1, 2);
    ang.push_back(std::atan2(b.y, b.x));
  }
  EXPECT_LT(ks_uniform(ang), ks_critical_01(N));

  // The KS check is not vacuous: a half-ring fails it.
  std::vector<double> half;
  for (std::size_t i = 0; i < N; ++i) half.push_back(rng.uniform(0.0, kPi));
  EXPECT_GT(ks_uniform(half), ks_critical_01(N));
}

TEST(Polar, ClusterExamples) {
  Rng rng(4);
  for (const auto& s : polar_cluster("+Z", 0.0, 20, rng).states) {
    EXPECT_LT(max_abs_diff(s, StateVector::basis_state(1, 0)), 1e-15);
  }
  // E[1/(1 + eps^2 |c|^2)] with |c|^2 ~ Exp(1/2) evaluated by quadrature.
  const double eps = 0.08;
  double oracle = 0.0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    const double r = (i + 0.5) * 40.0 / steps;
    oracle += 0.5 * std::exp(-r / 2) / (1 + eps * eps * r) * 40.0 / steps;
  }
  auto set = polar_cluster("+Z", eps, 1000, rng);
  const auto zero = StateVector::basis_state(1, 0);
  double mean = 0.0;
  for (const auto& s : set.states) mean += fidelity(s, zero) / 1000.0;
  EXPECT_GE(mean, 0.98);
  EXPECT_NEAR(mean, oracle, 0.002);

  // Every pole sits on its Bloch axis and is orthogonal to its partner.
  const std::map<std::string, BlochPoint> axes{{"+Z", {0, 0, 1}}, {"-Z", {0, 0, -1}}, {"+X", {1, 0, 0}},
                                               {"-X", {-1, 0, 0}}, {"+Y", {0, 1, 0}}, {"-Y", {0, -1, 0}}};
  for (const auto& [dir, axis] : axes) {
    auto [pole, partner] = polar_pair(dir);
    auto b = bloch_vector(pole);
    EXPECT_NEAR(b.x, axis.x, 1e-12);
    EXPECT_NEAR(b.y, axis.y, 1e-12);
    EXPECT_NEAR(b.z, axis.z, 1e-12);
    EXPECT_NEAR(fidelity(pole, partner), 0.0, 1e-15);
  }
  EXPECT_THROW(polar_cluster("+Q", 0.1, 3, rng), InvalidArgument);
  EXPECT_THROW(polar_cluster("+Z", -0.1, 3, rng), InvalidArgument);
}

TEST(Polar, DirectionOrderMatchesConditioningAngles) {
  EXPECT_EQ(polar_directions(), (std::vector<std::string>{"+Z", "+Y", "-Z", "-Y", "+X", "-X"}));
  auto mu = assign_mu(6);
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(3 * mu[j], j * kPi, 1e-14);
}

TEST(Entangled, BellAndGhzFamilies) {
  const double r = 1 / std::sqrt(2.0);
  auto phi = bell_state("Phi", 0.0);
  EXPECT_NEAR(std::abs(phi[0] - r) + std::abs(phi[3] - r), 0.0, 1e-15);
  Rng rng(5);
  for (const auto& s : bell_class("Phi", 50, rng).states) EXPECT_NEAR(meyer_wallach(s), 1.0, 1e-10);
  for (const auto& s : bell_class("Psi", 50, rng).states) EXPECT_NEAR(subspace_overlap(s, {1, 2}), 1.0, 1e-15);
  for (const auto& s : ghz_w_class("GHZ3", 50, rng).states) EXPECT_NEAR(subspace_overlap(s, {0, 7}), 1.0, 1e-15);
  for (const auto& s : ghz_w_class("W3", 50, rng).states) {
    EXPECT_NEAR(subspace_overlap(s, {1, 2, 4}), 1.0, 1e-15);
    EXPECT_NEAR(meyer_wallach(s), 8.0 / 9.0, 1e-10);
  }
  auto w = w3_state(kPi);
  EXPECT_NEAR(std::abs(w[4] + 1 / std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_THROW(bell_class("Chi", 2, rng), InvalidArgument);
}

TEST(Entangled, ProductAndStringFamilies) {
  auto pp = product_phase_state(2, 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(pp[i] - 0.5), 0.0, 1e-15);
  const double phi = 1.1;
  auto p2 = product_phase_state(2, phi);
  const Amplitude e1 = std::polar(0.5, phi), e2 = std::polar(0.5, 2 * phi);
  EXPECT_LT(std::abs(p2[1] - e1) + std::abs(p2[2] - e1) + std::abs(p2[3] - e2), 1e-15);
  Rng rng(6);
  for (const auto& s : product_phase_class(3, 30, rng).states) EXPECT_NEAR(meyer_wallach(s), 0.0, 1e-10);

  auto g = ghz_string_state("0000", 0.0);
  EXPECT_NEAR(std::abs(g[0]) + std::abs(g[15]), std::sqrt(2.0), 1e-15);
  const auto& bits = ghz_string_bitstrings();
  EXPECT_EQ(bits.size(), 8u);
  for (const auto& x : bits) {
    for (const auto& s : ghz_string_class(x, 10, rng).states) EXPECT_NEAR(meyer_wallach(s), 1.0, 1e-10);
  }
  EXPECT_THROW(ghz_string_class("01a1", 1, rng), InvalidArgument);
}

TEST(Generate, EveryFamilyIsNormalizedAndSized) {
  std::vector<ClassSpec> specs;
  auto add = [&](Family f, auto&& tweak) {
    ClassSpec cs;
    cs.family = f;
    cs.label = to_string(f);
    cs.N = 12;
    tweak(cs);
    specs.push_back(cs);
  };
  add(Family::planar_ring, [](ClassSpec& c) { c.plane = "Y"; });
  add(Family::equator_ring, [](ClassSpec& c) { c.alpha = 1.0; });
  add(Family::polar_point, [](ClassSpec& c) { c.direction = "-X"; });
  add(Family::bell, [](ClassSpec& c) { c.kind = "Psi"; });
  add(Family::ghz_phase, [](ClassSpec&) {});
  add(Family::w_phase, [](ClassSpec&) {});
  add(Family::product_phase, [](ClassSpec& c) { c.n = 3; });
  add(Family::ghz_string, [](ClassSpec& c) { c.bits = "1001"; });
  add(Family::tlfim, [](ClassSpec& c) { c.n = 4; });
  const std::vector<int> qubits{1, 1, 1, 2, 3, 3, 3, 4, 4};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto set = generate_class(specs[i], 3, i);
    EXPECT_EQ(set.size(), 12u);
    EXPECT_EQ(set.label, specs[i].label);
    EXPECT_EQ(set.num_qubits(), qubits[i]);
    EXPECT_EQ(qubit_count(specs[i]), qubits[i]);
    for (const auto& s : set.states) EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
    EXPECT_EQ(set, generate_class(specs[i], 3, i));
    EXPECT_EQ(parse_family(to_string(specs[i].family)), specs[i].family);
  }
  ClassSpec bad;
  bad.N = 0;
  EXPECT_THROW(validate(bad), InvalidArgument);
}

TEST(Tlfim, MatchesJacobiOracle) {
  for (auto [g, h] : {std::pair{0.5, 0.25}, {0.3, -0.25}, {1.2, 0.1}, {0.45, 0.25}}) {
    auto H = ising_ring(4, g, h);
    std::vector<double> vals;
    std::vector<std::vector<double>> vecs;
    jacobi_eigen(H, vals, vecs);
    const auto k = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    auto gs = tlfim_ground(4, g, h);
    EXPECT_NEAR(gs.energy, vals[k], 1e-10);
    double overlap = 0.0;
    for (std::size_t i = 0; i < 16; ++i) overlap += vecs[i][k] * gs.state[i].real() + 0.0;
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-9);
    EXPECT_LE(gs.residual, 1e-9);
    EXPECT_GT(gs.gap, 0.0);

    auto mat = tlfim_hamiltonian(4, g, h).matrix;
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) ASSERT_NEAR(mat(i, j), H[i][j], 1e-15);
  }
}

TEST(Tlfim, PerturbativeLimits) {
  auto up = tlfim_ground(4, 1e-6, 0.25);
  EXPECT_GE(fidelity(up.state, StateVector::basis_state(4, 0)), 1 - 1e-6);
  EXPECT_NEAR(magnetization(up.state).mean, 4.0, 1e-5);
  auto down = tlfim_ground(4, 1e-6, -0.25);
  EXPECT_GE(fidelity(down.state, StateVector::basis_state(4, 15)), 1 - 1e-6);
  // h = 0 with a vanishing transverse field leaves |0000> and |1111> tied.
  EXPECT_THROW(tlfim_ground(4, 0.0, 0.0), DegenerateError);
  EXPECT_THROW(tlfim_ground(1, 0.5, 0.25), InvalidArgument);
}

TEST(Tlfim, SymmetriesAndHermiticity) {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const double g = rng.uniform(0.1, 1.5), h = rng.uniform(-0.5, 0.5);
    if (std::abs(h) < 0.02) continue;
    EXPECT_NEAR(tlfim_ground(4, g, h).energy, tlfim_ground(4, g, -h).energy, 1e-10);

    // Relabel qubits q -> q+1 mod n; the spectrum is unchanged.
    const auto H = tlfim_hamiltonian(4, g, h).matrix;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(16, 16);
    for (int idx = 0; idx < 16; ++idx) {
      const int rot = ((idx >> 1) | ((idx & 1) << 3));
      P(rot, idx) = 1.0;
    }
    EXPECT_LT((P * H * P.transpose() - H).cwiseAbs().maxCoeff(), 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(H), b(P * H * P.transpose());
    EXPECT_LT((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9);

    auto psi = haar_random(4, rng);
    Eigen::VectorXcd v(16);
    for (int k = 0; k < 16; ++k) v[k] = psi[static_cast<std::size_t>(k)];
    const std::complex<double> e = v.adjoint() * H.cast<std::complex<double>>() * v;
    EXPECT_NEAR(e.imag(), 0.0, 1e-10);
  }
}

TEST(Tlfim, ClassMagnetization) {
  Rng rng(8);
  auto up = tlfim_class(4, 0.25, 0.5, 0.1, 100, rng);
  auto down = tlfim_class(4, -0.25, 0.5, 0.1, 100, rng);
  const double m_up = mean_magnetization(up).mean / 4;
  const double m_down = mean_magnetization(down).mean / 4;
  // Per-site reading of the reported target magnetization 0.97.
  EXPECT_NEAR(m_up, 0.97, 0.02);
  EXPECT_NEAR(m_down, -0.97, 0.02);
  for (const auto& s : up.states) EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
}
