#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "cqdd/ansatz.hpp"
#include "cqdd/errors.hpp"
#include "support.hpp"

using namespace cqdd;
using namespace cqdd::testing;

namespace {

using CMat = Eigen::MatrixXcd;

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

CMat on_qubit(const CMat& g, int q, int w) {
  CMat left = CMat::Identity(1 << q, 1 << q);
  CMat right = CMat::Identity(1 << (w - q - 1), 1 << (w - q - 1));
  return kron(kron(left, g), right);
}

CMat rx(double t) {
  CMat m(2, 2);
  const std::complex<double> I(0, 1);
  m << std::cos(t / 2), -I * std::sin(t / 2), -I * std::sin(t / 2), std::cos(t / 2);
  return m;
}

CMat ry(double t) {
  CMat m(2, 2);
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

CMat cz(int p, int q, int w) {
  CMat m = CMat::Identity(1 << w, 1 << w);
  for (int i = 0; i < (1 << w); ++i) {
    if (((i >> (w - 1 - p)) & 1) && ((i >> (w - 1 - q)) & 1)) m(i, i) = -1.0;
  }
  return m;
}

// The ansatz written out as a product of dense layer matrices.
CMat ansatz_unitary(int w, int L, const std::vector<double>& th) {
  CMat u = CMat::Identity(1 << w, 1 << w);
  int k = 0;
  for (int l = 1; l <= L; ++l) {
    for (int q = 0; q < w; ++q) {
      u = on_qubit(rx(th[k]), q, w) * u;
      u = on_qubit(ry(th[k + 1]), q, w) * u;
      k += 2;
    }
    for (int q = (l % 2 == 1) ? 0 : 1; q + 1 < w; q += 2) u = cz(q, q + 1, w) * u;
  }
  return u;
}

std::vector<double> random_theta(std::size_t d, Rng& rng) {
  std::vector<double> th(d);
  for (auto& x : th) x = rng.normal();
  return th;
}

}  // namespace

TEST(Mu, LinearSpacing) {
  auto two = assign_mu(2);
  EXPECT_EQ(two[0], 0.0);
  EXPECT_DOUBLE_EQ(two[1], kPi);
  auto three = assign_mu(3);
  EXPECT_DOUBLE_EQ(three[1], 2 * kPi / 3);
  EXPECT_DOUBLE_EQ(three[2], 4 * kPi / 3);
  EXPECT_EQ(assign_mu(1), std::vector<double>{0.0});
  EXPECT_THROW(assign_mu(0), InvalidArgument);
  // Six polar classes land on multiples of pi/3.
  auto six = assign_mu(6);
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(six[j], j * kPi / 3, 1e-15);
}

TEST(Basis, IndexAssignmentAndCapacity) {
  EXPECT_EQ(assign_basis_indices(2, 2), (std::vector<std::uint64_t>{0, 3}));
  EXPECT_EQ(assign_basis_indices(3, 2), (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(assign_basis_indices(4, 2), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  try {
    assign_basis_indices(6, 2);
    FAIL() << "six classes fit in two ancillas";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("cannot uniquely represent more than 4 classes"), std::string::npos);
  }
  AnsatzSpec spec{1, 2, 1, ConditioningMode::basis};
  EXPECT_THROW(make_class_conditions({"a", "b", "c", "d", "e", "f"}, spec), InvalidArgument);
  EXPECT_THROW(make_class_conditions({"a", "a"}, AnsatzSpec{}), InvalidArgument);
}

TEST(Layout, ParameterCountExhaustive) {
  for (int n = 1; n <= 4; ++n) {
    for (int n_a = 0; n_a <= 6; ++n_a) {
      for (int L = 0; L <= 20; ++L) {
        AnsatzSpec spec{n, n_a, L, ConditioningMode::rx};
        const auto plan = circuit_layout(spec);
        int params = 0;
        for (const auto& g : plan) params += g.kind != PlannedGate::Kind::cz;
        ASSERT_EQ(spec.param_count(), static_cast<std::size_t>(2 * L * (n + n_a)));
        ASSERT_EQ(params, 2 * L * (n + n_a));
      }
    }
  }
  EXPECT_EQ((AnsatzSpec{3, 1, 5}).param_count(), 40u);
  EXPECT_EQ((AnsatzSpec{1, 2, 15}).param_count(), 90u);
  EXPECT_TRUE(circuit_layout(AnsatzSpec{2, 2, 0}).empty());
}

TEST(Layout, AlternatingCzPattern) {
  auto plan = circuit_layout(AnsatzSpec{3, 2, 2});
  std::vector<std::pair<int, int>> cz;
  for (const auto& g : plan) {
    if (g.kind == PlannedGate::Kind::cz) cz.emplace_back(g.q0, g.q1);
  }
  // Width 5: layer 1 pairs (0,1),(2,3); layer 2 pairs (1,2),(3,4).
  const std::vector<std::pair<int, int>> expect{{0, 1}, {2, 3}, {1, 2}, {3, 4}};
  EXPECT_EQ(cz, expect);
  EXPECT_EQ(plan.front().kind, PlannedGate::Kind::rx);
  EXPECT_EQ(plan[1].kind, PlannedGate::Kind::ry);
  EXPECT_EQ(plan[1].q0, 0);
}

TEST(Circuit, MatchesDenseUnitaryOracle) {
  Rng rng(21);
  for (auto [n, n_a, L] : {std::tuple{1, 2, 3}, {2, 2, 4}, {3, 1, 5}, {1, 1, 2}}) {
    AnsatzSpec spec{n, n_a, L};
    const int w = spec.width();
    auto th = random_theta(spec.param_count(), rng);
    const CMat U = ansatz_unitary(w, L, th);
    for (int trial = 0; trial < 3; ++trial) {
      auto s = haar_random(w, rng);
      auto out = s;
      apply_circuit(out, circuit_layout(spec), th);
      Eigen::VectorXcd v(s.dim());
      for (std::size_t i = 0; i < s.dim(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
      const Eigen::VectorXcd ref = U * v;
      for (std::size_t i = 0; i < s.dim(); ++i) {
        EXPECT_NEAR(std::abs(out[i] - ref[static_cast<Eigen::Index>(i)]), 0.0, 1e-12);
      }
      EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
    }
  }
}

TEST(Denoise, ZeroThetaIsIdentity) {
  Rng rng(22);
  for (int L : {1, 2, 5}) {
    AnsatzSpec spec{1, 2, L};
    std::vector<double> th(spec.param_count(), 0.0);
    auto s = haar_random(1, rng);
    Rng m(1);
    auto out = denoise_step(s, th, {ConditioningMode::rx, 0.0, 0}, spec, MeasureMode::born, m);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(fidelity(out.states[0], s), 1.0, 1e-12);
  }
}

TEST(Denoise, BranchesAndErrors) {
  Rng rng(23);
  AnsatzSpec spec{2, 1, 3};
  auto th = random_theta(spec.param_count(), rng);
  auto s = haar_random(2, rng);
  Rng m(2);
  auto br = denoise_step(s, th, {ConditioningMode::rx, 1.0, 0}, spec, MeasureMode::exact_branches, m);
  EXPECT_LE(br.size(), 2u);
  double acc = 0.0;
  for (double w : br.weights) acc += w;
  EXPECT_NEAR(acc, 1.0, 1e-9);

  std::vector<double> short_theta(spec.param_count() - 1, 0.0);
  EXPECT_THROW(denoise_step(s, short_theta, {}, spec, MeasureMode::born, m), InvalidArgument);
  EXPECT_THROW(denoise_step(haar_random(1, rng), th, {}, spec, MeasureMode::born, m), InvalidArgument);

  // Postselection on an ancilla rotated fully to |1> is degenerate.
  AnsatzSpec bare{1, 1, 0};
  EXPECT_THROW(denoise_step(s = haar_random(1, rng), {}, {ConditioningMode::rx, kPi, 0}, bare,
                            MeasureMode::postselect_zero, m),
               DegenerateError);
}

TEST(Denoise, RzConditioningOnlyAddsGlobalPhase) {
  Rng rng(24);
  AnsatzSpec spec{1, 2, 4, ConditioningMode::rz};
  auto th = random_theta(spec.param_count(), rng);
  auto inputs = haar_set(1, 64, rng, "c");
  const MeasureKey key{9, StreamTag::measure_test, 0, 3, 0};
  auto a = denoise_set(inputs, th, {ConditioningMode::rz, 0.0, 0}, spec, key);
  auto b = denoise_set(inputs, th, {ConditioningMode::rz, kPi, 0}, spec, key);
  // RZ(pi)|0> on each of two ancillas contributes exp(-i pi).
  const Amplitude phase = std::polar(1.0, -kPi);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(fidelity(a.states[i], b.states[i]), 1.0, 1e-12);
    for (std::size_t k = 0; k < a.states[i].dim(); ++k) {
      EXPECT_NEAR(std::abs(b.states[i][k] - phase * a.states[i][k]), 0.0, 1e-12);
    }
  }
}

TEST(Denoise, BornSetMatchesPerStateSteps) {
  Rng rng(25);
  AnsatzSpec spec{2, 2, 3};
  auto th = random_theta(spec.param_count(), rng);
  auto inputs = haar_set(2, 20, rng, "c");
  const Conditioning cond{ConditioningMode::rx, 0.7, 0};
  const MeasureKey key{5, StreamTag::measure_chain, 1, 4, 2};
  auto out = denoise_set(inputs, th, cond, spec, key);
  const auto plan = circuit_layout(spec);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double u = keyed_uniform(5, StreamTag::measure_chain, {1, 4, 2, i});
    EXPECT_EQ(out.states[i], denoise_step_born(inputs.states[i], th, cond, spec, plan, u));
  }
}

TEST(Denoise, BranchUnionCarriesProbabilities) {
  Rng rng(26);
  AnsatzSpec spec{1, 2, 2};
  auto th = random_theta(spec.param_count(), rng);
  auto inputs = haar_set(1, 5, rng, "c");
  auto out = denoise_set_branches(inputs, th, {}, spec);
  validate(out);
  EXPECT_GE(out.size(), 5u);
  EXPECT_LE(out.size(), 20u);
}

TEST(Generate, EdgeModelAndShapes) {
  DenoiseModel zero;
  zero.spec = AnsatzSpec{1, 2, 2};
  zero.T = 0;
  zero.classes = {{"a", 0.0, 0}};
  auto sets = generate(zero, "a", 7, 3);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].states, haar_set_keyed(1, 7, 3, StreamTag::generate, 0).states);

  Rng rng(27);
  DenoiseModel m;
  m.spec = AnsatzSpec{2, 1, 2};
  m.T = 4;
  m.classes = make_class_conditions({"a", "b"}, m.spec);
  for (int k = 0; k < 4; ++k) m.thetas.push_back(random_theta(m.spec.param_count(), rng));
  auto g = generate(m, "b", 11, 5);
  EXPECT_EQ(g.size(), 5u);
  for (const auto& s : g) {
    EXPECT_EQ(s.size(), 11u);
    EXPECT_EQ(s.label, "b");
    for (const auto& st : s.states) EXPECT_NEAR(st.norm_squared(), 1.0, 1e-10);
  }
  EXPECT_THROW(generate(m, "zzz", 3, 1), InvalidArgument);
  EXPECT_THROW(generate(m, "a", 0, 1), InvalidArgument);

  // run_chain reproduces the tail of a generation.
  auto cond = conditioning_for(m.find_class("b"), m.spec);
  auto full = generate(m, cond, 1, 11, 5, StreamTag::generate, StreamTag::generate);
  auto tail = run_chain(m, full[3], cond, 3, 0, 5, StreamTag::generate, 1);
  EXPECT_EQ(tail.states, full[0].states);
}

TEST(Model, Validation) {
  DenoiseModel m;
  m.spec = AnsatzSpec{1, 2, 1};
  m.T = 2;
  m.thetas = {std::vector<double>(6, 0.0)};
  EXPECT_THROW(validate(m), InvalidArgument);
  m.thetas.push_back(std::vector<double>(5, 0.0));
  EXPECT_THROW(validate(m), InvalidArgument);
  m.thetas.back().push_back(0.0);
  m.classes = {{"a", 0.0, 0}, {"b", 0.0, 0}};
  EXPECT_THROW(validate(m), InvalidArgument);
  m.classes[1].mu = 1.0;
  EXPECT_NO_THROW(validate(m));
  EXPECT_THROW(validate(AnsatzSpec{0, 2, 1}), InvalidArgument);
  EXPECT_THROW(validate(AnsatzSpec{1, -1, 1}), InvalidArgument);
  EXPECT_THROW(validate(AnsatzSpec{1, 1, -1}), InvalidArgument);
}
