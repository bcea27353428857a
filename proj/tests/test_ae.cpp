#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qinsure/qinsure.hpp"

using namespace qinsure;

namespace {

double ancilla_one(const ExpectationEncoder& enc, const Circuit& c) {
  return simulate(c).marginal({enc.ancilla()})[1];
}

std::vector<cplx> loaded(const ExpectationEncoder& enc) { return simulate(enc.circuit).amplitudes(); }

ExpectationEncoder random_encoder(std::mt19937_64& rng, int trial) {
  if (trial % 2 == 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return encoder_for_probability(u(rng));
  }
  const auto d = make_distribution(oracle::random_probabilities(4, rng), 0.5, 1.5);
  return encode_expectation(d, trial % 4 == 1 ? EncoderMode::Exact : EncoderMode::Linear, 0.25);
}

} // namespace

TEST(Encoder, PointMassExactIsZero) {
  const auto enc = encode_expectation(make_distribution({1.0, 0.0, 0.0, 0.0}), EncoderMode::Exact);
  EXPECT_NEAR(ancilla_one(enc, enc.circuit), 0.0, 1e-15);
}

TEST(Encoder, UniformOneQubitExactIsHalf) {
  const auto enc = encode_expectation(make_distribution({0.5, 0.5}), EncoderMode::Exact);
  EXPECT_NEAR(ancilla_one(enc, enc.circuit), 0.5, 1e-12);
}

TEST(Encoder, LinearModeMatchesScalarOracle) {
  const double c = 0.25;
  const auto d = make_distribution({0.25, 0.25, 0.25, 0.25});
  const auto enc = encode_expectation(d, EncoderMode::Linear, c);
  double p = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double half = (k / 4.0 - 0.5) * c + pi / 4.0;
    p += 0.25 * std::sin(half) * std::sin(half);
  }
  EXPECT_NEAR(ancilla_one(enc, enc.circuit), p, 1e-10);
  EXPECT_NEAR(encoded_probability(enc), p, 1e-12);
}

TEST(Encoder, CircuitProbabilityMatchesFormulaForRandomInputs) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto enc = random_encoder(rng, trial);
    EXPECT_NEAR(ancilla_one(enc, enc.circuit), encoded_probability(enc), 1e-10);
  }
}

TEST(Encoder, CApproxRange) {
  const auto d = make_distribution({0.5, 0.5});
  EXPECT_THROW(encode_expectation(d, EncoderMode::Linear, 0.0), Error);
  EXPECT_THROW(encode_expectation(d, EncoderMode::Linear, 0.6), Error);
  EXPECT_NO_THROW(encode_expectation(d, EncoderMode::Linear, 0.5));
}

TEST(Encoder, LinearBackTransformApproximatesMean) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = make_distribution(oracle::random_probabilities(8, rng), 0.9, 1.1);
    const auto enc = encode_expectation(d, EncoderMode::Linear, 0.05);
    EXPECT_NEAR(expected_value_from_mu(encoded_probability(enc), enc), expected_value(d), 1e-3 * 0.2);
  }
}

TEST(VOperator, Involution) {
  const Circuit v = v_operator(2);
  Circuit vv(3);
  vv.append(v).append(v);
  EXPECT_LE(max_abs_diff(unitary(vv), DenseMatrix::identity(8)), 1e-15);
}

TEST(VOperator, ExpectationIsOneMinusTwoMu) {
  std::mt19937_64 rng(33);
  const auto zero = encode_expectation(make_distribution({1.0, 0.0}), EncoderMode::Exact);
  for (int trial = -1; trial < 10; ++trial) {
    const auto enc = trial < 0 ? zero : random_encoder(rng, trial);
    const auto chi = loaded(enc);
    const auto v = oracle::embed(enc.width(), enc.ancilla(), {1.0, 0.0, 0.0, -1.0});
    const auto v_chi = oracle::apply(v, chi);
    cplx e{};
    for (std::size_t i = 0; i < chi.size(); ++i) {
      e += std::conj(chi[i]) * v_chi[i];
    }
    EXPECT_NEAR(e.real(), 1.0 - 2.0 * encoded_probability(enc), 1e-10);
  }
}

TEST(ReflectionZero, DenseMatrix) {
  for (std::size_t n = 1; n <= 4; ++n) {
    DenseMatrix expected = DenseMatrix::identity(std::size_t{1} << n);
    expected(0, 0) = -1.0;
    EXPECT_LE(max_abs_diff(unitary(reflection_zero(n)), expected), 1e-10);
  }
}

TEST(ReflectionZero, FlipsOnlyZero) {
  auto sv = StateVector::basis(3, 0);
  sv.run(reflection_zero(3));
  EXPECT_NEAR(sv.amplitude(0).real(), -1.0, 1e-12);
  for (std::uint64_t k = 1; k < 8; ++k) {
    auto s = StateVector::basis(3, k);
    s.run(reflection_zero(3));
    EXPECT_NEAR(s.amplitude(k).real(), 1.0, 1e-12);
  }
}

TEST(Grover, PowersFollowSineLaw) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto enc = random_encoder(rng, trial);
    const double theta = 2.0 * std::asin(std::sqrt(encoded_probability(enc)));
    const Circuit q = grover_operator(enc);
    StateVector sv(enc.width());
    sv.run(enc.circuit);
    for (int k = 0; k <= 7; ++k) {
      const double s = std::sin((2 * k + 1) * theta / 2.0);
      EXPECT_NEAR(sv.marginal({enc.ancilla()})[1], s * s, 1e-9) << "trial " << trial << " k " << k;
      sv.run(q);
    }
  }
}

TEST(Grover, QuarterProbabilityReachesOneAfterOneStep) {
  const auto enc = encoder_for_probability(0.25);
  Circuit c(enc.width());
  c.append(enc.circuit).append(grover_operator(enc));
  EXPECT_NEAR(ancilla_one(enc, c), 1.0, 1e-12);
}

TEST(Grover, RotationOnPlaneWithoutLeakage) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const auto enc = random_encoder(rng, trial);
    const double p = encoded_probability(enc);
    if (p < 1e-6 || p > 1.0 - 1e-6) {
      continue;
    }
    const auto psi = loaded(enc);
    std::vector<cplx> good(psi.size());
    std::vector<cplx> bad(psi.size());
    const std::size_t bit = std::size_t{1} << enc.ancilla();
    for (std::size_t i = 0; i < psi.size(); ++i) {
      ((i & bit) ? good : bad)[i] = psi[i];
    }
    for (auto& a : good) {
      a /= std::sqrt(p);
    }
    for (auto& a : bad) {
      a /= std::sqrt(1.0 - p);
    }
    const DenseMatrix q = unitary(grover_operator(enc));
    const std::vector<std::vector<cplx>> basis = {good, bad};
    cplx m[2][2];
    for (int j = 0; j < 2; ++j) {
      const auto image = oracle::apply(q, basis[j]);
      std::vector<cplx> rest = image;
      for (int i = 0; i < 2; ++i) {
        cplx c{};
        for (std::size_t k = 0; k < image.size(); ++k) {
          c += std::conj(basis[i][k]) * image[k];
        }
        m[i][j] = c;
        for (std::size_t k = 0; k < image.size(); ++k) {
          rest[k] -= c * basis[i][k];
        }
      }
      double leak = 0.0;
      for (const auto& a : rest) {
        leak += std::norm(a);
      }
      EXPECT_LE(std::sqrt(leak), 1e-9);
    }
    // Eigenvalues of the 2x2 restriction: trace = 2 cos(phase).
    const cplx tr = m[0][0] + m[1][1];
    const cplx det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const double theta = 2.0 * std::asin(std::sqrt(p));
    for (const cplx lambda : {(tr + disc) / 2.0, (tr - disc) / 2.0}) {
      EXPECT_NEAR(std::abs(lambda), 1.0, 1e-9);
      EXPECT_NEAR(std::abs(std::arg(lambda)), theta, 1e-9);
    }
  }
}

TEST(AeCircuit, ExactGridSupportsMirrorPair) {
  for (std::size_t m = 3; m <= 5; ++m) {
    const std::size_t big_m = std::size_t{1} << m;
    for (std::size_t l = 0; l < big_m; ++l) {
      const double s = std::sin(pi * static_cast<double>(l) / static_cast<double>(big_m));
      const auto law = ae_outcomes(encoder_for_probability(s * s), m);
      const std::size_t mirror = (big_m - l) % big_m;
      EXPECT_GE(law[l] + (mirror != l ? law[mirror] : 0.0), 1.0 - 1e-9) << "m=" << m << " l=" << l;
    }
  }
}

TEST(AeCircuit, ZeroProbabilityGivesZeroOutcome) {
  for (std::size_t m = 1; m <= 4; ++m) {
    EXPECT_NEAR(ae_outcomes(encoder_for_probability(0.0), m)[0], 1.0, 1e-12);
  }
}

TEST(AeCircuit, MatchesPhaseEstimationLaw) {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = u(rng);
    const auto law = ae_outcomes(encoder_for_probability(p), 5);
    const auto expected = oracle::phase_estimation_law(2.0 * std::asin(std::sqrt(p)), 5);
    for (std::size_t l = 0; l < law.size(); ++l) {
      EXPECT_NEAR(law[l], expected[l], 1e-10);
    }
  }
}

TEST(AeCircuit, GenericProbabilityTwoNeighborBound) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = u(rng);
    EXPECT_GE(two_neighbor_mass(ae_outcomes(encoder_for_probability(p), 5), p), 8.0 / (pi * pi));
  }
}

TEST(AeCircuit, ExpandedPowersMatchMatrixPowers) {
  const auto d = make_distribution({0.1, 0.2, 0.3, 0.4});
  const auto enc = encode_expectation(d, EncoderMode::Linear, 0.3);
  const auto a = simulate(ae_circuit(enc, 3, false));
  const auto b = simulate(ae_circuit(enc, 3, true));
  EXPECT_GE(fidelity(a, b), 1.0 - 1e-10);
}

TEST(AeCircuit, MarkersAndOutcomeNormalization) {
  const auto enc = encoder_for_probability(0.3);
  const Circuit c = ae_circuit(enc, 4);
  for (const char* name : {"load", "hadamard", "grover", "iqft"}) {
    EXPECT_TRUE(c.find_marker(name).has_value()) << name;
  }
  const auto law = ae_outcomes(enc, 4);
  EXPECT_NEAR(std::accumulate(law.begin(), law.end(), 0.0), 1.0, 1e-10);
}

TEST(AeCircuit, QubitBudgetFromEnvironment) {
  ::setenv("QINSURE_MAX_QUBITS", "5", 1);
  try {
    ae_circuit(encoder_for_probability(0.3), 4);
    ::unsetenv("QINSURE_MAX_QUBITS");
    FAIL();
  } catch (const Error& e) {
    ::unsetenv("QINSURE_MAX_QUBITS");
    EXPECT_EQ(e.code(), ErrorCode::QubitBudget);
  }
  EXPECT_NO_THROW(ae_circuit(encoder_for_probability(0.3), 4));
}

TEST(Estimate, OutcomeZero) {
  const auto enc = encode_expectation(make_distribution({0.5, 0.5}, 2.0, 3.0));
  std::vector<double> law(8, 0.0);
  law[0] = 1.0;
  const auto res = estimate(law, enc);
  EXPECT_EQ(res.l_hat, 0U);
  EXPECT_EQ(res.mu_hat, 0.0);
  EXPECT_EQ(res.expected_value, 2.0);
}

TEST(Estimate, HalfwayOutcomeIsOne) {
  const auto enc = encoder_for_probability(0.5);
  std::vector<double> law(8, 0.0);
  law[4] = 1.0;
  EXPECT_NEAR(estimate(law, enc).mu_hat, 1.0, 1e-15);
}

TEST(Estimate, TiesGoToSmallerOutcome) {
  const auto enc = encoder_for_probability(0.5);
  const std::vector<double> law = {0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0};
  EXPECT_EQ(estimate(law, enc).l_hat, 2U);
  EXPECT_THROW(estimate({}, enc), Error);
}

TEST(Estimate, UniformThreePointGridExactMode) {
  const auto d = uniform_excluding_zero(2, 0.8, 1.1);
  const double classical = [&] {
    double e = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      e += d.probabilities[k] * (0.8 + 0.1 * static_cast<double>(k));
    }
    return e;
  }();
  const std::size_t m = 7;
  const auto res = run_ae(encode_expectation(d, EncoderMode::Exact), m);
  EXPECT_NEAR(res.expected_value, classical, 2.0 / std::ldexp(1.0, m) * (d.z_max - d.z_min));
}

TEST(Estimate, SampledOutcomesAreFrequencies) {
  const auto enc = encoder_for_probability(0.3);
  const auto freq = ae_sampled_outcomes(enc, 4, 2000, 5);
  EXPECT_NEAR(std::accumulate(freq.begin(), freq.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(freq, ae_sampled_outcomes(enc, 4, 2000, 5));
}

TEST(MonteCarlo, PointMassIsExact) {
  const auto d = make_distribution({0.0, 0.0, 1.0, 0.0}, 0.0, 3.0);
  EXPECT_EQ(mc_baseline(d, 1000, 1), 2.0);
}

TEST(MonteCarlo, WithinThreeSigmaOfMean) {
  const auto d = uniform_excluding_zero(2, 0.8, 1.1);
  const std::uint64_t shots = 1'000'000;
  const double sigma = std::sqrt(variance(d) / static_cast<double>(shots));
  EXPECT_LE(std::abs(mc_baseline(d, shots, 77) - 1.0), 3.0 * sigma);
}

TEST(MonteCarlo, ErrorShrinksTenfoldOverHundredfoldShots) {
  const auto d = uniform_excluding_zero(2, 0.8, 1.1);
  double small = 0.0;
  double large = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    small += std::abs(mc_baseline(d, 10'000, seed) - 1.0);
    large += std::abs(mc_baseline(d, 1'000'000, 1000 + seed) - 1.0);
  }
  const double ratio = small / large;
  EXPECT_GT(ratio, 5.0);
  EXPECT_LT(ratio, 20.0);
}
