#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qinsure/qinsure.hpp"

using namespace qinsure;

namespace {

struct Census {
  std::size_t hadamard = 0;
  std::size_t controlled_phase = 0;
  std::size_t swap = 0;
  std::size_t other = 0;
};

Census census(const Circuit& c) {
  Census out;
  for (const auto& op : c.ops()) {
    if (op.kind == GateKind::H && op.controls.empty()) {
      ++out.hadamard;
    } else if (op.kind == GateKind::Phase && op.controls.size() == 1) {
      ++out.controlled_phase;
    } else if (op.kind == GateKind::Swap) {
      ++out.swap;
    } else {
      ++out.other;
    }
  }
  return out;
}

} // namespace

TEST(PhaseRotation, ActsOnOneOnly) {
  for (unsigned j = 1; j <= 5; ++j) {
    for (int sign : {1, -1}) {
      const auto u = single_qubit_matrix(gates::phase_rotation(0, j, sign));
      EXPECT_EQ(u[0], cplx(1.0));
      EXPECT_NEAR(std::abs(u[3] - std::polar(1.0, sign * 2.0 * pi / std::ldexp(1.0, static_cast<int>(j)))), 0.0,
                  1e-15);
    }
  }
}

TEST(Qft, ZeroGivesUniform) {
  for (std::size_t m = 1; m <= 5; ++m) {
    const auto sv = simulate(qft_circuit(m));
    for (const auto& a : sv.amplitudes()) {
      EXPECT_NEAR(std::abs(a - cplx(1.0 / std::sqrt(std::ldexp(1.0, static_cast<int>(m))))), 0.0, 1e-12);
    }
  }
}

TEST(Qft, SingleQubitOne) {
  auto sv = StateVector::basis(1, 1);
  sv.run(qft_circuit(1));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(sv.amplitude(0) - cplx(r)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(sv.amplitude(1) - cplx(-r)), 0.0, 1e-12);
}

TEST(Qft, BasisFiveAgainstDftColumn) {
  auto sv = StateVector::basis(3, 5);
  sv.run(qft_circuit(3));
  const auto f = oracle::dft(3);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(std::abs(sv.amplitude(k) - f(k, 5)), 0.0, 1e-12);
  }
}

TEST(Qft, MatrixEqualsDft) {
  for (std::size_t m = 1; m <= 6; ++m) {
    EXPECT_LE(max_abs_diff(unitary(qft_circuit(m)), oracle::dft(m)), 1e-10) << "m=" << m;
  }
}

TEST(Qft, Unitary) {
  for (std::size_t m = 1; m <= 6; ++m) {
    EXPECT_LE(unitarity_error(unitary(iqft_circuit(m))), 1e-10);
  }
}

TEST(Qft, RejectsZeroWidth) {
  EXPECT_THROW(qft_circuit(0), Error);
  EXPECT_THROW(iqft_circuit(0), Error);
}

TEST(Iqft, RoundTripOnAllBasisStates) {
  for (std::size_t m = 1; m <= 5; ++m) {
    for (std::uint64_t l = 0; l < (std::uint64_t{1} << m); ++l) {
      auto sv = StateVector::basis(m, l);
      sv.run(qft_circuit(m));
      sv.run(iqft_circuit(m));
      EXPECT_GE(fidelity(sv, StateVector::basis(m, l)), 1.0 - 1e-10);
    }
  }
}

TEST(Iqft, StructurallyTheAdjointOfQft) {
  for (std::size_t m = 1; m <= 6; ++m) {
    EXPECT_EQ(qft_circuit(m).adjoint(), iqft_circuit(m));
  }
}

TEST(Iqft, CensusForFourQubits) {
  const auto c = census(iqft_circuit(4));
  EXPECT_EQ(c.hadamard, 4U);
  EXPECT_EQ(c.controlled_phase, 6U);
  EXPECT_EQ(c.swap, 2U);
  EXPECT_EQ(c.other, 0U);
}

TEST(Iqft, CensusFormula) {
  for (std::size_t m = 1; m <= 8; ++m) {
    const auto c = census(iqft_circuit(m));
    EXPECT_EQ(c.hadamard, m);
    EXPECT_EQ(c.controlled_phase, m * (m - 1) / 2);
    EXPECT_EQ(c.swap, m / 2);
    EXPECT_EQ(iqft_circuit(m).size(), m + m * (m - 1) / 2 + m / 2);
  }
}

TEST(Iqft, ExactPhaseGivesExactOutcome) {
  const std::size_t m = 4;
  const std::size_t dim = std::size_t{1} << m;
  for (std::size_t l = 0; l < dim; ++l) {
    std::vector<cplx> amps(dim);
    for (std::size_t y = 0; y < dim; ++y) {
      amps[y] = std::polar(1.0 / std::sqrt(static_cast<double>(dim)),
                           2.0 * pi * static_cast<double>(l * y) / static_cast<double>(dim));
    }
    auto sv = StateVector::from_amplitudes(amps);
    sv.run(iqft_circuit(m));
    EXPECT_NEAR(sv.marginal({0, 1, 2, 3})[l], 1.0, 1e-12);
  }
}
