#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qinsure/qinsure.hpp"

using namespace qinsure;

namespace {

void expect_loaded(const Circuit& loader, const std::vector<double>& a, double tol) {
  const auto sv = simulate(loader);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(sv.amplitudes()[k].real(), std::sqrt(a[k]), tol) << "k=" << k;
    EXPECT_LE(std::abs(sv.amplitudes()[k].imag()), 1e-12);
  }
}

} // namespace

TEST(Loader, PointMassAtZero) {
  const auto d = make_distribution({1.0, 0.0, 0.0, 0.0});
  for (auto backend : {LoaderBackend::RyTree, LoaderBackend::Matrix}) {
    const auto sv = simulate(loader_circuit(d, backend));
    EXPECT_NEAR(std::norm(sv.amplitude(0)), 1.0, 1e-12);
  }
}

TEST(Loader, UniformFourStates) {
  const auto d = make_distribution({0.25, 0.25, 0.25, 0.25});
  for (auto backend : {LoaderBackend::RyTree, LoaderBackend::Matrix}) {
    expect_loaded(loader_circuit(d, backend), d.probabilities, 1e-12);
  }
}

TEST(Loader, BackendsAgreeOnRandomDistributions) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = make_distribution(oracle::random_probabilities(8, rng));
    const auto tree = simulate(loader_circuit(d, LoaderBackend::RyTree));
    const auto mat = simulate(loader_circuit(d, LoaderBackend::Matrix));
    EXPECT_GE(fidelity(tree, mat), 1.0 - 1e-9);
    expect_loaded(loader_circuit(d, LoaderBackend::RyTree), d.probabilities, 1e-10);
  }
}

TEST(Loader, MarginalsReproduceProbabilities) {
  std::mt19937_64 rng(22);
  auto p = oracle::random_probabilities(16, rng);
  p[3] = 0.0;
  p[0] += 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
  const auto d = make_distribution(p);
  const auto law = simulate(loader_circuit(d)).marginal({0, 1, 2, 3});
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_NEAR(law[k], d.probabilities[k], 1e-10);
  }
}

TEST(Loader, SparseDistributionWithEmptyBranches) {
  const auto d = make_distribution({0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5});
  expect_loaded(loader_circuit(d), d.probabilities, 1e-12);
}

TEST(Distribution, RejectsNegativeAndUnnormalized) {
  try {
    make_distribution({1.5, -0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    make_distribution({0.5, 0.4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    make_distribution({0.5, 0.25, 0.25});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Distribution, TinyEntriesClampedToZero) {
  const auto d = make_distribution({1.0 - 1e-16, 1e-16});
  EXPECT_EQ(d.probabilities[1], 0.0);
}

TEST(GridValue, Endpoints) {
  const auto d = make_distribution({0.25, 0.25, 0.25, 0.25}, 0.9, 1.1);
  EXPECT_DOUBLE_EQ(grid_value(0, d), 0.9);
  EXPECT_NEAR(grid_value(3, d), 1.1, 1e-15);
}

TEST(GridValue, InteriorPoint) {
  const auto d = make_distribution({0.25, 0.25, 0.25, 0.25}, 0.9, 1.1);
  EXPECT_NEAR(grid_value(1, d), 0.9 + 0.2 / 3.0, 1e-15);
  EXPECT_NEAR(grid_value(1, d), 0.966667, 1e-6);
}

TEST(GridValue, OutOfRange) {
  const auto d = make_distribution({0.5, 0.5});
  try {
    grid_value(2, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(GridValue, MonotoneIncreasing) {
  for (std::size_t k = 1; k < 16; ++k) {
    EXPECT_LT(grid_value(k - 1, 4, -1.0, 3.0), grid_value(k, 4, -1.0, 3.0));
  }
}

TEST(UniformExcludingZero, ResolutionTwo) {
  const auto d = uniform_excluding_zero(2);
  EXPECT_EQ(d.probabilities[0], 0.0);
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(d.probabilities[k], 1.0 / 3.0);
  }
}

TEST(UniformExcludingZero, ResolutionOne) {
  const auto d = uniform_excluding_zero(1);
  EXPECT_EQ(d.probabilities, (std::vector<double>{0.0, 1.0}));
}

TEST(UniformExcludingZero, SumsToOneAndRejectsZero) {
  for (std::size_t r = 1; r <= 6; ++r) {
    const auto d = uniform_excluding_zero(r);
    EXPECT_NEAR(std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_THROW(uniform_excluding_zero(0), Error);
}

TEST(ProcessLoader, SingleStepMatchesLoader) {
  const auto d = make_distribution({0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(process_loader(iid_process(d, 1)), loader_circuit(d));
}

TEST(ProcessLoader, IidBlocksHaveStepMarginals) {
  const auto proc = iid_process(uniform_excluding_zero(2), 3);
  const auto sv = simulate(process_loader(proc));
  for (std::size_t i = 0; i < 3; ++i) {
    const auto law = sv.marginal({2 * i, 2 * i + 1});
    EXPECT_NEAR(law[0], 0.0, 1e-12);
    for (std::size_t k = 1; k < 4; ++k) {
      EXPECT_NEAR(law[k], 1.0 / 3.0, 1e-10);
    }
  }
}

TEST(ProcessLoader, ProductJointMatchesIndependentPath) {
  std::mt19937_64 rng(23);
  const auto a = make_distribution(oracle::random_probabilities(4, rng));
  const auto b = make_distribution(oracle::random_probabilities(4, rng));
  std::vector<double> joint(16);
  for (std::size_t t = 0; t < 16; ++t) {
    joint[t] = a.probabilities[t & 3] * b.probabilities[t >> 2];
  }
  double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  joint[0] += 1.0 - total;
  ProcessDistribution indep{{a, b}, std::nullopt};
  ProcessDistribution joined{{a, b}, joint};
  EXPECT_GE(fidelity(simulate(process_loader(indep)), simulate(process_loader(joined))), 1.0 - 1e-9);
}

TEST(ProcessLoader, ResolutionMismatchRejected) {
  ProcessDistribution proc{{uniform_excluding_zero(2), uniform_excluding_zero(1)}, std::nullopt};
  try {
    process_loader(proc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ProcessLoader, JointMustMarginalize) {
  const auto u = make_distribution({0.5, 0.5});
  ProcessDistribution proc{{u, u}, std::vector<double>{0.5, 0.0, 0.0, 0.5}};
  EXPECT_NO_THROW(validate(proc));
  proc.joint = std::vector<double>{0.7, 0.0, 0.0, 0.3};
  EXPECT_THROW(validate(proc), Error);
}

TEST(Moments, ExpectedValueAndVariance) {
  const auto d = make_distribution({0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.8, 1.1);
  EXPECT_NEAR(expected_value(d), 1.0, 1e-12);
  EXPECT_NEAR(variance(d), 2.0 / 3.0 * 0.01, 1e-12);
}
