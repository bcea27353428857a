#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qinsure/circuit.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"

namespace qinsure {

/// Probabilities over the 2^r points of an affine grid [z_min, z_max].
struct DiscreteDistribution {
  std::size_t resolution = 0;
  std::vector<double> probabilities;
  double z_min = 0.0;
  double z_max = 1.0;

  [[nodiscard]] std::size_t size() const { return probabilities.size(); }
};

inline constexpr double clamp_threshold = 1e-15;

/// Validates and normalizes representation: resolution from the length,
/// entries below 1e-15 in magnitude set to zero.
inline DiscreteDistribution make_distribution(std::vector<double> probabilities, double z_min = 0.0,
                                              double z_max = 1.0) {
  require(!probabilities.empty(), ErrorCode::InvalidArgument, "empty probability vector");
  std::size_t r = 0;
  while ((std::size_t{1} << r) < probabilities.size()) {
    ++r;
  }
  require((std::size_t{1} << r) == probabilities.size(), ErrorCode::DimensionMismatch,
          "probability vector length must be a power of two");
  require(r >= 1, ErrorCode::InvalidArgument, "distribution needs at least one qubit");
  require(z_min <= z_max, ErrorCode::InvalidArgument, "z_min must not exceed z_max");
  double total = 0.0;
  for (auto& p : probabilities) {
    require(std::isfinite(p), ErrorCode::InvalidArgument, "probability is not finite");
    if (std::abs(p) < clamp_threshold) {
      p = 0.0;
    }
    require(p >= 0.0, ErrorCode::InvalidArgument, "negative probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "probabilities must sum to 1");
  return {r, std::move(probabilities), z_min, z_max};
}

inline double grid_value(std::size_t k, std::size_t resolution, double z_min, double z_max) {
  const std::size_t points = std::size_t{1} << resolution;
  require(k < points, ErrorCode::OutOfRange, "grid index out of range");
  return z_min + (z_max - z_min) / static_cast<double>(points - 1) * static_cast<double>(k);
}

inline double grid_value(std::size_t k, const DiscreteDistribution& dist) {
  return grid_value(k, dist.resolution, dist.z_min, dist.z_max);
}

inline double expected_value(const DiscreteDistribution& dist) {
  double e = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    e += dist.probabilities[k] * grid_value(k, dist);
  }
  return e;
}

inline double variance(const DiscreteDistribution& dist) {
  const double mean = expected_value(dist);
  double v = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double d = grid_value(k, dist) - mean;
    v += dist.probabilities[k] * d * d;
  }
  return v;
}

/// a_0 = 0, remaining mass spread evenly.
inline DiscreteDistribution uniform_excluding_zero(std::size_t r, double z_min = 0.0, double z_max = 1.0) {
  require(r >= 1, ErrorCode::InvalidArgument, "resolution must be at least 1");
  const std::size_t points = std::size_t{1} << r;
  std::vector<double> p(points, 1.0 / static_cast<double>(points - 1));
  p[0] = 0.0;
  return make_distribution(std::move(p), z_min, z_max);
}

enum class LoaderBackend { RyTree, Matrix };

/// Binary tree of multiplexed RY rotations, most significant qubit first.
inline Circuit ry_tree_loader(const DiscreteDistribution& dist) {
  const std::size_t r = dist.resolution;
  Circuit c(r);
  for (std::size_t level = 0; level < r; ++level) {
    const Qubit target = r - 1 - level;
    std::vector<Qubit> select;
    for (Qubit q = target + 1; q < r; ++q) {
      select.push_back(q);
    }
    const std::size_t prefixes = std::size_t{1} << level;
    const std::size_t block = std::size_t{1} << (target + 1);
    const std::size_t half = std::size_t{1} << target;
    std::vector<double> angles(prefixes, 0.0);
    for (std::size_t s = 0; s < prefixes; ++s) {
      double p0 = 0.0;
      double p1 = 0.0;
      for (std::size_t k = s * block; k < (s + 1) * block; ++k) {
        (k - s * block < half ? p0 : p1) += dist.probabilities[k];
      }
      angles[s] = (p0 + p1 > 0.0) ? 2.0 * std::atan2(std::sqrt(p1), std::sqrt(p0)) : 0.0;
    }
    if (level == 0) {
      c.add(gates::ry(target, angles[0]));
    } else {
      c.add(gates::mux_ry(std::move(select), target, std::move(angles)));
    }
  }
  return c;
}

/// Householder reflection whose first column is (sqrt(a_k))_k.
inline DenseMatrix householder_loader_matrix(const DiscreteDistribution& dist) {
  const std::size_t dim = dist.size();
  std::vector<double> a(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    a[k] = std::sqrt(dist.probabilities[k]);
  }
  std::vector<double> w = a;
  for (auto& v : w) {
    v = -v;
  }
  w[0] += 1.0;
  const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
  DenseMatrix h = DenseMatrix::identity(dim);
  if (norm < 1e-14) {
    return h;
  }
  for (auto& v : w) {
    v /= norm;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      h(i, j) -= 2.0 * w[i] * w[j];
    }
  }
  return h;
}

inline Circuit loader_circuit(const DiscreteDistribution& dist, LoaderBackend backend = LoaderBackend::RyTree) {
  if (backend == LoaderBackend::RyTree) {
    return ry_tree_loader(dist);
  }
  Circuit c(dist.resolution);
  std::vector<Qubit> targets(dist.resolution);
  std::iota(targets.begin(), targets.end(), Qubit{0});
  c.add(gates::matrix(std::move(targets), householder_loader_matrix(dist)));
  return c;
}

/// Per-step marginals with a common resolution, optionally with a joint law
/// over trajectory index sum_i k_i 2^(i r).
struct ProcessDistribution {
  std::vector<DiscreteDistribution> steps;
  std::optional<std::vector<double>> joint;

  [[nodiscard]] std::size_t num_steps() const { return steps.size(); }
  [[nodiscard]] std::size_t step_resolution() const { return steps.empty() ? 0 : steps.front().resolution; }
  [[nodiscard]] std::size_t width() const { return num_steps() * step_resolution(); }
};

inline void validate(const ProcessDistribution& proc) {
  require(!proc.steps.empty(), ErrorCode::InvalidArgument, "process needs at least one step");
  const std::size_t r = proc.steps.front().resolution;
  for (const auto& s : proc.steps) {
    require(s.resolution == r, ErrorCode::DimensionMismatch, "step resolutions differ");
  }
  if (!proc.joint) {
    return;
  }
  const auto& joint = *proc.joint;
  const std::size_t n = proc.steps.size();
  require(joint.size() == (std::size_t{1} << (n * r)), ErrorCode::DimensionMismatch,
          "joint law has the wrong length");
  double total = 0.0;
  for (double p : joint) {
    require(p >= -clamp_threshold, ErrorCode::InvalidArgument, "negative joint probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "joint law must sum to 1");
  const std::size_t points = std::size_t{1} << r;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> marginal(points, 0.0);
    for (std::size_t t = 0; t < joint.size(); ++t) {
      marginal[(t >> (i * r)) & (points - 1)] += joint[t];
    }
    for (std::size_t k = 0; k < points; ++k) {
      require(std::abs(marginal[k] - proc.steps[i].probabilities[k]) <= 1e-10, ErrorCode::InvalidArgument,
              "joint law does not marginalize to step " + std::to_string(i));
    }
  }
}

inline ProcessDistribution iid_process(const DiscreteDistribution& step, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "process needs at least one step");
  return {std::vector<DiscreteDistribution>(n, step), std::nullopt};
}

/// Probability of trajectory index t under the process (joint if present,
/// otherwise product of marginals).
inline double trajectory_probability(const ProcessDistribution& proc, std::size_t t) {
  if (proc.joint) {
    return proc.joint->at(t);
  }
  const std::size_t r = proc.step_resolution();
  const std::size_t mask = (std::size_t{1} << r) - 1;
  double p = 1.0;
  for (std::size_t i = 0; i < proc.num_steps(); ++i) {
    p *= proc.steps[i].probabilities[(t >> (i * r)) & mask];
  }
  return p;
}

/// Step i occupies qubits i*r .. i*r + r - 1.
inline Circuit process_loader(const ProcessDistribution& proc, LoaderBackend backend = LoaderBackend::RyTree) {
  validate(proc);
  const std::size_t r = proc.step_resolution();
  Circuit c(proc.width());
  if (proc.joint) {
    auto joint = make_distribution(*proc.joint);
    c.append(loader_circuit(joint, backend));
    return c;
  }
  for (std::size_t i = 0; i < proc.num_steps(); ++i) {
    std::vector<Qubit> map(r);
    std::iota(map.begin(), map.end(), i * r);
    c.append(loader_circuit(proc.steps[i], backend), map);
  }
  return c;
}

} // namespace qinsure
