#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qinsure/circuit.hpp"
#include "qinsure/distributions.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"
#include "qinsure/qft.hpp"
#include "qinsure/state_vector.hpp"

namespace qinsure {

enum class EncoderMode { Linear, Exact };

inline std::string to_string(EncoderMode mode) { return mode == EncoderMode::Linear ? "linear" : "exact"; }

inline EncoderMode parse_mode(const std::string& s) {
  if (s == "linear") {
    return EncoderMode::Linear;
  }
  if (s == "exact") {
    return EncoderMode::Exact;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

inline constexpr double default_c_approx = 0.25;

/// F = E1 (A x I) on r + 1 qubits; the objective ancilla is qubit r.
struct ExpectationEncoder {
  Circuit circuit;
  DiscreteDistribution dist;
  EncoderMode mode = EncoderMode::Exact;
  double c_approx = default_c_approx;

  [[nodiscard]] std::size_t resolution() const { return dist.resolution; }
  [[nodiscard]] Qubit ancilla() const { return dist.resolution; }
  [[nodiscard]] std::size_t width() const { return dist.resolution + 1; }
};

/// Rotation angle applied to the ancilla for grid index k.
inline double encoder_angle(std::size_t k, std::size_t r, EncoderMode mode, double c_approx) {
  const double points = std::ldexp(1.0, static_cast<int>(r));
  if (mode == EncoderMode::Exact) {
    return 2.0 * std::asin(std::sqrt(static_cast<double>(k) / (points - 1.0)));
  }
  return 2.0 * c_approx * static_cast<double>(k) / points - c_approx + pi / 2.0;
}

inline ExpectationEncoder encode_expectation(const Circuit& loader, const DiscreteDistribution& dist,
                                             EncoderMode mode = EncoderMode::Exact,
                                             double c_approx = default_c_approx) {
  const std::size_t r = dist.resolution;
  require(loader.num_qubits() == r, ErrorCode::DimensionMismatch, "loader width differs from resolution");
  if (mode == EncoderMode::Linear) {
    require(c_approx > 0.0 && c_approx <= 0.5, ErrorCode::InvalidArgument, "c_approx must be in (0, 0.5]");
  }
  ExpectationEncoder enc{Circuit(r + 1), dist, mode, c_approx};
  enc.circuit.append(loader);
  if (mode == EncoderMode::Linear) {
    const double base = 2.0 * c_approx / std::ldexp(1.0, static_cast<int>(r));
    for (std::size_t i = 0; i < r; ++i) {
      enc.circuit.add(gates::controlled(gates::ry(r, base * std::ldexp(1.0, static_cast<int>(i))), {{i, true}}));
    }
    enc.circuit.add(gates::ry(r, pi / 2.0 - c_approx));
  } else {
    std::vector<Qubit> select(r);
    std::iota(select.begin(), select.end(), Qubit{0});
    std::vector<double> angles(dist.size());
    for (std::size_t k = 0; k < dist.size(); ++k) {
      angles[k] = encoder_angle(k, r, mode, c_approx);
    }
    enc.circuit.add(gates::mux_ry(std::move(select), r, std::move(angles)));
  }
  return enc;
}

inline ExpectationEncoder encode_expectation(const DiscreteDistribution& dist, EncoderMode mode = EncoderMode::Exact,
                                             double c_approx = default_c_approx) {
  return encode_expectation(loader_circuit(dist), dist, mode, c_approx);
}

/// Encoder whose ancilla-|1> probability is exactly p.
inline ExpectationEncoder encoder_for_probability(double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "probability out of [0, 1]");
  return encode_expectation(make_distribution({1.0 - p, p}), EncoderMode::Exact);
}

/// p = sum_k a_k sin^2(theta_k / 2).
inline double encoded_probability(const ExpectationEncoder& enc) {
  double p = 0.0;
  for (std::size_t k = 0; k < enc.dist.size(); ++k) {
    const double s = std::sin(encoder_angle(k, enc.resolution(), enc.mode, enc.c_approx) / 2.0);
    p += enc.dist.probabilities[k] * s * s;
  }
  return p;
}

inline Circuit v_operator(std::size_t r) {
  Circuit c(r + 1);
  c.add(gates::z(r));
  return c;
}

/// I - 2|0><0| on n qubits.
inline Circuit reflection_zero(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "reflection needs at least one qubit");
  Circuit c(n);
  for (Qubit q = 0; q < n; ++q) {
    c.add(gates::x(q));
  }
  std::vector<Control> controls;
  for (Qubit q = 0; q + 1 < n; ++q) {
    controls.push_back({q, true});
  }
  c.add(gates::controlled(gates::z(n - 1), controls));
  for (Qubit q = 0; q < n; ++q) {
    c.add(gates::x(q));
  }
  return c;
}

/// One Grover iterate Q = F (I - 2|0><0|) F^dag (-V). On the plane spanned by
/// F|0> it rotates by theta = 2 arcsin(sqrt(p)). The sign is carried by
/// X Z X on the ancilla so that controlled powers have the right eigenphases.
inline Circuit grover_operator(const ExpectationEncoder& enc) {
  const std::size_t n = enc.width();
  Circuit c(n);
  c.add(gates::x(enc.ancilla()));
  c.append(v_operator(enc.resolution()));
  c.add(gates::x(enc.ancilla()));
  c.append(enc.circuit.adjoint());
  c.append(reflection_zero(n));
  c.append(enc.circuit);
  return c;
}

inline Circuit repeat(const Circuit& c, std::size_t times) {
  Circuit out(c.num_qubits());
  for (std::size_t i = 0; i < times; ++i) {
    out.append(c);
  }
  return out;
}

struct AeLayout {
  std::size_t state_qubits = 0;
  std::size_t query_qubits = 0;

  [[nodiscard]] std::vector<Qubit> query() const {
    std::vector<Qubit> q(query_qubits);
    std::iota(q.begin(), q.end(), state_qubits);
    return q;
  }
};

/// State register 0..r (ancilla r), query register r+1..r+m. Query qubit q
/// controls Q^(2^q); the inverse QFT then leaves l with theta ~ 2 pi l / 2^m.
/// With expand = false each controlled power is one Matrix gate whose
/// realization is Q repeated 2^q times; with expand = true the power is
/// emitted gate by gate.
inline Circuit ae_circuit(const ExpectationEncoder& enc, std::size_t m, bool expand = false) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be at least 1");
  const std::size_t state = enc.width();
  check_budget(state + m);
  Circuit c(state + m);
  c.append(enc.circuit);
  c.mark("load");
  for (std::size_t q = 0; q < m; ++q) {
    c.add(gates::h(state + q));
  }
  c.mark("hadamard");
  const Circuit q_op = grover_operator(enc);
  std::vector<Qubit> targets(state);
  std::iota(targets.begin(), targets.end(), Qubit{0});
  DenseMatrix power = expand ? DenseMatrix{} : unitary(q_op);
  for (std::size_t q = 0; q < m; ++q) {
    const Control ctl{state + q, true};
    const std::size_t times = std::size_t{1} << q;
    if (expand) {
      for (std::size_t t = 0; t < times; ++t) {
        for (const auto& op : q_op.ops()) {
          c.add(gates::controlled(op, {ctl}));
        }
      }
    } else {
      auto realization = std::make_shared<const Circuit>(repeat(q_op, times));
      c.add(gates::controlled(gates::matrix(targets, power, "Q^" + std::to_string(times), realization), {ctl}));
      power = power * power;
    }
  }
  c.mark("grover");
  c.append(iqft_circuit(m), AeLayout{state, m}.query());
  c.mark("iqft");
  return c;
}

struct AeResult {
  std::size_t m = 0;
  std::vector<double> outcomes;
  std::size_t l_hat = 0;
  double x_hat = 0.0;
  double mu_hat = 0.0;
  double expected_value = 0.0;
  EncoderMode mode = EncoderMode::Exact;
  double c_approx = default_c_approx;
};

inline double mu_from_outcome(std::size_t l, std::size_t m) {
  const double s = std::sin(pi * static_cast<double>(l) / std::ldexp(1.0, static_cast<int>(m)));
  return s * s;
}

/// Maps an estimate of the ancilla probability back to E[Z].
inline double expected_value_from_mu(double mu, const ExpectationEncoder& enc) {
  const auto& d = enc.dist;
  if (enc.mode == EncoderMode::Exact) {
    return d.z_min + (d.z_max - d.z_min) * mu;
  }
  const double points = std::ldexp(1.0, static_cast<int>(d.resolution));
  const double half_angle = pi * ((mu - 0.5) / enc.c_approx + 0.5);
  const double mean_index = half_angle * points / pi;
  return d.z_min + (d.z_max - d.z_min) / (points - 1.0) * mean_index;
}

inline AeResult estimate(const std::vector<double>& outcomes, const ExpectationEncoder& enc) {
  require(!outcomes.empty(), ErrorCode::InvalidArgument, "empty outcome distribution");
  std::size_t m = 0;
  while ((std::size_t{1} << m) < outcomes.size()) {
    ++m;
  }
  require((std::size_t{1} << m) == outcomes.size() && m >= 1, ErrorCode::DimensionMismatch,
          "outcome distribution length must be 2^m");
  AeResult res;
  res.m = m;
  res.outcomes = outcomes;
  res.l_hat = static_cast<std::size_t>(std::max_element(outcomes.begin(), outcomes.end()) - outcomes.begin());
  res.x_hat = static_cast<double>(res.l_hat) / static_cast<double>(outcomes.size());
  res.mu_hat = mu_from_outcome(res.l_hat, m);
  res.expected_value = expected_value_from_mu(res.mu_hat, enc);
  res.mode = enc.mode;
  res.c_approx = enc.c_approx;
  return res;
}

/// Analytic outcome distribution of the query register.
inline std::vector<double> ae_outcomes(const ExpectationEncoder& enc, std::size_t m) {
  const Circuit c = ae_circuit(enc, m);
  const auto sv = simulate(c);
  return sv.marginal(AeLayout{enc.width(), m}.query());
}

/// Outcome frequencies from `shots` samples of the query register.
inline std::vector<double> ae_sampled_outcomes(const ExpectationEncoder& enc, std::size_t m, std::uint64_t shots,
                                               std::uint64_t seed) {
  const auto sv = simulate(ae_circuit(enc, m));
  const auto counts = sv.sample(AeLayout{enc.width(), m}.query(), shots, seed);
  std::vector<double> freq(std::size_t{1} << m, 0.0);
  for (const auto& [l, n] : counts) {
    freq[l] = static_cast<double>(n) / static_cast<double>(shots);
  }
  return freq;
}

inline AeResult run_ae(const ExpectationEncoder& enc, std::size_t m) { return estimate(ae_outcomes(enc, m), enc); }

/// Mass on the grid points flanking x = arcsin(sqrt(p)) / pi and their mirror
/// images M - l.
inline double two_neighbor_mass(const std::vector<double>& outcomes, double p) {
  const std::size_t big_m = outcomes.size();
  const double x = std::asin(std::sqrt(p)) / pi;
  const auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(big_m) * x));
  std::vector<std::size_t> points = {lo % big_m, (lo + 1) % big_m, (big_m - lo % big_m) % big_m,
                                     (big_m - (lo + 1) % big_m) % big_m};
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double mass = 0.0;
  for (auto l : points) {
    mass += outcomes[l];
  }
  return mass;
}

/// Classical comparator: mean of `shots` grid values drawn from a_k.
inline double mc_baseline(const DiscreteDistribution& dist, std::uint64_t shots, std::uint64_t seed) {
  require(shots >= 1, ErrorCode::InvalidArgument, "shots must be at least 1");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> draw(dist.probabilities.begin(), dist.probabilities.end());
  double sum = 0.0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    sum += grid_value(draw(rng), dist);
  }
  return sum / static_cast<double>(shots);
}

} // namespace qinsure
