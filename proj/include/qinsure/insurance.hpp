#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qinsure/circuit.hpp"
#include "qinsure/distributions.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"
#include "qinsure/state_vector.hpp"

namespace qinsure {

struct MortalityTable {
  int x = 0;
  std::vector<double> q;
};

/// Deferred death probabilities w_i = prod_{j<i} (1 - q_j) * q_i.
inline std::vector<double> mortality_weights(const MortalityTable& table, std::size_t n) {
  require(n <= table.q.size(), ErrorCode::InvalidArgument, "mortality table shorter than horizon");
  std::vector<double> w(n);
  double survive = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = table.q[i];
    require(q >= 0.0 && q <= 1.0, ErrorCode::InvalidArgument, "mortality rate outside [0, 1]");
    w[i] = survive * q;
    survive *= 1.0 - q;
  }
  return w;
}

inline std::size_t sum_register_size(std::uint64_t total) {
  std::size_t s = 1;
  while ((total >> s) != 0) {
    ++s;
  }
  return s;
}

/// Adds 2^b to the register `sum` (little endian) when all `controls` hold.
inline void add_power_of_two(Circuit& c, const std::vector<Control>& controls, const std::vector<Qubit>& sum,
                             std::size_t b) {
  for (std::size_t t = sum.size(); t-- > b;) {
    std::vector<Control> ctl = controls;
    for (std::size_t u = b; u < t; ++u) {
      ctl.push_back({sum[u], true});
    }
    c.add(gates::controlled(gates::x(sum[t]), ctl));
  }
}

/// Adds sum_j weights[j] * bit(inputs[j]) into `sum`. Fails when the largest
/// possible total does not fit.
inline void add_weighted(Circuit& c, const std::vector<Qubit>& inputs, const std::vector<std::uint64_t>& weights,
                         const std::vector<Qubit>& sum) {
  require(inputs.size() == weights.size(), ErrorCode::DimensionMismatch, "one weight per input qubit");
  const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  require(sum.size() < 64 && (total >> sum.size()) == 0, ErrorCode::Overflow, "sum register too small");
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    for (std::size_t b = 0; b < sum.size(); ++b) {
      if ((weights[j] >> b) & 1U) {
        add_power_of_two(c, {{inputs[j], true}}, sum, b);
      }
    }
  }
}

/// |k>_r |0>_s -> |k>_r |sum_j w_j k_j>_s with s = floor(log2 sum w) + 1.
inline Circuit weighted_adder_circuit(const std::vector<std::uint64_t>& weights, std::size_t state_qubits) {
  require(weights.size() == state_qubits, ErrorCode::DimensionMismatch, "one weight per state qubit");
  const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  const std::size_t s = sum_register_size(total);
  Circuit c(state_qubits + s);
  std::vector<Qubit> inputs(state_qubits);
  std::iota(inputs.begin(), inputs.end(), Qubit{0});
  std::vector<Qubit> sum(s);
  std::iota(sum.begin(), sum.end(), state_qubits);
  add_weighted(c, inputs, weights, sum);
  return c;
}

struct WholeLifeCircuit {
  Circuit circuit;
  std::vector<std::uint64_t> integer_weights;
  std::vector<Qubit> sum_register;
  std::uint64_t scale = 1;
};

inline void require_common_grid(const ProcessDistribution& proc) {
  for (const auto& s : proc.steps) {
    require(s.z_min == proc.steps.front().z_min && s.z_max == proc.steps.front().z_max, ErrorCode::InvalidArgument,
            "all steps must share one grid");
  }
}

/// Loads the process and accumulates sum_i W_i k_i, W_i = round(w_i * scale),
/// with digit j of step i weighted W_i 2^j.
inline WholeLifeCircuit whole_life_circuit(const ProcessDistribution& proc, const std::vector<double>& weights,
                                           std::int64_t scale) {
  validate(proc);
  require_common_grid(proc);
  require(scale > 0, ErrorCode::InvalidArgument, "scale must be positive");
  require(weights.size() == proc.num_steps(), ErrorCode::DimensionMismatch, "one weight per step");
  const std::size_t n = proc.num_steps();
  const std::size_t r = proc.step_resolution();
  WholeLifeCircuit out;
  out.scale = static_cast<std::uint64_t>(scale);
  std::vector<Qubit> inputs;
  std::vector<std::uint64_t> digit_weights;
  for (std::size_t i = 0; i < n; ++i) {
    require(weights[i] >= 0.0, ErrorCode::InvalidArgument, "weights must be non-negative");
    const auto w = static_cast<std::uint64_t>(std::llround(weights[i] * static_cast<double>(scale)));
    out.integer_weights.push_back(w);
    for (std::size_t j = 0; j < r; ++j) {
      inputs.push_back(i * r + j);
      digit_weights.push_back(w << j);
    }
  }
  const std::uint64_t total = std::accumulate(digit_weights.begin(), digit_weights.end(), std::uint64_t{0});
  const std::size_t s = sum_register_size(total);
  out.circuit = Circuit(n * r + s);
  out.circuit.append(process_loader(proc));
  out.circuit.mark("load");
  out.sum_register.resize(s);
  std::iota(out.sum_register.begin(), out.sum_register.end(), n * r);
  add_weighted(out.circuit, inputs, digit_weights, out.sum_register);
  out.circuit.mark("sum");
  return out;
}

struct WholeLifeReport {
  std::vector<double> sum_distribution;
  double quantum_pv = 0.0;
  double classical_pv = 0.0;
  double quantization_bound = 0.0;
};

/// sum_i w_i E[Z_i]
inline double classical_whole_life_pv(const ProcessDistribution& proc, const std::vector<double>& weights) {
  double pv = 0.0;
  for (std::size_t i = 0; i < proc.num_steps(); ++i) {
    pv += weights.at(i) * expected_value(proc.steps[i]);
  }
  return pv;
}

inline WholeLifeReport whole_life_report(const ProcessDistribution& proc, const std::vector<double>& weights,
                                         std::int64_t scale) {
  const auto wl = whole_life_circuit(proc, weights, scale);
  const auto sv = simulate(wl.circuit);
  WholeLifeReport rep;
  rep.sum_distribution = sv.marginal(wl.sum_register);
  const auto& grid = proc.steps.front();
  const std::size_t r = grid.resolution;
  const double delta = (grid.z_max - grid.z_min) / (std::ldexp(1.0, static_cast<int>(r)) - 1.0);
  double mean_sum = 0.0;
  for (std::size_t k = 0; k < rep.sum_distribution.size(); ++k) {
    mean_sum += rep.sum_distribution[k] * static_cast<double>(k);
  }
  const double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
  rep.quantum_pv = grid.z_min * total_w + delta * mean_sum / static_cast<double>(scale);
  rep.classical_pv = classical_whole_life_pv(proc, weights);
  rep.quantization_bound =
      static_cast<double>(proc.num_steps()) / (2.0 * static_cast<double>(scale)) * (grid.z_max - grid.z_min);
  return rep;
}

/// Multiplexed RY with angle 2 arcsin(sqrt(p(k))) on qubit r, select 0..r-1.
inline Circuit lapse_laf(const std::vector<double>& p, std::size_t r) {
  require(p.size() == (std::size_t{1} << r), ErrorCode::DimensionMismatch, "one lapse rate per grid point");
  std::vector<double> angles(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    require(p[k] >= 0.0 && p[k] <= 1.0, ErrorCode::InvalidArgument, "lapse rate outside [0, 1]");
    angles[k] = 2.0 * std::asin(std::sqrt(p[k]));
  }
  std::vector<Qubit> select(r);
  std::iota(select.begin(), select.end(), Qubit{0});
  Circuit c(r + 1);
  c.add(gates::mux_ry(std::move(select), r, std::move(angles)));
  return c;
}

/// Per-step lapse rates indexed by grid point. The terminal step is
/// implicitly p = 1; passing it explicitly is allowed if it is all ones.
struct LapseModel {
  std::vector<std::vector<double>> rates;
};

struct DynamicLapseLayout {
  std::size_t steps = 0;
  std::size_t resolution = 0;

  [[nodiscard]] Qubit dist(std::size_t i, std::size_t j) const { return i * resolution + j; }
  [[nodiscard]] Qubit lapse(std::size_t i) const { return steps * resolution + i; }
  [[nodiscard]] Qubit result(std::size_t j) const { return steps * resolution + steps + j; }
  [[nodiscard]] std::size_t workspace_size() const { return resolution + 1; }
  [[nodiscard]] Qubit workspace(std::size_t i, std::size_t j) const {
    return steps * resolution + steps + resolution + i * workspace_size() + j;
  }
  [[nodiscard]] std::size_t width() const {
    return steps * resolution + steps + resolution + (steps - 1) * workspace_size();
  }
  [[nodiscard]] std::vector<Qubit> lapse_register() const {
    std::vector<Qubit> q(steps);
    std::iota(q.begin(), q.end(), lapse(0));
    return q;
  }
  [[nodiscard]] std::vector<Qubit> result_register() const {
    std::vector<Qubit> q(resolution);
    std::iota(q.begin(), q.end(), result(0));
    return q;
  }
  [[nodiscard]] std::vector<Qubit> workspace_block(std::size_t i) const {
    std::vector<Qubit> q(workspace_size());
    std::iota(q.begin(), q.end(), workspace(i, 0));
    return q;
  }
};

/// Lapse rates for steps 0..n-2 after checking the model against the process.
inline std::vector<std::vector<double>> checked_lapse_rates(const ProcessDistribution& proc, const LapseModel& lapse) {
  const std::size_t n = proc.num_steps();
  const std::size_t points = std::size_t{1} << proc.step_resolution();
  require(lapse.rates.size() == n || lapse.rates.size() + 1 == n, ErrorCode::DimensionMismatch,
          "lapse model must have n or n-1 steps");
  for (const auto& step : lapse.rates) {
    require(step.size() == points, ErrorCode::DimensionMismatch, "one lapse rate per grid point");
    for (double p : step) {
      require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "lapse rate outside [0, 1]");
    }
  }
  if (lapse.rates.size() == n) {
    for (double p : lapse.rates.back()) {
      require(p == 1.0, ErrorCode::InvalidArgument, "terminal lapse rate must be 1");
    }
  }
  return {lapse.rates.begin(), lapse.rates.begin() + static_cast<std::ptrdiff_t>(n - 1)};
}

struct DynamicLapseCircuit {
  Circuit circuit;
  DynamicLapseLayout layout;
};

/// Markers: "1" after loading, "2.i" after the i-th lapse event, "3.i" after
/// copying step i into the result register.
inline DynamicLapseCircuit dynamic_lapse_circuit(const ProcessDistribution& proc, const LapseModel& lapse) {
  validate(proc);
  const std::size_t n = proc.num_steps();
  const std::size_t r = proc.step_resolution();
  for (const auto& s : proc.steps) {
    require(s.probabilities[0] == 0.0, ErrorCode::InvalidArgument, "grid point 0 must carry no mass");
  }
  const auto rates = checked_lapse_rates(proc, lapse);
  const DynamicLapseLayout lay{n, r};
  check_budget(lay.width());
  Circuit c(lay.width());
  c.append(process_loader(proc));
  c.mark("1");

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<Qubit> map(r + 1);
    for (std::size_t j = 0; j < r; ++j) {
      map[j] = lay.dist(i, j);
    }
    map[r] = lay.lapse(i);
    GateOp laf = remap(lapse_laf(rates[i], r).ops().front(), map);
    for (std::size_t j = 0; j < i; ++j) {
      laf.controls.push_back({lay.lapse(j), false});
    }
    laf.ancillas = lay.workspace_block(i);
    c.add(std::move(laf));
    c.mark("2." + std::to_string(i + 1));
  }
  GateOp last = gates::x(lay.lapse(n - 1));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    last.controls.push_back({lay.lapse(j), false});
  }
  if (n >= 2) {
    last.ancillas = lay.workspace_block(n - 2);
  }
  c.add(std::move(last));
  c.mark("2." + std::to_string(n));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      c.add(gates::ccnot(lay.lapse(i), lay.dist(i, j), lay.result(j)));
    }
    c.mark("3." + std::to_string(i + 1));
  }
  return {std::move(c), lay};
}

struct MarkerDistribution {
  std::string marker;
  std::vector<double> probabilities;
};

struct PayoffReport {
  std::vector<MarkerDistribution> lapse;
  std::vector<MarkerDistribution> result;
  double pv = 0.0;
};

/// Register laws at each marker of a dynamic-lapse circuit. Lapse laws are
/// taken at markers 1, 2.1 .. 2.n (times t = 0..n), result laws at 2.n and
/// 3.1 .. 3.n.
inline PayoffReport payoff_report(const DynamicLapseCircuit& dl, const ProcessDistribution& proc) {
  const auto& lay = dl.layout;
  const std::string last_lapse = "2." + std::to_string(lay.steps);
  PayoffReport rep;
  StateVector sv(lay.width());
  sv.run(dl.circuit, [&](const Marker& m, const StateVector& s) {
    if (m.name == "1" || m.name.rfind("2.", 0) == 0) {
      rep.lapse.push_back({m.name, s.marginal(lay.lapse_register())});
    }
    if (m.name == last_lapse || m.name.rfind("3.", 0) == 0) {
      rep.result.push_back({m.name, s.marginal(lay.result_register())});
    }
  });
  const auto& final_law = rep.result.back().probabilities;
  for (std::size_t k = 1; k < final_law.size(); ++k) {
    rep.pv += final_law[k] * grid_value(k, proc.steps.front());
  }
  return rep;
}

struct LapseOracle {
  // Indexed by the one-hot lapse register value 2^i.
  std::vector<double> lapse_law;
  // Law of the grid index of Z at the stopping time.
  std::vector<double> result_law;
  double pv = 0.0;
};

/// Brute force over all trajectories with the product formula
/// P(tau = i | z) = prod_{j<i} (1 - p_j(z_j)) * p_i(z_i).
inline LapseOracle enumerate_dynamic_lapse(const ProcessDistribution& proc, const LapseModel& lapse) {
  validate(proc);
  const std::size_t n = proc.num_steps();
  const std::size_t r = proc.step_resolution();
  const std::size_t points = std::size_t{1} << r;
  auto rates = checked_lapse_rates(proc, lapse);
  rates.emplace_back(points, 1.0);
  LapseOracle out;
  out.lapse_law.assign(std::size_t{1} << n, 0.0);
  out.result_law.assign(points, 0.0);
  const std::size_t trajectories = std::size_t{1} << (n * r);
  for (std::size_t t = 0; t < trajectories; ++t) {
    const double pt = trajectory_probability(proc, t);
    double survive = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (t >> (i * r)) & (points - 1);
      const double stop = survive * rates[i][k];
      survive *= 1.0 - rates[i][k];
      out.lapse_law[std::size_t{1} << i] += pt * stop;
      out.result_law[k] += pt * stop;
      out.pv += pt * stop * grid_value(k, proc.steps[i]);
    }
  }
  return out;
}

} // namespace qinsure
