#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qinsure/circuit.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"

namespace qinsure {

inline void check_budget(std::size_t num_qubits) {
  const std::size_t limit = qubit_limit();
  require(num_qubits <= limit, ErrorCode::QubitBudget,
          "circuit needs " + std::to_string(num_qubits) + " qubits, budget is " +
              std::to_string(limit));
}

class StateVector {
public:
  /// |0...0> on `num_qubits` qubits.
  explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    check_budget(num_qubits);
    amps_.assign(std::size_t{1} << num_qubits, cplx{});
    amps_[0] = 1.0;
  }

  static StateVector basis(std::size_t num_qubits, std::uint64_t index) {
    StateVector sv(num_qubits);
    require(index < sv.amps_.size(), ErrorCode::OutOfRange, "basis index out of range");
    sv.amps_[0] = 0.0;
    sv.amps_[index] = 1.0;
    return sv;
  }

  static StateVector from_amplitudes(std::vector<cplx> amps) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amps.size()) {
      ++n;
    }
    require(!amps.empty() && (std::size_t{1} << n) == amps.size(), ErrorCode::DimensionMismatch,
            "amplitude count must be a power of two");
    StateVector sv(n);
    sv.amps_ = std::move(amps);
    return sv;
  }

  [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
  [[nodiscard]] std::size_t dimension() const { return amps_.size(); }
  [[nodiscard]] const std::vector<cplx>& amplitudes() const { return amps_; }
  [[nodiscard]] cplx amplitude(std::uint64_t index) const { return amps_.at(index); }

  void apply(const GateOp& op);

  void run(const Circuit& circuit) {
    require(circuit.num_qubits() == num_qubits_, ErrorCode::DimensionMismatch,
            "circuit width differs from state width");
    for (const auto& op : circuit.ops()) {
      apply(op);
    }
  }

  /// Runs the circuit and calls `visit` with each marker and the state at it.
  void run(const Circuit& circuit,
           const std::function<void(const Marker&, const StateVector&)>& visit) {
    require(circuit.num_qubits() == num_qubits_, ErrorCode::DimensionMismatch,
            "circuit width differs from state width");
    const auto& ops = circuit.ops();
    const auto& markers = circuit.markers();
    std::size_t next = 0;
    auto emit = [&](std::size_t position) {
      for (const auto& m : markers) {
        if (m.position == position) {
          visit(m, *this);
        }
      }
    };
    emit(0);
    for (; next < ops.size(); ++next) {
      apply(ops[next]);
      emit(next + 1);
    }
  }

  [[nodiscard]] std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      p[i] = std::norm(amps_[i]);
    }
    return p;
  }

  /// Outcome distribution of `qubits`; bit b of the outcome index is qubits[b].
  [[nodiscard]] std::vector<double> marginal(const std::vector<Qubit>& qubits) const {
    for (Qubit q : qubits) {
      require(q < num_qubits_, ErrorCode::OutOfRange, "marginal qubit out of range");
    }
    std::vector<double> p(std::size_t{1} << qubits.size(), 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      const double w = std::norm(amps_[i]);
      if (w == 0.0) {
        continue;
      }
      std::size_t k = 0;
      for (std::size_t b = 0; b < qubits.size(); ++b) {
        k |= ((i >> qubits[b]) & 1U) << b;
      }
      p[k] += w;
    }
    return p;
  }

  [[nodiscard]] std::map<std::uint64_t, std::uint64_t>
  sample(const std::vector<Qubit>& qubits, std::uint64_t shots, std::uint64_t seed) const {
    require(shots >= 1, ErrorCode::InvalidArgument, "shots must be at least 1");
    const auto p = marginal(qubits);
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::uint64_t> dist(p.begin(), p.end());
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
      ++counts[dist(rng)];
    }
    return counts;
  }

  [[nodiscard]] double norm() const {
    double total = 0.0;
    for (const auto& a : amps_) {
      total += std::norm(a);
    }
    return std::sqrt(total);
  }

private:
  [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> control_mask(const GateOp& op) const {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
    for (const auto& c : op.controls) {
      mask |= std::uint64_t{1} << c.qubit;
      if (c.on_one) {
        value |= std::uint64_t{1} << c.qubit;
      }
    }
    return {mask, value};
  }

  void apply_2x2(Qubit target, const std::array<cplx, 4>& u, std::uint64_t mask, std::uint64_t value) {
    const std::uint64_t bit = std::uint64_t{1} << target;
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
      if ((i & bit) || (i & mask) != value) {
        continue;
      }
      const cplx a0 = amps_[i];
      const cplx a1 = amps_[i | bit];
      amps_[i] = u[0] * a0 + u[1] * a1;
      amps_[i | bit] = u[2] * a0 + u[3] * a1;
    }
  }

  std::size_t num_qubits_ = 0;
  std::vector<cplx> amps_;
};

inline void StateVector::apply(const GateOp& op) {
  validate(op, num_qubits_);
  const auto [mask, value] = control_mask(op);
  switch (op.kind) {
  case GateKind::Swap: {
    const std::uint64_t a = std::uint64_t{1} << op.targets[0];
    const std::uint64_t b = std::uint64_t{1} << op.targets[1];
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
      if ((i & a) && !(i & b) && (i & mask) == value) {
        std::swap(amps_[i], amps_[(i & ~a) | b]);
      }
    }
    break;
  }
  case GateKind::MuxRY: {
    const std::uint64_t bit = std::uint64_t{1} << op.targets[0];
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
      if ((i & bit) || (i & mask) != value) {
        continue;
      }
      std::size_t sel = 0;
      for (std::size_t b = 0; b < op.select.size(); ++b) {
        sel |= ((i >> op.select[b]) & 1U) << b;
      }
      const double c = std::cos(op.angles[sel] / 2.0);
      const double s = std::sin(op.angles[sel] / 2.0);
      const cplx a0 = amps_[i];
      const cplx a1 = amps_[i | bit];
      amps_[i] = c * a0 - s * a1;
      amps_[i | bit] = s * a0 + c * a1;
    }
    break;
  }
  case GateKind::Matrix: {
    const auto& u = op.matrix->unitary;
    const std::size_t k = op.targets.size();
    std::uint64_t target_mask = 0;
    std::vector<std::uint64_t> offsets(u.dim, 0);
    for (std::size_t local = 0; local < u.dim; ++local) {
      for (std::size_t j = 0; j < k; ++j) {
        if ((local >> j) & 1U) {
          offsets[local] |= std::uint64_t{1} << op.targets[j];
        }
      }
    }
    for (Qubit t : op.targets) {
      target_mask |= std::uint64_t{1} << t;
    }
    std::vector<cplx> in(u.dim);
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
      if ((i & target_mask) || (i & mask) != value) {
        continue;
      }
      for (std::size_t l = 0; l < u.dim; ++l) {
        in[l] = amps_[i | offsets[l]];
      }
      for (std::size_t r = 0; r < u.dim; ++r) {
        cplx acc{};
        for (std::size_t c = 0; c < u.dim; ++c) {
          acc += u(r, c) * in[c];
        }
        amps_[i | offsets[r]] = acc;
      }
    }
    break;
  }
  default:
    apply_2x2(op.targets[0], single_qubit_matrix(op), mask, value);
  }
}

/// |<a|b>|^2
inline double fidelity(const StateVector& a, const StateVector& b) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "state widths differ");
  cplx overlap{};
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    overlap += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  }
  return std::norm(overlap);
}

inline StateVector simulate(const Circuit& circuit) {
  StateVector sv(circuit.num_qubits());
  sv.run(circuit);
  return sv;
}

/// Dense unitary of a circuit, column j = circuit applied to |j>.
inline DenseMatrix unitary(const Circuit& circuit) {
  require(circuit.num_qubits() <= 14, ErrorCode::QubitBudget, "dense unitary limited to 14 qubits");
  const std::size_t dim = std::size_t{1} << circuit.num_qubits();
  DenseMatrix u(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    auto sv = StateVector::basis(circuit.num_qubits(), j);
    sv.run(circuit);
    for (std::size_t i = 0; i < dim; ++i) {
      u(i, j) = sv.amplitudes()[i];
    }
  }
  return u;
}

/// Distance between unitaries modulo a global phase: 1 - |tr(A†B)|/dim.
inline double phase_insensitive_distance(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.dim == b.dim, ErrorCode::DimensionMismatch, "matrix dimensions differ");
  cplx tr{};
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    tr += std::conj(a.data[i]) * b.data[i];
  }
  return 1.0 - std::abs(tr) / static_cast<double>(a.dim);
}

} // namespace qinsure
