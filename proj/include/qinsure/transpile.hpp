#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qinsure/circuit.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"

namespace qinsure {

enum class BasisKind : std::uint8_t { CNOT, ID, RZ, SX, X };

inline std::string to_string(BasisKind k) {
  switch (k) {
  case BasisKind::CNOT:
    return "CNOT";
  case BasisKind::ID:
    return "ID";
  case BasisKind::RZ:
    return "RZ";
  case BasisKind::SX:
    return "SX";
  case BasisKind::X:
    return "X";
  }
  return "?";
}

struct BasisOp {
  BasisKind kind = BasisKind::ID;
  Qubit target = 0;
  // CNOT only.
  Qubit control = 0;
  // RZ only.
  double angle = 0.0;
};

struct BasisProgram {
  std::size_t num_qubits = 0;
  // Workspace qubits added beyond the source circuit's width.
  std::size_t extra_ancillas = 0;
  std::vector<BasisOp> ops;
  // Number of basis ops emitted up to each source marker, in marker order.
  std::vector<std::pair<std::string, std::size_t>> marker_positions;
};

/// Lowered program as a circuit of ordinary gates, for re-simulation.
inline Circuit to_circuit(const BasisProgram& prog) {
  Circuit c(prog.num_qubits);
  for (const auto& op : prog.ops) {
    switch (op.kind) {
    case BasisKind::CNOT:
      c.add(gates::cnot(op.control, op.target));
      break;
    case BasisKind::RZ:
      c.add(gates::rz(op.target, op.angle));
      break;
    case BasisKind::SX:
      c.add(gates::sx(op.target));
      break;
    case BasisKind::X:
      c.add(gates::x(op.target));
      break;
    case BasisKind::ID:
      break;
    }
  }
  return c;
}

namespace detail {

using Mat2 = std::array<cplx, 4>;

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 rz_mat(double t) {
  using namespace std::complex_literals;
  return {std::exp(-0.5i * t), 0.0, 0.0, std::exp(0.5i * t)};
}

inline Mat2 ry_mat(double t) {
  return {std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2)};
}

/// U = exp(i alpha) RZ(beta) RY(gamma) RZ(delta).
struct Zyz {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

inline Zyz zyz(const Mat2& u) {
  const cplx det = u[0] * u[3] - u[1] * u[2];
  const cplx root = std::sqrt(det);
  Mat2 v{u[0] / root, u[1] / root, u[2] / root, u[3] / root};
  Zyz d;
  d.alpha = std::arg(root);
  const double c = std::abs(v[0]);
  const double s = std::abs(v[2]);
  d.gamma = 2.0 * std::atan2(s, c);
  if (s < 1e-12) {
    d.beta = 2.0 * std::arg(v[3]);
    d.delta = 0.0;
  } else if (c < 1e-12) {
    d.beta = 2.0 * std::arg(v[2]);
    d.delta = 0.0;
  } else {
    const double sum = 2.0 * std::arg(v[3]);
    const double diff = 2.0 * std::arg(v[2]);
    d.beta = (sum + diff) / 2.0;
    d.delta = (sum - diff) / 2.0;
  }
  return d;
}

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a;
}

inline bool is_zero_angle(double a) { return std::abs(wrap_angle(a)) < 1e-12; }

} // namespace detail

/// Lowers gates to {CNOT, ID, RZ, SX, X}. Global phase is not tracked.
class Transpiler {
public:
  explicit Transpiler(std::size_t num_qubits) : num_qubits_(num_qubits) {}

  BasisProgram run(const Circuit& circuit) {
    require(circuit.num_qubits() == num_qubits_, ErrorCode::DimensionMismatch, "transpiler width mismatch");
    auto markers = circuit.markers();
    std::stable_sort(markers.begin(), markers.end(),
                     [](const Marker& a, const Marker& b) { return a.position < b.position; });
    std::size_t next_marker = 0;
    std::size_t segment_start = 0;
    BasisProgram prog;
    auto flush_markers = [&](std::size_t position) {
      while (next_marker < markers.size() && markers[next_marker].position == position) {
        peephole(segment_start);
        segment_start = out_.size();
        prog.marker_positions.emplace_back(markers[next_marker].name, out_.size());
        ++next_marker;
      }
    };
    flush_markers(0);
    for (std::size_t i = 0; i < circuit.size(); ++i) {
      const GateOp& op = circuit.ops()[i];
      declared_free_ = op.ancillas;
      lower(op);
      declared_free_.clear();
      flush_markers(i + 1);
    }
    peephole(segment_start);
    prog.num_qubits = num_qubits_ + pool_size_;
    prog.extra_ancillas = pool_size_;
    prog.ops = std::move(out_);
    return prog;
  }

private:
  // Basis emitters.
  void cx(Qubit c, Qubit t) { out_.push_back({BasisKind::CNOT, t, c, 0.0}); }
  void x(Qubit q) { out_.push_back({BasisKind::X, q, 0, 0.0}); }
  void sx(Qubit q) { out_.push_back({BasisKind::SX, q, 0, 0.0}); }
  void rz(Qubit q, double t) {
    if (!detail::is_zero_angle(t)) {
      out_.push_back({BasisKind::RZ, q, 0, detail::wrap_angle(t)});
    }
  }
  void h(Qubit q) {
    rz(q, pi / 2);
    sx(q);
    rz(q, pi / 2);
  }
  void ry(Qubit q, double t) {
    if (detail::is_zero_angle(t / 2.0)) {
      return;
    }
    sx(q);
    rz(q, t + pi);
    sx(q);
    rz(q, pi);
  }
  // RZ(delta), RY(gamma), RZ(beta) in time order.
  void zyz(Qubit q, const detail::Zyz& d) {
    if (detail::is_zero_angle(d.gamma / 2.0)) {
      rz(q, d.beta + d.delta);
      return;
    }
    rz(q, d.delta);
    sx(q);
    rz(q, d.gamma + pi);
    sx(q);
    rz(q, d.beta + pi);
  }

  void single(const GateOp& op) {
    const Qubit q = op.targets[0];
    switch (op.kind) {
    case GateKind::X:
      x(q);
      return;
    case GateKind::Y:
      rz(q, pi);
      x(q);
      return;
    case GateKind::Z:
      rz(q, pi);
      return;
    case GateKind::H:
      h(q);
      return;
    case GateKind::S:
      rz(q, op.dagger ? -pi / 2 : pi / 2);
      return;
    case GateKind::SX:
      if (op.dagger) {
        rz(q, pi);
        sx(q);
        rz(q, pi);
      } else {
        sx(q);
      }
      return;
    case GateKind::RY:
      ry(q, op.angle);
      return;
    case GateKind::RZ:
    case GateKind::Phase:
      rz(q, op.angle);
      return;
    default:
      zyz(q, detail::zyz(single_qubit_matrix(op)));
    }
  }

  void controlled_single(Qubit c, const GateOp& op) {
    const Qubit t = op.targets[0];
    switch (op.kind) {
    case GateKind::X:
      cx(c, t);
      return;
    case GateKind::Z:
      h(t);
      cx(c, t);
      h(t);
      return;
    case GateKind::RZ:
      rz(t, op.angle / 2);
      cx(c, t);
      rz(t, -op.angle / 2);
      cx(c, t);
      return;
    case GateKind::Phase:
      rz(c, op.angle / 2);
      cx(c, t);
      rz(t, -op.angle / 2);
      cx(c, t);
      rz(t, op.angle / 2);
      return;
    case GateKind::RY:
      ry(t, op.angle / 2);
      cx(c, t);
      ry(t, -op.angle / 2);
      cx(c, t);
      return;
    default:
      break;
    }
    // U = e^{i alpha} A X B X C with ABC = I.
    const auto d = detail::zyz(single_qubit_matrix(op));
    rz(t, (d.delta - d.beta) / 2);
    cx(c, t);
    zyz(t, detail::zyz(detail::mul(detail::ry_mat(-d.gamma / 2), detail::rz_mat(-(d.delta + d.beta) / 2))));
    cx(c, t);
    zyz(t, detail::zyz(detail::mul(detail::rz_mat(d.beta), detail::ry_mat(d.gamma / 2))));
    rz(c, d.alpha);
  }

  void toffoli(Qubit a, Qubit b, Qubit t) {
    const double q = pi / 4;
    h(t);
    cx(b, t);
    rz(t, -q);
    cx(a, t);
    rz(t, q);
    cx(b, t);
    rz(t, -q);
    cx(a, t);
    rz(b, q);
    rz(t, q);
    h(t);
    cx(a, b);
    rz(a, q);
    rz(b, -q);
    cx(a, b);
  }

  std::vector<Qubit> take(std::size_t k) {
    std::vector<Qubit> got;
    while (got.size() < k && !declared_free_.empty()) {
      got.push_back(declared_free_.back());
      declared_free_.pop_back();
    }
    while (got.size() < k && !pool_free_.empty()) {
      got.push_back(pool_free_.back());
      pool_free_.pop_back();
    }
    while (got.size() < k) {
      got.push_back(num_qubits_ + pool_size_++);
    }
    return got;
  }

  void release(const std::vector<Qubit>& qs) {
    for (auto it = qs.rbegin(); it != qs.rend(); ++it) {
      (*it >= num_qubits_ ? pool_free_ : declared_free_).push_back(*it);
    }
  }

  /// anc[i] = c0 & ... & c_{i+1}; returns the last ancilla.
  Qubit compute_and(const std::vector<Qubit>& c, const std::vector<Qubit>& anc) {
    toffoli(c[0], c[1], anc[0]);
    for (std::size_t i = 1; i < anc.size(); ++i) {
      toffoli(anc[i - 1], c[i + 1], anc[i]);
    }
    return anc.back();
  }

  void uncompute_and(const std::vector<Qubit>& c, const std::vector<Qubit>& anc) {
    for (std::size_t i = anc.size(); i-- > 1;) {
      toffoli(anc[i - 1], c[i + 1], anc[i]);
    }
    toffoli(c[0], c[1], anc[0]);
  }

  // All controls positive.
  void multi_controlled(const std::vector<Qubit>& controls, const GateOp& target_op) {
    const std::size_t n = controls.size();
    if (n == 0) {
      single(target_op);
      return;
    }
    if (n == 1) {
      controlled_single(controls[0], target_op);
      return;
    }
    if (target_op.kind == GateKind::X) {
      if (n == 2) {
        toffoli(controls[0], controls[1], target_op.targets[0]);
        return;
      }
      const auto anc = take(n - 2);
      const std::vector<Qubit> head(controls.begin(), controls.end() - 1);
      const Qubit last = compute_and(head, anc);
      toffoli(last, controls.back(), target_op.targets[0]);
      uncompute_and(head, anc);
      release(anc);
      return;
    }
    const auto anc = take(n - 1);
    const Qubit flag = compute_and(controls, anc);
    controlled_single(flag, target_op);
    uncompute_and(controls, anc);
    release(anc);
  }

  void mux_ry(const GateOp& op) {
    const std::size_t k = op.select.size();
    const Qubit t = op.targets[0];
    const std::size_t count = std::size_t{1} << k;
    if (k == 0) {
      ry(t, op.angles[0]);
      return;
    }
    const double norm = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t g = i ^ (i >> 1);
      double theta = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        theta += ((std::popcount(j & g) & 1U) ? -1.0 : 1.0) * op.angles[j];
      }
      ry(t, theta * norm);
      const std::size_t next = ((i + 1) % count) ^ (((i + 1) % count) >> 1);
      const std::size_t diff = g ^ next;
      cx(op.select[static_cast<std::size_t>(std::countr_zero(diff))], t);
    }
  }

  void controlled_mux_ry(const std::vector<Qubit>& controls, const GateOp& op) {
    std::vector<Qubit> flag_anc;
    Qubit flag = controls[0];
    if (controls.size() > 1) {
      flag_anc = take(1);
      flag = flag_anc[0];
      multi_controlled(controls, gates::x(flag));
    }
    for (std::size_t s = 0; s < op.angles.size(); ++s) {
      if (detail::is_zero_angle(op.angles[s] / 2.0)) {
        continue;
      }
      GateOp branch = gates::ry(op.targets[0], op.angles[s]);
      for (std::size_t b = 0; b < op.select.size(); ++b) {
        branch.controls.push_back({op.select[b], ((s >> b) & 1U) != 0});
      }
      branch.controls.push_back({flag, true});
      lower(branch);
    }
    if (!flag_anc.empty()) {
      multi_controlled(controls, gates::x(flag));
      release(flag_anc);
    }
  }

  void lower(const GateOp& op) {
    std::vector<Qubit> negative;
    std::vector<Qubit> controls;
    for (const auto& c : op.controls) {
      controls.push_back(c.qubit);
      if (!c.on_one) {
        negative.push_back(c.qubit);
      }
    }
    for (Qubit q : negative) {
      x(q);
    }
    switch (op.kind) {
    case GateKind::Swap: {
      const Qubit a = op.targets[0];
      const Qubit b = op.targets[1];
      cx(b, a);
      auto mid = controls;
      mid.push_back(a);
      multi_controlled(mid, gates::x(b));
      cx(b, a);
      break;
    }
    case GateKind::MuxRY:
      if (controls.empty()) {
        mux_ry(op);
      } else {
        controlled_mux_ry(controls, op);
      }
      break;
    case GateKind::Matrix: {
      require(op.matrix->realization != nullptr, ErrorCode::MissingRealization,
              "matrix gate '" + op.matrix->realization_id + "' has no circuit realization");
      const Circuit& real = *op.matrix->realization;
      std::vector<Control> positive;
      for (Qubit q : controls) {
        positive.push_back({q, true});
      }
      for (const auto& inner : real.ops()) {
        lower(gates::controlled(remap(inner, op.targets), positive));
      }
      break;
    }
    default: {
      GateOp target_op = op;
      target_op.controls.clear();
      multi_controlled(controls, target_op);
    }
    }
    for (Qubit q : negative) {
      x(q);
    }
  }

  /// Cancels X·X and identical adjacent CNOTs, merges adjacent RZ, within
  /// out_[start..].
  void peephole(std::size_t start) {
    std::vector<BasisOp> seg(out_.begin() + static_cast<std::ptrdiff_t>(start), out_.end());
    out_.resize(start);
    std::vector<bool> alive(seg.size(), true);
    std::vector<std::vector<std::size_t>> top(num_qubits_ + pool_size_ + 1);
    auto last_on = [&](Qubit q) -> std::ptrdiff_t {
      return top[q].empty() ? -1 : static_cast<std::ptrdiff_t>(top[q].back());
    };
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const BasisOp& op = seg[i];
      if (std::max(op.target, op.control) >= top.size()) {
        top.resize(std::max(op.target, op.control) + 1);
      }
      const std::ptrdiff_t prev = last_on(op.target);
      if (op.kind == BasisKind::RZ && prev >= 0 && seg[prev].kind == BasisKind::RZ) {
        seg[prev].angle = detail::wrap_angle(seg[prev].angle + op.angle);
        alive[i] = false;
        if (detail::is_zero_angle(seg[prev].angle)) {
          alive[prev] = false;
          top[op.target].pop_back();
        }
        continue;
      }
      if (op.kind == BasisKind::X && prev >= 0 && seg[prev].kind == BasisKind::X) {
        alive[i] = false;
        alive[prev] = false;
        top[op.target].pop_back();
        continue;
      }
      if (op.kind == BasisKind::CNOT && prev >= 0 && prev == last_on(op.control) &&
          seg[prev].kind == BasisKind::CNOT && seg[prev].target == op.target && seg[prev].control == op.control) {
        alive[i] = false;
        alive[prev] = false;
        top[op.target].pop_back();
        top[op.control].pop_back();
        continue;
      }
      top[op.target].push_back(i);
      if (op.kind == BasisKind::CNOT) {
        top[op.control].push_back(i);
      }
    }
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (alive[i]) {
        out_.push_back(seg[i]);
      }
    }
  }

  std::size_t num_qubits_;
  std::size_t pool_size_ = 0;
  std::vector<Qubit> declared_free_;
  std::vector<Qubit> pool_free_;
  std::vector<BasisOp> out_;
};

inline BasisProgram transpile(const Circuit& circuit) { return Transpiler(circuit.num_qubits()).run(circuit); }

struct CostTable {
  std::int64_t cnot = 5;
  std::int64_t id = 1;
  std::int64_t rz = 1;
  std::int64_t sx = 1;
  std::int64_t x = 1;
};

struct GateCounts {
  std::int64_t cnot = 0;
  std::int64_t id = 0;
  std::int64_t rz = 0;
  std::int64_t sx = 0;
  std::int64_t x = 0;

  [[nodiscard]] std::int64_t single_qubit() const { return id + rz + sx + x; }
};

inline GateCounts count_gates(const std::vector<BasisOp>& ops, std::size_t end) {
  GateCounts c;
  for (std::size_t i = 0; i < end; ++i) {
    switch (ops[i].kind) {
    case BasisKind::CNOT:
      ++c.cnot;
      break;
    case BasisKind::ID:
      ++c.id;
      break;
    case BasisKind::RZ:
      ++c.rz;
      break;
    case BasisKind::SX:
      ++c.sx;
      break;
    case BasisKind::X:
      ++c.x;
      break;
    }
  }
  return c;
}

inline GateCounts count_gates(const BasisProgram& prog) { return count_gates(prog.ops, prog.ops.size()); }

/// ASAP layering over the first `end` ops.
inline std::size_t depth(const BasisProgram& prog, std::size_t end) {
  std::vector<std::size_t> layer(prog.num_qubits, 0);
  std::size_t d = 0;
  for (std::size_t i = 0; i < end; ++i) {
    const auto& op = prog.ops[i];
    std::size_t l = layer[op.target];
    if (op.kind == BasisKind::CNOT) {
      l = std::max(l, layer[op.control]);
    }
    ++l;
    layer[op.target] = l;
    if (op.kind == BasisKind::CNOT) {
      layer[op.control] = l;
    }
    d = std::max(d, l);
  }
  return d;
}

inline std::size_t depth(const BasisProgram& prog) { return depth(prog, prog.ops.size()); }

inline std::int64_t cost(const GateCounts& c, const CostTable& t = {}) {
  return c.cnot * t.cnot + c.id * t.id + c.rz * t.rz + c.sx * t.sx + c.x * t.x;
}

inline std::int64_t cost(const BasisProgram& prog, const CostTable& t = {}) { return cost(count_gates(prog), t); }

struct CostRow {
  std::string step;
  GateCounts counts;
  std::size_t depth = 0;
  std::int64_t cost = 0;
};

struct CostReport {
  std::size_t width = 0;
  std::size_t extra_ancillas = 0;
  GateCounts counts;
  std::size_t depth = 0;
  std::int64_t cost = 0;
  std::vector<CostRow> rows;
};

/// Cumulative counts, depth and cost for the prefix ending at each marker.
/// `steps` selects markers by name (all markers when empty).
inline CostReport cumulative_report(const Circuit& circuit, const std::vector<std::string>& steps = {},
                                    const CostTable& table = {}) {
  const BasisProgram prog = transpile(circuit);
  CostReport rep;
  rep.width = circuit.num_qubits();
  rep.extra_ancillas = prog.extra_ancillas;
  rep.counts = count_gates(prog);
  rep.depth = depth(prog);
  rep.cost = cost(rep.counts, table);
  auto row_at = [&](const std::string& name, std::size_t end) {
    CostRow row{name, count_gates(prog.ops, end), depth(prog, end), 0};
    row.cost = cost(row.counts, table);
    rep.rows.push_back(std::move(row));
  };
  if (steps.empty()) {
    for (const auto& [name, end] : prog.marker_positions) {
      row_at(name, end);
    }
    return rep;
  }
  for (const auto& step : steps) {
    auto it = std::find_if(prog.marker_positions.begin(), prog.marker_positions.end(),
                           [&](const auto& mp) { return mp.first == step; });
    require(it != prog.marker_positions.end(), ErrorCode::InvalidArgument, "unknown marker '" + step + "'");
    row_at(it->first, it->second);
  }
  return rep;
}

} // namespace qinsure
