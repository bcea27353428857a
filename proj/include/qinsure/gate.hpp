#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qinsure/error.hpp"

#ifndef QINSURE_MAX_QUBITS
#define QINSURE_MAX_QUBITS 26
#endif

namespace qinsure {

using cplx = std::complex<double>;
using Qubit = std::size_t;

inline constexpr double pi = std::numbers::pi;
inline constexpr std::size_t max_qubits = QINSURE_MAX_QUBITS;

/// Effective qubit budget. QINSURE_MAX_QUBITS in the environment may lower it
/// below the build-time constant, never raise it.
inline std::size_t qubit_limit() {
  if (const char* env = std::getenv("QINSURE_MAX_QUBITS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) {
      return std::min<std::size_t>(value, max_qubits);
    }
  }
  return max_qubits;
}

/// Row-major square complex matrix.
struct DenseMatrix {
  std::size_t dim = 0;
  std::vector<cplx> data;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : dim(n), data(n * n) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, i) = 1.0;
    }
    return m;
  }

  cplx& operator()(std::size_t row, std::size_t col) { return data[row * dim + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return data[row * dim + col]; }

  [[nodiscard]] DenseMatrix adjoint() const {
    DenseMatrix out(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        out(c, r) = std::conj((*this)(r, c));
      }
    }
    return out;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.dim == b.dim, ErrorCode::DimensionMismatch, "matrix dimensions differ");
    DenseMatrix out(a.dim);
    for (std::size_t r = 0; r < a.dim; ++r) {
      for (std::size_t k = 0; k < a.dim; ++k) {
        const cplx v = a(r, k);
        if (v == cplx{}) {
          continue;
        }
        for (std::size_t c = 0; c < a.dim; ++c) {
          out(r, c) += v * b(k, c);
        }
      }
    }
    return out;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.dim == b.dim, ErrorCode::DimensionMismatch, "matrix dimensions differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  }
  return worst;
}

/// ‖U†U − I‖_max
inline double unitarity_error(const DenseMatrix& u) {
  return max_abs_diff(u.adjoint() * u, DenseMatrix::identity(u.dim));
}

/// m^(2^k) by repeated squaring.
inline DenseMatrix power_of_two(DenseMatrix m, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    m = m * m;
  }
  return m;
}

enum class GateKind : std::uint8_t { X, Y, Z, H, S, SX, RX, RY, RZ, Phase, Swap, MuxRY, Matrix };

struct Control {
  Qubit qubit = 0;
  bool on_one = true;

  friend bool operator==(const Control&, const Control&) = default;
};

class Circuit;

/// Dense unitary carried by a Matrix gate. The optional realization is a
/// circuit on local qubits 0..k-1 implementing exactly the same unitary; the
/// transpiler lowers through it.
struct MatrixPayload {
  DenseMatrix unitary;
  std::string realization_id;
  std::shared_ptr<const Circuit> realization;
};

struct GateOp {
  GateKind kind = GateKind::X;
  std::vector<Qubit> targets;
  std::vector<Control> controls;
  // RX/RY/RZ/Phase rotation angle.
  double angle = 0.0;
  // S and SX only.
  bool dagger = false;
  // MuxRY: select register (select[0] is the least significant select bit)
  // and one angle per select value.
  std::vector<Qubit> select;
  std::vector<double> angles;
  std::shared_ptr<const MatrixPayload> matrix;
  // Clean workspace owned by the enclosing circuit. Must be |0> before and is
  // |0> after the gate; the simulator never touches it.
  std::vector<Qubit> ancillas;
};

/// Qubits an op acts on, in the order targets, select, controls, ancillas.
inline std::vector<Qubit> touched_qubits(const GateOp& op) {
  std::vector<Qubit> qs = op.targets;
  qs.insert(qs.end(), op.select.begin(), op.select.end());
  for (const auto& c : op.controls) {
    qs.push_back(c.qubit);
  }
  qs.insert(qs.end(), op.ancillas.begin(), op.ancillas.end());
  return qs;
}

inline void validate(const GateOp& op, std::size_t num_qubits) {
  const auto qs = touched_qubits(op);
  for (Qubit q : qs) {
    require(q < num_qubits, ErrorCode::OutOfRange,
            "qubit index " + std::to_string(q) + " out of range for " +
                std::to_string(num_qubits) + " qubits");
  }
  auto sorted = qs;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorCode::InvalidArgument, "gate qubits must be pairwise distinct");
  switch (op.kind) {
  case GateKind::Swap:
    require(op.targets.size() == 2, ErrorCode::InvalidArgument, "swap needs two targets");
    break;
  case GateKind::MuxRY:
    require(op.targets.size() == 1, ErrorCode::InvalidArgument, "mux-ry needs one target");
    require(op.angles.size() == (std::size_t{1} << op.select.size()), ErrorCode::InvalidArgument,
            "mux-ry needs one angle per select value");
    break;
  case GateKind::Matrix:
    require(op.matrix != nullptr, ErrorCode::InvalidArgument, "matrix gate without payload");
    require(op.matrix->unitary.dim == (std::size_t{1} << op.targets.size()),
            ErrorCode::DimensionMismatch, "matrix size does not match target count");
    break;
  default:
    require(op.targets.size() == 1, ErrorCode::InvalidArgument, "single-qubit gate needs one target");
  }
}

namespace gates {

inline GateOp single(GateKind kind, Qubit q, double angle = 0.0) {
  GateOp op;
  op.kind = kind;
  op.targets = {q};
  op.angle = angle;
  return op;
}

inline GateOp x(Qubit q) { return single(GateKind::X, q); }
inline GateOp y(Qubit q) { return single(GateKind::Y, q); }
inline GateOp z(Qubit q) { return single(GateKind::Z, q); }
inline GateOp h(Qubit q) { return single(GateKind::H, q); }
inline GateOp s(Qubit q) { return single(GateKind::S, q); }
inline GateOp sdg(Qubit q) {
  auto op = single(GateKind::S, q);
  op.dagger = true;
  return op;
}
inline GateOp sx(Qubit q) { return single(GateKind::SX, q); }
inline GateOp rx(Qubit q, double theta) { return single(GateKind::RX, q, theta); }
inline GateOp ry(Qubit q, double theta) { return single(GateKind::RY, q, theta); }
inline GateOp rz(Qubit q, double theta) { return single(GateKind::RZ, q, theta); }
inline GateOp phase(Qubit q, double theta) { return single(GateKind::Phase, q, theta); }

/// R_j: |1> -> exp(sign * 2 pi i / 2^j) |1>.
inline GateOp phase_rotation(Qubit q, unsigned j, int sign = +1) {
  require(j >= 1, ErrorCode::InvalidArgument, "phase rotation index must be >= 1");
  require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "phase rotation sign must be +-1");
  return phase(q, sign * 2.0 * pi / std::ldexp(1.0, static_cast<int>(j)));
}

inline GateOp controlled(GateOp op, std::vector<Control> extra) {
  op.controls.insert(op.controls.end(), extra.begin(), extra.end());
  return op;
}

inline GateOp cnot(Qubit control, Qubit target) { return controlled(x(target), {{control, true}}); }
inline GateOp ccnot(Qubit a, Qubit b, Qubit target) {
  return controlled(x(target), {{a, true}, {b, true}});
}

inline GateOp swap(Qubit a, Qubit b) {
  GateOp op;
  op.kind = GateKind::Swap;
  op.targets = {a, b};
  return op;
}

inline GateOp mux_ry(std::vector<Qubit> select, Qubit target, std::vector<double> angles) {
  GateOp op;
  op.kind = GateKind::MuxRY;
  op.targets = {target};
  op.select = std::move(select);
  op.angles = std::move(angles);
  return op;
}

/// Fails with NonUnitary when ‖U†U − I‖_max > 1e-10.
inline GateOp matrix(std::vector<Qubit> targets, DenseMatrix unitary, std::string realization_id = {},
                     std::shared_ptr<const Circuit> realization = nullptr) {
  require(unitary.dim == (std::size_t{1} << targets.size()), ErrorCode::DimensionMismatch,
          "matrix size does not match target count");
  require(unitarity_error(unitary) <= 1e-10, ErrorCode::NonUnitary, "matrix payload is not unitary");
  GateOp op;
  op.kind = GateKind::Matrix;
  op.targets = std::move(targets);
  auto payload = std::make_shared<MatrixPayload>();
  payload->unitary = std::move(unitary);
  payload->realization_id = std::move(realization_id);
  payload->realization = std::move(realization);
  op.matrix = std::move(payload);
  return op;
}

} // namespace gates

/// 2x2 matrix (row-major) of a single-target kind, ignoring controls.
inline std::array<cplx, 4> single_qubit_matrix(const GateOp& op) {
  using namespace std::complex_literals;
  const double half = op.angle / 2.0;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const double r = 1.0 / std::numbers::sqrt2;
  switch (op.kind) {
  case GateKind::X:
    return {0.0, 1.0, 1.0, 0.0};
  case GateKind::Y:
    return {0.0, -1i, 1i, 0.0};
  case GateKind::Z:
    return {1.0, 0.0, 0.0, -1.0};
  case GateKind::H:
    return {r, r, r, -r};
  case GateKind::S:
    return {1.0, 0.0, 0.0, op.dagger ? -1i : 1i};
  case GateKind::SX:
    if (op.dagger) {
      return {0.5 - 0.5i, 0.5 + 0.5i, 0.5 + 0.5i, 0.5 - 0.5i};
    }
    return {0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i};
  case GateKind::RX:
    return {c, -1i * s, -1i * s, c};
  case GateKind::RY:
    return {c, -s, s, c};
  case GateKind::RZ:
    return {std::exp(-1i * half), 0.0, 0.0, std::exp(1i * half)};
  case GateKind::Phase:
    return {1.0, 0.0, 0.0, std::exp(1i * op.angle)};
  default:
    throw Error(ErrorCode::InvalidArgument, "not a single-qubit gate kind");
  }
}

inline bool is_single_qubit_kind(GateKind kind) {
  return kind != GateKind::Swap && kind != GateKind::MuxRY && kind != GateKind::Matrix;
}

/// Display name; X with one or two positive controls reports as CNOT/CCNOT.
inline std::string kind_name(const GateOp& op) {
  const bool positive = std::all_of(op.controls.begin(), op.controls.end(),
                                    [](const Control& c) { return c.on_one; });
  switch (op.kind) {
  case GateKind::X:
    if (positive && op.controls.size() == 1) {
      return "CNOT";
    }
    if (positive && op.controls.size() == 2) {
      return "CCNOT";
    }
    return "X";
  case GateKind::Y:
    return "Y";
  case GateKind::Z:
    return "Z";
  case GateKind::H:
    return "H";
  case GateKind::S:
    return op.dagger ? "SDG" : "S";
  case GateKind::SX:
    return op.dagger ? "SXDG" : "SX";
  case GateKind::RX:
    return "RX";
  case GateKind::RY:
    return "RY";
  case GateKind::RZ:
    return "RZ";
  case GateKind::Phase:
    return "PHASE";
  case GateKind::Swap:
    return "SWAP";
  case GateKind::MuxRY:
    return "MUXRY";
  case GateKind::Matrix:
    return "MATRIX";
  }
  return "?";
}

} // namespace qinsure
