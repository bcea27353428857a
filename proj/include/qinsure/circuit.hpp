#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"

namespace qinsure {

/// Named position in the op list: the state "at" a marker is the state after
/// the first `position` ops.
struct Marker {
  std::string name;
  std::size_t position = 0;

  friend bool operator==(const Marker&, const Marker&) = default;
};

class Circuit {
public:
  Circuit() = default;
  explicit Circuit(std::size_t num_qubits) : num_qubits_(num_qubits) {}

  [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
  [[nodiscard]] const std::vector<GateOp>& ops() const& { return ops_; }
  [[nodiscard]] std::vector<GateOp> ops() && { return std::move(ops_); }
  [[nodiscard]] const std::vector<Marker>& markers() const& { return markers_; }
  [[nodiscard]] std::vector<Marker> markers() && { return std::move(markers_); }
  [[nodiscard]] std::size_t size() const { return ops_.size(); }
  [[nodiscard]] bool empty() const { return ops_.empty(); }

  Circuit& add(GateOp op) {
    validate(op, num_qubits_);
    ops_.push_back(std::move(op));
    return *this;
  }

  Circuit& mark(std::string name) {
    markers_.push_back({std::move(name), ops_.size()});
    return *this;
  }

  [[nodiscard]] std::optional<Marker> find_marker(const std::string& name) const {
    for (const auto& m : markers_) {
      if (m.name == name) {
        return m;
      }
    }
    return std::nullopt;
  }

  /// Appends `other` with its qubit j placed on wire map[j]. Markers of
  /// `other` are not copied.
  Circuit& append(const Circuit& other, const std::vector<Qubit>& map);

  /// Appends `other` on the same wires (other.num_qubits() <= num_qubits()).
  Circuit& append(const Circuit& other) {
    require(other.num_qubits() <= num_qubits_, ErrorCode::DimensionMismatch,
            "appended circuit is wider than the host");
    for (const auto& op : other.ops()) {
      add(op);
    }
    return *this;
  }

  /// First `count` ops, keeping markers that fall inside.
  [[nodiscard]] Circuit prefix(std::size_t count) const {
    require(count <= ops_.size(), ErrorCode::OutOfRange, "prefix longer than circuit");
    Circuit out(num_qubits_);
    out.ops_.assign(ops_.begin(), ops_.begin() + static_cast<std::ptrdiff_t>(count));
    for (const auto& m : markers_) {
      if (m.position <= count) {
        out.markers_.push_back(m);
      }
    }
    return out;
  }

  [[nodiscard]] Circuit adjoint() const;

private:
  std::size_t num_qubits_ = 0;
  std::vector<GateOp> ops_;
  std::vector<Marker> markers_;
};

inline GateOp remap(GateOp op, const std::vector<Qubit>& map) {
  auto at = [&](Qubit q) {
    require(q < map.size(), ErrorCode::OutOfRange, "qubit map too short");
    return map[q];
  };
  for (auto& q : op.targets) {
    q = at(q);
  }
  for (auto& q : op.select) {
    q = at(q);
  }
  for (auto& c : op.controls) {
    c.qubit = at(c.qubit);
  }
  for (auto& q : op.ancillas) {
    q = at(q);
  }
  return op;
}

inline Circuit& Circuit::append(const Circuit& other, const std::vector<Qubit>& map) {
  require(map.size() == other.num_qubits(), ErrorCode::DimensionMismatch,
          "qubit map size must equal the appended circuit width");
  for (const auto& op : other.ops()) {
    add(remap(op, map));
  }
  return *this;
}

inline GateOp adjoint(const GateOp& op) {
  GateOp out = op;
  switch (op.kind) {
  case GateKind::S:
  case GateKind::SX:
    out.dagger = !op.dagger;
    break;
  case GateKind::RX:
  case GateKind::RY:
  case GateKind::RZ:
  case GateKind::Phase:
    out.angle = -op.angle;
    break;
  case GateKind::MuxRY:
    for (auto& a : out.angles) {
      a = -a;
    }
    break;
  case GateKind::Matrix: {
    auto payload = std::make_shared<MatrixPayload>();
    payload->unitary = op.matrix->unitary.adjoint();
    const std::string& id = op.matrix->realization_id;
    const std::string suffix = "^dag";
    if (id.size() >= suffix.size() && id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0) {
      payload->realization_id = id.substr(0, id.size() - suffix.size());
    } else if (!id.empty()) {
      payload->realization_id = id + suffix;
    }
    if (op.matrix->realization) {
      payload->realization = std::make_shared<const Circuit>(op.matrix->realization->adjoint());
    }
    out.matrix = std::move(payload);
    break;
  }
  default:
    break;
  }
  return out;
}

inline Circuit Circuit::adjoint() const {
  Circuit out(num_qubits_);
  out.ops_.reserve(ops_.size());
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    out.ops_.push_back(qinsure::adjoint(*it));
  }
  return out;
}

bool operator==(const Circuit& a, const Circuit& b);

/// Structural equality: same kind, wires, controls, flags and parameters.
/// Matrix payloads compare by unitary entries and realization id.
inline bool operator==(const GateOp& a, const GateOp& b) {
  if (a.kind != b.kind || a.targets != b.targets || a.controls != b.controls ||
      a.angle != b.angle || a.dagger != b.dagger || a.select != b.select ||
      a.angles != b.angles || a.ancillas != b.ancillas) {
    return false;
  }
  if (a.matrix == b.matrix) {
    return true;
  }
  if (!a.matrix || !b.matrix) {
    return false;
  }
  return a.matrix->unitary == b.matrix->unitary &&
         a.matrix->realization_id == b.matrix->realization_id;
}

inline bool operator==(const Circuit& a, const Circuit& b) {
  return a.num_qubits() == b.num_qubits() && a.ops() == b.ops();
}

/// Same as ==, but rotation angles only need to agree within `tol`.
inline bool structurally_close(const Circuit& a, const Circuit& b, double tol = 1e-12) {
  if (a.num_qubits() != b.num_qubits() || a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    GateOp x = a.ops()[i];
    GateOp y = b.ops()[i];
    if (std::abs(x.angle - y.angle) > tol || x.angles.size() != y.angles.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.angles.size(); ++k) {
      if (std::abs(x.angles[k] - y.angles[k]) > tol) {
        return false;
      }
    }
    x.angle = y.angle;
    x.angles = y.angles;
    if (!(x == y)) {
      return false;
    }
  }
  return true;
}

} // namespace qinsure
