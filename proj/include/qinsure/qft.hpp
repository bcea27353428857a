#pragma once

#include <cstddef>

#include "qinsure/circuit.hpp"
#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"

namespace qinsure {

/// |l> -> 2^(-m/2) sum_k exp(2 pi i l k / 2^m) |k>, including the final
/// qubit-order reversal.
inline Circuit qft_circuit(std::size_t m) {
  require(m >= 1, ErrorCode::InvalidArgument, "qft needs at least one qubit");
  Circuit c(m);
  for (std::size_t j = m; j-- > 0;) {
    c.add(gates::h(j));
    for (std::size_t k = j; k-- > 0;) {
      c.add(gates::controlled(gates::phase_rotation(j, static_cast<unsigned>(j - k + 1)), {{k, true}}));
    }
  }
  for (std::size_t i = 0; i < m / 2; ++i) {
    c.add(gates::swap(i, m - 1 - i));
  }
  return c;
}

/// Inverse transform, built directly in reverse order with R_j^-1.
inline Circuit iqft_circuit(std::size_t m) {
  require(m >= 1, ErrorCode::InvalidArgument, "iqft needs at least one qubit");
  Circuit c(m);
  for (std::size_t i = m / 2; i-- > 0;) {
    c.add(gates::swap(i, m - 1 - i));
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      c.add(gates::controlled(gates::phase_rotation(j, static_cast<unsigned>(j - k + 1), -1), {{k, true}}));
    }
    c.add(gates::h(j));
  }
  return c;
}

} // namespace qinsure
