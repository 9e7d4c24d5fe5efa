#pragma once

#include <optional>
#include <vector>

#include "vqhd/qstate.hpp"
#include "vqhd/types.hpp"

namespace vqhd {

enum class GateKind { Rx, Ry, Rz, CNOT, Fixed };

/// One circuit element. Rotations are R_P(theta) = exp(-i theta P / 2) and own
/// exactly one parameter slot.
struct Gate {
  GateKind kind;
  std::size_t target = 0;
  std::size_t control = 0;
  std::optional<std::size_t> parameter;
  Eigen::Matrix2cd fixed = Eigen::Matrix2cd::Identity();
};

Eigen::Matrix2cd rotation_matrix(GateKind kind, double theta);

/// Parameterized circuit over a fixed register, with its parameter vector.
class AnsatzCircuit {
 public:
  explicit AnsatzCircuit(std::size_t qubits);

  std::size_t qubit_count() const { return qubits_; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(theta_.size()); }
  const std::vector<Gate>& gates() const { return gates_; }

  const RVector& parameters() const { return theta_; }
  void set_parameters(const RVector& theta);

  /// Appends a rotation with a fresh parameter (initial value `theta`);
  /// returns its parameter index.
  std::size_t add_rotation(GateKind kind, std::size_t qubit, double theta = 0.0);
  void add_cnot(std::size_t control, std::size_t target);
  void add_fixed(const Eigen::Matrix2cd& u, std::size_t qubit);

  void apply(StateVector& psi) const;
  void apply_adjoint(StateVector& psi) const;

  /// Applies V to every column of `columns` (rows = 2^q).
  void apply_to_columns(CMatrix& columns) const;

  /// V |0...0>.
  StateVector state() const;

  /// d/dtheta_i V|0...0> for every parameter, by generator insertion.
  std::vector<CVector> derivative_states() const;

 private:
  void apply_gate(const Gate& g, StateVector& psi, bool adjoint) const;

  std::size_t qubits_;
  std::vector<Gate> gates_;
  RVector theta_;
};

}  // namespace vqhd
