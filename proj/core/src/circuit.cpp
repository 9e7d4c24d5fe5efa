#include "vqhd/circuit.hpp"

#include <cmath>

namespace vqhd {

namespace {

Eigen::Matrix2cd generator(GateKind kind) {
  Eigen::Matrix2cd p;
  switch (kind) {
    case GateKind::Rx: p << 0, 1, 1, 0; break;
    case GateKind::Ry: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case GateKind::Rz: p << 1, 0, 0, -1; break;
    default: throw InvalidArgument("gate has no rotation generator");
  }
  return p;
}

std::uint64_t bit_of(std::size_t qubit, std::size_t qubits) {
  return std::uint64_t{1} << (qubits - 1 - qubit);
}

void columns_single(CMatrix& m, const Eigen::Matrix2cd& u, std::size_t qubit, std::size_t qubits) {
  const std::uint64_t bit = bit_of(qubit, qubits);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(m.rows()); ++b) {
    if (b & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(b | bit);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const cplx a0 = m(i0, c);
      const cplx a1 = m(i1, c);
      m(i0, c) = u(0, 0) * a0 + u(0, 1) * a1;
      m(i1, c) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
}

void columns_cnot(CMatrix& m, std::size_t control, std::size_t target, std::size_t qubits) {
  const std::uint64_t cbit = bit_of(control, qubits);
  const std::uint64_t tbit = bit_of(target, qubits);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(m.rows()); ++b)
    if ((b & cbit) && !(b & tbit))
      m.row(static_cast<Eigen::Index>(b)).swap(m.row(static_cast<Eigen::Index>(b | tbit)));
}

}  // namespace

Eigen::Matrix2cd rotation_matrix(GateKind kind, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return c * Eigen::Matrix2cd::Identity() - cplx(0.0, s) * generator(kind);
}

AnsatzCircuit::AnsatzCircuit(std::size_t qubits) : qubits_(qubits) {
  if (qubits == 0) throw InvalidArgument("circuit needs at least one qubit");
  if (qubits > kMaxQubits) throw SizeLimitError("circuit limited to 12 qubits");
}

void AnsatzCircuit::set_parameters(const RVector& theta) {
  if (theta.size() != theta_.size()) throw DimensionError("parameter vector length mismatch");
  theta_ = theta;
}

std::size_t AnsatzCircuit::add_rotation(GateKind kind, std::size_t qubit, double theta) {
  if (kind != GateKind::Rx && kind != GateKind::Ry && kind != GateKind::Rz)
    throw InvalidArgument("add_rotation expects Rx, Ry or Rz");
  if (qubit >= qubits_) throw IndexError("qubit index out of range");
  const std::size_t idx = parameter_count();
  theta_.conservativeResize(static_cast<Eigen::Index>(idx + 1));
  theta_[static_cast<Eigen::Index>(idx)] = theta;
  gates_.push_back(Gate{kind, qubit, 0, idx, Eigen::Matrix2cd::Identity()});
  return idx;
}

void AnsatzCircuit::add_cnot(std::size_t control, std::size_t target) {
  if (control >= qubits_ || target >= qubits_ || control == target)
    throw IndexError("invalid CNOT qubits");
  gates_.push_back(Gate{GateKind::CNOT, target, control, std::nullopt, Eigen::Matrix2cd::Identity()});
}

void AnsatzCircuit::add_fixed(const Eigen::Matrix2cd& u, std::size_t qubit) {
  if (qubit >= qubits_) throw IndexError("qubit index out of range");
  gates_.push_back(Gate{GateKind::Fixed, qubit, 0, std::nullopt, u});
}

void AnsatzCircuit::apply_gate(const Gate& g, StateVector& psi, bool adjoint) const {
  switch (g.kind) {
    case GateKind::CNOT:
      psi.apply_cnot(g.control, g.target);
      break;
    case GateKind::Fixed:
      psi.apply_single(adjoint ? Eigen::Matrix2cd(g.fixed.adjoint()) : g.fixed, g.target);
      break;
    default: {
      const double t = theta_[static_cast<Eigen::Index>(*g.parameter)];
      psi.apply_single(rotation_matrix(g.kind, adjoint ? -t : t), g.target);
    }
  }
}

void AnsatzCircuit::apply(StateVector& psi) const {
  if (psi.qubit_count() != qubits_) throw DimensionError("state width does not match circuit");
  for (const Gate& g : gates_) apply_gate(g, psi, false);
}

void AnsatzCircuit::apply_adjoint(StateVector& psi) const {
  if (psi.qubit_count() != qubits_) throw DimensionError("state width does not match circuit");
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) apply_gate(*it, psi, true);
}

void AnsatzCircuit::apply_to_columns(CMatrix& columns) const {
  if (static_cast<std::size_t>(columns.rows()) != dim_of(qubits_))
    throw DimensionError("column height does not match circuit");
  for (const Gate& g : gates_) {
    switch (g.kind) {
      case GateKind::CNOT: columns_cnot(columns, g.control, g.target, qubits_); break;
      case GateKind::Fixed: columns_single(columns, g.fixed, g.target, qubits_); break;
      default:
        columns_single(columns, rotation_matrix(g.kind, theta_[static_cast<Eigen::Index>(*g.parameter)]),
                       g.target, qubits_);
    }
  }
}

StateVector AnsatzCircuit::state() const {
  StateVector psi(qubits_);
  apply(psi);
  return psi;
}

std::vector<CVector> AnsatzCircuit::derivative_states() const {
  std::vector<CVector> out(parameter_count());
  StateVector prefix(qubits_);
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    const Gate& g = gates_[k];
    apply_gate(g, prefix, false);
    if (!g.parameter) continue;
    // d/dtheta R(theta) = (-i/2) P R(theta)
    CVector v = prefix.amplitudes();
    StateVector d = StateVector::from_amplitudes(std::move(v));
    d.apply_single(cplx(0.0, -0.5) * generator(g.kind), g.target);
    for (std::size_t j = k + 1; j < gates_.size(); ++j) apply_gate(gates_[j], d, false);
    out[*g.parameter] = d.amplitudes();
  }
  return out;
}

}  // namespace vqhd
