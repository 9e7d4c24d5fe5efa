#pragma once

#include <span>

#include "vqhd/pauli.hpp"
#include "vqhd/types.hpp"

namespace vqhd {

/// Normalized pure state on q qubits. Qubit 0 is the most significant bit of
/// the amplitude index.
class StateVector {
 public:
  /// |0...0> on `qubits` qubits.
  explicit StateVector(std::size_t qubits);

  /// Takes ownership of amplitudes; the length must be a power of two and the
  /// norm must be 1 within 1e-10 unless `renormalize` is set.
  static StateVector from_amplitudes(CVector amplitudes, bool renormalize = false);

  /// Computational basis state |index>.
  static StateVector basis(std::size_t qubits, std::size_t index);

  std::size_t qubit_count() const { return qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
  double norm() const { return amps_.norm(); }

  // In-place kernels used by circuits and QITE; all preserve the norm up to
  // rounding when given unitary input.
  void apply_matrix(const CMatrix& u, std::span<const std::size_t> domain);
  void apply_single(const Eigen::Matrix2cd& u, std::size_t qubit);
  void apply_cnot(std::size_t control, std::size_t target);
  /// Applies a Pauli string (without its coefficient).
  void apply_pauli(const PauliMask& mask);

  /// Re-scales to unit norm; throws NumericalFailure for a zero vector.
  void normalize();

  /// Raw mutable access for kernels that keep the norm themselves.
  CVector& mutable_amplitudes() { return amps_; }

 private:
  StateVector(std::size_t qubits, CVector amps) : qubits_(qubits), amps_(std::move(amps)) {}

  std::size_t qubits_;
  CVector amps_;
};

/// Hermitian, PSD, unit-trace matrix on n qubits. Validated on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);

  /// Maximally mixed state I / 2^n.
  static DensityMatrix maximally_mixed(std::size_t qubits);
  static DensityMatrix pure(const StateVector& psi);

  std::size_t qubit_count() const { return qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }

  /// Eigenvalues, ascending.
  RVector eigenvalues() const;

 private:
  std::size_t qubits_;
  CMatrix matrix_;
};

/// Invariant tolerances for DensityMatrix.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegativeEigTol = 1e-9;

/// (1/sqrt(2^n)) sum_i |i>|i> on 2n qubits, built by Hadamards on the first n
/// qubits followed by CNOT(i, i+n).
StateVector prepare_phi0(std::size_t n);

/// Applies U (2^D x 2^D) to the listed qubits; the first listed qubit is the
/// most significant tensor factor of U. U must be unitary within 1e-10.
StateVector apply_local_unitary(const StateVector& psi, const CMatrix& u,
                                std::span<const std::size_t> domain);

/// Reduced density matrix on `keep`, ordered as listed.
DensityMatrix partial_trace(const StateVector& psi, std::span<const std::size_t> keep);

/// Same contraction as partial_trace without invariant checks.
CMatrix reduced_matrix(const StateVector& psi, std::span<const std::size_t> keep);

/// <psi|P|psi>. Throws DimensionError on a qubit-count mismatch.
double expectation(const StateVector& psi, const PauliString& p);
double expectation(const StateVector& psi, const PauliSum& h);

/// <psi|A^dagger B|psi> for Pauli strings on the full register.
cplx expectation_cross(const StateVector& psi, const PauliString& a, const PauliString& b);
/// <psi|A^dagger B|psi> with B a dense operator on `domain`.
cplx expectation_cross(const StateVector& psi, const PauliString& a, const CMatrix& b_local,
                       std::span<const std::size_t> domain);

/// |<a|b>|^2.
double state_fidelity(const StateVector& a, const StateVector& b);

namespace dense {

/// Full 2^q x 2^q matrix of a local operator on `domain`. Limited to q <= 8;
/// meant for cross-checks only.
CMatrix embed(const CMatrix& local, std::span<const std::size_t> domain, std::size_t qubits);

}  // namespace dense

}  // namespace vqhd
