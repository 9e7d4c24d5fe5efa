#pragma once

#include "vqhd/pauli.hpp"
#include "vqhd/qstate.hpp"
#include "vqhd/types.hpp"

namespace vqhd {

/// Full eigendecomposition, eigenvalues ascending, eigenvectors as columns.
struct Spectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  StateVector eigenstate(std::size_t k) const;

  /// Index ranges [first, last) of levels whose eigenvalues agree within `tol`.
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_groups(double tol = 1e-9) const;

  /// |P_g psi|^2 where P_g projects onto the degenerate group containing level k.
  double subspace_fidelity(std::size_t k, const StateVector& psi, double tol = 1e-9) const;
};

Spectrum diagonalize(const CMatrix& hermitian);
Spectrum diagonalize(const PauliSum& h);

/// e^{-beta H} / tr e^{-beta H}, evaluated in the eigenbasis after shifting the
/// spectrum by its minimum.
DensityMatrix thermal_state_exact(const PauliSum& h, double beta);
DensityMatrix thermal_state_exact(const Spectrum& spectrum, double beta);

/// softmax(-beta * lambda) with the same overflow guard.
RVector thermal_weights(const RVector& eigenvalues, double beta);

/// e^{-tau H} psi / ||.||, with H acting on the leading H.qubit_count() qubits
/// of psi (identity on the rest).
StateVector imaginary_evolve_exact(const StateVector& psi, const PauliSum& h, double tau);
StateVector imaginary_evolve_exact(const StateVector& psi, const Spectrum& spectrum, double tau);

/// Tr[rho H] for a density matrix on H's register.
double energy(const DensityMatrix& rho, const PauliSum& h);

}  // namespace vqhd
