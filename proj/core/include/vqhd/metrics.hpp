#pragma once

#include "vqhd/exact.hpp"
#include "vqhd/qstate.hpp"

namespace vqhd {

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as the
/// squared trace norm of sqrt(rho) sqrt(sigma) and clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// -tr(rho ln rho) in nats; eigenvalues below 1e-12 contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const StateVector& psi, std::span<const std::size_t> subsystem);

/// Subsystem (0..n/2-1, n..n+n/2-1) of a 2n-qubit thermofield register.
IndexList half_cut(std::size_t n);

/// max_k |eig_k(rho) - softmax(-beta lambda)_k| over sorted spectra.
double eigenvalue_softmax_check(const Spectrum& spectrum, const DensityMatrix& rho, double beta);

}  // namespace vqhd
