#include "vqhd/exact.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace vqhd {

StateVector Spectrum::eigenstate(std::size_t k) const {
  if (k >= size()) throw IndexError("eigenstate index out of range");
  return StateVector::from_amplitudes(eigenvectors.col(static_cast<Eigen::Index>(k)), true);
}

std::vector<std::pair<std::size_t, std::size_t>> Spectrum::degenerate_groups(double tol) const {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t first = 0;
  for (std::size_t k = 1; k <= size(); ++k) {
    if (k == size() || eigenvalues[static_cast<Eigen::Index>(k)] -
                               eigenvalues[static_cast<Eigen::Index>(k - 1)] > tol) {
      groups.emplace_back(first, k);
      first = k;
    }
  }
  return groups;
}

double Spectrum::subspace_fidelity(std::size_t k, const StateVector& psi, double tol) const {
  if (k >= size()) throw IndexError("level index out of range");
  if (psi.dimension() != size()) throw DimensionError("state dimension does not match spectrum");
  for (const auto& [first, last] : degenerate_groups(tol)) {
    if (k < first || k >= last) continue;
    double f = 0.0;
    for (std::size_t j = first; j < last; ++j)
      f += std::norm(eigenvectors.col(static_cast<Eigen::Index>(j)).dot(psi.amplitudes()));
    return f;
  }
  return 0.0;  // unreachable: groups cover every level
}

Spectrum diagonalize(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver failed");
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

Spectrum diagonalize(const PauliSum& h) { return diagonalize(h.to_dense()); }

RVector thermal_weights(const RVector& eigenvalues, double beta) {
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
  const double lmin = eigenvalues.minCoeff();
  RVector w = (-beta * (eigenvalues.array() - lmin)).exp().matrix();
  return w / w.sum();
}

DensityMatrix thermal_state_exact(const Spectrum& spectrum, double beta) {
  const RVector w = thermal_weights(spectrum.eigenvalues, beta);
  const CMatrix& v = spectrum.eigenvectors;
  CMatrix rho = v * w.cast<cplx>().asDiagonal() * v.adjoint();
  return DensityMatrix(std::move(rho));
}

DensityMatrix thermal_state_exact(const PauliSum& h, double beta) {
  return thermal_state_exact(diagonalize(h), beta);
}

StateVector imaginary_evolve_exact(const StateVector& psi, const Spectrum& spectrum, double tau) {
  const std::size_t sys_dim = spectrum.size();
  if (sys_dim > psi.dimension() || psi.dimension() % sys_dim != 0)
    throw DimensionError("Hamiltonian does not fit the state register");
  if (tau < 0.0 || !std::isfinite(tau)) throw InvalidArgument("tau must be finite and >= 0");
  const std::size_t rest = psi.dimension() / sys_dim;
  // Leading qubits index rows (qubit 0 is the most significant bit).
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      psi.amplitudes().data(), static_cast<Eigen::Index>(sys_dim), static_cast<Eigen::Index>(rest));
  const double lmin = spectrum.eigenvalues.minCoeff();
  const RVector decay = (-tau * (spectrum.eigenvalues.array() - lmin)).exp().matrix();
  const CMatrix& v = spectrum.eigenvectors;
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      v * (decay.cast<cplx>().asDiagonal() * (v.adjoint() * m));
  CVector flat = Eigen::Map<CVector>(out.data(), out.size());
  const double nrm = flat.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalFailure("imaginary evolution produced a zero state");
  return StateVector::from_amplitudes(flat / nrm);
}

StateVector imaginary_evolve_exact(const StateVector& psi, const PauliSum& h, double tau) {
  return imaginary_evolve_exact(psi, diagonalize(h), tau);
}

double energy(const DensityMatrix& rho, const PauliSum& h) {
  if (rho.qubit_count() != h.qubit_count()) throw DimensionError("qubit count mismatch");
  return (rho.matrix() * h.to_dense()).trace().real();
}

}  // namespace vqhd
