#include "vqhd/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace vqhd {

namespace {

std::uint64_t bit_of(std::size_t qubit, std::size_t qubits) {
  return std::uint64_t{1} << (qubits - 1 - qubit);
}

void check_domain(std::span<const std::size_t> domain, std::size_t qubits) {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] >= qubits) throw IndexError("qubit index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (domain[i] == domain[j]) throw IndexError("repeated qubit index in domain");
  }
}

// Global offsets of each local basis index (first domain qubit = local MSB).
std::vector<std::uint64_t> local_offsets(std::span<const std::size_t> domain, std::size_t qubits) {
  const std::size_t d = domain.size();
  std::vector<std::uint64_t> off(dim_of(d), 0);
  for (std::uint64_t l = 0; l < off.size(); ++l) {
    std::uint64_t g = 0;
    for (std::size_t j = 0; j < d; ++j)
      if (l & (std::uint64_t{1} << (d - 1 - j))) g |= bit_of(domain[j], qubits);
    off[l] = g;
  }
  return off;
}

// Basis indices with all domain bits cleared, ascending.
std::vector<std::uint64_t> complement_bases(std::span<const std::size_t> domain, std::size_t qubits) {
  std::uint64_t dmask = 0;
  for (std::size_t q : domain) dmask |= bit_of(q, qubits);
  std::vector<std::uint64_t> out;
  out.reserve(dim_of(qubits - domain.size()));
  for (std::uint64_t b = 0; b < dim_of(qubits); ++b)
    if ((b & dmask) == 0) out.push_back(b);
  return out;
}

}  // namespace

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
  if (qubits == 0) throw InvalidArgument("state needs at least one qubit");
  if (qubits > kMaxQubits) throw SizeLimitError("state limited to 12 qubits");
  amps_ = CVector::Zero(static_cast<Eigen::Index>(dim_of(qubits)));
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(CVector amplitudes, bool renormalize) {
  const auto dim = static_cast<std::size_t>(amplitudes.size());
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw DimensionError("amplitude vector length must be a power of two");
  const std::size_t qubits = static_cast<std::size_t>(std::countr_zero(dim));
  if (qubits > kMaxQubits) throw SizeLimitError("state limited to 12 qubits");
  StateVector s(qubits, std::move(amplitudes));
  if (renormalize) {
    s.normalize();
  } else if (std::abs(s.norm() - 1.0) > 1e-10) {
    throw ContractViolation("state vector is not normalized");
  }
  return s;
}

StateVector StateVector::basis(std::size_t qubits, std::size_t index) {
  StateVector s(qubits);
  if (index >= s.dimension()) throw IndexError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

void StateVector::apply_matrix(const CMatrix& u, std::span<const std::size_t> domain) {
  check_domain(domain, qubits_);
  const std::size_t ldim = dim_of(domain.size());
  if (static_cast<std::size_t>(u.rows()) != ldim || static_cast<std::size_t>(u.cols()) != ldim)
    throw DimensionError("operator dimension does not match domain size");
  const auto off = local_offsets(domain, qubits_);
  const auto bases = complement_bases(domain, qubits_);
  CVector in(static_cast<Eigen::Index>(ldim));
  CVector out(static_cast<Eigen::Index>(ldim));
  for (std::uint64_t base : bases) {
    for (std::size_t l = 0; l < ldim; ++l) in[static_cast<Eigen::Index>(l)] = amps_[static_cast<Eigen::Index>(base | off[l])];
    out.noalias() = u * in;
    for (std::size_t l = 0; l < ldim; ++l) amps_[static_cast<Eigen::Index>(base | off[l])] = out[static_cast<Eigen::Index>(l)];
  }
}

void StateVector::apply_single(const Eigen::Matrix2cd& u, std::size_t qubit) {
  if (qubit >= qubits_) throw IndexError("qubit index out of range");
  const std::uint64_t bit = bit_of(qubit, qubits_);
  const std::uint64_t dim = dim_of(qubits_);
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(b | bit);
    const cplx a0 = amps_[i0];
    const cplx a1 = amps_[i1];
    amps_[i0] = u(0, 0) * a0 + u(0, 1) * a1;
    amps_[i1] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
  if (control >= qubits_ || target >= qubits_) throw IndexError("qubit index out of range");
  if (control == target) throw IndexError("CNOT control equals target");
  const std::uint64_t cbit = bit_of(control, qubits_);
  const std::uint64_t tbit = bit_of(target, qubits_);
  const std::uint64_t dim = dim_of(qubits_);
  for (std::uint64_t b = 0; b < dim; ++b) {
    if ((b & cbit) && !(b & tbit))
      std::swap(amps_[static_cast<Eigen::Index>(b)], amps_[static_cast<Eigen::Index>(b | tbit)]);
  }
}

void StateVector::apply_pauli(const PauliMask& mask) {
  CVector out(amps_.size());
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(amps_.size()); ++b)
    out[static_cast<Eigen::Index>(b ^ mask.x)] = mask.phase(b) * amps_[static_cast<Eigen::Index>(b)];
  amps_.swap(out);
}

void StateVector::normalize() {
  const double nrm = amps_.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalFailure("cannot normalize a zero or non-finite state");
  amps_ /= nrm;
}

DensityMatrix::DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
  const auto dim = static_cast<std::size_t>(matrix_.rows());
  if (dim == 0 || static_cast<std::size_t>(matrix_.cols()) != dim || (dim & (dim - 1)) != 0)
    throw DimensionError("density matrix must be square with power-of-two size");
  qubits_ = static_cast<std::size_t>(std::countr_zero(dim));
  if (qubits_ > kMaxQubits) throw SizeLimitError("density matrix limited to 12 qubits");
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw ContractViolation("density matrix is not Hermitian");
  if (std::abs(matrix_.trace() - cplx(1.0, 0.0)) > kTraceTol)
    throw ContractViolation("density matrix trace is not 1");
  // Exact Hermitian part for the spectral check and downstream use.
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
  if (eigenvalues().minCoeff() < -kNegativeEigTol)
    throw ContractViolation("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t qubits) {
  const auto dim = static_cast<Eigen::Index>(dim_of(qubits));
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

RVector DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

StateVector prepare_phi0(std::size_t n) {
  if (n == 0) throw InvalidArgument("prepare_phi0 requires n >= 1");
  if (2 * n > kMaxQubits) throw SizeLimitError("prepare_phi0 limited to 2n <= 12");
  StateVector psi(2 * n);
  Eigen::Matrix2cd hadamard;
  hadamard << 1, 1, 1, -1;
  hadamard /= std::numbers::sqrt2;
  for (std::size_t i = 0; i < n; ++i) psi.apply_single(hadamard, i);
  for (std::size_t i = 0; i < n; ++i) psi.apply_cnot(i, i + n);
  return psi;
}

StateVector apply_local_unitary(const StateVector& psi, const CMatrix& u,
                                std::span<const std::size_t> domain) {
  if (u.rows() != u.cols()) throw DimensionError("operator must be square");
  const CMatrix defect = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-10) throw ContractViolation("operator is not unitary");
  StateVector out = psi;
  out.apply_matrix(u, domain);
  return out;
}

CMatrix reduced_matrix(const StateVector& psi, std::span<const std::size_t> keep) {
  if (keep.empty()) throw InvalidArgument("partial trace needs a non-empty kept set");
  check_domain(keep, psi.qubit_count());
  const std::size_t kdim = dim_of(keep.size());
  const auto off = local_offsets(keep, psi.qubit_count());
  const auto bases = complement_bases(keep, psi.qubit_count());
  CMatrix m(static_cast<Eigen::Index>(kdim), static_cast<Eigen::Index>(bases.size()));
  for (std::size_t r = 0; r < bases.size(); ++r)
    for (std::size_t l = 0; l < kdim; ++l)
      m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = psi[bases[r] | off[l]];
  CMatrix rho = m * m.adjoint();
  return rho;
}

DensityMatrix partial_trace(const StateVector& psi, std::span<const std::size_t> keep) {
  CMatrix rho = reduced_matrix(psi, keep);
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

double expectation(const StateVector& psi, const PauliString& p) {
  if (p.qubit_count() != psi.qubit_count()) throw DimensionError("qubit count mismatch");
  const PauliMask m = p.mask();
  cplx acc = 0.0;
  for (std::uint64_t b = 0; b < psi.dimension(); ++b)
    acc += std::conj(psi[b ^ m.x]) * m.phase(b) * psi[b];
  return p.coefficient() * acc.real();
}

double expectation(const StateVector& psi, const PauliSum& h) {
  if (h.qubit_count() != psi.qubit_count()) throw DimensionError("qubit count mismatch");
  double e = 0.0;
  for (const auto& t : h.terms()) e += expectation(psi, t);
  return e;
}

cplx expectation_cross(const StateVector& psi, const PauliString& a, const PauliString& b) {
  if (a.qubit_count() != psi.qubit_count() || b.qubit_count() != psi.qubit_count())
    throw DimensionError("qubit count mismatch");
  StateVector pa = psi;
  pa.apply_pauli(a.mask());
  StateVector pb = psi;
  pb.apply_pauli(b.mask());
  return a.coefficient() * b.coefficient() * pa.amplitudes().dot(pb.amplitudes());
}

cplx expectation_cross(const StateVector& psi, const PauliString& a, const CMatrix& b_local,
                       std::span<const std::size_t> domain) {
  if (a.qubit_count() != psi.qubit_count()) throw DimensionError("qubit count mismatch");
  StateVector pa = psi;
  pa.apply_pauli(a.mask());
  StateVector pb = psi;
  pb.apply_matrix(b_local, domain);
  return a.coefficient() * pa.amplitudes().dot(pb.amplitudes());
}

double state_fidelity(const StateVector& a, const StateVector& b) {
  if (a.qubit_count() != b.qubit_count()) throw DimensionError("qubit count mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

namespace dense {

CMatrix embed(const CMatrix& local, std::span<const std::size_t> domain, std::size_t qubits) {
  if (qubits > 8) throw SizeLimitError("dense embedding limited to 8 qubits");
  check_domain(domain, qubits);
  const auto dim = static_cast<Eigen::Index>(dim_of(qubits));
  CMatrix out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    StateVector e = StateVector::basis(qubits, static_cast<std::size_t>(col));
    e.apply_matrix(local, domain);
    out.col(col) = e.amplitudes();
  }
  return out;
}

}  // namespace dense

}  // namespace vqhd
