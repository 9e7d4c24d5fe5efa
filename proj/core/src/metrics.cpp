#include "vqhd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace vqhd {

namespace {

// Eigenvalues within roundoff of zero are treated as exact zeros.
CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const RVector root = es.eigenvalues().unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
  return es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dimension() != sigma.dimension()) throw DimensionError("density matrix size mismatch");
  const CMatrix product = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
  Eigen::JacobiSVD<CMatrix> svd(product);
  const double tr = svd.singularValues().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : rho.eigenvalues())
    if (p > 1e-12) s -= p * std::log(p);
  return std::max(s, 0.0);
}

double von_neumann_entropy(const StateVector& psi, std::span<const std::size_t> subsystem) {
  return von_neumann_entropy(partial_trace(psi, subsystem));
}

IndexList half_cut(std::size_t n) {
  IndexList c;
  for (std::size_t i = 0; i < n / 2; ++i) c.push_back(i);
  for (std::size_t i = 0; i < n / 2; ++i) c.push_back(n + i);
  return c;
}

double eigenvalue_softmax_check(const Spectrum& spectrum, const DensityMatrix& rho, double beta) {
  if (spectrum.size() != rho.dimension()) throw DimensionError("spectrum size mismatch");
  RVector expected = thermal_weights(spectrum.eigenvalues, beta);
  RVector actual = rho.eigenvalues();
  std::sort(expected.begin(), expected.end());
  std::sort(actual.begin(), actual.end());
  return (expected - actual).cwiseAbs().maxCoeff();
}

}  // namespace vqhd
