#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vqhd {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Ordered list of qubit (or site) indices.
using IndexList = std::vector<std::size_t>;

/// Largest register the simulator accepts (2n <= 12 for n <= 6 system spins).
inline constexpr std::size_t kMaxQubits = 12;

// Error hierarchy. Every failure raised by the library derives from vqhd::Error
// so callers can catch the whole family in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class LocalityError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline std::size_t dim_of(std::size_t qubits) { return std::size_t{1} << qubits; }

}  // namespace vqhd
