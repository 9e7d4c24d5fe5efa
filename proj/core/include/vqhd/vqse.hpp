#pragma once

#include <cstdint>
#include <iosfwd>

#include "vqhd/circuit.hpp"
#include "vqhd/exact.hpp"
#include "vqhd/pauli.hpp"
#include "vqhd/qstate.hpp"

namespace vqhd {

class DivergedError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Weights of H_cost = 1 - sum_{i<K} q_i |i><i|, strictly decreasing in (0, 1].
struct CostSpec {
  RVector weights;

  std::size_t k() const { return static_cast<std::size_t>(weights.size()); }

  /// q_i = (K + 1 - i) / K for i = 1..K.
  static CostSpec linear(std::size_t k);

  /// Throws InvalidArgument on an ordering or range violation, or K > dim.
  void validate(std::size_t dimension) const;
};

/// Tr[H_cost rho_f] = 1 - sum_i q_i <i|rho_f|i>, |i> in lexicographic order.
double cost(const DensityMatrix& rho_f, const CostSpec& spec);

/// Tr[H_cost V rho V^dagger] for the circuit's current parameters.
double circuit_cost(const DensityMatrix& rho, const AnsatzCircuit& v, const CostSpec& spec);

/// Exact gradient by the two-term parameter-shift rule (shift pi/2).
RVector parameter_shift_gradient(const DensityMatrix& rho, const AnsatzCircuit& v, const CostSpec& spec);

/// min over unitaries of the cost: 1 - sum_i q_i mu_i with mu the descending
/// eigenvalues of rho.
double rearrangement_bound(const DensityMatrix& rho, const CostSpec& spec);

/// Hardware-efficient ansatz on n qubits: per layer Ry and Rz on each qubit,
/// then a CNOT ring (a single CNOT for n = 2). All angles start at 0.
AnsatzCircuit build_vqse_ansatz(std::size_t n, std::size_t depth);
std::size_t default_vqse_depth(std::size_t n);

enum class Optimizer { GradientDescent, Momentum, Adam };

struct TrainOptions {
  double eta = 0.1;
  std::size_t max_iters = 5000;
  double tol = 1e-8;
  std::size_t patience = 20;  // consecutive |dC| < tol before stopping
  std::size_t restarts = 5;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::GradientDescent;
  double momentum = 0.9;
  double grad_tol = 1e-12;  // stationary start: stop without stepping
};

struct TrainIteration {
  std::size_t iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
};

struct VqseResult {
  AnsatzCircuit circuit;  // parameters set to theta*
  double final_cost = 0.0;
  std::size_t best_restart = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TrainIteration> history;  // of the winning restart
  RVector eigenvalues;                  // filled by extract_eigensystem
  std::vector<StateVector> eigenstates;

  const RVector& theta_star() const { return circuit.parameters(); }
};

/// Gradient descent on the cost. Restart 0 starts from the ansatz parameters,
/// later restarts from uniform random angles seeded by seed + r. Each restart
/// keeps its best-seen point; the lowest final cost wins.
VqseResult train(const DensityMatrix& rho, const AnsatzCircuit& ansatz, const CostSpec& spec,
                 const TrainOptions& options = {});

struct Eigensystem {
  RVector eigenvalues;                   // ascending
  std::vector<StateVector> eigenstates;  // V^dagger |k>, same order
};

/// |psi_k> = V^dagger |k> for k < K, lambda_k = <psi_k|H|psi_k>, sorted ascending.
Eigensystem extract_eigensystem(const PauliSum& h, const AnsatzCircuit& trained, std::size_t k);

/// (1/K) sum_k F_k pairing predicted and exact levels in ascending order; F_k
/// is the projection onto the exact level's degenerate group.
double average_fidelity(const std::vector<StateVector>& predicted, const Spectrum& exact, std::size_t k);

/// CSV: iteration,cost,grad_norm
void write_training_csv(std::ostream& os, const std::vector<TrainIteration>& history);
/// CSV: k,lambda_k,fidelity_vs_exact
void write_eigen_csv(std::ostream& os, const Eigensystem& sys, const Spectrum& exact);

}  // namespace vqhd
