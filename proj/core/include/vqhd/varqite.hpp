#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "vqhd/circuit.hpp"
#include "vqhd/pauli.hpp"
#include "vqhd/qite.hpp"

namespace vqhd {

/// N_p = 4 (2n - 1) d + 3n.
std::size_t varqite_parameter_count(std::size_t n, std::size_t depth);

/// Layered ansatz on 2n qubits, with parameters set to the point where the
/// circuit prepares |phi_0>.
///
/// Body: `depth` layers, each a ladder of two-qubit blocks on (k, k+1) for
/// k = 0..2n-2; a block is Ry then Rz on both qubits followed by CNOT(k, k+1).
/// Tail: Rz(t1), Rx(t2), Rz(t3) on each of the first n qubits (t1 applied
/// first), then CNOT(i, i+n). Body angles start at 0 and the tail at
/// (3pi/2, pi/2, 5pi/2), which maps |0> to |+> up to phase.
AnsatzCircuit build_varqite_ansatz(std::size_t n, std::size_t depth);

struct VarQiteStep {
  std::size_t step = 0;
  double tau = 0.0;
  double energy = 0.0;
  double state_fidelity_vs_exact = 1.0;  // |<psi(theta)|TFD(2 tau)>|^2
};

struct VarQiteResult {
  AnsatzCircuit circuit;
  std::vector<VarQiteStep> trajectory;
};

using VarQiteObserver = std::function<void(std::size_t, double, const AnsatzCircuit&)>;

/// McLachlan imaginary-time flow A theta_dot = C with
///   A_ij = Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]
///   C_i  = -Re<d_i psi|H|psi> + <H> Re<d_i psi|psi>,
/// integrated by Euler steps of cfg.dtau up to tau = beta/2. H acts on the
/// first n of the 2n qubits. `observer` sees (step, tau, circuit) before the
/// first step and after each step.
VarQiteResult varqite_evolve(const PauliSum& h, const AnsatzCircuit& circuit, const QiteConfig& cfg,
                             const VarQiteObserver& observer = {});

/// N_p^2 + N_p * N_m.
std::uint64_t varqite_measurement_count(std::uint64_t parameters, std::uint64_t term_count);

/// (F_V - F_D) / F_D.
double relative_fidelity(double f_varqite, double f_qite);

/// CSV: step,tau,energy,state_fidelity_vs_exact
void write_varqite_trajectory(std::ostream& os, const std::vector<VarQiteStep>& steps);

}  // namespace vqhd
