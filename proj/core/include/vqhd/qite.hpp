#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "vqhd/pauli.hpp"
#include "vqhd/qstate.hpp"

namespace vqhd {

/// Parameters of a Trotterized QITE run.
struct QiteConfig {
  double beta = 0.0;
  double dtau = 0.005;
  std::size_t domain_size = 4;  // D, qubits per reconstructed unitary
  double solver_cutoff = 1e-8;

  /// N = (beta / 2) / dtau; throws InvalidArgument unless it is an integer
  /// within 1e-9.
  std::size_t trotter_steps() const;

  /// Checks every invariant against a Hamiltonian of `sites` sites with
  /// maximum term locality `locality`.
  void validate(std::size_t locality, std::size_t sites) const;
};

struct QiteStepReport {
  std::size_t sweep = 0;
  std::size_t term_index = 0;
  IndexList domain;
  double c = 1.0;         // <psi| e^{-2 dtau h[m]} |psi>
  double a_norm = 0.0;    // ||a[m]||
  double residual = 0.0;  // ||(S + S^T) a + b||
  double cumulative_tau = 0.0;
};

/// Domain of the unitary replacing e^{-dtau h[m]} on the 2n-qubit register:
/// the term's sites, grown to D/2 sites by nearest chain neighbours
/// (right, left, right, ... with periodic wrap), followed by their mirrors
/// s + n. Sites ascending, then mirrors ascending.
IndexList select_domain(const IndexList& support, std::size_t n, std::size_t domain_size);

/// Linear system of one QITE step, assembled from the reduced state on the
/// domain. Index I runs over the 4^D - 1 non-identity Pauli strings of the
/// domain; its base-4 digits are the letters (I=0, X=1, Y=2, Z=3), first domain
/// qubit most significant.
struct QiteLinearSystem {
  CMatrix s;  // S_IJ = <psi| sigma_I sigma_J |psi>
  RVector b;  // b_I = -2 Im[<psi| sigma_I h |psi> / sqrt(c)]
  double c = 1.0;
};

QiteLinearSystem assemble_qite_system(const StateVector& psi, const PauliString& h_m,
                                      std::span<const std::size_t> domain, double dtau);

/// The non-identity local Pauli string with basis index I (1 <= I < 4^D).
PauliString local_pauli(std::size_t index, std::size_t domain_size);

/// Minimum-norm solution of (S + S^T) a = -b with eigen-directions of S + S^T
/// below `cutoff` discarded; returns a and the residual.
std::pair<RVector, double> solve_qite_system(const QiteLinearSystem& sys, double cutoff);

struct QiteStepResult {
  StateVector state;
  QiteStepReport report;
};

/// One QITE update: replaces e^{-dtau h_m}|psi>/sqrt(c) by exp(-i dtau A)|psi>
/// with A supported on `domain`. `h_m` acts on the leading qubits of psi and
/// must be supported inside the domain.
QiteStepResult qite_term_step(const StateVector& psi, const PauliString& h_m,
                              std::span<const std::size_t> domain, double dtau,
                              double solver_cutoff = 1e-8);

struct QiteRun {
  StateVector state;
  std::vector<QiteStepReport> reports;
};

/// Called with (sweep, tau, state) before the first sweep and after each one.
using SweepObserver = std::function<void(std::size_t, double, const StateVector&)>;

/// Evolves |phi_0> by N first-order Trotter sweeps over the terms of `h` in
/// construction order, returning the approximate thermofield double state.
QiteRun prepare_tfd(const PauliSum& h, const QiteConfig& cfg, const SweepObserver& observer = {});

/// prepare_tfd followed by tracing out the mirror register.
DensityMatrix prepare_thermal_state(const PauliSum& h, const QiteConfig& cfg);

/// Pauli measurements per QITE iteration: N_m * 4^D.
std::uint64_t qite_measurement_count(std::uint64_t term_count, std::uint64_t domain_size);

/// CSV: sweep,term,c,a_norm,residual,cumulative_tau
void write_qite_trace(std::ostream& os, const std::vector<QiteStepReport>& reports);

}  // namespace vqhd
