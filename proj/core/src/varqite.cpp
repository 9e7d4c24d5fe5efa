#include "vqhd/varqite.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "vqhd/exact.hpp"

namespace vqhd {

namespace {

// H psi for H acting on the leading qubits of psi.
CVector apply_hamiltonian(const PauliSum& h, const StateVector& psi) {
  const std::size_t pad = psi.qubit_count() - h.qubit_count();
  CVector out = CVector::Zero(psi.amplitudes().size());
  for (const auto& t : h.terms()) {
    PauliMask m = t.mask();
    m.x <<= pad;
    m.z <<= pad;
    for (std::uint64_t b = 0; b < psi.dimension(); ++b)
      out[static_cast<Eigen::Index>(b ^ m.x)] += t.coefficient() * m.phase(b) * psi[b];
  }
  return out;
}

}  // namespace

std::size_t varqite_parameter_count(std::size_t n, std::size_t depth) {
  return 4 * (2 * n - 1) * depth + 3 * n;
}

AnsatzCircuit build_varqite_ansatz(std::size_t n, std::size_t depth) {
  if (n < 2) throw InvalidArgument("VarQITE ansatz requires n >= 2");
  if (depth < 1) throw InvalidArgument("VarQITE ansatz requires depth >= 1");
  if (2 * n > kMaxQubits) throw SizeLimitError("VarQITE ansatz limited to 2n <= 12");
  const std::size_t q = 2 * n;
  AnsatzCircuit c(q);
  for (std::size_t layer = 0; layer < depth; ++layer) {
    for (std::size_t k = 0; k + 1 < q; ++k) {
      for (std::size_t qubit : {k, k + 1}) {
        c.add_rotation(GateKind::Ry, qubit);
        c.add_rotation(GateKind::Rz, qubit);
      }
      c.add_cnot(k, k + 1);
    }
  }
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    c.add_rotation(GateKind::Rz, i, 1.5 * pi);
    c.add_rotation(GateKind::Rx, i, 0.5 * pi);
    c.add_rotation(GateKind::Rz, i, 2.5 * pi);
  }
  for (std::size_t i = 0; i < n; ++i) c.add_cnot(i, i + n);
  return c;
}

VarQiteResult varqite_evolve(const PauliSum& h, const AnsatzCircuit& circuit, const QiteConfig& cfg,
                             const VarQiteObserver& observer) {
  const std::size_t n = h.qubit_count();
  if (circuit.qubit_count() != 2 * n)
    throw DimensionError("VarQITE circuit must act on 2n qubits");
  const std::size_t steps = cfg.trotter_steps();
  const Spectrum spectrum = diagonalize(h);
  const StateVector phi0 = prepare_phi0(n);

  VarQiteResult result{circuit, {}};
  AnsatzCircuit& c = result.circuit;
  const auto np = static_cast<Eigen::Index>(c.parameter_count());

  auto record = [&](std::size_t step, double tau, const StateVector& psi) {
    const StateVector exact = imaginary_evolve_exact(phi0, spectrum, tau);
    const double e = psi.amplitudes().dot(apply_hamiltonian(h, psi)).real();
    result.trajectory.push_back({step, tau, e, state_fidelity(psi, exact)});
    if (observer) observer(step, tau, c);
  };

  record(0, 0.0, c.state());
  for (std::size_t step = 1; step <= steps; ++step) {
    const StateVector psi = c.state();
    const auto derivs = c.derivative_states();
    CMatrix d(static_cast<Eigen::Index>(psi.dimension()), np);
    for (Eigen::Index i = 0; i < np; ++i) d.col(i) = derivs[static_cast<std::size_t>(i)];

    const CVector h_psi = apply_hamiltonian(h, psi);
    const double e = psi.amplitudes().dot(h_psi).real();
    const CVector overlap = d.adjoint() * psi.amplitudes();  // <d_i psi|psi>
    const RMatrix a = (d.adjoint() * d - overlap * overlap.adjoint()).real();
    const RVector rhs = -(d.adjoint() * h_psi).real() + e * overlap.real();

    Eigen::SelfAdjointEigenSolver<RMatrix> es(a);
    if (es.info() != Eigen::Success)
      throw NumericalFailure("VarQITE linear solve failed at step " + std::to_string(step));
    RVector proj = es.eigenvectors().transpose() * rhs;
    for (Eigen::Index k = 0; k < proj.size(); ++k) {
      const double lam = es.eigenvalues()[k];
      proj[k] = lam > cfg.solver_cutoff ? proj[k] / lam : 0.0;
    }
    const RVector theta_dot = es.eigenvectors() * proj;
    if (!theta_dot.allFinite())
      throw NumericalFailure("VarQITE produced non-finite parameter rates at step " + std::to_string(step));
    c.set_parameters(c.parameters() + cfg.dtau * theta_dot);
    record(step, static_cast<double>(step) * cfg.dtau, c.state());
  }
  return result;
}

std::uint64_t varqite_measurement_count(std::uint64_t parameters, std::uint64_t term_count) {
  return parameters * parameters + parameters * term_count;
}

double relative_fidelity(double f_varqite, double f_qite) {
  if (f_qite == 0.0) throw InvalidArgument("relative fidelity undefined for F_D = 0");
  return (f_varqite - f_qite) / f_qite;
}

void write_varqite_trajectory(std::ostream& os, const std::vector<VarQiteStep>& steps) {
  os << "step,tau,energy,state_fidelity_vs_exact\n";
  const auto old = os.precision(17);
  for (const auto& s : steps)
    os << s.step << ',' << s.tau << ',' << s.energy << ',' << s.state_fidelity_vs_exact << '\n';
  os.precision(old);
}

}  // namespace vqhd
