#include "vqhd/qite.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <set>

#include <Eigen/Eigenvalues>

namespace vqhd {

namespace {

// Mask of local Pauli index I (base-4 digits = letters, first qubit most significant).
PauliMask local_mask(std::size_t index, std::size_t d) {
  PauliMask m;
  for (std::size_t j = 0; j < d; ++j) {
    const auto letter = static_cast<Pauli>((index >> (2 * (d - 1 - j))) & 3U);
    const std::uint64_t bit = std::uint64_t{1} << (d - 1 - j);
    switch (letter) {
      case Pauli::I: break;
      case Pauli::X: m.x |= bit; break;
      case Pauli::Y: m.x |= bit; m.z |= bit; ++m.y_count; break;
      case Pauli::Z: m.z |= bit; break;
    }
  }
  return m;
}

// Expectation table Tr(rho sigma) for every local Pauli, keyed by (x << d) | z.
std::vector<cplx> pauli_expectations(const CMatrix& rho, std::size_t d) {
  const std::uint64_t dim = dim_of(d);
  std::vector<cplx> table(dim * dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      PauliMask m{x, z, std::popcount(x & z)};
      cplx acc = 0.0;
      // Tr(rho sigma) = sum_b <b|rho|b^x> phase(b)
      for (std::uint64_t b = 0; b < dim; ++b)
        acc += rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ x)) * m.phase(b);
      table[(x << d) | z] = acc;
    }
  }
  return table;
}

cplx lookup(const std::vector<cplx>& table, const PauliMask& m, std::size_t d) {
  return table[(m.x << d) | m.z];
}

struct LocalTerm {
  PauliMask mask;
  double weight = 0.0;
};

LocalTerm localize(const PauliString& h_m, std::span<const std::size_t> domain, std::size_t qubits) {
  if (h_m.qubit_count() > qubits) throw DimensionError("term is wider than the state");
  for (std::size_t s : h_m.support()) {
    if (std::find(domain.begin(), domain.end(), s) == domain.end())
      throw LocalityError("term support is not contained in the QITE domain");
  }
  std::vector<Pauli> letters;
  letters.reserve(domain.size());
  for (std::size_t q : domain) letters.push_back(q < h_m.qubit_count() ? h_m[q] : Pauli::I);
  return {PauliString(1.0, std::move(letters)).mask(), h_m.coefficient()};
}

double normalization(const std::vector<cplx>& table, const LocalTerm& h, std::size_t d,
                     double dtau) {
  // exp(-2 dtau w P) = cosh(2 dtau w) - sinh(2 dtau w) P, since P^2 = 1.
  const double t = 2.0 * dtau * h.weight;
  return std::cosh(t) - std::sinh(t) * lookup(table, h.mask, d).real();
}

RVector assemble_b(const std::vector<cplx>& table, const LocalTerm& h, std::size_t d, double c) {
  const std::size_t count = dim_of(2 * d) - 1;
  RVector b(static_cast<Eigen::Index>(count));
  const double scale = h.weight / std::sqrt(c);
  for (std::size_t i = 1; i <= count; ++i) {
    const PauliProduct p = multiply(local_mask(i, d), h.mask);
    b[static_cast<Eigen::Index>(i - 1)] = -2.0 * (scale * p.phase * lookup(table, p.mask, d)).imag();
  }
  return b;
}

CMatrix assemble_s(const std::vector<cplx>& table, std::size_t d) {
  const std::size_t count = dim_of(2 * d) - 1;
  std::vector<PauliMask> masks(count);
  for (std::size_t i = 0; i < count; ++i) masks[i] = local_mask(i + 1, d);
  CMatrix s(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      const PauliProduct p = multiply(masks[i], masks[j]);
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p.phase * lookup(table, p.mask, d);
    }
  }
  return s;
}

// Truncated solve of G a = -b with G = S + S^T = 2 Re S (real symmetric).
std::pair<RVector, double> solve_dense(const RMatrix& g, const RVector& b, double cutoff) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(g);
  if (es.info() != Eigen::Success) throw NumericalFailure("QITE linear solve failed");
  const RVector& lam = es.eigenvalues();
  const RMatrix& v = es.eigenvectors();
  RVector proj = v.transpose() * b;
  for (Eigen::Index k = 0; k < lam.size(); ++k) proj[k] = lam[k] > cutoff ? -proj[k] / lam[k] : 0.0;
  RVector a = v * proj;
  const double residual = (g * a + b).norm();
  return {std::move(a), residual};
}

// Same solve through a thin factor G = 2 R^T R, used when the reduced state has
// low rank (R has fewer rows than columns).
std::pair<RVector, double> solve_factored(const RMatrix& r, const RVector& b, double cutoff) {
  const RMatrix k = r * r.transpose();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(k);
  if (es.info() != Eigen::Success) throw NumericalFailure("QITE linear solve failed");
  const RVector& s2 = es.eigenvalues();  // singular values squared
  const RMatrix& w = es.eigenvectors();
  RVector coef = w.transpose() * (r * b);
  for (Eigen::Index i = 0; i < s2.size(); ++i) {
    const double g_eig = 2.0 * s2[i];
    coef[i] = g_eig > cutoff ? coef[i] / (2.0 * s2[i] * s2[i]) : 0.0;
  }
  RVector a = -(r.transpose() * (w * coef));
  const double residual = (2.0 * (r.transpose() * (r * a)) + b).norm();
  return {std::move(a), residual};
}

// Rows: real and imaginary parts of sqrt(p_k) sigma_I u_k stacked over the
// retained eigenvectors u_k of the reduced state.
RMatrix thin_factor(const CMatrix& rho, std::size_t d) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const RVector& p = es.eigenvalues();
  const double pmax = p.maxCoeff();
  std::vector<CVector> kept;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p[k] > 1e-13 * pmax) kept.push_back(std::sqrt(p[k]) * es.eigenvectors().col(k));
  const std::size_t dim = dim_of(d);
  const std::size_t count = dim_of(2 * d) - 1;
  RMatrix r(static_cast<Eigen::Index>(2 * dim * kept.size()), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const PauliMask m = local_mask(i + 1, d);
    Eigen::Index row = 0;
    for (const CVector& u : kept) {
      for (std::uint64_t bb = 0; bb < dim; ++bb) {
        const cplx v = m.phase(bb) * u[static_cast<Eigen::Index>(bb)];
        r(row + static_cast<Eigen::Index>(bb ^ m.x), static_cast<Eigen::Index>(i)) = v.real();
        r(row + static_cast<Eigen::Index>(dim + (bb ^ m.x)), static_cast<Eigen::Index>(i)) = v.imag();
      }
      row += static_cast<Eigen::Index>(2 * dim);
    }
  }
  return r;
}

CMatrix unitary_from(const RVector& a, std::size_t d, double dtau) {
  const std::size_t dim = dim_of(d);
  CMatrix generator = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const PauliMask m = local_mask(static_cast<std::size_t>(i) + 1, d);
    for (std::uint64_t b = 0; b < dim; ++b)
      generator(static_cast<Eigen::Index>(b ^ m.x), static_cast<Eigen::Index>(b)) += a[i] * m.phase(b);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(generator);
  const CVector phases = (es.eigenvalues() * cplx(0.0, -dtau)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::size_t QiteConfig::trotter_steps() const {
  if (!(dtau > 0.0)) throw InvalidArgument("dtau must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be finite and >= 0");
  const double ratio = (beta / 2.0) / dtau;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9)
    throw InvalidArgument("(beta/2)/dtau must be an integer number of Trotter steps");
  return static_cast<std::size_t>(rounded);
}

void QiteConfig::validate(std::size_t locality, std::size_t sites) const {
  trotter_steps();
  if (!(solver_cutoff >= 0.0)) throw InvalidArgument("solver cutoff must be >= 0");
  if (domain_size % 2 != 0) throw InvalidArgument("domain size D must be even");
  if (domain_size < 2 * locality) throw LocalityError("domain size must satisfy D >= 2L");
  if (domain_size > 2 * sites) throw LocalityError("domain size exceeds the 2n-qubit register");
}

IndexList select_domain(const IndexList& support, std::size_t n, std::size_t domain_size) {
  if (support.empty()) throw InvalidArgument("select_domain needs a non-empty support");
  const std::set<std::size_t> unique(support.begin(), support.end());
  for (std::size_t s : unique)
    if (s >= n) throw IndexError("support index outside the system register");
  if (domain_size % 2 != 0) throw InvalidArgument("domain size D must be even");
  if (domain_size < 2 * unique.size()) throw LocalityError("domain size must satisfy D >= 2L");
  if (domain_size > 2 * n) throw LocalityError("domain size exceeds the 2n-qubit register");

  // Shortest arc of the ring covering the support.
  std::size_t start = *unique.begin();
  std::size_t length = n + 1;
  for (std::size_t s : unique) {
    std::size_t len = 0;
    for (std::size_t t : unique) len = std::max(len, (t + n - s) % n + 1);
    if (len < length) {
      length = len;
      start = s;
    }
  }
  std::size_t end = (start + length - 1) % n;

  std::set<std::size_t> sites = unique;
  bool grow_right = true;
  while (sites.size() < domain_size / 2) {
    if (grow_right) {
      end = (end + 1) % n;
      sites.insert(end);
    } else {
      start = (start + n - 1) % n;
      sites.insert(start);
    }
    grow_right = !grow_right;
  }

  IndexList domain(sites.begin(), sites.end());
  for (std::size_t s : sites) domain.push_back(s + n);
  return domain;
}

PauliString local_pauli(std::size_t index, std::size_t domain_size) {
  if (index == 0 || index >= dim_of(2 * domain_size)) throw IndexError("local Pauli index out of range");
  std::vector<Pauli> letters(domain_size);
  for (std::size_t j = 0; j < domain_size; ++j)
    letters[j] = static_cast<Pauli>((index >> (2 * (domain_size - 1 - j))) & 3U);
  return PauliString(1.0, std::move(letters));
}

QiteLinearSystem assemble_qite_system(const StateVector& psi, const PauliString& h_m,
                                      std::span<const std::size_t> domain, double dtau) {
  const std::size_t d = domain.size();
  const LocalTerm h = localize(h_m, domain, psi.qubit_count());
  const CMatrix rho = reduced_matrix(psi, domain);
  const auto table = pauli_expectations(rho, d);
  QiteLinearSystem sys;
  sys.c = normalization(table, h, d, dtau);
  if (!(sys.c > 0.0)) throw NumericalFailure("QITE normalization c is not positive");
  sys.b = assemble_b(table, h, d, sys.c);
  sys.s = assemble_s(table, d);
  return sys;
}

std::pair<RVector, double> solve_qite_system(const QiteLinearSystem& sys, double cutoff) {
  const RMatrix g = 2.0 * sys.s.real();
  return solve_dense(g, sys.b, cutoff);
}

QiteStepResult qite_term_step(const StateVector& psi, const PauliString& h_m,
                              std::span<const std::size_t> domain, double dtau,
                              double solver_cutoff) {
  const std::size_t d = domain.size();
  if (d == 0) throw InvalidArgument("QITE domain is empty");
  const LocalTerm h = localize(h_m, domain, psi.qubit_count());
  const CMatrix rho = reduced_matrix(psi, domain);
  const auto table = pauli_expectations(rho, d);

  QiteStepReport report;
  report.domain.assign(domain.begin(), domain.end());
  report.c = normalization(table, h, d, dtau);
  if (!(report.c > 0.0) || !std::isfinite(report.c))
    throw NumericalFailure("QITE normalization c is not positive");

  // A term proportional to the identity only rescales the state.
  if ((h.mask.x | h.mask.z) == 0 || h.weight == 0.0) return {psi, report};

  const RVector b = assemble_b(table, h, d, report.c);
  const std::size_t count = dim_of(2 * d) - 1;
  const RMatrix r = thin_factor(rho, d);
  std::pair<RVector, double> solved;
  if (static_cast<std::size_t>(r.rows()) < count) {
    solved = solve_factored(r, b, solver_cutoff);
  } else {
    solved = solve_dense(2.0 * assemble_s(table, d).real(), b, solver_cutoff);
  }
  const auto& [a, residual] = solved;
  if (!a.allFinite()) {
    throw NumericalFailure("QITE linear solve produced non-finite coefficients (residual " +
                           std::to_string(residual) + ")");
  }
  report.a_norm = a.norm();
  report.residual = residual;

  StateVector out = psi;
  out.apply_matrix(unitary_from(a, d, dtau), domain);
  return {std::move(out), std::move(report)};
}

QiteRun prepare_tfd(const PauliSum& h, const QiteConfig& cfg, const SweepObserver& observer) {
  const std::size_t n = h.qubit_count();
  if (2 * n > kMaxQubits) throw SizeLimitError("prepare_tfd limited to 2n <= 12");
  cfg.validate(h.max_locality(), n);
  const std::size_t sweeps = cfg.trotter_steps();

  std::vector<IndexList> domains(h.size());
  for (std::size_t m = 0; m < h.size(); ++m) {
    if (!h.support(m).empty()) domains[m] = select_domain(h.support(m), n, cfg.domain_size);
  }

  QiteRun run{prepare_phi0(n), {}};
  run.reports.reserve(sweeps * h.size());
  if (observer) observer(0, 0.0, run.state);
  for (std::size_t sweep = 1; sweep <= sweeps; ++sweep) {
    const double tau = static_cast<double>(sweep) * cfg.dtau;
    for (std::size_t m = 0; m < h.size(); ++m) {
      const PauliString& term = h.term(m);
      QiteStepReport report;
      if (domains[m].empty()) {
        // Declared support is empty only for a pure identity term.
        report.c = std::exp(-2.0 * cfg.dtau * term.coefficient());
      } else {
        auto step = qite_term_step(run.state, term, domains[m], cfg.dtau, cfg.solver_cutoff);
        run.state = std::move(step.state);
        report = std::move(step.report);
      }
      report.sweep = sweep;
      report.term_index = m;
      report.cumulative_tau = tau;
      run.reports.push_back(std::move(report));
    }
    if (observer) observer(sweep, tau, run.state);
  }
  return run;
}

DensityMatrix prepare_thermal_state(const PauliSum& h, const QiteConfig& cfg) {
  const QiteRun run = prepare_tfd(h, cfg);
  IndexList system(h.qubit_count());
  for (std::size_t i = 0; i < system.size(); ++i) system[i] = i;
  return partial_trace(run.state, system);
}

std::uint64_t qite_measurement_count(std::uint64_t term_count, std::uint64_t domain_size) {
  std::uint64_t count = term_count;
  for (std::uint64_t k = 0; k < domain_size; ++k) count *= 4;
  return count;
}

void write_qite_trace(std::ostream& os, const std::vector<QiteStepReport>& reports) {
  os << "sweep,term,c,a_norm,residual,cumulative_tau\n";
  const auto old = os.precision(17);
  for (const auto& r : reports)
    os << r.sweep << ',' << r.term_index << ',' << r.c << ',' << r.a_norm << ',' << r.residual
       << ',' << r.cumulative_tau << '\n';
  os.precision(old);
}

}  // namespace vqhd
