// Acceptance run: one PASS/FAIL line per criterion.
// Pass --full to also record the slow five-spin sweeps.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vqhd/exact.hpp"
#include "vqhd/harness.hpp"
#include "vqhd/metrics.hpp"
#include "vqhd/qite.hpp"
#include "vqhd/varqite.hpp"
#include "vqhd/vqse.hpp"

using namespace vqhd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

using Check = std::function<void(Outcome&)>;

IndexList first_n(std::size_t n) {
  IndexList s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

std::string label(Family f, std::size_t n) { return to_string(f) + " n=" + std::to_string(n); }

// Criterion 1: every measurement-count cell.
void table_counts(Outcome& o) {
  try {
    const auto cells = run_table1(1);
    o.require(cells.size() == 8, "expected 8 rows");
    o.detail << "16 cells matched";
  } catch (const ContractViolation& e) {
    o.require(false, e.what());
  }
}

// Criterion 2: term counts of the generated Hamiltonians.
void term_counts(Outcome& o) {
  const std::map<Family, std::vector<std::size_t>> expected{{Family::R2L, {16, 48, 64, 80}},
                                                            {Family::RTH, {5, 12, 16, 20}}};
  for (const auto& [f, counts] : expected) {
    for (std::size_t n = 2; n <= 5; ++n) {
      const std::size_t got = generate(f, n, 1).size();
      o.require(got == counts[n - 2], label(f, n) + " has " + std::to_string(got) + " terms");
    }
  }
  o.detail << "N_m rows matched";
}

struct TwoSpinTrajectories {
  std::vector<ResultRow> rows;
  bool ready = false;
};

TwoSpinTrajectories& two_spin() {
  static TwoSpinTrajectories t;
  if (!t.ready) {
    ExperimentConfig cfg;
    cfg.sizes = {2};
    t.rows = run_fig3(cfg);
    t.ready = true;
  }
  return t;
}

// Criterion 3: two-spin QITE fidelity over the whole beta grid.
void two_spin_fidelity(Outcome& o) {
  double worst = 1.0;
  for (const auto& r : two_spin().rows) {
    if (r.metric != Metric::QiteFidelity) continue;
    worst = std::min(worst, r.value);
    if (r.value < 0.99) o.require(false, label(r.family, r.n) + " beta=" + std::to_string(r.beta));
  }
  o.detail << "min F=" << std::setprecision(6) << worst;
}

std::vector<ResultRow>& larger_sizes() {
  static std::vector<ResultRow> rows;
  static bool ready = false;
  if (!ready) {
    ExperimentConfig cfg;
    cfg.sizes = {3, 4, 5};
    cfg.betas = {0.0, 0.05, 0.1};
    rows = run_fig3(cfg);
    ready = true;
  }
  return rows;
}

// Criterion 4: three to five spins at high temperature.
void larger_fidelity(Outcome& o) {
  double worst = 1.0;
  for (const auto& r : larger_sizes()) {
    if (r.metric != Metric::QiteFidelity) continue;
    worst = std::min(worst, r.value);
    if (r.value < 0.99) o.require(false, label(r.family, r.n) + " beta=" + std::to_string(r.beta));
  }
  o.detail << "min F=" << std::setprecision(6) << worst;
}

// Criterion 5: half-cut entropy vanishes at beta=0 and never decreases.
void entropy_shape(Outcome& o) {
  std::vector<ResultRow> rows = two_spin().rows;
  const auto& more = larger_sizes();
  rows.insert(rows.end(), more.begin(), more.end());

  // Exact curves for every size over the full grid.
  for (Family f : {Family::R2L, Family::RTH}) {
    for (std::size_t n = 2; n <= 5; ++n) {
      const Spectrum s = diagonalize(generate(f, n, 1));
      const StateVector phi0 = prepare_phi0(n);
      for (double beta : fig3_betas()) {
        rows.push_back({"exact", f, n, 1, 0, beta, Metric::ExactEntropy,
                        von_neumann_entropy(imaginary_evolve_exact(phi0, s, beta / 2.0), half_cut(n)), false, 0.0});
      }
    }
  }

  std::map<std::tuple<Family, std::size_t, Metric>, std::vector<std::pair<double, double>>> curves;
  for (const auto& r : rows)
    if (r.metric == Metric::ExactEntropy || r.metric == Metric::QiteEntropy)
      curves[{r.family, r.n, r.metric}].push_back({r.beta, r.value});
  for (auto& [key, curve] : curves) {
    std::sort(curve.begin(), curve.end());
    const std::string name = label(std::get<0>(key), std::get<1>(key)) + " " + to_string(std::get<2>(key));
    if (curve.front().first == 0.0) o.require(std::abs(curve.front().second) <= 1e-9, name + " nonzero at beta=0");
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].second < curve[i - 1].second - 1e-6) {
        std::ostringstream at;
        at << name << " decreases from beta=" << curve[i].first;
        o.require(false, at.str());
        break;
      }
    }
  }
  o.detail << " " << curves.size() << " curves";
}

// Criterion 6: energy above the ground state.
void energy_gap(Outcome& o) {
  std::vector<ResultRow> rows = two_spin().rows;
  const auto& more = larger_sizes();
  rows.insert(rows.end(), more.begin(), more.end());
  for (const auto& r : rows)
    if (r.metric == Metric::EnergyGap && r.value < 0.0)
      o.require(false, label(r.family, r.n) + " negative at beta=" + std::to_string(r.beta));

  for (Family f : {Family::R2L, Family::RTH}) {
    double qite = 0.0, exact = 0.0;
    for (const auto& r : two_spin().rows) {
      if (r.family != f || r.beta != 1.0) continue;
      if (r.metric == Metric::EnergyGap) qite = r.value;
      if (r.metric == Metric::ExactEnergyGap) exact = r.value;
    }
    const double rel = std::abs(qite - exact) / exact;
    o.detail << " " << to_string(f) << ": " << std::setprecision(4) << qite << " vs " << exact << " (" << rel * 100
             << "%)";
    o.require(rel <= 0.10, to_string(f) + " beyond 10%");
  }
}

// Criterion 7: thermal state, VQSE and eigenpair readout at two spins.
void end_to_end(Outcome& o) {
  for (auto [f, beta] : {std::pair{Family::R2L, 0.05}, {Family::RTH, 0.1}}) {
    const PauliSum h = generate(f, 2, 1);
    QiteConfig q;
    q.beta = beta;
    const DensityMatrix rho = prepare_thermal_state(h, q);
    const VqseResult r = train(rho, build_vqse_ansatz(2, default_vqse_depth(2)), CostSpec::linear(4));
    const Eigensystem e = extract_eigensystem(h, r.circuit, 4);
    const Spectrum exact = diagonalize(h);
    const double avg = average_fidelity(e.eigenstates, exact, 4);
    const double err = (e.eigenvalues - exact.eigenvalues.head(4)).cwiseAbs().maxCoeff();
    o.detail << " " << to_string(f) << ": avgF=" << std::setprecision(5) << avg << " max|dE|=" << err;
    o.require(avg >= 0.95, to_string(f) + " average fidelity");
    o.require(err <= 1e-2, to_string(f) + " eigenvalues");
  }
}

CMatrix random_density(std::mt19937_64& rng, std::size_t qubits) {
  std::normal_distribution<double> g;
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  CMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
  CMatrix rho = m * m.adjoint();
  return rho / rho.trace().real();
}

// Criterion 8: oracle equivalences.
void oracles(Outcome& o) {
  double tfd_err = 0.0;
  for (Family f : {Family::R2L, Family::RTH})
    for (std::size_t n = 2; n <= 4; ++n) {
      const Spectrum s = diagonalize(generate(f, n, 1));
      for (double beta : {0.0, 0.1, 0.5, 1.0}) {
        const DensityMatrix traced = partial_trace(imaginary_evolve_exact(prepare_phi0(n), s, beta / 2), first_n(n));
        tfd_err = std::max(tfd_err, (traced.matrix() - thermal_state_exact(s, beta).matrix()).cwiseAbs().maxCoeff());
      }
    }
  o.require(tfd_err <= 1e-9, "(a) trace route");
  o.detail << " (a) " << std::setprecision(2) << tfd_err;

  double qite_worst = 1.0;
  for (Family f : {Family::R2L, Family::RTH})
    for (std::size_t n : {2u, 3u}) {
      const PauliSum h = generate(f, n, 1);
      QiteConfig cfg;
      cfg.beta = 1.0;
      cfg.domain_size = 2 * n;
      const Spectrum s = diagonalize(h);
      prepare_tfd(h, cfg, [&](std::size_t, double tau, const StateVector& psi) {
        const DensityMatrix rho = partial_trace(psi, first_n(n));
        qite_worst = std::min(qite_worst, fidelity(rho, thermal_state_exact(s, 2.0 * tau)));
      });
    }
  o.require(qite_worst >= 1.0 - 1e-3, "(b) whole-register QITE");
  o.detail << " (b) " << std::setprecision(6) << qite_worst;

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  double grad_err = 0.0;
  for (std::size_t n : {2u, 3u}) {
    const DensityMatrix rho(random_density(rng, n));
    AnsatzCircuit v = build_vqse_ansatz(n, 2);
    RVector theta(static_cast<Eigen::Index>(v.parameter_count()));
    for (auto& t : theta) t = angle(rng);
    v.set_parameters(theta);
    const CostSpec spec = CostSpec::linear(std::size_t{1} << n);
    const RVector g = parameter_shift_gradient(rho, v, spec);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      AnsatzCircuit p = v, m = v;
      RVector tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      p.set_parameters(tp);
      m.set_parameters(tm);
      grad_err = std::max(grad_err, std::abs(g[i] - (circuit_cost(rho, p, spec) - circuit_cost(rho, m, spec)) / (2 * h)));
    }
  }
  o.require(grad_err <= 1e-5, "(c) parameter shift");
  o.detail << " (c) " << std::setprecision(2) << grad_err;

  double bound_gap = 1.0;
  for (std::size_t trial = 0; trial < 3; ++trial) {
    const DensityMatrix rho(random_density(rng, 2));
    const CostSpec spec = CostSpec::linear(4);
    TrainOptions opt;
    opt.max_iters = 500;
    opt.restarts = 2;
    const VqseResult r = train(rho, build_vqse_ansatz(2, 2), spec, opt);
    bound_gap = std::min(bound_gap, r.final_cost - rearrangement_bound(rho, spec));
  }
  o.require(bound_gap >= -1e-9, "(d) rearrangement bound");
  o.detail << " (d) " << std::setprecision(2) << bound_gap;

  double soft = 0.0;
  for (Family f : {Family::R2L, Family::RTH})
    for (std::size_t n = 2; n <= 5; ++n) {
      const Spectrum s = diagonalize(generate(f, n, 1));
      for (double beta : {0.1, 0.5, 1.0}) soft = std::max(soft, eigenvalue_softmax_check(s, thermal_state_exact(s, beta), beta));
    }
  o.require(soft <= 1e-10, "(e) softmax");
  o.detail << " (e) " << std::setprecision(2) << soft;
}

double qite_fidelity(const PauliSum& h, double beta) {
  QiteConfig cfg;
  cfg.beta = beta;
  return fidelity(prepare_thermal_state(h, cfg), thermal_state_exact(h, beta));
}

double varqite_fidelity(const PauliSum& h, std::size_t n, std::size_t depth, double beta) {
  QiteConfig cfg;
  cfg.beta = beta;
  const VarQiteResult r = varqite_evolve(h, build_varqite_ansatz(n, depth), cfg);
  return fidelity(partial_trace(r.circuit.state(), first_n(n)), thermal_state_exact(h, beta));
}

// Criterion 9: VarQITE against QITE at beta=1.
void varqite_comparison(Outcome& o) {
  for (auto [f, n, d, deep] : {std::tuple{Family::R2L, 2u, 4u, true}, {Family::RTH, 2u, 3u, true},
                               {Family::R2L, 3u, 1u, false}, {Family::RTH, 3u, 1u, false}}) {
    const PauliSum h = generate(f, n, 1);
    const double rel = relative_fidelity(varqite_fidelity(h, n, d, 1.0), qite_fidelity(h, 1.0));
    o.detail << " " << label(f, n) << " d=" << d << ": " << std::setprecision(3) << rel;
    if (deep)
      o.require(rel >= kRelativeFidelityReference, label(f, n) + " below reference");
    else
      o.require(rel < 0.0, label(f, n) + " not negative");
  }
}

// Slow five-spin sweeps; values are printed, not judged.
void record_full() {
  ExperimentConfig cfg;
  cfg.sizes = {5};
  cfg.varqite_depths = {1, 2, 3, 4, 5};
  std::cout << "RECORD fig2 n=5\n";
  write_results_csv(std::cout, run_fig2(cfg));
  cfg.betas = {0.25, 0.5, 0.75, 1.0};
  std::cout << "RECORD fig4 n=5\n";
  write_results_csv(std::cout, run_fig4(cfg), kRelativeFidelityReference);
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) {
      full = true;
    } else {
      std::cerr << "usage: " << argv[0] << " [--full]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, Check>> criteria{
      {"table I measurement counts", table_counts},
      {"term counts", term_counts},
      {"two-spin QITE fidelity", two_spin_fidelity},
      {"QITE fidelity n=3..5, beta<=0.1", larger_fidelity},
      {"half-cut entropy", entropy_shape},
      {"energy above ground state", energy_gap},
      {"two-spin eigensolver", end_to_end},
      {"oracle equivalences", oracles},
      {"VarQITE comparison", varqite_comparison},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << std::fixed
              << std::setprecision(1) << secs << " s)" << std::defaultfloat << ":" << o.detail.str() << std::endl;
  }
  if (full) record_full();
  return failures == 0 ? 0 : 1;
}
