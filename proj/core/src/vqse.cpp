#include "vqhd/vqse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

namespace vqhd {

namespace {

// rho = F F^dagger with F = U diag(sqrt(p)).
CMatrix density_factor(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<cplx>().asDiagonal();
}

double factor_cost(const CMatrix& factor, const AnsatzCircuit& v, const CostSpec& spec) {
  CMatrix f = factor;
  v.apply_to_columns(f);
  double captured = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i)
    captured += spec.weights[static_cast<Eigen::Index>(i)] * f.row(static_cast<Eigen::Index>(i)).squaredNorm();
  return 1.0 - captured;
}

RVector factor_gradient(const CMatrix& factor, const AnsatzCircuit& v, const CostSpec& spec) {
  AnsatzCircuit shifted = v;
  RVector theta = v.parameters();
  RVector grad(theta.size());
  constexpr double shift = std::numbers::pi / 2.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    theta[i] = t + shift;
    shifted.set_parameters(theta);
    const double plus = factor_cost(factor, shifted, spec);
    theta[i] = t - shift;
    shifted.set_parameters(theta);
    const double minus = factor_cost(factor, shifted, spec);
    theta[i] = t;
    grad[i] = 0.5 * (plus - minus);
  }
  return grad;
}

struct RestartOutcome {
  RVector best_theta;
  double best_cost = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TrainIteration> history;
};

RestartOutcome run_restart(const CMatrix& factor, AnsatzCircuit v, const CostSpec& spec,
                           const TrainOptions& opt) {
  RestartOutcome out;
  RVector theta = v.parameters();
  const double initial = factor_cost(factor, v, spec);
  out.best_theta = theta;
  out.best_cost = initial;

  RVector velocity = RVector::Zero(theta.size());
  RVector m1 = RVector::Zero(theta.size());
  RVector m2 = RVector::Zero(theta.size());
  double previous = initial;
  std::size_t calm = 0;

  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    v.set_parameters(theta);
    const double c = it == 0 ? initial : factor_cost(factor, v, spec);
    if (!std::isfinite(c) || (c > 10.0 * initial && c - initial > 1e-6)) {
      throw DivergedError("VQSE training diverged at iteration " + std::to_string(it) +
                          "; try a smaller learning rate");
    }
    const RVector g = factor_gradient(factor, v, spec);
    out.history.push_back({it, c, g.norm()});
    out.iterations = it;
    if (c < out.best_cost) {
      out.best_cost = c;
      out.best_theta = theta;
    }
    if (it > 0) {
      calm = std::abs(c - previous) < opt.tol ? calm + 1 : 0;
      if (calm >= opt.patience) {
        out.converged = true;
        break;
      }
    }
    if (g.norm() < opt.grad_tol) {
      out.converged = true;
      break;
    }
    previous = c;

    switch (opt.optimizer) {
      case Optimizer::GradientDescent:
        theta -= opt.eta * g;
        break;
      case Optimizer::Momentum:
        velocity = opt.momentum * velocity - opt.eta * g;
        theta += velocity;
        break;
      case Optimizer::Adam: {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        m1 = b1 * m1 + (1.0 - b1) * g;
        m2 = b2 * m2 + (1.0 - b2) * g.cwiseAbs2();
        const double t = static_cast<double>(it + 1);
        const RVector mhat = m1 / (1.0 - std::pow(b1, t));
        const RVector vhat = m2 / (1.0 - std::pow(b2, t));
        theta -= (opt.eta * mhat.array() / (vhat.array().sqrt() + eps)).matrix();
        break;
      }
    }
  }
  return out;
}

}  // namespace

CostSpec CostSpec::linear(std::size_t k) {
  if (k == 0) throw InvalidArgument("cost spec needs K >= 1");
  CostSpec s;
  s.weights.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    s.weights[static_cast<Eigen::Index>(i)] = static_cast<double>(k - i) / static_cast<double>(k);
  return s;
}

void CostSpec::validate(std::size_t dimension) const {
  if (k() == 0) throw InvalidArgument("cost spec needs K >= 1");
  if (k() > dimension) throw InvalidArgument("K exceeds the Hilbert-space dimension");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0 && weights[i] <= 1.0)) throw InvalidArgument("cost weights must lie in (0, 1]");
    if (i > 0 && !(weights[i - 1] > weights[i]))
      throw InvalidArgument("cost weights must be strictly decreasing");
  }
}

double cost(const DensityMatrix& rho_f, const CostSpec& spec) {
  spec.validate(rho_f.dimension());
  double captured = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    captured += spec.weights[ii] * rho_f.matrix()(ii, ii).real();
  }
  return 1.0 - captured;
}

double circuit_cost(const DensityMatrix& rho, const AnsatzCircuit& v, const CostSpec& spec) {
  spec.validate(rho.dimension());
  if (v.qubit_count() != rho.qubit_count()) throw DimensionError("circuit width mismatch");
  return factor_cost(density_factor(rho), v, spec);
}

RVector parameter_shift_gradient(const DensityMatrix& rho, const AnsatzCircuit& v, const CostSpec& spec) {
  spec.validate(rho.dimension());
  if (v.qubit_count() != rho.qubit_count()) throw DimensionError("circuit width mismatch");
  return factor_gradient(density_factor(rho), v, spec);
}

double rearrangement_bound(const DensityMatrix& rho, const CostSpec& spec) {
  spec.validate(rho.dimension());
  RVector mu = rho.eigenvalues();
  std::sort(mu.begin(), mu.end(), std::greater<>());
  double captured = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i)
    captured += spec.weights[static_cast<Eigen::Index>(i)] * mu[static_cast<Eigen::Index>(i)];
  return 1.0 - captured;
}

AnsatzCircuit build_vqse_ansatz(std::size_t n, std::size_t depth) {
  if (n < 1 || depth < 1) throw InvalidArgument("VQSE ansatz needs n >= 1 and depth >= 1");
  AnsatzCircuit c(n);
  for (std::size_t layer = 0; layer < depth; ++layer) {
    for (std::size_t q = 0; q < n; ++q) {
      c.add_rotation(GateKind::Ry, q);
      c.add_rotation(GateKind::Rz, q);
    }
    if (n == 2) {
      c.add_cnot(0, 1);
    } else if (n > 2) {
      for (std::size_t q = 0; q < n; ++q) c.add_cnot(q, (q + 1) % n);
    }
  }
  return c;
}

std::size_t default_vqse_depth(std::size_t n) { return n <= 4 ? 4 : 6; }

VqseResult train(const DensityMatrix& rho, const AnsatzCircuit& ansatz, const CostSpec& spec,
                 const TrainOptions& options) {
  spec.validate(rho.dimension());
  if (ansatz.qubit_count() != rho.qubit_count()) throw DimensionError("ansatz width mismatch");
  if (options.restarts == 0) throw InvalidArgument("at least one restart is required");
  const CMatrix factor = density_factor(rho);

  VqseResult result{ansatz, 0.0, 0, 0, false, {}, {}, {}};
  bool have = false;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    AnsatzCircuit start = ansatz;
    if (r > 0) {
      std::mt19937_64 rng(options.seed + r);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      RVector theta(static_cast<Eigen::Index>(start.parameter_count()));
      for (auto& t : theta) t = angle(rng);
      start.set_parameters(theta);
    }
    RestartOutcome o = run_restart(factor, start, spec, options);
    if (!have || o.best_cost < result.final_cost) {
      have = true;
      result.circuit.set_parameters(o.best_theta);
      result.final_cost = o.best_cost;
      result.best_restart = r;
      result.iterations = o.iterations;
      result.converged = o.converged;
      result.history = std::move(o.history);
    }
  }
  return result;
}

Eigensystem extract_eigensystem(const PauliSum& h, const AnsatzCircuit& trained, std::size_t k) {
  if (trained.qubit_count() != h.qubit_count()) throw DimensionError("circuit width mismatch");
  const std::size_t dim = dim_of(h.qubit_count());
  if (k == 0 || k > dim) throw InvalidArgument("K must be in [1, 2^n]");
  std::vector<std::pair<double, StateVector>> levels;
  levels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    StateVector psi = StateVector::basis(h.qubit_count(), i);
    trained.apply_adjoint(psi);
    const double lambda = expectation(psi, h);
    levels.emplace_back(lambda, std::move(psi));
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigensystem sys;
  sys.eigenvalues.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    sys.eigenvalues[static_cast<Eigen::Index>(i)] = levels[i].first;
    sys.eigenstates.push_back(std::move(levels[i].second));
  }
  return sys;
}

double average_fidelity(const std::vector<StateVector>& predicted, const Spectrum& exact, std::size_t k) {
  if (k == 0 || k > predicted.size() || k > exact.size())
    throw DimensionError("K exceeds the number of available states");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += exact.subspace_fidelity(i, predicted[i]);
  return total / static_cast<double>(k);
}

void write_training_csv(std::ostream& os, const std::vector<TrainIteration>& history) {
  os << "iteration,cost,grad_norm\n";
  const auto old = os.precision(17);
  for (const auto& h : history) os << h.iteration << ',' << h.cost << ',' << h.grad_norm << '\n';
  os.precision(old);
}

void write_eigen_csv(std::ostream& os, const Eigensystem& sys, const Spectrum& exact) {
  os << "k,lambda_k,fidelity_vs_exact\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < sys.eigenstates.size(); ++i) {
    os << i << ',' << sys.eigenvalues[static_cast<Eigen::Index>(i)] << ','
       << exact.subspace_fidelity(i, sys.eigenstates[i]) << '\n';
  }
  os.precision(old);
}

}  // namespace vqhd
