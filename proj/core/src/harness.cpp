#include "vqhd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "vqhd/exact.hpp"
#include "vqhd/metrics.hpp"
#include "vqhd/qite.hpp"
#include "vqhd/varqite.hpp"

namespace vqhd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_beta(double beta) {
  std::ostringstream os;
  os << std::setprecision(12) << beta;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw InvalidArgument("bad number for '" + key + "': " + s);
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s.front() != '-') v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw InvalidArgument("bad integer for '" + key + "': " + s);
  return v;
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "gd") return Optimizer::GradientDescent;
  if (s == "momentum") return Optimizer::Momentum;
  if (s == "adam") return Optimizer::Adam;
  throw InvalidArgument("unknown optimizer: " + s + " (expected gd, momentum or adam)");
}

const std::vector<std::size_t> kAllSizes{2, 3, 4, 5};

const std::vector<std::size_t>& sizes_or_default(const ExperimentConfig& cfg) {
  return cfg.sizes.empty() ? kAllSizes : cfg.sizes;
}

IndexList system_qubits(std::size_t n) {
  IndexList s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

std::size_t sweeps_for(double beta, double dtau) {
  QiteConfig q;
  q.beta = beta;
  q.dtau = dtau;
  return q.trotter_steps();
}

CostSpec cost_spec_for(const ExperimentConfig& cfg, std::size_t n) {
  if (!cfg.q_weights.empty()) {
    CostSpec s;
    s.weights = Eigen::Map<const RVector>(cfg.q_weights.data(), static_cast<Eigen::Index>(cfg.q_weights.size()));
    return s;
  }
  std::size_t k = cfg.k;
  if (k == 0) k = n <= 4 ? dim_of(n) : 8;
  return CostSpec::linear(std::min(k, dim_of(n)));
}

struct Cell {
  Family family;
  std::size_t n;
  std::uint64_t seed;
};

std::vector<Cell> cells_of(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (Family f : cfg.families)
    for (std::size_t n : sizes_or_default(cfg))
      for (std::uint64_t s : cfg.seeds) cells.push_back({f, n, s});
  return cells;
}

std::vector<ResultRow> flatten(std::vector<std::vector<ResultRow>>& parts) {
  std::vector<ResultRow> rows;
  for (auto& p : parts) rows.insert(rows.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  sort_rows(rows);
  return rows;
}

// Trajectory of the traced QITE state sampled on a beta grid.
std::map<std::size_t, StateVector> qite_snapshots(const PauliSum& h, const std::vector<double>& betas,
                                                  const ExperimentConfig& cfg) {
  std::map<std::size_t, StateVector> wanted;
  std::size_t last = 0;
  for (double b : betas) {
    const std::size_t s = sweeps_for(b, cfg.dtau);
    wanted.emplace(s, StateVector(1));
    last = std::max(last, s);
  }
  QiteConfig q;
  q.beta = 2.0 * static_cast<double>(last) * cfg.dtau;
  q.dtau = cfg.dtau;
  q.domain_size = cfg.domain_size;
  prepare_tfd(h, q, [&](std::size_t sweep, double, const StateVector& psi) {
    auto it = wanted.find(sweep);
    if (it != wanted.end()) it->second = psi;
  });
  return wanted;
}

const struct {
  Family family;
  std::size_t n;
  std::size_t depth;
  std::uint64_t term_count;
  std::uint64_t varqite;
  std::uint64_t qite;
} kTable1[] = {
    {Family::R2L, 2, 3, 16, 2436, 4096},   {Family::R2L, 3, 4, 48, 12193, 12288},
    {Family::R2L, 4, 4, 64, 23312, 16384}, {Family::R2L, 5, 5, 80, 53625, 20480},
    {Family::RTH, 2, 3, 5, 1974, 1280},    {Family::RTH, 3, 5, 12, 13189, 3072},
    {Family::RTH, 4, 5, 16, 25536, 4096},  {Family::RTH, 5, 5, 20, 41925, 5120},
};

}  // namespace

void ExperimentConfig::validate() const {
  if (families.empty()) throw InvalidArgument("family: at least one family is required");
  for (std::size_t n : sizes) {
    if (n < 2 || 2 * n > kMaxQubits) throw InvalidArgument("n: sizes must lie in [2, 6]");
  }
  if (seeds.empty()) throw InvalidArgument("seed: at least one seed is required");
  if (!(dtau > 0.0)) throw InvalidArgument("dtau: must be positive");
  for (double b : betas) {
    if (!(b >= 0.0)) throw InvalidArgument("beta: values must be non-negative");
    QiteConfig q;
    q.beta = b;
    q.dtau = dtau;
    try {
      (void)q.trotter_steps();
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("beta: ") + e.what());
    }
  }
  if (domain_size < 4 || domain_size % 2 != 0)
    throw InvalidArgument("domain_size: must be even and at least 4 for 2-local terms");
  for (std::size_t n : sizes) {
    if (domain_size > 2 * n) throw InvalidArgument("domain_size: exceeds 2n for n = " + std::to_string(n));
  }
  if (!q_weights.empty()) {
    CostSpec s;
    s.weights = Eigen::Map<const RVector>(q_weights.data(), static_cast<Eigen::Index>(q_weights.size()));
    try {
      s.validate(q_weights.size());
      for (std::size_t n : sizes) s.validate(dim_of(n));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("q: ") + e.what());
    }
    if (k != 0 && k != q_weights.size()) throw InvalidArgument("k: disagrees with the number of q weights");
  }
  if (!(eta > 0.0)) throw InvalidArgument("eta: must be positive");
  if (max_iters == 0) throw InvalidArgument("max_iters: must be positive");
  if (restarts == 0) throw InvalidArgument("restarts: must be positive");
  for (std::size_t d : varqite_depths) {
    if (d == 0) throw InvalidArgument("varqite_depths: depths must be positive");
  }
  if (jobs == 0) throw InvalidArgument("jobs: must be positive");
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "family") {
    cfg.families.clear();
    for (const auto& f : split_list(value)) cfg.families.push_back(family_from_string(f));
  } else if (key == "n") {
    cfg.sizes.clear();
    for (const auto& v : split_list(value)) cfg.sizes.push_back(parse_uint(key, v));
  } else if (key == "seed" || key == "seeds") {
    cfg.seeds.clear();
    for (const auto& v : split_list(value)) cfg.seeds.push_back(parse_uint(key, v));
  } else if (key == "beta") {
    cfg.betas.clear();
    for (const auto& v : split_list(value)) cfg.betas.push_back(parse_double(key, v));
  } else if (key == "dtau") {
    cfg.dtau = parse_double(key, value);
  } else if (key == "domain_size") {
    cfg.domain_size = parse_uint(key, value);
  } else if (key == "k") {
    cfg.k = parse_uint(key, value);
  } else if (key == "q") {
    cfg.q_weights.clear();
    for (const auto& v : split_list(value)) cfg.q_weights.push_back(parse_double(key, v));
  } else if (key == "vqse_depth") {
    cfg.vqse_depth = parse_uint(key, value);
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "max_iters") {
    cfg.max_iters = parse_uint(key, value);
  } else if (key == "restarts") {
    cfg.restarts = parse_uint(key, value);
  } else if (key == "optimizer") {
    cfg.optimizer = optimizer_from_string(value);
  } else if (key == "varqite_depths" || key == "depth") {
    cfg.varqite_depths.clear();
    for (const auto& v : split_list(value)) cfg.varqite_depths.push_back(parse_uint(key, v));
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "jobs") {
    cfg.jobs = parse_uint(key, value);
  } else {
    throw InvalidArgument("unknown config key: " + key);
  }
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig cfg) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::AverageFidelity: return "average_fidelity";
    case Metric::VqseCost: return "vqse_cost";
    case Metric::QiteFidelity: return "qite_fidelity";
    case Metric::ExactEntropy: return "exact_entropy";
    case Metric::QiteEntropy: return "qite_entropy";
    case Metric::EnergyGap: return "energy_gap";
    case Metric::ExactEnergyGap: return "exact_energy_gap";
    case Metric::VarQiteFidelity: return "varqite_fidelity";
    case Metric::RelativeFidelity: return "relative_fidelity";
  }
  return "unknown";
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.family, a.n, a.seed, a.depth, a.beta, a.metric) <
           std::tie(b.family, b.n, b.seed, b.depth, b.beta, b.metric);
  });
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows, std::optional<double> reference) {
  os << "experiment,family,n,seed,depth,beta,metric,value,diagnostic";
  if (reference) os << ",reference";
  os << '\n';
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.experiment << ',' << to_string(r.family) << ',' << r.n << ',' << r.seed << ',' << r.depth << ','
       << format_beta(r.beta) << ',' << to_string(r.metric) << ',' << r.value << ',' << (r.diagnostic ? 1 : 0);
    if (reference) os << ',' << *reference;
    os << '\n';
  }
  os.precision(old);
}

void write_timing_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "experiment,family,n,seed,depth,beta,metric,wall_seconds\n";
  for (const auto& r : rows) {
    os << r.experiment << ',' << to_string(r.family) << ',' << r.n << ',' << r.seed << ',' << r.depth << ','
       << format_beta(r.beta) << ',' << to_string(r.metric) << ',' << r.wall_seconds << '\n';
  }
}

std::vector<double> fig2_betas() { return {0.01, 0.02, 0.05, 0.1, 0.2}; }

std::vector<double> fig3_betas() {
  std::vector<double> b(21);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(i) / 20.0;
  return b;
}

std::vector<ResultRow> run_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> betas = cfg.betas.empty() ? fig2_betas() : cfg.betas;
  struct Job {
    Cell cell;
    double beta;
  };
  std::vector<Job> jobs;
  for (const Cell& c : cells_of(cfg))
    for (double b : betas) jobs.push_back({c, b});

  std::vector<std::vector<ResultRow>> parts(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const Job& job = jobs[i];
    const std::size_t n = job.cell.n;
    const PauliSum h = generate(job.cell.family, n, job.cell.seed);
    QiteConfig q;
    q.beta = job.beta;
    q.dtau = cfg.dtau;
    q.domain_size = cfg.domain_size;
    const DensityMatrix rho = prepare_thermal_state(h, q);

    const CostSpec spec = cost_spec_for(cfg, n);
    TrainOptions opt;
    opt.eta = cfg.eta;
    opt.max_iters = cfg.max_iters;
    opt.restarts = cfg.restarts;
    opt.seed = job.cell.seed;
    opt.optimizer = cfg.optimizer;
    const std::size_t depth = cfg.vqse_depth == 0 ? default_vqse_depth(n) : cfg.vqse_depth;
    const VqseResult trained = train(rho, build_vqse_ansatz(n, depth), spec, opt);
    const Eigensystem sys = extract_eigensystem(h, trained.circuit, spec.k());
    const double f = average_fidelity(sys.eigenstates, diagonalize(h), spec.k());

    const bool flat = job.beta == 0.0;
    const double wall = seconds_since(t0);
    ResultRow base{"fig2", job.cell.family, n, job.cell.seed, 0, job.beta, Metric::AverageFidelity, f, flat, wall};
    parts[i].push_back(base);
    base.metric = Metric::VqseCost;
    base.value = trained.final_cost;
    parts[i].push_back(base);
  });
  return flatten(parts);
}

std::vector<ResultRow> run_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> betas = cfg.betas.empty() ? fig3_betas() : cfg.betas;
  const std::vector<Cell> cells = cells_of(cfg);
  std::vector<std::vector<ResultRow>> parts(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const Cell& c = cells[i];
    const PauliSum h = generate(c.family, c.n, c.seed);
    const Spectrum spectrum = diagonalize(h);
    const double ground = spectrum.eigenvalues[0];
    const auto snaps = qite_snapshots(h, betas, cfg);
    const IndexList sys = system_qubits(c.n);
    const IndexList cut = half_cut(c.n);
    const StateVector phi0 = prepare_phi0(c.n);
    const double wall = seconds_since(t0);

    for (double beta : betas) {
      const StateVector& psi = snaps.at(sweeps_for(beta, cfg.dtau));
      const DensityMatrix rho = partial_trace(psi, sys);
      const DensityMatrix exact = thermal_state_exact(spectrum, beta);
      const StateVector tfd = imaginary_evolve_exact(phi0, spectrum, beta / 2.0);
      auto row = [&](Metric m, double v) {
        parts[i].push_back({"fig3", c.family, c.n, c.seed, 0, beta, m, v, false, wall});
      };
      row(Metric::QiteFidelity, fidelity(rho, exact));
      row(Metric::ExactEntropy, von_neumann_entropy(tfd, cut));
      row(Metric::QiteEntropy, von_neumann_entropy(psi, cut));
      row(Metric::EnergyGap, energy(rho, h) - ground);
      row(Metric::ExactEnergyGap, energy(exact, h) - ground);
    }
  });
  return flatten(parts);
}

std::vector<ResultRow> run_fig4(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> betas = cfg.betas.empty() ? fig3_betas() : cfg.betas;
  const std::vector<Cell> cells = cells_of(cfg);

  // QITE reference fidelities per cell.
  std::vector<std::map<std::size_t, double>> qite(cells.size());
  std::vector<std::vector<ResultRow>> qite_rows(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const Cell& c = cells[i];
    const PauliSum h = generate(c.family, c.n, c.seed);
    const Spectrum spectrum = diagonalize(h);
    const auto snaps = qite_snapshots(h, betas, cfg);
    const IndexList sys = system_qubits(c.n);
    for (const auto& [sweep, psi] : snaps)
      qite[i][sweep] = fidelity(partial_trace(psi, sys), thermal_state_exact(spectrum, 2.0 * sweep * cfg.dtau));
    const double wall = seconds_since(t0);
    for (double beta : betas) {
      qite_rows[i].push_back({"fig4", c.family, c.n, c.seed, 0, beta, Metric::QiteFidelity,
                              qite[i].at(sweeps_for(beta, cfg.dtau)), false, wall});
    }
  });

  struct Job {
    std::size_t cell;
    std::size_t depth;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t d : cfg.varqite_depths) jobs.push_back({i, d});

  std::vector<std::vector<ResultRow>> parts(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t j) {
    const auto t0 = Clock::now();
    const Cell& c = cells[jobs[j].cell];
    const std::size_t d = jobs[j].depth;
    const PauliSum h = generate(c.family, c.n, c.seed);
    const Spectrum spectrum = diagonalize(h);
    const IndexList sys = system_qubits(c.n);

    std::size_t last = 0;
    for (double b : betas) last = std::max(last, sweeps_for(b, cfg.dtau));
    QiteConfig q;
    q.beta = 2.0 * static_cast<double>(last) * cfg.dtau;
    q.dtau = cfg.dtau;
    std::map<std::size_t, double> fv;
    for (double b : betas) fv[sweeps_for(b, cfg.dtau)] = 0.0;
    varqite_evolve(h, build_varqite_ansatz(c.n, d), q, [&](std::size_t step, double tau, const AnsatzCircuit& circ) {
      auto it = fv.find(step);
      if (it == fv.end()) return;
      it->second = fidelity(partial_trace(circ.state(), sys), thermal_state_exact(spectrum, 2.0 * tau));
    });
    const double wall = seconds_since(t0);
    for (double beta : betas) {
      const std::size_t s = sweeps_for(beta, cfg.dtau);
      const double f_v = fv.at(s);
      const double f_d = qite[jobs[j].cell].at(s);
      parts[j].push_back({"fig4", c.family, c.n, c.seed, d, beta, Metric::VarQiteFidelity, f_v, false, wall});
      parts[j].push_back(
          {"fig4", c.family, c.n, c.seed, d, beta, Metric::RelativeFidelity, relative_fidelity(f_v, f_d), false, wall});
    }
  });
  for (auto& r : qite_rows) parts.push_back(std::move(r));
  return flatten(parts);
}

std::vector<Table1Cell> run_table1(std::uint64_t seed) {
  constexpr std::uint64_t domain = 4;
  std::vector<Table1Cell> cells;
  std::string mismatches;
  for (const auto& ref : kTable1) {
    const PauliSum h = generate(ref.family, ref.n, seed);
    Table1Cell c{};
    c.family = ref.family;
    c.n = ref.n;
    c.depth = ref.depth;
    c.term_count = h.size();
    c.parameters = varqite_parameter_count(ref.n, ref.depth);
    c.varqite = varqite_measurement_count(c.parameters, c.term_count);
    c.qite = qite_measurement_count(c.term_count, domain);
    c.expected_varqite = ref.varqite;
    c.expected_qite = ref.qite;
    c.expected_term_count = ref.term_count;
    if (!c.matches()) {
      std::ostringstream os;
      os << ' ' << to_string(c.family) << " n=" << c.n << " (N_m " << c.term_count << '/' << c.expected_term_count
         << ", VarQITE " << c.varqite << '/' << c.expected_varqite << ", QITE " << c.qite << '/'
         << c.expected_qite << ")";
      mismatches += os.str();
    }
    cells.push_back(c);
  }
  if (!mismatches.empty()) throw ContractViolation("measurement counts differ from the reference table:" + mismatches);
  return cells;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Cell>& cells) {
  os << "family,n,d,N_m,N_p,varqite,qite\n";
  for (const auto& c : cells) {
    os << to_string(c.family) << ',' << c.n << ',' << c.depth << ',' << c.term_count << ',' << c.parameters << ','
       << c.varqite << ',' << c.qite << '\n';
  }
}

void print_table1(std::ostream& os, const std::vector<Table1Cell>& cells) {
  constexpr int label = 10;
  constexpr int col = 9;
  for (Family f : {Family::R2L, Family::RTH}) {
    std::vector<const Table1Cell*> row;
    for (const auto& c : cells)
      if (c.family == f) row.push_back(&c);
    if (row.empty()) continue;
    os << std::left << std::setw(label) << to_string(f);
    for (const auto* c : row) os << std::right << std::setw(col) << ("n=" + std::to_string(c->n));
    os << '\n';
    auto line = [&](const char* name, auto field) {
      os << std::left << std::setw(label) << name;
      for (const auto* c : row) os << std::right << std::setw(col) << field(*c);
      os << '\n';
    };
    line("N_m", [](const Table1Cell& c) { return c.term_count; });
    line("d", [](const Table1Cell& c) { return c.depth; });
    line("VarQITE", [](const Table1Cell& c) { return c.varqite; });
    line("QITE", [](const Table1Cell& c) { return c.qite; });
    os << '\n';
  }
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace vqhd
