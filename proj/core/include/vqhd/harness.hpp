#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vqhd/pauli.hpp"
#include "vqhd/vqse.hpp"

namespace vqhd {

/// Settings shared by every experiment driver. Empty lists mean "use the
/// experiment's default".
struct ExperimentConfig {
  std::vector<Family> families{Family::R2L, Family::RTH};
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> betas;
  double dtau = 0.005;
  std::size_t domain_size = 4;
  std::size_t k = 0;  // 0: 2^n for n <= 4, 8 above
  std::vector<double> q_weights;
  std::size_t vqse_depth = 0;  // 0: default_vqse_depth(n)
  double eta = 0.1;
  std::size_t max_iters = 5000;
  std::size_t restarts = 5;
  Optimizer optimizer = Optimizer::GradientDescent;
  std::vector<std::size_t> varqite_depths{1, 2, 3, 4, 5};
  std::filesystem::path out_dir = "results";
  std::size_t jobs = 1;

  /// Throws InvalidArgument naming the first offending key.
  void validate() const;
};

/// Applies one `key=value` setting. Unknown keys throw InvalidArgument.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Plain-text `key=value` lines; `#` starts a comment.
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

enum class Metric {
  AverageFidelity,
  VqseCost,
  QiteFidelity,
  ExactEntropy,
  QiteEntropy,
  EnergyGap,
  ExactEnergyGap,
  VarQiteFidelity,
  RelativeFidelity,
};

std::string to_string(Metric m);

struct ResultRow {
  std::string experiment;
  Family family = Family::R2L;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t depth = 0;  // VarQITE depth, 0 where not applicable
  double beta = 0.0;
  Metric metric = Metric::QiteFidelity;
  double value = 0.0;
  bool diagnostic = false;  // value carries no information (flat landscape)
  double wall_seconds = 0.0;
};

/// Orders rows by (family, n, seed, depth, beta, metric).
void sort_rows(std::vector<ResultRow>& rows);

/// experiment,family,n,seed,depth,beta,metric,value,diagnostic[,reference]
/// Wall time is excluded so the file is reproducible bit for bit.
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows,
                       std::optional<double> reference = std::nullopt);

/// experiment,family,n,seed,depth,beta,metric,wall_seconds
void write_timing_csv(std::ostream& os, const std::vector<ResultRow>& rows);

std::vector<double> fig2_betas();
std::vector<double> fig3_betas();

/// Reference level drawn with relative-fidelity curves.
inline constexpr double kRelativeFidelityReference = -0.02;

/// Thermal state by QITE, VQSE training and average fidelity over the lowest
/// K levels, for every (family, n, seed, beta).
std::vector<ResultRow> run_fig2(const ExperimentConfig& cfg);

/// One QITE trajectory per (family, n, seed) sampled on the beta grid:
/// fidelity, half-cut entropies and energies above the ground state.
std::vector<ResultRow> run_fig3(const ExperimentConfig& cfg);

/// QITE against VarQITE at every depth in cfg.varqite_depths.
std::vector<ResultRow> run_fig4(const ExperimentConfig& cfg);

struct Table1Cell {
  Family family;
  std::size_t n;
  std::size_t depth;
  std::uint64_t term_count;
  std::uint64_t parameters;
  std::uint64_t varqite;
  std::uint64_t qite;
  std::uint64_t expected_varqite;
  std::uint64_t expected_qite;
  std::uint64_t expected_term_count;

  bool matches() const {
    return varqite == expected_varqite && qite == expected_qite && term_count == expected_term_count;
  }
};

/// Measurement counts for both families at n = 2..5 with D = 4. Throws
/// ContractViolation listing every cell that differs from the reference table.
std::vector<Table1Cell> run_table1(std::uint64_t seed = 1);

/// CSV: family,n,d,N_m,N_p,varqite,qite
void write_table1_csv(std::ostream& os, const std::vector<Table1Cell>& cells);
/// Aligned text table, one column per (family, n).
void print_table1(std::ostream& os, const std::vector<Table1Cell>& cells);

/// Runs `count` independent jobs on up to `workers` threads. Job i writes only
/// its own slot, so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job);

}  // namespace vqhd
