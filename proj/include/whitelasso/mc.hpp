#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "whitelasso/datagen.hpp"
#include "whitelasso/diagnostics.hpp"
#include "whitelasso/solver.hpp"
#include "whitelasso/tuning.hpp"

namespace whitelasso {

// Per-cell data-generating settings; n, p, rho and the seed come from the grid.
struct DgpTemplate {
  int s = -1;  // -1: floor(p / 10)
  double sigma_u = 1.0;
  InitMode init;
  std::vector<double> design_diag;  // empty: identity; otherwise must match every p
  double beta_magnitude = 1.0;

  DgpConfig config(int n, int p, double rho, std::uint64_t seed) const;
};

struct Scenario {
  std::vector<int> n_values;
  std::vector<int> p_values;
  std::vector<double> rho_values;
  std::vector<EstimatorKind::Type> estimators;  // GLS uses the cell's rho
  int replications = 200;
  std::uint64_t base_seed = 1;
  DgpTemplate dgp;
  TuningOptions tuning;
  // Lambda chosen per replication as the grid value whose lasso fit on an
  // independent iid-error hold-out sample (same n, p, beta0) is closest to
  // beta0; the same lambda then serves every rho and estimator.
  bool oracle_holdout = false;
  // true: one dataset per (n, p, rho, rep) shared by every estimator, and the
  // design, beta0 and innovations also shared across rho. false: every
  // (estimator, rho) cell draws from its own stream (independent_seed).
  bool common_random_numbers = true;
  int threads = 1;

  void validate() const;
};

struct Cell {
  EstimatorKind::Type estimator = EstimatorKind::Type::Lasso;
  int n = 0;
  int p = 0;
  double rho = 0.0;
};

struct ReplicationRecord {
  Cell cell;
  int rep = 0;
  bool ok = false;
  std::string error;
  ErrorReport errors;
  bool sign = false;
  double lambda = 0.0;
  double rho_hat = 0.0;  // NaN unless FGLS
};

struct CellSummary {
  Cell cell;
  double mean_l1 = 0.0;
  double mean_l2_scaled = 0.0;
  double mean_linf = 0.0;
  double ci_lo_l2 = 0.0;  // 2.5% empirical percentile of l2_scaled
  double ci_hi_l2 = 0.0;  // 97.5%
  double sign_rate = 0.0;
  double mean_rho_hat = 0.0;      // FGLS only, NaN otherwise
  double mean_abs_rho_err = 0.0;  // FGLS only, NaN otherwise
  int reps = 0;                   // completed replications
};

struct ScenarioResult {
  std::vector<CellSummary> rows;  // estimator, p, rho, n order
  std::vector<ReplicationRecord> records;  // same order, rep innermost
};

// Dataset seed of one replication; shared by every estimator and rho so the
// estimators are compared on common random numbers.
std::uint64_t replication_seed(std::uint64_t base_seed, int n, int p, int rep);
// Seed of one replication when every cell has its own stream.
std::uint64_t independent_seed(std::uint64_t base_seed, int n, int p, int rho_index, int estimator_index, int rep);

ReplicationRecord run_replication(const Cell& cell, const Scenario& scenario, std::uint64_t seed, int rep = 0);

// Progress callback: (cells completed, total cells), where a cell is one
// (n, p, rho) combination across all estimators.
using ProgressFn = std::function<void(int, int)>;

// Output is identical for every thread count.
ScenarioResult run_scenario(const Scenario& scenario, const ProgressFn& progress = {});

// Aggregates records of one cell; failed records are skipped.
CellSummary summarize_cell(const Cell& cell, const std::vector<ReplicationRecord>& records);

// Linear interpolation between order statistics at rank q (m - 1).
double percentile(std::vector<double> values, double q);

inline constexpr const char* kResultsHeader =
    "estimator,n,p,rho,mean_l1,mean_l2_scaled,mean_linf,ci_lo_l2,ci_hi_l2,sign_rate,mean_rho_hat,"
    "mean_abs_rho_err,reps";
inline constexpr const char* kRepsHeader = "estimator,n,p,rho,rep,l1,l2_scaled,linf,sign,rho_hat";

void write_results_csv(std::ostream& out, const std::vector<CellSummary>& rows);
// Failed replications are omitted.
void write_reps_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);

}  // namespace whitelasso
