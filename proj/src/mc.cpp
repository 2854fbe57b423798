#include "whitelasso/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "whitelasso/csv.hpp"

namespace whitelasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

DgpConfig DgpTemplate::config(int n, int p, double rho, std::uint64_t seed) const {
  DgpConfig c;
  c.n = n;
  c.p = p;
  c.s = s < 0 ? default_sparsity(p) : s;
  c.rho = rho;
  c.sigma_u = sigma_u;
  c.init = init;
  c.design_diag = design_diag;
  c.beta_magnitude = beta_magnitude;
  c.seed = seed;
  return c;
}

void Scenario::validate() const {
  if (n_values.empty() || p_values.empty() || rho_values.empty() || estimators.empty())
    throw std::invalid_argument("scenario grids must be nonempty");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  for (int n : n_values)
    if (n < 4) throw std::invalid_argument("every n must be at least 4");
  for (int p : p_values)
    if (p < 2) throw std::invalid_argument("every p must be at least 2");
  for (double r : rho_values)
    if (!(std::abs(r) < 1.0)) throw std::invalid_argument("rho must lie in (-1,1)");
  for (int p : p_values) dgp.config(n_values.front(), p, rho_values.front(), 0).validate();
  tuning.validate();
}

std::uint64_t replication_seed(std::uint64_t base_seed, int n, int p, int rep) {
  Rng mix({base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(rep)});
  return mix.next_u64();
}

std::uint64_t independent_seed(std::uint64_t base_seed, int n, int p, int rho_index, int estimator_index, int rep) {
  // The leading tag keeps these keys apart from replication_seed's.
  Rng mix({0x696e646570ULL, base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p),
           static_cast<std::uint64_t>(rho_index), static_cast<std::uint64_t>(estimator_index),
           static_cast<std::uint64_t>(rep)});
  return mix.next_u64();
}

namespace {

// Seed of the hold-out sample used by oracle tuning.
std::uint64_t holdout_seed(std::uint64_t seed) {
  Rng mix({seed, 0x686f6c646f7574ULL});
  return mix.next_u64();
}

// Hold-out sample with iid errors sharing beta0 with `ds`.
SimulatedDataset make_holdout(const Scenario& scenario, const SimulatedDataset& ds, int n, int p,
                              std::uint64_t seed) {
  DgpConfig cfg = scenario.dgp.config(n, p, 0.0, holdout_seed(seed));
  cfg.init = InitMode::stationary();
  SimulatedDataset h = simulate_dataset(cfg);
  h.beta0 = ds.beta0;
  h.support = ds.support;
  h.y = h.X * h.beta0 + h.epsilon;
  return h;
}

TuningOptions cell_tuning(const Scenario& scenario, const SimulatedDataset& ds, const Cell& cell, std::uint64_t seed) {
  TuningOptions opts = scenario.tuning;
  opts.theory_rho = cell.rho;
  opts.theory_s = std::max<int>(1, static_cast<int>(ds.support.size()));
  if (scenario.oracle_holdout) {
    const SimulatedDataset holdout = make_holdout(scenario, ds, cell.n, cell.p, seed);
    const auto grid = default_grid(holdout.X, holdout.y, opts.grid_length);
    opts.mode = TuningMode::Fixed;
    opts.lambda = oracle_holdout_lambda(ds, holdout, grid, opts.solver);
  }
  return opts;
}

EstimatorKind bind(EstimatorKind::Type type, double rho) {
  switch (type) {
    case EstimatorKind::Type::Lasso: return EstimatorKind::lasso();
    case EstimatorKind::Type::GlsKnownRho: return EstimatorKind::gls(rho);
    case EstimatorKind::Type::Fgls: return EstimatorKind::fgls();
  }
  throw std::logic_error("unknown estimator");
}

void fill(ReplicationRecord& rec, const TunedFit& fit, const SimulatedDataset& ds) {
  rec.ok = true;
  rec.errors = estimation_errors(fit.fit.beta, ds.beta0);
  rec.sign = sign_recovered(fit.fit.beta, ds.beta0);
  rec.lambda = fit.lambda;
  rec.rho_hat = fit.ar ? fit.ar->rho_used : kNaN;
}

// All estimators of one (n, p, rho, rep); the lasso fit doubles as the FGLS
// first stage.
std::vector<ReplicationRecord> run_task(const Scenario& scenario, int n, int p, double rho, int rho_index, int rep) {
  std::vector<ReplicationRecord> out;
  if (!scenario.common_random_numbers) {
    for (std::size_t e = 0; e < scenario.estimators.size(); ++e) {
      const Cell cell{scenario.estimators[e], n, p, rho};
      const auto seed = independent_seed(scenario.base_seed, n, p, rho_index, static_cast<int>(e), rep);
      out.push_back(run_replication(cell, scenario, seed, rep));
    }
    return out;
  }
  for (auto type : scenario.estimators) {
    ReplicationRecord rec;
    rec.cell = Cell{type, n, p, rho};
    rec.rep = rep;
    rec.rho_hat = kNaN;
    out.push_back(rec);
  }
  const std::uint64_t seed = replication_seed(scenario.base_seed, n, p, rep);
  try {
    const SimulatedDataset ds = simulate_dataset(scenario.dgp.config(n, p, rho, seed));
    const TuningOptions opts = cell_tuning(scenario, ds, out.front().cell, seed);
    std::optional<TunedFit> lasso;
    for (auto& rec : out) {
      try {
        const EstimatorKind kind = bind(rec.cell.estimator, rho);
        if (kind.type == EstimatorKind::Type::GlsKnownRho) {
          fill(rec, fit_tuned(ds.X, ds.y, kind, opts), ds);
          continue;
        }
        if (!lasso) lasso = fit_tuned(ds.X, ds.y, EstimatorKind::lasso(), opts);
        if (kind.type == EstimatorKind::Type::Lasso)
          fill(rec, *lasso, ds);
        else
          fill(rec, fit_tuned(ds.X, ds.y, kind, opts, &*lasso), ds);
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    for (auto& rec : out) {
      rec.ok = false;
      rec.error = e.what();
    }
  }
  return out;
}

}  // namespace

ReplicationRecord run_replication(const Cell& cell, const Scenario& scenario, std::uint64_t seed, int rep) {
  ReplicationRecord rec;
  rec.cell = cell;
  rec.rep = rep;
  rec.rho_hat = kNaN;
  try {
    const SimulatedDataset ds = simulate_dataset(scenario.dgp.config(cell.n, cell.p, cell.rho, seed));
    const TuningOptions opts = cell_tuning(scenario, ds, cell, seed);
    fill(rec, fit_tuned(ds.X, ds.y, bind(cell.estimator, cell.rho), opts), ds);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

CellSummary summarize_cell(const Cell& cell, const std::vector<ReplicationRecord>& records) {
  CellSummary s;
  s.cell = cell;
  std::vector<double> l2;
  double l1 = 0.0, linf = 0.0, sign = 0.0, rho_hat = 0.0, rho_err = 0.0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    l1 += r.errors.l1;
    linf += r.errors.linf;
    l2.push_back(r.errors.l2_scaled);
    sign += r.sign ? 1.0 : 0.0;
    rho_hat += r.rho_hat;
    rho_err += std::abs(r.rho_hat - cell.rho);
  }
  s.reps = static_cast<int>(l2.size());
  if (s.reps == 0) {
    s.mean_l1 = s.mean_l2_scaled = s.mean_linf = s.ci_lo_l2 = s.ci_hi_l2 = s.sign_rate = kNaN;
    s.mean_rho_hat = s.mean_abs_rho_err = kNaN;
    return s;
  }
  const double m = s.reps;
  double l2_sum = 0.0;
  for (double v : l2) l2_sum += v;
  s.mean_l1 = l1 / m;
  s.mean_l2_scaled = l2_sum / m;
  s.mean_linf = linf / m;
  s.ci_lo_l2 = percentile(l2, 0.025);
  s.ci_hi_l2 = percentile(l2, 0.975);
  s.sign_rate = sign / m;
  const bool fgls = cell.estimator == EstimatorKind::Type::Fgls;
  s.mean_rho_hat = fgls ? rho_hat / m : kNaN;
  s.mean_abs_rho_err = fgls ? rho_err / m : kNaN;
  return s;
}

ScenarioResult run_scenario(const Scenario& scenario, const ProgressFn& progress) {
  scenario.validate();
  const auto& ns = scenario.n_values;
  const auto& ps = scenario.p_values;
  const auto& rhos = scenario.rho_values;
  const int reps = scenario.replications;
  const std::size_t n_est = scenario.estimators.size();

  // Task k covers (p, rho, n, rep) in row-major order.
  const std::size_t n_cells = ps.size() * rhos.size() * ns.size();
  const std::size_t n_tasks = n_cells * static_cast<std::size_t>(reps);
  std::vector<std::vector<ReplicationRecord>> task_records(n_tasks);
  std::vector<std::atomic<int>> cell_left(n_cells);
  for (auto& c : cell_left) c.store(reps);
  std::atomic<std::size_t> next{0};
  std::atomic<int> cells_done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < n_tasks; k = next.fetch_add(1)) {
      const std::size_t cell = k / static_cast<std::size_t>(reps);
      const int rep = static_cast<int>(k % static_cast<std::size_t>(reps));
      const std::size_t ni = cell % ns.size();
      const std::size_t ri = (cell / ns.size()) % rhos.size();
      const std::size_t pi = cell / (ns.size() * rhos.size());
      task_records[k] = run_task(scenario, ns[ni], ps[pi], rhos[ri], static_cast<int>(ri), rep);
      if (cell_left[cell].fetch_sub(1) == 1 && progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(++cells_done, static_cast<int>(n_cells));
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(scenario.threads), n_tasks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ScenarioResult result;
  result.records.reserve(n_tasks * n_est);
  std::vector<ReplicationRecord> cell_records;
  for (std::size_t e = 0; e < n_est; ++e) {
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
          const std::size_t cell = (pi * rhos.size() + ri) * ns.size() + ni;
          cell_records.clear();
          for (int rep = 0; rep < reps; ++rep)
            cell_records.push_back(task_records[cell * static_cast<std::size_t>(reps) + rep][e]);
          result.rows.push_back(
              summarize_cell(Cell{scenario.estimators[e], ns[ni], ps[pi], rhos[ri]}, cell_records));
          result.records.insert(result.records.end(), cell_records.begin(), cell_records.end());
        }
      }
    }
  }
  return result;
}

void write_results_csv(std::ostream& out, const std::vector<CellSummary>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << estimator_name(r.cell.estimator) << ',' << r.cell.n << ',' << r.cell.p << ',' << format_double(r.cell.rho)
        << ',' << format_double(r.mean_l1) << ',' << format_double(r.mean_l2_scaled) << ','
        << format_double(r.mean_linf) << ',' << format_double(r.ci_lo_l2) << ',' << format_double(r.ci_hi_l2) << ','
        << format_double(r.sign_rate) << ',' << format_double(r.mean_rho_hat) << ','
        << format_double(r.mean_abs_rho_err) << ',' << r.reps << '\n';
  }
}

void write_reps_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
  out << kRepsHeader << '\n';
  for (const auto& r : records) {
    if (!r.ok) continue;
    out << estimator_name(r.cell.estimator) << ',' << r.cell.n << ',' << r.cell.p << ',' << format_double(r.cell.rho)
        << ',' << r.rep << ',' << format_double(r.errors.l1) << ',' << format_double(r.errors.l2_scaled) << ','
        << format_double(r.errors.linf) << ',' << (r.sign ? 1 : 0) << ',' << format_double(r.rho_hat) << '\n';
  }
}

}  // namespace whitelasso
