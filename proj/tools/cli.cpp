#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "plot.hpp"
#include "whitelasso/csv.hpp"
#include "whitelasso/datagen.hpp"
#include "whitelasso/diagnostics.hpp"
#include "whitelasso/errors.hpp"
#include "whitelasso/mc.hpp"
#include "whitelasso/solver.hpp"
#include "whitelasso/tuning.hpp"
#include "whitelasso/whiten.hpp"

namespace whitelasso::cli {

namespace {

namespace fs = std::filesystem;

// Bad arguments detected after parsing; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An output sink opened before any computation, so that unwritable paths fail
// fast. Empty path or "-" means `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw UsageError("cannot open " + path + " for writing");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::string& what) {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("failed writing " + what);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

InitMode parse_init(const std::string& kind, double variance) {
  if (kind == "stationary") return InitMode::stationary();
  if (kind == "fixed") return InitMode::fixed_variance(variance);
  throw UsageError("init must be 'stationary' or 'fixed'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// Tuning flags shared by fit and mc-run.
struct TuningFlags {
  bool cv = false;
  bool theory = false;
  std::optional<double> lambda;
  int grid_len = 50;
  double tau = 2.0;
  double c = 1.0;
  double K = 1.0;
  double C = 1.0;
  double tol = 1e-7;
  int max_sweeps = 10000;
  bool standardize = false;

  void add(CLI::App& app) {
    auto* o_cv = app.add_flag("--cv", cv, "tune lambda by two-fold temporal cross-validation (default)");
    auto* o_th = app.add_flag("--lambda-theory", theory, "use the theoretical lambda");
    auto* o_l = app.add_option("--lambda", lambda, "fixed lambda for every stage");
    o_cv->excludes(o_th)->excludes(o_l);
    o_th->excludes(o_l);
    app.add_option("--grid-len", grid_len, "cross-validation grid length")->capture_default_str();
    app.add_option("--tau", tau, "probability exponent of the theoretical lambda")->capture_default_str();
    app.add_option("--theory-c", c, "absolute constant c")->capture_default_str();
    app.add_option("--theory-k", K, "sub-Gaussian constant K")->capture_default_str();
    app.add_option("--theory-cap-c", C, "constant C of the AR estimation rate")->capture_default_str();
    app.add_option("--tol", tol, "coordinate-descent tolerance")->capture_default_str();
    app.add_option("--max-sweeps", max_sweeps, "coordinate-descent pass budget")->capture_default_str();
    app.add_flag("--standardize", standardize, "rescale columns to unit mean square before fitting");
  }

  TuningOptions options() const {
    TuningOptions o;
    o.mode = lambda ? TuningMode::Fixed : theory ? TuningMode::Theory : TuningMode::CrossValidation;
    o.lambda = lambda.value_or(0.0);
    o.grid_length = grid_len;
    o.theory.tau = tau;
    o.theory.c = c;
    o.theory.K = K;
    o.theory.C_prop3 = C;
    o.solver.tol = tol;
    o.solver.max_sweeps = max_sweeps;
    o.solver.standardize = standardize;
    o.solver.validate();
    o.validate();
    return o;
  }
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

// Column "y" is the response; every other column is a predictor, in order.
Dataset read_dataset(const std::string& path) {
  const CsvTable t = read_csv_file(path);
  const int yc = t.column("y");
  if (yc < 0) throw UsageError(path + ": no 'y' column");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto p = static_cast<Eigen::Index>(t.header.size()) - 1;
  if (n < 2 || p < 1) throw UsageError(path + ": need at least two rows and one predictor column");
  Dataset d{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const double v = parse_double(t.rows[static_cast<std::size_t>(i)][c]);
      if (static_cast<int>(c) == yc)
        d.y(i) = v;
      else
        d.X(i, j++) = v;
    }
  }
  return d;
}

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
  int n = 100, p = 128, s = -1;
  double rho = 0.0, sigma_u = 1.0, init_var = 1.0, beta_mag = 1.0;
  std::string init = "stationary", output, meta;
  std::uint64_t seed = 0;

  void setup(CLI::App& app) {
    app.add_option("--n", n, "sample size")->capture_default_str();
    app.add_option("--p", p, "number of predictors")->capture_default_str();
    app.add_option("--s", s, "nonzero coefficients (default floor(p/10))");
    app.add_option("--rho", rho, "AR(1) coefficient in (-1,1)")->capture_default_str();
    app.add_option("--sigma-u", sigma_u, "innovation standard deviation")->capture_default_str();
    app.add_option("--init", init, "first error: stationary or fixed")->capture_default_str();
    app.add_option("--init-var", init_var, "Var of the first error when --init fixed")->capture_default_str();
    app.add_option("--beta-mag", beta_mag, "magnitude of the nonzero coefficients")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("-o,--output", output, "dataset CSV (y,x1..xp)")->required();
    app.add_option("--meta", meta, "metadata JSON (default <output>.meta.json)");
  }

  int run(std::ostream&, std::ostream&) {
    DgpConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.s = s < 0 ? default_sparsity(p) : s;
    cfg.rho = rho;
    cfg.sigma_u = sigma_u;
    cfg.init = parse_init(init, init_var);
    cfg.beta_magnitude = beta_mag;
    cfg.seed = seed;
    cfg.validate();
    if (output == "-") throw UsageError("simulate writes two files; --output must be a path");
    Sink data(output, std::cout);
    Sink meta_sink(meta.empty() ? output + ".meta.json" : meta, std::cout);

    const SimulatedDataset ds = simulate_dataset(cfg);
    auto& out = data.get();
    out << "y";
    for (int j = 1; j <= p; ++j) out << ",x" << j;
    out << '\n';
    for (int i = 0; i < n; ++i) {
      out << format_double(ds.y(i));
      for (int j = 0; j < p; ++j) out << ',' << format_double(ds.X(i, j));
      out << '\n';
    }
    data.finish(output);

    nlohmann::ordered_json j;
    j["n"] = n;
    j["p"] = p;
    j["s"] = cfg.s;
    j["rho"] = rho;
    j["sigma_u"] = sigma_u;
    j["init"] = init;
    j["init_variance"] = cfg.init.first_variance(rho, sigma_u);
    j["beta_magnitude"] = beta_mag;
    j["seed"] = seed;
    std::vector<int> support;
    for (int k : ds.support) support.push_back(k + 1);
    j["support"] = support;  // 1-based, matching x1..xp
    j["beta0"] = std::vector<double>(ds.beta0.data(), ds.beta0.data() + p);
    meta_sink.get() << j.dump(2) << '\n';
    meta_sink.finish("metadata");
    return kOk;
  }
};

// ---- fit ------------------------------------------------------------------

struct FitCmd {
  std::string data, estimator = "lasso", output;
  std::optional<double> rho;
  double theory_rho = 0.0;
  int s = -1;
  TuningFlags tuning;

  void setup(CLI::App& app) {
    app.add_option("data", data, "dataset CSV with a 'y' column")->required()->check(CLI::ExistingFile);
    app.add_option("--estimator", estimator, "lasso, gls or fgls")->capture_default_str();
    app.add_option("--rho", rho, "known AR(1) coefficient (gls only)");
    app.add_option("--theory-rho", theory_rho, "rho in the lasso theoretical lambda")->capture_default_str();
    app.add_option("--s", s, "sparsity in the FGLS theoretical lambda (default floor(p/10))");
    app.add_option("-o,--output", output, "coefficient CSV (default stdout)");
    tuning.add(app);
  }

  int run(std::ostream& out, std::ostream& err) {
    const auto type = parse_estimator(estimator);
    EstimatorKind kind;
    switch (type) {
      case EstimatorKind::Type::Lasso: kind = EstimatorKind::lasso(); break;
      case EstimatorKind::Type::Fgls: kind = EstimatorKind::fgls(); break;
      case EstimatorKind::Type::GlsKnownRho:
        if (!rho) throw UsageError("--estimator gls needs --rho");
        kind = EstimatorKind::gls(*rho);
        build_whitener(*rho);
        break;
    }
    if (rho && type != EstimatorKind::Type::GlsKnownRho) throw UsageError("--rho applies only to --estimator gls");
    TuningOptions opts = tuning.options();
    Sink sink(output, out);
    const Dataset d = read_dataset(data);
    opts.theory_rho = theory_rho;
    opts.theory_s = std::max(1, s < 0 ? default_sparsity(static_cast<int>(d.X.cols())) : s);
    const TunedFit fit = fit_tuned(d.X, d.y, kind, opts);

    auto& o = sink.get();
    o << "index,beta\n";
    for (Eigen::Index j = 0; j < fit.fit.beta.size(); ++j) o << j + 1 << ',' << format_double(fit.fit.beta(j)) << '\n';
    sink.finish("coefficients");

    err << "estimator " << estimator << "\n";
    err << "lambda " << format_double(fit.lambda) << "\n";
    if (fit.ar) {
      err << "stage1_lambda " << format_double(fit.stage1_lambda) << "\n";
      err << "rho_hat " << format_double(fit.ar->rho_used) << (fit.ar->clamped ? " (clamped)" : "")
          << (fit.ar->degenerate ? " (degenerate residuals, no whitening)" : "") << "\n";
    }
    err << "nonzero " << (fit.fit.beta.array() != 0.0).count() << "\n";
    err << "objective " << format_double(fit.fit.objective) << "\n";
    err << "passes " << fit.fit.sweeps << "\n";
    err << "converged " << bool_text(fit.fit.converged) << "\n";
    return kOk;
  }
};

// ---- estimate-ar ----------------------------------------------------------

struct EstimateArCmd {
  std::string input, column;

  void setup(CLI::App& app) {
    app.add_option("residuals", input, "CSV holding the residual series")->required()->check(CLI::ExistingFile);
    app.add_option("--column", column, "column to use (default: the first)");
  }

  int run(std::ostream& out, std::ostream&) {
    const CsvTable t = read_csv_file(input);
    const std::string name = column.empty() ? t.header.at(0) : column;
    if (t.column(name) < 0) throw UsageError(input + ": no column '" + name + "'");
    const auto v = t.numeric(name);
    const ArFitResult r = estimate_ar1(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    out << "rho_raw,rho_used,clamped,n_terms\n";
    out << format_double(r.rho_raw) << ',' << format_double(r.rho_used) << ',' << bool_text(r.clamped) << ','
        << r.n_terms << '\n';
    return kOk;
  }
};

// ---- bounds ---------------------------------------------------------------

struct BoundsCmd {
  std::vector<std::string> which = {"prop1", "thm1", "prop3", "cor3"};
  std::vector<double> n = {100, 200, 300, 400, 500};
  std::vector<double> rho = {0.0, 0.5, 0.9, 0.99};
  double p = 128;
  int s = -1;
  std::optional<double> kappa, lambda;
  double eta_min = 1.0, sigma_max = 1.0, alpha = 3.0, tail = 0.0;
  double tau = 2.0, c = 1.0, K = 1.0, C = 1.0;

  void setup(CLI::App& app) {
    app.add_option("--bound", which, "prop1, thm1, prop3, cor3")->delimiter(',');
    app.add_option("--n", n, "sample sizes")->delimiter(',');
    app.add_option("--rho", rho, "AR(1) coefficients")->delimiter(',');
    app.add_option("--p", p, "number of predictors")->capture_default_str();
    app.add_option("--s", s, "sparsity (default floor(p/10))");
    app.add_option("--kappa", kappa, "curvature constant (default: computed from eta-min, sigma-max, alpha)");
    app.add_option("--lambda", lambda, "lambda of the oracle bound (default: theoretical, rho = 0)");
    app.add_option("--eta-min", eta_min, "smallest singular value of Sigma^(1/2)")->capture_default_str();
    app.add_option("--sigma-max", sigma_max, "largest singular value of Sigma^(1/2)")->capture_default_str();
    app.add_option("--alpha", alpha, "cone parameter")->capture_default_str();
    app.add_option("--tail", tail, "l1 mass of beta0 off the chosen support")->capture_default_str();
    app.add_option("--tau", tau, "probability exponent")->capture_default_str();
    app.add_option("--theory-c", c, "absolute constant c")->capture_default_str();
    app.add_option("--theory-k", K, "sub-Gaussian constant K")->capture_default_str();
    app.add_option("--theory-cap-c", C, "constant C of the AR estimation rate")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) {
    for (const auto& w : which)
      if (w != "prop1" && w != "thm1" && w != "prop3" && w != "cor3") throw UsageError("unknown bound '" + w + "'");
    TheoryConstants k{K, c, tau, C};
    k.validate();
    const int sp = s < 0 ? std::max(1, default_sparsity(static_cast<int>(p))) : s;
    std::ostringstream buf;
    buf << "bound,n,p,s,rho,value,vacuous\n";
    for (const auto& w : which)
      for (double r : rho)
        for (double nv : n) {
          BoundReport b;
          if (w == "prop1") {
            b = bound_prop1(k, kappa.value_or(kappa_lasso(eta_min, sigma_max, nv, p, alpha, sp)), nv, p, sp, r);
          } else if (w == "thm1") {
            const double lam = lambda.value_or(lambda_lasso_theoretical(k, nv, p, 0.0));
            const double kap = kappa.value_or(kappa_gls(eta_min, r, static_cast<int>(nv)));
            b = bound_thm1(lam, kap, sp, tail, sigma_max, nv, p);
          } else if (w == "prop3") {
            b = bound_prop3(k, nv, p, sp);
          } else {
            b = bound_cor3(k, eta_min, nv, p, sp, r);
          }
          buf << bound_name(b.name) << ',' << format_double(nv) << ',' << format_double(p) << ',' << sp << ','
              << format_double(r) << ',' << format_double(b.value) << ',' << bool_text(b.vacuous) << '\n';
        }
    out << buf.str();
    return kOk;
  }
};

// ---- frobenius ------------------------------------------------------------

struct FrobeniusCmd {
  int n = 500;
  std::vector<double> rho = {0.9};
  std::vector<std::string> init = {"stationary", "1"};
  double sigma_u = 1.0;

  void setup(CLI::App& app) {
    app.add_option("--n", n, "series length")->capture_default_str();
    app.add_option("--rho", rho, "AR(1) coefficients")->delimiter(',');
    app.add_option("--init", init, "'stationary' or a variance of the first error")->delimiter(',');
    app.add_option("--sigma-u", sigma_u, "innovation standard deviation")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) {
    std::vector<std::pair<std::string, InitMode>> modes;
    for (const auto& text : init) {
      if (text == "stationary") {
        modes.emplace_back(text, InitMode::stationary());
        continue;
      }
      double v = 0.0;
      try {
        v = parse_double(text);
      } catch (const std::invalid_argument&) {
        throw UsageError("--init entries must be 'stationary' or a positive number");
      }
      if (!(v > 0.0)) throw UsageError("--init variances must be positive");
      modes.emplace_back(format_double(v), InitMode::fixed_variance(v));
    }
    std::ostringstream buf;
    buf << "rho,init,t,F\n";
    for (double r : rho)
      for (const auto& [label, mode] : modes) {
        const auto f = psi_frobenius_growth(n, r, sigma_u, mode);
        for (int t = 1; t <= n; ++t)
          buf << format_double(r) << ',' << label << ',' << t << ',' << format_double(f[static_cast<std::size_t>(t - 1)])
              << '\n';
      }
    out << buf.str();
    return kOk;
  }
};

// ---- mc-run ---------------------------------------------------------------

struct McRunCmd {
  std::vector<int> n = {100, 200, 300, 400, 500};
  std::vector<int> p = {128};
  std::vector<double> rho = {0.0, 0.5, 0.9, 0.99};
  std::vector<std::string> estimators = {"lasso", "gls", "fgls"};
  int reps = 200;
  std::uint64_t seed = 1;
  int s = -1;
  double sigma_u = 1.0, init_var = 1.0, beta_mag = 1.0;
  std::string init = "stationary";
  std::vector<double> design_diag;
  TuningFlags tuning;
  bool oracle_holdout = false, independent_streams = false, quiet = false;
  int threads = 1;
  std::string output, dump_reps;

  void setup(CLI::App& app) {
    app.set_config("--config", "", "TOML/INI run configuration; flags override its values");
    app.allow_config_extras(false);
    app.add_option("--n", n, "sample sizes")->delimiter(',');
    app.add_option("--p", p, "predictor counts")->delimiter(',');
    app.add_option("--rho", rho, "AR(1) coefficients")->delimiter(',');
    app.add_option("--estimators", estimators, "subset of lasso,gls,fgls")->delimiter(',');
    app.add_option("--reps", reps, "replications per cell")->capture_default_str();
    app.add_option("--seed", seed, "base seed")->capture_default_str();
    app.add_option("--s", s, "nonzero coefficients (default floor(p/10))");
    app.add_option("--sigma-u", sigma_u, "innovation standard deviation")->capture_default_str();
    app.add_option("--init", init, "first error: stationary or fixed")->capture_default_str();
    app.add_option("--init-var", init_var, "Var of the first error when --init fixed")->capture_default_str();
    app.add_option("--beta-mag", beta_mag, "magnitude of the nonzero coefficients")->capture_default_str();
    app.add_option("--design-diag", design_diag, "diagonal of the design covariance (p entries)")->delimiter(',');
    tuning.add(app);
    app.add_flag("--oracle-holdout", oracle_holdout, "pick lambda on an iid hold-out sample (shared by all cells)");
    app.add_flag("--independent-streams", independent_streams,
                 "give every (estimator, rho) cell its own random stream");
    app.add_option("--threads", threads, "worker threads")->envname("WHITELASSO_THREADS")->capture_default_str();
    app.add_option("-o,--output", output, "results CSV")->required();
    app.add_option("--dump-reps", dump_reps, "per-replication CSV");
    app.add_flag("--quiet", quiet, "no progress lines");
  }

  int run(std::ostream& out, std::ostream& err) {
    Scenario sc;
    sc.n_values = n;
    sc.p_values = p;
    sc.rho_values = rho;
    for (const auto& e : estimators) sc.estimators.push_back(parse_estimator(e));
    sc.replications = reps;
    sc.base_seed = seed;
    sc.dgp.s = s;
    sc.dgp.sigma_u = sigma_u;
    sc.dgp.init = parse_init(init, init_var);
    sc.dgp.design_diag = design_diag;
    sc.dgp.beta_magnitude = beta_mag;
    sc.tuning = tuning.options();
    sc.oracle_holdout = oracle_holdout;
    sc.common_random_numbers = !independent_streams;
    sc.threads = threads;
    sc.validate();
    if (!dump_reps.empty() && dump_reps != "-" && fs::weakly_canonical(dump_reps) == fs::weakly_canonical(output))
      throw UsageError("--dump-reps and --output name the same file");
    Sink results(output, out);
    std::optional<Sink> reps_sink;
    if (!dump_reps.empty()) reps_sink.emplace(dump_reps, out);

    const auto res = run_scenario(sc, [&](int done, int total) {
      if (!quiet) err << "mc-run: cell " << done << "/" << total << " done\n" << std::flush;
    });
    int failed = 0;
    for (const auto& r : res.records) failed += r.ok ? 0 : 1;
    if (failed > 0) err << "mc-run: " << failed << " replication(s) failed and were excluded\n";
    write_results_csv(results.get(), res.rows);
    results.finish(output);
    if (reps_sink) {
      write_reps_csv(reps_sink->get(), res.records);
      reps_sink->finish(dump_reps);
    }
    return kOk;
  }
};

// ---- plot -----------------------------------------------------------------

struct PlotCmd {
  std::string input, out_dir = ".", prefix;
  std::string metric = "mean_l2_scaled";
  std::optional<bool> bands;

  void setup(CLI::App& app) {
    app.add_option("results", input, "results CSV from mc-run")->required()->check(CLI::ExistingFile);
    app.add_option("--metric", metric, "mean_l2_scaled, mean_linf or sign_rate")->capture_default_str();
    app.add_flag("--bands,!--no-bands", bands, "dashed confidence bands (default on for mean_l2_scaled)");
    app.add_option("--out-dir", out_dir, "directory for the SVG files")->capture_default_str();
    app.add_option("--prefix", prefix, "file name prefix");
  }

  int run(std::ostream& out, std::ostream& err) {
    if (metric != "mean_l2_scaled" && metric != "mean_linf" && metric != "sign_rate")
      throw UsageError("--metric must be mean_l2_scaled, mean_linf or sign_rate");
    ChartSpec spec;
    spec.metric = metric;
    spec.bands = bands.value_or(metric == "mean_l2_scaled");
    if (spec.bands && metric != "mean_l2_scaled")
      throw UsageError("confidence bands exist only for mean_l2_scaled");
    const CsvTable table = read_csv_file(input);
    const auto missing = missing_columns(table, spec);
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw UsageError(input + " is missing column(s): " + list);
    }
    if (!fs::is_directory(out_dir)) throw UsageError("output directory " + out_dir + " does not exist");
    const auto figures = render_charts(table, spec);
    for (const auto& f : figures) {
      const std::string path = (fs::path(out_dir) / (prefix + f.name + ".svg")).string();
      Sink sink(path, out);
      sink.get() << f.svg;
      sink.finish(path);
      out << path << '\n';
    }
    if (figures.empty()) err << "plot: no rows in " << input << "\n";
    return kOk;
  }
};

struct Command;
using Runner = int (*)(const Command&, const std::vector<std::string>&, std::ostream&, std::ostream&);

struct Command {
  const char* name;
  const char* help;
  Runner run;
};

template <class Cmd>
int dispatch(const Command& c, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app(c.help, std::string("whitelasso ") + c.name);
  Cmd cmd;
  cmd.setup(app);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ConfigError& e) {
    err << "whitelasso " << c.name << ": configuration file: " << e.what()
        << " (unknown key or malformed value)\n";
    return kValidationError;
  } catch (const CLI::ParseError& e) {
    err << "whitelasso " << c.name << ": " << e.what() << "\n";
    return kValidationError;
  }
  return cmd.run(out, err);
}

const Command kCommands[] = {
    {"simulate", "Simulate a dataset with AR(1) errors", &dispatch<SimulateCmd>},
    {"fit", "Fit lasso, GLS lasso or FGLS lasso to a dataset", &dispatch<FitCmd>},
    {"estimate-ar", "Least-squares AR(1) coefficient of a residual series", &dispatch<EstimateArCmd>},
    {"bounds", "Tabulate the error bounds over n and rho", &dispatch<BoundsCmd>},
    {"frobenius", "Growth of the squared Frobenius norm of the error factor", &dispatch<FrobeniusCmd>},
    {"mc-run", "Run the Monte Carlo study", &dispatch<McRunCmd>},
    {"plot", "SVG charts from a results CSV", &dispatch<PlotCmd>},
};

void usage(std::ostream& os) {
  os << "usage: whitelasso <command> [options]\n\ncommands:\n";
  for (const auto& c : kCommands) {
    std::string name = c.name;
    name.resize(14, ' ');
    os << "  " << name << c.help << "\n";
  }
  os << "\nRun 'whitelasso <command> --help' for the options of a command.\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    usage(err);
    return kValidationError;
  }
  if (args[0] == "-h" || args[0] == "--help") {
    usage(out);
    return kOk;
  }
  for (const auto& c : kCommands) {
    if (args[0] != c.name) continue;
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    try {
      return c.run(c, rest, out, err);
    } catch (const std::invalid_argument& e) {
      err << "whitelasso " << c.name << ": " << e.what() << "\n";
      return kValidationError;
    } catch (const std::exception& e) {
      err << "whitelasso " << c.name << ": " << e.what() << "\n";
      return kRuntimeFailure;
    }
  }
  err << "whitelasso: unknown command '" << args[0] << "'\n";
  usage(err);
  return kValidationError;
}

}  // namespace whitelasso::cli
