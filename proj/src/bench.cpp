#include "ssd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "ssd/matrix_io.hpp"
#include "ssd/parallel.hpp"
#include "ssd/recovery.hpp"
#include "ssd/rng.hpp"

namespace ssd::bench {
namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidParameter, field + ": " + why);
}

DenseMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Row-major fill so a matrix's top rows do not depend on its row count.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  return m;
}

std::size_t as_count(double v, const char* field) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    bad_field(field, "sweep value " + io::format_double(v) + " is not a positive integer");
  }
  return static_cast<std::size_t>(v);
}

// Everything a sensing-matrix design depends on besides the seed.
struct DesignKey {
  std::uint64_t seed;
  std::size_t m;
  std::size_t kappa;
  double lambda;
  friend auto operator<=>(const DesignKey&, const DesignKey&) = default;
};

struct Cell {
  std::uint64_t seed;
  double value;
  SweepConfig config;
};

SweepConfig apply_axis(SweepConfig c, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::kSnr: c.snr_db = v; break;
    case SweepAxis::kM: c.m = as_count(v, "m"); break;
    case SweepAxis::kK: c.k = as_count(v, "k"); break;
    case SweepAxis::kKappa: c.kappa = as_count(v, "kappa"); break;
    case SweepAxis::kLambda: c.lambda = v; break;
  }
  return c;
}

DesignConfig design_config(const SweepConfig& c, std::uint64_t seed, XiChoice xi) {
  DesignConfig d;
  d.m = c.m;
  d.n = c.n;
  d.l = c.l;
  d.kappa = c.kappa;
  d.xi = xi;
  d.lambda = c.lambda;
  d.max_iters = c.max_iters;
  d.step_rule = c.step_rule;
  d.tol_phi = c.tol_phi;
  d.tol_obj = c.tol_obj;
  d.seed = derive_seed(seed, "design");
  return d;
}

// Designed systems per key; nullopt marks a failed design.
using DesignedSet = std::map<std::string, std::optional<DenseMatrix>>;

DesignedSet build_designed(const SweepConfig& c, std::uint64_t seed, const DenseMatrix& psi_bar) {
  DesignedSet out;
  for (const auto& name : c.systems) {
    try {
      if (name == "sparse") {
        const auto r = design_identity_target(psi_bar, make_identity_base(c.n),
                                              design_config(c, seed, XiChoice::value(0.0)));
        out[name] = r.phi.matrix();
      } else if (name == "sparse-etf") {
        const auto r = design(psi_bar, make_identity_base(c.n),
                              design_config(c, seed, XiChoice::welch()));
        out[name] = r.phi.matrix();
      } else if (name == "sparse-a") {
        const DenseMatrix dct = make_dct_base(c.n);
        const auto r =
            design_identity_target(psi_bar, dct, design_config(c, seed, XiChoice::value(0.0)));
        out[name] = effective_sensing_matrix(r.phi, dct);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStepSearchFailure && e.code() != ErrorCode::kNumericDivergence) {
        throw;
      }
      out[name] = std::nullopt;
    }
  }
  return out;
}

}  // namespace

SignalEnsemble gen_sparse_signals(const DenseMatrix& psi, std::size_t k, std::size_t j,
                                  double snr_db, std::uint64_t seed) {
  const auto l = static_cast<std::size_t>(psi.cols());
  if (k == 0 || k > l) bad_field("k", "must lie in [1, " + std::to_string(l) + "]");
  if (j == 0) bad_field("j", "must be >= 1");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    bad_field("snr", "must be a number or +inf");
  }
  require_finite(psi, "dictionary");

  SignalEnsemble e;
  e.k = k;
  e.snr_db = snr_db;
  e.seed = seed;
  e.codes = DenseMatrix::Zero(psi.cols(), static_cast<Eigen::Index>(j));
  Rng code_rng(derive_seed(seed, "signals.codes"));
  for (Eigen::Index col = 0; col < e.codes.cols(); ++col) {
    for (std::size_t idx : code_rng.sample_without_replacement(l, k)) {
      double v = code_rng.normal();
      // Exactly k non-zeros even in the measure-zero case of a 0.0 draw.
      while (v == 0.0) v = code_rng.normal();
      e.codes(static_cast<Eigen::Index>(idx), col) = v;
    }
  }
  const DenseMatrix clean = psi * e.codes;
  e.signals = clean;
  if (std::isinf(snr_db)) return e;

  const double energy = clean.squaredNorm() / static_cast<double>(clean.size());
  e.sigma = std::sqrt(energy / std::pow(10.0, snr_db / 10.0));
  Rng noise_rng(derive_seed(seed, "signals.noise"));
  for (Eigen::Index col = 0; col < e.signals.cols(); ++col) {
    for (Eigen::Index row = 0; row < e.signals.rows(); ++row) {
      e.signals(row, col) += e.sigma * noise_rng.normal();
    }
  }
  return e;
}

DenseMatrix make_random_gaussian(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw Error(ErrorCode::kInvalidDimension, "matrix dimensions must be >= 1");
  return gaussian(m, n, seed);
}

SparseSensingMatrix make_binary_sparse(std::size_t m, std::size_t n, std::size_t kappa,
                                       std::uint64_t seed) {
  if (m == 0 || n == 0) throw Error(ErrorCode::kInvalidDimension, "matrix dimensions must be >= 1");
  if (kappa == 0 || kappa > n) bad_field("kappa", "must lie in [1, n]");
  Rng rng(seed);
  DenseMatrix phi = DenseMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (std::size_t j : rng.sample_without_replacement(n, kappa)) {
      phi(i, static_cast<Eigen::Index>(j)) = 1.0;
    }
  }
  return SparseSensingMatrix::from_dense(std::move(phi), kappa);
}

DenseMatrix make_gaussian_dictionary(std::size_t n, std::size_t l, std::uint64_t seed) {
  return normalize_columns(make_random_gaussian(n, l, seed));
}

double mse(const DenseMatrix& x, const DenseMatrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols() || x.size() == 0) {
    throw Error(ErrorCode::kInvalidDimension, "mse needs two non-empty matrices of equal shape");
  }
  return (x - x_hat).squaredNorm() / static_cast<double>(x.size());
}

ExtendedReal psnr(double mse_value, int bits) {
  if (bits < 1 || bits > 62) bad_field("psnr_bits", "must lie in [1, 62]");
  if (!(mse_value > 0.0)) return ExtendedReal::infinity();
  const double peak = std::ldexp(1.0, bits) - 1.0;
  return ExtendedReal::finite(10.0 * std::log10(peak * peak / mse_value));
}

ExperimentReport run_benchmark(const std::vector<NamedSystem>& systems, const DenseMatrix& psi,
                               const SignalEnsemble& ensemble, std::size_t k,
                               const CellLabel& label, const BenchmarkOptions& options) {
  if (ensemble.signals.rows() != psi.rows()) {
    throw Error(ErrorCode::kInvalidDimension, "signals do not match the dictionary");
  }
  ExperimentReport report;
  report.seeds = {label.seed};
  const Eigen::Index count = ensemble.signals.cols();
  for (const auto& system : systems) {
    if (system.phi.cols() != psi.rows()) {
      throw Error(ErrorCode::kInvalidDimension,
                  "system " + system.name + " does not match the signal length");
    }
    const DenseMatrix measurements = system.phi * ensemble.signals;
    const DenseMatrix equivalent = system.phi * psi;
    DenseMatrix recovered = DenseMatrix::Zero(ensemble.signals.rows(), count);
    std::vector<char> failed(static_cast<std::size_t>(count), 0);
    parallel_for(static_cast<std::size_t>(count), options.threads, [&](std::size_t i) {
      const auto col = static_cast<Eigen::Index>(i);
      try {
        const RecoveryResult r = omp(measurements.col(col), equivalent, k);
        recovered.col(col) = psi * r.coefficients;
      } catch (const Error&) {
        failed[i] = 1;
      }
    });
    ReportRow row;
    row.system = system.name;
    row.axis = label.axis;
    row.axis_value = label.axis_value;
    row.seed = label.seed;
    row.mse = mse(ensemble.signals, recovered);
    row.psnr_db = psnr(row.mse, options.psnr_bits);
    row.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    report.rows.push_back(std::move(row));
  }
  return report;
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSnr: return "snr";
    case SweepAxis::kM: return "m";
    case SweepAxis::kK: return "k";
    case SweepAxis::kKappa: return "kappa";
    case SweepAxis::kLambda: return "lambda";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  for (auto a : {SweepAxis::kSnr, SweepAxis::kM, SweepAxis::kK, SweepAxis::kKappa,
                 SweepAxis::kLambda}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

bool is_builtin_system(std::string_view name) {
  return name == "randn" || name == "bispar" || name == "sparse" || name == "sparse-etf" ||
         name == "sparse-a";
}

void validate(const SweepConfig& c) {
  if (c.n == 0) bad_field("n", "must be >= 1");
  if (c.l == 0) bad_field("l", "must be >= 1");
  if (c.m == 0 || c.m > c.n) bad_field("m", "must lie in [1, n]");
  if (c.k == 0 || c.k > c.m || c.k > c.l) bad_field("k", "must lie in [1, min(m, l)]");
  if (c.j == 0) bad_field("j", "must be >= 1");
  if (c.kappa == 0 || c.kappa > c.n) bad_field("kappa", "must lie in [1, n]");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) bad_field("lambda", "must be >= 0");
  if (std::isnan(c.snr_db)) bad_field("snr", "must be a number");
  if (c.systems.empty()) bad_field("systems", "at least one system is required");
  if (c.seeds.empty()) bad_field("seeds", "at least one seed is required");
  if (c.psnr_bits < 1 || c.psnr_bits > 62) bad_field("psnr_bits", "must lie in [1, 62]");
  for (const auto& name : c.systems) {
    if (is_builtin_system(name)) continue;
    const auto it = c.external.find(name);
    if (it == c.external.end()) bad_field("systems", "unknown system '" + name + "'");
    if (static_cast<std::size_t>(it->second.cols()) != c.n) {
      bad_field("systems", "external system '" + name + "' must have n columns");
    }
  }
  DesignConfig probe = design_config(c, 0, XiChoice::value(0.0));
  validate(probe);
}

std::map<std::string, std::string> describe(const SweepConfig& c) {
  std::map<std::string, std::string> out;
  out["m"] = std::to_string(c.m);
  out["n"] = std::to_string(c.n);
  out["l"] = std::to_string(c.l);
  out["k"] = std::to_string(c.k);
  out["j"] = std::to_string(c.j);
  out["snr"] = io::format_double(c.snr_db);
  out["lambda"] = io::format_double(c.lambda);
  out["kappa"] = std::to_string(c.kappa);
  out["max_iters"] = std::to_string(c.max_iters);
  out["tol_phi"] = io::format_double(c.tol_phi);
  out["tol_obj"] = io::format_double(c.tol_obj);
  out["psnr_bits"] = std::to_string(c.psnr_bits);
  out["threads"] = std::to_string(c.threads);
  if (const auto* bt = std::get_if<BacktrackingStep>(&c.step_rule)) {
    out["step_rule"] = "backtracking";
    out["eta0"] = io::format_double(bt->eta0);
    out["gamma"] = io::format_double(bt->gamma);
    out["alpha"] = io::format_double(bt->alpha);
  } else {
    out["step_rule"] = "constant";
    out["eta"] = io::format_double(std::get<ConstantStep>(c.step_rule).eta);
  }
  std::string systems, seeds;
  for (const auto& s : c.systems) systems += (systems.empty() ? "" : ",") + s;
  for (auto s : c.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  out["systems"] = systems;
  out["seeds"] = seeds;
  out["dictionary"] = "gaussian, unit-norm columns";
  out["support_sampler"] = "uniform without replacement";
  out["failure_scoring"] = "zero reconstruction";
  return out;
}

ExperimentReport sweep(const SweepConfig& config, SweepAxis axis,
                       const std::vector<double>& values) {
  validate(config);
  if (values.empty()) bad_field("values", "sweep needs at least one value");

  std::vector<Cell> cells;
  for (auto seed : config.seeds) {
    for (double v : values) {
      SweepConfig c = apply_axis(config, axis, v);
      validate(c);
      cells.push_back(Cell{seed, v, std::move(c)});
    }
  }

  // Designs are the expensive part; compute each distinct one once.
  std::map<DesignKey, std::size_t> design_index;
  std::vector<const Cell*> design_jobs;
  for (const auto& cell : cells) {
    const DesignKey key{cell.seed, cell.config.m, cell.config.kappa, cell.config.lambda};
    if (design_index.emplace(key, design_jobs.size()).second) design_jobs.push_back(&cell);
  }
  std::map<std::uint64_t, DenseMatrix> dictionaries;
  for (auto seed : config.seeds) {
    dictionaries.emplace(seed, make_gaussian_dictionary(config.n, config.l,
                                                        derive_seed(seed, "dictionary")));
  }
  std::vector<DesignedSet> designed(design_jobs.size());
  parallel_for(design_jobs.size(), config.threads, [&](std::size_t i) {
    const Cell& cell = *design_jobs[i];
    designed[i] = build_designed(cell.config, cell.seed, dictionaries.at(cell.seed));
  });

  ExperimentReport report;
  report.config = describe(config);
  report.config["axis"] = to_string(axis);
  std::string joined;
  for (double v : values) joined += (joined.empty() ? "" : ",") + io::format_double(v);
  report.config["values"] = joined;
  report.seeds = config.seeds;

  for (const auto& cell : cells) {
    const SweepConfig& c = cell.config;
    const DenseMatrix& psi_bar = dictionaries.at(cell.seed);
    const DesignedSet& set =
        designed[design_index.at(DesignKey{cell.seed, c.m, c.kappa, c.lambda})];
    const SignalEnsemble ensemble =
        gen_sparse_signals(psi_bar, c.k, c.j, c.snr_db, derive_seed(cell.seed, "signals"));
    const CellLabel label{to_string(axis), cell.value, cell.seed};
    const BenchmarkOptions options{c.threads, c.psnr_bits};

    for (const auto& name : c.systems) {
      std::optional<DenseMatrix> phi;
      if (name == "randn") {
        phi = make_random_gaussian(c.m, c.n, derive_seed(cell.seed, "randn"));
      } else if (name == "bispar") {
        phi = make_binary_sparse(c.m, c.n, c.kappa, derive_seed(cell.seed, "bispar")).matrix();
      } else if (is_builtin_system(name)) {
        phi = set.at(name);
      } else {
        phi = c.external.at(name);
      }
      if (!phi) {
        // The design itself failed: every signal scores as a zero reconstruction.
        ReportRow row{name, label.axis, label.axis_value, 0.0, ExtendedReal::infinity(), c.j,
                      cell.seed};
        row.mse = mse(ensemble.signals, DenseMatrix::Zero(ensemble.signals.rows(),
                                                          ensemble.signals.cols()));
        row.psnr_db = psnr(row.mse, c.psnr_bits);
        report.rows.push_back(std::move(row));
        continue;
      }
      auto cell_report =
          run_benchmark({NamedSystem{name, std::move(*phi)}}, psi_bar, ensemble, c.k, label, options);
      report.rows.push_back(std::move(cell_report.rows.front()));
    }
  }
  return report;
}

std::optional<double> argmin_axis_value(const ExperimentReport& report, std::string_view system) {
  std::map<double, std::pair<double, std::size_t>> totals;
  for (const auto& row : report.rows) {
    if (row.system != system) continue;
    auto& t = totals[row.axis_value];
    t.first += row.mse;
    ++t.second;
  }
  std::optional<double> best;
  double best_mean = std::numeric_limits<double>::infinity();
  // Ascending axis order: ties resolve to the smallest value.
  for (const auto& [value, t] : totals) {
    const double mean = t.first / static_cast<double>(t.second);
    if (mean < best_mean) {
      best_mean = mean;
      best = value;
    }
  }
  return best;
}

std::string to_csv(const ExperimentReport& report) {
  std::string out = "system,axis,axis_value,mse,psnr_db,failures,seed\n";
  for (const auto& r : report.rows) {
    out += r.system + ',' + r.axis + ',' + io::format_double(r.axis_value) + ',' +
           io::format_double(r.mse) + ',' + io::format_double(r.psnr_db.as_double()) + ',' +
           std::to_string(r.failures) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

}  // namespace ssd::bench
