#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssd/core.hpp"
#include "ssd/designer.hpp"
#include "ssd/extended_real.hpp"
#include "ssd/projections.hpp"

namespace ssd::bench {

struct SignalEnsemble {
  DenseMatrix signals;  // N x J
  DenseMatrix codes;    // L x J, every column exactly k-sparse
  std::size_t k = 0;
  double sigma = 0.0;
  double snr_db = 0.0;  // +inf for noiseless
  std::uint64_t seed = 0;
};

// x_i = Psi s_i + e_i. Supports are uniform without replacement, non-zeros
// standard normal, and one sigma for the whole ensemble is fixed by
// 10 log10(mean clean energy per entry / sigma^2) = snr_db. Codes and noise
// come from separate streams, so ensembles that differ only in snr_db share
// codes and noise direction.
SignalEnsemble gen_sparse_signals(const DenseMatrix& psi, std::size_t k, std::size_t j,
                                  double snr_db, std::uint64_t seed);

DenseMatrix make_random_gaussian(std::size_t m, std::size_t n, std::uint64_t seed);

// Exactly kappa ones per row at distinct uniformly random positions.
SparseSensingMatrix make_binary_sparse(std::size_t m, std::size_t n, std::size_t kappa,
                                       std::uint64_t seed);

// Column-normalized N x L Gaussian dictionary.
DenseMatrix make_gaussian_dictionary(std::size_t n, std::size_t l, std::uint64_t seed);

// (1 / (N J)) sum_i ||x_i - x_hat_i||^2.
double mse(const DenseMatrix& x, const DenseMatrix& x_hat);

// 10 log10((2^r - 1)^2 / mse); infinite for mse <= 0.
ExtendedReal psnr(double mse_value, int bits = 8);

struct NamedSystem {
  std::string name;
  DenseMatrix phi;  // M x N, applied to raw signals
};

struct ReportRow {
  std::string system;
  std::string axis;
  double axis_value = 0.0;
  double mse = 0.0;
  ExtendedReal psnr_db = ExtendedReal::infinity();
  std::size_t failures = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  // Flattened configuration, every applied default included.
  std::map<std::string, std::string> config;
  std::vector<std::uint64_t> seeds;
};

struct CellLabel {
  std::string axis = "none";
  double axis_value = 0.0;
  std::uint64_t seed = 0;
};

struct BenchmarkOptions {
  std::size_t threads = 1;
  int psnr_bits = 8;
};

// For every system: Y = Phi X, omp per column against Phi Psi, x_hat = Psi
// s_hat, aggregate MSE/PSNR against the (noisy) signals. A failed recovery
// counts as the zero reconstruction and increments `failures`.
ExperimentReport run_benchmark(const std::vector<NamedSystem>& systems, const DenseMatrix& psi,
                               const SignalEnsemble& ensemble, std::size_t k,
                               const CellLabel& label = {}, const BenchmarkOptions& options = {});

enum class SweepAxis { kSnr, kM, kK, kKappa, kLambda };

const char* to_string(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

// Built-in systems: randn, bispar, sparse (xi = 0, A = I), sparse-etf
// (xi = Welch, A = I), sparse-a (xi = 0, A = DCT). Anything else must be
// supplied through `external`.
struct SweepConfig {
  std::size_t m = 25;
  std::size_t n = 60;
  std::size_t l = 80;
  std::size_t k = 4;
  std::size_t j = 2000;
  double snr_db = 20.0;
  double lambda = 0.25;
  std::size_t kappa = 20;
  std::size_t max_iters = 1000;
  StepRule step_rule = BacktrackingStep{};
  double tol_phi = 1e-8;
  double tol_obj = 1e-12;
  std::vector<std::string> systems = {"randn", "bispar", "sparse", "sparse-etf"};
  std::vector<std::uint64_t> seeds = {1};
  std::size_t threads = 1;
  int psnr_bits = 8;
  // Externally supplied M x N sensing matrices, keyed by system name.
  std::map<std::string, DenseMatrix> external;
};

bool is_builtin_system(std::string_view name);

// Throws kInvalidParameter naming the offending field.
void validate(const SweepConfig& config);

std::map<std::string, std::string> describe(const SweepConfig& config);

// One row per (seed, value, system), in that nesting order. Designs are
// recomputed only when the axis changes them (m, kappa, lambda); the
// results are the same as redesigning per value.
ExperimentReport sweep(const SweepConfig& config, SweepAxis axis,
                       const std::vector<double>& values);

// Axis value with the lowest mean MSE over seeds for `system`.
std::optional<double> argmin_axis_value(const ExperimentReport& report, std::string_view system);

std::string to_csv(const ExperimentReport& report);

}  // namespace ssd::bench
