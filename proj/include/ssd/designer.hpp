#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssd/core.hpp"
#include "ssd/objective.hpp"
#include "ssd/projections.hpp"

namespace ssd {

// Hard cap on step-size reductions in one backtracking search.
inline constexpr int kMaxHalvings = 60;

struct ConstantStep {
  double eta = 1e-3;
};

// Armijo-style search: eta0, eta0*alpha, eta0*alpha^2, ... until
// rho(Phi_k) - rho(Phi+) >= gamma / (2 eta) * ||Phi+ - Phi_k||_F^2.
struct BacktrackingStep {
  double eta0 = 1.0;
  double gamma = 0.9;
  double alpha = 0.5;
};

using StepRule = std::variant<ConstantStep, BacktrackingStep>;

// Either a fixed cap in [0, 1) or the Welch bound of an M x L frame.
struct XiChoice {
  static XiChoice welch() { return XiChoice{true, 0.0}; }
  static XiChoice value(double v) { return XiChoice{false, v}; }

  bool use_welch = false;
  double fixed = 0.0;

  double resolve(std::size_t m, std::size_t l) const;
};

struct DesignConfig {
  std::size_t m = 25;
  std::size_t n = 60;
  std::size_t l = 80;
  std::size_t kappa = 20;
  XiChoice xi = XiChoice::value(0.0);
  double lambda = 0.25;
  std::size_t max_iters = 1000;
  StepRule step_rule = BacktrackingStep{};
  double tol_phi = 1e-8;
  double tol_obj = 1e-12;
  // Consecutive iterations below tol_obj required to stop.
  std::size_t tol_obj_patience = 5;
  std::uint64_t seed = 1;
};

// Throws kInvalidParameter naming the first offending field.
void validate(const DesignConfig& config);

struct TraceRecord {
  std::size_t iter = 0;
  // rho(Phi_k, G_k) after the Gram update.
  double f = 0.0;
  // rho(Phi_k, G_{k-1}): after the Phi step, before the Gram update.
  double f_mid = 0.0;
  double d_phi = 0.0;
  double d_g = 0.0;
  double eta = 0.0;
  int halvings = 0;
};

enum class TerminationReason { kMaxIters, kPhiTolerance, kObjectiveTolerance };

const char* to_string(TerminationReason reason);

struct DesignResult {
  SparseSensingMatrix phi;
  TargetGram g;
  SparseSensingMatrix phi0;
  TargetGram g0;
  double f0 = 0.0;
  double xi = 0.0;
  std::vector<TraceRecord> trace;
  TerminationReason termination_reason = TerminationReason::kMaxIters;
};

struct BacktrackResult {
  double eta = 0.0;
  SparseSensingMatrix phi_next;
  int halvings = 0;
};

BacktrackResult backtrack_step(const SparseSensingMatrix& phi_k, const TargetGram& g_k,
                               const ObjectiveContext& ctx, std::size_t kappa, double eta0,
                               double gamma, double alpha);

// Alternating minimization: projected gradient step on Phi, exact projection
// for G. `base` is N x N, `psi_bar` is N x L; the effective dictionary is
// base * psi_bar.
DesignResult design(const DenseMatrix& psi_bar, const DenseMatrix& base,
                    const DesignConfig& config);

// The xi = 0 case, where the Gram set is {I} and the iteration is plain
// projected gradient (IHT). Requires config.xi to resolve to 0.
DesignResult design_identity_target(const DenseMatrix& psi_bar, const DenseMatrix& base,
                                    const DesignConfig& config);

// ||Phi - P_S(Phi - eta grad_Phi f(Phi, G))||_F.
double stationarity_surrogate(const SparseSensingMatrix& phi, const TargetGram& g,
                              const ObjectiveContext& ctx, double eta);

// The effective sensing matrix Phi * base that multiplies raw signals.
DenseMatrix effective_sensing_matrix(const SparseSensingMatrix& phi, const DenseMatrix& base);

}  // namespace ssd
