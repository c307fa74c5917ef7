#include "ssd/designer.hpp"

#include <cmath>
#include <string>

#include "ssd/rng.hpp"

namespace ssd {
namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidParameter, field + ": " + why);
}

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

struct Step {
  SparseSensingMatrix phi;
  double eta;
  int halvings;
};

SparseSensingMatrix gradient_step(const SparseSensingMatrix& phi, const DenseMatrix& grad,
                                  double eta, std::size_t kappa) {
  return project_row_sparse(phi.matrix() - eta * grad, kappa);
}

Step backtrack(const SparseSensingMatrix& phi_k, const TargetGram& g_k, const ObjectiveContext& ctx,
               std::size_t kappa, const BacktrackingStep& rule, double f_k) {
  const DenseMatrix grad = gradient_phi(phi_k, g_k, ctx);
  double eta = rule.eta0;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    SparseSensingMatrix candidate = gradient_step(phi_k, grad, eta, kappa);
    const double f_next = objective_value(candidate, g_k, ctx);
    const double moved = (candidate.matrix() - phi_k.matrix()).squaredNorm();
    if (std::isfinite(f_next) && f_k - f_next >= rule.gamma / (2.0 * eta) * moved) {
      return Step{std::move(candidate), eta, halvings};
    }
    eta *= rule.alpha;
  }
  throw Error(ErrorCode::kStepSearchFailure,
              "no step satisfied sufficient decrease after " + std::to_string(kMaxHalvings) +
                  " reductions");
}

SparseSensingMatrix initial_phi(const DesignConfig& config) {
  Rng rng(derive_seed(config.seed, "design.phi0"));
  DenseMatrix z(static_cast<Eigen::Index>(config.m), static_cast<Eigen::Index>(config.n));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.normal();
  }
  return project_row_sparse(z, config.kappa);
}

DesignResult run(const DenseMatrix& psi_bar, const DenseMatrix& base, const DesignConfig& config,
                 bool fixed_identity) {
  validate(config);
  const auto n = static_cast<Eigen::Index>(config.n);
  const auto l = static_cast<Eigen::Index>(config.l);
  if (base.rows() != n || base.cols() != n) {
    throw Error(ErrorCode::kInvalidDimension, "base matrix must be n x n");
  }
  if (psi_bar.rows() != n || psi_bar.cols() != l) {
    throw Error(ErrorCode::kInvalidDimension, "dictionary must be n x l");
  }
  const double xi = config.xi.resolve(config.m, config.l);
  if (fixed_identity && xi != 0.0) {
    throw Error(ErrorCode::kInvalidParameter, "xi: identity target requires xi = 0");
  }
  const ObjectiveContext ctx(base * psi_bar, config.lambda);

  auto update_gram = [&](const SparseSensingMatrix& phi) {
    return fixed_identity ? TargetGram::identity(config.l)
                          : project_gram(equivalent_gram(phi.matrix(), ctx.psi()), xi);
  };

  SparseSensingMatrix phi = initial_phi(config);
  TargetGram g = update_gram(phi);
  DesignResult result{phi, g, phi, g, objective_value(phi, g, ctx), xi, {},
                      TerminationReason::kMaxIters};
  if (!std::isfinite(result.f0)) {
    throw Error(ErrorCode::kNumericDivergence, "initial objective is not finite", 0);
  }
  result.trace.reserve(config.max_iters);

  double f = result.f0;
  std::size_t flat_run = 0;
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    Step step = std::visit(
        [&](const auto& rule) -> Step {
          using Rule = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<Rule, BacktrackingStep>) {
            return backtrack(phi, g, ctx, config.kappa, rule, f);
          } else {
            return Step{gradient_step(phi, gradient_phi(phi, g, ctx), rule.eta, config.kappa),
                        rule.eta, 0};
          }
        },
        config.step_rule);

    TraceRecord rec;
    rec.iter = k;
    rec.f_mid = objective_value(step.phi, g, ctx);
    TargetGram g_next = update_gram(step.phi);
    rec.f = objective_value(step.phi, g_next, ctx);
    if (!std::isfinite(rec.f) || !std::isfinite(rec.f_mid)) {
      throw Error(ErrorCode::kNumericDivergence,
                  "objective became non-finite at iteration " + std::to_string(k), k);
    }
    rec.d_phi = (step.phi.matrix() - phi.matrix()).norm();
    rec.d_g = (g_next.matrix() - g.matrix()).norm();
    rec.eta = step.eta;
    rec.halvings = step.halvings;
    result.trace.push_back(rec);

    const double rel_change = std::abs(f - rec.f) / std::max(std::abs(f), 1e-300);
    phi = std::move(step.phi);
    g = std::move(g_next);
    f = rec.f;

    if (rec.d_phi < config.tol_phi) {
      result.termination_reason = TerminationReason::kPhiTolerance;
      break;
    }
    flat_run = rel_change < config.tol_obj ? flat_run + 1 : 0;
    if (flat_run >= config.tol_obj_patience) {
      result.termination_reason = TerminationReason::kObjectiveTolerance;
      break;
    }
  }
  result.phi = std::move(phi);
  result.g = std::move(g);
  return result;
}

}  // namespace

double XiChoice::resolve(std::size_t m, std::size_t l) const {
  return use_welch ? welch_bound(m, l) : fixed;
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kMaxIters: return "max_iters";
    case TerminationReason::kPhiTolerance: return "phi_tolerance";
    case TerminationReason::kObjectiveTolerance: return "objective_tolerance";
  }
  return "unknown";
}

void validate(const DesignConfig& c) {
  if (c.m == 0) bad_field("m", "must be >= 1");
  if (c.n == 0) bad_field("n", "must be >= 1");
  if (c.l == 0) bad_field("l", "must be >= 1");
  if (c.kappa == 0 || c.kappa > c.n) bad_field("kappa", "must lie in [1, n]");
  if (!c.xi.use_welch && !(c.xi.fixed >= 0.0 && c.xi.fixed < 1.0)) {
    bad_field("xi", "must lie in [0, 1) or be \"welch\"");
  }
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) bad_field("lambda", "must be >= 0");
  if (!(c.tol_phi >= 0.0)) bad_field("tol_phi", "must be >= 0");
  if (!(c.tol_obj >= 0.0)) bad_field("tol_obj", "must be >= 0");
  if (const auto* bt = std::get_if<BacktrackingStep>(&c.step_rule)) {
    if (!(bt->eta0 > 0.0) || !std::isfinite(bt->eta0)) bad_field("eta0", "must be > 0");
    if (!in_open_unit(bt->gamma)) bad_field("gamma", "must lie in (0, 1)");
    if (!in_open_unit(bt->alpha)) bad_field("alpha", "must lie in (0, 1)");
  } else {
    const auto& cs = std::get<ConstantStep>(c.step_rule);
    if (!(cs.eta > 0.0) || !std::isfinite(cs.eta)) bad_field("eta", "must be > 0");
  }
}

BacktrackResult backtrack_step(const SparseSensingMatrix& phi_k, const TargetGram& g_k,
                               const ObjectiveContext& ctx, std::size_t kappa, double eta0,
                               double gamma, double alpha) {
  if (!(eta0 > 0.0)) bad_field("eta0", "must be > 0");
  if (!in_open_unit(gamma)) bad_field("gamma", "must lie in (0, 1)");
  if (!in_open_unit(alpha)) bad_field("alpha", "must lie in (0, 1)");
  const double f_k = objective_value(phi_k, g_k, ctx);
  Step step = backtrack(phi_k, g_k, ctx, kappa, BacktrackingStep{eta0, gamma, alpha}, f_k);
  return BacktrackResult{step.eta, std::move(step.phi), step.halvings};
}

DesignResult design(const DenseMatrix& psi_bar, const DenseMatrix& base,
                    const DesignConfig& config) {
  return run(psi_bar, base, config, false);
}

DesignResult design_identity_target(const DenseMatrix& psi_bar, const DenseMatrix& base,
                                    const DesignConfig& config) {
  return run(psi_bar, base, config, true);
}

double stationarity_surrogate(const SparseSensingMatrix& phi, const TargetGram& g,
                              const ObjectiveContext& ctx, double eta) {
  const SparseSensingMatrix next = gradient_step(phi, gradient_phi(phi, g, ctx), eta, phi.kappa());
  return (phi.matrix() - next.matrix()).norm();
}

DenseMatrix effective_sensing_matrix(const SparseSensingMatrix& phi, const DenseMatrix& base) {
  if (phi.matrix().cols() != base.rows()) {
    throw Error(ErrorCode::kInvalidDimension, "base matrix does not match sensing matrix");
  }
  return phi.matrix() * base;
}

}  // namespace ssd
