#include "onebit/estimate.hpp"
#include "onebit/errors.hpp"

#include <cmath>
#include <string>

namespace onebit {

namespace {

void check_dim(Dataset const &data, Index len, char const *op)
{
  if (data.n() != len) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch (data has n=" + std::to_string(data.n()) +
                          ", vector has " + std::to_string(len) + ")");
  }
}

double hinge_from_margins(Vector const &margins) { return (1.0 - margins.array()).max(0.0).mean(); }

// Multipliers z_i of the hinge subgradient, given margins y_i <a_i, x>.
Vector multipliers(Dataset const &data, Vector const &margins)
{
  return (margins.array() <= 1.0).select(-data.y.array(), 0.0).matrix();
}

void check_finite(Vector const &x, int iteration, char const *solver)
{
  if (!x.allFinite()) {
    throw NumericalFailure(std::string(solver) + ": non-finite iterate at iteration " + std::to_string(iteration),
                           x.array().abs().maxCoeff());
  }
}

// True once the best objective has improved by less than tol over the last window.
bool stagnated(std::vector<double> const &trace, SolverConfig const &cfg)
{
  auto const len = static_cast<int>(trace.size());
  return len > cfg.window && trace[len - 1 - cfg.window] - trace.back() < cfg.tolerance;
}

} // namespace

void SolverConfig::validate() const
{
  if (max_iters < 0) { throw InvalidArgument("solver: max_iters must be non-negative"); }
  if (!(step0 > 0.0)) { throw InvalidArgument("solver: step0 must be positive"); }
  if (!(tolerance >= 0.0)) { throw InvalidArgument("solver: tolerance must be non-negative"); }
  if (window < 1) { throw InvalidArgument("solver: window must be >= 1"); }
  if (!(mu > 0.0) || !std::isfinite(mu)) { throw InvalidArgument("solver: mu must be positive"); }
}

double hinge_objective(Dataset const &data, Eigen::Ref<Vector const> const &x)
{
  check_dim(data, x.size(), "hinge_objective");
  Vector const margins = data.y.cwiseProduct(data.A * x);
  return hinge_from_margins(margins);
}

Vector hinge_subgradient(Dataset const &data, Eigen::Ref<Vector const> const &x)
{
  check_dim(data, x.size(), "hinge_subgradient");
  Vector const margins = data.y.cwiseProduct(data.A * x);
  return data.A.transpose() * multipliers(data, margins) / static_cast<double>(data.m());
}

double squared_objective(Dataset const &data, Eigen::Ref<Vector const> const &x)
{
  check_dim(data, x.size(), "squared_objective");
  return (data.A * x - data.y).squaredNorm() / static_cast<double>(data.m());
}

Estimate solve_hinge(Dataset const &data, SignalSet const &set, SolverConfig const &cfg)
{
  cfg.validate();
  if (set.dim() != data.n()) { throw InvalidArgument("solve_hinge: set and data dimensions differ"); }
  SignalSet const feasible = set.scaled(cfg.mu);
  double const inv_m = 1.0 / static_cast<double>(data.m());

  Vector x = Vector::Zero(data.n());
  Vector margins = Vector::Zero(data.m());
  Estimate est;
  est.x_hat = x;
  est.objective = hinge_from_margins(margins);
  est.trace.reserve(static_cast<std::size_t>(cfg.max_iters));

  for (int k = 0; k < cfg.max_iters; ++k) {
    Vector const z = multipliers(data, margins);
    // All margins above 1: the objective is 0 at x, nothing left to improve.
    if ((z.array() == 0.0).all()) { break; }
    Vector const g = data.A.transpose() * z * inv_m;
    x = project(feasible, x - (cfg.step0 / std::sqrt(k + 1.0)) * g);
    check_finite(x, k, "solve_hinge");

    margins.noalias() = data.y.cwiseProduct(data.A * x);
    double const obj = hinge_from_margins(margins);
    if (obj < est.objective) {
      est.objective = obj;
      est.x_hat = x;
    }
    est.trace.push_back(est.objective);
    est.iterations_used = k + 1;
    if (stagnated(est.trace, cfg)) { break; }
  }
  return est;
}

Estimate solve_lasso(Dataset const &data, SignalSet const &set, SolverConfig const &cfg)
{
  cfg.validate();
  if (set.dim() != data.n()) { throw InvalidArgument("solve_lasso: set and data dimensions differ"); }
  SignalSet const feasible = set.scaled(cfg.mu);
  double const inv_m = 1.0 / static_cast<double>(data.m());

  Vector x = Vector::Zero(data.n());
  Estimate est;
  est.x_hat = x;
  est.objective = squared_objective(data, x);
  if (cfg.max_iters == 0) { return est; }

  // Largest eigenvalue of (2/m) A^T A.
  Vector v = Vector::Ones(data.n()).normalized();
  double lipschitz = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vector const w = 2.0 * inv_m * (data.A.transpose() * (data.A * v));
    lipschitz = w.norm();
    if (lipschitz == 0.0) { break; }
    v = w / lipschitz;
  }
  if (!(lipschitz > 0.0)) { throw NumericalFailure("solve_lasso: degenerate measurement matrix", lipschitz); }
  double const step = 1.0 / lipschitz;

  est.trace.reserve(static_cast<std::size_t>(cfg.max_iters));
  for (int k = 0; k < cfg.max_iters; ++k) {
    Vector const residual = data.A * x - data.y;
    Vector const grad = 2.0 * inv_m * (data.A.transpose() * residual);
    x = project(feasible, x - step * grad);
    check_finite(x, k, "solve_lasso");

    double const obj = squared_objective(data, x);
    if (obj < est.objective) {
      est.objective = obj;
      est.x_hat = x;
    }
    est.trace.push_back(est.objective);
    est.iterations_used = k + 1;
    if (stagnated(est.trace, cfg)) { break; }
  }
  return est;
}

Vector linear_estimate(Dataset const &data)
{
  return data.A.transpose() * data.y / static_cast<double>(data.m());
}

NormalizedError normalized_error(Eigen::Ref<Vector const> const &x0, Eigen::Ref<Vector const> const &x_hat)
{
  if (x0.size() != x_hat.size()) { throw InvalidArgument("normalized_error: dimension mismatch"); }
  if (std::abs(x0.norm() - 1.0) > 1e-9) { throw InvalidArgument("normalized_error: x0 must have unit norm"); }
  double const norm = x_hat.norm();
  if (norm == 0.0) { return {2.0, true}; }
  return {(x0 - x_hat / norm).norm(), false};
}

} // namespace onebit
