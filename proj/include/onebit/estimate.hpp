#pragma once

#include "onebit/measure.hpp"
#include "onebit/signal_sets.hpp"
#include "onebit/types.hpp"

#include <vector>

namespace onebit {

struct SolverConfig
{
  int max_iters = 5000;
  // Step size at iteration k is step0 / sqrt(k + 1) for the hinge solver.
  double step0 = 1.0;
  // Early stop once the best objective improves by less than `tolerance`
  // over `window` consecutive iterations.
  double tolerance = 1e-7;
  int window = 200;
  // The solvers minimize over mu * K.
  double mu = 1.0;

  void validate() const;
};

struct Estimate
{
  Vector x_hat;
  double objective = 0.0;
  // Best objective after each iteration; non-increasing.
  std::vector<double> trace;
  int iterations_used = 0;
};

// (1/m) sum_i max{0, 1 - y_i <a_i, x>}.
double hinge_objective(Dataset const &data, Eigen::Ref<Vector const> const &x);

// (1/m) sum_i z_i a_i with z_i = -y_i if y_i <a_i, x> <= 1 and 0 otherwise.
Vector hinge_subgradient(Dataset const &data, Eigen::Ref<Vector const> const &x);

// (1/m) sum_i (<a_i, x> - y_i)^2.
double squared_objective(Dataset const &data, Eigen::Ref<Vector const> const &x);

// Projected subgradient method for min R_m(x) s.t. x ∈ mu K, started at 0,
// returning the best iterate seen.
Estimate solve_hinge(Dataset const &data, SignalSet const &set, SolverConfig const &cfg = {});

// Generalized Lasso baseline: projected gradient with step 1/L on the squared
// loss, L from 50 power iterations on (2/m) A^T A.
Estimate solve_lasso(Dataset const &data, SignalSet const &set, SolverConfig const &cfg = {});

// (1/m) sum_i y_i a_i.
Vector linear_estimate(Dataset const &data);

struct NormalizedError
{
  double value = 2.0;
  // Set when x_hat = 0: the direction is undefined and value is pinned to 2.
  bool undefined = false;

  operator double() const { return value; }
};

// ||x0 - x_hat / ||x_hat|| ||_2.
NormalizedError normalized_error(Eigen::Ref<Vector const> const &x0, Eigen::Ref<Vector const> const &x_hat);

} // namespace onebit
