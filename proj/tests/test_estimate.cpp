#include "oracles.hpp"

#include "onebit/errors.hpp"
#include "onebit/estimate.hpp"
#include "onebit/json_io.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace onebit;

namespace {

Dataset single_sample(Vector const &a, double y)
{
  Dataset d;
  d.A = a.transpose();
  d.y = Vector::Constant(1, y);
  d.x0 = Vector::Zero(a.size());
  return d;
}

Vector vec(std::initializer_list<double> v)
{
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) { out[i++] = x; }
  return out;
}

Vector gaussian(Index n, Rng &rng)
{
  Vector g(n);
  for (Index i = 0; i < n; ++i) { g[i] = rng.normal(); }
  return g;
}

} // namespace

TEST_CASE("hinge_objective: definition")
{
  auto const d = generate_dataset(vec({0.6, 0.8}), 40, Quantizer::sign(), 1);
  CHECK(hinge_objective(d, Vector::Zero(2)) == 1.0);
  CHECK(hinge_objective(single_sample(vec({3.0, 0.0}), 1.0), vec({1.0, 0.0})) == 0.0);
  CHECK(hinge_objective(single_sample(vec({0.5, 0.0}), -1.0), vec({1.0, 0.0})) == doctest::Approx(1.5));
  CHECK_THROWS_AS(hinge_objective(d, Vector::Zero(3)), InvalidArgument);

  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    Vector const x = gaussian(2, rng);
    CHECK(hinge_objective(d, x) >= 0.0);
    CHECK(hinge_objective(d, x) == doctest::Approx(oracle::hinge(d, x)).epsilon(1e-12));
  }
}

TEST_CASE("hinge_subgradient: flat region and single active sample")
{
  CHECK(hinge_subgradient(single_sample(vec({3.0, 0.0}), 1.0), vec({1.0, 0.0})).isZero());
  Vector const g = hinge_subgradient(single_sample(vec({1.0, 0.0}), 1.0), Vector::Zero(2));
  CHECK(g[0] == -1.0);
  CHECK(g[1] == 0.0);
}

TEST_CASE("hinge_subgradient: finite-difference directional check")
{
  Rng rng(3);
  auto const d = generate_dataset(Vector::Ones(5).normalized(), 30, Quantizer::bit_flip(0.8), 4);
  double const eps = 1e-5;
  for (int probe = 0; probe < 100; ++probe) {
    Vector const x = gaussian(5, rng) * 0.5;
    Vector const dir = gaussian(5, rng);
    Vector const g = hinge_subgradient(d, x);
    double const fd = (oracle::hinge(d, x + eps * dir) - oracle::hinge(d, x)) / eps;
    CHECK(fd >= g.dot(dir) - 1e-6);
  }
}

TEST_CASE("solve_hinge: beats the feasible point mu x0")
{
  auto const d = generate_dataset(vec({1.0, 0.0}), 50, Quantizer::sign(), 5);
  auto const set = SignalSet::l2_ball(2);
  auto const est = solve_hinge(d, set);
  CHECK(est.objective <= hinge_objective(d, d.x0));
  CHECK(est.objective == doctest::Approx(hinge_objective(d, est.x_hat)).epsilon(1e-12));
}

TEST_CASE("solve_hinge: matches a dense grid search on sqrt(2) B1 ∩ B2 in R^3")
{
  Rng rng(6);
  Vector x0 = gaussian(3, rng);
  x0.normalize();
  auto const d = generate_dataset(x0, 20, Quantizer::sign(), 7);
  auto const est = solve_hinge(d, SignalSet::eff_sparse(3, 2));
  double const grid = oracle::grid_min_hinge_l1_l2(d, std::sqrt(2.0), 5e-3);
  CHECK(est.objective <= grid + 1e-3);
}

TEST_CASE("solve_hinge: invariants over random instances")
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Index const n = 20;
    Vector const x0 = sample_signal(ExactSparse{3}, n, seed);
    auto const d = generate_dataset(x0, 150, Quantizer::bit_flip(0.9), seed + 100);
    for (double mu : {1.0, 3.0}) {
      SolverConfig cfg;
      cfg.mu = mu;
      cfg.max_iters = 800;
      auto const set = SignalSet::eff_sparse(n, 3);
      auto const est = solve_hinge(d, set, cfg);
      CHECK(membership_residual(set.scaled(mu), est.x_hat) <= 1e-6);
      CHECK(std::is_sorted(est.trace.rbegin(), est.trace.rend()));
      CHECK(std::abs(est.objective - oracle::hinge(d, est.x_hat)) <= 1e-9);
      CHECK(est.objective <= hinge_objective(d, mu * x0) + 1e-12);
      CHECK(est.iterations_used == static_cast<int>(est.trace.size()));
    }
  }
}

TEST_CASE("solve_hinge: sparse recovery regression bound")
{
  // n = 128, s = 4, m = 2000: normalized error <= 0.25 in at least 45 of 50 trials.
  int good = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Vector const x0 = sample_signal(ExactSparse{4}, 128, derive_seed(2024, t, 0));
    auto const d = generate_dataset(x0, 2000, Quantizer::sign(), derive_seed(2024, t, 1));
    auto const est = solve_hinge(d, SignalSet::eff_sparse(128, 4));
    good += normalized_error(x0, est.x_hat).value <= 0.25;
  }
  CHECK(good >= 45);
}

TEST_CASE("solve_hinge: deterministic and validated")
{
  auto const d = generate_dataset(Vector::Ones(4).normalized(), 60, Quantizer::sign(), 8);
  auto const a = solve_hinge(d, SignalSet::scaled_l1_ball(4, 2.0));
  auto const b = solve_hinge(d, SignalSet::scaled_l1_ball(4, 2.0));
  CHECK(a.x_hat == b.x_hat);
  CHECK(a.trace == b.trace);

  SolverConfig bad;
  bad.mu = 0.0;
  CHECK_THROWS_AS(solve_hinge(d, SignalSet::l2_ball(4), bad), InvalidArgument);
  CHECK_THROWS_AS(solve_hinge(d, SignalSet::l2_ball(5)), InvalidArgument);
  Matrix vertices = Matrix::Zero(2, 4);
  vertices(1, 0) = 1.0;
  CHECK_THROWS_AS(solve_hinge(d, SignalSet::polytope(vertices)), Unsupported);
}

TEST_CASE("solve_lasso: initialization and normal-equation oracle")
{
  auto const d = generate_dataset(vec({0.6, -0.8}), 50, Quantizer::bit_flip(0.9), 9);
  SolverConfig zero;
  zero.max_iters = 0;
  CHECK(solve_lasso(d, SignalSet::l2_ball(2), zero).x_hat.isZero());

  SolverConfig cfg;
  cfg.max_iters = 20'000;
  cfg.tolerance = 0.0;
  auto const est = solve_lasso(d, SignalSet::l2_ball(2, 1e6), cfg);
  Eigen::MatrixXd const A = d.A;
  Vector const normal = (A.transpose() * A).ldlt().solve(A.transpose() * d.y);
  CHECK((est.x_hat - normal).norm() < 1e-5);
}

TEST_CASE("solve_lasso: within a factor 2 of the hinge error on the sparse setup")
{
  std::vector<double> hinge_err, lasso_err;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Vector const x0 = sample_signal(ExactSparse{4}, 128, derive_seed(77, t, 0));
    auto const d = generate_dataset(x0, 2000, Quantizer::sign(), derive_seed(77, t, 1));
    auto const set = SignalSet::eff_sparse(128, 4);
    hinge_err.push_back(normalized_error(x0, solve_hinge(d, set).x_hat));
    lasso_err.push_back(normalized_error(x0, solve_lasso(d, set).x_hat));
  }
  std::sort(hinge_err.begin(), hinge_err.end());
  std::sort(lasso_err.begin(), lasso_err.end());
  double const hinge_median = 0.5 * (hinge_err[9] + hinge_err[10]);
  double const lasso_median = 0.5 * (lasso_err[9] + lasso_err[10]);
  CHECK(lasso_median <= 2.0 * hinge_median);
  CHECK(lasso_median >= 0.5 * hinge_median);
}

TEST_CASE("linear_estimate")
{
  auto const one = single_sample(vec({2.0, 0.0}), 1.0);
  CHECK(linear_estimate(one) == vec({2.0, 0.0}));

  auto d = generate_dataset(vec({1.0, 0.0, 0.0, 0.0}), 1'000'000, Quantizer::sign(), 10);
  Vector const est = linear_estimate(d);
  CHECK(normalized_error(d.x0, est).value < 0.01);

  Vector const before = linear_estimate(d);
  d.y = -d.y;
  CHECK(linear_estimate(d) == -before);
}

TEST_CASE("normalized_error")
{
  Vector const x0 = vec({0.6, 0.8});
  CHECK(normalized_error(x0, 3.0 * x0).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normalized_error(x0, -x0).value == doctest::Approx(2.0));
  CHECK(normalized_error(x0, vec({-0.8, 0.6})).value == doctest::Approx(std::sqrt(2.0)));
  auto const zero = normalized_error(x0, Vector::Zero(2));
  CHECK(zero.undefined);
  CHECK(zero.value == 2.0);
  CHECK_THROWS_AS(normalized_error(vec({1.0, 1.0}), x0), InvalidArgument);

  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Vector const x = gaussian(2, rng);
    double const base = normalized_error(x0, x);
    CHECK(base >= 0.0);
    CHECK(base <= 2.0);
    // Powers of two scale without rounding.
    CHECK(normalized_error(x0, 8.0 * x).value == base);
    CHECK(normalized_error(x0, 0.125 * x).value == base);
    CHECK(std::abs(normalized_error(x0, (0.01 + 100.0 * rng.uniform()) * x).value - base) < 1e-14);
  }
}

TEST_CASE("estimate JSON")
{
  auto const d = generate_dataset(vec({1.0, 0.0}), 30, Quantizer::sign(), 12);
  auto const est = solve_hinge(d, SignalSet::l2_ball(2));
  auto const j = estimate_to_json(est);
  CHECK(j.at("objective").get<double>() == est.objective);
  CHECK(j.at("iterations_used").get<int>() == est.iterations_used);
  CHECK(vector_from_json(j.at("x_hat")) == est.x_hat);
}
