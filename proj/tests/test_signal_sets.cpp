#include "oracles.hpp"

#include "onebit/errors.hpp"
#include "onebit/json_io.hpp"
#include "onebit/projections.hpp"
#include "onebit/rng.hpp"
#include "onebit/signal_sets.hpp"

#include <Eigen/QR>
#include <doctest.h>

#include <array>
#include <cmath>

using namespace onebit;

namespace {

Vector gaussian(Index n, Rng &rng)
{
  Vector g(n);
  for (Index i = 0; i < n; ++i) { g[i] = rng.normal(); }
  return g;
}

Matrix random_orthonormal_rows(Index d, Index n, std::uint64_t seed)
{
  Rng rng(seed);
  Eigen::MatrixXd raw(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) { raw(i, j) = rng.normal(); }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd const q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  return q.transpose();
}

std::vector<SignalSet> projectable_sets(Index n)
{
  return {SignalSet::l2_ball(n, 1.5), SignalSet::scaled_l1_ball(n, 2.0), SignalSet::eff_sparse(n, 3),
          SignalSet::eff_sparse(n, 2, 1.1), SignalSet::subspace(random_orthonormal_rows(3, n, 9)),
          SignalSet::eff_sparse(n, 3).scaled(2.5)};
}

} // namespace

TEST_CASE("project: closed-form cases")
{
  Vector v(2);
  v << 0.3, 0.4;
  CHECK((project(SignalSet::l2_ball(2), v) - v).norm() == 0.0);

  v << 3.0, 0.0;
  Vector expected(2);
  expected << 1.0, 0.0;
  CHECK((project(SignalSet::scaled_l1_ball(2, 1.0), v) - expected).norm() < 1e-15);
}

TEST_CASE("project: eff_sparse(1) in R^2 matches a dense grid search")
{
  Vector v(2);
  v << 2.0, 2.0;
  Vector const x = project(SignalSet::eff_sparse(2, 1), v);
  Vector const grid = oracle::grid_argmin(
    2, 1.0, 1e-3, [](Vector const &p) { return oracle::in_l1_l2(p, 1.0); }, [&](Vector const &p) { return (p - v).norm(); });
  CHECK(x.lpNorm<1>() <= 1.0 + 1e-9);
  CHECK(x.norm() <= 1.0 + 1e-9);
  CHECK((x - grid).norm() < 1e-4);
}

TEST_CASE("project: eff_sparse agrees with the KKT bisection oracle")
{
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Index const n = 20;
    int const s = 1 + static_cast<int>(rng.below(6));
    Vector const v = gaussian(n, rng) * (0.2 + 3.0 * rng.uniform());
    Vector const x = project(SignalSet::eff_sparse(n, s), v);
    Vector const ref = oracle::kkt_project_l1_l2(v, std::sqrt(static_cast<double>(s)));
    CHECK((x - ref).norm() < 1e-7);
  }
}

TEST_CASE("project: errors")
{
  CHECK_THROWS_AS(project(SignalSet::l2_ball(3), Vector::Zero(2)), InvalidArgument);
  Matrix vertices = Matrix::Zero(2, 2);
  vertices(1, 0) = 1.0;
  CHECK_THROWS_AS(project(SignalSet::polytope(vertices), Vector::Zero(2)), Unsupported);
  CHECK_THROWS_AS(SignalSet::eff_sparse(4, 5), InvalidArgument);
  CHECK_THROWS_AS(SignalSet::polytope(Matrix::Ones(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(SignalSet::subspace(Matrix::Ones(2, 3)), InvalidArgument);
  CHECK_THROWS_AS(SignalSet::l2_ball(3, -1.0), InvalidArgument);
}

TEST_CASE("project: output is feasible and idempotent")
{
  Rng rng(5);
  for (auto const &set : projectable_sets(12)) {
    for (int i = 0; i < 20; ++i) {
      Vector const v = gaussian(12, rng) * 3.0;
      Vector const x = project(set, v);
      CHECK(membership_residual(set, x) <= kMembershipTol * set.scale());
      CHECK((project(set, x) - x).norm() < 1e-9);
    }
  }
}

TEST_CASE("project: first-order optimality over 100 feasible probes")
{
  Rng rng(6);
  for (auto const &set : projectable_sets(10)) {
    Vector const v = gaussian(10, rng) * 2.0;
    Vector const x = project(set, v);
    for (int probe = 0; probe < 100; ++probe) {
      // x + eps (y - x) stays in K for any y ∈ K and eps ∈ [0, 1].
      Vector const y = project(set, gaussian(10, rng) * 2.0);
      double const eps = rng.uniform();
      Vector const moved = x + eps * (y - x);
      CHECK((v - x).norm() <= (v - moved).norm() + 1e-9);
    }
  }
}

TEST_CASE("support: closed-form cases")
{
  Vector g(2);
  g << 3.0, 4.0;
  CHECK(support(SignalSet::l2_ball(2), g) == doctest::Approx(5.0).epsilon(1e-15));
  g << 3.0, -4.0;
  CHECK(support(SignalSet::scaled_l1_ball(2, 2.0), g) == doctest::Approx(8.0).epsilon(1e-15));

  Matrix vertices(3, 2);
  vertices << 0, 0, 1, 0, 0, 2;
  CHECK(support(SignalSet::polytope(vertices), g) == doctest::Approx(3.0));
  CHECK(support(SignalSet::polytope(Matrix::Zero(1, 2)), g) == 0.0);

  Matrix basis(1, 2);
  basis << 1.0, 0.0;
  CHECK(support(SignalSet::subspace(basis), g) == doctest::Approx(3.0));
}

TEST_CASE("support: eff_sparse(2) in R^4 matches a dense grid search")
{
  double const r1 = std::sqrt(2.0);
  auto const feasible = [r1](Vector const &x) { return oracle::in_l1_l2(x, r1); };
  auto const grid_sup = [&](Vector const &g) {
    auto const neg = [&g](Vector const &x) { return -g.dot(x); };
    // Coarse pass over the whole box, then step 1e-3 around the best point.
    Vector const coarse = oracle::grid_argmin(4, 1.0, 0.05, feasible, neg);
    Vector const fine = oracle::grid_argmin(4, 0.025, 1e-3, feasible, neg, coarse);
    return g.dot(fine);
  };

  Vector g(4);
  g << 1, 1, 1, 1;
  double const value = support(SignalSet::eff_sparse(4, 2), g);
  CHECK(value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(value - grid_sup(g)) < 1e-3);

  g << 1.3, -0.4, 0.8, 0.1;
  CHECK(std::abs(support(SignalSet::eff_sparse(4, 2), g) - grid_sup(g)) < 1e-3);
}

TEST_CASE("support: positive homogeneity and the intersection bound")
{
  Rng rng(8);
  Index const n = 16;
  Matrix vertices = Matrix::Zero(5, n);
  for (Index i = 1; i < 5; ++i) { vertices.row(i) = gaussian(n, rng).transpose(); }
  std::vector<SignalSet> sets = projectable_sets(n);
  sets.push_back(SignalSet::polytope(vertices));
  for (int trial = 0; trial < 30; ++trial) {
    Vector const g = gaussian(n, rng);
    double const c = 0.1 + 10.0 * rng.uniform();
    for (auto const &set : sets) {
      double const base = support(set, g);
      CHECK(std::abs(support(set, c * g) - c * base) <= 1e-9 * std::max(1.0, c * std::abs(base)));
    }
    for (int s = 1; s <= 6; ++s) {
      double const bound = std::min(std::sqrt(static_cast<double>(s)) * g.lpNorm<Eigen::Infinity>(), g.norm());
      CHECK(support(SignalSet::eff_sparse(n, s), g) <= bound + 1e-12);
    }
  }
}

TEST_CASE("eff_sparse contains every s-sparse unit vector")
{
  Index const n = 30;
  for (int s = 1; s <= 8; ++s) {
    auto const set = SignalSet::eff_sparse(n, s);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Vector const x = sample_signal(ExactSparse{s}, n, seed);
      CHECK(membership_residual(set, x) <= 1e-12);
    }
    // Equal magnitudes put x on the l1 boundary as well.
    Vector flat = Vector::Zero(n);
    flat.head(s).setConstant(1.0 / std::sqrt(static_cast<double>(s)));
    CHECK(membership_residual(set, flat) <= 1e-12);
  }
}

TEST_CASE("sample_signal: generators")
{
  Vector const e = sample_signal(ExactSparse{1}, 5, 1);
  CHECK((e.array() != 0.0).count() == 1);
  CHECK(e.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));

  Vector const x = sample_signal(ExactSparse{3}, 10, 2);
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((x.array() != 0.0).count() == 3);

  Vector const c = sample_signal(Compressible{4, 2.0}, 16, 3);
  CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.lpNorm<1>() <= 2.0 * std::sqrt(4.0));

  Matrix const basis = random_orthonormal_rows(3, 8, 4);
  Vector const u = sample_signal(SubspaceSignal{basis}, 8, 5);
  CHECK(membership_residual(SignalSet::subspace(basis), u) < 1e-12);

  Matrix vertices = Matrix::Zero(3, 4);
  vertices(1, 0) = 2.0;
  vertices(2, 1) = 2.0;
  Vector const p = sample_signal(PolytopeMix{vertices}, 4, 6);
  CHECK(p.norm() == doctest::Approx(1.0));
  CHECK(p.minCoeff() >= 0.0);

  CHECK_THROWS_AS(sample_signal(ExactSparse{6}, 5, 0), InvalidArgument);
  CHECK((sample_signal(ExactSparse{3}, 10, 9) - sample_signal(ExactSparse{3}, 10, 9)).norm() == 0.0);
}

TEST_CASE("signal set JSON descriptor")
{
  auto const j = nlohmann::json::parse(R"({"variant": "eff_sparse", "s": 4, "n": 128})");
  auto const set = signal_set_from_json(j);
  CHECK(set.dim() == 128);
  REQUIRE(std::holds_alternative<EffSparse>(set.variant()));
  CHECK(std::get<EffSparse>(set.variant()).s == 4);
  CHECK(signal_set_to_json(set) == j);

  auto const scaled = signal_set_from_json(signal_set_to_json(SignalSet::scaled_l1_ball(5, 2.0).scaled(3.0)));
  CHECK(scaled.scale() == 3.0);

  Matrix const basis = random_orthonormal_rows(2, 5, 1);
  auto const sub = signal_set_from_json(signal_set_to_json(SignalSet::subspace(basis)));
  CHECK((std::get<Subspace>(sub.variant()).basis - basis).norm() == 0.0);

  CHECK_THROWS_AS(signal_set_from_json(nlohmann::json::parse(R"({"variant": "cube", "n": 3})")), InvalidArgument);
  CHECK_THROWS_AS(signal_set_from_json(nlohmann::json::parse(R"({"variant": "eff_sparse", "n": 3})")), InvalidArgument);
}

TEST_CASE("projections: templates accept Eigen expressions")
{
  Eigen::VectorXf v(3);
  v << 2.0f, -1.0f, 0.5f;
  Eigen::VectorXf const x = project_l1_ball(v * 2.0f, 1.0f);
  CHECK(x.lpNorm<1>() == doctest::Approx(1.0f));
  CHECK(soft_threshold(v, 1.0f)[1] == 0.0f);
}

TEST_CASE("dykstra: does not stop while only the increments move")
{
  // The first sweeps land on e1 and stay there while the corrections change.
  Vector v(3);
  v << 6.0, 1.0, 0.5;
  double const r1 = std::sqrt(2.0);
  std::array<Projector, 2> const projectors{
    [r1](Vector const &x) -> Vector { return project_l1_ball(x, r1); },
    [](Vector const &x) -> Vector { return project_l2_ball(x, 1.0); },
  };
  auto const result = dykstra(v, projectors);
  Vector const ref = oracle::kkt_project_l1_l2(v, r1);
  CHECK(ref[1] > 0.01);
  CHECK(result.converged);
  CHECK((result.x - ref).norm() < 1e-6);
  CHECK((project(SignalSet::eff_sparse(3, 2), v) - ref).norm() < 1e-12);

  auto const capped = dykstra(v, projectors, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}
