#include "onebit/signal_sets.hpp"
#include "onebit/detail/overloaded.hpp"
#include "onebit/errors.hpp"
#include "onebit/projections.hpp"
#include "onebit/quadrature.hpp"
#include "onebit/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <numeric>

namespace onebit {

namespace {

using detail::Overloaded;

void check_dim(SignalSet const &set, Index len, char const *op)
{
  if (set.dim() != len) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch (set has n=" + std::to_string(set.dim()) +
                          ", vector has " + std::to_string(len) + ")");
  }
}

double eff_sparse_residual(EffSparse const &k, Vector const &x)
{
  return std::max({0.0, x.lpNorm<1>() - k.l1(), x.norm() - 1.0});
}

// The projection is x(l) = soft(v, l) / max(1, ||soft(v, l)||) for the
// smallest l >= 0 with ||x(l)||_1 <= r1; ||x(l)||_1 is non-increasing in l.
// Between consecutive sorted magnitudes the support is fixed, so ||x(l)||_1
// only depends on the support sums S1, S2 and its size.
Vector project_eff_sparse(EffSparse const &k, Vector const &v)
{
  double const r1 = k.l1();
  Vector ball = project_l2_ball(v, 1.0);
  if (ball.lpNorm<1>() <= r1) { return ball; }

  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) { mag[static_cast<std::size_t>(i)] = std::abs(v[i]); }
  std::sort(mag.begin(), mag.end(), std::greater<>());
  mag.push_back(0.0);

  double s1 = 0.0, s2 = 0.0, count = 0.0;
  auto const l1_at = [&](double l) {
    double const one = s1 - count * l;
    double const two = std::sqrt(std::max(0.0, s2 - 2.0 * l * s1 + count * l * l));
    return two > 1.0 ? one / two : one;
  };
  double lambda = 0.0;
  for (std::size_t j = 0; j + 1 < mag.size(); ++j) {
    s1 += mag[j];
    s2 += mag[j] * mag[j];
    count += 1.0;
    double lo = mag[j + 1], hi = mag[j];
    if (l1_at(lo) < r1) { continue; }
    for (int it = 0; it < 200 && lo < hi; ++it) {
      double const mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) { break; }
      if (l1_at(mid) > r1) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    lambda = hi;
    break;
  }
  return project_l2_ball(soft_threshold(v, lambda), 1.0);
}

// min over lambda >= 0 of lambda * r1 + ||soft_threshold(g, lambda)||_2.
double eff_sparse_support(EffSparse const &k, Vector const &g)
{
  double const r1 = k.l1();
  double const gmax = g.lpNorm<Eigen::Infinity>();
  if (gmax == 0.0) { return 0.0; }
  auto const dual = [&](double lambda) { return lambda * r1 + soft_threshold(g, lambda).norm(); };
  double const lambda = quad::ternary_search_min(dual, 0.0, gmax, 1e-12 * std::max(1.0, gmax));
  return std::min({dual(lambda), dual(0.0), dual(gmax)});
}

Vector base_project(SignalSet::Variant const &variant, Vector const &v)
{
  return std::visit(Overloaded{
                      [&](L2Ball const &b) -> Vector { return project_l2_ball(v, b.radius); },
                      [&](ScaledL1Ball const &b) -> Vector { return project_l1_ball(v, b.radius); },
                      [&](EffSparse const &k) -> Vector { return project_eff_sparse(k, v); },
                      [&](Subspace const &e) -> Vector {
                        Vector const inside = e.basis.transpose() * (e.basis * v);
                        return project_l2_ball(inside, 1.0);
                      },
                      [&](Polytope const &) -> Vector {
                        throw Unsupported("project: projection onto a general polytope is not supported");
                      },
                    },
                    variant);
}

double base_support(SignalSet::Variant const &variant, Vector const &g)
{
  return std::visit(Overloaded{
                      [&](L2Ball const &b) { return b.radius * g.norm(); },
                      [&](ScaledL1Ball const &b) { return b.radius * g.lpNorm<Eigen::Infinity>(); },
                      [&](EffSparse const &k) { return eff_sparse_support(k, g); },
                      [&](Subspace const &e) { return (e.basis * g).norm(); },
                      [&](Polytope const &p) { return (p.vertices * g).maxCoeff(); },
                    },
                    variant);
}

double base_residual(SignalSet::Variant const &variant, Vector const &x)
{
  return std::visit(Overloaded{
                      [&](L2Ball const &b) { return std::max(0.0, x.norm() - b.radius); },
                      [&](ScaledL1Ball const &b) { return std::max(0.0, x.lpNorm<1>() - b.radius); },
                      [&](EffSparse const &k) { return eff_sparse_residual(k, x); },
                      [&](Subspace const &e) {
                        Vector const coords = e.basis * x;
                        double const off = (x - e.basis.transpose() * coords).norm();
                        return std::max(off, std::max(0.0, x.norm() - 1.0));
                      },
                      [&](Polytope const &) -> double {
                        throw Unsupported("membership_residual: not available for polytopes");
                      },
                    },
                    variant);
}

} // namespace

double EffSparse::l1() const { return l1_radius ? *l1_radius : std::sqrt(static_cast<double>(s)); }

SignalSet::SignalSet(Variant variant, Index ambient_dim)
  : variant_(std::move(variant))
  , n_(ambient_dim)
{
  if (n_ < 1) { throw InvalidArgument("SignalSet: ambient dimension must be positive"); }
  std::visit(Overloaded{
               [](L2Ball const &b) {
                 if (!(b.radius > 0.0)) { throw InvalidArgument("l2_ball: radius must be positive"); }
               },
               [](ScaledL1Ball const &b) {
                 if (!(b.radius > 0.0)) { throw InvalidArgument("scaled_l1_ball: radius must be positive"); }
               },
               [this](EffSparse const &k) {
                 if (k.s < 1 || k.s > n_) { throw InvalidArgument("eff_sparse: need 1 <= s <= n"); }
                 if (k.l1_radius && !(*k.l1_radius > 0.0)) {
                   throw InvalidArgument("eff_sparse: l1_radius must be positive");
                 }
               },
               [this](Subspace const &e) {
                 if (e.basis.cols() != n_ || e.basis.rows() < 1) {
                   throw InvalidArgument("subspace: basis must be d x n with d >= 1");
                 }
                 Eigen::MatrixXd const gram = e.basis * e.basis.transpose();
                 if (!gram.isIdentity(1e-8)) { throw InvalidArgument("subspace: basis rows must be orthonormal"); }
               },
               [this](Polytope const &p) {
                 if (p.vertices.cols() != n_ || p.vertices.rows() < 1) {
                   throw InvalidArgument("polytope: vertices must be k x n with k >= 1");
                 }
                 bool has_origin = false;
                 for (Index i = 0; i < p.vertices.rows(); ++i) {
                   if (p.vertices.row(i).lpNorm<Eigen::Infinity>() <= 1e-12) { has_origin = true; }
                 }
                 if (!has_origin) { throw InvalidArgument("polytope: the origin must be listed as a vertex"); }
               },
             },
             variant_);
}

SignalSet SignalSet::l2_ball(Index n, double radius) { return SignalSet(L2Ball{radius}, n); }

SignalSet SignalSet::scaled_l1_ball(Index n, double radius) { return SignalSet(ScaledL1Ball{radius}, n); }

SignalSet SignalSet::eff_sparse(Index n, int s, std::optional<double> l1_radius)
{
  return SignalSet(EffSparse{s, l1_radius}, n);
}

SignalSet SignalSet::subspace(Matrix basis)
{
  Index const n = basis.cols();
  return SignalSet(Subspace{std::move(basis)}, n);
}

SignalSet SignalSet::polytope(Matrix vertices)
{
  Index const n = vertices.cols();
  return SignalSet(Polytope{std::move(vertices)}, n);
}

std::string SignalSet::name() const
{
  static constexpr char const *names[] = {"l2_ball", "scaled_l1_ball", "eff_sparse", "subspace", "polytope"};
  return names[variant_.index()];
}

SignalSet SignalSet::scaled(double mu) const
{
  if (!(mu > 0.0) || !std::isfinite(mu)) { throw InvalidArgument("scaled: mu must be positive and finite"); }
  SignalSet copy = *this;
  copy.scale_ *= mu;
  return copy;
}

Vector project(SignalSet const &set, Eigen::Ref<Vector const> const &v)
{
  check_dim(set, v.size(), "project");
  if (set.scale() == 1.0) { return base_project(set.variant(), v); }
  return set.scale() * base_project(set.variant(), v / set.scale());
}

double support(SignalSet const &set, Eigen::Ref<Vector const> const &g)
{
  check_dim(set, g.size(), "support");
  return set.scale() * base_support(set.variant(), g);
}

double membership_residual(SignalSet const &set, Eigen::Ref<Vector const> const &x)
{
  check_dim(set, x.size(), "membership_residual");
  if (set.scale() == 1.0) { return base_residual(set.variant(), x); }
  return set.scale() * base_residual(set.variant(), x / set.scale());
}

DykstraResult dykstra(Vector const &v,
                      std::span<Projector const> projectors,
                      int max_iters,
                      double tol,
                      std::function<double(Vector const &)> const &residual,
                      double residual_tol)
{
  DykstraResult result;
  result.x = v;
  std::vector<Vector> increments(projectors.size(), Vector::Zero(v.size()));
  for (int iter = 1; iter <= max_iters; ++iter) {
    Vector const previous = result.x;
    // x can sit still for a sweep while the increments are still moving, so
    // the stopping test looks at both.
    double increment_change = 0.0;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      Vector const shifted = result.x + increments[i];
      result.x = projectors[i](shifted);
      Vector next = shifted - result.x;
      increment_change = std::max(increment_change, (next - increments[i]).norm());
      increments[i] = std::move(next);
    }
    result.iterations = iter;
    result.movement = std::max((result.x - previous).norm(), increment_change);
    if (!result.x.allFinite()) { throw NumericalFailure("dykstra: non-finite iterate", result.movement); }
    if (result.movement < tol && (!residual || residual(result.x) <= residual_tol)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Vector sample_signal(SignalKind const &kind, Index n, std::uint64_t seed)
{
  if (n < 1) { throw InvalidArgument("sample_signal: n must be positive"); }
  Rng rng(seed);
  auto const random_subset = [&](int count) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (int i = 0; i < count; ++i) {
      auto const j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[i], perm[j]);
    }
    perm.resize(count);
    return perm;
  };

  Vector x = std::visit(
    Overloaded{
      [&](ExactSparse const &k) -> Vector {
        if (k.s < 1 || k.s > n) { throw InvalidArgument("sample_signal: need 1 <= s <= n"); }
        Vector out = Vector::Zero(n);
        for (Index idx : random_subset(k.s)) { out[idx] = rng.normal(); }
        return out;
      },
      [&](Compressible const &k) -> Vector {
        if (k.s < 1 || k.s > n) { throw InvalidArgument("sample_signal: need 1 <= s <= n"); }
        if (!(k.decay > 0.0)) { throw InvalidArgument("sample_signal: decay must be positive"); }
        Vector out = Vector::Zero(n);
        auto const order = random_subset(static_cast<int>(n));
        for (Index i = 0; i < n; ++i) {
          double const rank = static_cast<double>(i + 1);
          double const mag = rank <= k.s ? 1.0 : std::pow(rank / k.s, -k.decay);
          out[order[i]] = rng.bernoulli(0.5) ? mag : -mag;
        }
        return out;
      },
      [&](SubspaceSignal const &e) -> Vector {
        if (e.basis.cols() != n) { throw InvalidArgument("sample_signal: basis has wrong ambient dimension"); }
        Vector coords(e.basis.rows());
        for (Index i = 0; i < coords.size(); ++i) { coords[i] = rng.normal(); }
        return e.basis.transpose() * coords;
      },
      [&](PolytopeMix const &p) -> Vector {
        if (p.vertices.cols() != n) { throw InvalidArgument("sample_signal: vertices have wrong ambient dimension"); }
        Vector weights(p.vertices.rows());
        for (Index i = 0; i < weights.size(); ++i) { weights[i] = -std::log(1.0 - rng.uniform()); }
        weights /= weights.sum();
        return p.vertices.transpose() * weights;
      },
    },
    kind);

  double const norm = x.norm();
  if (!(norm > 0.0)) { throw NumericalFailure("sample_signal: drew the zero vector", norm); }
  return x / norm;
}

} // namespace onebit
