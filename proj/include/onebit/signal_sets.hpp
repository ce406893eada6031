#pragma once

#include "onebit/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace onebit {

struct L2Ball
{
  double radius = 1.0;
};

struct ScaledL1Ball
{
  double radius = 1.0;
};

// sqrt(s) B1 ∩ B2. The l1 radius defaults to sqrt(s) but can be pinned to any
// positive value, e.g. ||x0||_1 for a tuned constraint.
struct EffSparse
{
  int s = 1;
  std::optional<double> l1_radius;

  double l1() const;
};

// E ∩ B2 for the subspace E spanned by the orthonormal rows of `basis` (d x n).
struct Subspace
{
  Matrix basis;
};

// Convex hull of the rows of `vertices`; the origin must be one of them.
struct Polytope
{
  Matrix vertices;
};

// A bounded convex set K ⊂ R^n containing 0, optionally dilated: the set
// represented is scale * K_base.
class SignalSet
{
public:
  using Variant = std::variant<L2Ball, ScaledL1Ball, EffSparse, Subspace, Polytope>;

  SignalSet(Variant variant, Index ambient_dim);

  static SignalSet l2_ball(Index n, double radius = 1.0);
  static SignalSet scaled_l1_ball(Index n, double radius);
  static SignalSet eff_sparse(Index n, int s, std::optional<double> l1_radius = std::nullopt);
  static SignalSet subspace(Matrix basis);
  static SignalSet polytope(Matrix vertices);

  Variant const &variant() const { return variant_; }
  Index dim() const { return n_; }
  double scale() const { return scale_; }
  std::string name() const;

  // mu * K.
  SignalSet scaled(double mu) const;

private:
  Variant variant_;
  Index n_;
  double scale_ = 1.0;
};

// Euclidean projection onto the set. Throws Unsupported for polytopes.
Vector project(SignalSet const &set, Eigen::Ref<Vector const> const &v);

// sup_{x ∈ K} <g, x>.
double support(SignalSet const &set, Eigen::Ref<Vector const> const &g);

// Distance-like violation of membership; 0 for points in the set.
double membership_residual(SignalSet const &set, Eigen::Ref<Vector const> const &x);

inline constexpr int kDykstraMaxIters = 10'000;
inline constexpr double kDykstraTol = 1e-10;
inline constexpr double kMembershipTol = 1e-9;

using Projector = std::function<Vector(Vector const &)>;

struct DykstraResult
{
  Vector x;
  int iterations = 0;
  double movement = 0.0;
  bool converged = false;
};

// Dykstra's alternating projections onto the intersection of the given convex
// sets. Stops once the cycle-to-cycle movement drops below `tol` and, when a
// residual function is supplied, the residual is below `residual_tol`.
DykstraResult dykstra(Vector const &v,
                      std::span<Projector const> projectors,
                      int max_iters = kDykstraMaxIters,
                      double tol = kDykstraTol,
                      std::function<double(Vector const &)> const &residual = {},
                      double residual_tol = kMembershipTol);

// Ground-truth signal generators.
struct ExactSparse
{
  int s = 1;
};
struct Compressible
{
  int s = 1;
  double decay = 1.0;
};
struct SubspaceSignal
{
  Matrix basis;
};
struct PolytopeMix
{
  Matrix vertices;
};
using SignalKind = std::variant<ExactSparse, Compressible, SubspaceSignal, PolytopeMix>;

// Unit-norm random signal. exact_sparse: s random coordinates with N(0,1)
// values. compressible: s equal leading magnitudes followed by a (i/s)^-decay
// tail, random signs and permutation. subspace: normalized Gaussian in span.
// polytope_mix: normalized Dirichlet(1) combination of the vertices.
Vector sample_signal(SignalKind const &kind, Index n, std::uint64_t seed);

} // namespace onebit
