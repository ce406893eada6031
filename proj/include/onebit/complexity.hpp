#pragma once

#include "onebit/measure.hpp"
#include "onebit/signal_sets.hpp"
#include "onebit/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace onebit {

// Monte Carlo mean with its standard error (sample std / sqrt(samples)).
// Analytic results carry std_error = 0 and samples = 0.
struct McEstimate
{
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  // The per-sample values are lower bounds of the quantity (heuristic inner sup).
  bool lower_bound = false;
};
using WidthEstimate = McEstimate;

// Monte Carlo estimates are accumulated over fixed-size chunks, chunk c drawing
// from derive_seed(seed, c), so results do not depend on the worker count.
inline constexpr std::int64_t kMcChunk = 4096;

// E sup_{x ∈ K} <g, x>, g ~ N(0, I_n).
WidthEstimate gaussian_width(SignalSet const &set, std::int64_t samples, std::uint64_t seed, unsigned threads = 0);

struct LocalWidthOptions
{
  int restarts = 3;
  int iterations = 500;
};

// E sup { <g, h> : h ∈ (K - anchor) ∩ t B2 }. The inner sup is found by
// projected ascent, so every sample, and the mean, is a lower bound.
WidthEstimate local_width(SignalSet const &set,
                          Eigen::Ref<Vector const> const &anchor,
                          double t,
                          std::int64_t samples,
                          std::uint64_t seed,
                          LocalWidthOptions const &opts = {},
                          unsigned threads = 0);

// Inner sup of local_width for one direction g.
double local_support(SignalSet const &set,
                     Eigen::Ref<Vector const> const &anchor,
                     double t,
                     Eigen::Ref<Vector const> const &g,
                     LocalWidthOptions const &opts,
                     Rng &rng);

// width^2 / scale^2: plain effective dimension with scale = diameter, local
// effective dimension with scale = t.
double effective_dim(WidthEstimate const &width, double scale);

inline constexpr int kDefaultQuadPoints = 200;

// Statistical dimension of the l1 descent cone at an s-sparse point:
// inf_{tau >= 0} s (1 + tau^2) + (n - s) E[(|g| - tau)_+^2].
double conic_effdim_l1(Index n, Index s, int quad_points = kDefaultQuadPoints);

enum class LambdaMethod
{
  closed_form,
  quadrature,
  monte_carlo
};

std::string to_string(LambdaMethod method);
LambdaMethod lambda_method_from_string(std::string const &name);

struct McOptions
{
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// lambda_f = E[f(g) g].
McEstimate lambda_of(Quantizer const &q, LambdaMethod method, McOptions const &mc = {});

// E[max{0, 1 - s f(g) g}] by quadrature.
double expected_hinge_risk(Quantizer const &q, double s, int quad_points = kDefaultQuadPoints);

// argmin_{s ∈ [0,1]} E[max{0, 1 - s f(g) g}]; requires lambda_f > 0.
double mu_of(Quantizer const &q, int quad_points = kDefaultQuadPoints);

struct C2Report
{
  // Smallest binned mean of f(g) sign(g), bins by quantiles of |g|.
  double margin = 0.0;
  // Standard error of the bin attaining the margin.
  double std_error = 0.0;
  std::vector<double> bin_means;
  std::vector<double> bin_std_errors;
  bool passes = false;
};

inline constexpr int kDefaultC2Bins = 20;

C2Report check_c2(Quantizer const &q, std::int64_t samples, int bins, std::uint64_t seed);

struct ModelParams
{
  double lambda = 0.0;
  double mu = 0.0;
  double c2_margin = 0.0;
};

ModelParams model_params(Quantizer const &q, std::int64_t c2_samples = 100'000, std::uint64_t seed = 0);

} // namespace onebit
