#include "onebit/complexity.hpp"
#include "onebit/detail/overloaded.hpp"
#include "onebit/errors.hpp"
#include "onebit/parallel.hpp"
#include "onebit/projections.hpp"
#include "onebit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ranges>

namespace onebit {

using detail::Overloaded;

namespace {

struct Moments
{
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x)
  {
    ++count;
    double const delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(Moments const &o)
  {
    if (o.count == 0) { return; }
    auto const total = count + o.count;
    double const delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / static_cast<double>(total);
    count = total;
  }

  McEstimate estimate() const
  {
    McEstimate e;
    e.mean = mean;
    e.samples = count;
    e.std_error = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    return e;
  }
};

template <typename Draw>
McEstimate chunked_mean(std::int64_t samples, std::uint64_t seed, unsigned threads, Draw const &draw)
{
  auto const chunks = static_cast<std::size_t>((samples + kMcChunk - 1) / kMcChunk);
  std::vector<Moments> partial(chunks);
  parallel_for(chunks, threads ? threads : default_threads(), [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    auto const begin = static_cast<std::int64_t>(c) * kMcChunk;
    auto const end = std::min(samples, begin + kMcChunk);
    for (auto i = begin; i < end; ++i) { partial[c].add(draw(rng)); }
  });
  Moments total;
  for (auto const &p : partial) { total.merge(p); }
  return total.estimate();
}

Vector gaussian_vector(Index n, Rng &rng)
{
  Vector g(n);
  for (Index i = 0; i < n; ++i) { g[i] = rng.normal(); }
  return g;
}

// The set as a list of simple projectors whose intersection it is.
std::vector<Projector> component_projectors(SignalSet const &set)
{
  if (auto const *k = std::get_if<EffSparse>(&set.variant())) {
    double const r1 = set.scale() * k->l1();
    double const r2 = set.scale();
    return {[r1](Vector const &v) -> Vector { return project_l1_ball(v, r1); },
            [r2](Vector const &v) -> Vector { return project_l2_ball(v, r2); }};
  }
  return {[set](Vector const &v) { return project(set, v); }};
}

} // namespace

WidthEstimate gaussian_width(SignalSet const &set, std::int64_t samples, std::uint64_t seed, unsigned threads)
{
  if (samples < 2) { throw InvalidArgument("gaussian_width: need at least 2 samples"); }
  Index const n = set.dim();
  return chunked_mean(samples, seed, threads, [&](Rng &rng) { return support(set, gaussian_vector(n, rng)); });
}

double local_support(SignalSet const &set,
                     Eigen::Ref<Vector const> const &anchor,
                     double t,
                     Eigen::Ref<Vector const> const &g,
                     LocalWidthOptions const &opts,
                     Rng &rng)
{
  double const gnorm = g.norm();
  if (gnorm == 0.0) { return 0.0; }
  Vector const center = anchor;
  Vector const direction = g / gnorm;

  auto projectors = component_projectors(set);
  projectors.push_back([&center, t](Vector const &v) -> Vector { return center + project_l2_ball(v - center, t); });
  auto const onto_feasible = [&](Vector const &v) {
    return dykstra(v, projectors, 2000, 1e-10 * std::max(1.0, t)).x;
  };

  std::vector<Vector> starts{center, center + t * direction};
  for (int r = 2; r < opts.restarts; ++r) { starts.push_back(center + t * gaussian_vector(g.size(), rng).normalized()); }
  starts.resize(static_cast<std::size_t>(std::max(opts.restarts, 0)));

  double best = 0.0; // h = 0 is always feasible
  for (auto const &start : starts) {
    Vector x = onto_feasible(start);
    for (int it = 0; it < opts.iterations; ++it) {
      Vector next = onto_feasible(x + 2.0 * t * direction);
      double const moved = (next - x).norm();
      x = std::move(next);
      if (moved < 1e-12 * (1.0 + t)) { break; }
    }
    best = std::max(best, g.dot(x - center));
  }
  return best;
}

WidthEstimate local_width(SignalSet const &set,
                          Eigen::Ref<Vector const> const &anchor,
                          double t,
                          std::int64_t samples,
                          std::uint64_t seed,
                          LocalWidthOptions const &opts,
                          unsigned threads)
{
  if (samples < 2) { throw InvalidArgument("local_width: need at least 2 samples"); }
  if (!(t > 0.0)) { throw InvalidArgument("local_width: t must be positive"); }
  if (opts.restarts < 1 || opts.iterations < 1) { throw InvalidArgument("local_width: need restarts, iterations >= 1"); }
  if (anchor.size() != set.dim()) { throw InvalidArgument("local_width: anchor dimension mismatch"); }
  if (membership_residual(set, anchor) > 1e-9) { throw InvalidArgument("local_width: anchor is not in the set"); }
  Index const n = set.dim();
  Vector const center = anchor;
  auto est = chunked_mean(samples, seed, threads, [&](Rng &rng) {
    Vector const g = gaussian_vector(n, rng);
    return local_support(set, center, t, g, opts, rng);
  });
  est.lower_bound = true;
  return est;
}

double effective_dim(WidthEstimate const &width, double scale)
{
  if (!(scale > 0.0)) { throw InvalidArgument("effective_dim: scale must be positive"); }
  return width.mean * width.mean / (scale * scale);
}

double conic_effdim_l1(Index n, Index s, int quad_points)
{
  if (n < 1 || s < 1 || s > n) { throw InvalidArgument("conic_effdim_l1: need 1 <= s <= n"); }
  auto const off_support = static_cast<double>(n - s);
  auto const objective = [&](double tau) {
    double const kink[] = {tau};
    double const tail = off_support > 0.0 ? quad::half_normal_expectation(
                                              [tau](double x) {
                                                double const excess = std::max(0.0, x - tau);
                                                return excess * excess;
                                              },
                                              quad_points,
                                              kink)
                                          : 0.0;
    return static_cast<double>(s) * (1.0 + tau * tau) + off_support * tail;
  };
  double const tau = quad::ternary_search_min(objective, 0.0, quad::kHalfNormalCutoff, 1e-10);
  return std::min(objective(tau), objective(0.0));
}

std::string to_string(LambdaMethod method)
{
  switch (method) {
  case LambdaMethod::closed_form: return "closed_form";
  case LambdaMethod::quadrature: return "quadrature";
  case LambdaMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

LambdaMethod lambda_method_from_string(std::string const &name)
{
  if (name == "closed_form") { return LambdaMethod::closed_form; }
  if (name == "quadrature") { return LambdaMethod::quadrature; }
  if (name == "monte_carlo") { return LambdaMethod::monte_carlo; }
  throw InvalidArgument("unknown lambda method '" + name + "'");
}

namespace {

// Breakpoints that resolve the steep region of Phi(x / sigma) near 0.
std::vector<double> sigma_breakpoints(double sigma)
{
  return {0.5 * sigma, sigma, 3.0 * sigma, 8.0 * sigma};
}

double lambda_quadrature(Quantizer const &q, int points)
{
  double const mean_abs = quad::half_normal_expectation([](double x) { return x; }, points);
  return std::visit(Overloaded{
                      [&](SignQuantizer const &) { return mean_abs; },
                      [&](BitFlip const &b) { return (2.0 * b.p - 1.0) * mean_abs; },
                      [&](AdditiveGaussian const &a) {
                        if (a.sigma == 0.0) { return mean_abs; }
                        auto const breaks = sigma_breakpoints(a.sigma);
                        return quad::half_normal_expectation(
                          [sigma = a.sigma](double x) { return x * std::erf(x / (std::numbers::sqrt2 * sigma)); },
                          points,
                          breaks);
                      },
                      [&](CustomQuantizer const &) -> double {
                        throw Unsupported("lambda_of: quadrature needs a known quantizer; use monte_carlo");
                      },
                    },
                    q.variant());
}

} // namespace

McEstimate lambda_of(Quantizer const &q, LambdaMethod method, McOptions const &mc)
{
  McEstimate out;
  switch (method) {
  case LambdaMethod::closed_form: {
    double const base = std::sqrt(2.0 / std::numbers::pi);
    out.mean = std::visit(Overloaded{
                            [&](SignQuantizer const &) { return base; },
                            [&](BitFlip const &b) { return (2.0 * b.p - 1.0) * base; },
                            [&](AdditiveGaussian const &a) -> double {
                              if (a.sigma == 0.0) { return base; }
                              throw Unsupported("lambda_of: additive_gaussian has no closed form here; use quadrature");
                            },
                            [&](CustomQuantizer const &) -> double {
                              throw Unsupported("lambda_of: custom quantizers support monte_carlo only");
                            },
                          },
                          q.variant());
    return out;
  }
  case LambdaMethod::quadrature: out.mean = lambda_quadrature(q, kDefaultQuadPoints); return out;
  case LambdaMethod::monte_carlo:
    if (mc.samples < 2) { throw InvalidArgument("lambda_of: need at least 2 samples"); }
    return chunked_mean(mc.samples, mc.seed, mc.threads, [&q](Rng &rng) {
      double const g = rng.normal();
      return quantize(q, g, rng) * g;
    });
  }
  throw InvalidArgument("lambda_of: unknown method");
}

double expected_hinge_risk(Quantizer const &q, double s, int quad_points)
{
  if (s == 0.0) { return 1.0; }
  std::vector<double> breaks{1.0 / std::abs(s)};
  auto const hinge = [](double v) { return std::max(0.0, 1.0 - v); };
  return std::visit(Overloaded{
                      [&](SignQuantizer const &) {
                        return quad::half_normal_expectation([&](double x) { return hinge(s * x); }, quad_points, breaks);
                      },
                      [&](BitFlip const &b) {
                        return quad::half_normal_expectation(
                          [&](double x) { return b.p * hinge(s * x) + (1.0 - b.p) * hinge(-s * x); }, quad_points, breaks);
                      },
                      [&](AdditiveGaussian const &a) {
                        if (a.sigma > 0.0) {
                          auto const extra = sigma_breakpoints(a.sigma);
                          breaks.insert(breaks.end(), extra.begin(), extra.end());
                        }
                        // Given |g| = x, the label keeps the sign of g with probability Phi(x / sigma).
                        return quad::half_normal_expectation(
                          [&](double x) {
                            double const agree = a.sigma > 0.0 ? quad::normal_cdf(x / a.sigma) : 1.0;
                            return agree * hinge(s * x) + (1.0 - agree) * hinge(-s * x);
                          },
                          quad_points,
                          breaks);
                      },
                      [&](CustomQuantizer const &) -> double {
                        throw Unsupported("expected_hinge_risk: not available for custom quantizers");
                      },
                    },
                    q.variant());
}

double mu_of(Quantizer const &q, int quad_points)
{
  if (quad_points < 2) { throw InvalidArgument("mu_of: need at least 2 quadrature points"); }
  double const lambda = lambda_quadrature(q, quad_points);
  if (!(lambda > 0.0)) { throw InvalidArgument("mu_of: requires lambda_f > 0"); }
  double const mu = quad::golden_section_min([&](double s) { return expected_hinge_risk(q, s, quad_points); },
                                             0.0, 1.0, 1e-10);
  if (!(mu > 0.0)) { throw NumericalFailure("mu_of: minimizer collapsed to 0 despite lambda > 0", lambda); }
  return mu;
}

C2Report check_c2(Quantizer const &q, std::int64_t samples, int bins, std::uint64_t seed)
{
  if (bins < 1) { throw InvalidArgument("check_c2: need at least one bin"); }
  if (samples < 2 * bins) { throw InvalidArgument("check_c2: need at least two samples per bin"); }

  struct Draw
  {
    double magnitude;
    double agreement;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(samples));
  auto const chunks = static_cast<std::size_t>((samples + kMcChunk - 1) / kMcChunk);
  for (std::size_t c = 0; c < chunks; ++c) {
    Rng rng(derive_seed(seed, c));
    auto const begin = static_cast<std::int64_t>(c) * kMcChunk;
    auto const end = std::min(samples, begin + kMcChunk);
    for (auto i = begin; i < end; ++i) {
      double const g = rng.normal();
      draws[i] = {std::abs(g), static_cast<double>(quantize(q, g, rng) * sign_of(g))};
    }
  }
  std::sort(draws.begin(), draws.end(), [](Draw const &a, Draw const &b) { return a.magnitude < b.magnitude; });

  C2Report report;
  report.margin = std::numeric_limits<double>::infinity();
  for (int b = 0; b < bins; ++b) {
    auto const begin = static_cast<std::size_t>(samples * b / bins);
    auto const end = static_cast<std::size_t>(samples * (b + 1) / bins);
    Moments m;
    for (auto i = begin; i < end; ++i) { m.add(draws[i].agreement); }
    auto const est = m.estimate();
    report.bin_means.push_back(est.mean);
    report.bin_std_errors.push_back(est.std_error);
    if (est.mean < report.margin) {
      report.margin = est.mean;
      report.std_error = est.std_error;
    }
  }
  report.passes = std::ranges::all_of(std::views::iota(0, bins), [&](int b) {
    return report.bin_means[b] >= -3.0 * report.bin_std_errors[b];
  });
  return report;
}

ModelParams model_params(Quantizer const &q, std::int64_t c2_samples, std::uint64_t seed)
{
  ModelParams p;
  p.lambda = lambda_quadrature(q, kDefaultQuadPoints);
  p.mu = mu_of(q);
  p.c2_margin = check_c2(q, c2_samples, kDefaultC2Bins, seed).margin;
  return p;
}

} // namespace onebit
