#include "onebit/quadrature.hpp"
#include "onebit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace onebit::quad {

Rule gauss_legendre(int points)
{
  if (points < 1) { throw InvalidArgument("gauss_legendre: need at least one point"); }
  Rule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  int const n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double const p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double const pn = n == 1 ? x : p1;
      double const pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      double const dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) { break; }
    }
    double const w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double integrate(std::function<double(double)> const &h, double a, double b, Rule const &rule)
{
  double const half = 0.5 * (b - a);
  double const mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * h(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double half_normal_expectation(std::function<double(double)> const &h, int points, std::span<double const> breakpoints)
{
  std::vector<double> cuts{0.0};
  for (double b : breakpoints) {
    if (b > 0.0 && b < kHalfNormalCutoff) { cuts.push_back(b); }
  }
  cuts.push_back(kHalfNormalCutoff);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Rule const rule = gauss_legendre(points);
  auto const weighted = [&h](double x) { return 2.0 * normal_pdf(x) * h(x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(weighted, cuts[i], cuts[i + 1], rule);
  }
  return total;
}

double golden_section_min(std::function<double(double)> const &f, double lo, double hi, double tol)
{
  double const invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  // The bracket endpoints are candidates too: the minimum may sit on the boundary.
  double best = 0.5 * (a + b);
  double fbest = f(best);
  for (double x : {lo, hi}) {
    double const fx = f(x);
    if (fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  return best;
}

double ternary_search_min(std::function<double(double)> const &f, double lo, double hi, double tol)
{
  double a = lo, b = hi;
  while (b - a > tol) {
    double const m1 = a + (b - a) / 3.0;
    double const m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return 0.5 * (a + b);
}

} // namespace onebit::quad
