#pragma once

#include <functional>
#include <span>
#include <vector>

namespace onebit::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int points);

// Integral of h over [a, b] with a Gauss-Legendre rule.
double integrate(std::function<double(double)> const &h, double a, double b, Rule const &rule);

// Upper end of the half-normal integration range. Mass beyond it is < 1e-22.
inline constexpr double kHalfNormalCutoff = 10.0;

// E[h(|g|)] for g ~ N(0,1): integral of h(x) * 2 phi(x) over [0, 10]. The range is
// split at every breakpoint inside it so kinks of h fall on panel boundaries.
double half_normal_expectation(std::function<double(double)> const &h,
                               int points,
                               std::span<double const> breakpoints = {});

double normal_pdf(double x);
double normal_cdf(double x);

// Minimizer of a unimodal function on [lo, hi] to absolute width tol.
double golden_section_min(std::function<double(double)> const &f, double lo, double hi, double tol);
double ternary_search_min(std::function<double(double)> const &f, double lo, double hi, double tol);

} // namespace onebit::quad
