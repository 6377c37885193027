#pragma once

#include <vector>

namespace terafet {

// ln(1 + e^x), overflow-safe on both tails.
double softplus(double x);

// d/dx softplus = 1/(1 + e^-x).
double logistic(double x);

// S(x) = integral of softplus from -inf to x (= -Li2(-e^x)).
// Asymptotes: e^x for x -> -inf, x^2/2 + pi^2/6 for x -> +inf.
double softplus_antiderivative(double x);

// Dilogarithm Li2(z) for z in [-1, 0].
double dilog_neg(double z);

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence. Cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
double gl_integrate(F&& f, double a, double b, int order) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    acc += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return acc * half;
}

} // namespace terafet
