#include "terafet/math_util.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "terafet/constants.hpp"

namespace terafet {

double softplus(double x) {
  if (x > 36.0) return x + std::exp(-x);
  if (x < -36.0) return std::exp(x);
  return std::log1p(std::exp(-std::fabs(x))) + (x > 0.0 ? x : 0.0);
}

double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Direct series sum_k z^k/k^2, valid for |z| <= 0.5 (and small slack).
static double dilog_series(double z) {
  double p = z;
  double sum = z;
  for (int k = 2; k < 400; ++k) {
    p *= z;
    const double t = p / (static_cast<double>(k) * k);
    sum += t;
    if (std::fabs(t) <= 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

double dilog_neg(double z) {
  if (z > 0.0 || z < -1.0) throw std::domain_error("dilog_neg: z outside [-1, 0]");
  if (z >= -0.5) return dilog_series(z);
  // Landen: Li2(z) = -Li2(z/(z-1)) - ln^2(1-z)/2, maps z in [-1,-0.5) to (0, 0.5].
  const double w = z / (z - 1.0);
  const double l = std::log1p(-z);
  return -dilog_series(w) - 0.5 * l * l;
}

double softplus_antiderivative(double x) {
  constexpr double pi2_6 = constants::pi * constants::pi / 6.0;
  if (x <= -36.0) return std::exp(x);
  if (x >= 36.0) return 0.5 * x * x + pi2_6 - std::exp(-x);
  if (x <= 0.0) return -dilog_neg(-std::exp(x));
  // Inversion Li2(-y) + Li2(-1/y) = -pi^2/6 - ln^2(y)/2 with y = e^x.
  return 0.5 * x * x + pi2_6 + dilog_neg(-std::exp(-x));
}

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::map<int, GaussLegendre> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.nodes.resize(order);
  gl.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n(x) = 0.
    double x = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  auto [pos, inserted] = cache.emplace(order, std::move(gl));
  return pos->second;
}

} // namespace terafet
