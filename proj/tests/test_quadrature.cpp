#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "skelpot/quadrature.hpp"

using namespace skelpot;

namespace {

Real factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Mean of prod x_k^{e_k} over the reference simplex:
// d! * prod e_k! / (sum e_k + d)!.
Real simplex_mean(const std::vector<int>& e) {
  const int d = static_cast<int>(e.size());
  Real num = factorial(d);
  int total = d;
  for (int k : e) {
    num *= factorial(k);
    total += k;
  }
  return num / factorial(total);
}

}  // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomialsOnUnitInterval) {
  for (int n = 1; n <= 8; ++n) {
    const QuadratureRule g = gauss_legendre(n);
    EXPECT_NEAR(g.weights.sum(), 1.0, 1e-14);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      Real sum = 0.0;
      for (int i = 0; i < n; ++i) sum += g.weights(i) * std::pow(g.points(i, 1), k);
      EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Quadrature, SimplexRulesAreExactUpToTheirOrder) {
  for (int dim = 1; dim <= 3; ++dim)
    for (int order = 0; order <= 8; ++order) {
      const QuadratureRule rule = simplex_rule(dim, order);
      EXPECT_NEAR(rule.weights.sum(), 1.0, 1e-14);
      EXPECT_TRUE((rule.points.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
      EXPECT_GE(rule.points.minCoeff(), 0.0);
      std::vector<int> e(dim, 0);
      // Enumerate all exponent vectors of total degree <= order.
      std::function<void(int, int)> visit = [&](int k, int left) {
        if (k == dim) {
          Real sum = 0.0;
          for (int p = 0; p < rule.size(); ++p) {
            Real term = rule.weights(p);
            for (int i = 0; i < dim; ++i) term *= std::pow(rule.points(p, i + 1), e[i]);
            sum += term;
          }
          EXPECT_NEAR(sum, simplex_mean(e), 1e-13) << "dim=" << dim << " order=" << order;
          return;
        }
        for (int a = 0; a <= left; ++a) {
          e[k] = a;
          visit(k + 1, left - a);
        }
        e[k] = 0;
      };
      visit(0, order);
    }
}

TEST(Quadrature, RejectsUnsupportedArguments) {
  EXPECT_THROW(simplex_rule(4, 2), DomainError);
  EXPECT_THROW(simplex_rule(2, -1), DomainError);
  EXPECT_THROW(gauss_legendre(0), DomainError);
}
