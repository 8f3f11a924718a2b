#include "qpb/wigner.hpp"

#include <cmath>
#include <numbers>

#include "qpb/scalar.hpp"

namespace qpb {

namespace {

double factorial(int n) {
  static const auto table = [] {
    std::vector<double> t(64, 1.0);
    for (int i = 1; i < 64; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n >= 64) throw Error("factorial: argument out of range");
  return table[n];
}

}  // namespace

Quadrature gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[n - 1 - i] = x;
    q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

MatC wigner_d(int twoj, double beta) {
  if (twoj < 0) throw Error("wigner_d: negative spin");
  int d = twoj + 1;
  MatC m = MatC(d, d);
  double c = std::cos(beta / 2), s = std::sin(beta / 2);
  for (int a = 0; a < d; ++a) {    // row: 2m' = 2a - twoj
    for (int b = 0; b < d; ++b) {  // col: 2m = 2b - twoj
      int twomp = 2 * a - twoj, twom = 2 * b - twoj;
      int smin = std::max(0, (twom - twomp) / 2);
      int smax = std::min((twoj + twom) / 2, (twoj - twomp) / 2);
      double pref = std::sqrt(factorial((twoj + twomp) / 2) *
                              factorial((twoj - twomp) / 2) *
                              factorial((twoj + twom) / 2) *
                              factorial((twoj - twom) / 2));
      double acc = 0;
      for (int sdx = smin; sdx <= smax; ++sdx) {
        int dmm = (twomp - twom) / 2 + sdx;
        double den = factorial((twoj + twom) / 2 - sdx) * factorial(sdx) *
                     factorial(dmm) * factorial((twoj - twomp) / 2 - sdx);
        double term = std::pow(c, twoj + (twom - twomp) / 2 - 2 * sdx) *
                      std::pow(s, (twomp - twom) / 2 + 2 * sdx) / den;
        acc += (dmm % 2 ? -term : term);
      }
      m.at(a, b) = pref * acc;
    }
  }
  return m;
}

MatC wigner_big_d(int twoj, double alpha, double beta, double gamma) {
  int d = twoj + 1;
  MatC m = wigner_d(twoj, beta);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      double mp = (2 * a - twoj) / 2.0, mm = (2 * b - twoj) / 2.0;
      m.at(a, b) *= std::exp(Complex(0, -mp * alpha)) *
                    std::exp(Complex(0, -mm * gamma));
    }
  }
  return m;
}

void euler_from_su2(const MatC& g, double& alpha, double& beta, double& gamma) {
  if (g.rows() != 2 || g.cols() != 2) throw Error("euler_from_su2: need 2x2");
  // With ascending weight order the (0,0) entry carries exp(+i(alpha+gamma)/2).
  Complex u00 = g.at(0, 0), u01 = g.at(0, 1);
  beta = 2 * std::atan2(std::abs(u01), std::abs(u00));
  double sum2, dif2;
  if (std::abs(u00) > 1e-12)
    sum2 = std::arg(u00);
  else
    sum2 = 0;
  if (std::abs(u01) > 1e-12)
    dif2 = std::arg(u01);
  else
    dif2 = 0;
  if (std::abs(u00) <= 1e-12) sum2 = dif2;
  if (std::abs(u01) <= 1e-12) dif2 = sum2;
  alpha = sum2 + dif2;
  gamma = sum2 - dif2;
}

}  // namespace qpb
