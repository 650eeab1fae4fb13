#include "j0rank/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "j0rank/error.hpp"

namespace j0rank::special {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} / (2k (2k-1)) for the Stirling series
constexpr double kStirling[] = {1.0 / 12,        -1.0 / 360,         1.0 / 1260,
                                -1.0 / 1680,     1.0 / 1188,         -691.0 / 360360,
                                1.0 / 156,       -3617.0 / 122400};

}  // namespace

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // reflection; only exp() of the result is meaningful
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  cplx shift = 0.0;
  while (std::abs(z) < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const cplx inv = 1.0 / z, inv2 = inv * inv;
  cplx series = 0.0, pw = inv;
  for (double c : kStirling) {
    series += c * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * kPi) + series - shift;
}

cplx gamma_tail(cplx a, cplx w) {
  if (w.real() <= 0) fail(ErrorKind::Numerical, "gamma_tail needs Re w > 0");
  const double aw = std::abs(w);
  if (aw <= std::abs(a) + 5.0 || aw < 3.0) {
    // w^{-a} Gamma(a) - e^{-w} sum_k w^k / (a)_{k+1}
    cplx sum = 0.0, term = 1.0 / a;
    for (int k = 1; k < 100000; ++k) {
      sum += term;
      term *= w / (a + static_cast<double>(k));
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp(log_gamma(a) - a * std::log(w)) - std::exp(-w) * sum;
  }
  // modified Lentz on Gamma(a,w) = e^{-w} w^a / (w + 1 - a - 1(1-a)/(w + 3 - a - ...))
  const double tiny = 1e-300;
  cplx b = w + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return std::exp(-w) * h;
  }
  fail(ErrorKind::Numerical, "incomplete gamma continued fraction did not converge");
}

double gamma_tail_bound(double re_a, double re_w) {
  // |y^{a-1}| = y^{Re a - 1} <= y^{max(Re a,1) - 1} on y >= 1
  const double a = std::max(re_a, 1.0);
  return boost::math::tgamma(a, re_w) * std::pow(re_w, -a);
}

double bessel_j1(double x) {
  if (x < 0) return -bessel_j1(-x);
  if (x <= 12.0) {
    const double h = x / 2, h2 = h * h;
    double term = h, sum = h;
    for (int k = 1; k < 200; ++k) {
      term *= -h2 / (static_cast<double>(k) * (k + 1));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum) && k > 3) break;
    }
    return sum;
  }
  // Hankel: J1 = sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)), chi = x - 3 pi / 4
  const double mu = 4.0, z8 = 8 * x;
  double p = 1.0, q = 0.0, term = 1.0, last = HUGE_VAL;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1;
    term *= (mu - odd * odd) / (k * z8);
    if (std::abs(term) > last) break;  // asymptotic series past its smallest term
    last = std::abs(term);
    if (k % 2 == 1) {
      q += (k % 4 == 1 ? 1 : -1) * term;
    } else {
      p += (k % 4 == 2 ? -1 : 1) * term;
    }
  }
  const double chi = x - 0.75 * kPi;
  return std::sqrt(2 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace j0rank::special
