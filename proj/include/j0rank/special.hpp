#pragma once

#include <complex>

namespace j0rank::special {

using cplx = std::complex<double>;

/// log Gamma(z) up to an integer multiple of 2 pi i; exp() of it is Gamma(z).
cplx log_gamma(cplx z);

/// G(a, w) = int_1^inf e^{-w y} y^{a-1} dy = w^{-a} Gamma(a, w), Re w > 0.
/// Series below |w| ~ |a|, continued fraction above; ~1e-12 relative.
cplx gamma_tail(cplx a, cplx w);

/// Upper bound for |G(a, w)| from the real integrand, valid for Re w > 0.
double gamma_tail_bound(double re_a, double re_w);

/// Bessel J_1: power series for x <= 12, Hankel asymptotics beyond.
double bessel_j1(double x);

}  // namespace j0rank::special
