#include "j0rank/explicit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "json.hpp"

#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"

namespace j0rank::weil {

namespace {

constexpr double kPi = std::numbers::pi;
using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

double integrate(const std::function<double(double)>& g, double a, double b, double tol, double* err = nullptr) {
  if (!(b > a)) return 0.0;
  double e = 0;
  const double v = Quad::integrate(g, a, b, 18, tol, &e);
  if (err) *err = e;
  return v;
}

}  // namespace

TestFunction::TestFunction(std::shared_ptr<const Base> base, double scale, TestFlags flags)
    : base_(std::move(base)), scale_(scale), flags_(flags) {
  if (!(scale > 0)) fail(ErrorKind::Usage, "test function scale must be positive");
}

double TestFunction::operator()(double x) const {
  x = std::abs(x) / scale_;
  if (x >= base_->support) return 0.0;
  return base_->value(x);
}

double TestFunction::deficit(double x) const {
  x = std::abs(x) / scale_;
  if (x >= base_->support) return 1.0;
  return base_->deficit ? base_->deficit(x) : 1.0 - base_->value(x);
}

cplx TestFunction::transform(cplx s) const { return scale_ * base_->transform(scale_ * s); }

double TestFunction::envelope_coef() const noexcept {
  return base_->envelope_coef * std::pow(scale_, 1 - base_->envelope_power);
}

double TestFunction::line_envelope(double gamma) const {
  const double at_zero = std::abs(transform(0.0));
  gamma = std::abs(gamma);
  if (gamma == 0) return at_zero;
  return std::min(at_zero, envelope_coef() / std::pow(gamma, base_->envelope_power));
}

TestFunction fejer(double lambda) {
  auto base = std::make_shared<TestFunction::Base>();
  base->id = "fejer";
  base->support = 1.0;
  base->value = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
  base->deficit = [](double x) { return std::min(1.0, std::abs(x)); };
  base->transform = [](cplx s) -> cplx {
    if (std::abs(s) < 1e-3) {
      const cplx s2 = s * s;
      return 1.0 + s2 / 12.0 + s2 * s2 / 360.0 + s2 * s2 * s2 / 20160.0;
    }
    return 2.0 * (std::cosh(s) - 1.0) / (s * s);
  };
  base->envelope_coef = 4.0;
  base->envelope_power = 2.0;
  TestFlags flags;
  flags.line_positivity = true;  // 4 sin^2(gamma/2) / gamma^2
  return TestFunction(base, lambda, flags);
}

TestFunction pp_candidate(const BumpParams& params) {
  const double B = params.support, k = params.sharpness;
  if (!(B >= 2.0) || !(k > 0) || !std::isfinite(B) || !std::isfinite(k)) {
    fail(ErrorKind::Usage, "invalid bump parameters: need support >= 2 and sharpness > 0");
  }
  const double half = B / 2, c = 4 / (B * B);
  auto bump = [half, c, k](double x) {
    if (std::abs(x) >= half) return 0.0;
    return std::exp(-k / (1 - c * x * x));
  };
  const double norm = 2 * integrate([&](double x) { return bump(x) * bump(x); }, 0, half, 1e-14);
  if (!(norm > 0) || !std::isfinite(norm)) fail(ErrorKind::Usage, "invalid bump parameters: F(0) vanishes");

  auto base = std::make_shared<TestFunction::Base>();
  base->id = "pp";
  base->support = B;
  base->value = [bump, half, norm](double x) {
    x = std::abs(x);
    const double lo = x - half, hi = half;
    if (lo >= hi) return 0.0;
    return integrate([&](double y) { return bump(y) * bump(x - y); }, lo, hi, 1e-13) / norm;
  };
  base->transform = [bump, half, norm](cplx s) -> cplx {
    // bump is even: int b(x) e^{sx} = 2 int_0 b(x) cosh(sx)
    auto part = [&](bool imag) {
      return 2 * integrate(
                     [&](double x) {
                       const cplx v = bump(x) * std::cosh(s * x);
                       return imag ? v.imag() : v.real();
                     },
                     0, half, 1e-13);
    };
    const cplx b{part(false), part(true)};
    return b * b / norm;
  };
  // |bhat(i gamma)| <= int |b''| / gamma^2, squared for the convolution
  auto second = [half, c, k](double x) {
    if (std::abs(x) >= half) return 0.0;
    const double u = 1 - c * x * x;
    const double v1 = -2 * k * c * x / (u * u);
    const double v2 = -2 * k * c * (1 + 3 * c * x * x) / (u * u * u);
    return std::abs((v2 + v1 * v1) * std::exp(-k / u));
  };
  const double l1 = 2 * integrate(second, 0, half, 1e-12);
  base->envelope_coef = l1 * l1 / norm;
  base->envelope_power = 4.0;
  TestFlags flags;
  flags.line_positivity = true;  // bhat(i gamma)^2 with bhat real
  return TestFunction(base, params.scale, flags);
}

StripCheck verify_strip_positivity(TestFunction& F, double sigma_max, int n_sigma, int n_t, double t_max) {
  if (!(sigma_max >= 0 && sigma_max < 1)) fail(ErrorKind::Usage, "strip check needs 0 <= sigma_max < 1");
  StripCheck out;
  out.worst = HUGE_VAL;
  for (int i = 0; i < n_sigma; ++i) {
    const double sigma = n_sigma == 1 ? 0.0 : sigma_max * i / (n_sigma - 1);
    for (int j = 0; j < n_t; ++j) {
      const double t = n_t == 1 ? 0.0 : t_max * j / (n_t - 1);
      const double re = F.transform({sigma, t}).real();
      ++out.points;
      if (re < out.worst) {
        out.worst = re;
        out.worst_point = {sigma, t};
      }
    }
  }
  out.passed = out.worst >= -1e-9;
  F.flags().strip_positivity = out.passed;
  return out;
}

DecayCheck verify_decay(TestFunction& F, double c1, double c2) {
  DecayCheck out;
  const double noise = 1e-13 * std::abs(F.transform(0.0));
  double inner = 0, outer = 0;
  const int steps = 60;
  inner = std::abs(F.transform(0.0));
  out.fitted_constant = inner;
  for (double sigma : {0.0, 0.5, 0.95}) {
    for (int i = 0; i <= steps; ++i) {
      const double r = std::max(sigma, 0.1 * std::pow(1e4, static_cast<double>(i) / steps));
      const double t = std::sqrt(std::max(r * r - sigma * sigma, 0.0));
      const double value = std::abs(F.transform({sigma, t}));
      const double shape = std::exp(c1 * sigma - c2 * std::pow(r, 0.75));
      if (r > 10 && value < 1e3 * noise) continue;  // below what quadrature resolves
      const double ratio = value / shape;
      out.checked_up_to = std::max(out.checked_up_to, r);
      out.fitted_constant = std::max(out.fitted_constant, ratio);
      (r <= 10 ? inner : outer) = std::max(r <= 10 ? inner : outer, ratio);
    }
  }
  out.passed = outer <= inner * (1 + 1e-9);
  F.flags().decay = out.passed;
  return out;
}

PrimeSide prime_side(const modsym::NewformData& f, const TestFunction& F) {
  PrimeSide out;
  const double support = F.support();
  const double limit = std::exp(support);
  if (limit < 2) return out;
  if (limit >= 1e12) fail(ErrorKind::Capacity, "prime sums would need p up to e^{B lambda} = " + std::to_string(limit));
  const auto n_max = static_cast<std::int64_t>(std::floor(limit));
  out.prime_limit = n_max;
  const auto& ps = arith::shared_primes(std::max<std::int64_t>(n_max, 2)).primes();
  const auto next = std::upper_bound(ps.begin(), ps.end(), f.pmax());
  if (next != ps.end() && *next <= n_max) {
    fail(ErrorKind::Capacity, "coefficient horizon " + std::to_string(f.pmax()) +
                                  " below required e^{B lambda} = " + std::to_string(n_max));
  }
  for (auto p : arith::shared_primes(std::max<std::int64_t>(n_max, 2)).primes()) {
    if (p > n_max) break;
    const double lp = std::log(static_cast<double>(p));
    for (int k = 1; k * lp < support; ++k) {
      const double w = F(k * lp) * lp / std::pow(static_cast<double>(p), 0.5 * k);
      if (k == 1) {
        out.s1 += f.ap(p) / std::sqrt(static_cast<double>(p)) * w;
        continue;
      }
      const double term = modsym::satake_power_sum(f, p, k) * w;
      out.s2 += term;
      out.s2_envelope += 2 * w;
      if (k == 2) {
        out.s2_square += term;
      } else {
        out.s2_higher += term;
        out.higher_envelope += 2 * w;
      }
    }
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> s1_weights(const TestFunction& F) {
  std::vector<std::pair<std::int64_t, double>> out;
  const double support = F.support();
  const double limit = std::exp(support);
  if (limit < 2) return out;
  const auto n_max = static_cast<std::int64_t>(std::floor(limit));
  for (auto p : arith::shared_primes(std::max<std::int64_t>(n_max, 2)).primes()) {
    if (p > n_max) break;
    const double lp = std::log(static_cast<double>(p));
    if (lp >= support) break;
    out.emplace_back(p, F(lp) * lp / std::sqrt(static_cast<double>(p)));
  }
  return out;
}

double archimedean_integral(const TestFunction& F, double tol) {
  // F(x)/(e^x - 1) - e^{-x}/x = (F(x) - 1)/(e^x - 1) + (x + e^{-x} - 1)/(x (e^x - 1))
  auto smooth_part = [](double x) {
    double num;
    if (x < 1e-3) {
      num = x * x * (0.5 - x * (1.0 / 6 - x * (1.0 / 24 - x / 120)));
    } else {
      num = x + std::expm1(-x);
    }
    return num / (x * std::expm1(x));
  };
  auto integrand = [&](double x) {
    if (x == 0) return 0.5 + 0.0;  // limit of the smooth part; F - 1 = O(x) over e^x - 1
    return smooth_part(x) - F.deficit(x) / std::expm1(x);
  };
  const double S = F.support();
  if (S <= 0) fail(ErrorKind::Numerical, "archimedean integral needs positive support");
  // kinks of the dilated base function sit only at 0 and the support edge;
  // two Kronrod orders must agree
  const double inside = integrate(integrand, 0, S, tol);
  const double check = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, S, 18, tol);
  if (!(std::abs(inside - check) <= 1e3 * tol * std::max(1.0, std::abs(inside)))) {
    fail(ErrorKind::Numerical, "archimedean quadrature did not converge");
  }
  // beyond the support the integrand is -e^{-x}/x
  return inside - boost::math::expint(1, S);
}

ZeroTail zero_tail(const lfunc::ZeroList& zeros, const TestFunction& F, double height) {
  std::vector<double> positive;
  for (double g : zeros.ordinates) {
    if (g > 0 && g <= height) positive.push_back(g);
  }
  std::sort(positive.begin(), positive.end());
  const double q = static_cast<double>(zeros.level);
  double fit = (positive.size() + 1.0) / (height * std::log(q * height));
  for (std::size_t j = 0; j < positive.size(); ++j) {
    const double t = std::max(positive[j], 1.0);
    fit = std::max(fit, (j + 1.0) / (t * std::log(q * t)));
  }
  ZeroTail out;
  out.constant = 1.5 * fit;
  // both signs; Stieltjes by parts against N(t) <= c t log(q t)
  const double k = F.envelope_power(), A = F.envelope_coef();
  const double integral = std::pow(height, 1 - k) * (std::log(q * height) / (k - 1) + 1 / ((k - 1) * (k - 1)));
  out.bound = 2 * k * A * out.constant * integral;
  return out;
}

ExplicitFormulaReport explicit_formula_check(const modsym::NewformData& f, const TestFunction& F,
                                             const lfunc::ZeroList& zeros) {
  ExplicitFormulaReport r;
  r.level = f.level;
  r.index = f.index;
  r.test_function = F.id();
  r.scale = F.scale();
  r.height = zeros.height;
  const double F0 = F(0.0);
  r.two_F0_log_sqrt_q = 2 * F0 * std::log(std::sqrt(static_cast<double>(f.level)));
  r.gamma_shift = -2 * F0 * std::log(2 * kPi);
  const PrimeSide ps = prime_side(f, F);
  r.s1 = ps.s1;
  r.s2 = ps.s2;
  r.quadrature_tol = 1e-10;
  r.archimedean = archimedean_integral(F, 1e-12);
  for (double g : zeros.ordinates) {
    if (std::abs(g) > zeros.height) continue;
    r.zero_side += F.transform({0.0, g}).real();
    ++r.zeros_used;
  }
  const ZeroTail tail = zero_tail(zeros, F, zeros.height);
  r.zero_tail_bound = tail.bound;
  r.zero_tail_constant = tail.constant;
  r.prime_tail_bound = 0;  // compact support: the prime sums are finite
  const double prime_terms = r.two_F0_log_sqrt_q - 2 * r.s1 - 2 * r.s2;
  r.residual = r.zero_side - (prime_terms + r.gamma_shift - 2 * r.archimedean);
  r.printed_residual = r.zero_side - (prime_terms - r.archimedean);
  r.passed = std::abs(r.residual) <= r.zero_tail_bound + r.prime_tail_bound + r.quadrature_tol + 1e-6;
  return r;
}

ExplicitFormulaReport explicit_formula_check(const modsym::NewformData& f, const TestFunction& F, double height,
                                             int jobs) {
  const lfunc::LFunction L(f);
  lfunc::ScanOptions opt;
  opt.jobs = jobs;
  return explicit_formula_check(f, F, lfunc::find_zeros(L, height, opt));
}

std::string to_json(const ExplicitFormulaReport& r) {
  nlohmann::ordered_json j;
  j["q"] = r.level;
  j["index"] = r.index;
  j["test_function"] = r.test_function;
  j["lambda"] = r.scale;
  j["T"] = r.height;
  j["terms"] = {{"two_F0_log_sqrt_q", r.two_F0_log_sqrt_q},
                {"gamma_shift", r.gamma_shift},
                {"S1", r.s1},
                {"S2", r.s2},
                {"archimedean", r.archimedean},
                {"zero_side", r.zero_side},
                {"zero_tail_bound", r.zero_tail_bound},
                {"prime_tail_bound", r.prime_tail_bound}};
  j["zeros_used"] = r.zeros_used;
  j["zero_tail_constant"] = r.zero_tail_constant;
  j["quadrature_tol"] = r.quadrature_tol;
  j["residual"] = r.residual;
  j["printed_residual"] = r.printed_residual;
  j["passed"] = r.passed;
  return j.dump();
}

}  // namespace j0rank::weil
