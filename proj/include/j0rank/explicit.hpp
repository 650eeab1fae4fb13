#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "j0rank/lfunc.hpp"
#include "j0rank/modsym.hpp"

namespace j0rank::weil {

using cplx = std::complex<double>;

struct TestFlags {
  bool even = true;
  bool normalized = true;  // F(0) = 1
  bool line_positivity = false;
  bool strip_positivity = false;
  bool decay = false;
};

/// Even real F with compact support and its transform Fhat(s) = int F(x) e^{sx} dx.
/// The base function lives on [-support, support]; `scale` dilates it,
/// F_scale(x) = F(x / scale), Fhat_scale(s) = scale Fhat(scale s).
class TestFunction {
 public:
  struct Base {
    std::string id;
    double support = 1;
    std::function<double(double)> value;
    // 1 - F(x), when it can be formed without cancellation near 0
    std::function<double(double)> deficit;
    std::function<cplx(cplx)> transform;
    // |Fhat(i gamma)| <= coef / |gamma|^power for the base function
    double envelope_coef = 0;
    double envelope_power = 2;
  };

  TestFunction(std::shared_ptr<const Base> base, double scale, TestFlags flags);

  const std::string& id() const noexcept { return base_->id; }
  double scale() const noexcept { return scale_; }
  double support() const noexcept { return base_->support * scale_; }
  double base_support() const noexcept { return base_->support; }
  const TestFlags& flags() const noexcept { return flags_; }
  TestFlags& flags() noexcept { return flags_; }

  double operator()(double x) const;
  /// 1 - F(x)
  double deficit(double x) const;
  cplx transform(cplx s) const;
  /// Fhat at s - 1/2, the weight attached to a zero s.
  cplx at_zero(cplx rho) const { return transform(rho - 0.5); }
  /// Upper bound for |Fhat(i gamma)|, decreasing in |gamma|.
  double line_envelope(double gamma) const;
  double envelope_power() const noexcept { return base_->envelope_power; }
  double envelope_coef() const noexcept;
  TestFunction dilate(double scale) const { return TestFunction(base_, scale, flags_); }

 private:
  std::shared_ptr<const Base> base_;
  double scale_;
  TestFlags flags_;
};

/// Triangle max(0, 1 - |x| / lambda).
TestFunction fejer(double lambda);

struct BumpParams {
  double support = 2.0;    // B; F vanishes outside [-B, B]
  double sharpness = 1.0;  // exponent scale of the bump
  double scale = 1.0;
};

/// Normalized self-convolution of exp(-k / (1 - (2x/B)^2)) on |x| < B/2.
TestFunction pp_candidate(const BumpParams& params);

struct StripCheck {
  bool passed = false;
  double worst = 0;
  cplx worst_point;
  int points = 0;
};

/// min Re Fhat over |Re s| <= sigma_max, |Im s| <= t_max; sets the strip
/// flag only on success. Fhat is even with real coefficients, so one
/// quadrant suffices.
StripCheck verify_strip_positivity(TestFunction& F, double sigma_max, int n_sigma = 9, int n_t = 200,
                                   double t_max = 50);

struct DecayCheck {
  bool passed = false;
  double fitted_constant = 0;
  double checked_up_to = 0;  // |s| beyond which Fhat sits under quadrature noise
};

/// |Fhat(s)| <= C exp(c1 |Re s| - c2 |s|^{3/4}) on a log grid up to |s| = 1000.
DecayCheck verify_decay(TestFunction& F, double c1, double c2);

struct PrimeSide {
  double s1 = 0;
  double s2 = 0;           // all n >= 2
  double s2_square = 0;    // n = 2 part
  double s2_higher = 0;    // n >= 3 part
  double s2_envelope = 0;  // 2 sum F(n log p) log p / p^{n/2}, n >= 2
  double higher_envelope = 0;
  std::int64_t prime_limit = 0;  // largest p^n that can contribute
};

/// Finite prime sums of the explicit formula, with a_{p^n} = alpha^n + conj(alpha)^n.
PrimeSide prime_side(const modsym::NewformData& f, const TestFunction& F);

/// (p, F(log p) log p / sqrt p) for every prime inside the support; S1 is
/// the sum of these weights against lambda_f(p).
std::vector<std::pair<std::int64_t, double>> s1_weights(const TestFunction& F);

/// int_0^inf (F(x) e^{-x} / (1 - e^{-x}) - e^{-x}/x) dx.
double archimedean_integral(const TestFunction& F, double tol = 1e-12);

struct ZeroTail {
  double constant = 0;  // c in N(t) <= c t log(q t), margin included
  double bound = 0;
};

/// Bound for sum_{|gamma| > T} |Fhat(i gamma)| from a count envelope fitted on the computed zeros.
ZeroTail zero_tail(const lfunc::ZeroList& zeros, const TestFunction& F, double height);

struct ExplicitFormulaReport {
  std::int64_t level = 0;
  int index = 0;
  std::string test_function;
  double scale = 0;
  double height = 0;
  double two_F0_log_sqrt_q = 0;
  double gamma_shift = 0;  // -2 F(0) log 2 pi
  double s1 = 0, s2 = 0;
  double archimedean = 0;
  double zero_side = 0;
  int zeros_used = 0;
  double zero_tail_bound = 0;
  double zero_tail_constant = 0;
  double prime_tail_bound = 0;
  double quadrature_tol = 0;
  double residual = 0;
  /// residual of the formula with the gamma shift dropped and the
  /// archimedean integral taken once
  double printed_residual = 0;
  bool passed = false;
};

/// Both sides of the explicit formula for one form. The zero side uses the
/// computed zeros up to height T and a fitted tail.
ExplicitFormulaReport explicit_formula_check(const modsym::NewformData& f, const TestFunction& F, double height,
                                             int jobs = 1);
ExplicitFormulaReport explicit_formula_check(const modsym::NewformData& f, const TestFunction& F,
                                             const lfunc::ZeroList& zeros);

std::string to_json(const ExplicitFormulaReport& r);

}  // namespace j0rank::weil
