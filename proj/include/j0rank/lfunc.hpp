#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "j0rank/modsym.hpp"

namespace j0rank::lfunc {

using cplx = std::complex<double>;

/// lambda(1..n) for f; entry 0 unused. Capacity error past the a_p horizon.
std::vector<double> lambda_coeffs(const modsym::NewformData& f, std::int64_t n);

/// Completed L-function Lambda(s) = (sqrt(q)/2pi)^s Gamma(s + 1/2) L(f, s),
/// centre 1/2, Lambda(s) = eps Lambda(1 - s).
class LFunction {
 public:
  explicit LFunction(const modsym::NewformData& f);

  const modsym::NewformData& form() const noexcept { return *form_; }
  int eps() const noexcept { return form_->eps; }
  double scale() const noexcept { return q_scale_; }
  std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(lambda_.size()) - 1; }

  /// Lambda(s) to absolute accuracy tol.
  cplx completed(cplx s, double tol = 1e-12) const;
  /// Lambda(s) times the positive factor e^{phi |t|} that removes the
  /// exponential decay; same argument and zeros as Lambda. tol is absolute on
  /// the rescaled value.
  cplx rescaled(cplx s, double tol = 1e-11) const;
  /// Real function on the critical line with the zeros of Lambda(1/2 + it):
  /// Re or Im (eps = +1 / -1) of the rescaled value.
  double hardy_z(double t, double tol = 1e-11) const;
  /// Lambda(s) from the Mellin integral split on the ray arg y = phi, with
  /// the given root number. Any phi in [0, pi/2) gives the same value when
  /// eps is the true sign.
  cplx completed_split(cplx s, double phi, int eps, double tol = 1e-12) const;
  /// Root number recovered numerically; optionally the residual of the fit.
  int fitted_sign(double* residual = nullptr) const;
  /// Terms needed for the requested accuracy on the rescaled value.
  std::int64_t terms_needed(cplx s, double phi, double tol_rescaled) const;
  /// Direct Dirichlet series times the gamma factor, for Re s > 1.
  cplx completed_direct(cplx s, std::int64_t terms) const;

 private:
  double rotation(double t) const;
  cplx split_sum(cplx s, double phi, int eps, double tol) const;
  const modsym::NewformData* form_;
  double q_scale_;
  std::vector<double> lambda_;
};

cplx completed_lambda(const modsym::NewformData& f, cplx s, double tol = 1e-12);

struct ZeroList {
  std::int64_t level = 0;
  int index = 0;
  double height = 0;
  /// ordinates in [-T, T], ascending, central zeros repeated by multiplicity
  std::vector<double> ordinates;
  std::vector<std::pair<double, double>> brackets;  // for the positive ordinates
  int central_order = 0;
  int contour_count = 0;  // argument-principle count for 0 < t <= T
};

struct ScanOptions {
  double refine_tol = 1e-8;
  int jobs = 1;
  double eval_tol = 1e-11;
};

ZeroList find_zeros(const LFunction& L, double height, const ScanOptions& options = {});

/// Zeros of Lambda in [alpha, 5/4] x [t1, t2] by the argument principle.
int count_zeros_box(const LFunction& L, double alpha, double t1, double t2);

/// Winding number of Lambda around the rectangle [s0, s1] (lower-left,
/// upper-right), with nudging when a zero sits on the contour.
int contour_count(const LFunction& L, double sigma0, double sigma1, double t1, double t2);

struct RankResult {
  int rank = 0;
  std::vector<double> taylor;  // |c_k| of Lambda around 1/2
  int points = 0;
  bool parity_ok = true;
};

RankResult analytic_rank(const LFunction& L);

std::string zeros_csv(const std::vector<ZeroList>& lists);

}  // namespace j0rank::lfunc
